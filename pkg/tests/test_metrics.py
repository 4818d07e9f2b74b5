import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lexiclock import _kernels
from lexiclock.errors import LexiclockError
from lexiclock.metrics import (
    Cognacy,
    detect_cognates,
    encode_words,
    hamming_overlap,
    kernel_mode,
    levenshtein,
    normalized_levenshtein,
    pair_statistics,
    statistics_from_overlaps,
    word_distance,
)

from oracles import all_strings, edit_distance_table, recursive_levenshtein

words = st.text(alphabet="abcd", max_size=7)
nonempty = st.text(alphabet="abcd", min_size=1, max_size=7)


def test_hamming_examples():
    assert hamming_overlap("abcd", "abcd") == 1.0
    assert hamming_overlap("abcd", "abxy") == 0.5
    assert hamming_overlap((1, 2, 3), (3, 2, 1)) == pytest.approx(1 / 3)


def test_hamming_rejects():
    with pytest.raises(LexiclockError):
        hamming_overlap("abc", "ab")
    with pytest.raises(LexiclockError):
        hamming_overlap("", "")


def test_levenshtein_examples():
    assert levenshtein("kitten", "sitting") == 3
    assert normalized_levenshtein("kitten", "sitting") == pytest.approx(3 / 7)
    assert normalized_levenshtein("", "abc") == 1.0
    assert normalized_levenshtein("abc", "abc") == 0.0
    assert levenshtein("flaw", "lawn") == 2
    with pytest.raises(LexiclockError):
        normalized_levenshtein("", "")


def test_levenshtein_small_exhaustive():
    strings, table = edit_distance_table(all_strings("ab", 4))
    for ia, a in enumerate(strings):
        for ib, b in enumerate(strings):
            assert levenshtein(a, b) == table[ia, ib]


@given(a=st.text(alphabet="xyz", max_size=5), b=st.text(alphabet="xyz", max_size=5))
def test_levenshtein_matches_recursion(a, b):
    assert levenshtein(a, b) == recursive_levenshtein(a, b)


@given(a=words, b=words, c=words)
def test_levenshtein_is_a_metric(a, b, c):
    assert levenshtein(a, b) == levenshtein(b, a)
    assert (levenshtein(a, b) == 0) == (a == b)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)
    assert abs(len(a) - len(b)) <= levenshtein(a, b) <= max(len(a), len(b))


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(*[st.text("abc", min_size=n, max_size=n)] * 2)))
def test_edit_distance_at_most_hamming(pair):
    a, b = pair
    assert levenshtein(a, b) <= round((1 - hamming_overlap(a, b)) * len(a))


def test_word_distance_modes():
    assert word_distance("abcd", "bcda") == 1.0
    assert word_distance("abcd", "bcda", "levenshtein") == 0.5
    assert word_distance("abc", "abcd") == 0.25
    with pytest.raises(LexiclockError):
        word_distance("ab", "cd", "cosine")


def test_detect_cognates_threshold_is_inclusive():
    flags = detect_cognates(["abcd", "abcd", "abcd", ""], ["abxy", "axyz", "abcd", "ab"], 0.5)
    assert flags == [Cognacy.COGNATE, Cognacy.NON_COGNATE, Cognacy.COGNATE, Cognacy.UNKNOWN]
    with pytest.raises(LexiclockError):
        detect_cognates(["a"], ["a"], 1.5)
    with pytest.raises(LexiclockError):
        detect_cognates(["a"], ["a", "b"])


def test_pair_statistics_identical_lists():
    a = ["abcde", "bbcde", "ccccc"]
    s = pair_statistics(a, a, detect_cognates(a, a), 5.18)
    assert s.omega == 1.0
    assert s.phi == pytest.approx(1.0, rel=1e-15)
    assert s.varphi == s.phi
    assert s.chi == 0.0
    assert s.n_compared == 3


def test_pair_statistics_chance_overlap():
    s = pair_statistics(["abcde"], ["axyzw"], [Cognacy.NON_COGNATE], 5.0)
    assert s.omega == 0.0
    assert s.phi == 0.0
    assert s.varphi == 0.0


def test_pair_statistics_half_overlap():
    s = pair_statistics(["ab", "cd"], ["ax", "cy"], [1, 1], 5.18)
    assert s.phi == pytest.approx(0.380383, abs=1e-6)
    assert s.phi == pytest.approx(5.18 / 4.18 * (0.5 - 1 / 5.18), rel=1e-14)


def test_pair_statistics_skips_missing():
    s = pair_statistics(["ab", "", "cd"], ["ab", "xy", "zz"], [1, 0, 0], 5.0)
    assert s.n_compared == 2
    assert s.omega == 0.5
    with pytest.raises(LexiclockError):
        pair_statistics(["", "a"], ["b", ""], [1, 1], 5.0)
    with pytest.raises(LexiclockError):
        pair_statistics(["ab"], ["ab"], [1], 1.0)


@given(
    st.lists(st.tuples(nonempty, nonempty, st.booleans()), min_size=1, max_size=20),
    st.floats(1.5, 20.0),
)
def test_pair_statistics_properties(rows, n_eff):
    a, b, cog = zip(*rows)
    flags = [int(c) for c in cog]
    s = pair_statistics(a, b, flags, n_eff)
    s_rev = pair_statistics(b, a, flags, n_eff)
    assert s == s_rev
    assert s.phi == pytest.approx(s.varphi + s.chi, abs=1e-12)
    assert 0.0 <= s.omega <= 1.0 and 0.0 <= s.mean_distance <= 1.0
    lo = -1.0 / (n_eff - 1.0)
    assert lo - 1e-12 <= s.phi <= 1.0 + 1e-12
    assert s.phi == pytest.approx(1.0 - n_eff / (n_eff - 1) * s.mean_distance, abs=1e-12)


def test_statistics_from_overlaps_rejects_shape():
    with pytest.raises(LexiclockError):
        statistics_from_overlaps([0.5, 0.5], [1], 5.0)


def test_encode_words_shares_alphabet():
    alphabet = {}
    codes, lens = encode_words(["ab", "", "bca"], alphabet)
    assert codes.dtype == np.int32 and codes.shape == (3, 3)
    assert lens.tolist() == [2, 0, 3]
    assert alphabet == {"a": 0, "b": 1, "c": 2}
    codes2, _ = encode_words(["ca"], alphabet)
    assert codes2[0].tolist() == [2, 0]


@given(st.lists(st.tuples(words, words), min_size=1, max_size=15))
def test_kernel_pair_distances_match_python(rows):
    a, b = zip(*rows)
    alphabet = {}
    ca, la = encode_words(a, alphabet)
    cb, lb = encode_words(b, alphabet)
    for metric in ("auto", "levenshtein"):
        out = _kernels.pair_distances(ca, la, cb, lb, kernel_mode(metric))
        for k, (x, y) in enumerate(rows):
            if not x or not y:
                assert np.isnan(out[k]).all()
            else:
                assert out[k, 0] == word_distance(x, y, metric)
                assert out[k, 1] == normalized_levenshtein(x, y)


def test_cross_concept_sums_match_brute_force():
    rng = np.random.default_rng(7)
    flat = ["".join(rng.choice(list("abc"), size=rng.integers(0, 5))) for _ in range(40)]
    concept = np.arange(40, dtype=np.int64) % 8
    codes, lens = encode_words(flat)
    for metric in ("auto", "levenshtein"):
        total = _kernels.reduce_rows(
            _kernels.cross_concept_sums(codes, lens, concept, kernel_mode(metric))
        )
        ds = [
            word_distance(flat[k], flat[l], metric)
            for k in range(40)
            for l in range(k + 1, 40)
            if flat[k] and flat[l] and concept[k] != concept[l]
        ]
        assert total[0] == len(ds)
        assert total[1] == pytest.approx(sum(ds), rel=1e-13)
        assert total[2] == pytest.approx(sum(d * d for d in ds), rel=1e-13)
