"""Observable statistics on word lists.

Word-level distances (Hamming, Levenshtein), threshold cognate detection and
the language-pair statistics omega, phi, varphi and chi.

An empty string marks a missing word. Concepts with a missing word on either
side, or flagged ``UNKNOWN``, are left out of every average and out of
``n_compared``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import LexiclockError

__all__ = [
    "Cognacy",
    "PairStatistics",
    "DEFAULT_THETA",
    "hamming_overlap",
    "levenshtein",
    "normalized_levenshtein",
    "word_distance",
    "word_overlap",
    "detect_cognates",
    "pair_statistics",
    "statistics_from_overlaps",
    "encode_words",
]

DEFAULT_THETA = 0.5


class Cognacy(enum.IntEnum):
    NON_COGNATE = 0
    COGNATE = 1
    UNKNOWN = -1


@dataclass(frozen=True)
class PairStatistics:
    omega: float
    mean_distance: float
    phi: float
    varphi: float
    chi: float
    n_compared: int


def hamming_overlap(a: Sequence, b: Sequence) -> float:
    """Fraction of positions at which ``a`` and ``b`` agree."""
    if len(a) != len(b):
        raise LexiclockError(f"Hamming overlap needs equal lengths, got {len(a)} and {len(b)}")
    if len(a) == 0:
        raise LexiclockError("Hamming overlap of empty words is undefined")
    return sum(x == y for x, y in zip(a, b)) / len(a)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_levenshtein(a: Sequence, b: Sequence) -> float:
    """Edit distance divided by the longer word's length."""
    longest = max(len(a), len(b))
    if longest == 0:
        raise LexiclockError("normalized Levenshtein distance of two empty words is undefined")
    return levenshtein(a, b) / longest


def word_distance(a: Sequence, b: Sequence, metric: str = "auto") -> float:
    """Normalized word distance.

    ``metric="auto"`` uses the Hamming distance for equal-length words and
    the normalized Levenshtein distance otherwise; ``"levenshtein"`` always
    uses the latter.
    """
    if metric not in ("auto", "levenshtein"):
        raise LexiclockError(f"unknown metric {metric!r}")
    if metric == "auto" and len(a) == len(b) and a:
        return sum(x != y for x, y in zip(a, b)) / len(a)
    return normalized_levenshtein(a, b)


def word_overlap(a: Sequence, b: Sequence, metric: str = "auto") -> float:
    if metric == "auto" and len(a) == len(b) and a:
        return hamming_overlap(a, b)
    return 1.0 - word_distance(a, b, metric)


def detect_cognates(
    a: Sequence[str], b: Sequence[str], theta: float = DEFAULT_THETA
) -> list[Cognacy]:
    """Threshold rule: cognate iff normalized Levenshtein distance <= ``theta``."""
    if not 0.0 <= theta <= 1.0:
        raise LexiclockError(f"theta must lie in [0, 1], got {theta!r}")
    if len(a) != len(b):
        raise LexiclockError("word lists must share concept indexing")
    flags = []
    for x, y in zip(a, b):
        if not x or not y:
            flags.append(Cognacy.UNKNOWN)
        elif normalized_levenshtein(x, y) <= theta:
            flags.append(Cognacy.COGNATE)
        else:
            flags.append(Cognacy.NON_COGNATE)
    return flags


def statistics_from_overlaps(overlaps, flags, n_eff: float) -> PairStatistics:
    """Pair statistics from per-concept word overlaps and cognacy flags.

    ``overlaps`` may contain NaN for missing pairs; those concepts and the
    ones flagged ``UNKNOWN`` are excluded.
    """
    if not n_eff > 1:
        raise LexiclockError(f"n_eff must be > 1, got {n_eff}")
    overlaps = np.asarray(overlaps, dtype=np.float64)
    flags = np.asarray(flags, dtype=np.int64)
    if overlaps.shape != flags.shape:
        raise LexiclockError("overlaps and flags must have the same length")
    keep = (flags != Cognacy.UNKNOWN) & ~np.isnan(overlaps)
    n = int(keep.sum())
    if n == 0:
        raise LexiclockError("no concept has both words present and a known cognacy")
    ov = overlaps[keep]
    cog = flags[keep] == Cognacy.COGNATE
    scaled = n_eff / (n_eff - 1.0) * (ov - 1.0 / n_eff)
    phi = float(scaled.sum() / n)
    varphi = float(np.where(cog, scaled, 0.0).sum() / n)
    return PairStatistics(
        omega=float(cog.sum() / n),
        mean_distance=float((1.0 - ov).sum() / n),
        phi=phi,
        varphi=varphi,
        chi=phi - varphi,
        n_compared=n,
    )


def pair_statistics(
    a: Sequence[str],
    b: Sequence[str],
    flags: Sequence[int],
    n_eff: float,
    metric: str = "auto",
) -> PairStatistics:
    """Language-pair statistics of two word lists over shared concepts."""
    if not (len(a) == len(b) == len(flags)):
        raise LexiclockError("word lists and flags must share concept indexing")
    overlaps = [word_overlap(x, y, metric) if x and y else np.nan for x, y in zip(a, b)]
    return statistics_from_overlaps(overlaps, flags, n_eff)


def encode_words(words: Sequence[str], alphabet: dict | None = None):
    """Map words to a padded ``int32`` code matrix and a length vector.

    ``alphabet`` is extended in place with unseen characters, so several lists
    can share one coding.
    """
    if alphabet is None:
        alphabet = {}
    width = max((len(w) for w in words), default=0)
    codes = np.zeros((len(words), max(width, 1)), dtype=np.int32)
    lens = np.zeros(len(words), dtype=np.int64)
    for i, w in enumerate(words):
        lens[i] = len(w)
        for k, ch in enumerate(w):
            codes[i, k] = alphabet.setdefault(ch, len(alphabet))
    return codes, lens


def kernel_mode(metric: str) -> int:
    if metric == "auto":
        return _kernels.MODE_AUTO
    if metric == "levenshtein":
        return _kernels.MODE_LEVENSHTEIN
    raise LexiclockError(f"unknown metric {metric!r}")
