"""Compiled kernels for bulk word-distance work.

Words are passed as a padded ``int32`` code matrix plus a length vector.
Distance modes: ``MODE_AUTO`` uses Hamming for equal-length pairs and
Levenshtein otherwise, ``MODE_LEVENSHTEIN`` always uses Levenshtein.
"""

import math

import numba as nb
import numpy as np

# the bundled TBB is too old for numba; avoid probing it
nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

MODE_AUTO = 0
MODE_LEVENSHTEIN = 1


@nb.njit(cache=True, nogil=True)
def _levenshtein(a, la, b, lb, row):
    # two-row DP folded into one buffer of size >= lb + 1
    for j in range(lb + 1):
        row[j] = j
    for i in range(1, la + 1):
        diag = row[0]
        row[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            up = row[j]
            cost = diag + (0 if ai == b[j - 1] else 1)
            ins = row[j - 1] + 1
            dele = up + 1
            best = cost
            if ins < best:
                best = ins
            if dele < best:
                best = dele
            row[j] = best
            diag = up
    return row[lb]


@nb.njit(cache=True, nogil=True)
def _hamming(a, b, n):
    d = 0
    for k in range(n):
        if a[k] != b[k]:
            d += 1
    return d


@nb.njit(cache=True, nogil=True)
def _distance(a, la, b, lb, mode, row):
    """Normalized distance in [0, 1]; both words must be non-empty."""
    if mode == MODE_AUTO and la == lb:
        return _hamming(a, b, la) / la
    longest = la if la > lb else lb
    return _levenshtein(a, la, b, lb, row) / longest


@nb.njit(cache=True, nogil=True)
def pair_distances(codes_a, lens_a, codes_b, lens_b, mode):
    """Per-concept (overlap-mode distance, Levenshtein distance) of two lists.

    Missing words (length 0) yield NaN in both columns.
    """
    m = codes_a.shape[0]
    width = max(codes_a.shape[1], codes_b.shape[1]) + 1
    row = np.empty(width, dtype=np.int64)
    out = np.empty((m, 2), dtype=np.float64)
    for i in range(m):
        la = lens_a[i]
        lb = lens_b[i]
        if la == 0 or lb == 0:
            out[i, 0] = np.nan
            out[i, 1] = np.nan
            continue
        lev = _levenshtein(codes_a[i], la, codes_b[i], lb, row) / (la if la > lb else lb)
        out[i, 1] = lev
        if mode == MODE_AUTO and la == lb:
            out[i, 0] = _hamming(codes_a[i], codes_b[i], la) / la
        else:
            out[i, 0] = lev
    return out


@nb.njit(cache=True, parallel=True)
def cross_concept_sums(codes, lens, concept, mode):
    """Per-row partial sums over word slots k < l with different concepts.

    Returns an ``(n, 3)`` array of (count, sum d, sum d^2) for each row ``k``.
    Rows are reduced by the caller in a fixed order, so the total does not
    depend on the thread count.
    """
    n = codes.shape[0]
    width = codes.shape[1] + 1
    out = np.zeros((n, 3), dtype=np.float64)
    for k in nb.prange(n):
        lk = lens[k]
        if lk == 0:
            continue
        row = np.empty(width, dtype=np.int64)
        cnt = 0.0
        s1 = 0.0
        s2 = 0.0
        for l in range(k + 1, n):
            ll = lens[l]
            if ll == 0 or concept[l] == concept[k]:
                continue
            d = _distance(codes[k], lk, codes[l], ll, mode, row)
            cnt += 1.0
            s1 += d
            s2 += d * d
        out[k, 0] = cnt
        out[k, 1] = s1
        out[k, 2] = s2
    return out


def reduce_rows(partial):
    """Fixed-order compensated reduction of per-row partial sums."""
    return tuple(math.fsum(partial[:, c]) for c in range(partial.shape[1]))
