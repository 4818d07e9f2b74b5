"""Effective-parameter and rate estimation from a set of Swadesh lists.

* ``estimate_n`` / ``estimate_l``: effective alphabet size and word length,
  from word pairs belonging to different concepts (no common origin).
* ``estimate_lambda`` / ``estimate_mu``: replacement and redraw rates from
  variety pairs that split at the root and lie more than ``g`` km apart.

The root-split condition is encoded by a clade label per variety: a pair is
admissible when the labels differ.
"""

from __future__ import annotations

import contextlib
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numba
import numpy as np

from . import _kernels
from .errors import (
    InsufficientPairsError,
    LexiclockError,
    SaturationError,
)
from .metrics import DEFAULT_THETA, encode_words, kernel_mode

__all__ = [
    "EARTH_RADIUS_KM",
    "MIN_PAIRS",
    "VarietyMeta",
    "SwadeshDataset",
    "DistanceMoments",
    "PairObservation",
    "SweepRow",
    "geo_distance",
    "cross_concept_moments",
    "estimate_n",
    "estimate_l",
    "admissible_pairs",
    "pair_observations",
    "estimate_lambda",
    "estimate_mu",
    "sweep_g",
]

EARTH_RADIUS_KM = 6371.0088
MIN_PAIRS = 10


@dataclass(frozen=True)
class VarietyMeta:
    id: str
    name: str
    latitude: float
    longitude: float
    clade: str

    def __post_init__(self):
        if not (math.isfinite(self.latitude) and abs(self.latitude) <= 90):
            raise LexiclockError(f"variety {self.id!r}: invalid latitude {self.latitude!r}")
        if not (math.isfinite(self.longitude) and abs(self.longitude) <= 180):
            raise LexiclockError(f"variety {self.id!r}: invalid longitude {self.longitude!r}")
        if not self.clade:
            raise LexiclockError(f"variety {self.id!r}: empty clade label")


@dataclass(frozen=True)
class SwadeshDataset:
    """Word table ``words[v][c]`` for variety ``v`` and concept ``c``; '' = missing."""

    varieties: tuple[VarietyMeta, ...]
    concepts: tuple[str, ...]
    words: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "varieties", tuple(self.varieties))
        object.__setattr__(self, "concepts", tuple(self.concepts))
        object.__setattr__(self, "words", tuple(tuple(row) for row in self.words))
        if len(self.varieties) < 2 or len(self.concepts) < 2:
            raise LexiclockError("a dataset needs at least 2 varieties and 2 concepts")
        if len(self.words) != len(self.varieties) or any(
            len(row) != len(self.concepts) for row in self.words
        ):
            raise LexiclockError("word table dimensions do not match varieties x concepts")
        ids = [v.id for v in self.varieties]
        if len(set(ids)) != len(ids):
            raise LexiclockError("duplicate variety ids")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.varieties), len(self.concepts)

    def index(self, variety_id: str) -> int:
        for k, v in enumerate(self.varieties):
            if v.id == variety_id:
                return k
        raise LexiclockError(f"unknown variety {variety_id!r}")

    def words_of(self, variety_id: str) -> tuple[str, ...]:
        return self.words[self.index(variety_id)]


class DistanceMoments(NamedTuple):
    """Count, mean distance and mean squared distance over cross-concept pairs."""

    count: int
    mean_d: float
    mean_d2: float


class PairObservation(NamedTuple):
    i: int
    j: int
    km: float
    omega: float
    mean_distance: float
    n_compared: int


class SweepRow(NamedTuple):
    """One threshold of the sweep; rates are ``None`` when too few pairs remain."""

    g: float
    pair_count: int
    lambda_g: float | None
    mu_hat_g: float | None


@contextlib.contextmanager
def _numba_threads(threads: int | None):
    if threads is None:
        yield
        return
    if threads < 1:
        raise LexiclockError("threads must be >= 1")
    previous = numba.get_num_threads()
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
    try:
        yield
    finally:
        numba.set_num_threads(previous)


def geo_distance(a: VarietyMeta, b: VarietyMeta) -> float:
    """Great-circle (haversine) distance in km."""
    lat1, lat2 = math.radians(a.latitude), math.radians(b.latitude)
    dlat = lat2 - lat1
    dlon = math.radians(b.longitude - a.longitude)
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def _flatten(ds: SwadeshDataset):
    words = [w for row in ds.words for w in row]
    codes, lens = encode_words(words)
    concept = np.tile(np.arange(len(ds.concepts), dtype=np.int64), len(ds.varieties))
    return codes, lens, concept


def cross_concept_moments(
    ds: SwadeshDataset, metric: str = "auto", threads: int | None = None
) -> DistanceMoments:
    """Distance moments over all pairs of present words with different concepts.

    Every unordered pair of word slots counts once, within one variety or
    across two; missing words are skipped.
    """
    codes, lens, concept = _flatten(ds)
    with _numba_threads(threads):
        partial = _kernels.cross_concept_sums(codes, lens, concept, kernel_mode(metric))
    count, s1, s2 = _kernels.reduce_rows(partial)
    if count == 0:
        raise InsufficientPairsError("no usable cross-concept word pairs")
    return DistanceMoments(int(count), s1 / count, s2 / count)


def estimate_n(
    ds: SwadeshDataset,
    metric: str = "auto",
    moments: DistanceMoments | None = None,
    threads: int | None = None,
) -> float:
    """Effective alphabet size: inverse chance overlap of unrelated words."""
    moments = moments or cross_concept_moments(ds, metric, threads)
    overlap = 1.0 - moments.mean_d
    if overlap <= 0.0:
        raise SaturationError("unrelated words never share a character: N is unbounded")
    return 1.0 / overlap


def estimate_l(
    ds: SwadeshDataset,
    n: float,
    metric: str = "auto",
    moments: DistanceMoments | None = None,
    threads: int | None = None,
) -> float:
    """Effective word length from the spread of the rescaled chance overlap.

    1/L = (N-1) * mean[(1 - c*d)^2] with c = N/(N-1), expanded in the first two
    distance moments so one pass over the pairs serves both N and L.
    """
    if not n > 1:
        raise LexiclockError(f"n must be > 1, got {n}")
    moments = moments or cross_concept_moments(ds, metric, threads)
    c = n / (n - 1.0)
    second = 1.0 - 2.0 * c * moments.mean_d + c * c * moments.mean_d2
    inv_l = (n - 1.0) * second
    if inv_l <= 0.0:
        raise SaturationError("non-positive spread of rescaled overlaps")
    return 1.0 / inv_l


def _admissible(ds: SwadeshDataset, g: float):
    if not g >= 0:
        raise LexiclockError(f"g must be >= 0, got {g!r}")
    vs = ds.varieties
    return [
        (i, j)
        for i in range(len(vs))
        for j in range(i + 1, len(vs))
        if vs[i].clade != vs[j].clade and geo_distance(vs[i], vs[j]) > g
    ]


def admissible_pairs(ds: SwadeshDataset, g: float) -> tuple[list[tuple[int, int]], int]:
    """Pairs split at the root and more than ``g`` km apart, with their count."""
    pairs = _admissible(ds, g)
    return pairs, len(pairs)


def pair_observations(
    ds: SwadeshDataset,
    theta: float = DEFAULT_THETA,
    metric: str = "auto",
    pairs: Sequence[tuple[int, int]] | None = None,
) -> list[PairObservation]:
    """Observed cognate overlap and mean word distance for variety pairs.

    Defaults to every cross-clade pair. Cognacy uses the Levenshtein
    threshold rule; the word distance follows ``metric``.
    """
    if not 0.0 <= theta <= 1.0:
        raise LexiclockError(f"theta must lie in [0, 1], got {theta!r}")
    if pairs is None:
        vs = ds.varieties
        pairs = [
            (i, j)
            for i in range(len(vs))
            for j in range(i + 1, len(vs))
            if vs[i].clade != vs[j].clade
        ]
    alphabet: dict = {}
    encoded = [encode_words(row, alphabet) for row in ds.words]
    mode = kernel_mode(metric)
    out = []
    for i, j in pairs:
        (ca, la), (cb, lb) = encoded[i], encoded[j]
        dist = _kernels.pair_distances(ca, la, cb, lb, mode)
        present = ~np.isnan(dist[:, 0])
        n = int(present.sum())
        if n == 0:
            continue
        cognate = dist[present, 1] <= theta
        out.append(
            PairObservation(
                i=i,
                j=j,
                km=geo_distance(ds.varieties[i], ds.varieties[j]),
                omega=float(cognate.sum() / n),
                mean_distance=float(dist[present, 0].sum() / n),
                n_compared=n,
            )
        )
    return out


def _select(observations, g: float, min_pairs: int):
    if not g >= 0:
        raise LexiclockError(f"g must be >= 0, got {g!r}")
    chosen = [o for o in observations if o.km > g]
    if len(chosen) < min_pairs:
        raise InsufficientPairsError(
            f"only {len(chosen)} admissible pairs beyond g={g:g} km (need {min_pairs})"
        )
    return chosen


def _check_t_root(t_root: float) -> None:
    if not (t_root > 0 and math.isfinite(t_root)):
        raise LexiclockError(f"t_root must be positive, got {t_root!r}")


def estimate_lambda(
    ds: SwadeshDataset,
    t_root: float,
    g: float = 0.0,
    theta: float = DEFAULT_THETA,
    min_pairs: int = MIN_PAIRS,
    observations: Sequence[PairObservation] | None = None,
) -> float:
    """Replacement rate from the log of the mean cognate overlap of admissible pairs."""
    _check_t_root(t_root)
    if observations is None:
        observations = pair_observations(ds, theta)
    chosen = _select(observations, g, min_pairs)
    mean_omega = math.fsum(o.omega for o in chosen) / len(chosen)
    if mean_omega <= 0.0:
        raise SaturationError("mean cognate overlap is zero")
    # + 0.0 turns -0.0 (all pairs fully cognate) into 0.0
    return -math.log(mean_omega) / (2.0 * t_root) + 0.0


def estimate_mu(
    ds: SwadeshDataset,
    t_root: float,
    g: float,
    n: float,
    lambda_g: float,
    min_pairs: int = MIN_PAIRS,
    observations: Sequence[PairObservation] | None = None,
    metric: str = "auto",
) -> tuple[float, float]:
    """Character redraw rate ``mu`` and effective change rate ``mu_hat``.

    The combined rate comes from the log of the mean rescaled overlap
    1 - N/(N-1)*D over admissible pairs; ``lambda_g`` is then subtracted.
    """
    _check_t_root(t_root)
    if not n > 1:
        raise LexiclockError(f"n must be > 1, got {n}")
    if observations is None:
        observations = pair_observations(ds, metric=metric)
    chosen = _select(observations, g, min_pairs)
    c = n / (n - 1.0)
    signal = math.fsum(1.0 - c * o.mean_distance for o in chosen) / len(chosen)
    if signal <= 0.0:
        raise SaturationError(
            f"mean rescaled overlap {signal:.4g} <= 0: signal saturated at g={g:g} km"
        )
    mu = -math.log(signal) / (2.0 * t_root) - lambda_g
    if mu < 0:
        warnings.warn(
            f"negative mu estimate ({mu:.3g}) at g={g:g} km: word distances too small for lambda",
            RuntimeWarning,
            stacklevel=2,
        )
    return mu, (n - 1.0) / n * mu


def sweep_g(
    ds: SwadeshDataset,
    t_root: float,
    g_min: float,
    g_max: float,
    step: float,
    theta: float = DEFAULT_THETA,
    n: float | None = None,
    min_pairs: int = MIN_PAIRS,
    metric: str = "auto",
    threads: int | None = None,
) -> list[SweepRow]:
    """lambda(g) and mu_hat(g) over a grid of distance thresholds."""
    _check_t_root(t_root)
    if not (0 <= g_min <= g_max) or not step > 0:
        raise LexiclockError(f"invalid grid g_min={g_min}, g_max={g_max}, step={step}")
    if n is None:
        n = estimate_n(ds, metric, threads=threads)
    observations = pair_observations(ds, theta, metric)
    count = int(math.floor((g_max - g_min) / step + 1e-9)) + 1
    rows = []
    for k in range(count):
        g = g_min + k * step
        pair_count = sum(1 for o in observations if o.km > g)
        lam = mu_hat_g = None
        try:
            lam = estimate_lambda(ds, t_root, g, theta, min_pairs, observations)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                _, mu_hat_g = estimate_mu(ds, t_root, g, n, lam, min_pairs, observations, metric)
        except (InsufficientPairsError, SaturationError):
            pass
        rows.append(SweepRow(g, pair_count, lam, mu_hat_g))
    return rows
