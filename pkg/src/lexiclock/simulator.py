"""Stochastic simulation of two daughter languages and a Monte Carlo harness.

Words are fixed-length integer arrays over ``n_sym`` symbols. Each word is
replaced at rate ``lam`` by a fresh uniform word carrying a new lineage tag,
and each character is redrawn at rate ``mu`` uniformly over the alphabet (the
current symbol included). Two samplers are provided:

* :func:`evolve_pair_events` runs the exponential clocks event by event;
* :func:`evolve_pair_endpoint` draws the end state from its known marginals.

Replicate ``r`` of a run seeded with ``seed`` uses the stream
``SeedSequence(seed, spawn_key=(r,))``, so replicates can run in any order or
on any number of workers with identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numba as nb
import numpy as np

from .analytics import EvolutionParams, moments
from .errors import LexiclockError
from .estimation import SwadeshDataset, VarietyMeta
from .metrics import statistics_from_overlaps

__all__ = [
    "SimParams",
    "SimWord",
    "PairSample",
    "StatMoments",
    "SampleMoments",
    "STATISTICS",
    "replicate_rng",
    "evolve_pair_events",
    "evolve_pair_endpoint",
    "evolve_lineages",
    "replicate_statistics",
    "monte_carlo",
    "analytic_reference",
    "symbols_to_word",
    "simulate_dataset",
]

STATISTICS = ("omega", "phi", "varphi", "chi")


@dataclass(frozen=True)
class SimParams:
    lam: float
    mu: float
    n_sym: int
    l_word: int
    m: int
    t: float
    seed: int = 0

    def __post_init__(self):
        for name, low in (("n_sym", 2), ("l_word", 1), ("m", 1)):
            value = getattr(self, name)
            if int(value) != value or value < low:
                raise LexiclockError(f"{name} must be an integer >= {low}, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)) or self.lam < 0 or self.mu < 0:
            raise LexiclockError("rates must be finite and non-negative")
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise LexiclockError(f"t must be finite and >= 0, got {self.t!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise LexiclockError(f"seed must be a non-negative integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    def evolution_params(self) -> EvolutionParams:
        """Analytic counterpart with ``n_eff = n_sym`` and ``l_eff = l_word``."""
        return EvolutionParams(
            lam=self.lam, mu=self.mu, n_eff=float(self.n_sym), l_eff=float(self.l_word), m=self.m
        )


class SimWord(NamedTuple):
    symbols: tuple
    lineage_tag: int


@dataclass(frozen=True)
class PairSample:
    """End state of two daughter word lists.

    Row ``i`` of each symbol matrix is the word for concept ``i``. Lineage
    tag 0 marks an unreplaced word; every replacement gets a fresh tag.
    """

    symbols_a: np.ndarray
    symbols_b: np.ndarray
    tags_a: np.ndarray
    tags_b: np.ndarray
    cognacy: np.ndarray

    @property
    def list_a(self) -> list[SimWord]:
        return [SimWord(tuple(int(s) for s in w), int(g)) for w, g in zip(self.symbols_a, self.tags_a)]

    @property
    def list_b(self) -> list[SimWord]:
        return [SimWord(tuple(int(s) for s in w), int(g)) for w, g in zip(self.symbols_b, self.tags_b)]

    def overlaps(self) -> np.ndarray:
        """Per-concept Hamming overlap."""
        return (self.symbols_a == self.symbols_b).mean(axis=1)


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _rng_for(p: SimParams, rng):
    return np.random.default_rng(p.seed) if rng is None else rng


@nb.njit(cache=True)
def _evolve_words(words, tags, t, lam, mu, n_sym, rng, next_tag):
    """Run replacement and redraw clocks on every word for ``t`` years.

    Modifies ``words`` and ``tags`` in place and returns the next unused tag.
    """
    m, length = words.shape
    total = lam + length * mu
    if total <= 0.0:
        return next_tag
    p_replace = lam / total
    for i in range(m):
        clock = rng.exponential(1.0 / total)
        while clock <= t:
            if rng.random() < p_replace:
                for k in range(length):
                    words[i, k] = rng.integers(0, n_sym)
                tags[i] = next_tag
                next_tag += 1
            else:
                k = rng.integers(0, length)
                words[i, k] = rng.integers(0, n_sym)
            clock += rng.exponential(1.0 / total)
    return next_tag


def evolve_lineages(
    ancestor: np.ndarray,
    t: float,
    lam: float,
    mu: float,
    n_sym: int,
    rng: np.random.Generator,
    tags: np.ndarray | None = None,
    next_tag: int = 1,
):
    """Evolve a copy of ``ancestor`` for ``t`` years.

    Returns ``(words, tags, next_tag)``.
    """
    words = np.array(ancestor, dtype=np.int64, copy=True)
    tags = np.zeros(words.shape[0], dtype=np.int64) if tags is None else np.array(tags, dtype=np.int64)
    next_tag = _evolve_words(words, tags, float(t), float(lam), float(mu), int(n_sym), rng, int(next_tag))
    return words, tags, next_tag


def evolve_pair_events(p: SimParams, rng: np.random.Generator | None = None) -> PairSample:
    """Event-by-event simulation of two daughters of a uniform ancestor."""
    rng = _rng_for(p, rng)
    ancestor = rng.integers(0, p.n_sym, size=(p.m, p.l_word))
    a, tags_a, nxt = evolve_lineages(ancestor, p.t, p.lam, p.mu, p.n_sym, rng)
    b, tags_b, _ = evolve_lineages(ancestor, p.t, p.lam, p.mu, p.n_sym, rng, next_tag=nxt)
    return PairSample(a, b, tags_a, tags_b, tags_a == tags_b)


def evolve_pair_endpoint(p: SimParams, rng: np.random.Generator | None = None) -> PairSample:
    """Draw the end state directly from the cognacy and character-match laws.

    Cognacy is Bernoulli(exp(-2*lam*t)). A cognate character pair agrees with
    probability ((n-1)/n)*exp(-2*mu*t) + 1/n, in which case both sides carry
    the same uniform symbol; otherwise the second symbol is uniform over the
    remaining ``n-1``. Non-cognate words are independent uniform words.
    """
    rng = _rng_for(p, rng)
    m, length, n = p.m, p.l_word, p.n_sym
    cognate = rng.random(m) < math.exp(-2.0 * p.lam * p.t)
    p_match = (n - 1) / n * math.exp(-2.0 * p.mu * p.t) + 1.0 / n
    a = rng.integers(0, n, size=(m, length))
    match = rng.random((m, length)) < p_match
    shift = rng.integers(1, n, size=(m, length))
    b_cognate = np.where(match, a, (a + shift) % n)
    b_fresh = rng.integers(0, n, size=(m, length))
    b = np.where(cognate[:, None], b_cognate, b_fresh)
    tags_a = np.zeros(m, dtype=np.int64)
    tags_b = np.zeros(m, dtype=np.int64)
    fresh = np.flatnonzero(~cognate)
    # a non-cognate pair needs distinct tags; give side b fresh ones
    tags_b[fresh] = np.arange(1, fresh.size + 1)
    return PairSample(a, b, tags_a, tags_b, cognate)


@dataclass(frozen=True)
class StatMoments:
    mean: float
    var: float
    se: float
    n: int


@dataclass(frozen=True)
class SampleMoments:
    """Sample moments of the four statistics plus the variance-additivity gap.

    ``additivity_gap`` is Var[phi] - Var[varphi] - Var[chi] over the sample and
    ``additivity_se`` its standard error (the gap is twice the sample
    covariance of varphi and chi, whose expectation is zero).
    """

    params: SimParams
    replicates: int
    sampler: str
    stats: dict = field(default_factory=dict)
    additivity_gap: float = 0.0
    additivity_se: float = 0.0

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {
                "lambda": p.lam,
                "mu": p.mu,
                "n_sym": p.n_sym,
                "l_word": p.l_word,
                "m": p.m,
                "t": p.t,
                "seed": p.seed,
            },
            "replicates": self.replicates,
            "sampler": self.sampler,
            "stats": {
                k: {"mean": v.mean, "var": v.var, "se": v.se} for k, v in self.stats.items()
            },
            "additivity": {"gap": self.additivity_gap, "se": self.additivity_se},
        }


def replicate_statistics(sample: PairSample, n_eff: float) -> tuple[float, float, float, float]:
    """(omega, phi, varphi, chi) of one simulated pair."""
    s = statistics_from_overlaps(sample.overlaps(), sample.cognacy.astype(np.int64), n_eff)
    return s.omega, s.phi, s.varphi, s.chi


def _run_block(p: SimParams, sampler, start: int, stop: int, out: np.ndarray) -> None:
    n_eff = float(p.n_sym)
    for r in range(start, stop):
        out[r] = replicate_statistics(sampler(p, replicate_rng(p.seed, r)), n_eff)


def monte_carlo(
    p: SimParams, replicates: int, use_endpoint: bool = True, threads: int = 1
) -> SampleMoments:
    """Sample moments of omega, phi, varphi and chi over independent replicates.

    Per-replicate values land in a fixed slot of one array and are reduced in
    index order, so the result does not depend on ``threads``.
    """
    if int(replicates) != replicates or replicates < 2:
        raise LexiclockError(f"replicates must be an integer >= 2, got {replicates!r}")
    if threads < 1:
        raise LexiclockError("threads must be >= 1")
    replicates = int(replicates)
    sampler = evolve_pair_endpoint if use_endpoint else evolve_pair_events
    values = np.empty((replicates, 4), dtype=np.float64)
    if threads == 1:
        _run_block(p, sampler, 0, replicates, values)
    else:
        bounds = np.linspace(0, replicates, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_block, p, sampler, int(lo), int(hi), values)
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for f in futures:
                f.result()

    stats = {}
    for c, name in enumerate(STATISTICS):
        col = values[:, c]
        var = float(col.var(ddof=1))
        stats[name] = StatMoments(float(col.mean()), var, math.sqrt(var / replicates), replicates)
    gap = stats["phi"].var - stats["varphi"].var - stats["chi"].var
    centred = (values[:, 2] - values[:, 2].mean()) * (values[:, 3] - values[:, 3].mean())
    gap_se = 2.0 * float(centred.std(ddof=1)) * replicates / (replicates - 1) / math.sqrt(replicates)
    return SampleMoments(
        params=p,
        replicates=replicates,
        sampler="endpoint" if use_endpoint else "events",
        stats=stats,
        additivity_gap=gap,
        additivity_se=gap_se,
    )


def analytic_reference(p: SimParams) -> dict:
    """Closed-form mean and variance of each statistic for ``p``."""
    ep = p.evolution_params()
    return {name: moments(ep, p.t, name) for name in STATISTICS}


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def symbols_to_word(symbols) -> str:
    """Render symbols as letters (``n_sym <= 26``) or dot-joined integers."""
    symbols = [int(s) for s in symbols]
    if all(s < len(_LETTERS) for s in symbols):
        return "".join(_LETTERS[s] for s in symbols)
    return ".".join(str(s) for s in symbols)


def simulate_dataset(
    lam: float,
    mu: float,
    n_sym: int,
    l_word: int,
    m: int,
    t_root: float,
    clade_sizes: tuple[int, ...] = (20, 20),
    seed: int = 0,
    stem: float = 0.0,
) -> SwadeshDataset:
    """Synthetic Swadesh lists for varieties descending from one root.

    Each clade ancestor evolves for ``stem`` years from the root word list,
    then every variety of the clade evolves independently for the remaining
    ``t_root - stem`` years. Any two varieties of different clades are thus
    ``t_root`` years from their common ancestor. Varieties of clade ``k`` are
    scattered over a 2x2 degree box centred 10*k degrees east of the first,
    so that every pair has a positive distance.
    """
    if not 0 <= stem <= t_root:
        raise LexiclockError("stem must lie in [0, t_root]")
    if n_sym > len(_LETTERS):
        raise LexiclockError(f"n_sym must be <= {len(_LETTERS)} to render words as letters")
    SimParams(lam, mu, n_sym, l_word, m, t_root, seed)
    rng = np.random.default_rng(seed)
    root = rng.integers(0, n_sym, size=(m, l_word))
    varieties, words = [], []
    next_tag = 1
    for k, size in enumerate(clade_sizes):
        base, base_tags, next_tag = evolve_lineages(root, stem, lam, mu, n_sym, rng, next_tag=next_tag)
        for v in range(size):
            w, _, next_tag = evolve_lineages(
                base, t_root - stem, lam, mu, n_sym, rng, tags=base_tags, next_tag=next_tag
            )
            vid = f"c{k}v{v:02d}"
            varieties.append(
                VarietyMeta(
                    id=vid,
                    name=vid,
                    latitude=float(-20.0 + rng.uniform(-1.0, 1.0)),
                    longitude=float(40.0 + 10.0 * k + rng.uniform(-1.0, 1.0)),
                    clade=f"clade{k}",
                )
            )
            words.append([symbols_to_word(row) for row in w])
    concepts = [f"concept{i:03d}" for i in range(m)]
    return SwadeshDataset(varieties, concepts, words)
