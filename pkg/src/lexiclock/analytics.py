"""Closed-form moments, relative dating errors and dating estimators.

Three language-pair statistics are covered:

``omega``
    cognate overlap, the fraction of concepts whose two words are cognate.
``phi``
    blind rescaled word overlap averaged over all concepts.
``varphi``
    the same rescaled overlap restricted to cognate pairs (non-cognate terms
    set to zero).

``chi`` is the non-cognate residual, ``phi = varphi + chi``. A fourth dating
mode, ``ancestor``, treats the observed value as the surviving fraction of a
single lineage measured against its own ancestor.

All functions here are pure.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple

from .errors import BandCollapseError, ExtinctStatisticError, LexiclockError

__all__ = [
    "EvolutionParams",
    "MomentPair",
    "DatingResult",
    "CurveRow",
    "SIBLING_METHODS",
    "DATING_METHODS",
    "load_default_config",
    "moments_omega",
    "moments_phi",
    "moments_varphi",
    "moments_chi",
    "moments_ancestor",
    "moments",
    "char_match_prob_cognate",
    "decay_rate",
    "band_relative_error",
    "relative_error",
    "error_curves",
    "date_from_statistic",
    "mu_hat",
]

SIBLING_METHODS = ("omega", "phi", "varphi")
DATING_METHODS = SIBLING_METHODS + ("ancestor",)


def load_default_config() -> dict:
    """Packaged defaults: the Swadesh replacement rate and the fitted N, L, mu."""
    text = resources.files(__package__).joinpath("defaults.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class EvolutionParams:
    """Model constants.

    ``lam`` is the word replacement rate and ``mu`` the per-character redraw
    rate, both per year. ``n_eff`` and ``l_eff`` are the effective alphabet
    size and word length and may be non-integer. ``m`` is the number of
    concepts in a list.
    """

    lam: float
    mu: float
    n_eff: float
    l_eff: float
    m: int

    def __post_init__(self):
        for name in ("lam", "mu", "n_eff", "l_eff"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise LexiclockError(f"{name} must be finite, got {value!r}")
        if self.lam < 0 or self.mu < 0:
            raise LexiclockError("rates must be non-negative")
        if self.n_eff < 1:
            raise LexiclockError(f"n_eff must be >= 1, got {self.n_eff}")
        if self.l_eff < 1:
            raise LexiclockError(f"l_eff must be >= 1, got {self.l_eff}")
        if int(self.m) != self.m or self.m < 1:
            raise LexiclockError(f"m must be a positive integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def from_mapping(cls, cfg: dict) -> "EvolutionParams":
        """Build from a config mapping using the external key ``lambda``."""
        return cls(
            lam=float(cfg["lambda"]),
            mu=float(cfg["mu"]),
            n_eff=float(cfg["n_eff"]),
            l_eff=float(cfg["l_eff"]),
            m=cfg["m"],
        )

    @classmethod
    def default(cls, **overrides) -> "EvolutionParams":
        params = cls.from_mapping(load_default_config())
        return params.replace(**overrides) if overrides else params

    def replace(self, **changes) -> "EvolutionParams":
        return dataclasses.replace(self, **changes)

    def to_mapping(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "n_eff": self.n_eff,
            "l_eff": self.l_eff,
            "m": self.m,
        }

    @property
    def mu_hat(self) -> float:
        return mu_hat(self)


class MomentPair(NamedTuple):
    mean: float
    variance: float


@dataclass(frozen=True)
class DatingResult:
    """Point estimate of a separation time with its 95% band, in years.

    ``t_upper`` is ``math.inf`` when the lower edge of the band reaches zero.
    """

    t_hat: float
    t_lower: float
    t_upper: float
    method: str


class CurveRow(NamedTuple):
    t: float
    r_omega: float
    r_phi: float
    r_varphi: float


def _check_t(t: float) -> None:
    if not t >= 0:
        raise LexiclockError(f"time must be >= 0, got {t!r}")


def _needs_alphabet(params: EvolutionParams) -> None:
    if not params.n_eff > 1:
        raise LexiclockError(f"n_eff must be > 1 for overlap statistics, got {params.n_eff}")


def moments_omega(params: EvolutionParams, t: float) -> MomentPair:
    """Mean and variance of the cognate overlap at separation time ``t``."""
    _check_t(t)
    s = math.exp(-2.0 * params.lam * t)
    return MomentPair(s, s * (1.0 - s) / params.m)


def moments_ancestor(params: EvolutionParams, t: float) -> MomentPair:
    """Surviving fraction of one lineage after ``t`` years (binomial in ``m``)."""
    _check_t(t)
    s = math.exp(-params.lam * t)
    return MomentPair(s, s * (1.0 - s) / params.m)


def char_match_prob_cognate(params: EvolutionParams, t: float) -> float:
    """Probability that two cognate characters agree after ``t`` years."""
    _check_t(t)
    n = params.n_eff
    return (n - 1.0) / n * math.exp(-2.0 * params.mu * t) + 1.0 / n


def _phi_terms(params: EvolutionParams, t: float) -> tuple[float, float, float, float]:
    """(mean, replacement term, character term, non-cognate term) of Var[phi]."""
    _check_t(t)
    _needs_alphabet(params)
    m, el, n1 = params.m, params.l_eff, params.n_eff - 1.0
    a = math.exp(-2.0 * params.lam * t)
    b = math.exp(-2.0 * params.mu * t)
    mean = a * b
    replacement = a * (1.0 - a) * b * b / m
    character = a * (1.0 - b) * (b + 1.0 / n1) / (m * el)
    noncognate = (1.0 - a) / (m * el * n1)
    return mean, replacement, character, noncognate


def moments_phi(params: EvolutionParams, t: float) -> MomentPair:
    mean, v1, v2, v3 = _phi_terms(params, t)
    return MomentPair(mean, v1 + v2 + v3)


def moments_varphi(params: EvolutionParams, t: float) -> MomentPair:
    mean, v1, v2, _ = _phi_terms(params, t)
    return MomentPair(mean, v1 + v2)


def moments_chi(params: EvolutionParams, t: float) -> MomentPair:
    _, _, _, v3 = _phi_terms(params, t)
    return MomentPair(0.0, v3)


_MOMENTS = {
    "omega": moments_omega,
    "phi": moments_phi,
    "varphi": moments_varphi,
    "chi": moments_chi,
    "ancestor": moments_ancestor,
}


def moments(params: EvolutionParams, t: float, method: str) -> MomentPair:
    try:
        fn = _MOMENTS[method]
    except KeyError:
        raise LexiclockError(f"unknown method {method!r}") from None
    return fn(params, t)


def decay_rate(params: EvolutionParams, method: str) -> float:
    """Exponential decay rate of the mean of ``method``'s statistic."""
    if method == "omega":
        return 2.0 * params.lam
    if method in ("phi", "varphi"):
        return 2.0 * (params.lam + params.mu)
    if method == "ancestor":
        return params.lam
    raise LexiclockError(f"unknown method {method!r}")


def band_relative_error(mean: float, variance: float, rate: float, t: float) -> float:
    """Half-width of the 95% dating band over ``t``.

    ``rate`` is the decay rate of the mean (``2*kappa`` for sibling
    statistics). ln((E+2s)/(E-2s)) is evaluated as 2*atanh(2s/E).
    """
    if not t > 0:
        raise LexiclockError(f"relative error needs t > 0, got {t!r}")
    if not rate > 0:
        raise LexiclockError("relative error needs a positive decay rate")
    x = 2.0 * math.sqrt(variance) / mean if mean > 0 else math.inf
    if x >= 1.0:
        raise BandCollapseError(
            f"E - 2*sqrt(Var) <= 0 at t={t:g}: statistic is uninformative at this horizon"
        )
    return 2.0 * math.atanh(x) / (2.0 * rate * t)


def relative_error(params: EvolutionParams, t: float, method: str) -> float:
    """Relative error of the dated separation time for ``method`` at ``t``."""
    if method not in SIBLING_METHODS:
        raise LexiclockError(f"relative error defined for {SIBLING_METHODS}, got {method!r}")
    mean, var = moments(params, t, method)
    return band_relative_error(mean, var, decay_rate(params, method), t)


def _grid(t_min: float, t_max: float, step: float) -> list[float]:
    if not (0 < t_min <= t_max) or not step > 0:
        raise LexiclockError(f"invalid grid t_min={t_min}, t_max={t_max}, step={step}")
    count = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    return [t_min + k * step for k in range(count)]


def error_curves(
    params: EvolutionParams, t_min: float, t_max: float, step: float
) -> list[CurveRow]:
    """Relative errors of the three statistics on a regular time grid.

    Cells where the band collapses hold ``math.inf``.
    """
    rows = []
    for t in _grid(t_min, t_max, step):
        values = []
        for method in SIBLING_METHODS:
            try:
                values.append(relative_error(params, t, method))
            except BandCollapseError:
                values.append(math.inf)
        rows.append(CurveRow(t, *values))
    return rows


def date_from_statistic(value: float, params: EvolutionParams, method: str) -> DatingResult:
    """Invert an observed statistic into a separation time with a 95% band.

    The band is the plug-in one: moments are evaluated at the point estimate,
    whose mean equals ``value`` by construction, and the band edges
    ``value +/- 2*sqrt(Var)`` are mapped back through the mean's inverse.
    Edges above 1 clamp to ``t_lower = 0``; edges at or below 0 give
    ``t_upper = inf``.
    """
    if method not in DATING_METHODS:
        raise LexiclockError(f"unknown method {method!r}")
    if not math.isfinite(value) or value > 1.0:
        raise LexiclockError(f"statistic must lie in (0, 1], got {value!r}")
    if value <= 0.0:
        raise ExtinctStatisticError(
            f"{method} = {value!r}: statistic at extinction value, no common ancestor detectable"
        )
    rate = decay_rate(params, method)
    if not rate > 0:
        raise LexiclockError(f"{method} cannot be dated with zero rates")

    def invert(x: float) -> float:
        if x >= 1.0:
            return 0.0
        if x <= 0.0:
            return math.inf
        return -math.log(x) / rate

    t_hat = invert(value)
    _, var = moments(params, t_hat, method)
    half = 2.0 * math.sqrt(var)
    return DatingResult(
        t_hat=t_hat,
        t_lower=min(invert(value + half), t_hat),
        t_upper=max(invert(value - half), t_hat),
        method=method,
    )


def mu_hat(params: EvolutionParams) -> float:
    """Rate at which a character actually changes value."""
    if not params.n_eff > 0:
        raise LexiclockError("n_eff must be positive")
    return (params.n_eff - 1.0) / params.n_eff * params.mu
