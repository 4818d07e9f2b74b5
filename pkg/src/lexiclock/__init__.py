"""Stochastic model of lexicon evolution: word replacement plus character drift.

Submodules:

- ``analytics``: closed-form moments, relative errors, dating
- ``simulator``: exact simulation and Monte Carlo harness
- ``metrics``: word distances, cognate detection, pair statistics
- ``estimation``: effective N, L and rates from Swadesh-list datasets
- ``dataio``: file formats and configuration
- ``cli``: command-line entry point
"""

from .analytics import (
    DatingResult,
    EvolutionParams,
    MomentPair,
    char_match_prob_cognate,
    date_from_statistic,
    error_curves,
    moments_chi,
    moments_omega,
    moments_phi,
    moments_varphi,
    mu_hat,
    relative_error,
)
from .errors import (
    BandCollapseError,
    DatasetError,
    ExtinctStatisticError,
    InsufficientPairsError,
    LexiclockError,
    SaturationError,
)

__version__ = "0.1.0"
