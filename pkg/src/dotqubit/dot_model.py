"""Level mixing of a tunnel-coupled dot pair and the resulting scaling rules.

Two dot orbitals ``|d>`` (energy ``e_d``) and ``|d~>`` (``e_dtilde``) coupled
by ``t`` hybridise into the qubit level ``|e>`` (lower) and the intermediate
level ``|e~>`` (upper). The weight ``gamma`` of ``|e>`` on the far dot sets how
strongly spontaneous emission (factor ``gamma``) and optical couplings (factor
``sqrt(gamma)``) are suppressed.

The same operation applies to a pair of valence (hole) levels; the default
pipeline treats ``|v>`` as a single unmixed level because no hole parameters
are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dotqubit.errors import ValidationError

#: ``t / delta`` above which the weak-coupling formulas are flagged.
WEAK_COUPLING_LIMIT = 0.3


@dataclass(frozen=True)
class DotPairParams:
    """Bare dot energies (meV) and tunnel coupling ``t`` (meV)."""

    e_d: float
    e_dtilde: float
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise ValidationError(f"DotPairParams.t: tunnel coupling must be >= 0, got {self.t}")
        if self.delta < 0:
            raise ValidationError(
                f"DotPairParams.e_dtilde: upper dot level must not lie below e_d (delta={self.delta})")

    @property
    def delta(self) -> float:
        return self.e_dtilde - self.e_d

    @property
    def out_of_regime(self) -> bool:
        """True when the weak-coupling assumption ``t/delta <= 0.3`` fails."""
        if self.delta == 0:
            return True
        return self.t / self.delta > WEAK_COUPLING_LIMIT

    def hamiltonian(self) -> np.ndarray:
        return np.array([[self.e_d, self.t], [self.t, self.e_dtilde]], dtype=complex)


@dataclass(frozen=True)
class MixedPair:
    """Eigen-energies and mixing of the coupled pair.

    ``gamma_paper`` is the weak-coupling formula ``t^2/(delta^2 + t^2)``;
    ``gamma_exact`` is the exact far-dot weight of the lower eigenstate. The
    amplitudes are magnitudes built from ``gamma_exact``.
    """

    e_minus: float
    e_plus: float
    gamma_paper: float
    gamma_exact: float
    amp_e_on_d: float
    amp_e_on_dtilde: float
    out_of_regime: bool = False


@dataclass(frozen=True)
class ScalingReport:
    emission_factor: float
    coupling_factor: float
    gate_ratio_gain: float


def mixing_factor(t: float, delta: float) -> float:
    """Weak-coupling mixing factor ``t^2 / (delta^2 + t^2)``."""
    if t == 0:
        return 0.0
    return t * t / (delta * delta + t * t)


def diagonalize_pair(p: DotPairParams) -> MixedPair:
    delta, t = p.delta, p.t
    root = math.hypot(delta, 2.0 * t)
    mean = 0.5 * (p.e_d + p.e_dtilde)
    if t == 0.0:
        gamma_exact = 0.0
    else:
        # 2t^2 / (root (root + delta)) == (1 - delta/root)/2 without cancellation
        gamma_exact = 2.0 * t * t / (root * (root + delta))
    return MixedPair(
        e_minus=mean - 0.5 * root,
        e_plus=mean + 0.5 * root,
        gamma_paper=mixing_factor(t, delta),
        gamma_exact=gamma_exact,
        amp_e_on_d=math.sqrt(1.0 - gamma_exact),
        amp_e_on_dtilde=math.sqrt(gamma_exact),
        out_of_regime=p.out_of_regime,
    )


def scaling_factors(gamma: float) -> ScalingReport:
    """Suppression factors relative to a single dot for mixing factor ``gamma``."""
    if not 0 < gamma <= 1:
        raise ValidationError(f"gamma must lie in (0, 1], got {gamma}")
    root = math.sqrt(gamma)
    return ScalingReport(emission_factor=gamma, coupling_factor=root, gate_ratio_gain=1.0 / root)
