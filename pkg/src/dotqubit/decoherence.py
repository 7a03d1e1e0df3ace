"""Spontaneous emission of ``|e>`` and its cost in gate fidelity.

Rates are per ns, lifetimes in seconds. Only the ``sigma^- = |v><e|`` channel
is modelled by default; a ``|v><e~|`` channel can be switched on for Raman
runs to probe the intermediate level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm

from dotqubit.errors import ValidationError
from dotqubit.model import SystemLayout, build_drive, ket_bra
from dotqubit.numerics import HBAR_MEV_NS, TimeGrid, dagger, density, integrate_lindblad, propagator
from dotqubit.units import frequency_for_convention, per_second_to_per_ns

_LEVEL_INDEX = {"e": 1, "etilde": 2}


@dataclass(frozen=True)
class DecayChannel:
    """Decay of ``level`` (``"e"`` or ``"etilde"``) on qubit ``qubit`` (0 = j, 1 = k) into ``|v>``."""

    qubit: int
    rate: float
    level: str = "e"

    def __post_init__(self):
        if self.rate < 0:
            raise ValidationError(f"DecayChannel.rate must be >= 0, got {self.rate}")
        if self.level not in _LEVEL_INDEX:
            raise ValidationError(f"DecayChannel.level must be 'e' or 'etilde', got {self.level!r}")

    def operator(self, layout: SystemLayout) -> np.ndarray:
        if self.qubit >= layout.n_qubits:
            raise ValidationError(f"qubit {self.qubit} not present in a {layout.n_qubits}-qubit layout")
        src = _LEVEL_INDEX[self.level]
        if src >= layout.levels_per_qubit:
            raise ValidationError(f"level {self.level!r} absent from a {layout.levels_per_qubit}-level qubit")
        return layout.qubit_op(ket_bra(0, src, layout.levels_per_qubit), self.qubit)


def emission_rate(gamma: float, tau_d_intra: float) -> float:
    """Emission rate (1/ns) of the coupled-dot qubit: ``gamma / tau_d_intra``."""
    if not 0 < gamma <= 1:
        raise ValidationError(f"gamma must lie in (0, 1], got {gamma}")
    if tau_d_intra <= 0:
        raise ValidationError(f"tau_d_intra must be > 0 s, got {tau_d_intra}")
    return per_second_to_per_ns(gamma / tau_d_intra)


def decoherence_time(gamma: float, tau_d_intra: float) -> float:
    """Qubit lifetime ``tau_d_intra / gamma`` in seconds."""
    emission_rate(gamma, tau_d_intra)
    return tau_d_intra / gamma


def rotation_time(rabi_hz: float, convention: str = "plain-frequency") -> float:
    """Characteristic gate time ``pi / rate`` (s) for a coupling given in Hz."""
    if rabi_hz <= 0:
        raise ValidationError(f"coupling frequency must be > 0, got {rabi_hz}")
    return math.pi / frequency_for_convention(rabi_hz, convention)


def gate_ratio(tau_d: float, tau_g: float) -> float:
    """Number of gates per decoherence time, ``tau_d / tau_g``."""
    if tau_d <= 0 or tau_g <= 0:
        raise ValidationError(f"gate_ratio needs positive times, got tau_d={tau_d}, tau_g={tau_g}")
    return tau_d / tau_g


def one_bit_gate_ratio(gamma: float, tau_d_intra: float, rabi_Ltilde_hz: float,
                       convention: str = "plain-frequency") -> float:
    """Gate ratio of single-qubit rotations when ``Omega_L = sqrt(gamma) Omega_Ltilde``."""
    tau_g = rotation_time(math.sqrt(gamma) * rabi_Ltilde_hz, convention)
    return gate_ratio(decoherence_time(gamma, tau_d_intra), tau_g)


def state_fidelity(rho, target) -> float:
    """Fidelity of ``rho`` with ``target`` (a ket or a density matrix)."""
    rho = np.asarray(rho, dtype=complex)
    target = np.asarray(target, dtype=complex)
    if target.ndim == 1:
        return float(np.real(target.conj() @ rho @ target))
    vals = np.linalg.eigvalsh(target)
    if np.sum(vals > 1e-12) == 1:
        psi = np.linalg.eigh(target)[1][:, -1]
        return float(np.real(psi.conj() @ rho @ psi))
    root = sqrtm(target)
    return float(np.real(np.trace(sqrtm(root @ rho @ root))) ** 2)


@dataclass
class DecayResult:
    rho_final: np.ndarray
    fidelity: float


def gate_under_decay(h, channels, duration: float, rho0, layout: SystemLayout | None = None,
                     n_steps: int = 1000, substeps: int = 1) -> DecayResult:
    """Run a gate with emission switched on and compare to the closed-system result.

    ``channels`` are :class:`DecayChannel` objects (embedded with ``layout``,
    which defaults to one two-level qubit) or raw ``(operator, rate)`` pairs.
    """
    h = np.asarray(h, dtype=complex)
    if layout is None and h.shape == (2, 2):
        layout = SystemLayout(1, 2, 0)
    collapse = []
    for ch in channels:
        if isinstance(ch, DecayChannel):
            if layout is None:
                raise ValidationError("a SystemLayout is needed to embed DecayChannel operators")
            collapse.append((ch.operator(layout), ch.rate))
        else:
            collapse.append(ch)
    rho0 = np.asarray(rho0, dtype=complex)
    traj = integrate_lindblad(h, collapse, rho0, TimeGrid(0.0, duration, n_steps), substeps=substeps)
    u = propagator(h, duration)
    ideal = u @ rho0 @ dagger(u)
    return DecayResult(rho_final=traj[-1], fidelity=state_fidelity(traj[-1], ideal))


def fidelity_sweep(rabi_L: float, rates, n_steps: int = 2000):
    """Fidelity of a resonant pi pulse from ``|v>`` for each decay rate (1/ns).

    Returns the pulse duration (ns) and ``(rate, fidelity)`` pairs.
    """
    h = build_drive(rabi_L)
    duration = math.pi * HBAR_MEV_NS / (2.0 * rabi_L)
    rho0 = density([1.0, 0.0])
    rows = []
    for rate in rates:
        res = gate_under_decay(h, [DecayChannel(0, rate)], duration, rho0, n_steps=n_steps)
        rows.append((rate, res.fidelity))
    return duration, rows
