"""Hamiltonians for the three rungs of the approximation ladder.

1. Raman model: three levels per qubit (``|v>, |e>, |e~>``) plus a truncated
   cavity mode. A laser at ``omega_Ltilde`` drives ``|v> <-> |e~>`` and the
   cavity at ``omega_C`` couples ``|e~> <-> |e>``.
2. Effective Jaynes-Cummings model: ``|e~>`` eliminated, leaving a two-photon
   coupling ``Omega_eff (|e><v| a^dagger + h.c.)``.
3. XY exchange: the cavity eliminated as well, leaving
   ``g_eff (sigma_j^+ sigma_k^- + h.c.)``.

Frame
-----
All rungs share one rotating frame, generated per qubit by

    G_q = E_v |v><v| + (E_v + omega_Ltilde) |e~><e~| + (E_v + omega_Ltilde - omega_C) |e><e|

plus ``omega_C a^dagger a`` for the cavity. In this frame the Hamiltonian is
time independent:

    H = sum_q [ delta1 |e~><e~| + (delta1 - delta2) |e><e|
                + Omega_Ltilde (|e~><v| + h.c.) + Omega_C (|e~><e| a + h.c.) ]

with ``delta1 = E_e~ - E_v - omega_Ltilde`` and
``delta2 = E_e~ - E_e - omega_C``. ``|v>`` with an empty cavity sits at zero
energy in every rung and ``|e>`` carries ``-delta_tilde`` where
``delta_tilde = delta2 - delta1``.

Couplings enter as ``Omega (|a><b| + h.c.)`` without a factor 1/2, so a
resonant pi pulse lasts ``pi hbar / (2 Omega)`` and a detuned two-level Rabi
oscillation has angular frequency ``sqrt(detuning^2 + 4 Omega^2) / hbar``.

The conserved excitation number is
``N = sum_q (|v><v| + |e~><e~|)_q + a^dagger a``: the Raman process
``|v, n> -> |e~, n> -> |e, n+1>`` trades a qubit excitation for a photon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import curve_fit

from dotqubit.errors import RegimeError, ValidationError
from dotqubit.numerics import HBAR_MEV_NS, TimeGrid, embed, evolve_states, product_ket

MAX_DIM = 64
DEFAULT_CAVITY_DIM = 3
LEVEL_LABELS = "vet"  # |v>, |e>, |e~>

V, E, ET = 0, 1, 2


def ket_bra(i: int, j: int, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def annihilation(cavity_dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cavity_dim)), k=1).astype(complex)


@dataclass(frozen=True)
class LevelScheme:
    """Working levels of one qubit and the fields addressing it (all meV)."""

    e_v: float
    e_e: float
    e_etilde: float
    omega_L: float
    omega_Ltilde: float
    omega_C: float
    rabi_L: float
    rabi_Ltilde: float
    rabi_C: float

    def __post_init__(self):
        if not self.e_v < self.e_e < self.e_etilde:
            raise ValidationError(
                f"LevelScheme: require e_v < e_e < e_etilde, got {self.e_v}, {self.e_e}, {self.e_etilde}")
        for name in ("rabi_L", "rabi_Ltilde", "rabi_C"):
            if getattr(self, name) < 0:
                raise ValidationError(f"LevelScheme.{name} must be >= 0")

    @classmethod
    def from_detunings(cls, delta1, delta2, rabi_Ltilde, rabi_C, rabi_L=0.0,
                       e_v=0.0, e_e=1.0, e_etilde=11.0):
        """Build a scheme whose laser and cavity frequencies realise ``delta1``, ``delta2``."""
        return cls(e_v=e_v, e_e=e_e, e_etilde=e_etilde, omega_L=e_e - e_v,
                   omega_Ltilde=e_etilde - e_v - delta1, omega_C=e_etilde - e_e - delta2,
                   rabi_L=rabi_L, rabi_Ltilde=rabi_Ltilde, rabi_C=rabi_C)

    @property
    def delta1(self) -> float:
        return self.e_etilde - self.e_v - self.omega_Ltilde

    @property
    def delta2(self) -> float:
        return self.e_etilde - self.e_e - self.omega_C

    @property
    def delta_tilde(self) -> float:
        return self.delta2 - self.delta1

    def check_regime(self, min_ratio: float = 5.0):
        """Reject couplings that are not small against both one-photon detunings."""
        coupling = max(self.rabi_Ltilde, self.rabi_C)
        if coupling == 0:
            return
        detuning = min(abs(self.delta1), abs(self.delta2))
        if detuning < min_ratio * coupling:
            raise RegimeError(
                f"detuning/coupling ratio {detuning / coupling:.3g} below {min_ratio:g}: "
                f"min(|delta1|, |delta2|) = {detuning:g} meV, max coupling = {coupling:g} meV")


@dataclass(frozen=True)
class SystemLayout:
    n_qubits: int
    levels_per_qubit: int
    cavity_dim: int = 0

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise ValidationError("SystemLayout.n_qubits must be 1 or 2")
        if self.levels_per_qubit not in (2, 3):
            raise ValidationError("SystemLayout.levels_per_qubit must be 2 or 3")
        if self.cavity_dim < 0 or self.cavity_dim == 1:
            raise ValidationError("SystemLayout.cavity_dim must be 0 (eliminated) or >= 2")
        if self.dimension > MAX_DIM:
            raise ValidationError(f"SystemLayout: total dimension {self.dimension} exceeds {MAX_DIM}")

    @property
    def dims(self) -> tuple:
        dims = (self.levels_per_qubit,) * self.n_qubits
        return dims + ((self.cavity_dim,) if self.cavity_dim else ())

    @property
    def dimension(self) -> int:
        return self.levels_per_qubit ** self.n_qubits * max(self.cavity_dim, 1)

    def labels(self) -> list:
        """Basis labels such as ``"ev0"`` (qubit letters, then photon number)."""
        out = []
        for idx in product(*[range(d) for d in self.dims]):
            qubits = "".join(LEVEL_LABELS[i] for i in idx[:self.n_qubits])
            out.append(qubits + (str(idx[-1]) if self.cavity_dim else ""))
        return out

    def ket(self, label: str) -> np.ndarray:
        try:
            return np.eye(self.dimension, dtype=complex)[self.labels().index(label)]
        except ValueError:
            raise ValidationError(f"unknown basis label {label!r} for layout {self.dims}") from None

    def qubit_op(self, op, qubit: int) -> np.ndarray:
        return embed(op, qubit, self.dims)

    def cavity_op(self, op) -> np.ndarray:
        if not self.cavity_dim:
            raise ValidationError("layout has no cavity")
        return embed(op, self.n_qubits, self.dims)


def excitation_number(layout: SystemLayout) -> np.ndarray:
    """Conserved quantity ``sum_q (|v><v| + |e~><e~|)_q + a^dagger a``."""
    n = np.zeros((layout.dimension,) * 2, dtype=complex)
    lv = layout.levels_per_qubit
    local = ket_bra(V, V, lv) + (ket_bra(ET, ET, lv) if lv == 3 else 0)
    for q in range(layout.n_qubits):
        n += layout.qubit_op(local, q)
    if layout.cavity_dim:
        a = annihilation(layout.cavity_dim)
        n += layout.cavity_op(a.conj().T @ a)
    return n


def build_drive(rabi_L: float) -> np.ndarray:
    """Resonant single-qubit drive ``Omega_L (|e><v| + |v><e|)`` in basis (v, e)."""
    if rabi_L <= 0:
        raise ValidationError(f"rabi_L must be > 0, got {rabi_L}")
    return rabi_L * np.array([[0, 1], [1, 0]], dtype=complex)


def _schemes(scheme_j, scheme_k):
    return [scheme_j] if scheme_k is None else [scheme_j, scheme_k]


def build_raman(scheme_j: LevelScheme, scheme_k: LevelScheme | None = None,
                cavity_dim: int = DEFAULT_CAVITY_DIM) -> np.ndarray:
    """Rotating-frame Raman Hamiltonian on ``3 (x) [3 (x)] cavity``.

    Pass ``scheme_k=None`` for a single qubit.
    """
    if cavity_dim < 2:
        raise ValidationError(f"cavity_dim must be >= 2, got {cavity_dim}")
    schemes = _schemes(scheme_j, scheme_k)
    layout = SystemLayout(len(schemes), 3, cavity_dim)
    a = layout.cavity_op(annihilation(cavity_dim))
    h = np.zeros((layout.dimension,) * 2, dtype=complex)
    for q, s in enumerate(schemes):
        local = (s.delta1 * ket_bra(ET, ET, 3) + (s.delta1 - s.delta2) * ket_bra(E, E, 3)
                 + s.rabi_Ltilde * (ket_bra(ET, V, 3) + ket_bra(V, ET, 3)))
        h += layout.qubit_op(local, q)
        up = layout.qubit_op(ket_bra(ET, E, 3), q) @ a
        h += s.rabi_C * (up + up.conj().T)
    return h


def effective_coupling(scheme: LevelScheme) -> float:
    """Two-photon coupling ``(Omega_Ltilde Omega_C / 2)(1/delta1 + 1/delta2)`` in meV."""
    d1, d2 = scheme.delta1, scheme.delta2
    if d1 == 0 or d2 == 0:
        raise RegimeError(f"one-photon detunings must be non-zero (delta1={d1}, delta2={d2})")
    return 0.5 * scheme.rabi_Ltilde * scheme.rabi_C * (1.0 / d1 + 1.0 / d2)


def jc_hamiltonian(omega_effs, delta_tildes, cavity_dim: int = DEFAULT_CAVITY_DIM) -> np.ndarray:
    """Effective JC Hamiltonian from raw couplings and two-photon detunings (meV)."""
    if cavity_dim < 2:
        raise ValidationError(f"cavity_dim must be >= 2, got {cavity_dim}")
    if len(omega_effs) != len(delta_tildes):
        raise ValidationError("need one two-photon detuning per coupling")
    layout = SystemLayout(len(omega_effs), 2, cavity_dim)
    a_dag = layout.cavity_op(annihilation(cavity_dim).conj().T)
    h = np.zeros((layout.dimension,) * 2, dtype=complex)
    for q, (om, dt) in enumerate(zip(omega_effs, delta_tildes)):
        h -= dt * layout.qubit_op(ket_bra(E, V, 2) @ ket_bra(V, E, 2), q)
        raise_ = layout.qubit_op(ket_bra(E, V, 2), q) @ a_dag
        h += om * (raise_ + raise_.conj().T)
    return h


def build_effective_jc(scheme: LevelScheme, cavity_dim: int = DEFAULT_CAVITY_DIM,
                       scheme_k: LevelScheme | None = None) -> np.ndarray:
    """Effective JC Hamiltonian for one qubit (or two sharing the cavity)."""
    schemes = _schemes(scheme, scheme_k)
    return jc_hamiltonian([effective_coupling(s) for s in schemes],
                          [s.delta_tilde for s in schemes], cavity_dim)


def exchange_coupling(scheme_j: LevelScheme, scheme_k: LevelScheme, tol: float = 1e-9) -> float:
    """``g_eff = Omega_eff_j Omega_eff_k / delta_tilde`` under two-photon resonance."""
    dj, dk = scheme_j.delta_tilde, scheme_k.delta_tilde
    if abs(dj - dk) > tol:
        raise RegimeError(f"two-photon detunings differ: {dj:g} vs {dk:g} meV")
    if dj == 0:
        raise RegimeError("two-photon detuning delta_tilde = delta2 - delta1 must be non-zero")
    return effective_coupling(scheme_j) * effective_coupling(scheme_k) / dj


def xy_hamiltonian(g_eff: float) -> np.ndarray:
    """``g_eff (sigma_j^+ sigma_k^- + h.c.)`` in basis (vv, ve, ev, ee)."""
    h = np.zeros((4, 4), dtype=complex)
    h[1, 2] = h[2, 1] = g_eff
    return h


def build_xy(scheme_j: LevelScheme, scheme_k: LevelScheme) -> np.ndarray:
    return xy_hamiltonian(exchange_coupling(scheme_j, scheme_k))


@dataclass
class ErrorReport:
    """Outcome of evolving two rungs side by side."""

    max_discrepancy: float
    max_leakage: float
    duration_ns: float
    n_points: int
    truncation_delta: float = 0.0
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"max_discrepancy": self.max_discrepancy, "max_leakage": self.max_leakage,
               "duration_ns": self.duration_ns, "n_points": self.n_points,
               "truncation_delta": self.truncation_delta}
        out.update(self.extras)
        return out


def populations(states) -> np.ndarray:
    return np.abs(np.asarray(states)) ** 2


def _default_grid(period, fallback_energy, n_steps):
    if period is None or not math.isfinite(period):
        period = 100.0 * HBAR_MEV_NS / fallback_energy
    return TimeGrid(0.0, period, n_steps)


def rabi_period(omega_eff: float) -> float:
    """Population period ``pi hbar / |Omega|`` of a resonant coupling (ns)."""
    return math.pi * HBAR_MEV_NS / abs(omega_eff) if omega_eff else math.inf


def _raman_vs_jc_run(scheme, cavity_dim, grid):
    layout_r = SystemLayout(1, 3, cavity_dim)
    layout_j = SystemLayout(1, 2, cavity_dim)
    psi_r = evolve_states(build_raman(scheme, None, cavity_dim), layout_r.ket("v0"), grid.times)
    psi_j = evolve_states(build_effective_jc(scheme, cavity_dim), layout_j.ket("v0"), grid.times)
    p_r = populations(psi_r).reshape(len(grid.times), 3, cavity_dim)
    p_j = populations(psi_j).reshape(len(grid.times), 2, cavity_dim)
    discrepancy = np.abs(p_r[:, :2, :] - p_j)
    leakage = p_r[:, ET, :].sum(axis=1)
    return discrepancy, leakage, p_r


def compare_raman_vs_jc(scheme: LevelScheme, cavity_dim: int = DEFAULT_CAVITY_DIM,
                        grid: TimeGrid | None = None, n_steps: int = 400) -> ErrorReport:
    """Check elimination of ``|e~>`` for one qubit starting in ``|v, 0 photons>``.

    Both models are evolved exactly over ``grid`` (default: one effective Rabi
    period ``pi hbar / Omega_eff``). The report gives the largest population
    difference over all shared basis states and the largest ``|e~>``
    population of the Raman model.
    """
    scheme.check_regime()
    omega_eff = effective_coupling(scheme)
    if grid is None:
        grid = _default_grid(rabi_period(omega_eff), min(abs(scheme.delta1), abs(scheme.delta2)), n_steps)
    disc, leak, p_r = _raman_vs_jc_run(scheme, cavity_dim, grid)
    p_big = p_r
    if 3 * (cavity_dim + 1) <= MAX_DIM:
        p_big = _raman_vs_jc_run(scheme, cavity_dim + 1, grid)[2]
    trunc = float(np.max(np.abs(p_big[:, :, :cavity_dim] - p_r)))
    return ErrorReport(
        max_discrepancy=float(disc.max()), max_leakage=float(leak.max()),
        duration_ns=grid.t_end - grid.t_start, n_points=len(grid.times), truncation_delta=trunc,
        extras={"omega_eff_meV": omega_eff, "leakage_bound": 4 * (scheme.rabi_Ltilde / scheme.delta1) ** 2})


def _sin2(t, amplitude, period):
    return amplitude * np.sin(np.pi * t / period) ** 2


def fit_swap_period(times, p_target, guess: float) -> float:
    """Fit ``A sin^2(pi t / T)`` to a transfer curve and return ``T``."""
    (_, period), _ = curve_fit(_sin2, times, p_target, p0=(1.0, guess))
    return float(abs(period))


def compare_jc_vs_xy(scheme_j: LevelScheme, scheme_k: LevelScheme,
                     cavity_dim: int = DEFAULT_CAVITY_DIM, grid: TimeGrid | None = None,
                     n_steps: int = 2000, min_ratio: float = 3.0) -> ErrorReport:
    """Check elimination of the cavity for two qubits starting in ``|ev, 0 photons>``.

    Over one exchange period ``pi hbar / g_eff`` the report gives the largest
    qubit-population difference on ``{|ve>, |ev>}``, the largest real-photon
    population, and the swap period fitted to the cavity model next to the
    predicted one.
    """
    for s in (scheme_j, scheme_k):
        s.check_regime()
    om_j, om_k = effective_coupling(scheme_j), effective_coupling(scheme_k)
    g_eff = exchange_coupling(scheme_j, scheme_k)
    delta_tilde = scheme_j.delta_tilde
    om_max = max(abs(om_j), abs(om_k))
    if om_max and abs(delta_tilde) < min_ratio * om_max:
        raise RegimeError(
            f"|delta_tilde| = {abs(delta_tilde):g} meV is below {min_ratio:g} x Omega_eff = "
            f"{min_ratio * om_max:g} meV; cavity elimination not validated")
    period = rabi_period(g_eff)
    if grid is None:
        grid = _default_grid(period, abs(delta_tilde), n_steps)
    t = grid.times

    def run(dim):
        layout = SystemLayout(2, 2, dim)
        h = jc_hamiltonian([om_j, om_k], [scheme_j.delta_tilde, scheme_k.delta_tilde], dim)
        p = populations(evolve_states(h, layout.ket("ev0"), t)).reshape(len(t), 4, dim)
        return p.sum(axis=2), p[:, :, 1:].sum(axis=(1, 2))

    p_jc, photons = run(cavity_dim)
    p_jc_big, _ = run(cavity_dim + 1) if 4 * (cavity_dim + 1) <= MAX_DIM else (p_jc, None)
    p_xy = populations(evolve_states(xy_hamiltonian(g_eff), product_ket((1, 0), (2, 2)), t))
    disc = np.abs(p_jc[:, 1:3] - p_xy[:, 1:3])
    extras = {"omega_eff_j_meV": om_j, "omega_eff_k_meV": om_k, "delta_tilde_meV": delta_tilde,
              "g_eff_meV": g_eff, "predicted_period_ns": period,
              "photon_bound": 4 * (om_max / delta_tilde) ** 2 if delta_tilde else 0.0}
    if g_eff and math.isfinite(period):
        fitted = fit_swap_period(t, p_jc[:, 1], period)
        extras.update(fitted_period_ns=fitted, period_rel_error=abs(fitted - period) / period,
                      g_eff_fitted_meV=math.pi * HBAR_MEV_NS / fitted)
    return ErrorReport(
        max_discrepancy=float(disc.max()), max_leakage=float(photons.max()),
        duration_ns=grid.t_end - grid.t_start, n_points=len(t),
        truncation_delta=float(np.max(np.abs(p_jc_big - p_jc))), extras=extras)


def evolve_model(model: str, scheme_j: LevelScheme, scheme_k: LevelScheme | None,
                 initial: str, grid: TimeGrid, cavity_dim: int = DEFAULT_CAVITY_DIM):
    """Populations of every basis state over ``grid`` for one rung.

    Returns ``(labels, populations, leakage)``. Leakage is the ``|e~>``
    population for the Raman model, the real-photon population for the
    two-qubit JC model, the top-Fock-level population for the one-qubit JC
    model (truncation monitor), and zero for the XY model.
    """
    n_qubits = 1 if scheme_k is None else 2
    if model == "raman":
        layout = SystemLayout(n_qubits, 3, cavity_dim)
        h = build_raman(scheme_j, scheme_k, cavity_dim)
    elif model == "jc":
        layout = SystemLayout(n_qubits, 2, cavity_dim)
        h = build_effective_jc(scheme_j, cavity_dim, scheme_k)
    elif model == "xy":
        if scheme_k is None:
            raise ValidationError("the xy model needs two qubits")
        layout = SystemLayout(2, 2, 0)
        h = build_xy(scheme_j, scheme_k)
    else:
        raise ValidationError(f"unknown model {model!r}; expected raman, jc or xy")
    pops = populations(evolve_states(h, layout.ket(initial), grid.times))
    labels = layout.labels()
    if model == "raman":
        mask = np.array(["t" in lab[:n_qubits] for lab in labels])
    elif model == "jc" and n_qubits == 2:
        mask = np.array([lab[-1] != "0" for lab in labels])
    elif model == "jc":
        mask = np.array([lab[-1] == str(cavity_dim - 1) for lab in labels])
    else:
        mask = np.zeros(len(labels), dtype=bool)
    return labels, pops, pops[:, mask].sum(axis=1)
