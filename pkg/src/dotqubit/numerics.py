"""Dense complex linear algebra and time-evolution engines.

Operators are plain ``numpy`` complex arrays. Energies are in meV, times in
ns, and evolution uses ``exp(-i H t / hbar)`` with
:data:`dotqubit.units.HBAR_MEV_NS`.

Basis conventions used across the package: single-qubit levels are ordered
``|v> = 0, |e> = 1, |e~> = 2``; composite spaces are ordered
``qubit_j (x) qubit_k (x) cavity`` with cavity Fock states ``0..n_max``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from dotqubit.errors import IntegrationError, NonHermitianError, ValidationError
from dotqubit.units import HBAR_MEV_NS

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
DENSITY_TOL = 1e-10

_TWO_PI_LD = 2 * np.pi * np.longdouble(1)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid in ns with ``n_steps`` intervals (``n_steps + 1`` points)."""

    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValidationError(
                f"TimeGrid: t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValidationError(f"TimeGrid: n_steps must be an integer >= 1, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_steps + 1)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - dagger(h)))) if h.size else 0.0


def is_hermitian(h, tol: float = HERMITIAN_TOL) -> bool:
    h = as_matrix(h)
    return h.shape[0] == h.shape[1] and hermiticity_error(h) <= tol


def unitarity_error(u) -> float:
    u = as_matrix(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[1]))))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_matrix(u)
    return u.shape[0] == u.shape[1] and unitarity_error(u) < tol


def require_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise NonHermitianError(f"Hamiltonian must be square, got shape {h.shape}")
    err = hermiticity_error(h)
    if err > tol:
        raise NonHermitianError(f"matrix is not Hermitian: max|H - H^dagger| = {err:.3e} > {tol:.0e}")
    return h


def kron(*factors) -> np.ndarray:
    """Kronecker product; the first factor is the slowest-varying index."""
    if not factors:
        raise ValidationError("kron needs at least one factor")
    return reduce(np.kron, (as_matrix(f) for f in factors))


def embed(op, site: int, dims) -> np.ndarray:
    """Lift ``op`` acting on subsystem ``site`` into the full product space."""
    return kron(*[op if i == site else np.eye(d) for i, d in enumerate(dims)])


def basis_ket(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def product_ket(indices, dims) -> np.ndarray:
    flat = int(np.ravel_multi_index(tuple(indices), tuple(dims)))
    return basis_ket(flat, int(np.prod(dims)))


def density(psi) -> np.ndarray:
    """Pure-state density matrix ``|psi><psi|`` (``psi`` is normalised first)."""
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def validate_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positive semidefiniteness."""
    rho = as_matrix(rho)
    if hermiticity_error(rho) > tol:
        raise ValidationError(f"density matrix not Hermitian (max dev {hermiticity_error(rho):.2e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < -tol:
        raise ValidationError(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return rho


def hermitian_eig(h):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Unitary matrix whose columns are the eigenvectors.

    Raises
    ------
    NonHermitianError
        If ``max|H - H^dagger|`` exceeds 1e-12; the message carries that norm.
    """
    h = require_hermitian(h)
    # symmetrise so eigh never sees round-off asymmetry
    vals, vecs = np.linalg.eigh(0.5 * (h + dagger(h)))
    return vals, vecs


def _phase_factors(eigenvalues, duration):
    # Long horizons reach ~1e10 rad; form and reduce the phase in extended
    # precision so propagator(t1 + t2) matches the composed product.
    phase = np.asarray(eigenvalues, dtype=np.longdouble) * np.longdouble(duration)
    phase = np.fmod(phase / np.longdouble(HBAR_MEV_NS), _TWO_PI_LD)
    return np.exp(-1j * phase.astype(float))


def propagator(h, duration: float) -> np.ndarray:
    """Exact propagator ``exp(-i H duration / hbar)`` via eigendecomposition.

    ``h`` is in meV and ``duration`` in ns.
    """
    if duration < 0:
        raise ValidationError(f"duration must be >= 0, got {duration}")
    vals, vecs = hermitian_eig(h)
    return (vecs * _phase_factors(vals, duration)) @ dagger(vecs)


def evolve_states(h, psi0, times) -> np.ndarray:
    """Pure states ``exp(-iHt/hbar) psi0`` for each ``t`` in ``times`` (rows)."""
    vals, vecs = hermitian_eig(h)
    coeffs = dagger(vecs) @ np.asarray(psi0, dtype=complex)
    return np.array([vecs @ (_phase_factors(vals, t) * coeffs) for t in times])


def _jump_operators(h, collapse):
    h = require_hermitian(h)
    jumps = []
    for op, rate in collapse:
        op = as_matrix(op)
        if op.shape != h.shape:
            raise ValidationError(f"collapse operator shape {op.shape} does not match H {h.shape}")
        if rate < 0:
            raise ValidationError(f"decay rates must be >= 0, got {rate}")
        if rate > 0:
            jumps.append(np.sqrt(rate) * op)
    return h, jumps


def _dissipator(jumps):
    """Return ``D(rho) = sum_k (L rho L^dagger - 1/2 {L^dagger L, rho})`` for fixed jumps."""
    pairs = [(c, dagger(c)) for c in jumps]
    damp = sum((cd @ c for c, cd in pairs), np.zeros_like(jumps[0])) if jumps else None

    def apply(rho):
        if damp is None:
            return np.zeros_like(rho)
        out = -0.5 * (damp @ rho + rho @ damp)
        for c, cd in pairs:
            out += c @ rho @ cd
        return out

    return apply


def integrate_lindblad(h, collapse, rho0, grid: TimeGrid, substeps: int = 1,
                       trace_tol: float = 1e-6, positivity_tol: float = 1e-8):
    """Fixed-step RK4 integration of the Lindblad master equation.

    dρ/dt = -(i/ħ)[H, ρ] + Σ_k Γ_k (L_k ρ L_k† - ½{L_k† L_k, ρ})

    Each step is taken in the interaction picture of ``H``: the coherent part
    is applied exactly with :func:`propagator` and RK4 integrates only the
    dissipator, whose jump operators are rotated to the step's stage times.
    The local error therefore scales with ``Γ dt`` rather than ``‖H‖ dt``,
    and a closed system is propagated exactly.

    Parameters
    ----------
    h : array_like
        Hermitian Hamiltonian in meV.
    collapse : sequence of (operator, rate)
        Jump operators with rates in 1/ns.
    rho0 : array_like
        Initial density matrix.
    grid : TimeGrid
        Output grid; the RK4 step is ``grid.dt / substeps``.

    Returns
    -------
    ndarray, shape (grid.n_steps + 1, d, d)
        Density matrices at every grid point.
    """
    h, jumps = _jump_operators(h, collapse)
    dim = h.shape[0]
    rho = validate_density(rho0).astype(complex)
    if rho.shape != (dim, dim):
        raise ValidationError(f"rho0 shape {rho.shape} does not match H ({dim}, {dim})")
    if substeps < 1:
        raise ValidationError("substeps must be >= 1")
    dt = grid.dt / substeps
    u_half, u_full = propagator(h, 0.5 * dt), propagator(h, dt)
    # jump operators in the interaction picture at the RK4 stage offsets 0, dt/2, dt
    d0 = _dissipator(jumps)
    d_half = _dissipator([dagger(u_half) @ c @ u_half for c in jumps])
    d_full = _dissipator([dagger(u_full) @ c @ u_full for c in jumps])
    u_full_dag = dagger(u_full)
    out = np.empty((grid.n_steps + 1, dim, dim), dtype=complex)
    out[0] = rho
    for n in range(1, grid.n_steps + 1):
        for _ in range(substeps):
            k1 = d0(rho)
            k2 = d_half(rho + 0.5 * dt * k1)
            k3 = d_half(rho + 0.5 * dt * k2)
            k4 = d_full(rho + dt * k3)
            sigma = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rho = u_full @ sigma @ u_full_dag
        rho = 0.5 * (rho + dagger(rho))
        drift = abs(np.trace(rho).real - 1.0)
        if not np.isfinite(drift) or drift > trace_tol:
            raise IntegrationError(
                f"trace drift {drift:.3e} at t={grid.t_start + n * grid.dt:g} ns; "
                f"reduce the step (dt={dt:g} ns)")
        lam_min = float(np.linalg.eigvalsh(rho)[0])
        if lam_min < -positivity_tol:
            raise IntegrationError(
                f"density matrix lost positivity (min eigenvalue {lam_min:.3e}) at "
                f"t={grid.t_start + n * grid.dt:g} ns; reduce the step (dt={dt:g} ns)")
        out[n] = rho
    return out
