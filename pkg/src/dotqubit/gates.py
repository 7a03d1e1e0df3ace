"""Gate algebra for the conditional-phase-shift (CPS) construction.

Pauli operators follow the qubit definitions ``sigma^+ = |e><v|``,
``sigma^x = |e><v| + |v><e|``, ``sigma^y = -i|e><v| + i|v><e|`` and
``sigma^z = |e><e| - |v><v|``. With the basis ordered (v, e) this makes
``sigma^y`` and ``sigma^z`` the negatives of the textbook matrices.

Two-qubit operators act on (vv, ve, ev, ee) with qubit j first. A
:class:`PulseSequence` lists its steps in written (left-to-right) order, so
the rightmost step acts first and the composed matrix is
``steps[0] @ steps[1] @ ...``.

Sign convention of the joint evolution: ``joint_evolution(phi)`` is
``exp(+i phi X)`` on the {ve, ev} block, i.e. the time-reversed physical
evolution ``exp(-i H_xy t / hbar)`` with ``phi = g_eff t / hbar``. Equivalently
``joint_evolution(phi) == propagator(xy_hamiltonian(g), t).conj().T``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from dotqubit.errors import ValidationError
from dotqubit.numerics import dagger, is_unitary, kron, unitarity_error

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
I2 = np.eye(2, dtype=complex)

AXIS_TOL = 1e-12
PASS_TOL = 1e-8

QUBITS = ("j", "k")
N_J = tuple(np.array([1.0, 1.0, -1.0]) / math.sqrt(3.0))
N_K = tuple(np.array([1.0, -1.0, 1.0]) / math.sqrt(3.0))
X_AXIS = (1.0, 0.0, 0.0)
Y_AXIS = (0.0, 1.0, 0.0)
Z_AXIS = (0.0, 0.0, 1.0)

CPS_TARGET = np.diag([1, 1, 1, -1]).astype(complex)
CNOT_TARGET = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _check_axis(axis):
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ValidationError(f"rotation axis must have 3 components, got {axis.shape}")
    norm = float(np.linalg.norm(axis))
    if abs(norm - 1.0) > AXIS_TOL:
        raise ValidationError(f"rotation axis must be a unit vector (|n| = {norm!r})")
    return axis


def rotation(axis, angle: float) -> np.ndarray:
    """``exp(i angle n.sigma) = cos(angle) I + i sin(angle) n.sigma``."""
    nx, ny, nz = _check_axis(axis)
    n_sigma = nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z
    return math.cos(angle) * I2 + 1j * math.sin(angle) * n_sigma


def joint_evolution(phi: float) -> np.ndarray:
    """Identity on vv and ee; ``[[cos, i sin], [i sin, cos]]`` on (ve, ev)."""
    u = np.eye(4, dtype=complex)
    c, s = math.cos(phi), math.sin(phi)
    u[1, 1] = u[2, 2] = c
    u[1, 2] = u[2, 1] = 1j * s
    return u


@dataclass(frozen=True)
class PulseStep:
    """One factor of a gate sequence.

    ``kind`` is ``"rotation"`` (uses ``qubit``, ``axis``, ``angle``),
    ``"joint"`` (uses ``phi``) or ``"global_phase"`` (uses ``theta``).
    """

    kind: str
    qubit: str | None = None
    axis: tuple | None = None
    angle: float = 0.0
    phi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind == "rotation":
            if self.qubit not in QUBITS:
                raise ValidationError(f"rotation step needs qubit 'j' or 'k', got {self.qubit!r}")
            object.__setattr__(self, "axis", tuple(float(x) for x in _check_axis(self.axis)))
        elif self.kind not in ("joint", "global_phase"):
            raise ValidationError(f"unknown step kind {self.kind!r}")

    def matrix(self, joint_sign: int = 1) -> np.ndarray:
        if self.kind == "rotation":
            r = rotation(self.axis, self.angle)
            return kron(r, I2) if self.qubit == "j" else kron(I2, r)
        if self.kind == "joint":
            return joint_evolution(joint_sign * self.phi)
        return np.exp(1j * self.theta) * np.eye(4, dtype=complex)

    def flipped(self) -> "PulseStep":
        if self.kind == "rotation":
            return PulseStep("rotation", qubit=self.qubit, axis=self.axis, angle=-self.angle)
        if self.kind == "joint":
            return PulseStep("joint", phi=-self.phi)
        return PulseStep("global_phase", theta=-self.theta)

    def to_dict(self) -> dict:
        if self.kind == "rotation":
            return {"kind": "rotation", "qubit": self.qubit, "axis": list(self.axis), "angle": self.angle}
        if self.kind == "joint":
            return {"kind": "joint", "phi": self.phi}
        return {"kind": "global_phase", "theta": self.theta}

    @classmethod
    def from_dict(cls, d: dict) -> "PulseStep":
        allowed = {"rotation": {"kind", "qubit", "axis", "angle"},
                   "joint": {"kind", "phi"}, "global_phase": {"kind", "theta"}}
        kind = d.get("kind")
        if kind not in allowed:
            raise ValidationError(f"unknown step kind {kind!r}")
        extra = set(d) - allowed[kind]
        missing = allowed[kind] - set(d)
        if extra or missing:
            raise ValidationError(f"{kind} step: unexpected keys {sorted(extra)}, missing {sorted(missing)}")
        if kind == "rotation":
            return cls("rotation", qubit=d["qubit"], axis=tuple(d["axis"]), angle=float(d["angle"]))
        if kind == "joint":
            return cls("joint", phi=float(d["phi"]))
        return cls("global_phase", theta=float(d["theta"]))


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple
    label: str = ""

    def __post_init__(self):
        if not self.steps:
            raise ValidationError("a pulse sequence needs at least one step")
        object.__setattr__(self, "steps", tuple(self.steps))

    def matrix(self, joint_sign: int = 1) -> np.ndarray:
        u = np.eye(4, dtype=complex)
        for step in self.steps:
            u = u @ step.matrix(joint_sign)
        return u

    def to_json(self) -> str:
        return json.dumps({"label": self.label, "steps": [s.to_dict() for s in self.steps]}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        data = json.loads(text)
        if isinstance(data, list):
            data = {"label": "", "steps": data}
        return cls(tuple(PulseStep.from_dict(s) for s in data["steps"]), data.get("label", ""))


def cps_sequence() -> PulseSequence:
    """The printed CPS recipe, steps in written order."""
    pi = math.pi
    return PulseSequence((
        PulseStep("global_phase", theta=pi / 4),
        PulseStep("rotation", qubit="j", axis=N_J, angle=pi / 3),
        PulseStep("rotation", qubit="k", axis=N_K, angle=pi / 3),
        PulseStep("joint", phi=pi / 4),
        PulseStep("rotation", qubit="j", axis=Y_AXIS, angle=-pi / 2),
        PulseStep("joint", phi=pi / 4),
        PulseStep("rotation", qubit="j", axis=X_AXIS, angle=-pi / 2),
        PulseStep("rotation", qubit="k", axis=X_AXIS, angle=-pi / 2),
    ), label="cps-literal")


def compile_cps():
    """Return the literal CPS sequence and its composed 4x4 matrix."""
    seq = cps_sequence()
    u = seq.matrix()
    if not is_unitary(u):
        raise ValidationError(f"composed CPS is not unitary (err {unitarity_error(u):.2e})")
    return seq, u


def fidelity(target, u) -> float:
    """Phase-insensitive gate fidelity ``|tr(target^dagger U)|^2 / d^2``."""
    target, u = np.asarray(target), np.asarray(u)
    d = target.shape[0]
    return float(abs(np.trace(dagger(target) @ u)) ** 2 / d ** 2)


_MAGIC = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]) / math.sqrt(2)


def makhlin_invariants(u) -> tuple:
    """Local invariants ``(G1, G2)``; equal invariants mean equal up to single-qubit gates."""
    u = np.asarray(u, dtype=complex)
    ub = dagger(_MAGIC) @ u @ _MAGIC
    m = ub.T @ ub
    det = np.linalg.det(u)
    tr = np.trace(m)
    return complex(tr ** 2 / (16 * det)), complex((tr ** 2 - np.trace(m @ m)) / (4 * det))


@dataclass
class VerificationReport:
    fidelity: float
    global_phase: float
    max_deviation: float
    passed: bool
    basis_action: list = field(default_factory=list)
    locally_equivalent: bool | None = None

    def as_dict(self) -> dict:
        return {"fidelity": self.fidelity, "global_phase": self.global_phase,
                "max_deviation": self.max_deviation, "passed": self.passed,
                "locally_equivalent": self.locally_equivalent, "basis_action": self.basis_action}


BASIS_LABELS = ("vv", "ve", "ev", "ee")


def _basis_action(u):
    """For each input basis state, the dominant output state with its weight and phase."""
    rows = []
    for col, label in enumerate(BASIS_LABELS[:u.shape[1]]):
        out = u[:, col]
        i = int(np.argmax(np.abs(out)))
        rows.append({"input": label, "output": BASIS_LABELS[i], "weight": float(abs(out[i]) ** 2),
                     "phase": float(np.angle(out[i]))})
    return rows


def verify_matrix(u, target, tol: float = PASS_TOL) -> VerificationReport:
    u, target = np.asarray(u, dtype=complex), np.asarray(target, dtype=complex)
    if u.shape != target.shape:
        raise ValidationError(f"dimension mismatch: {u.shape} vs target {target.shape}")
    overlap = np.trace(dagger(target) @ u)
    phase = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    dev = float(np.max(np.abs(np.exp(-1j * phase) * u - target)))
    local = None
    if u.shape == (4, 4):
        g_u, g_t = makhlin_invariants(u), makhlin_invariants(target)
        local = bool(abs(g_u[0] - g_t[0]) < 1e-8 and abs(g_u[1] - g_t[1]) < 1e-8)
    return VerificationReport(fidelity=fidelity(target, u), global_phase=phase, max_deviation=dev,
                              passed=dev <= tol, basis_action=_basis_action(u), locally_equivalent=local)


def verify_sequence(seq: PulseSequence, target, joint_sign: int = 1) -> VerificationReport:
    """Compare the composed ``seq`` against ``target`` modulo global phase.

    Passes when the elementwise deviation after removing the optimal global
    phase ``arg tr(target^dagger U)`` is at most 1e-8.
    """
    return verify_matrix(seq.matrix(joint_sign), target)


@dataclass
class Variant:
    signs: tuple
    joint_sign: int
    fidelity: float
    sequence: PulseSequence

    def as_dict(self) -> dict:
        return {"signs": list(self.signs), "joint_sign": self.joint_sign, "fidelity": self.fidelity}


def search_variants(base: PulseSequence, target, max_steps: int = 10):
    """Exhaustive search over per-step angle-sign flips and the joint sign convention.

    Returns ``(best, ranked)`` where ``ranked`` lists every candidate by
    decreasing fidelity (ties keep enumeration order, the unflipped base first).
    """
    if len(base.steps) > max_steps:
        raise ValidationError(f"search limited to {max_steps} steps, got {len(base.steps)}")
    target = np.asarray(target, dtype=complex)
    candidates = []
    for joint_sign in (1, -1):
        for signs in product((1, -1), repeat=len(base.steps)):
            steps = tuple(s if sg == 1 else s.flipped() for s, sg in zip(base.steps, signs))
            seq = PulseSequence(steps, label=f"{base.label}-variant")
            f = fidelity(target, seq.matrix(joint_sign))
            candidates.append(Variant(signs, joint_sign, f, seq))
    ranked = sorted(candidates, key=lambda v: -round(v.fidelity, 12))
    return ranked[0], ranked


@dataclass
class CnotResult:
    matrix: np.ndarray
    truth_table_ok: bool
    equals_cnot: bool
    warning: str | None = None
    basis_action: list = field(default_factory=list)


def hadamard_k() -> np.ndarray:
    """``exp(i pi sigma_k^y / 4)`` on qubit k."""
    return kron(I2, rotation(Y_AXIS, math.pi / 4))


def truth_table_matches(u, table, tol: float = 1e-10) -> bool:
    """True when every basis input maps to the tabulated basis output with unit modulus."""
    u = np.asarray(u)
    for col, row in enumerate(table):
        if abs(abs(u[row, col]) - 1.0) > tol:
            return False
    return True


CNOT_TABLE = (0, 1, 3, 2)  # vv->vv, ve->ve, ev->ee, ee->ev


CNOT_ORDERS = ("standard", "literal")


def cnot(cps=None, verified: bool | None = None, order: str = "standard") -> CnotResult:
    """Conjugate a CPS matrix by ``H_k = exp(i pi sigma_k^y / 4)``.

    ``order="standard"`` returns ``H_k U_CPS H_k^{-1}``, which is CNOT (control
    j, target k, active on ``|e>``) up to global phase for the ideal CPS.
    ``order="literal"`` returns ``H_k^{-1} U_CPS H_k``; with the sigma^y sign
    used here that product is controlled-(-sigma^x): the truth table is right
    but the control-active block carries an extra phase of -1, so it is not
    CNOT up to a global phase.

    ``cps`` defaults to the ideal ``diag(1, 1, 1, -1)``. A supplied matrix that
    does not itself verify against the ideal CPS gets a warning attached.
    """
    if order not in CNOT_ORDERS:
        raise ValidationError(f"order must be one of {CNOT_ORDERS}, got {order!r}")
    warning = None
    if cps is None:
        cps = CPS_TARGET
    else:
        cps = np.asarray(cps, dtype=complex)
        if verified is None:
            verified = verify_matrix(cps, CPS_TARGET).passed
        if not verified:
            warning = "input CPS matrix is not verified against diag(1, 1, 1, -1)"
    h = hadamard_k()
    h_inv = dagger(h)
    u = h @ cps @ h_inv if order == "standard" else h_inv @ cps @ h
    return CnotResult(matrix=u, truth_table_ok=truth_table_matches(u, CNOT_TABLE),
                      equals_cnot=verify_matrix(u, CNOT_TARGET, tol=1e-10).passed,
                      warning=warning, basis_action=_basis_action(u))
