"""Order-of-magnitude coherence budget with explicit unit conversions.

Energies given in meV are turned into plain frequencies with ``f = E / h``;
gate times are ``tau = pi / rate`` where ``rate`` is ``f`` (plain-frequency
convention) or ``2 pi f`` (angular). Every derived quantity is stored as a
:class:`BudgetRow` naming its formula and unit, next to the reference value it
is checked against.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from dotqubit.decoherence import decoherence_time, gate_ratio, rotation_time
from dotqubit.dot_model import mixing_factor
from dotqubit.errors import ValidationError
from dotqubit.units import hz_to_mev, mev_to_hz

CONVENTIONS = ("plain-frequency", "angular")
BASELINES = ("coupled", "single_dot")

#: Quoted estimates for the coupled-dot qubit (value, unit).
PAPER_TARGETS = {
    "gamma": 1e-6,
    "omega_L_meV": 1e-4,
    "tau_g1": 1e-7,
    "omega_eff": 30e3,
    "g_eff": 10e3,
    "tau_g2": 1e-3,
    "tau_d": 10.0,
    "n_one_bit": 1e8,
    "n_two_bit": 1e4,
}
#: Quoted estimates for a qubit built from a single dot.
SINGLE_DOT_TARGETS = {"n_one_bit": 1e5, "n_two_bit": 10.0}

MATCH_FACTOR = 10.0


@dataclass(frozen=True)
class BudgetInputs:
    t: float = 0.01
    delta_pair: float = 10.0
    rabi_Ltilde: float = 0.1
    rabi_C_freq: float = 300e6
    delta1: float = 1.0
    delta_tilde_over_omega_eff: float = 3.0
    tau_d_intra: float = 1e-5
    convention: str = "plain-frequency"
    omega_eff_override: float | None = None
    baseline: str = "coupled"

    def __post_init__(self):
        for name in ("t", "delta_pair", "rabi_Ltilde", "rabi_C_freq", "delta1",
                     "delta_tilde_over_omega_eff", "tau_d_intra"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValidationError(f"BudgetInputs.{name} must be a positive number, got {value!r}")
        if self.omega_eff_override is not None and not self.omega_eff_override > 0:
            raise ValidationError(
                f"BudgetInputs.omega_eff_override must be positive, got {self.omega_eff_override!r}")
        if self.convention not in CONVENTIONS:
            raise ValidationError(f"BudgetInputs.convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if self.baseline not in BASELINES:
            raise ValidationError(f"BudgetInputs.baseline must be one of {BASELINES}, got {self.baseline!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "BudgetInputs":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown budget keys: {', '.join(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class BudgetRow:
    name: str
    formula: str
    value: float
    unit: str
    inputs: str = ""
    paper_target: float | None = None
    match: bool | None = None
    note: str = ""


@dataclass(frozen=True)
class BudgetReport:
    inputs: BudgetInputs
    gamma: float
    omega_L_hz: float
    omega_L_meV: float
    omega_eff_hz: float
    omega_eff_meV: float
    omega_eff_derived_hz: float
    delta_tilde_hz: float
    g_eff_hz: float
    g_eff_meV: float
    tau_g1: float
    tau_g2: float
    tau_g1_plain: float
    tau_g1_angular: float
    tau_g2_plain: float
    tau_g2_angular: float
    tau_d: float
    n_one_bit: float
    n_two_bit: float
    rows: tuple = field(default_factory=tuple)

    @property
    def flags(self) -> list:
        return [r for r in self.rows if r.note.startswith(("DISCREPANCY", "INCONSISTENT"))]

    def row(self, name: str) -> BudgetRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BudgetReport":
        data = dict(data)
        data["inputs"] = BudgetInputs(**data["inputs"])
        data["rows"] = tuple(BudgetRow(**r) for r in data["rows"])
        return cls(**data)


def within_factor(value: float, target: float, factor: float = MATCH_FACTOR) -> bool:
    return value > 0 and target > 0 and abs(math.log10(value / target)) <= math.log10(factor)


def _row(name, formula, value, unit, inputs="", target=None, note=""):
    match = None if target is None else within_factor(value, target)
    return BudgetRow(name, formula, value, unit, inputs, target, match, note)


def compute_budget(inp: BudgetInputs) -> BudgetReport:
    """Evaluate the parameter chain from dot parameters to gate counts."""
    single = inp.baseline == "single_dot"
    targets = dict(PAPER_TARGETS)
    if single:
        targets = {k: v for k, v in targets.items() if k in ("omega_eff", "g_eff")} | SINGLE_DOT_TARGETS

    gamma = 1.0 if single else mixing_factor(inp.t, inp.delta_pair)
    omega_L_meV = math.sqrt(gamma) * inp.rabi_Ltilde
    omega_L_hz = mev_to_hz(omega_L_meV)
    omega_eff_derived = inp.rabi_Ltilde / inp.delta1 * inp.rabi_C_freq
    omega_eff = inp.omega_eff_override if inp.omega_eff_override is not None else omega_eff_derived
    delta_tilde = inp.delta_tilde_over_omega_eff * omega_eff
    g_eff = omega_eff ** 2 / delta_tilde

    tau1 = {c: rotation_time(omega_L_hz, c) for c in CONVENTIONS}
    tau2 = {c: rotation_time(g_eff, c) for c in CONVENTIONS}
    tau_d = decoherence_time(gamma, inp.tau_d_intra)
    n1 = gate_ratio(tau_d, tau1[inp.convention])
    n2 = gate_ratio(tau_d, tau2[inp.convention])

    conv = inp.convention
    rate_txt = "f" if conv == "plain-frequency" else "2 pi f"
    rows = [
        _row("gamma", "1 (single dot)" if single else "t^2/(Delta^2 + t^2)", gamma, "1",
             "single-dot baseline" if single else f"t={inp.t:g} meV, Delta={inp.delta_pair:g} meV",
             targets.get("gamma")),
        _row("omega_L_meV", "sqrt(gamma) * Omega_Ltilde", omega_L_meV, "meV",
             f"Omega_Ltilde={inp.rabi_Ltilde:g} meV", targets.get("omega_L_meV")),
        _row("omega_L_hz", "Omega_L / h", omega_L_hz, "Hz", "h=4.135667696e-12 meV s"),
        _row("omega_eff_derived", "Omega_Ltilde * Omega_C / delta1", omega_eff_derived, "Hz",
             f"Omega_Ltilde={inp.rabi_Ltilde:g} meV, Omega_C={inp.rabi_C_freq:g} Hz, delta1={inp.delta1:g} meV",
             targets["omega_eff"],
             note=_omega_eff_note(omega_eff_derived, targets["omega_eff"])),
        _row("omega_eff", "override" if inp.omega_eff_override is not None else "= omega_eff_derived",
             omega_eff, "Hz", "", targets["omega_eff"],
             note="override in use" if inp.omega_eff_override is not None else ""),
        _row("delta_tilde", "ratio * Omega_eff", delta_tilde, "Hz", f"ratio={inp.delta_tilde_over_omega_eff:g}"),
        _row("g_eff", "Omega_eff^2 / delta_tilde", g_eff, "Hz", "", targets["g_eff"]),
        _row("tau_g1", f"pi / ({rate_txt} of Omega_L)", tau1[conv], "s", conv, targets.get("tau_g1")),
        _row("tau_g1_plain", "pi / f(Omega_L)", tau1["plain-frequency"], "s"),
        _row("tau_g1_angular", "pi / (2 pi f(Omega_L))", tau1["angular"], "s"),
        _row("tau_g2", f"pi / ({rate_txt} of g_eff)", tau2[conv], "s", conv, targets.get("tau_g2")),
        _row("tau_g2_plain", "pi / f(g_eff)", tau2["plain-frequency"], "s"),
        _row("tau_g2_angular", "pi / (2 pi f(g_eff))", tau2["angular"], "s"),
        _row("tau_d", "tau_d_intra / gamma", tau_d, "s", f"tau_d_intra={inp.tau_d_intra:g} s",
             targets.get("tau_d")),
        _row("n_one_bit", "tau_d / tau_g1", n1, "1", "", targets.get("n_one_bit")),
        _row("n_two_bit", "tau_d / tau_g2", n2, "1", "", targets.get("n_two_bit")),
    ]
    if single:
        rows = [r if r.name != "n_two_bit" or r.match else replace(r, note=(
            "INCONSISTENT: quoted ~10 two-bit gates for a single dot does not follow from "
            "tau_d_intra / tau_g2")) for r in rows]
    rows = tuple(rows)
    return BudgetReport(
        inputs=inp, gamma=gamma, omega_L_hz=omega_L_hz, omega_L_meV=omega_L_meV,
        omega_eff_hz=omega_eff, omega_eff_meV=hz_to_mev(omega_eff),
        omega_eff_derived_hz=omega_eff_derived, delta_tilde_hz=delta_tilde,
        g_eff_hz=g_eff, g_eff_meV=hz_to_mev(g_eff),
        tau_g1=tau1[conv], tau_g2=tau2[conv],
        tau_g1_plain=tau1["plain-frequency"], tau_g1_angular=tau1["angular"],
        tau_g2_plain=tau2["plain-frequency"], tau_g2_angular=tau2["angular"],
        tau_d=tau_d, n_one_bit=n1, n_two_bit=n2, rows=rows)


def _omega_eff_note(derived, target):
    ratio = derived / target
    if within_factor(derived, target):
        return ""
    return f"DISCREPANCY: derived value is {ratio:.1e} x the quoted 30 kHz"


CSV_COLUMNS = ("name", "formula", "value", "unit", "paper_target", "match")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "yes" if x else "no"
    return f"{x:.12g}"


def emit_report(report: BudgetReport, fmt: str = "text") -> str:
    """Serialise a report as ``json``, ``csv`` or a ``text`` table."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.rows:
            w.writerow([r.name, r.formula, _fmt(r.value), r.unit, _fmt(r.paper_target), _fmt(r.match)])
        return buf.getvalue()
    if fmt == "text":
        header = ("quantity", "formula", "inputs", "value", "unit", "target", "match")
        lines = [header] + [(r.name, r.formula, r.inputs, f"{r.value:.4g}", r.unit,
                             "" if r.paper_target is None else f"{r.paper_target:.3g}",
                             _fmt(r.match)) for r in report.rows]
        widths = [max(len(row[i]) for row in lines) for i in range(len(header))]
        out = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in lines]
        out.insert(1, "  ".join("-" * w for w in widths))
        out.append("")
        out.append(f"convention: {report.inputs.convention}; baseline: {report.inputs.baseline}")
        for r in report.rows:
            if r.note.startswith(("DISCREPANCY", "INCONSISTENT")):
                out.append(f"FLAG {r.name}: {r.note}")
        return "\n".join(out) + "\n"
    raise ValidationError(f"unknown report format {fmt!r}; expected json, csv or text")
