"""Strict JSON run configuration for the command-line tool.

Layout of a config document (every section optional)::

    {
      "budget":   {BudgetInputs fields},
      "dot_pair": {"e_d": 0.0, "e_dtilde": 10.0, "t": 0.01},
      "qubit_j":  {"delta1": 1.0, "delta2": 1.0, "rabi_Ltilde": 0.02, "rabi_C": 0.02},
      "qubit_k":  null,
      "layout":   {"cavity_dim": 3},
      "grid":     {"t_start": 0.0, "t_end": null, "n_steps": 400},
      "evolve":   {"initial": null},
      "decohere": {"rabi_L": 0.01, "rates": [...], "n_steps": 1000}
    }

A qubit section is either the detuning form shown above (optionally with
``rabi_L``, ``e_v``, ``e_e``, ``e_etilde``) or the full set of
:class:`~dotqubit.model.LevelScheme` fields. Unknown keys anywhere are
rejected, naming the offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from dotqubit.budget import BudgetInputs
from dotqubit.dot_model import DotPairParams
from dotqubit.errors import ValidationError
from dotqubit.model import DEFAULT_CAVITY_DIM, LevelScheme

DETUNING_KEYS = {"delta1", "delta2", "rabi_Ltilde", "rabi_C", "rabi_L", "e_v", "e_e", "e_etilde"}
SCHEME_KEYS = {f.name for f in fields(LevelScheme)}

#: Seeds for qubit sections targeted by ``--set`` but absent from the file.
DEFAULT_QUBIT = {"delta1": 1.0, "delta2": 1.0, "rabi_Ltilde": 0.02, "rabi_C": 0.02}


@dataclass(frozen=True)
class GridConfig:
    t_start: float = 0.0
    t_end: float | None = None
    n_steps: int = 400


@dataclass(frozen=True)
class LayoutConfig:
    cavity_dim: int = DEFAULT_CAVITY_DIM


@dataclass(frozen=True)
class EvolveConfig:
    initial: str | None = None


@dataclass(frozen=True)
class DecohereConfig:
    rabi_L: float = 0.01
    rates: tuple = (0.0, 1e-3, 2e-3, 5e-3, 1e-2)
    n_steps: int = 1000


@dataclass(frozen=True)
class RunConfig:
    budget: BudgetInputs = field(default_factory=BudgetInputs)
    dot_pair: DotPairParams = field(default_factory=lambda: DotPairParams(0.0, 10.0, 0.01))
    qubit_j: LevelScheme = field(default_factory=lambda: LevelScheme.from_detunings(**DEFAULT_QUBIT))
    qubit_k: LevelScheme | None = None
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    evolve: EvolveConfig = field(default_factory=EvolveConfig)
    decohere: DecohereConfig = field(default_factory=DecohereConfig)


def _strict(cls, section: str, data):
    if not isinstance(data, dict):
        raise ValidationError(f"config section {section!r} must be an object")
    allowed = {f.name for f in fields(cls)}
    for key in data:
        if key not in allowed:
            raise ValidationError(f"unknown config key {section}.{key}")
    try:
        return cls(**data)
    except (TypeError, ValidationError) as exc:
        raise ValidationError(f"config section {section!r}: {exc}") from None


def _scheme(section: str, data):
    if data is None:
        return None
    if not isinstance(data, dict):
        raise ValidationError(f"config section {section!r} must be an object or null")
    if "omega_Ltilde" in data or "omega_C" in data:
        extra = set(data) - SCHEME_KEYS
        missing = SCHEME_KEYS - set(data)
        if extra:
            raise ValidationError(f"unknown config key {section}.{sorted(extra)[0]}")
        if missing:
            raise ValidationError(f"config section {section!r} missing keys {sorted(missing)}")
        return _build(section, LevelScheme, data)
    extra = set(data) - DETUNING_KEYS
    if extra:
        raise ValidationError(f"unknown config key {section}.{sorted(extra)[0]}")
    for key in ("delta1", "delta2", "rabi_Ltilde", "rabi_C"):
        if key not in data:
            raise ValidationError(f"config section {section!r} missing key {key!r}")
    return _build(section, LevelScheme.from_detunings, data)


def _build(section, factory, data):
    try:
        return factory(**data)
    except ValidationError as exc:
        raise ValidationError(f"config section {section!r}: {exc}") from None


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ValidationError("config document must be a JSON object")
    sections = {f.name for f in fields(RunConfig)}
    for key in data:
        if key not in sections:
            raise ValidationError(f"unknown config key {key}")
    kw = {}
    if "budget" in data:
        kw["budget"] = _strict(BudgetInputs, "budget", data["budget"])
    if "dot_pair" in data:
        kw["dot_pair"] = _strict(DotPairParams, "dot_pair", data["dot_pair"])
    for name in ("qubit_j", "qubit_k"):
        if name in data:
            kw[name] = _scheme(name, data[name])
    if kw.get("qubit_j", True) is None:
        raise ValidationError("config section 'qubit_j' cannot be null")
    for name, cls in (("layout", LayoutConfig), ("grid", GridConfig),
                      ("evolve", EvolveConfig), ("decohere", DecohereConfig)):
        if name in data:
            kw[name] = _strict(cls, name, data[name])
    cfg = RunConfig(**kw)
    if cfg.layout.cavity_dim < 2:
        raise ValidationError("layout.cavity_dim must be >= 2")
    if int(cfg.grid.n_steps) != cfg.grid.n_steps or cfg.grid.n_steps < 1:
        raise ValidationError("grid.n_steps must be an integer >= 1")
    if cfg.decohere.rabi_L <= 0 or any(r < 0 for r in cfg.decohere.rates):
        raise ValidationError("decohere.rabi_L must be > 0 and decohere.rates >= 0")
    return cfg


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, assignments) -> dict:
    """Apply ``section.key=value`` assignments (values parsed as JSON when possible)."""
    data = json.loads(json.dumps(data))
    for item in assignments or ():
        if "=" not in item:
            raise ValidationError(f"--set expects key=value, got {item!r}")
        path, raw = item.split("=", 1)
        keys = path.strip().split(".")
        if len(keys) > 1 and keys[0] in ("qubit_j", "qubit_k") and data.get(keys[0]) is None:
            data[keys[0]] = dict(DEFAULT_QUBIT)
        node = data
        for k in keys[:-1]:
            if node.get(k) is None:
                node[k] = {}
            node = node[k]
            if not isinstance(node, dict):
                raise ValidationError(f"--set {path}: {k!r} is not a section")
        node[keys[-1]] = _parse_value(raw)
    return data


def load_config(path=None, overrides=None) -> RunConfig:
    data = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(apply_overrides(data, overrides))
