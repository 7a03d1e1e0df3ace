"""Command-line entry point.

Exit codes: 0 on success, 1 on invalid input (including an unknown
subcommand), 2 when the parameters fall outside a validated numerical regime.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from dotqubit import __version__
from dotqubit.budget import compute_budget, emit_report
from dotqubit.config import load_config
from dotqubit.decoherence import fidelity_sweep
from dotqubit.dot_model import DotPairParams, diagonalize_pair
from dotqubit.errors import IntegrationError, RegimeError, ValidationError
from dotqubit.gates import (CNOT_TARGET, CPS_TARGET, cnot, compile_cps, search_variants,
                            verify_sequence)
from dotqubit.model import (compare_jc_vs_xy, compare_raman_vs_jc, effective_coupling,
                            evolve_model, exchange_coupling, rabi_period)
from dotqubit.numerics import TimeGrid


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return f"{x:.12g}"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _matrix_json(m):
    m = np.asarray(m)
    return {"real": m.real.tolist(), "imag": m.imag.tolist()}


def _write(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args):
    return load_config(getattr(args, "config", None), getattr(args, "set", None))


def cmd_spectrum(args):
    cfg = _config(args)
    p = cfg.dot_pair
    e_d = p.e_d if args.e_d is None else args.e_d
    t = p.t if args.t is None else args.t
    delta = p.delta if args.delta is None else args.delta
    pair = DotPairParams(e_d=e_d, e_dtilde=e_d + delta, t=t)
    mixed = diagonalize_pair(pair)
    data = {"e_d_meV": pair.e_d, "e_dtilde_meV": pair.e_dtilde, "t_meV": pair.t, "delta_meV": pair.delta,
            "e_minus_meV": mixed.e_minus, "e_plus_meV": mixed.e_plus,
            "gamma_paper": mixed.gamma_paper, "gamma_exact": mixed.gamma_exact,
            "amp_e_on_d": mixed.amp_e_on_d, "amp_e_on_dtilde": mixed.amp_e_on_dtilde,
            "out_of_regime": mixed.out_of_regime}
    if args.format == "json":
        return _dump_json(data)
    return "".join(f"{k:16s} {v if isinstance(v, bool) else _fmt(v)}\n" for k, v in data.items())


def cmd_budget(args):
    cfg = _config(args)
    return emit_report(compute_budget(cfg.budget), args.format)


def _verification_text(title, rep):
    lines = [title, f"fidelity          {_fmt(rep.fidelity)}",
             f"global_phase      {_fmt(rep.global_phase)}",
             f"max_deviation     {_fmt(rep.max_deviation)}",
             f"locally_equiv     {rep.locally_equivalent}",
             f"verdict           {'PASS' if rep.passed else 'FAIL'}"]
    for row in rep.basis_action:
        lines.append(f"  |{row['input']}> -> |{row['output']}>  weight={_fmt(row['weight'])}"
                     f"  phase={_fmt(row['phase'])}")
    return "\n".join(lines) + "\n"


def cmd_gate(args):
    seq, u = compile_cps()
    if args.action == "compile":
        if args.format == "json":
            return _dump_json({"sequence": json.loads(seq.to_json()), "matrix": _matrix_json(u)})
        return seq.to_json() + "\n"
    if args.action == "verify-cps":
        rep = verify_sequence(seq, CPS_TARGET)
        if args.format == "json":
            return _dump_json({"label": seq.label, "target": "diag(1,1,1,-1)", **rep.as_dict()})
        return _verification_text("CPS sequence vs diag(1,1,1,-1)", rep)
    if args.action == "search":
        best, ranked = search_variants(seq, CPS_TARGET)
        data = {"n_candidates": len(ranked), "best": best.as_dict(),
                "any_exact": best.fidelity > 1 - 1e-10,
                "ranked": [v.as_dict() for v in ranked[:args.top]]}
        if args.format == "json":
            return _dump_json(data)
        lines = [f"candidates {len(ranked)}; best fidelity {_fmt(best.fidelity)}; "
                 f"exact variant found: {data['any_exact']}"]
        lines += [f"  F={_fmt(v.fidelity)} joint_sign={v.joint_sign:+d} signs={list(v.signs)}"
                  for v in ranked[:args.top]]
        return "\n".join(lines) + "\n"
    if args.action == "cnot":
        cps_in = None if args.ideal else u
        res = cnot(cps_in, order=args.order)
        data = {"cps_input": "ideal" if args.ideal else "compiled", "order": args.order,
                "truth_table_ok": res.truth_table_ok,
                "equals_cnot": res.equals_cnot, "warning": res.warning, "basis_action": res.basis_action,
                "matrix": _matrix_json(res.matrix),
                "fidelity_vs_cnot": float(abs(np.trace(CNOT_TARGET.conj().T @ res.matrix)) ** 2 / 16)}
        return _dump_json(data)
    raise ValidationError(f"unknown gate action {args.action!r}")


def _grid(cfg, default_period):
    g = cfg.grid
    t_end = g.t_end if g.t_end is not None else g.t_start + default_period
    return TimeGrid(g.t_start, t_end, g.n_steps)


def cmd_evolve(args):
    cfg = _config(args)
    sj, sk = cfg.qubit_j, cfg.qubit_k
    if sk is None:
        period = rabi_period(effective_coupling(sj))
        initial = "v0" if args.model != "xy" else None
    else:
        period = rabi_period(exchange_coupling(sj, sk))
        initial = "ev" if args.model == "xy" else "ev0"
    initial = args.initial or cfg.evolve.initial or initial
    if not np.isfinite(period):
        raise ValidationError("couplings vanish; set grid.t_end explicitly")
    labels, pops, leak = evolve_model(args.model, sj, sk, initial, _grid(cfg, period), cfg.layout.cavity_dim)
    grid = _grid(cfg, period)
    lines = [",".join(["t_ns"] + [f"p_{lab}" for lab in labels] + ["leakage"])]
    for t, row, lk in zip(grid.times, pops, leak):
        lines.append(",".join([_fmt(t)] + [_fmt(x) for x in row] + [_fmt(lk)]))
    return "\n".join(lines) + "\n"


def cmd_compare(args):
    cfg = _config(args)
    grid = None
    if cfg.grid.t_end is not None:
        grid = TimeGrid(cfg.grid.t_start, cfg.grid.t_end, cfg.grid.n_steps)
    if args.pair == "raman-jc":
        rep = compare_raman_vs_jc(cfg.qubit_j, cfg.layout.cavity_dim, grid)
    else:
        if cfg.qubit_k is None:
            raise ValidationError("compare jc-xy needs a 'qubit_k' config section")
        rep = compare_jc_vs_xy(cfg.qubit_j, cfg.qubit_k, cfg.layout.cavity_dim, grid)
    return _dump_json({"comparison": args.pair, **rep.as_dict()})


def cmd_decohere(args):
    cfg = _config(args)
    d = cfg.decohere
    duration, rows = fidelity_sweep(d.rabi_L, d.rates, n_steps=d.n_steps)
    lines = ["rate_per_ns,fidelity,infidelity"]
    lines += [f"{_fmt(r)},{_fmt(f)},{_fmt(1.0 - f)}" for r, f in rows]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. budget.t=0.02 (repeatable)")
    common.add_argument("--out", help="write output to this path instead of stdout")

    parser = _Parser(prog="dotqubit", description="Coupled quantum-dot qubit toolkit.")
    parser.add_argument("--version", action="version", version=f"dotqubit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="dot-pair mixing and eigenenergies")
    p.add_argument("--t", type=float, help="tunnel coupling (meV)")
    p.add_argument("--delta", type=float, help="dot level separation (meV)")
    p.add_argument("--e-d", type=float, help="lower dot level (meV)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("budget", parents=[common], help="coherence/operation-time budget")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("gate", parents=[common], help="CPS sequence tools")
    p.add_argument("action", choices=("verify-cps", "compile", "search", "cnot"))
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.add_argument("--top", type=int, default=10, help="variants listed by 'search'")
    p.add_argument("--ideal", action="store_true", help="'cnot': conjugate the ideal CPS")
    p.add_argument("--order", choices=("standard", "literal"), default="standard",
                   help="'cnot': H U H^-1 (standard) or H^-1 U H (literal)")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("evolve", parents=[common], help="population trajectory CSV")
    p.add_argument("--model", choices=("raman", "jc", "xy"), required=True)
    p.add_argument("--initial", help="initial basis label, e.g. v0, ev0, ev")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("compare", parents=[common], help="cross-check two rungs (JSON report)")
    p.add_argument("pair", choices=("raman-jc", "jc-xy"))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("decohere", parents=[common], help="pi-pulse fidelity vs emission rate (CSV)")
    p.set_defaults(func=cmd_decohere)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        _write(args.func(args), args.out)
    except RegimeError as exc:
        print(f"dotqubit: regime error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"dotqubit: integration error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"dotqubit: invalid input: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
