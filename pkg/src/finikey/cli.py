"""Command-line front end.

Every subcommand prints a table (default), one JSON document, or CSV. Options can
also come from a config file (``--config`` or $FINIKEY_CONFIG) holding
``key=value`` lines, or a JSON document previously written by ``--format json``;
explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import IO

from . import __version__
from .entropy import Protocol, ProtocolSpec, asymptotic_rate
from .finite_key import EpsilonBudget, key_length_at
from .optimizer import N_CAP, critical_n, log_grid, optimize_split, scan
from .rapid import DELTA_N_FORMULA, DELTA_V_FORMULA, case_study_1, case_study_2, rapid_estimate
from .simulator import TrialSpec, simulate_run, validate_delta_v

SCAN_COLUMNS = ["N", "n_opt", "eps_pa", "eps_bar", "eps_pe", "eps_ec", "ell", "r_N"]
RESULT_FIELDS = ["ell", "r_N", "q_pess", "delta_v", "delta_n", "leak_per_bit", "h_ae_pess"]


class DomainError(ValueError):
    pass


# -- flag types ---------------------------------------------------------------

def count(text: str) -> int:
    """Positive integer, accepting scientific notation such as 1e6."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def probability(text: str) -> float:
    value = _real(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a probability in [0, 1], got {text!r}")
    return value


def open_probability(text: str) -> float:
    value = _real(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text!r}")
    return value


def efficiency(text: str) -> float:
    value = _real(text)
    if value < 1.0:
        raise argparse.ArgumentTypeError(f"expected f >= 1, got {text!r}")
    return value


def positive(text: str) -> float:
    value = _real(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text!r}")
    return value


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


# -- parser -------------------------------------------------------------------

def _protocol_flags(p):
    p.add_argument("--protocol", choices=["bb84", "six-state"], default="bb84")
    p.add_argument("--qber", type=probability, required=True, help="observed error rate")
    p.add_argument("--f", type=efficiency, default=1.2, help="error-correction inefficiency")
    p.add_argument("--d", type=count, default=2, help="POVM outcomes used for estimation")
    p.add_argument("--n-pe", type=count, default=1, help="number of estimated parameters")


def _eps_flags(p):
    for name in ("pa", "bar", "pe", "ec"):
        p.add_argument(f"--eps-{name}", type=open_probability, default=1e-3)


def _common(p):
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.add_argument("--config", help="key=value or JSON file of option defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finikey", description="Finite-key QKD secret-key calculator")
    parser.add_argument("--version", action="version", version=f"finikey {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="key length for a fixed split and budget")
    _protocol_flags(p)
    _eps_flags(p)
    p.add_argument("--N", type=count, required=True, help="signals per run")
    p.add_argument("--n", type=count, help="raw-key length (default N/2)")
    p.add_argument("--measured-leak", type=positive, help="bits actually disclosed by error correction")
    _common(p)

    p = sub.add_parser("optimize", help="best split and epsilon allocation at fixed N")
    _protocol_flags(p)
    p.add_argument("--N", type=count, required=True)
    p.add_argument("--eps-total", type=open_probability, default=4e-3)
    _common(p)

    p = sub.add_parser("critical-n", help="smallest N that yields a key")
    _protocol_flags(p)
    p.add_argument("--eps-total", type=open_probability, default=4e-3)
    p.add_argument("--cap", type=count, default=N_CAP)
    _common(p)

    p = sub.add_parser("scan", help="optimised key rate over a log-spaced N grid")
    _protocol_flags(p)
    p.add_argument("--eps-total", type=open_probability, default=4e-3)
    p.add_argument("--n-min", type=count, default=1000)
    p.add_argument("--n-max", type=count, default=10**9)
    p.add_argument("--points", type=count, default=25)
    p.add_argument("--workers", type=count, default=1)
    _common(p)

    p = sub.add_parser("rapid", help="back-of-envelope estimates")
    p.add_argument("--case", type=int, choices=[1, 2], help="case study to solve")
    p.add_argument("--r-inf", type=open_probability, default=0.1)
    p.add_argument("--target-dv", type=positive, default=0.005)
    p.add_argument("--N", type=count, help="evaluate both approximations at this N")
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo validation")
    p.add_argument("--mode", choices=["delta-v", "run"], default="delta-v")
    p.add_argument("--protocol", choices=["bb84", "six-state"], default="bb84")
    p.add_argument("--qber", type=probability, required=True, help="true error rate")
    p.add_argument("--m", type=count, default=1000, help="estimation sample size (delta-v mode)")
    p.add_argument("--trials", type=count, default=10**5)
    p.add_argument("--N", type=count, default=10**6, help="signals per run (run mode)")
    p.add_argument("--n", type=count, help="raw-key length (run mode; default optimised)")
    p.add_argument("--f", type=efficiency, default=1.2)
    p.add_argument("--d", type=count, default=2)
    p.add_argument("--n-pe", type=count, default=1)
    _eps_flags(p)
    p.add_argument("--seed", type=seed, default=0)
    _common(p)
    return parser


def load_config(path: str) -> dict[str, str]:
    """Option defaults from ``path``; values stay strings so flag types re-validate them."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith(("{", "[")):
        doc = json.loads(text)
        if isinstance(doc, list):
            doc = doc[0] if doc else {}
        items = doc.get("inputs", doc).items()
        return {k.replace("-", "_"): repr(v) if isinstance(v, float) else str(v)
                for k, v in items if v is not None}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    path = known.config or os.environ.get("FINIKEY_CONFIG")
    if path and argv and not argv[0].startswith("-"):
        sub = parser._subparsers._group_actions[0].choices.get(argv[0])
        if sub is not None:
            config = load_config(path)
            valid = {a.dest for a in sub._actions}
            unknown = sorted(set(config) - valid)
            if unknown:
                raise DomainError(f"unknown config keys for {argv[0]}: {', '.join(unknown)}")
            for action in sub._actions:
                if action.dest in config:
                    action.required = False
            sub.set_defaults(**config)
    return parser.parse_args(argv)


# -- commands -----------------------------------------------------------------

def _spec(args) -> ProtocolSpec:
    return ProtocolSpec(Protocol.parse(args.protocol), d=args.d, n_pe=args.n_pe)


def _check_qber(args, spec):
    if args.qber > spec.q_max:
        raise DomainError(f"--qber {args.qber} exceeds q_max={spec.q_max} for {spec.protocol.value}")


def _inputs(args, names) -> dict:
    return {name: getattr(args, name) for name in names}


def cmd_rate(args):
    spec = _spec(args)
    _check_qber(args, spec)
    n = args.n if args.n is not None else args.N // 2
    if not 1 <= n <= args.N - 1:
        raise DomainError(f"--n must lie in [1, N-1] = [1, {args.N - 1}], got {n}")
    try:
        budget = EpsilonBudget(args.eps_pa, args.eps_bar, args.eps_pe, args.eps_ec, args.n_pe)
    except ValueError as exc:
        raise DomainError(f"--eps-*: {exc}") from None
    res = key_length_at(args.N, n, args.qber, spec, budget, args.f, args.measured_leak)
    record = {"N": args.N, "n": n, **{k: getattr(res, k) for k in RESULT_FIELDS},
              "q_clamped": res.q_clamped, "imprecise_dv": res.imprecise_dv, "eps_total": budget.total}
    inputs = _inputs(args, ["protocol", "N", "n", "qber", "eps_pa", "eps_bar", "eps_pe", "eps_ec",
                            "f", "d", "n_pe", "measured_leak"])
    inputs["n"] = n
    return record, inputs


def _opt_record(N, opt):
    b = opt.best_budget
    return {"N": N, "n_opt": opt.best_n, "eps_pa": b.eps_pa, "eps_bar": b.eps_bar, "eps_pe": b.eps_pe,
            "eps_ec": b.eps_ec, "ell": opt.result.ell, "r_N": opt.result.r_N}


def cmd_optimize(args):
    spec = _spec(args)
    _check_qber(args, spec)
    if args.N < 2:
        raise DomainError("--N must be >= 2")
    opt = optimize_split(args.N, args.qber, args.eps_total, spec, args.f)
    record = _opt_record(args.N, opt)
    record.update({k: getattr(opt.result, k) for k in RESULT_FIELDS if k not in record})
    record["evaluations"] = opt.evaluations
    return record, _inputs(args, ["protocol", "N", "qber", "eps_total", "f", "d", "n_pe"])


def cmd_critical_n(args):
    spec = _spec(args)
    _check_qber(args, spec)
    r_inf = asymptotic_rate(spec, args.qber)
    if r_inf <= 0:
        raise DomainError(f"asymptotic rate at --qber {args.qber} is {r_inf:.6g} <= 0; no N yields a key")
    n_star = critical_n(args.qber, args.eps_total, spec, args.f, cap=args.cap)
    record = {"N_star": n_star, "found": n_star is not None, "cap": args.cap, "r_inf": r_inf}
    return record, _inputs(args, ["protocol", "qber", "eps_total", "f", "d", "n_pe", "cap"])


def cmd_scan(args):
    spec = _spec(args)
    _check_qber(args, spec)
    if args.n_min < 2 or args.n_max < args.n_min:
        raise DomainError("--n-min must be >= 2 and <= --n-max")
    grid = log_grid(args.n_min, args.n_max, args.points)
    rows = [_opt_record(N, opt) for N, opt in scan(spec, args.qber, args.eps_total, args.f, grid,
                                                   workers=args.workers)]
    return rows, _inputs(args, ["protocol", "qber", "eps_total", "f", "d", "n_pe", "n_min", "n_max", "points"])


def cmd_rapid(args):
    if args.N is not None:
        est = rapid_estimate(args.N)
        record = {"N": est.N, "delta_n_approx": est.delta_n_approx, "delta_v_approx": est.delta_v_approx,
                  "delta_n_exact": est.delta_n_exact, "delta_v_exact": est.delta_v_exact}
        return record, _inputs(args, ["N"]), [DELTA_N_FORMULA, DELTA_V_FORMULA]
    if args.case == 1:
        record = {"case": 1, "r_inf": args.r_inf, "N": case_study_1(args.r_inf)}
        return record, _inputs(args, ["case", "r_inf"]), [f"smallest N with r_inf - [{DELTA_N_FORMULA}] > 0"]
    if args.case == 2:
        record = {"case": 2, "target_dv": args.target_dv, "N": case_study_2(args.target_dv)}
        return record, _inputs(args, ["case", "target_dv"]), [f"smallest N with {DELTA_V_FORMULA} <= target"]
    raise DomainError("rapid needs --case {1,2} or --N")


def cmd_simulate(args):
    if args.mode == "delta-v":
        rep = validate_delta_v(TrialSpec(args.qber, args.m, args.trials, args.eps_pe, args.d, args.seed))
        record = {"q_true": args.qber, "m": args.m, "eps_pe": args.eps_pe, **rep.to_dict()}
        return record, _inputs(args, ["mode", "qber", "m", "trials", "eps_pe", "d", "seed"])
    spec = ProtocolSpec(Protocol.parse(args.protocol), d=args.d, n_pe=args.n_pe)
    _check_qber(args, spec)
    budget = EpsilonBudget(args.eps_pa, args.eps_bar, args.eps_pe, args.eps_ec, args.n_pe)
    res = simulate_run(args.N, args.qber, spec, budget, args.f, args.seed, n=args.n)
    record = {"N": args.N, **{k: getattr(res, k) for k in RESULT_FIELDS}}
    return record, _inputs(args, ["mode", "protocol", "qber", "N", "n", "f", "d", "n_pe", "eps_pa", "eps_bar",
                                  "eps_pe", "eps_ec", "seed"])


COMMANDS = {"rate": cmd_rate, "optimize": cmd_optimize, "critical-n": cmd_critical_n, "scan": cmd_scan,
            "rapid": cmd_rapid, "simulate": cmd_simulate}


# -- output -------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return "-"
    return str(value)


def write_output(fmt: str, payload, inputs: dict, notes: list[str], out: IO[str]) -> None:
    rows = payload if isinstance(payload, list) else [payload]
    if fmt == "json":
        if isinstance(payload, list):
            doc = [dict(row, inputs=inputs) for row in rows]
        else:
            doc = dict(payload, inputs=inputs)
        json.dump(doc, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        columns = SCAN_COLUMNS if isinstance(payload, list) else list(rows[0])
        writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    else:
        out.write("parameters: " + " ".join(f"{k}={_fmt(v)}" for k, v in inputs.items()) + "\n")
        if isinstance(payload, list):
            columns = SCAN_COLUMNS
            cells = [[_fmt(row[c]) for c in columns] for row in rows]
            widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(columns)]
            out.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)) + "\n")
            for r in cells:
                out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")
        else:
            width = max(len(k) for k in payload)
            for k, v in payload.items():
                out.write(f"{k.ljust(width)}  {_fmt(v)}\n")
        for note in notes:
            out.write(f"formula: {note}\n")


def run_command(args: argparse.Namespace, out: IO[str] = sys.stdout) -> int:
    """Dispatch a parsed request and write its result; returns the exit status."""
    produced = COMMANDS[args.command](args)
    payload, inputs = produced[0], produced[1]
    notes = produced[2] if len(produced) > 2 else []
    write_output(args.format, payload, inputs, notes, out)
    return 0


def main(argv: list[str] | None = None, out: IO[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    try:
        args = parse_args(argv)
        return run_command(args, out)
    except SystemExit as exc:
        return int(exc.code or 0)
    except OSError as exc:
        print(f"finikey: I/O error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, RuntimeError) as exc:
        print(f"finikey: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
