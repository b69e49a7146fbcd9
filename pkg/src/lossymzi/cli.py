"""Command-line front end: single evaluations, figure data tables, and validation.

Every command emits rows with the same columns (see ``COLUMNS``). Phases are
in radians; every other column is dimensionless. Diverging quantities are
written as ``inf``.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import fock, symplectic as sp
from .errors import DomainError, TruncationError
from .optimizer import (
    classical_limit,
    default_n_grid,
    model_of,
    optimal_photon_number,
    single_shot_error,
)
from .parity import delta_phi, parity_expectation_closed, parity_expectation_matrix
from .qfi import LossyMziConfig, qfi_closed, qfi_fidelity

COLUMNS = (
    "model",
    "n",
    "r",
    "eta1",
    "eta2",
    "phi",
    "N",
    "f_q",
    "quantum_limit",
    "delta_phi",
    "delta_phi_repeated",
    "phi_opt",
    "parity_expectation",
    "sql",
    "modified_hl",
    "classical_limit",
    "quantum_limit_repeated",
    "classical_limit_repeated",
)
VALIDATE_COLUMNS = ("check", "points", "max_error", "tolerance", "passed")

FIGURES = {
    "fig2_left": "QFI limits vs n in [0.1, 100] at eta = 0.8 (two-arm and one-arm)",
    "fig2_right": "QFI and classical limits vs eta in [0.05, 1] at fixed n (default 10)",
    "fig3_left": "phi_o on a 20 x 20 grid n in [1, 100], eta in [0.9, 0.999], one-arm",
    "fig3_right": "parity error at phi_o vs n in [0.1, 100], one-arm, eta default 0.99",
    "fig4": "repeated-experiment error vs n in [0.1, N], one-arm, N default 200, "
    "eta default {0.99, 0.98, 0.97, 0.96}",
}


class UsageError(Exception):
    pass


def point_record(n, eta1, eta2, phi=None, total=None, model=None):
    """All output columns for one configuration.

    ``phi = None`` evaluates at the optimal working point. ``total`` defaults to
    ``n`` (one shot).
    """
    total = n if total is None else total
    if total < n:
        raise DomainError(f"need n <= N, got n={n}, N={total}")
    phi_o, d_opt = single_shot_error(n, eta1, eta2)
    phi = phi_o if phi is None else phi
    cfg = LossyMziConfig(n, eta1, eta2, phi)
    f_q = qfi_closed(cfg).f_q
    reps = math.sqrt(total / n)
    ql = 1.0 / math.sqrt(f_q) if f_q > 0 else math.inf
    cl = classical_limit(n, eta1, eta2)
    return {
        "model": model or model_of(eta1, eta2),
        "n": n,
        "r": cfg.r,
        "eta1": eta1,
        "eta2": eta2,
        "phi": phi,
        "N": total,
        "f_q": f_q,
        "quantum_limit": ql,
        "delta_phi": delta_phi(n, eta1, eta2, phi),
        "delta_phi_repeated": d_opt / reps,
        "phi_opt": phi_o,
        "parity_expectation": parity_expectation_closed(cfg).expectation,
        "sql": 1.0 / math.sqrt(n),
        "modified_hl": 1.0 / math.sqrt(n * (n + 2.0)),
        "classical_limit": cl,
        "quantum_limit_repeated": ql / reps,
        "classical_limit_repeated": cl / reps,
    }


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            raise ValueError("NaN reached the output")
        return repr(value)
    return str(value)


def render(rows, columns, fmt):
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    else:
        for row in rows:
            out = {}
            for c in columns:
                v = row[c]
                if isinstance(v, (float, np.floating)):
                    v = "inf" if math.isinf(v) else float(v)
                elif isinstance(v, np.bool_):
                    v = bool(v)
                out[c] = v
            buf.write(json.dumps(out) + "\n")
    return buf.getvalue()


def _resolve_n(args):
    if args.r is not None:
        if args.r < 0:
            raise UsageError("--r must be >= 0")
        return sp.photons_from_squeeze(args.r)
    return args.n


def _resolve_etas(args):
    model = args.model
    if args.eta is not None:
        model = model or "two-arm"
        if args.eta1 is not None or args.eta2 is not None:
            raise UsageError("--eta cannot be combined with --eta1/--eta2")
        if model == "general":
            raise UsageError("--eta needs --model two-arm or one-arm")
        if model == "one-arm":
            return args.eta, 1.0
        return args.eta, args.eta
    eta1 = 1.0 if args.eta1 is None else args.eta1
    eta2 = 1.0 if args.eta2 is None else args.eta2
    if model == "two-arm" and eta1 != eta2:
        raise UsageError("--model two-arm needs eta1 == eta2")
    if model == "one-arm" and eta2 != 1.0:
        raise UsageError("--model one-arm needs eta2 == 1")
    return eta1, eta2


def _need_n(args):
    n = _resolve_n(args)
    if n is None:
        raise UsageError("give --n or --r")
    if not n > 0:
        raise DomainError(f"n must be > 0, got {n}")
    return n


def cmd_qfi(args):
    eta1, eta2 = _resolve_etas(args)
    return [point_record(_need_n(args), eta1, eta2, args.phi, args.N)], COLUMNS


cmd_parity = cmd_qfi


def cmd_optimize(args):
    eta1, eta2 = _resolve_etas(args)
    n = _resolve_n(args)
    if n is None:
        if args.N is None:
            raise UsageError("optimize needs --n/--r or --N")
        best = optimal_photon_number(args.N, eta1, eta2)
        if not best.interior:
            print("note: no interior optimum on the photon-number grid", file=sys.stderr)
        n = best.n_opt
    elif not n > 0:
        raise DomainError(f"n must be > 0, got {n}")
    return [point_record(n, eta1, eta2, None, args.N)], COLUMNS


def _figure_rows(args):
    fig = args.id
    pts = args.points
    if fig == "fig2_left":
        eta = 0.8 if args.eta is None else args.eta
        rows = []
        for model, (e1, e2) in (("two_arm", (eta, eta)), ("one_arm", (eta, 1.0))):
            rows += [point_record(n, e1, e2, model=model) for n in np.geomspace(0.1, 100, pts or 61)]
        return rows
    if fig == "fig2_right":
        n = _resolve_n(args) or 10.0
        rows = []
        etas = np.linspace(0.05, 1.0, pts or 96)
        for model in ("two_arm", "one_arm"):
            for eta in etas:
                e2 = eta if model == "two_arm" else 1.0
                rows.append(point_record(n, eta, e2, model=model))
        return rows
    if fig == "fig3_left":
        k = pts or 20
        return [
            point_record(n, eta, 1.0, model="one_arm")
            for eta in np.linspace(0.9, 0.999, k)
            for n in np.linspace(1.0, 100.0, k)
        ]
    if fig == "fig3_right":
        eta = 0.99 if args.eta is None else args.eta
        return [point_record(n, eta, 1.0, model="one_arm") for n in np.geomspace(0.1, 100, pts or 61)]
    if fig == "fig4":
        total = 200.0 if args.N is None else args.N
        etas = (0.99, 0.98, 0.97, 0.96) if args.eta is None else (args.eta,)
        grid = default_n_grid(total) if pts is None else np.geomspace(0.1, total, pts)
        return [point_record(n, eta, 1.0, None, total, "one_arm") for eta in etas for n in grid]
    raise UsageError(f"unknown figure {fig!r}")


def cmd_figure(args):
    return _figure_rows(args), COLUMNS


def validation_checks(grid, seed):
    """Cross-route agreement checks on ``grid`` random points drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, errors, tol):
        errors = np.asarray(errors, dtype=float)
        worst = float(errors.max()) if errors.size else 0.0
        checks.append(
            {"check": name, "points": int(errors.size), "max_error": worst,
             "tolerance": tol, "passed": bool(worst <= tol)}
        )

    n = rng.uniform(0.1, 20.0, grid)
    e1 = rng.uniform(0.3, 0.99, grid)
    e2 = rng.uniform(0.3, 0.99, grid)
    phi = rng.uniform(0.05, np.pi / 2 - 0.05, grid)
    cfgs = [LossyMziConfig(*p) for p in zip(n, e1, e2, phi)]

    add("qfi_fidelity_vs_closed",
        [abs(qfi_fidelity(c).f_q / qfi_closed(c).f_q - 1.0) for c in cfgs], 1e-4)
    add("parity_matrix_vs_closed",
        [abs(parity_expectation_matrix(c).expectation - parity_expectation_closed(c).expectation)
         for c in cfgs], 1e-9)
    add("cramer_rao_margin",
        [max(qfi_closed(c).quantum_limit - single_shot_error(c.n, c.eta1, c.eta2)[1], 0.0)
         for c in cfgs], 1e-12)

    k = min(grid, 3)
    small = [LossyMziConfig(float(a), float(b), float(c), float(d)) for a, b, c, d in
             zip(rng.uniform(0.2, 2.0, k), rng.uniform(0.5, 0.99, k),
                 rng.uniform(0.5, 1.0, k), rng.uniform(0.1, 1.4, k))]
    add("qfi_fock_vs_closed",
        [abs(fock.qfi_fock(c.r, c.eta1, c.eta2, c.phi) / qfi_closed(c).f_q - 1.0) for c in small],
        1e-5)
    add("parity_fock_vs_closed",
        [abs(fock.mzi_parity_fock(c.r, c.eta1, c.eta2, c.phi)
             - parity_expectation_closed(c).expectation) for c in small], 1e-6)
    errs = []
    for c in small:
        state = fock.lossy_tmsv_fock(c.r, c.eta1, c.eta2, c.phi, fock.cutoff_for(c.r))
        errs.append(np.abs(fock.covariance_fock(state)
                           - sp.lossy_tmsv_covariance(c.r, c.eta1, c.eta2, c.phi)).max())
    add("covariance_fock_vs_closed", errs, 1e-8)
    return checks


def cmd_validate(args):
    if args.grid < 1:
        raise UsageError("--grid must be >= 1")
    return validation_checks(args.grid, args.seed), VALIDATE_COLUMNS


def _common(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--n", type=float, help="mean photon number of the probe")
    src.add_argument("--r", type=float, help="squeeze parameter (n = 2 sinh^2 r)")
    p.add_argument("--eta1", type=float, help="transmissivity of the phase arm (default 1)")
    p.add_argument("--eta2", type=float, help="transmissivity of the reference arm (default 1)")
    p.add_argument("--eta", type=float, help="shorthand: both arms (two-arm) or arm 1 (one-arm)")
    p.add_argument("--phi", type=float, help="phase in radians (default: optimal point)")
    p.add_argument("--N", type=float, help="total photon budget over repetitions")
    p.add_argument("--model", choices=("two-arm", "one-arm", "general"),
                   help="loss model; with --eta defaults to two-arm")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="random seed (validate)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lossymzi",
        description="Phase estimation with a two-mode squeezed vacuum in a lossy interferometer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("qfi", cmd_qfi, "evaluate one configuration"),
        ("parity", cmd_parity, "evaluate one configuration (same columns as qfi)"),
        ("optimize", cmd_optimize, "optimal phase, or optimal n under --N"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=func)
    p = sub.add_parser(
        "figure",
        help="data table for a figure",
        description="\n".join(f"{k}: {v}" for k, v in FIGURES.items()),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("id", choices=sorted(FIGURES))
    p.add_argument("--points", type=int, help="override the number of sweep points")
    _common(p)
    p.set_defaults(func=cmd_figure)
    p = sub.add_parser("validate", help="cross-check independent routes; exit 1 on failure")
    p.add_argument("--grid", type=int, default=100)
    _common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "figure" and args.points is not None and args.points < 2:
        parser.error("--points must be >= 2")
    try:
        rows, columns = args.func(args)
    except (UsageError, DomainError) as exc:
        parser.error(str(exc))
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = render(rows, columns, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "validate" and not all(c["passed"] for c in rows):
        for c in rows:
            if not c["passed"]:
                print(f"FAILED {c['check']}: {c['max_error']:.3e} > {c['tolerance']:.1e}",
                      file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
