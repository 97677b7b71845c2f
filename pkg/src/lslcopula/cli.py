"""Command-line front end.

Every subcommand reads diagonals from JSON files (``-`` for stdin) and
writes JSON or CSV to ``--out`` (default stdout).  Exit codes: 0 success,
2 malformed input, 3 a diagonal failed membership validation, 4 an
iteration did not converge.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import concordance, diagonal, lsl, oracle
from .star import ITER_MAX, iterate_star, mo_star_diagonal
from .star import star as star_product
from ._io import csv_text, dumps
from .errors import InvalidInput, LSLError, MalformedKnots, NoConvergence

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_INVALID = 3
EXIT_NO_CONVERGENCE = 4

DEFAULT_GRID = 1025
DEFAULT_TOL = 1e-8
DEFAULT_SEED = 0


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    grid_n: int = DEFAULT_GRID
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    out: str | None = None
    oracle: bool = False


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load(path: str) -> diagonal.Diagonal:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        obj = json.loads(text)
    except OSError as exc:
        raise _Exit(EXIT_MALFORMED, f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_MALFORMED, f"{path}: invalid JSON: {exc}") from None
    try:
        return diagonal.from_dict(obj)
    except MalformedKnots as exc:
        raise _Exit(EXIT_MALFORMED, f"{path}: {exc}") from None


def _load_valid(path: str) -> diagonal.Diagonal:
    d = _load(path)
    rep = diagonal.validate_dlsl(d)
    if not rep.is_member:
        v = rep.violations[0]
        raise _Exit(EXIT_INVALID, f"{path}: not in D^LSL ({v.condition} fails at "
                                  f"x={v.x:.6g}: {v.lhs:.6g} vs {v.rhs:.6g})")
    return d


def _emit(cfg: RunConfig, text: str):
    if cfg.out is None or cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _unit(x, name, open_=False):
    x = float(x)
    ok = 0.0 < x < 1.0 if open_ else 0.0 <= x <= 1.0
    if not ok:
        raise _Exit(EXIT_MALFORMED, f"--{name} must lie in "
                                    f"{'(0, 1)' if open_ else '[0, 1]'}, got {x}")
    return x


# -- commands ---------------------------------------------------------------

def cmd_validate(cfg, args):
    d = _load(cfg.inputs[0])
    rep = diagonal.validate_dlsl(d, args.tol)
    _emit(cfg, dumps(rep.to_dict()))
    return EXIT_OK if rep.is_member else EXIT_INVALID


def cmd_eval(cfg, args):
    d = _load_valid(cfg.inputs[0])
    x = _unit(args.x, "x")
    out = {"x": x, "delta": float(d(x))}
    if args.y is not None:
        y = _unit(args.y, "y")
        out.update(y=y, value=float(lsl.surface(d, x, y)))
    _emit(cfg, dumps(out))
    return EXIT_OK


def cmd_kernel(cfg, args):
    d = _load_valid(cfg.inputs[0])
    x = _unit(args.x, "x", open_=True)
    y = np.linspace(0.0, 1.0, cfg.grid_n)
    k = lsl.kernel_cdf(d, x, y)
    _emit(cfg, csv_text(["y", "K"], zip(y, k)))
    return EXIT_OK


def cmd_measures(cfg, args):
    d = _load_valid(cfg.inputs[0])
    out = concordance.report(d).to_dict()
    if cfg.oracle:
        n = args.oracle_n
        out["oracle"] = {"n": n, "tau": oracle.tau_quadrature(d, n),
                         "rho": oracle.rho_quadrature(d, n)}
    _emit(cfg, dumps(out))
    return EXIT_OK


def cmd_star(cfg, args):
    d1, d2 = _load_valid(cfg.inputs[0]), _load_valid(cfg.inputs[1])
    res = star_product(d1, d2, cfg.grid_n)
    out = res.to_dict()
    if cfg.oracle:
        n = args.oracle_n
        cb = oracle.checkerboard_compose(oracle.checkerboard(d1, n),
                                         oracle.checkerboard(d2, n))
        g = np.linspace(0.0, 1.0, n + 1)
        out["oracle"] = {"n": n, "checkerboard_sup_diff": float(
            np.max(np.abs(cb.diagonal_at_nodes() - res.product(g))))}
    _emit(cfg, dumps(out))
    return EXIT_OK


def cmd_iterate(cfg, args):
    d = _load_valid(cfg.inputs[0])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NoConvergence)
        tr = iterate_star(d, cfg.tol, args.max_iter, cfg.grid_n,
                          keep_iterates=False, scheme=args.scheme)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text(["n", "sup_delta"],
                              ((i + 1, v) for i, v in enumerate(tr.sup_deltas))))
    out = {"converged": tr.converged, "iterations": tr.n_iter,
           "fitted_a": tr.fitted_a, "limit": tr.limit.to_dict()}
    _emit(cfg, dumps(out))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return EXIT_OK if tr.converged else EXIT_NO_CONVERGENCE


def cmd_sample(cfg, args):
    d = _load_valid(cfg.inputs[0])
    if args.n < 1:
        raise _Exit(EXIT_MALFORMED, "--n must be positive")
    b = lsl.sample(d, args.n, cfg.seed)
    _emit(cfg, csv_text(["u", "v"], b.points))
    return EXIT_OK


def cmd_region(cfg, args):
    fams = tuple(f.strip() for f in args.families.split(",") if f.strip())
    try:
        pts = concordance.region_scan(args.n, cfg.seed, fams)
    except ValueError as exc:
        raise _Exit(EXIT_MALFORMED, str(exc)) from None
    _emit(cfg, csv_text(["tau", "rho", "source"],
                        ((p.tau, p.rho, p.source) for p in pts)))
    s = concordance.summarize_region(pts)
    print(f"points={s.n} tau>rho={s.lower_violations} "
          f"above_conjectured_upper={s.upper_violations}", file=sys.stderr)
    return EXIT_OK


def cmd_mo(cfg, args):
    d = mo_star_diagonal(_unit(args.alpha, "alpha"), _unit(args.beta, "beta"))
    _emit(cfg, dumps(d.to_dict()))
    return EXIT_OK


def cmd_si(cfg, args):
    d = _load_valid(cfg.inputs[0])
    prof = lsl.si_profile(d, _unit(args.y, "y", open_=True), cfg.grid_n)
    _emit(cfg, csv_text(["x", "K"], zip(prof.x, prof.k)))
    print(f"increasing stretches: {len(prof.increasing)}", file=sys.stderr)
    return EXIT_OK


def cmd_dependence(cfg, args):
    d = _load_valid(cfg.inputs[0])
    n = min(cfg.grid_n, 1025)
    out = {"pqd": lsl.check_pqd(d, n).to_dict(), "ltd": lsl.check_ltd(d, n).to_dict()}
    _emit(cfg, dumps(out))
    return EXIT_OK


FIGURE_KERNEL_X = (0.2, 0.4, 0.6, 0.8)


def cmd_figures(cfg, args):
    """Plot-ready CSV data: (tau, rho) region, kernels and sample clouds."""
    outdir = cfg.out or "figures"
    os.makedirs(outdir, exist_ok=True)

    def write(name, text):
        with open(os.path.join(outdir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    pts = concordance.region_scan(args.n, cfg.seed, concordance.FAMILIES)
    write("region.csv", csv_text(["tau", "rho", "source"],
                                 ((p.tau, p.rho, p.source) for p in pts)))
    y = np.linspace(0.0, 1.0, cfg.grid_n)
    rows = []
    for name, d in (("si_example", diagonal.si_counterexample()),
                    ("u_half", diagonal.upper_u(0.5)), ("l_half", diagonal.lower_l(0.5))):
        for x in FIGURE_KERNEL_X:
            rows.extend((name, x, yy, k) for yy, k in zip(y, lsl.kernel_cdf(d, x, y)))
    write("kernels.csv", csv_text(["diagonal", "x", "y", "K"], rows))
    for name, d in (("u_half", diagonal.upper_u(0.5)), ("l_half", diagonal.lower_l(0.5))):
        b = lsl.sample(d, args.samples, cfg.seed)
        write(f"samples_{name}.csv", csv_text(["u", "v"], b.points))
    print(f"wrote region.csv, kernels.csv and sample files to {outdir}", file=sys.stderr)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=DEFAULT_GRID, help="grid size")
    common.add_argument("--tol", type=float, default=None, help="tolerance")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--oracle", action="store_true",
                        help="also run the brute-force reference computation")
    common.add_argument("--oracle-n", type=int, default=512,
                        help="oracle resolution")

    p = argparse.ArgumentParser(prog="lslcopula", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, inputs=1):
        sp = sub.add_parser(name, parents=[common], help=help)
        if inputs:
            sp.add_argument("diagonal", nargs=inputs, help="diagonal JSON file")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check membership in D^LSL")
    sp = add("eval", cmd_eval, "diagonal and copula value")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float)
    sp = add("kernel", cmd_kernel, "CSV of y -> K(x, [0, y])")
    sp.add_argument("--x", type=float, required=True)
    add("measures", cmd_measures, "concordance measures as JSON")
    add("star", cmd_star, "star product of two diagonals", inputs=2)
    sp = add("iterate", cmd_iterate, "star powers until convergence")
    sp.add_argument("--max-iter", type=int, default=ITER_MAX)
    sp.add_argument("--trace", default=None, help="write n,sup_delta CSV here")
    sp.add_argument("--scheme", choices=("squaring", "linear"), default="squaring")
    sp = add("sample", cmd_sample, "sample CSV")
    sp.add_argument("--n", type=int, default=1000)
    sp = add("region", cmd_region, "(tau, rho) region scan CSV", inputs=0)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--families", default="random",
                    help="comma list of " + ",".join(concordance.FAMILIES))
    sp = add("mo", cmd_mo, "diagonal from two Marshall-Olkin copulas", inputs=0)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp = add("si", cmd_si, "x -> K(x, [0, y]) profile CSV")
    sp.add_argument("--y", type=float, required=True)
    add("dependence", cmd_dependence, "PQD and LTD checks as JSON")
    sp = add("figures", cmd_figures, "write figure CSV data into --out DIR", inputs=0)
    sp.add_argument("--n", type=int, default=500, help="region points per family")
    sp.add_argument("--samples", type=int, default=2000, help="points per sample cloud")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        inputs=list(getattr(args, "diagonal", None) or []),
        grid_n=args.grid,
        tol=DEFAULT_TOL if args.tol is None else args.tol,
        seed=args.seed,
        out=args.out,
        oracle=args.oracle,
    )
    if cfg.grid_n < 2:
        print("error: --grid must be at least 2", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return args.func(cfg, args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except LSLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
