"""Command line entry point: simulate, experiment, constants, check."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import harness, lemmas
from .asymptotics import HypothesisViolation, gamma_self_check, theorem_targets
from .cell import UnboundedCell, build_cell
from .directional import DistributionError, parse_distribution
from .geometry import BodyError, parse_body
from .hull import DegenerateHull
from .lp import LPError
from .process import ConfigError, ProcessConfig, rng_stream

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x: float) -> str:
    return f"{x:.12g}"


def _model(args):
    body = parse_body(args.body, args.d)
    dist = parse_distribution(args.dist, args.d)
    return body, dist


def cmd_simulate(args, out) -> int:
    body, dist = _model(args)
    if args.intensity < 1:
        raise UsageError("intensity must be a positive integer")
    cfg = ProcessConfig(args.intensity, body, dist, master_seed=args.seed, sampler=args.sampler)
    cell = build_cell(cfg, rng_stream(args.seed, 0, 0))
    lines = [f"dimension {cell.dim}", f"window {_num(cell.window)}", f"truncated {str(cell.truncated).lower()}",
             f"heuristic_window {str(cell.heuristic_window).lower()}", f"facets {cell.n_facets}",
             f"halfspaces {len(cell.offsets)}"]
    for u, t, flag in zip(cell.normals, cell.offsets, cell.facet_flags):
        lines.append(" ".join(_num(c) for c in u) + f" {_num(t)} {int(flag)}")
    if cell.vertices is not None:
        lines.append(f"vertices {len(cell.vertices)}")
        lines += [" ".join(_num(c) for c in v) for v in cell.vertices]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _fmt_fit(fit) -> str:
    if fit is None:
        return "n/a"
    slope, se, _ = fit
    return f"{slope:.4f} +/- {se:.4f}"


def cmd_experiment(args, out) -> int:
    body, dist = _model(args)
    cfg = harness.ExperimentConfig(args.theorem, body, dist, harness.parse_grid(args.n_grid), args.reps, args.seed,
                                   args.out, args.quad_nodes, args.workers)
    res = harness.run_experiment(cfg)
    if not args.out:
        out.write(res.to_csv())
    for key, val in res.analysis.items():
        if isinstance(val, tuple):
            out.write(f"# {key} {_fmt_fit(val)}\n")
        elif isinstance(val, float):
            label = " (heuristic)" if key.startswith("richardson") else ""
            out.write(f"# {key} {_num(val)}{label}\n")
        elif isinstance(val, list):
            for item in val:
                out.write(f"# {key} {item}\n")
    return EXIT_OK


def cmd_constants(args, out) -> int:
    gamma_self_check()
    body, dist = _model(args)
    t = theorem_targets(body, dist, args.d, args.r, args.quad_nodes)
    for k, v in t.items():
        out.write(f"{k} = {_num(v) if isinstance(v, float) else v}\n")
    if args.csv:
        keys = [k for k, _ in t.items()]
        out.write(",".join(keys) + "\n")
        out.write(",".join(_num(v) if isinstance(v, float) else str(v) for _, v in t.items()) + "\n")
    return EXIT_OK


def _check_poisson_tail(args, out) -> bool:
    ok = True
    for lam in args.lambdas:
        r = lemmas.poisson_tail_bound_check(lam)
        ok &= r.violations == 0
        out.write(f"lambda={lam:g} points={r.checked} violations={r.violations} "
                  f"min_log_margin={r.worst_margin:.4g}\n")
    c = lemmas.concentration_check(tuple(args.lambdas))
    out.write("deviation " + " ".join(f"{p:.4e}" for p in c.probabilities) + f" decreasing={c.decreasing}\n")
    return ok and c.decreasing


MIXING_DEFAULTS = {"a": (2.0 / 3.0, 1e4, 0.01), "b": (1.0, 1e5, 0.05), "growing": (1.0 / 3.0, 1e4, 0.01)}


def _check_poisson_mixing(args, out) -> bool:
    ok = True
    cases = [args.case] if args.case else list(MIXING_DEFAULTS)
    for case in cases:
        param, lam, tol = MIXING_DEFAULTS[case]
        if args.param is not None:
            param = args.param
        lams = args.lambdas if args.lambdas_given else [lam]
        for r in lemmas.poisson_mixing_check(case, param, lams):
            good = r.deviation + r.error_budget <= tol
            ok &= good
            out.write(f"case={case} param={param:.6g} lambda={r.lam:g} value={r.value:.10f} "
                      f"budget={r.error_budget:.2e} tol={tol} pass={good}\n")
    return ok


def cmd_check(args, out) -> int:
    suite = args.suite
    if suite == "poisson-tail":
        ok = _check_poisson_tail(args, out)
    elif suite == "poisson-mixing":
        ok = _check_poisson_mixing(args, out)
    else:
        body, dist = _model(args)
        if suite == "efron":
            r = harness.efron_check(body, dist, args.n, args.reps, args.seed, args.workers)
            out.write(f"{r}\n")
            ok = r.passed
        elif suite == "lemma41":
            r = harness.lemma41_check(body, dist, args.n, args.reps, args.seed, args.workers)
            out.write(f"n={r.n:g} replicates={r.replicates} lhs={r.lhs:.6g}\n")
            out.write(f"stated bound (2n)^2/2 E[dPhi^2]={r.rhs_stated:.6g} se={r.se_stated:.4g} "
                      f"holds={r.passed_stated}\n")
            out.write(f"ordered-tuple bound (2n)^2 E[dPhi^2]={r.rhs_ordered:.6g} se={r.se_ordered:.4g} "
                      f"holds={r.passed_ordered}\n")
            ok = r.passed_stated
        else:
            ns = args.tail_n or [args.n]
            reports = [harness.tail_estimate(body, dist, n, args.reps, tuple(args.x_grid), args.seed,
                                             workers=args.workers, exp_id=j) for j, n in enumerate(ns)]
            ok = True
            for r in reports:
                for c in r.factors:
                    s = r.slope[c]
                    out.write(f"n={r.n:g} c={c:g} slope={s:.4f} {r.note[c]}\n".rstrip() + "\n")
                    if math.isfinite(s):
                        ok &= s < 0
                    else:
                        ok &= bool(np.all(r.prob[c] == 0))
            for a, b in zip(reports, reports[1:]):
                for c in a.factors:
                    ex, se, good = harness.tail_doubling(a, b, 0.5, c)
                    out.write(f"doubling n={a.n:g}->{b.n:g} c={c:g} excess={ex:.5f} se={se:.5f} pass={good}\n")
                    ok &= good
    out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kcell", description="K-cells of Poisson hyperplane processes")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model(sp, required=True):
        sp.add_argument("--d", type=int, required=required, default=2)
        sp.add_argument("--body", required=required, default="ball:1")
        sp.add_argument("--dist", required=required, default="isotropic")

    s = sub.add_parser("simulate", help="build one cell and print it")
    model(s)
    s.add_argument("--intensity", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--sampler", choices=("window", "shell"), default="window")

    e = sub.add_parser("experiment", help="Monte Carlo over an intensity grid")
    e.add_argument("--theorem", required=True, choices=harness.THEOREM_TAGS)
    model(e)
    e.add_argument("--n-grid", required=True)
    e.add_argument("--reps", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--quad-nodes", type=int)

    c = sub.add_parser("constants", help="print limit constants")
    model(c)
    c.add_argument("--r", type=int)
    c.add_argument("--csv", action="store_true")
    c.add_argument("--quad-nodes", type=int)

    k = sub.add_parser("check", help="run a verification suite")
    k.add_argument("--suite", required=True, choices=("efron", "lemma41", "poisson-tail", "poisson-mixing", "tail"))
    k.add_argument("--seed", type=int, default=0)
    model(k, required=False)
    k.add_argument("--n", type=float, default=100)
    k.add_argument("--reps", type=int, default=10_000)
    k.add_argument("--workers", type=int, default=1)
    k.add_argument("--lambdas", type=float, nargs="+")
    k.add_argument("--case", choices=tuple(MIXING_DEFAULTS))
    k.add_argument("--param", type=float)
    k.add_argument("--tail-n", type=float, nargs="+")
    k.add_argument("--x-grid", type=float, nargs="+", default=list(harness.DEFAULT_X_GRID))
    return p


COMMANDS = {"simulate": cmd_simulate, "experiment": cmd_experiment, "constants": cmd_constants, "check": cmd_check}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.command == "check":
        args.lambdas_given = args.lambdas is not None
        if args.lambdas is None:
            args.lambdas = [10.0, 100.0, 1000.0]
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ConfigError, BodyError, DistributionError, HypothesisViolation) as exc:
        sys.stderr.write(f"kcell: {exc}\n")
        return EXIT_USAGE
    except (LPError, ArithmeticError, DegenerateHull, UnboundedCell, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"kcell: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
