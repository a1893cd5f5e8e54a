"""Command-line front end: verify, bracket, reduce, simulate, rootsys.

Exit codes are a stable contract: 0 success, 1 check/drift failure, 2 config
error, 3 numerical blow-up.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from functools import partial

import numpy as np

from .algebra import load_algebra
from .config import load_config
from .dynamics import integrate_wong, invariant_report, write_trajectory_csv
from .errors import (
    ConfigParseError,
    ExpressionParseError,
    LiePoissonError,
    NonFiniteValue,
    WeylWallSingularity,
)
from .fields import compile_expression, indexed_names, point_symbol_values
from .gauge import potential_from_spec
from .group import GroupElement, exp, group_element
from .poisson import lie_poisson_bracket, trivialized_covector, tstar_g_bracket
from .reduction import (
    CartanPoint,
    cartan_reduced_bracket,
    gauged_bracket,
    kernel_rank,
    momentum_map_from_exprs,
    omega_f_matrix,
    orbit_dimension,
    root_system,
    wong_state,
)
from .verify import run_verification

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_BLOWUP = 3


def matrix_to_json(m: np.ndarray):
    """Row-major nesting with complex entries as [re, im] pairs."""
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def _group_from_point(L, point) -> GroupElement:
    if "g_exp" in point:
        return exp(L, np.asarray(point["g_exp"], dtype=float))
    if "g" in point:
        return group_element(L, matrix_from_json(point["g"]))
    raise ConfigParseError("point needs a group slot: supply 'g_exp' or 'g'")


def _expr_field(src: str, names):
    ce = compile_expression(src, names)

    def f(pt):
        return ce.eval_map(point_symbol_values(pt)).real

    return f


# ---------------------------------------------------------------------------
# subcommands

def cmd_verify(config, args) -> int:
    report = run_verification(config)
    path = os.path.join(config.out_dir, "verify_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        note = f"  ({c['note']})" if c["note"] else ""
        print(f"[{status}] {c['name']}: defect {c['defect']:.3e} vs {c['tolerance']:.1e}{note}")
    print(f"report: {path}")
    print(f"seed: {report['seed']}  overall: {'PASS' if report['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILURE


def cmd_bracket(config, args) -> int:
    L = load_algebra(config.algebra)
    try:
        point = json.loads(args.point)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"bad point JSON: {exc}") from exc

    if args.engine == "lie_poisson":
        names = indexed_names("x", L.dim)
        fe = compile_expression(args.f, names)
        ge = compile_expression(args.g, names)
        x = np.asarray(point["x"], dtype=float)
        value = lie_poisson_bracket(
            L, lambda v: float(fe(v)), lambda v: float(ge(v)), x
        )
    elif args.engine == "tstar":
        names = indexed_names("x", L.dim) + ("gtrre", "gtrim")
        pt = trivialized_covector(
            L, np.asarray(point["x"], dtype=float), _group_from_point(L, point)
        )
        value = tstar_g_bracket(L, _expr_field(args.f, names), _expr_field(args.g, names), pt)
    elif args.engine == "gauged":
        pot = potential_from_spec(L, config.potential)
        s = wong_state(L, point["q"], point["p"], point["I"])
        n = len(s.q)
        names = indexed_names("q", n) + indexed_names("p", n) + indexed_names("I", L.dim)
        value = gauged_bracket(L, pot, _expr_field(args.f, names), _expr_field(args.g, names), s)
    elif args.engine == "cartan":
        R = root_system(L)
        zh = np.asarray(point["zh"], dtype=float)
        pt = CartanPoint(g=_group_from_point(L, point), zh=zh)
        names = indexed_names("zh", R.rank) + ("gtrre", "gtrim")
        value = cartan_reduced_bracket(
            R, _expr_field(args.f, names), _expr_field(args.g, names), pt
        )
    else:
        raise ConfigParseError(f"unknown engine {args.engine!r}")
    print(repr(float(value)))
    return EXIT_OK


def cmd_reduce(config, args) -> int:
    if config.f_spec is None:
        raise ConfigParseError("reduce needs an 'f_spec' entry in the config")
    L = load_algebra(config.algebra)
    f = momentum_map_from_exprs(L, config.f_spec)
    zr = np.array([0.3 + 0.1 * i for i in range(L.dim)])
    state = config.initial_state or {}
    if state.get("I") is not None and len(state["I"]) == L.dim:
        zr = np.asarray(state["I"], dtype=float)
    M = omega_f_matrix(L, f, zr)
    rank, kernel = kernel_rank(M, config.tolerances["rank_tol"])
    fv = np.asarray(f(zr), dtype=float)
    J = M[L.dim:, :L.dim]
    orbit_check = None
    if np.max(np.abs(J)) < 1e-12:    # constant momentum: compare with the orbit dimension
        odim = orbit_dimension(L, fv)
        orbit_check = {"orbit_dim": odim, "matches_rank": bool(odim == rank)}
    report = {
        "algebra": L.name,
        "zr": zr.tolist(),
        "rank": rank,
        "kernel_dim": int(kernel.shape[1]),
        "kernel_basis": kernel.tolist(),
        "orbit_dim_check": orbit_check,
    }
    path = os.path.join(config.out_dir, "reduce_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
    print(json.dumps({k: v for k, v in report.items() if k != "kernel_basis"}, indent=2))
    print(f"report: {path}")
    return EXIT_OK


def cmd_simulate(config, args) -> int:
    if config.initial_state is None:
        raise ConfigParseError("simulate needs an 'initial_state' entry in the config")
    if config.potential is None:
        raise ConfigParseError("simulate needs a 'potential' entry in the config")
    L = load_algebra(config.algebra)
    pot = potential_from_spec(L, config.potential)
    s0 = wong_state(L, **config.initial_state)
    traj = integrate_wong(L, pot, s0, config.dt, config.steps)
    path = os.path.join(config.out_dir, "trajectory.csv")
    write_trajectory_csv(traj, path)
    drift_tol = config.tolerances["drift_tol"]
    report = invariant_report(traj, drift_tol, drift_tol)
    print(f"trajectory: {path} ({len(traj)} samples{', ABORTED' if traj.aborted else ''})")
    print(
        f"H drift max {report.h_max_drift:.3e} mean {report.h_mean_drift:.3e}; "
        f"Casimir drift max {report.casimir_max_drift:.3e} mean {report.casimir_mean_drift:.3e}"
    )
    if traj.aborted:
        print("numerical blow-up: non-finite state reached; partial trajectory kept")
        return EXIT_BLOWUP
    if not report.passed:
        print(f"drift exceeds tolerance {drift_tol:.1e}")
        return EXIT_CHECK_FAILURE
    return EXIT_OK


def cmd_rootsys(config, args) -> int:
    L = load_algebra(args.algebra or config.algebra)
    R = root_system(L)
    report = {
        "algebra": L.name,
        "rank": R.rank,
        "cartan_indices": [i + 1 for i in R.cartan_indices],
        "positive_roots": [
            [[float(v.real), float(v.imag)] for v in row] for row in R.positive_roots
        ],
        "root_vectors": {
            f"alpha_{k + 1}": matrix_to_json(np.atleast_2d(R.root_vectors_pos[k]))[0]
            for k in range(R.n_positive)
        },
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liepoisson",
        description="Poisson structures on T*G and T*(R^n x G): verification, "
        "brackets, reductions, Wong dynamics.",
    )
    parser.add_argument("--config", help="path to a JSON run configuration")
    parser.add_argument("--seed", type=int, help="override the RNG seed")
    parser.add_argument("--out", help="output directory for reports and CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", help="run the verification suites").set_defaults(func=cmd_verify)

    pb = sub.add_parser("bracket", help="evaluate a Poisson bracket")
    pb.add_argument("--engine", required=True,
                    choices=["lie_poisson", "tstar", "gauged", "cartan"])
    pb.add_argument("--f", required=True, help="first field expression")
    pb.add_argument("--g", required=True, help="second field expression")
    pb.add_argument("--point", required=True, help="evaluation point as JSON")
    pb.set_defaults(func=cmd_bracket)

    sub.add_parser("reduce", help="omega_f rank/kernel report").set_defaults(func=cmd_reduce)

    sub.add_parser("simulate", help="integrate Wong's equations").set_defaults(func=cmd_simulate)

    pr = sub.add_parser("rootsys", help="print root-system data")
    pr.add_argument("--algebra", help="override the config algebra (su2 or su3)")
    pr.set_defaults(func=cmd_rootsys)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.out_dir = args.out
        os.makedirs(config.out_dir, exist_ok=True)
        return args.func(config, args)
    except (ConfigParseError, ExpressionParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except WeylWallSingularity as exc:
        print(f"Weyl wall: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    except NonFiniteValue as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except LiePoissonError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
