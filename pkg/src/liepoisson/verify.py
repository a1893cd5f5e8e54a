"""Verification suites behind the ``verify`` command.

Each check measures a defect and compares it against a tolerance; the report
is machine-readable and deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import partial

import numpy as np

from . import algebra as alg
from .algebra import load_algebra
from .config import RunConfig
from .dynamics import integrate_wong, invariant_report, wong_vector_field
from .errors import LiePoissonError, WeylWallSingularity
from .gauge import (
    curvature,
    curvature_field,
    expression_potential,
    gauge_map_from_exponents,
    gauge_transform_curvature,
    gauge_transformed_potential,
    hedgehog_potential,
    potential_from_spec,
    shifted_by_gradient,
    uniform_b_potential,
)
from .group import exp
from .poisson import (
    CoordinateFrame,
    InvariantFrame,
    bivector_bracket,
    hamiltonian_vector_field,
    jacobiator,
    lie_poisson_bracket,
    trivialized_covector,
    tstar_bivector_spec,
    tstar_g_bracket,
)
from .reduction import (
    CartanPoint,
    cartan_reduced_bracket,
    gauged_bracket,
    kernel_rank,
    omega_f_matrix,
    root_system,
    wong_state,
)


@dataclass
class CheckResult:
    name: str
    defect: float
    tolerance: float
    passed: bool
    note: str = ""


def _check(name, defect, tolerance, note=""):
    return CheckResult(name, float(defect), float(tolerance), bool(defect <= tolerance), note)


def _random_quadratic(rng, n, scale=0.5):
    a = rng.normal(size=n) * scale
    Q = rng.normal(size=(n, n)) * (scale / 2)

    def f(x):
        return float(a @ x + x @ Q @ x)

    return f


def _random_trace_field(rng, d, scale=0.5):
    M = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) * scale

    def phi(g):
        return float(np.real(np.trace(M @ g.matrix)))

    return phi


def _random_tstar_field(rng, L):
    fx = _random_quadratic(rng, L.dim)
    phi = _random_trace_field(rng, L.matrix_dim)

    def f(pt):
        return fx(pt.x) * (1.0 + 0.3 * phi(pt.g)) + phi(pt.g)

    return f


def _random_group_point(rng, L):
    return exp(L, rng.normal(size=L.dim) * 0.7)


def _random_wong_field(rng, n, dim):
    aq = rng.normal(size=n) * 0.5
    ap = rng.normal(size=n) * 0.5
    ai = rng.normal(size=dim) * 0.5
    Q = rng.normal(size=(n, n)) * 0.25

    def f(s):
        return float(aq @ s.q + ap @ s.p + ai @ s.I + s.p @ Q @ s.q + 0.2 * (s.I @ s.I))

    return f


# ---------------------------------------------------------------------------
# individual suites

def check_algebras(config: RunConfig):
    results = []
    try:
        load_algebra(config.algebra)
        results.append(_check("algebra_load_config", 0.0, 1.0))
    except LiePoissonError as exc:
        results.append(
            CheckResult("algebra_load_config", float("inf"), 1.0, False,
                        f"{type(exc).__name__}: {exc}")
        )
    for name in ("u1", "so3", "su2", "su3"):
        L = load_algebra(name)
        results.append(_check(f"algebra_jacobi_{name}", alg.jacobi_defect(L), 1e-12))
    for name in ("so3", "su2"):
        L = load_algebra(name)
        defect = np.max(np.abs(alg.killing_form(L) + 2 * np.eye(3)))
        results.append(_check(f"killing_{name}", defect, 1e-10))
    return results


def check_poisson_axioms(config: RunConfig, rng):
    results = []
    jac_tol = config.tolerances["jacobi_tol"]
    for name in ("so3", "su2"):
        L = load_algebra(name)
        eng = partial(lie_poisson_bracket, L)
        anti = leib = jac = cas = 0.0
        for _ in range(6):
            f = _random_quadratic(rng, L.dim)
            g = _random_quadratic(rng, L.dim)
            h = _random_quadratic(rng, L.dim)
            x = rng.normal(size=L.dim)
            anti = max(anti, abs(eng(f, g, x) + eng(g, f, x)))
            gh = lambda t, g=g, h=h: g(t) * h(t)
            leib = max(leib, abs(eng(f, gh, x) - g(x) * eng(f, h, x) - h(x) * eng(f, g, x)))
            jac = max(jac, abs(jacobiator(eng, f, g, h, x)))
            C = partial(alg.quadratic_casimir, L)
            cas = max(cas, abs(eng(C, f, x)))
        results.append(_check(f"lie_poisson_antisymmetry_{name}", anti, 1e-12))
        results.append(_check(f"lie_poisson_leibniz_{name}", leib, 5e-5))
        results.append(_check(f"lie_poisson_jacobi_{name}", jac, jac_tol))
        results.append(_check(f"lie_poisson_casimir_{name}", cas, 1e-6))

        teng = partial(tstar_g_bracket, L)
        spec = tstar_bivector_spec(L)
        tleib = tjac = equiv = 0.0
        for _ in range(5):
            f = _random_tstar_field(rng, L)
            g = _random_tstar_field(rng, L)
            h = _random_tstar_field(rng, L)
            pt = trivialized_covector(L, rng.normal(size=L.dim), _random_group_point(rng, L))
            gh = lambda t, g=g, h=h: g(t) * h(t)
            tleib = max(tleib, abs(teng(f, gh, pt) - g(pt) * teng(f, h, pt) - h(pt) * teng(f, g, pt)))
            tjac = max(tjac, abs(jacobiator(teng, f, g, h, pt)))
            equiv = max(equiv, abs(teng(f, g, pt) - bivector_bracket(spec, f, g, pt)))
        results.append(_check(f"tstar_leibniz_{name}", tleib, 5e-5))
        results.append(_check(f"tstar_jacobi_{name}", tjac, jac_tol))
        results.append(_check(f"engine_equivalence_{name}", equiv, 5e-5))
    return results


def check_gauge(config: RunConfig, rng):
    results = []
    so3 = load_algebra("so3")
    u1 = load_algebra("u1")
    q0 = rng.normal(size=2) * 0.5
    A = expression_potential(
        so3, 2,
        [[1, 1, "0.3*q1 + 0.1*q2**2"], [2, 2, "0.2*q2 - 0.4*q1*q2"], [3, 1, "0.15*q2"]],
    )
    s = gauge_map_from_exponents(so3, 2, ["0.4*q1 - 0.2*q2", "0.1*q1*q2", "0.3*q2"])
    lhs = curvature(so3, gauge_transformed_potential(so3, A, s), q0)
    rhs = gauge_transform_curvature(so3, curvature_field(so3, A), s, q0)
    results.append(_check("gauge_covariance_so3", np.max(np.abs(lhs - rhs)), 1e-6))

    Au = uniform_b_potential(u1, 1.3)
    Ashift = shifted_by_gradient(Au, "0.25*q1**2*q2 - 0.1*q2")
    gap = np.max(np.abs(curvature(u1, Ashift, q0) - curvature(u1, Au, q0)))
    results.append(_check("gauge_invariance_u1", gap, 1e-8))
    return results


def _su2_closed_form(R, f, g, pt, step=1e-5):
    """Independent evaluation of d/dp ^ L3 - (1/p) L1 ^ L2 in the (X2, X1, X3) frame."""
    L = R.algebra
    dp = CoordinateFrame("zh", 0, "dzh_1")
    L1 = InvariantFrame("left", np.array([0, 1, 0], dtype=complex), L, "T1")
    L2 = InvariantFrame("left", np.array([1, 0, 0], dtype=complex), L, "T2")
    L3 = InvariantFrame("left", np.array([0, 0, 1], dtype=complex), L, "T3")
    val = dp.apply(f, pt, step) * L3.apply(g, pt, step) - dp.apply(g, pt, step) * L3.apply(f, pt, step)
    val -= (1.0 / pt.zh[0]) * (
        L1.apply(f, pt, step) * L2.apply(g, pt, step)
        - L1.apply(g, pt, step) * L2.apply(f, pt, step)
    )
    return complex(val).real


def check_cartan(config: RunConfig, rng):
    results = []
    su2 = load_algebra("su2")
    R = root_system(su2)
    eng = partial(cartan_reduced_bracket, R)
    closed = 0.0
    for _ in range(6):
        pt = CartanPoint(g=_random_group_point(rng, su2), zh=np.array([rng.uniform(0.3, 3.0)]))
        f = _make_cartan_field(rng, su2)
        g = _make_cartan_field(rng, su2)
        closed = max(closed, abs(eng(f, g, pt) - _su2_closed_form(R, f, g, pt)))
    results.append(_check("cartan_closed_form_su2", closed, 5e-5))

    jac = 0.0
    for p in (0.1, 1.0, 10.0):
        pt = CartanPoint(g=_random_group_point(rng, su2), zh=np.array([p]))
        f, g, h = (_make_cartan_field(rng, su2) for _ in range(3))
        jac = max(jac, abs(jacobiator(eng, f, g, h, pt)))
    results.append(_check("cartan_jacobi_su2", jac, config.tolerances["jacobi_tol"]))

    try:
        pt0 = CartanPoint(g=_random_group_point(rng, su2), zh=np.array([0.0]))
        eng(lambda P: P.zh[0], lambda P: P.zh[0] ** 2, pt0)
        results.append(CheckResult("cartan_weyl_wall", float("inf"), 1.0, False,
                                   "no error raised at p = 0"))
    except WeylWallSingularity:
        results.append(_check("cartan_weyl_wall", 0.0, 1.0))
    return results


def _make_cartan_field(rng, L):
    phi = _random_trace_field(rng, L.matrix_dim)
    a = rng.normal() * 0.5
    b = rng.normal() * 0.3

    def f(pt):
        return phi(pt.g) * (1.0 + b * pt.zh[0]) + a * pt.zh[0] ** 2

    return f


def check_reduction(config: RunConfig, rng):
    results = []
    su2 = load_algebra("su2")
    rank_tol = config.tolerances["rank_tol"]
    zr = rng.normal(size=3)
    M = omega_f_matrix(su2, ["0", "0", "1"], zr)
    rank, kernel = kernel_rank(M, rank_tol)
    contain = 0.0
    for idx in (2, 3, 4, 5):   # L3 direction and the three fiber directions
        v = np.eye(6)[idx]
        contain = max(contain, np.linalg.norm(v - kernel @ (kernel.T @ v)))
    results.append(_check("reduction_rank_su2_constant", abs(rank - 2) + contain, 1e-9))
    rank_full, _ = kernel_rank(omega_f_matrix(su2, "identity", zr), rank_tol)
    results.append(_check("reduction_rank_su2_identity", abs(rank_full - 6), 0.5))
    return results


def check_dynamics(config: RunConfig, rng):
    results = []
    so3 = load_algebra("so3")
    A = hedgehog_potential(so3, 0.3)
    eng = partial(gauged_bracket, so3, A)
    coords = (
        [lambda s, a=a: s.q[a] for a in range(3)]
        + [lambda s, a=a: s.p[a] for a in range(3)]
        + [lambda s, a=a: s.I[a] for a in range(3)]
    )
    H = lambda s: 0.5 * float(s.p @ s.p)
    worst = 0.0
    for _ in range(4):
        st = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
        dq, dp, dI = wong_vector_field(so3, A, st)
        gamma = np.concatenate([dq, dp, dI])
        worst = max(worst, np.max(np.abs(gamma - hamiltonian_vector_field(eng, H, st, coords))))
    results.append(_check("wong_hamiltonian_consistency", worst, 5e-5))

    if config.potential is not None and config.initial_state is not None:
        try:
            L = load_algebra(config.algebra)
            pot = potential_from_spec(L, config.potential)
            s0 = wong_state(L, **config.initial_state)
            steps = min(config.steps, 2000)
            traj = integrate_wong(L, pot, s0, config.dt, steps)
            rep = invariant_report(traj, config.tolerances["drift_tol"],
                                   config.tolerances["drift_tol"])
            defect = max(rep.h_max_drift, rep.casimir_max_drift)
            results.append(_check("wong_drift", defect, config.tolerances["drift_tol"]))
        except LiePoissonError as exc:
            results.append(CheckResult("wong_drift", float("inf"), 1.0, False,
                                       f"{type(exc).__name__}: {exc}"))
    return results


def run_verification(config: RunConfig) -> dict:
    """Run every suite; the report records the seed and one entry per check."""
    rng = np.random.default_rng(config.seed)
    checks = []
    checks += check_algebras(config)
    checks += check_poisson_axioms(config, rng)
    checks += check_gauge(config, rng)
    checks += check_cartan(config, rng)
    checks += check_reduction(config, rng)
    checks += check_dynamics(config, rng)
    return {
        "seed": config.seed,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
    }
