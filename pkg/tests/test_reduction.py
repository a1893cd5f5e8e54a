import itertools
from functools import partial

import numpy as np
import pytest

from liepoisson.algebra import bracket_vectors, killing_form, load_algebra, quadratic_casimir
from liepoisson.errors import (
    OffOrbit,
    SingularKillingForm,
    UnsupportedAlgebra,
    WeylWallSingularity,
)
from liepoisson.gauge import (
    constant_potential,
    expression_potential,
    hedgehog_potential,
    uniform_b_potential,
    zero_potential,
    curvature,
)
from liepoisson.group import exp, identity
from liepoisson.poisson import (
    CoordinateFrame,
    InvariantFrame,
    jacobiator,
    lie_poisson_bracket,
)
from liepoisson.reduction import (
    CartanGaugedPoint,
    CartanPoint,
    RootSystemData,
    cartan_gauged_bracket,
    cartan_reduced_bracket,
    coadjoint_orbit_bracket,
    gauged_bracket,
    kernel_rank,
    momentum_map_from_exprs,
    omega_f_matrix,
    orbit_dimension,
    root_system,
    wong_state,
)


def random_group(L, rng, scale=0.7):
    return exp(L, rng.normal(size=L.dim) * scale)


def trace_part(M, g):
    return float(np.real(np.trace(M @ g.matrix)))


def cartan_field(rng, L):
    M = (rng.normal(size=(L.matrix_dim, L.matrix_dim))
         + 1j * rng.normal(size=(L.matrix_dim, L.matrix_dim))) * 0.5
    a, b = rng.normal() * 0.5, rng.normal() * 0.3
    return lambda P: trace_part(M, P.g) * (1.0 + b * P.zh[0]) + a * P.zh[0] ** 2


# --- omega_f and kernels -----------------------------------------------------

def test_omega_f_identity_momentum_full_rank(su2, rng):
    M = omega_f_matrix(su2, "identity", rng.normal(size=3))
    rank, kernel = kernel_rank(M)
    assert rank == 6 and kernel.shape[1] == 0
    # J block is the identity for f_i = zr_i
    assert np.allclose(M[3:, :3], np.eye(3), atol=1e-9)


def test_omega_f_zero_momentum(su2, rng):
    rank, kernel = kernel_rank(omega_f_matrix(su2, ["0", "0", "0"], rng.normal(size=3)))
    assert rank == 0 and kernel.shape[1] == 6


def test_omega_f_su2_spinning_particle(su2, rng):
    # constant f = lambda xi_3: rank 2, kernel holds L3 and all fiber directions
    lam = 1.0
    M = omega_f_matrix(su2, ["0", "0", f"{lam}"], rng.normal(size=3))
    rank, kernel = kernel_rank(M)
    assert rank == 2
    assert rank % 2 == 0
    for idx in (2, 3, 4, 5):
        v = np.eye(6)[idx]
        assert np.linalg.norm(v - kernel @ (kernel.T @ v)) < 1e-9
    # the L1, L2 directions are not in the kernel
    for idx in (0, 1):
        v = np.eye(6)[idx]
        assert np.linalg.norm(v - kernel @ (kernel.T @ v)) > 0.9


def test_omega_f_matches_spec_blocks(su2, rng):
    zr = rng.normal(size=3)
    f = momentum_map_from_exprs(su2, ["zr1**2", "zr2", "0.5"])
    M = omega_f_matrix(su2, f, (identity(su2), zr))
    fv = f(zr)
    C = np.einsum("i,ijk->jk", fv, su2.c)
    assert np.allclose(M[:3, :3], C, atol=1e-12)
    J = np.zeros((3, 3))
    J[0, 0] = 2 * zr[0]
    J[1, 1] = 1.0
    assert np.allclose(M[3:, :3], J, atol=1e-8)
    assert np.allclose(M[:3, 3:], -J.T, atol=1e-8)
    assert np.allclose(M, -M.T, atol=1e-8)


def test_kernel_rank_canonical(rng):
    J = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])
    rank, kernel = kernel_rank(J)
    assert rank == 6 and kernel.shape[1] == 0
    rank0, kernel0 = kernel_rank(np.zeros((4, 4)))
    assert rank0 == 0 and kernel0.shape[1] == 4


def test_rank_equals_orbit_dimension(su2, su3, rng):
    for L, xi in ((su2, np.array([0.0, 0.0, 1.0])), (su3, np.eye(8)[2])):
        exprs = [f"{v}" for v in xi]
        rank, _ = kernel_rank(omega_f_matrix(L, exprs, rng.normal(size=L.dim)))
        assert rank == orbit_dimension(L, xi)


# --- coadjoint orbit bracket --------------------------------------------------

def test_orbit_bracket_su2_level(su2):
    lam = 1.0
    x = np.array([0.0, 0.0, lam])
    level = quadratic_casimir(su2, x)
    # oracle: -sum_i x^i c^i_12 with c^3_12 = -1 for the X = (i/2) sigma basis
    expected = -lam * su2.c[2, 0, 1]
    got = coadjoint_orbit_bracket(su2, lambda v: v[0], lambda v: v[1], x, level)
    assert got == pytest.approx(expected, abs=1e-10)
    assert got == pytest.approx(lam, abs=1e-10)


def test_orbit_bracket_casimir_annihilates(su2, rng):
    x = rng.normal(size=3)
    level = quadratic_casimir(su2, x)
    C = partial(quadratic_casimir, su2)
    g = lambda v: v[0] * v[2] + v[1]
    assert abs(coadjoint_orbit_bracket(su2, C, g, x, level)) < 1e-6


def test_orbit_bracket_origin(su2):
    got = coadjoint_orbit_bracket(su2, lambda v: v[0], lambda v: v[1], np.zeros(3), 0.0)
    assert got == 0.0


def test_orbit_bracket_off_level(su2):
    with pytest.raises(OffOrbit):
        coadjoint_orbit_bracket(su2, lambda v: v[0], lambda v: v[1],
                                np.array([0.0, 0.0, 1.0]), 123.0)


def test_orbit_bracket_u1_singular(u1):
    with pytest.raises(SingularKillingForm):
        coadjoint_orbit_bracket(u1, lambda v: v[0], lambda v: v[0], np.array([1.0]), 0.0)


# --- root systems ---------------------------------------------------------------

def test_root_system_su2(su2):
    R = root_system(su2)
    assert R.rank == 1 and R.n_positive == 1
    assert R.cartan_indices == (2,)
    # normalization alpha([E+, E-]) = 1
    w = np.einsum("kij,i,j->k", su2.c, R.root_vectors_pos[0], R.root_vectors_neg[0])
    assert abs(R.positive_roots[0][0] * w[2] - 1.0) < 1e-12


def test_root_system_su3(su3):
    R = root_system(su3)
    assert R.rank == 2 and R.n_positive == 3
    found = False
    for i, j, k in itertools.permutations(range(3)):
        if np.allclose(R.positive_roots[i] + R.positive_roots[j], R.positive_roots[k], atol=1e-9):
            found = True
    assert found
    # matrix check [H_j, E_alpha] = alpha(H_j) E_alpha
    for idx in range(3):
        Em = np.tensordot(R.root_vectors_pos[idx], su3.matrix_basis, axes=(0, 0))
        for j, hj in enumerate(R.cartan_indices):
            Hm = su3.matrix_basis[hj]
            resid = np.linalg.norm(Hm @ Em - Em @ Hm - R.positive_roots[idx][j] * Em)
            assert resid < 1e-9
    # B positive on the root span
    for idx in range(3):
        a = R.positive_roots[idx]
        val = complex(a @ R.killing_dual_h @ a)
        assert val.real > 0 and abs(val.imag) < 1e-12


def test_root_system_rejects_others(so3, u1):
    for L in (so3, u1):
        with pytest.raises(UnsupportedAlgebra):
            root_system(L)


# --- cartan_reduced_bracket -------------------------------------------------------

def test_cartan_momentum_group_pairing(su2, rng):
    R = root_system(su2)
    g0 = random_group(su2, rng)
    pt = CartanPoint(g=g0, zh=np.array([0.8]))
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    phi = lambda P: trace_part(M, P.g)
    from liepoisson.group import invariant_derivative

    got = cartan_reduced_bracket(R, lambda P: P.zh[0], phi, pt)
    expected = invariant_derivative(su2, "left", 2, lambda g: trace_part(M, g), g0)
    assert got == pytest.approx(expected, abs=5e-5)


def su2_closed_form(L, f, g, pt, step=1e-5):
    """Independent evaluation of dp ^ L3 - (1/p) L1 ^ L2 in the (X2, X1, X3) frame."""
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


def test_cartan_su2_closed_form(su2, rng):
    R = root_system(su2)
    for _ in range(6):
        pt = CartanPoint(g=random_group(su2, rng), zh=np.array([rng.uniform(0.2, 3.0)]))
        f, g = cartan_field(rng, su2), cartan_field(rng, su2)
        assert cartan_reduced_bracket(R, f, g, pt) == pytest.approx(
            su2_closed_form(su2, f, g, pt), abs=5e-5
        )


def test_cartan_weyl_wall(su2, rng):
    R = root_system(su2)
    pt = CartanPoint(g=random_group(su2, rng), zh=np.array([0.0]))
    with pytest.raises(WeylWallSingularity):
        cartan_reduced_bracket(R, lambda P: P.zh[0], lambda P: P.zh[0] ** 2, pt)


def test_cartan_jacobi_interior(su2, rng):
    R = root_system(su2)
    eng = partial(cartan_reduced_bracket, R)
    for p in (0.1, 10.0):
        pt = CartanPoint(g=random_group(su2, rng), zh=np.array([p]))
        f, g, h = (cartan_field(rng, su2) for _ in range(3))
        assert abs(jacobiator(eng, f, g, h, pt)) < 1e-4


def test_cartan_su3_jacobi_smoke(su3, rng):
    R = root_system(su3)
    eng = partial(cartan_reduced_bracket, R)
    pt = CartanPoint(g=random_group(su3, rng, 0.4), zh=np.array([0.9, 0.4]))
    R.wall_check(pt.zh)

    def field(rng):
        M = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))) * 0.4
        a = rng.normal(size=2) * 0.4
        return lambda P: trace_part(M, P.g) * (1 + 0.2 * P.zh[0]) + float(a @ P.zh)

    f, g, h = (field(rng) for _ in range(3))
    assert abs(jacobiator(eng, f, g, h, pt)) < 1e-3


# --- gauged_bracket ----------------------------------------------------------------

def test_gauged_canonical_block(so3, rng):
    A = hedgehog_potential(so3, 0.3)
    s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
    for a in range(3):
        for b in range(3):
            pq = gauged_bracket(so3, A, lambda P, b=b: P.p[b], lambda P, a=a: P.q[a], s)
            assert pq == pytest.approx(1.0 if a == b else 0.0, abs=1e-9)
            qq = gauged_bracket(so3, A, lambda P, a=a: P.q[a], lambda P, b=b: P.q[b], s)
            assert qq == pytest.approx(0.0, abs=1e-12)


def test_gauged_internal_block_is_lie_poisson(so3, rng):
    A = hedgehog_potential(so3, 0.3)
    s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
    for a in range(3):
        for b in range(3):
            got = gauged_bracket(so3, A, lambda P, a=a: P.I[a], lambda P, b=b: P.I[b], s)
            expected = -float(np.einsum("i,i->", s.I, so3.c[:, a, b]))
            assert got == pytest.approx(expected, abs=1e-9)


def test_gauged_magnetic_block(so3, rng):
    A = hedgehog_potential(so3, 0.3)
    s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
    F = curvature(so3, A, s.q)
    for j in range(3):
        for k in range(3):
            got = gauged_bracket(so3, A, lambda P, j=j: P.p[j], lambda P, k=k: P.p[k], s)
            expected = -2.0 * float(np.einsum("i,i->", s.I, F[:, j, k]))
            assert got == pytest.approx(expected, abs=1e-8)


def test_gauged_jacobi_polynomial_potential(so3, rng):
    A = expression_potential(
        so3, 3,
        [[1, 1, "0.2*q2"], [2, 2, "0.1*q1*q3"], [3, 3, "0.3*q1 - 0.1*q2**2"]],
    )
    eng = partial(gauged_bracket, so3, A)

    def field(rng):
        aq, ap, ai = (rng.normal(size=3) * 0.5 for _ in range(3))
        return lambda P: float(aq @ P.q + ap @ P.p + ai @ P.I + 0.2 * (P.p @ P.q) + 0.1 * (P.I @ P.I))

    for _ in range(3):
        s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
        f, g, h = (field(rng) for _ in range(3))
        assert abs(jacobiator(eng, f, g, h, s)) < 1e-4


def test_gauged_casimir_degeneracy(so3, rng):
    # A = 0: the I-Casimir brackets to zero with everything
    A0 = zero_potential(so3, 3)
    C = lambda P: quadratic_casimir(so3, P.I)
    for _ in range(3):
        s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
        g = lambda P: float(P.q @ P.p + P.I @ P.p)
        assert abs(gauged_bracket(so3, A0, C, g, s)) < 1e-5
    # A != 0: the I-I block alone still annihilates the Casimir
    A = hedgehog_potential(so3, 0.4)
    for _ in range(3):
        s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
        g_int = lambda P: float(0.3 * P.I[0] * P.I[2] + P.I[1])
        assert abs(gauged_bracket(so3, A, C, g_int, s)) < 1e-5


# --- cartan_gauged_bracket ----------------------------------------------------------

def test_cartan_gauged_reduces_when_flat(su2, rng):
    R = root_system(su2)
    A0 = zero_potential(su2, 2)
    g0 = random_group(su2, rng)
    pt = CartanGaugedPoint(q=rng.normal(size=2), p=rng.normal(size=2),
                           g=g0, zh=np.array([0.9]))
    # canonical block survives
    for j in range(2):
        got = cartan_gauged_bracket(R, A0, lambda P, j=j: P.p[j], lambda P, j=j: P.q[j], pt)
        assert got == pytest.approx(1.0, abs=1e-9)
    # root block matches the ungauged Cartan bracket for group-only fields
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    N = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = lambda P: trace_part(M, P.g)
    g = lambda P: trace_part(N, P.g)
    got = cartan_gauged_bracket(R, A0, f, g, pt)
    expected = cartan_reduced_bracket(R, f, g, CartanPoint(g=g0, zh=pt.zh))
    assert got == pytest.approx(expected, abs=5e-5)


def test_cartan_gauged_u1_matches_gauged(u1, rng):
    # k = 1 and an empty positive-root set: canonical + magnetic terms only
    R = RootSystemData(
        algebra=u1,
        cartan_indices=(0,),
        positive_roots=np.zeros((0, 1), dtype=complex),
        root_vectors_pos=np.zeros((0, 1), dtype=complex),
        root_vectors_neg=np.zeros((0, 1), dtype=complex),
        killing_dual_h=np.zeros((1, 1)),
    )
    A = uniform_b_potential(u1, 1.3)
    e = 0.8
    pt = CartanGaugedPoint(q=rng.normal(size=2), p=rng.normal(size=2),
                           g=identity(u1), zh=np.array([e]))
    s = wong_state(u1, pt.q, pt.p, [e])

    def lift(fn):
        return lambda P: fn(P.q, P.p)

    pairs = [
        (lambda q, p: p[0], lambda q, p: q[0]),
        (lambda q, p: p[0], lambda q, p: p[1]),
        (lambda q, p: q[0] * p[1], lambda q, p: p[0] + q[1]),
    ]
    for fa, fb in pairs:
        got = cartan_gauged_bracket(R, A, lift(fa), lift(fb), pt)
        expected = gauged_bracket(u1, A, lambda P: fa(P.q, P.p), lambda P: fb(P.q, P.p), s)
        assert got == pytest.approx(expected, abs=1e-7)


def test_cartan_gauged_jacobi_constant_potential(su2, rng):
    # Fields on the reduced space: the group part enters through g H3 g^-1,
    # which is invariant under right translation by the Cartan torus.
    R = root_system(su2)
    A = constant_potential(su2, [[0.3, -0.1, 0.2], [0.1, 0.2, 0.0]])
    eng = partial(cartan_gauged_bracket, R, A)
    H3 = su2.matrix_basis[2]

    def field(rng):
        M = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) * 0.4
        aq, ap = rng.normal(size=2) * 0.5, rng.normal(size=2) * 0.5
        b = rng.normal() * 0.3

        def f(P):
            hopf = float(np.real(np.trace(M @ P.g.matrix @ H3 @ np.linalg.inv(P.g.matrix))))
            return hopf * (1.0 + b * P.zh[0]) + float(aq @ P.q + ap @ P.p)

        return f

    for p0 in (0.7, 2.0):
        pt = CartanGaugedPoint(q=rng.normal(size=2), p=rng.normal(size=2),
                               g=random_group(su2, rng), zh=np.array([p0]))
        f, g, h = (field(rng) for _ in range(3))
        assert abs(jacobiator(eng, f, g, h, pt)) < 1e-4


def test_cartan_gauged_wall(su2, rng):
    R = root_system(su2)
    A = zero_potential(su2, 2)
    pt = CartanGaugedPoint(q=rng.normal(size=2), p=rng.normal(size=2),
                           g=random_group(su2, rng), zh=np.array([0.0]))
    with pytest.raises(WeylWallSingularity):
        cartan_gauged_bracket(R, A, lambda P: P.p[0], lambda P: P.q[0], pt)
