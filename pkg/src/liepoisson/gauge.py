"""Principal-connection data on the trivial bundle R^n x G.

A vector potential A = sum_ij A^j_i dq_i (x) X_j is stored as an evaluation
procedure q -> (n_base x dim) array whose row i holds the algebra coefficients
of A(d/dq_i).  The curvature F = dA + 1/2 [A, A]^wedge is stored with
half-coefficients: the tensor F^i_jk returned here satisfies
F-two-form(d_j, d_k) = 2 F^i_jk, matching the double-counting expansion
sum F^i_jk dq_j ^ dq_k.  All consumers (Wong field, gauged bracket) use the
stored tensor, which is where the explicit factors of 2 in the dynamics
come from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebra
from .errors import DimensionMismatch, ExpressionParseError, NonFiniteValue
from .fields import compile_expression, gradient_expressions, indexed_names
from .group import GroupElement, adjoint_matrix, exp, project_to_algebra

# Pullback s*kappa^l uses finite differences of the gauge map with this step.
GAUGE_STEP = 1e-5
# Curvature differences use a coarser step so that potentials which are
# themselves finite-difference products (gauge-transformed ones) still give
# curvature to ~1e-7 noise.
CURVATURE_STEP = 1e-4


@dataclass(frozen=True, eq=False)
class VectorPotential:
    """Map q -> A_q with components A^j_i = components(q)[i, j]."""

    algebra: LieAlgebra
    n_base: int
    kind: str
    components: object      # callable(q: ndarray) -> ndarray (n_base, dim)

    def __call__(self, q) -> np.ndarray:
        a = np.asarray(self.components(np.asarray(q, dtype=float)))
        if a.shape != (self.n_base, self.algebra.dim):
            raise DimensionMismatch(
                f"potential evaluation returned shape {a.shape}, "
                f"expected {(self.n_base, self.algebra.dim)}"
            )
        return a


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Field q -> F^i_jk(q), antisymmetric in (j, k), stored half-coefficients."""

    algebra: LieAlgebra
    n_base: int
    tensor: object          # callable(q) -> ndarray (dim, n_base, n_base)

    def __call__(self, q) -> np.ndarray:
        return np.asarray(self.tensor(np.asarray(q, dtype=float)))


@dataclass(frozen=True, eq=False)
class GaugeMap:
    """Map q -> s(q) in G."""

    algebra: LieAlgebra
    n_base: int
    fn: object              # callable(q) -> GroupElement

    def __call__(self, q) -> GroupElement:
        return self.fn(np.asarray(q, dtype=float))


# ---------------------------------------------------------------------------
# potential constructors

def zero_potential(L: LieAlgebra, n_base: int) -> VectorPotential:
    z = np.zeros((n_base, L.dim))
    return VectorPotential(L, n_base, "zero", lambda q: z)


def constant_potential(L: LieAlgebra, matrix) -> VectorPotential:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[1] != L.dim:
        raise DimensionMismatch(f"constant potential must be (n_base, {L.dim})")
    return VectorPotential(L, m.shape[0], "constant", lambda q: m)


def uniform_b_potential(L: LieAlgebra, B: float) -> VectorPotential:
    """Symmetric-gauge uniform magnetic field on R^2 for u1: A = (-B q2 / 2, B q1 / 2)."""
    if L.dim != 1:
        raise DimensionMismatch("uniform_b potential is a u1 construction")
    B = float(B)

    def comps(q):
        return np.array([[-0.5 * B * q[1]], [0.5 * B * q[0]]])

    return VectorPotential(L, 2, "abelian-uniform", comps)


def hedgehog_potential(L: LieAlgebra, kappa: float = 1.0) -> VectorPotential:
    """so3 hedgehog A^j_i = eps_jik q_k * kappa on R^3."""
    if L.dim != 3:
        raise DimensionMismatch("hedgehog potential needs a 3-dimensional algebra")
    kappa = float(kappa)
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0

    def comps(q):
        # row i, column j: eps_jik q_k
        return kappa * np.einsum("jik,k->ij", eps, q)

    return VectorPotential(L, 3, "expression", comps)


def expression_potential(L: LieAlgebra, n_base: int, entries) -> VectorPotential:
    """Entries [[j, i, "poly in q"], ...] assign A^j_i (1-based indices)."""
    names = indexed_names("q", n_base)
    compiled = []
    for j, i, src in entries:
        j, i = int(j) - 1, int(i) - 1
        if not (0 <= j < L.dim and 0 <= i < n_base):
            raise DimensionMismatch(f"potential entry ({j + 1}, {i + 1}) out of range")
        compiled.append((i, j, compile_expression(str(src), names)))

    def comps(q):
        a = np.zeros((n_base, L.dim))
        for i, j, fn in compiled:
            a[i, j] = fn(q)
        return a

    return VectorPotential(L, n_base, "expression", comps)


def potential_from_spec(L: LieAlgebra, spec) -> VectorPotential:
    """Potential spec (JSON): {"kind": ..., ...}; see the individual constructors."""
    if spec is None:
        raise ExpressionParseError("missing potential spec")
    kind = spec.get("kind")
    if kind == "zero":
        return zero_potential(L, int(spec.get("n_base", L.dim)))
    if kind == "constant":
        return constant_potential(L, spec["matrix"])
    if kind == "uniform_b":
        return uniform_b_potential(L, spec.get("B", 1.0))
    if kind == "hedgehog":
        return hedgehog_potential(L, spec.get("kappa", 1.0))
    if kind == "expression":
        return expression_potential(L, int(spec["n_base"]), spec["entries"])
    raise ExpressionParseError(f"unknown potential kind {kind!r}")


def shifted_by_gradient(A: VectorPotential, chi_src: str) -> VectorPotential:
    """A + d(chi) X_1 with the exact (symbolic) gradient; the abelian gauge shift."""
    grads = gradient_expressions(chi_src, indexed_names("q", A.n_base))
    L = A.algebra

    def comps(q):
        a = np.array(A(q))
        for i, gfn in enumerate(grads):
            a[i, 0] += gfn(q)
        return a

    return VectorPotential(L, A.n_base, "expression", comps)


# ---------------------------------------------------------------------------
# curvature and connection evaluation

def curvature(L: LieAlgebra, A: VectorPotential, q, step: float = CURVATURE_STEP) -> np.ndarray:
    """Curvature tensor F^i_jk(q) (stored half-coefficients), indexed [i, j, k].

    F^i_jk = 1/2 (d_j A^i_k - d_k A^i_j + [A_j, A_k]^i); the derivative part
    uses central differences of the potential.
    """
    q = np.asarray(q, dtype=float)
    n = A.n_base
    # dA[j, k, :] = d_j (A_k components)
    dA = np.empty((n, n, L.dim))
    for j in range(n):
        h = step * max(1.0, abs(float(q[j])))
        up = q.copy()
        dn = q.copy()
        up[j] += h
        dn[j] -= h
        dA[j] = (A(up) - A(dn)) / (2 * h)
    Aq = A(q)
    br = np.einsum("iab,ja,kb->ijk", L.c, Aq, Aq)      # [A_j, A_k]^i
    F = 0.5 * (dA.transpose(2, 0, 1) - dA.transpose(2, 1, 0) + br)
    if not np.all(np.isfinite(F)):
        raise NonFiniteValue("curvature tensor is not finite")
    return F


def curvature_field(L: LieAlgebra, A: VectorPotential, step: float = CURVATURE_STEP) -> CurvatureField:
    return CurvatureField(L, A.n_base, lambda q: curvature(L, A, q, step))


def connection_eval(L: LieAlgebra, A: VectorPotential, q, g: GroupElement, v, w) -> np.ndarray:
    """Connection form gamma_(q,g) = kappa^l_g + Ad(g^-1) A_q on a tangent vector.

    ``v`` is the base direction, ``w`` the algebra coefficients of the fiber
    direction; returns w + Ad(g^-1)(A_q(v)).  With v = 0 this reproduces the
    vertical parallelism.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    av = A(q).T @ v
    return w + adjoint_matrix(L, g.inverse()) @ av


# ---------------------------------------------------------------------------
# gauge transformations

def gauge_map_from_exponents(L: LieAlgebra, n_base: int, exprs) -> GaugeMap:
    """s(q) = exp(sum_a chi_a(q) X_a) with polynomial exponent expressions."""
    names = indexed_names("q", n_base)
    fns = [compile_expression(str(src), names) for src in exprs]
    if len(fns) != L.dim:
        raise DimensionMismatch(f"need {L.dim} exponent expressions, got {len(fns)}")

    def fn(q):
        return exp(L, np.array([f(q) for f in fns]))

    return GaugeMap(L, n_base, fn)


def constant_gauge_map(L: LieAlgebra, n_base: int, g: GroupElement) -> GaugeMap:
    return GaugeMap(L, n_base, lambda q: g)


def gauge_transform_potential(
    L: LieAlgebra, A: VectorPotential, s: GaugeMap, q, step: float = GAUGE_STEP
) -> np.ndarray:
    """The transformed potential (s*kappa^l + Ad(s^-1) A) at q, as an (n, dim) array.

    The Maurer-Cartan pullback is computed from finite differences of the
    gauge map: component j is the basis projection of s(q)^-1 d_j s(q).
    """
    q = np.asarray(q, dtype=float)
    sq = s(q)
    sq_inv = np.linalg.inv(sq.matrix)
    ad_inv = adjoint_matrix(L, sq.inverse())
    out = np.empty((A.n_base, L.dim))
    for j in range(A.n_base):
        h = step * max(1.0, abs(float(q[j])))
        up = q.copy()
        dn = q.copy()
        up[j] += h
        dn[j] -= h
        ds = (s(up).matrix - s(dn).matrix) / (2 * h)
        out[j] = project_to_algebra(L, sq_inv @ ds)
    out += A(q) @ ad_inv.T
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("gauge-transformed potential is not finite")
    return out


def gauge_transformed_potential(
    L: LieAlgebra, A: VectorPotential, s: GaugeMap, step: float = GAUGE_STEP
) -> VectorPotential:
    """The transformed potential as a field, for downstream curvature checks."""
    return VectorPotential(
        L, A.n_base, "expression", lambda q: gauge_transform_potential(L, A, s, q, step)
    )


def gauge_transform_curvature(L: LieAlgebra, F: CurvatureField, s: GaugeMap, q) -> np.ndarray:
    """Curvature transforms by the adjoint action alone: F -> Ad(s^-1) F."""
    ad_inv = adjoint_matrix(L, s(np.asarray(q, dtype=float)).inverse())
    return np.einsum("ab,bjk->ajk", ad_inv, F(q))
