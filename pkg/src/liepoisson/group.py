"""Matrix Lie-group numerics: exp, Ad, invariant derivatives, trivialized group laws.

Every group here is a matrix group realized through the matrix basis of its
Lie algebra.  Flow conventions follow the left/right invariant vector fields:
the flow of L_X is g -> g.exp(tX), the flow of R_X is g -> exp(tX).g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import LieAlgebra, _check_vector
from .errors import (
    BasisGramSingular,
    DimensionMismatch,
    InvalidGroupElement,
    NoMatrixBasis,
    NonFiniteValue,
)

MEMBERSHIP_TOL = 1e-9
DEFAULT_GROUP_STEP = 1e-5  # finite-difference step for invariant derivatives


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A validated element of the matrix group attached to ``algebra``."""

    matrix: np.ndarray
    algebra: LieAlgebra

    def __post_init__(self):
        self.matrix.setflags(write=False)

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), self.algebra)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]


def membership_defect(L: LieAlgebra, matrix: np.ndarray) -> float:
    """Distance from the group: unitarity defect plus |det - 1| for special groups."""
    if L.matrix_basis is None:
        raise NoMatrixBasis(f"algebra {L.name!r} has no matrix basis")
    d = L.matrix_dim
    if matrix.shape != (d, d):
        raise DimensionMismatch(f"expected a {d}x{d} matrix, got {matrix.shape}")
    defect = float(np.linalg.norm(matrix.conj().T @ matrix - np.eye(d)))
    if L.traceless:
        defect += abs(np.linalg.det(matrix) - 1.0)
    return defect


def group_element(L: LieAlgebra, matrix, tol: float = MEMBERSHIP_TOL) -> GroupElement:
    """Wrap a matrix as a GroupElement, enforcing the membership tolerance."""
    matrix = np.array(matrix, dtype=complex)
    defect = membership_defect(L, matrix)
    if not np.isfinite(defect) or defect > tol:
        raise InvalidGroupElement(
            f"matrix is not in the group of {L.name!r} (defect {defect:.3e} > {tol:.1e})"
        )
    return GroupElement(matrix, L)


def identity(L: LieAlgebra) -> GroupElement:
    if L.matrix_basis is None:
        raise NoMatrixBasis(f"algebra {L.name!r} has no matrix basis")
    return GroupElement(np.eye(L.matrix_dim, dtype=complex), L)


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product; drift tolerance is 2x the construction tolerance."""
    return group_element(a.algebra, a.matrix @ b.matrix, tol=2 * MEMBERSHIP_TOL)


def renormalize(g: GroupElement) -> GroupElement:
    """Re-project onto the group via polar decomposition (explicit, never implicit)."""
    u, _ = scipy.linalg.polar(g.matrix)
    L = g.algebra
    if L.traceless:
        d = u.shape[0]
        u = u * np.linalg.det(u) ** (-1.0 / d)
    return group_element(L, u)


def exp(L: LieAlgebra, X) -> GroupElement:
    """Matrix exponential of the algebra element sum_i X^i M_i."""
    X = _check_vector(L, X, "X")
    return GroupElement(scipy.linalg.expm(L.algebra_matrix(X)), L)


def project_to_algebra(L: LieAlgebra, m: np.ndarray) -> np.ndarray:
    """Coordinates of a matrix lying in the (real) span of the basis.

    Uses the inner product <A, B> = Re tr(A^* B) and the precomputed Gram
    matrix of the basis.
    """
    if L.matrix_basis is None:
        raise NoMatrixBasis(f"algebra {L.name!r} has no matrix basis")
    if L.gram is None:
        raise BasisGramSingular("no Gram matrix available for this basis")
    rhs = np.array(
        [np.trace(L.matrix_basis[k].conj().T @ m).real for k in range(L.dim)]
    )
    try:
        coeffs = np.linalg.solve(L.gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise BasisGramSingular(str(exc)) from exc
    return coeffs


def adjoint_matrix(L: LieAlgebra, g: GroupElement) -> np.ndarray:
    """Matrix of Ad(g) in the basis: Ad(g) X_i = sum_j [Ad(g)]^j_i X_j."""
    ginv = np.linalg.inv(g.matrix)
    cols = np.empty((L.dim, L.dim))
    for i in range(L.dim):
        cols[:, i] = project_to_algebra(L, g.matrix @ L.matrix_basis[i] @ ginv)
    return cols


def semidirect_multiply(
    L: LieAlgebra, a: GroupElement, xi, b: GroupElement, eta
) -> tuple[GroupElement, np.ndarray]:
    """Semidirect product on G x g*: (a, xi).(b, eta) = (ab, Ad*(b^-1) xi + eta).

    Here Ad*(g) = Ad(g^-1)*, so Ad*(b^-1) xi has coordinates Ad(b)^T xi.
    """
    xi = _check_vector(L, xi, "xi")
    eta = _check_vector(L, eta, "eta")
    return multiply(a, b), adjoint_matrix(L, b).T @ xi + eta


def semidirect_inverse(L: LieAlgebra, a: GroupElement, xi) -> tuple[GroupElement, np.ndarray]:
    """(a, xi)^-1 = (a^-1, -Ad*(a) xi)."""
    xi = _check_vector(L, xi, "xi")
    ainv = a.inverse()
    return ainv, -(adjoint_matrix(L, ainv).T @ xi)


def tangent_group_multiply(
    L: LieAlgebra, X, a: GroupElement, Y, b: GroupElement
) -> tuple[np.ndarray, GroupElement]:
    """Group law on TG in the right trivialization: (X, a).(Y, b) = (X + Ad(a)Y, ab)."""
    X = _check_vector(L, X, "X")
    Y = _check_vector(L, Y, "Y")
    return X + adjoint_matrix(L, a) @ Y, multiply(a, b)


def tangent_group_inverse(L: LieAlgebra, X, a: GroupElement) -> tuple[np.ndarray, GroupElement]:
    """(X, a)^-1 = (-Ad(a^-1) X, a^-1) in the right trivialization."""
    X = _check_vector(L, X, "X")
    ainv = a.inverse()
    return -(adjoint_matrix(L, ainv) @ X), ainv


def tangent_group_multiply_left(
    L: LieAlgebra, a: GroupElement, X, b: GroupElement, Y
) -> tuple[GroupElement, np.ndarray]:
    """Group law on TG in the left trivialization: (a, X).(b, Y) = (ab, Ad(b^-1)X + Y).

    Provided for completeness; the right-trivialized law is the one used by
    the bracket machinery.
    """
    X = _check_vector(L, X, "X")
    Y = _check_vector(L, Y, "Y")
    return multiply(a, b), adjoint_matrix(L, b.inverse()) @ X + Y


def zeta_r(L: LieAlgebra, x, g: GroupElement, i: int) -> float:
    """Right-momentum coordinate at the trivialized point (x, g): <x, Ad(g) X_i>.

    At g = e this is x_i; the full map realizes zeta^l = Ad*(g) zeta^r.
    """
    x = _check_vector(L, x, "x")
    if not 0 <= i < L.dim:
        raise DimensionMismatch(f"basis index {i} out of range for dim {L.dim}")
    ad_i = project_to_algebra(
        L, g.matrix @ L.matrix_basis[i] @ np.linalg.inv(g.matrix)
    )
    return float(x @ ad_i)


def invariant_derivative(
    L: LieAlgebra,
    side: str,
    i: int,
    phi,
    g: GroupElement,
    h: float = DEFAULT_GROUP_STEP,
) -> float:
    """Directional derivative of phi along the invariant field of X_i.

    side="left":  (L_i phi)(g) = d/dt phi(g.exp(t X_i)) at t=0,
    side="right": (R_i phi)(g) = d/dt phi(exp(t X_i).g) at t=0,
    both by central differences with step h (error O(h^2) for smooth phi).
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    step = scipy.linalg.expm(h * L.algebra_matrix(np.eye(L.dim)[i]))
    step_inv = scipy.linalg.expm(-h * L.algebra_matrix(np.eye(L.dim)[i]))
    if side == "left":
        plus, minus = g.matrix @ step, g.matrix @ step_inv
    else:
        plus, minus = step @ g.matrix, step_inv @ g.matrix
    fp = phi(GroupElement(plus, L))
    fm = phi(GroupElement(minus, L))
    val = (fp - fm) / (2 * h)
    if not np.isfinite(val):
        raise NonFiniteValue(f"invariant derivative is not finite (phi gave {fp}, {fm})")
    return float(val)
