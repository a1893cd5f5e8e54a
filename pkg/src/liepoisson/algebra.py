"""Lie-algebra core: structure constants, brackets, coadjoint action, Killing form.

Conventions.  A basis X_1..X_n carries structure constants c^k_ij defined by
[X_i, X_j] = sum_k c^k_ij X_k.  The tensor is stored dense as ``c[k, i, j]``
(0-based indices).  Dual vectors are plain 1-d numpy arrays holding the
coordinates x^i with respect to the dual basis xi_1..xi_n.

Built-in algebras:

* ``u1``   -- 1x1 basis [[i]], abelian.
* ``so3``  -- real 3x3 rotation generators, c^k_ij = eps_ijk.
* ``su2``  -- X_k = (i/2) sigma_k (Pauli), constants derived from commutators.
* ``su3``  -- X_a = (i/2) lambda_a (Gell-Mann), constants derived likewise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AntisymmetryViolation,
    DimensionMismatch,
    JacobiViolation,
    SingularKillingForm,
)

# Validation tolerance: admits constants derived from floating-point matrix
# commutators while rejecting genuinely broken input.
JACOBI_TOL = 1e-10
BASIS_CONSISTENCY_TOL = 1e-10

BUILTIN_NAMES = ("u1", "so3", "su2", "su3")


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Immutable Lie-algebra data: dimension, constants, optional matrix basis."""

    name: str
    dim: int
    c: np.ndarray                      # shape (n, n, n), c[k, i, j] = c^k_ij
    basis_labels: tuple[str, ...]
    matrix_basis: np.ndarray | None = None   # shape (n, d, d), complex
    casimir_form: np.ndarray | None = None   # optional override for B^{-1}
    gram: np.ndarray | None = None     # Gram matrix Re tr(M_a^* M_b) of the basis
    traceless: bool = False            # True when the group carries a det=1 constraint

    def __post_init__(self):
        self.c.setflags(write=False)
        if self.matrix_basis is not None:
            self.matrix_basis.setflags(write=False)

    @property
    def matrix_dim(self) -> int:
        if self.matrix_basis is None:
            return 0
        return self.matrix_basis.shape[1]

    def algebra_matrix(self, coeffs: np.ndarray) -> np.ndarray:
        """Matrix sum_a coeffs[a] * M_a (complex coefficients allowed)."""
        if self.matrix_basis is None:
            from .errors import NoMatrixBasis

            raise NoMatrixBasis(f"algebra {self.name!r} has no matrix basis")
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected coefficient vector of length {self.dim}, got {coeffs.shape}"
            )
        return np.tensordot(coeffs, self.matrix_basis, axes=(0, 0))


def _check_vector(L: LieAlgebra, v, what="vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (L.dim,):
        raise DimensionMismatch(f"{what} must have length {L.dim}, got shape {v.shape}")
    return v


def bracket_vectors(L: LieAlgebra, X, Y) -> np.ndarray:
    """Lie bracket in coordinates: ([X, Y])^k = sum_ij c^k_ij X^i Y^j."""
    X = _check_vector(L, X, "X")
    Y = _check_vector(L, Y, "Y")
    return np.einsum("kij,i,j->k", L.c, X, Y)


def ad_star(L: LieAlgebra, X, xi) -> np.ndarray:
    """Coadjoint action ad*_X xi, defined by <ad*_X xi, Y> = <xi, [X, Y]>.

    Componentwise (ad*_X xi)_k = sum_ij xi_j c^j_ik X^i.
    """
    X = _check_vector(L, X, "X")
    xi = _check_vector(L, xi, "xi")
    return np.einsum("j,jik,i->k", xi, L.c, X)


def killing_form(L: LieAlgebra) -> np.ndarray:
    """Killing form B_ij = sum_st c^s_it c^t_js (= tr(ad X_i ad X_j))."""
    return np.einsum("sit,tjs->ij", L.c, L.c)


def killing_dual(L: LieAlgebra) -> np.ndarray:
    """Inverse Killing form B^{-1} (the bilinear form induced on the dual).

    Raises SingularKillingForm for non-semisimple algebras unless the
    algebra spec supplied an explicit ``casimir_form`` override.
    """
    if L.casimir_form is not None:
        return L.casimir_form
    B = killing_form(L)
    if L.dim == 0:
        raise SingularKillingForm("empty algebra")
    svals = np.linalg.svd(B, compute_uv=False)
    if svals[-1] <= 1e-12 * max(svals[0], 1.0):
        raise SingularKillingForm(
            f"Killing form of {L.name!r} is singular (smallest singular value {svals[-1]:.3e})"
        )
    return np.linalg.inv(B)


def quadratic_casimir(L: LieAlgebra, xi) -> float:
    """Quadratic Casimir C(xi) = sum_ij (B^{-1})^{ij} xi_i xi_j."""
    xi = _check_vector(L, xi, "xi")
    Binv = killing_dual(L)
    return float(xi @ Binv @ xi)


def jacobi_defect(L) -> float:
    """Max over i,j,k,l of |sum_m c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj|.

    Accepts a LieAlgebra or a raw (n, n, n) structure tensor, so candidate
    constants can be measured before they pass validation.
    """
    c = L.c if isinstance(L, LieAlgebra) else np.asarray(L, dtype=float)
    return _jacobi_defect_tensor(c)


def _jacobi_defect_tensor(c: np.ndarray) -> float:
    s = (
        np.einsum("mij,lmk->ijkl", c, c)
        + np.einsum("mjk,lmi->ijkl", c, c)
        + np.einsum("mki,lmj->ijkl", c, c)
    )
    if s.size == 0:
        return 0.0
    return float(np.max(np.abs(s)))


def structure_constants_from_matrices(basis: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Recover c^k_ij from commutators of the matrix basis.

    Projects [M_i, M_j] onto the real span of the basis using the inner
    product <A, B> = Re tr(A^* B); the result is antisymmetrized exactly.
    """
    n = basis.shape[0]
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m = basis[i] @ basis[j] - basis[j] @ basis[i]
            rhs = np.array([np.trace(basis[k].conj().T @ m).real for k in range(n)])
            coeffs = np.linalg.solve(gram, rhs)
            c[:, i, j] = coeffs
            c[:, j, i] = -coeffs
    return c


def _gram(basis: np.ndarray) -> np.ndarray:
    n = basis.shape[0]
    g = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            g[a, b] = np.trace(basis[a].conj().T @ basis[b]).real
    return g


def _gell_mann() -> np.ndarray:
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1] = -1j
    lam[1][1, 0] = 1j
    lam[2][0, 0] = 1
    lam[2][1, 1] = -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2] = -1j
    lam[4][2, 0] = 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2] = -1j
    lam[6][2, 1] = 1j
    lam[7][0, 0] = lam[7][1, 1] = 1 / np.sqrt(3.0)
    lam[7][2, 2] = -2 / np.sqrt(3.0)
    return lam


def _builtin_basis(name: str) -> tuple[np.ndarray, tuple[str, ...]]:
    if name == "u1":
        return np.array([[[1j]]]), ("X1",)
    if name == "so3":
        m = np.zeros((3, 3, 3), dtype=complex)
        m[0] = [[0, 0, 0], [0, 0, -1], [0, 1, 0]]
        m[1] = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]
        m[2] = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
        return m, ("e1", "e2", "e3")
    if name == "su2":
        sig = np.array(
            [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
        )
        return 0.5j * sig, ("X1", "X2", "X3")
    if name == "su3":
        return 0.5j * _gell_mann(), tuple(f"X{a}" for a in range(1, 9))
    raise ValueError(f"unknown built-in algebra {name!r}")


def _validate(name, dim, c, matrix_basis, gram, casimir_form, traceless) -> LieAlgebra:
    asym = np.max(np.abs(c + c.transpose(0, 2, 1))) if c.size else 0.0
    if asym != 0.0:
        raise AntisymmetryViolation(
            f"structure constants not antisymmetric (max |c^k_ij + c^k_ji| = {asym:.3e})"
        )
    defect = _jacobi_defect_tensor(c)
    if defect > JACOBI_TOL:
        raise JacobiViolation(defect, JACOBI_TOL)
    if matrix_basis is not None:
        derived = structure_constants_from_matrices(matrix_basis, gram)
        err = np.max(np.abs(derived - c)) if c.size else 0.0
        if err > BASIS_CONSISTENCY_TOL:
            raise AntisymmetryViolation(
                f"matrix-basis commutators disagree with c (max error {err:.3e})"
            )
    labels = tuple(f"X{i + 1}" for i in range(dim))
    return LieAlgebra(
        name=name,
        dim=dim,
        c=c,
        basis_labels=labels,
        matrix_basis=matrix_basis,
        casimir_form=casimir_form,
        gram=gram,
        traceless=traceless,
    )


def load_algebra(spec) -> LieAlgebra:
    """Build and validate a LieAlgebra from a name or an explicit spec dict.

    ``spec`` is either a built-in name ("u1", "so3", "su2", "su3") or a dict
    {"name": str, "dim": int, "c": [[[k, i, j], value], ...]} with 1-based
    indices; entries are antisymmetrized (supplying c^k_ij fixes c^k_ji = -v).
    An optional "casimir_form" (n x n nested list) overrides B^{-1} for
    non-semisimple algebras.
    """
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec.get("name")
    if name in BUILTIN_NAMES and "c" not in spec:
        basis, _ = _builtin_basis(name)
        gram = _gram(basis)
        c = structure_constants_from_matrices(basis, gram)
        traceless = all(abs(np.trace(m)) < 1e-12 for m in basis)
        return _validate(name, basis.shape[0], c, basis, gram, None, traceless)
    if "c" not in spec or "dim" not in spec:
        raise DimensionMismatch(
            "custom algebra spec needs 'dim' and 'c' entries (or use a built-in name)"
        )
    n = int(spec["dim"])
    if n <= 0:
        raise DimensionMismatch("algebra dimension must be positive")
    c = np.zeros((n, n, n))
    seen = {}
    for entry in spec["c"]:
        (k, i, j), v = entry
        k, i, j = int(k) - 1, int(i) - 1, int(j) - 1
        if not (0 <= k < n and 0 <= i < n and 0 <= j < n):
            raise DimensionMismatch(f"structure-constant index {(k + 1, i + 1, j + 1)} out of range")
        v = float(v)
        if i == j and v != 0.0:
            raise AntisymmetryViolation(
                f"c^{k + 1}_{i + 1}{j + 1} = {v} has repeated lower indices"
            )
        for key, val in (((k, i, j), v), ((k, j, i), -v)):
            if key in seen and seen[key] != val:
                raise AntisymmetryViolation(
                    f"conflicting assignments for c^{key[0] + 1}_{key[1] + 1}{key[2] + 1}"
                )
            seen[key] = val
            c[key] = val
    casimir_form = None
    if "casimir_form" in spec:
        casimir_form = np.asarray(spec["casimir_form"], dtype=float)
        if casimir_form.shape != (n, n):
            raise DimensionMismatch("casimir_form must be an n x n matrix")
    return _validate(spec.get("name", "custom"), n, c, None, None, casimir_form, False)
