"""Bracket engines on g*, on the trivialized T*G, and for generic bivectors.

Sign conventions.  All engines return {f, g} with the overall sign resolved
so that on g* the bracket of coordinates is {x^j, x^k}(x) = -sum_i x^i c^i_jk,
and on T*Rn the canonical bivector sum_j dp_j ^ dq_j gives {p_j, q_j} = +1.
Hamiltonian flows use z_dot = {H, z}, which makes the free Hamiltonian
H = 1/2 sum p^2 generate q_dot = +p in these conventions.

Bivectors Lambda = sum coeff * A ^ B are evaluated by wedge contraction,
{f, g} = sum coeff * [(Af)(Bg) - (Ag)(Bf)], with each frame action computed
from its rule: a coordinate partial (central differences, step scaled by the
coordinate magnitude) or an invariant derivative on the group slot.
Complex frame fields (root directions E_alpha) split into two real invariant
derivatives, so fields are only ever evaluated at genuine group elements.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import LieAlgebra, _check_vector
from .errors import (
    ExpressionParseError,
    NonFiniteValue,
    UnresolvableFrameField,
)
from .fields import point_symbol_values
from .group import GroupElement

DEFAULT_STEP = 1e-5   # central-difference step, scaled by max(1, |coordinate|)
JACOBI_STEP = 1e-4    # coarser step for nested (Jacobi) evaluations


@dataclass(frozen=True, eq=False)
class TrivializedCovector:
    """Point (x, g) of g* x G, the right-trivialized image of T*G."""

    x: np.ndarray
    g: GroupElement

    def __post_init__(self):
        self.x.setflags(write=False)


def trivialized_covector(L: LieAlgebra, x, g: GroupElement) -> TrivializedCovector:
    return TrivializedCovector(_check_vector(L, x, "x").copy(), g)


def _finite(value, what="bracket value"):
    if not math.isfinite(value.real) or not math.isfinite(value.imag):
        raise NonFiniteValue(f"{what} is not finite: {value}")
    return value


# ---------------------------------------------------------------------------
# frame fields

_DISPLACEMENTS: dict = {}


def _displacement_pair(L: LieAlgebra, direction: np.ndarray, h: float):
    """exp(+-h * M(direction)), cached; direction has real coefficients."""
    key = (L, direction.tobytes(), h)
    hit = _DISPLACEMENTS.get(key)
    if hit is None:
        m = h * L.algebra_matrix(direction)
        hit = (scipy.linalg.expm(m), scipy.linalg.expm(-m))
        _DISPLACEMENTS[key] = hit
    return hit


@dataclass(frozen=True, eq=False)
class CoordinateFrame:
    """Partial derivative along one component of a coordinate block (x, q, p, I, zh)."""

    block: str
    index: int
    name: str = ""

    def apply(self, field, pt, step: float):
        arr = getattr(pt, self.block, None)
        if arr is None:
            raise UnresolvableFrameField(
                f"frame {self.name or self.block} needs a {self.block!r} block on the point"
            )
        h = step * max(1.0, abs(float(arr[self.index])))
        up = np.array(arr, dtype=float)
        dn = np.array(arr, dtype=float)
        up[self.index] += h
        dn[self.index] -= h
        fp = field(dataclasses.replace(pt, **{self.block: up}))
        fm = field(dataclasses.replace(pt, **{self.block: dn}))
        return _finite(complex((fp - fm) / (2 * h)), f"derivative along {self.name}")


@dataclass(frozen=True, eq=False)
class InvariantFrame:
    """Invariant derivative on the group slot along a (possibly complex) algebra vector."""

    side: str                 # "left" or "right"
    coeffs: np.ndarray        # complex coefficient vector in the algebra basis
    algebra: LieAlgebra
    name: str = ""

    def apply(self, field, pt, step: float):
        g = getattr(pt, "g", None)
        if g is None:
            raise UnresolvableFrameField(
                f"frame {self.name or self.side} needs a group slot on the point"
            )
        total = 0j
        for part, unit in ((np.real(self.coeffs), 1.0), (np.imag(self.coeffs), 1j)):
            if not np.any(part):
                continue
            plus, minus = _displacement_pair(self.algebra, np.ascontiguousarray(part), step)
            if self.side == "left":
                gp, gm = g.matrix @ plus, g.matrix @ minus
            else:
                gp, gm = plus @ g.matrix, minus @ g.matrix
            fp = field(dataclasses.replace(pt, g=GroupElement(gp, self.algebra)))
            fm = field(dataclasses.replace(pt, g=GroupElement(gm, self.algebra)))
            total += unit * (fp - fm) / (2 * step)
        return _finite(total, f"derivative along {self.name}")


_FRAME_RE = re.compile(r"^(dx|dq|dp|dI|dzh|Z|L|R)_(\d+)$")
_ROOT_RE = re.compile(r"^L_root_(-?\d+)$")

_BLOCK_OF = {"dx": "x", "Z": "x", "dq": "q", "dp": "p", "dI": "I", "dzh": "zh"}


def resolve_frame(name: str, algebra: LieAlgebra | None = None, root_system=None):
    """Turn a symbolic frame name (dx_1, dp_2, L_3, R_1, L_root_-2, ...) into a frame field."""
    m = _ROOT_RE.match(name)
    if m:
        if root_system is None or algebra is None:
            raise UnresolvableFrameField(f"{name}: root-system context required")
        k = int(m.group(1))
        return InvariantFrame("left", root_system.root_vector(k), algebra, name=name)
    m = _FRAME_RE.match(name)
    if not m:
        raise UnresolvableFrameField(f"unknown frame field {name!r}")
    kind, idx = m.group(1), int(m.group(2)) - 1
    if kind in _BLOCK_OF:
        return CoordinateFrame(_BLOCK_OF[kind], idx, name=name)
    if algebra is None:
        raise UnresolvableFrameField(f"{name}: algebra context required")
    if idx >= algebra.dim:
        raise UnresolvableFrameField(f"{name}: index exceeds algebra dimension")
    direction = np.zeros(algebra.dim)
    direction[idx] = 1.0
    side = "left" if kind == "L" else "right"
    return InvariantFrame(side, direction.astype(complex), algebra, name=name)


# ---------------------------------------------------------------------------
# bivector specifications

_COEFF_SYMBOL_RE = re.compile(r"^(x|q|p|I|zh)\d+$|^bratio_\d+$|^gtrre$|^gtrim$")


def compile_coefficient(source: str, root_system=None):
    """Compile a coefficient expression (constants, coordinates, products, B-form ratios)."""
    import sympy as sp

    try:
        expr = sp.sympify(source, rational=False)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ExpressionParseError(f"cannot parse coefficient {source!r}: {exc}") from exc
    names = sorted(str(s) for s in expr.free_symbols)
    for nm in names:
        if not _COEFF_SYMBOL_RE.match(nm):
            raise ExpressionParseError(f"coefficient {source!r}: unknown symbol {nm!r}")
    fn = sp.lambdify([sp.Symbol(n) for n in names], expr, modules="numpy")

    def coeff(pt):
        vals = point_symbol_values(pt)
        args = []
        for nm in names:
            if nm.startswith("bratio_"):
                if root_system is None:
                    raise UnresolvableFrameField(f"coefficient {source!r} needs root-system context")
                args.append(root_system.b_ratio(getattr(pt, "zh"), int(nm.split("_")[1]) - 1))
            else:
                try:
                    args.append(vals[nm])
                except KeyError:
                    raise UnresolvableFrameField(
                        f"coefficient {source!r}: point has no coordinate {nm!r}"
                    ) from None
        return complex(fn(*args))

    return coeff


@dataclass(frozen=True, eq=False)
class BivectorTerm:
    a: object
    b: object
    coeff: object          # callable(pt) -> complex
    json_entry: dict | None = None


@dataclass(frozen=True, eq=False)
class BivectorSpec:
    """A bivector Lambda = sum coeff * A ^ B given by named frame fields."""

    terms: tuple[BivectorTerm, ...]

    @classmethod
    def from_terms(cls, triples, algebra=None, root_system=None):
        """Build from (a, b, coeff) triples; names and string/constant coefficients allowed."""
        out = []
        for a, b, co in triples:
            entry = None
            if isinstance(a, str) and isinstance(b, str) and isinstance(co, (str, int, float)):
                entry = {"a": a, "b": b, "coeff": str(co)}
            if isinstance(a, str):
                a = resolve_frame(a, algebra, root_system)
            if isinstance(b, str):
                b = resolve_frame(b, algebra, root_system)
            if isinstance(co, (int, float, complex)):
                value = complex(co)
                co = (lambda v: (lambda pt: v))(value)
            elif isinstance(co, str):
                co = compile_coefficient(co, root_system)
            out.append(BivectorTerm(a, b, co, json_entry=entry))
        return cls(terms=tuple(out))

    @classmethod
    def from_json(cls, data, algebra=None, root_system=None):
        """Load [{"a": "R_1", "b": "dx_1", "coeff": "-1"}, ...]."""
        return cls.from_terms(
            [(d["a"], d["b"], d["coeff"]) for d in data], algebra, root_system
        )

    def to_json(self):
        if any(t.json_entry is None for t in self.terms):
            raise ExpressionParseError("spec contains non-serializable terms")
        return [dict(t.json_entry) for t in self.terms]


def bivector_bracket(spec: BivectorSpec, f, g, pt, step: float = DEFAULT_STEP) -> float:
    """{f, g}(pt) = sum over wedge terms of coeff(pt) * [(Af)(Bg) - (Ag)(Bf)]."""
    total = 0j
    for term in spec.terms:
        af = term.a.apply(f, pt, step)
        ag = term.a.apply(g, pt, step)
        bf = term.b.apply(f, pt, step)
        bg = term.b.apply(g, pt, step)
        total += term.coeff(pt) * (af * bg - ag * bf)
    return float(_finite(total).real)


# ---------------------------------------------------------------------------
# concrete engines

def _partials(f, x: np.ndarray, step: float) -> np.ndarray:
    out = np.empty(len(x))
    for j in range(len(x)):
        h = step * max(1.0, abs(float(x[j])))
        up = x.copy()
        dn = x.copy()
        up[j] += h
        dn[j] -= h
        out[j] = (f(up) - f(dn)) / (2 * h)
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("finite-difference partials are not finite")
    return out


def lie_poisson_bracket(L: LieAlgebra, f, g, x, step: float = DEFAULT_STEP) -> float:
    """Lie-Poisson bracket on g*: {f, g}(x) = -sum_ijk x^i c^i_jk df/dx^j dg/dx^k.

    Fields are callables of the coordinate vector.  The contraction runs over
    j < k with the antisymmetrized tensor, so {f, g} = -{g, f} holds exactly.
    """
    x = np.asarray(x, dtype=float)
    W = -np.einsum("i,ijk->jk", x, L.c)
    df = _partials(f, x, step)
    dg = _partials(g, x, step)
    n = L.dim
    total = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            if W[j, k] != 0.0:
                total += W[j, k] * (df[j] * dg[k] - df[k] * dg[j])
    return float(_finite(complex(total)).real)


def _right_derivatives(L: LieAlgebra, f, pt: TrivializedCovector, step: float) -> np.ndarray:
    out = np.empty(L.dim)
    direction = np.zeros(L.dim)
    for i in range(L.dim):
        direction[:] = 0.0
        direction[i] = 1.0
        plus, minus = _displacement_pair(L, direction.copy(), step)
        fp = f(dataclasses.replace(pt, g=GroupElement(plus @ pt.g.matrix, L)))
        fm = f(dataclasses.replace(pt, g=GroupElement(minus @ pt.g.matrix, L)))
        out[i] = (fp - fm) / (2 * step)
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("right-invariant derivatives are not finite")
    return out


def tstar_g_bracket(L: LieAlgebra, f, g, pt: TrivializedCovector, step: float = DEFAULT_STEP) -> float:
    """Full trivialized T*G bracket at (x, g) in g* x G.

    {f, g} = -[ sum_i (R_i f) dg/dx^i - sum_i (R_i g) df/dx^i
                + sum_ijk x^i c^i_jk df/dx^j dg/dx^k ],
    where R_i differentiates the group argument along the right-invariant
    field of X_i.  Fields are callables of a TrivializedCovector.
    """
    x = pt.x
    dfx = _partials(lambda xx: f(dataclasses.replace(pt, x=xx)), np.asarray(x, float), step)
    dgx = _partials(lambda xx: g(dataclasses.replace(pt, x=xx)), np.asarray(x, float), step)
    rf = _right_derivatives(L, f, pt, step)
    rg = _right_derivatives(L, g, pt, step)
    C = np.einsum("i,ijk->jk", np.asarray(x, float), L.c)
    total = 0.0
    for i in range(L.dim):
        total += rf[i] * dgx[i] - rg[i] * dfx[i]
    for j in range(L.dim):
        for k in range(j + 1, L.dim):
            if C[j, k] != 0.0:
                total += C[j, k] * (dfx[j] * dgx[k] - dfx[k] * dgx[j])
    return float(_finite(complex(-total)).real)


def tstar_bivector_spec(L: LieAlgebra) -> BivectorSpec:
    """The trivialized T*G bracket as a serializable bivector spec.

    Lambda = -sum_i R_i ^ dx_i - 1/2 sum_ijk x^i c^i_jk dx_j ^ dx_k, with the
    half absorbed by enumerating j < k.  Coefficients use the expression
    grammar, so the spec round-trips through JSON.
    """
    triples = []
    for i in range(L.dim):
        triples.append((f"R_{i + 1}", f"dx_{i + 1}", "-1"))
    for j in range(L.dim):
        for k in range(j + 1, L.dim):
            parts = [
                f"({-L.c[i, j, k]:.17g})*x{i + 1}"
                for i in range(L.dim)
                if L.c[i, j, k] != 0.0
            ]
            if parts:
                triples.append((f"dx_{j + 1}", f"dx_{k + 1}", " + ".join(parts)))
    return BivectorSpec.from_terms(triples, algebra=L)


def hamiltonian_vector_field(bracket, H, pt, coords) -> np.ndarray:
    """Components of the Hamiltonian vector field: z_dot_a = {H, z_a}(pt).

    ``bracket`` is an engine callable (f, g, pt) -> real; ``coords`` lists the
    coordinate fields covering the space.  With the canonical bivector
    sum_j dp_j ^ dq_j this yields q_dot = dH/dp, p_dot = -dH/dq.
    """
    return np.array([bracket(H, z, pt) for z in coords])


def jacobiator(bracket, f, g, h, pt, step: float = JACOBI_STEP) -> float:
    """{{f,g},h} + {{g,h},f} + {{h,f},g} via nested finite differences."""

    def nested(u, v):
        return lambda q: bracket(u, v, q, step)

    return (
        bracket(nested(f, g), h, pt, step)
        + bracket(nested(g, h), f, pt, step)
        + bracket(nested(h, f), g, pt, step)
    )
