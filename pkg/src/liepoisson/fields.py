"""Scalar fields and the small coordinate-expression grammar.

Expressions are parsed with sympy over a declared set of coordinate symbols
(e.g. ``x1..xn`` on the dual of the algebra, ``q1,p1,I1,...`` on the reduced
Wong phase space) and compiled to fast numeric callables.  The grammar covers
constants, coordinates, sums, products and powers; anything referencing an
undeclared symbol is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .errors import ExpressionParseError


@dataclass(frozen=True, eq=False)
class CompiledExpression:
    """A parsed expression together with its coordinate-name order."""

    source: str
    names: tuple[str, ...]
    _fn: object

    def __call__(self, values) -> float:
        return float(self._fn(*values))

    def eval_map(self, mapping) -> complex:
        return complex(self._fn(*[mapping[n] for n in self.names]))


def compile_expression(source: str, names) -> CompiledExpression:
    """Parse ``source`` over the coordinate symbols ``names``."""
    names = tuple(names)
    symbols = {n: sp.Symbol(n) for n in names}
    try:
        expr = sp.sympify(source, locals=dict(symbols), rational=False)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ExpressionParseError(f"cannot parse {source!r}: {exc}") from exc
    stray = {str(s) for s in expr.free_symbols} - set(names)
    if stray:
        raise ExpressionParseError(
            f"expression {source!r} uses unknown coordinates {sorted(stray)}; "
            f"allowed: {list(names)}"
        )
    fn = sp.lambdify([symbols[n] for n in names], expr, modules="numpy")
    return CompiledExpression(source=source, names=names, _fn=fn)


def indexed_names(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def gradient_expressions(source: str, names) -> list[CompiledExpression]:
    """Exact partial derivatives of an expression, one per coordinate."""
    names = tuple(names)
    symbols = {n: sp.Symbol(n) for n in names}
    try:
        expr = sp.sympify(source, locals=dict(symbols), rational=False)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ExpressionParseError(f"cannot parse {source!r}: {exc}") from exc
    out = []
    for n in names:
        d = sp.diff(expr, symbols[n])
        fn = sp.lambdify([symbols[m] for m in names], d, modules="numpy")
        out.append(CompiledExpression(source=f"d({source})/d{n}", names=names, _fn=fn))
    return out


def point_symbol_values(pt) -> dict[str, float]:
    """Coordinate-symbol values exposed by a phase-space point.

    Covers whichever blocks the point carries: x (dual coordinates),
    q, p, I and zh, plus ``gtrre``/``gtrim`` (real and imaginary parts of
    tr g) when a group slot is present.
    """
    values: dict[str, float] = {}
    for block, prefix in (("x", "x"), ("q", "q"), ("p", "p"), ("I", "I"), ("zh", "zh")):
        arr = getattr(pt, block, None)
        if arr is not None:
            for i, v in enumerate(np.atleast_1d(arr)):
                values[f"{prefix}{i + 1}"] = float(v)
    g = getattr(pt, "g", None)
    if g is not None:
        tr = np.trace(g.matrix)
        values["gtrre"] = float(tr.real)
        values["gtrim"] = float(tr.imag)
    return values
