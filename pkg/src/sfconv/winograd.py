"""Toom-Cook / Winograd minimal filtering from interpolation points."""
from __future__ import annotations

import math
from fractions import Fraction

from .rational import ConfigurationError, RationalMatrix
from .spec import CatalogIntegrityError, identity_residual, make_spec

INF = "inf"

# Default point sets; the last point is always infinity.
DEFAULT_ROOTS = {
    (2, 3): [0, 1, -1, INF],
    (3, 3): [0, 1, -1, 2, INF],
    (4, 3): [0, 1, -1, 2, -2, INF],
    (2, 5): [0, 1, -1, 2, -2, INF],
    (2, 7): [0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), INF],
}


def _is_inf(p) -> bool:
    return p is None or p == INF or (isinstance(p, float) and math.isinf(p))


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _monic_product(points):
    poly = [Fraction(1)]
    for q in points:
        poly = _poly_mul(poly, [-q, Fraction(1)])
    return poly


def parse_roots(roots) -> list:
    out = []
    for p in roots:
        if _is_inf(p):
            out.append(INF)
        elif isinstance(p, str):
            out.append(Fraction(p))
        elif isinstance(p, float):
            out.append(Fraction(p).limit_denominator(1000))
        else:
            out.append(Fraction(p))
    return out


def generate_winograd(M: int, R: int, roots=None, name: str | None = None):
    """F(M, R) in correlation form.

    Rows of B^T are the monic Lagrange numerators prod_{j != i}(x - p_j) in
    increasing powers; the infinity row is the full product.  M = 1 is the
    direct dot product (identity transforms).
    """
    if M < 1 or R < 1:
        raise ConfigurationError("M and R must be positive")
    L = M + R - 1
    name = name or f"wino-{M}x{M}-{R}x{R}"
    if M == 1:
        eye = RationalMatrix.identity(R)
        ones = RationalMatrix.from_rows([[1]] * R)
        return make_spec(name, "winograd", R, 1, R, eye, eye, ones, eye)
    roots = parse_roots(roots if roots is not None else DEFAULT_ROOTS.get((M, R), []))
    if len(roots) != L:
        raise ConfigurationError(f"F({M},{R}) needs {L} points, got {len(roots)}")
    finite = [p for p in roots if p != INF]
    if len(set(finite)) != len(finite) or len(roots) - len(finite) > 1:
        raise ConfigurationError("interpolation points must be distinct")
    has_inf = len(finite) < L

    bt, g, a = [], [], []
    for i, p in enumerate(finite):
        others = finite[:i] + finite[i + 1:]
        num = _monic_product(others)
        bt.append(num + [Fraction(0)] * (L - len(num)))
        denom = Fraction(1)
        for q in others:
            denom *= p - q
        g.append([p**k / denom for k in range(R)])
        a.append([p**m for m in range(M)])
    if has_inf:
        bt.append(_monic_product(finite))
        g.append([Fraction(0)] * (R - 1) + [Fraction(1)])
        a.append([Fraction(int(m == M - 1)) for m in range(M)])
    BT = RationalMatrix.from_fractions(bt)
    G = RationalMatrix.from_fractions(g)
    A = RationalMatrix.from_fractions(a)
    if identity_residual(BT, G, A, M, R):
        raise CatalogIntegrityError(f"{name}: generated matrices fail the exactness identity")
    spec = make_spec(name, "winograd", L, M, R, BT, G, A, BT)
    return spec
