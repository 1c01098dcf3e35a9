"""Multiplication savings from conjugate-pair symmetry in 2-D.

A triple of transform rows (i, j, k) whose k-th input row, filter row and the
output contribution are all determined by rows i and j computes one product in
a two-dimensional commutative algebra K (a stand-in for complex numbers)
using three real multiplications.  In 2-D, a triple-by-triple block is an
element of K (x) K, which splits as K x K through
    x (x) y  ->  (x * y,  x * conj(y)),
so the block needs two K-products (six multiplications) instead of nine.
Everything here is exact over the rationals; the float path only consumes the
resulting coefficient matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import isqrt

import numpy as np

from .rational import solve_exact

Fr = Fraction


def _rank(rows) -> int:
    m = [list(map(Fr, r)) for r in rows]
    rank, col, ncols = 0, 0, len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def _combo(target, u, v):
    """(alpha, beta) with target = alpha*u + beta*v, or None."""
    sol = solve_exact([[a, b] for a, b in zip(u, v)], list(target))
    if sol is None or sol[1]:
        return None
    return sol[0]


def _inv2(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    if det == 0:
        return None
    return [[d / det, -b / det], [-c / det, a / det]]


def _mv(m, v):
    return [sum((a * b for a, b in zip(row, v)), Fr(0)) for row in m]


def _sqrt_fraction(q: Fraction):
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fr(n, d)
    return None


@dataclass(frozen=True)
class Triple:
    """One symmetric row triple with its 2-D algebra."""

    rows: tuple  # (i, j, k): k is determined by i and j
    Eu: tuple    # 3x2, input-side expansion
    Ew: tuple    # 3x2, filter-side expansion
    C: tuple     # 2x3, products -> algebra coordinates
    S: tuple     # 3x2, right inverse of C
    Rinv: tuple  # 2x2
    Linv: tuple  # 2x2
    unit: tuple
    gen: tuple
    tau: Fraction
    nu: Fraction
    R: tuple     # 2x2: a -> m(a, b0)
    L: tuple     # 2x2: b -> m(a0, b)

    def m(self, a, b):
        ua = _mv(self.Eu, a)
        wb = _mv(self.Ew, b)
        return _mv(self.C, [x * y for x, y in zip(ua, wb)])

    def mul(self, x, y):
        return self.m(_mv(self.Rinv, x), _mv(self.Linv, y))

    def conj_matrix(self):
        """sigma in the standard basis: fixes the unit, sends gen to tau*unit - gen."""
        basis = [list(self.unit), list(self.gen)]
        bmat = [[basis[0][0], basis[1][0]], [basis[0][1], basis[1][1]]]
        binv = _inv2(bmat)
        smap = [[Fr(1), self.tau], [Fr(0), Fr(-1)]]  # columns: images of unit, gen in (unit, gen) coords
        prod = [[sum(bmat[r][t] * smap[t][c] for t in range(2)) for c in range(2)] for r in range(2)]
        return [[sum(prod[r][t] * binv[t][c] for t in range(2)) for c in range(2)] for r in range(2)]

    @property
    def disc(self) -> Fraction:
        return self.tau * self.tau - 4 * self.nu


def _build_triple(bt, g, a, i, j, k):
    ab = _combo(bt[k], bt[i], bt[j])
    gw = _combo(g[k], g[i], g[j])
    if ab is None or gw is None or 0 in ab or 0 in gw:
        return None
    if _rank([bt[i], bt[j]]) < 2 or _rank([g[i], g[j]]) < 2:
        return None
    cols = [[a[i][m], a[j][m], a[k][m]] for m in range(len(a[i]))]
    if _rank(cols) != 2:
        return None
    r1 = next(c for c in cols if any(c))
    r2 = next(c for c in cols if _rank([r1, c]) == 2)
    C = [r1, r2]
    # right inverse S (3x2) with C S = I
    S_cols = []
    for e in ([1, 0], [0, 1]):
        sol = solve_exact(C, [Fr(v) for v in e])
        S_cols.append(sol[0])
    S = [[S_cols[0][r], S_cols[1][r]] for r in range(3)]
    Eu = [[Fr(1), Fr(0)], [Fr(0), Fr(1)], list(ab)]
    Ew = [[Fr(1), Fr(0)], [Fr(0), Fr(1)], list(gw)]

    def m(x, y):
        ua, wb = _mv(Eu, x), _mv(Ew, y)
        return _mv(C, [p * q for p, q in zip(ua, wb)])

    cands = [[Fr(1), Fr(0)], [Fr(0), Fr(1)], [Fr(1), Fr(1)], [Fr(1), Fr(-1)]]
    found = None
    for a0 in cands:
        Lm = [[m(a0, e)[r] for e in ([1, 0], [0, 1])] for r in range(2)]
        if _inv2(Lm) is None:
            continue
        for b0 in cands:
            Rm = [[m(e, b0)[r] for e in ([1, 0], [0, 1])] for r in range(2)]
            if _inv2(Rm) is not None:
                found = (a0, b0, Lm, Rm)
                break
        if found:
            break
    if found is None:
        return None
    a0, b0, Lm, Rm = found
    Linv, Rinv = _inv2(Lm), _inv2(Rm)

    def mul(x, y):
        return m(_mv(Rinv, x), _mv(Linv, y))

    unit = m(a0, b0)
    gen = next(e for e in ([Fr(1), Fr(0)], [Fr(0), Fr(1)]) if _rank([unit, e]) == 2)
    sq = mul(gen, gen)
    coef = _combo(sq, gen, unit) if _rank([gen, unit]) == 2 else None
    if coef is None:
        return None
    tau, minus_nu = coef
    nu = -minus_nu
    basis = ([Fr(1), Fr(0)], [Fr(0), Fr(1)])
    # commutativity and associativity of the recovered product
    for x in basis:
        for y in basis:
            if mul(x, y) != mul(y, x):
                return None
            for z in basis:
                if mul(mul(x, y), z) != mul(x, mul(y, z)):
                    return None
    if tau * tau - 4 * nu == 0:
        return None
    return Triple((i, j, k), tuple(map(tuple, Eu)), tuple(map(tuple, Ew)), tuple(map(tuple, C)),
                  tuple(map(tuple, S)), tuple(map(tuple, Rinv)), tuple(map(tuple, Linv)),
                  tuple(unit), tuple(gen), tau, nu, tuple(map(tuple, Rm)), tuple(map(tuple, Lm)))


def find_triples(spec) -> list[Triple]:
    """Disjoint symmetric row triples of a spec, scanned in row order."""
    return list(_find_triples_cached(spec.BT, spec.G, spec.A))


@lru_cache(maxsize=None)
def _find_triples_cached(BT, G, A) -> tuple:
    bt, g, a = BT.fractions(), G.fractions(), A.fractions()
    T = len(bt)
    used: set[int] = set()
    out = []
    for k in range(T):
        if k in used:
            continue
        for i, j in combinations([r for r in range(k) if r not in used], 2):
            tr = _build_triple(bt, g, a, i, j, k)
            if tr is not None:
                out.append(tr)
                used.update((i, j, k))
                break
    return tuple(out)


def _isomorphism(src: Triple, dst: Triple):
    """2x2 matrix of an algebra isomorphism K_src -> K_dst, or None."""
    # dst element h = tau_s/2 * e + c * (g - tau_d/2 * e) satisfies h^2 = tau_s h - nu_s e
    ratio = src.disc / dst.disc
    c = _sqrt_fraction(ratio)
    if c is None:
        return None
    e_d, g_d = list(dst.unit), list(dst.gen)
    h = [src.tau / 2 * e_d[r] + c * (g_d[r] - dst.tau / 2 * e_d[r]) for r in range(2)]
    # map src basis (unit, gen) -> (e_d, h)
    bsrc = [[src.unit[0], src.gen[0]], [src.unit[1], src.gen[1]]]
    binv = _inv2(bsrc)
    img = [[e_d[0], h[0]], [e_d[1], h[1]]]
    phi = [[sum(img[r][t] * binv[t][c2] for t in range(2)) for c2 in range(2)] for r in range(2)]
    if dst.mul(_mv(phi, src.gen), _mv(phi, src.gen)) != _mv(phi, src.mul(src.gen, src.gen)):
        return None
    return phi


@dataclass(frozen=True)
class BlockPlan:
    """Exact coefficient matrices for one triple-by-triple block."""

    I: Triple
    J: Triple
    Rl: np.ndarray    # 2x2, left factor of X = Rl U Rr^T
    Rr: np.ndarray
    Ll: np.ndarray
    Lr: np.ndarray
    psi: np.ndarray   # 4x4, vec(X) -> (psi1, psi2)
    psi_inv: np.ndarray
    mul_in: np.ndarray   # 3x2, x -> products operand (Eu Rinv)
    mul_w: np.ndarray    # 3x2, y -> products operand (Ew Linv)
    C: np.ndarray        # 2x3
    Sl: np.ndarray       # 3x2
    Sr: np.ndarray


def _f(m):
    return np.array([[float(v) for v in row] for row in m])


def _block_plan(I: Triple, J: Triple):
    phi = [[Fr(1), Fr(0)], [Fr(0), Fr(1)]] if I is J else _isomorphism(J, I)
    if phi is None:
        return None
    sig = I.conj_matrix()
    cols = []
    for r in range(2):
        for s in range(2):
            er = [Fr(int(r == 0)), Fr(int(r == 1))]
            es = [Fr(int(s == 0)), Fr(int(s == 1))]
            fs = _mv(phi, es)
            cols.append(I.mul(er, fs) + I.mul(er, _mv(sig, fs)))
    psi = [[cols[c][r] for c in range(4)] for r in range(4)]
    if _rank(psi) < 4:
        return None
    psi_f = _f(psi)
    from .rational import RationalMatrix
    psi_inv = RationalMatrix.from_fractions(psi).inverse().to_float()
    mul_in = _f([[sum(I.Eu[r][t] * I.Rinv[t][c] for t in range(2)) for c in range(2)] for r in range(3)])
    mul_w = _f([[sum(I.Ew[r][t] * I.Linv[t][c] for t in range(2)) for c in range(2)] for r in range(3)])
    return BlockPlan(I, J, _f(I.R), _f(J.R), _f(I.L), _f(J.L), psi_f, psi_inv,
                     mul_in, mul_w, _f(I.C), _f(I.S), _f(J.S))


def _lin(m: np.ndarray, items: list):
    """m @ items for a list of equally shaped arrays, fixed accumulation order."""
    out = []
    for row in m:
        acc = None
        for c, it in zip(row, items):
            if c == 0:
                continue
            term = it if c == 1 else (-it if c == -1 else c * it)
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else np.zeros_like(items[0]))
    return out


def _lin2(left: np.ndarray, block, right: np.ndarray):
    """left @ block @ right.T where block is a nested list of arrays."""
    rows = [_lin(right, list(r)) for r in block]
    cols = list(zip(*rows))
    res = [_lin(left, list(c)) for c in cols]
    return [list(r) for r in zip(*res)]


class SymmetryPlan:
    """Reduced 2-D element-wise product for a spec."""

    def __init__(self, spec):
        self.spec = spec
        self.triples = find_triples(spec)
        self.blocks = {}
        for I in self.triples:
            for J in self.triples:
                bp = _block_plan(I, J)
                if bp is not None:
                    self.blocks[(I.rows, J.rows)] = bp
        T = spec.T
        self.mask = np.ones((T, T), dtype=bool)
        for I, J in [(b.I, b.J) for b in self.blocks.values()]:
            for r in I.rows:
                for c in J.rows:
                    self.mask[r, c] = False

    @property
    def mults(self) -> int:
        return int(self.mask.sum()) + 6 * len(self.blocks)

    def multiply(self, U, V, mul):
        """Effective product array P (T x T leading axes) with A^T P A equal to the full result.

        `mul(u, v)` performs (and may count) element-wise products of payload arrays.
        """
        T = self.spec.T
        out = None
        direct = mul(U[self.mask], V[self.mask])
        out = np.zeros((T, T) + direct.shape[1:], dtype=direct.dtype)
        out[self.mask] = direct
        for bp in self.blocks.values():
            (i1, j1, _), (i2, j2, _) = bp.I.rows, bp.J.rows
            ub = [[U[i1, i2], U[i1, j2]], [U[j1, i2], U[j1, j2]]]
            vb = [[V[i1, i2], V[i1, j2]], [V[j1, i2], V[j1, j2]]]
            X = _lin2(bp.Rl, ub, bp.Rr)
            Y = _lin2(bp.Ll, vb, bp.Lr)
            xs = _lin(bp.psi, [X[0][0], X[0][1], X[1][0], X[1][1]])
            ys = _lin(bp.psi, [Y[0][0], Y[0][1], Y[1][0], Y[1][1]])
            zs = []
            for part in (slice(0, 2), slice(2, 4)):
                pa = _lin(bp.mul_in, xs[part])
                pw = _lin(bp.mul_w, ys[part])
                prods = mul(np.stack(pa), np.stack(pw))
                zs.extend(_lin(bp.C, list(prods)))
            w = _lin(bp.psi_inv, zs)
            W = [[w[0], w[1]], [w[2], w[3]]]
            P = _lin2(bp.Sl, W, bp.Sr)
            for a, r in enumerate(bp.I.rows):
                for b, c in enumerate(bp.J.rows):
                    out[r, c] = P[a][b]
        return out
