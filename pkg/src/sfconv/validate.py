"""Exactness gate: random integer trials, and repair of inconsistent matrices."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations

import numpy as np

from .rational import RationalMatrix, solve_exact
from .spec import AlgorithmSpec, CatalogIntegrityError, identity_residual


@dataclass
class ValidationReport:
    name: str
    trials: int
    seed: int
    mismatches: int = 0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def to_json(self) -> dict:
        return {"algorithm": self.name, "trials": self.trials, "seed": self.seed,
                "passed": self.passed, "mismatches": self.mismatches,
                "counterexample": self.counterexample}


def correlate2d_valid(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Valid 2-D correlation over the trailing axes; works for int64 and object arrays."""
    R = f.shape[-1]
    oh, ow = x.shape[-2] - R + 1, x.shape[-1] - f.shape[-2] + 1
    out = None
    for k in range(f.shape[-2]):
        for l in range(R):
            term = x[..., k:k + oh, l:l + ow] * f[..., k:k + 1, l:l + 1]
            out = term if out is None else out + term
    return out


def _bound(spec: AlgorithmSpec, lim: int) -> int:
    def l1(m: RationalMatrix):
        return max(sum(abs(v) for v in row) for row in m.num)
    u = lim * l1(spec.BT) ** 2
    v = lim * l1(spec.G) ** 2
    a = max(abs(v) for row in spec.A.num for v in row)
    return spec.T * spec.T * a * a * u * v


def exact_outputs(spec: AlgorithmSpec, x: np.ndarray, f: np.ndarray):
    """A^T[(G f G^T) * (B^T x B)]A over the rationals for integer tiles.

    x is [..., L, L] and f is [..., R, R]; the result is returned as an
    integer array `num` plus the common denominator, so value = num / den.
    """
    lim = int(max(np.abs(x).max(initial=0), np.abs(f).max(initial=0), 1))
    dtype = np.int64 if _bound(spec, lim) < 2**62 else object
    bt = spec.BT.numerators().astype(dtype)
    g = spec.G.numerators().astype(dtype)
    a = spec.A.numerators().astype(dtype)
    x = np.asarray(x).astype(dtype)
    f = np.asarray(f).astype(dtype)
    u = bt @ x @ bt.T
    v = g @ f @ g.T
    y = a.T @ (u * v) @ a
    den = (spec.BT.den * spec.G.den * spec.A.den) ** 2
    return y, den


def validate_algorithm(spec: AlgorithmSpec, trials: int = 1000, seed: int = 0, lim: int = 8) -> ValidationReport:
    """Compare the fast algorithm with direct correlation on random integer tiles, exactly."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    L, R = spec.L, spec.R
    x = rng.integers(-lim, lim + 1, size=(trials, L, L), dtype=np.int64)
    f = rng.integers(-lim, lim + 1, size=(trials, R, R), dtype=np.int64)
    got, den = exact_outputs(spec, x, f)
    want = correlate2d_valid(x.astype(got.dtype), f.astype(got.dtype)) * den
    bad = np.nonzero((got != want).reshape(trials, -1).any(axis=1))[0]
    report = ValidationReport(spec.name, trials, seed, int(len(bad)))
    if len(bad):
        t = int(bad[0])
        report.counterexample = {
            "trial": t, "x": x[t].tolist(), "f": f[t].tolist(),
            "got": [[str(Fraction(int(v), den)) for v in row] for row in got[t]],
            "expected": [[str(Fraction(int(v), den)) for v in row] for row in want[t]],
        }
    return report


# -- repair -------------------------------------------------------------------------

@dataclass(frozen=True)
class EntryChange:
    matrix: str
    row: int
    col: int
    old: Fraction | None
    new: Fraction | None

    def __str__(self):
        old = "absent" if self.old is None else str(self.old)
        new = "dropped" if self.new is None else str(self.new)
        return f"{self.matrix}[{self.row},{self.col}]: {old} -> {new}"


def _closest(rows, rhs, published):
    """Solution of rows @ u = rhs with the fewest entries differing from `published`."""
    sol = solve_exact(rows, rhs)
    if sol is None:
        return None
    u0, null = sol
    if published is None:
        return u0
    n = len(u0)
    if not null:
        return u0
    for size in range(0, min(n, 4) + 1):
        for free in combinations(range(n), size):
            fixed = [j for j in range(n) if j not in free]
            sub_rows = [[r[j] for j in free] for r in rows]
            sub_rhs = [b - sum((r[j] * published[j] for j in fixed), Fraction(0)) for r, b in zip(rows, rhs)]
            if not free:
                if all(v == 0 for v in sub_rhs):
                    return list(published)
                continue
            s = solve_exact(sub_rows, sub_rhs)
            if s is not None:
                u = list(published)
                for j, v in zip(free, s[0]):
                    u[j] = v
                return u
    return u0


def _solve_A(BT, G, M, R, pub):
    T, L = len(BT), M + R - 1
    rows = [[G[t][k] * BT[t][l] for t in range(T)] for k in range(R) for l in range(L)]
    cols = []
    for i in range(M):
        rhs = [Fraction(int(l == i + k)) for k in range(R) for l in range(L)]
        p = [pub[t][i] for t in range(T)] if pub is not None else None
        c = _closest(rows, rhs, p)
        if c is None:
            return None
        cols.append(c)
    return [[cols[i][t] for i in range(M)] for t in range(T)]


def _solve_BT(A, G, M, R, pub):
    T, L = len(A), M + R - 1
    rows = [[A[t][i] * G[t][k] for t in range(T)] for i in range(M) for k in range(R)]
    cols = []
    for l in range(L):
        rhs = [Fraction(int(l == i + k)) for i in range(M) for k in range(R)]
        p = [pub[t][l] for t in range(T)] if pub is not None else None
        c = _closest(rows, rhs, p)
        if c is None:
            return None
        cols.append(c)
    return [[cols[l][t] for l in range(L)] for t in range(T)]


def _solve_G(A, BT, M, R, pub):
    T, L = len(A), M + R - 1
    rows = [[A[t][i] * BT[t][l] for t in range(T)] for i in range(M) for l in range(L)]
    cols = []
    for k in range(R):
        rhs = [Fraction(int(l == i + k)) for i in range(M) for l in range(L)]
        p = [pub[t][k] for t in range(T)] if pub is not None else None
        c = _closest(rows, rhs, p)
        if c is None:
            return None
        cols.append(c)
    return [[cols[k][t] for k in range(R)] for t in range(T)]


def _diff(name, old: RationalMatrix, new: list) -> list[EntryChange]:
    """Changed entries over the overlapping region; entries outside it are new or dropped."""
    out = []
    oldf = old.fractions()
    rows, cols = len(new), len(new[0])
    for r in range(max(rows, old.rows)):
        for c in range(max(cols, old.cols)):
            prev = oldf[r][c] if r < old.rows and c < old.cols else None
            if r < rows and c < cols:
                if prev != new[r][c]:
                    out.append(EntryChange(name, r, c, prev, new[r][c]))
            else:
                out.append(EntryChange(name, r, c, prev, None))
    return out


def _cost(old: RationalMatrix, new: list, changes) -> int:
    # a wrong shape counts as every entry changed
    if old.shape != (len(new), len(new[0])):
        return len(new) * len(new[0]) + old.rows * old.cols
    return len(changes)


def repair_matrices(BT: RationalMatrix, G: RationalMatrix, A: RationalMatrix, M: int, R: int):
    """Make (B^T, G, A) satisfy the exactness identity by re-solving one matrix.

    Each matrix in turn is treated as unknown with the other two fixed; the
    exact linear system is solved column by column, preferring solutions that
    keep published entries.  The option changing the fewest entries wins
    (a wrong shape counts as every entry changed).
    Returns (BT, G, A, changes).
    """
    if not identity_residual(BT, G, A, M, R):
        return BT, G, A, []
    L = M + R - 1
    options = []
    a_pub = A.fractions() if A.cols == M else None
    bt_pub = BT.fractions() if BT.cols == L else None
    g_pub = G.fractions() if G.cols == R else None
    if BT.cols == L and G.cols == R:
        new = _solve_A(BT.fractions(), G.fractions(), M, R, a_pub)
        if new is not None:
            options.append(("A", new, _diff("A", A, new), _cost(A, new, _diff("A", A, new))))
    if A.cols == M and G.cols == R:
        new = _solve_BT(A.fractions(), G.fractions(), M, R, bt_pub)
        if new is not None:
            options.append(("BT", new, _diff("BT", BT, new), _cost(BT, new, _diff("BT", BT, new))))
    if A.cols == M and BT.cols == L:
        new = _solve_G(A.fractions(), BT.fractions(), M, R, g_pub)
        if new is not None:
            options.append(("G", new, _diff("G", G, new), _cost(G, new, _diff("G", G, new))))
    if not options:
        raise CatalogIntegrityError("no single matrix can be re-solved to satisfy the exactness identity")
    which, new, changes, _ = min(options, key=lambda o: o[3])
    fixed = RationalMatrix.from_fractions(new)
    mats = {"BT": BT, "G": G, "A": A, which: fixed}
    if identity_residual(mats["BT"], mats["G"], mats["A"], M, R):
        raise CatalogIntegrityError("repaired matrices still fail the exactness identity")
    return mats["BT"], mats["G"], mats["A"], changes


def repair_matrix(spec: AlgorithmSpec) -> AlgorithmSpec:
    """Return a spec passing the exactness gate; `notes` carries the diff log."""
    BT, G, A, changes = repair_matrices(spec.BT, spec.G, spec.A, spec.M, spec.R)
    if not changes:
        return spec
    notes = spec.notes + tuple(f"repaired {c}" for c in changes)
    return replace(spec, BT=BT, G=G, A=A, notes=notes)
