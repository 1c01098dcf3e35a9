"""Linear convolution from a cyclic symbolic-DFT convolution plus correction terms.

An N-point window of the input tile is transformed; its cyclic correlation
with the filter gives N outputs, some of which mix in wrapped-around inputs.
Output i reuses cyclic output j = (i - p) mod N and, for every tap m whose
input index falls outside the window, adds one product

    (x[i + m] - x[p + (j + m) mod N]) * w[m]

which swaps the wrapped input for the intended one.  The output matrix A is
then solved exactly.
"""
from __future__ import annotations

from fractions import Fraction

from .rational import ConfigurationError, RationalMatrix
from .sft import CONJ, SymbolicDftPlan, build_sft
from .poly import KERNELS
from .spec import AlgorithmSpec, CatalogIntegrityError, identity_residual, make_spec
from .validate import _solve_A


def _corrections(M: int, R: int, N: int, p: int):
    out = []
    for i in range(M):
        j = (i - p) % N
        for m in range(R):
            wrapped = p + (j + m) % N
            if i + m != wrapped:
                out.append((i, m, i + m, wrapped))
    return out


def best_window(M: int, R: int, N: int) -> int:
    L = M + R - 1
    return min(range(L - N + 1), key=lambda p: (len(_corrections(M, R, N, p)), p))


def sfc_overlap_output(BT: RationalMatrix, plan: SymbolicDftPlan) -> RationalMatrix:
    """Square output transform of the overlapped form.

    The SFT rows at the transform window plus each distinct correction row.
    Its condition number bounds how multiply errors grow at the output.
    """
    N = plan.points
    rows = BT.fractions()
    L = BT.cols
    dc = next((r for r in rows if sum(1 for v in r if v) == N and all(v in (0, 1) for v in r)), None)
    if dc is None:
        raise ConfigurationError("no DC row found in B^T")
    p = next(c for c, v in enumerate(dc) if v)
    sq = []
    for frow in plan.F.fractions():
        sq.append([Fraction(0)] * p + frow + [Fraction(0)] * (L - p - N))
    seen = set()
    for r in rows:
        if any(v for c, v in enumerate(r) if c < p or c >= p + N):
            key = tuple(r)
            neg = tuple(-v for v in r)
            if key not in seen and neg not in seen:
                seen.add(key)
                sq.append(list(r))
    if len(sq) != L:
        raise ConfigurationError(f"overlapped form has {len(sq)} rows for {L} inputs")
    return RationalMatrix.from_fractions(sq)


def _direct_rows(plan: SymbolicDftPlan, M: int, R: int, p: int):
    N = plan.points
    L = M + R - 1
    F = plan.F.fractions()
    conj = CONJ[N]

    def place(frow):
        return [Fraction(0)] * p + list(frow) + [Fraction(0)] * (L - p - N)

    bt, g = [], []
    real = plan.real_rows
    # DC first, then each conjugate pair expanded for three multiplications, then the rest
    bt.append(place(F[real[0]]))
    g.append(list(F[real[0]][:R]))
    for a, b in plan.pairs:
        eu, ew, _ = KERNELS[N]
        fa, fb = F[a], F[b]
        wa, wb = F[a][:R], F[b][:R]
        # filter side uses the conjugate frequency
        ca = [conj[0][0] * x + conj[0][1] * y for x, y in zip(wa, wb)]
        cb = [conj[1][0] * x + conj[1][1] * y for x, y in zip(wa, wb)]
        for e_in, e_w in zip(eu, ew):
            bt.append(place([int(e_in[0]) * x + int(e_in[1]) * y for x, y in zip(fa, fb)]))
            g.append([int(e_w[0]) * x + int(e_w[1]) * y for x, y in zip(ca, cb)])
    for r in real[1:]:
        bt.append(place(F[r]))
        g.append(list(F[r][:R]))
    for i, m, want, wrapped in _corrections(M, R, N, p):
        row = [Fraction(0)] * L
        row[want] += 1
        row[wrapped] -= 1
        bt.append(row)
        g.append([Fraction(int(k == m)) for k in range(R)])
    return bt, g


def derive_correction_spec(base: SymbolicDftPlan | int, M: int, R: int, name: str | None = None) -> AlgorithmSpec:
    """SFC-N(M, R) built from the base transform with correction rows."""
    plan = base if isinstance(base, SymbolicDftPlan) else build_sft(base)
    N = plan.points
    name = name or f"sfc{N}-{M}x{M}-{R}x{R}"
    if M < 1 or R < 1:
        raise ConfigurationError("M and R must be positive")
    if R > N:
        # transpose duality: F(M, R) from F(R, M) by swapping the roles of G and A
        if M > N:
            raise ConfigurationError(f"neither M={M} nor R={R} fits a {N}-point transform")
        dual = derive_correction_spec(plan, R, M)
        spec = make_spec(name, "sfc", N, M, R, dual.BT, dual.A, dual.G, dual.overlap_output,
                         notes=(f"transpose dual of {dual.name}",))
        if identity_residual(spec.BT, spec.G, spec.A, M, R):
            raise CatalogIntegrityError(f"{name}: dual construction failed")
        return spec
    if M < N - R + 1:
        raise ConfigurationError(f"M={M} is below the {N - R + 1} valid cyclic outputs for R={R}")
    if M > 2 * N:
        raise ConfigurationError(f"M={M} is outside the constructible range for a {N}-point transform")
    p = best_window(M, R, N)
    bt, g = _direct_rows(plan, M, R, p)
    BT = RationalMatrix.from_fractions(bt)
    G = RationalMatrix.from_fractions(g)
    a = _solve_A(BT.fractions(), G.fractions(), M, R, None)
    if a is None:
        raise CatalogIntegrityError(f"{name}: no output transform exists for these rows")
    A = RationalMatrix.from_fractions(a)
    if identity_residual(BT, G, A, M, R):
        raise CatalogIntegrityError(f"{name}: derived matrices fail the exactness identity")
    return make_spec(name, "sfc", N, M, R, BT, G, A, sfc_overlap_output(BT, plan),
                     notes=(f"derived with window offset {p}",))
