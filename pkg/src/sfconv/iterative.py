"""Large-kernel depthwise convolution by nesting two fast algorithms.

The kernel is cut into R_in x R_in tiles at stride s = R_in and the output
into overlapping M_in x M_in tiles at the same stride.  Output o = s*a + b and
tap k = s*c + d read input s*(a + c) + (b + d), so

    y[s a + b] = sum_c  P(a + c, c)[b],   P(q, c) = inner correlation of
                                           x[s q : s q + L_in] with w[s c : s c + R_in]

The inner algorithm handles (b, d); in its transform domain the sum over c is
itself a correlation over block indices, handled by the outer algorithm.
Every transform-domain product is an inner-tile product of an outer-tile
product, so the multiplication count is T_out^2 * T_in^2 per channel
(or the product of the reduced counts).
"""
from __future__ import annotations

import numpy as np

from .engine import MultCounter
from .rational import ConfigurationError
from .spec import AlgorithmSpec
from .tensor import apply_2d, apply_matrix


def _outer_tiles(n_out: int, s: int, m_out: int, m_in: int):
    span = s * (m_out - 1) + m_in
    starts = [0]
    while starts[-1] + span < n_out:
        starts.append(starts[-1] + s * m_out)
    return starts, span


def iterative_conv2d(x, f, inner: AlgorithmSpec, outer: AlgorithmSpec, padding: int | None = None,
                     counter: MultCounter | None = None, reduced: bool = False) -> np.ndarray:
    """Depthwise correlation of x [N, C, H, W] with f [C, 1, K, K] (or [C, K, K])."""
    x = np.asarray(x, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 4:
        if f.shape[1] != 1:
            raise ConfigurationError("depthwise filters must be [C, 1, K, K]")
        f = f[:, 0]
    if x.ndim != 4 or f.ndim != 3 or f.shape[0] != x.shape[1] or f.shape[1] != f.shape[2]:
        raise ConfigurationError(f"shapes {x.shape} and {f.shape} are not a depthwise pair")
    K = f.shape[1]
    s = inner.R
    if inner.M < s:
        raise ConfigurationError(f"inner output tile {inner.M} is narrower than the stride {s}")
    if s * outer.R < K:
        raise ConfigurationError(f"kernel {K} exceeds the {s * outer.R} taps covered by the tile grid")
    p = (K - 1) // 2 if padding is None else padding
    n, c, H, W = x.shape
    oh, ow = H + 2 * p - K + 1, W + 2 * p - K + 1
    if oh < 1 or ow < 1:
        raise ConfigurationError("kernel larger than the padded input")
    counter = counter or MultCounter()

    # kernel tiles: w[s c + d] for c < R_out, d < R_in, zero beyond K
    kp = np.zeros((c, s * outer.R, s * outer.R))
    kp[:, :K, :K] = f
    wt = kp.reshape(c, outer.R, s, outer.R, s).transpose(1, 3, 2, 4, 0)   # Ro, Ro, s, s, C
    w_in = apply_2d(inner.G, np.moveaxis(wt, -1, 0), fold=False)          # C, Ro, Ro, Ti, Ti
    w_in = np.moveaxis(w_in, 0, -1)                                        # Ro, Ro, Ti, Ti, C
    wo = apply_matrix(outer.G, apply_matrix(outer.G, w_in, axis=0, fold=False), axis=1, fold=False)

    starts_h, span = _outer_tiles(oh, s, outer.M, inner.M)
    starts_w, _ = _outer_tiles(ow, s, outer.M, inner.M)
    need_h = starts_h[-1] + s * (outer.L - 1) + inner.L
    need_w = starts_w[-1] + s * (outer.L - 1) + inner.L
    xp = np.zeros((n, c, max(need_h, H + 2 * p), max(need_w, W + 2 * p)))
    xp[:, :, p:p + H, p:p + W] = x
    y = np.zeros((n, c, starts_h[-1] + span, starts_w[-1] + span))

    inner_plan = outer_plan = None
    if reduced:
        from .symmetry import SymmetryPlan
        inner_plan, outer_plan = SymmetryPlan(inner), SymmetryPlan(outer)

    def inner_mul(u, v):
        # u, v: [k, Ti, Ti, ...]; inner plan wants its T axes first
        uu, vv = np.moveaxis(u, (1, 2), (0, 1)), np.moveaxis(v, (1, 2), (0, 1))
        if inner_plan is None:
            return np.moveaxis(counter.multiply(uu, vv), (0, 1), (1, 2))
        return np.moveaxis(inner_plan.multiply(uu, vv, counter.multiply), (0, 1), (1, 2))

    Lo, Li = outer.L, inner.L
    den = float((inner.BT.den * inner.G.den * inner.A.den * outer.BT.den * outer.G.den * outer.A.den) ** 2)
    for h0 in starts_h:
        for w0 in starts_w:
            # input blocks x[h0 + s q + e] for q < L_out, e < L_in
            blocks = np.empty((Lo, Lo, Li, Li, n, c))
            for q1 in range(Lo):
                for q2 in range(Lo):
                    r, cc = h0 + s * q1, w0 + s * q2
                    blocks[q1, q2] = np.moveaxis(xp[:, :, r:r + Li, cc:cc + Li], (2, 3), (0, 1))
            xi = apply_matrix(inner.BT, apply_matrix(inner.BT, blocks, axis=2, fold=False), axis=3, fold=False)
            xo = apply_matrix(outer.BT, apply_matrix(outer.BT, xi, axis=0, fold=False), axis=1, fold=False)
            wo_b = wo[:, :, :, :, None, :]
            if outer_plan is None:
                prod = np.stack([inner_mul(xo[r], wo_b[r]) for r in range(outer.T)])
            else:
                prod = outer_plan.multiply(xo, wo_b, inner_mul)
            yo = apply_matrix(outer.A.T, apply_matrix(outer.A.T, prod, axis=0, fold=False), axis=1, fold=False)
            yi = apply_matrix(inner.A.T, apply_matrix(inner.A.T, yo, axis=2, fold=False), axis=3, fold=False) / den
            for a1 in range(outer.M):
                for a2 in range(outer.M):
                    tile = np.moveaxis(yi[a1, a2], (0, 1), (2, 3))  # n, c, Mi, Mi
                    r, cc = h0 + s * a1, w0 + s * a2
                    y[:, :, r:r + inner.M, cc:cc + inner.M] = tile
    return y[:, :, :oh, :ow]


def direct_depthwise(x, f, padding: int | None = None) -> np.ndarray:
    """Reference depthwise correlation with float64 accumulation."""
    x = np.asarray(x, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 4:
        f = f[:, 0]
    K = f.shape[-1]
    p = (K - 1) // 2 if padding is None else padding
    xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
    oh, ow = xp.shape[2] - K + 1, xp.shape[3] - K + 1
    out = np.zeros(x.shape[:2] + (oh, ow))
    for k in range(K):
        for l in range(K):
            out += xp[:, :, k:k + oh, l:l + ow] * f[None, :, k, l, None, None]
    return out
