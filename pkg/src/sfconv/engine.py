"""Direct and fast 2-D convolution over full NCHW feature maps.

conv = correlation, as in CNN practice: y[o, i, j] = sum x[c, i + k, j + l] f[o, c, k, l].
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .quant import QuantConfig, ScaleSet, calibrate, quantize, quantized_elementwise_multiply
from .rational import ConfigurationError
from .spec import AlgorithmSpec
from .tensor import LayerConfig, apply_2d, as_nchw, conv_config_for


class MultCounter:
    """Thread-safe tally of scalar multiplications actually performed."""

    def __init__(self):
        self.count = 0
        self._lock = threading.Lock()

    def add(self, n: int):
        with self._lock:
            self.count += int(n)

    def multiply(self, u, v):
        p = u * v
        self.add(p.size)
        return p


@dataclass(frozen=True)
class TilingPlan:
    tile_in: int
    tile_out: int
    tiles_h: int
    tiles_w: int
    out_h: int
    out_w: int
    edge_policy: str = "zero-pad-partial"

    @classmethod
    def for_layer(cls, spec: AlgorithmSpec, cfg: LayerConfig) -> "TilingPlan":
        oh, ow = cfg.out_height, cfg.out_width
        M = spec.M
        return cls(spec.L, M, -(-oh // M), -(-ow // M), oh, ow)

    @property
    def padded_h(self) -> int:
        return self.tiles_h * self.tile_out + self.tile_in - self.tile_out

    @property
    def padded_w(self) -> int:
        return self.tiles_w * self.tile_out + self.tile_in - self.tile_out


@dataclass(frozen=True)
class TransformedFilterBank:
    """G f G^T per (out, in) channel pair, without the G denominator folded in."""

    spec_name: str
    data: np.ndarray           # [OC, IC, T, T] float64, scaled by G.den**2
    q: np.ndarray | None = None  # quantized integers when a QuantConfig was given
    scales: ScaleSet | None = None

    @property
    def shape(self):
        return self.data.shape


def _check_layer(x, f, cfg):
    if f.ndim != 4 or f.shape[2] != f.shape[3]:
        raise ConfigurationError(f"filters must be [OC, IC, R, R], got {f.shape}")
    if x.shape[1] != f.shape[1]:
        raise ConfigurationError(f"input has {x.shape[1]} channels, filters expect {f.shape[1]}")
    if cfg.in_channels != x.shape[1] or cfg.out_channels != f.shape[0] or cfg.kernel != f.shape[2]:
        raise ConfigurationError("layer config does not match tensor shapes")
    if (cfg.height, cfg.width) != x.shape[2:]:
        raise ConfigurationError("layer config does not match input height/width")


def direct_conv2d(x, f, cfg: LayerConfig | None = None, counter: MultCounter | None = None) -> np.ndarray:
    """Sliding-window correlation with float64 accumulation in a fixed tap order."""
    x = as_nchw(x, "input")
    f = as_nchw(f, "filter")
    cfg = cfg or conv_config_for(x, f)
    _check_layer(x, f, cfg)
    s, p, R = cfg.stride, cfg.padding, cfg.kernel
    xp = np.pad(x.astype(np.float64), ((0, 0), (0, 0), (p, p), (p, p)))
    oh, ow = cfg.out_height, cfg.out_width
    n, oc = x.shape[0], f.shape[0]
    out = np.zeros((n, oc, oh, ow))
    ff = f.astype(np.float64)
    for c in range(x.shape[1]):
        for k in range(R):
            for l in range(R):
                window = xp[:, c, k:k + s * (oh - 1) + 1:s, l:l + s * (ow - 1) + 1:s]
                out += window[:, None] * ff[None, :, c, k, l, None, None]
                if counter is not None:
                    counter.add(n * oc * oh * ow)
    return out


def transform_filters(f, spec: AlgorithmSpec, quant: QuantConfig | None = None) -> TransformedFilterBank:
    f = as_nchw(f, "filter")
    if f.shape[2:] != (spec.R, spec.R):
        raise ConfigurationError(f"{spec.name} needs {spec.R}x{spec.R} filters, got {f.shape[2:]}")
    v = apply_2d(spec.G, f.astype(np.float64), fold=False)
    if quant is None:
        return TransformedFilterBank(spec.name, v)
    sf = calibrate([v], quant, role="filter")
    q, sf = quantize(v, quant.filter_bits, quant.filter_grouping, sf)
    return TransformedFilterBank(spec.name, v, q, sf)


def input_tiles(x: np.ndarray, spec: AlgorithmSpec, cfg: LayerConfig, plan: TilingPlan) -> np.ndarray:
    """[N, C, tiles_h, tiles_w, L, L] overlapping input tiles, zero-padded at the edges."""
    p = cfg.padding
    H, W = x.shape[2:]
    xp = np.zeros(x.shape[:2] + (plan.padded_h, plan.padded_w))
    hh, ww = min(H, plan.padded_h - p), min(W, plan.padded_w - p)
    xp[:, :, p:p + hh, p:p + ww] = x[:, :, :hh, :ww]
    win = np.lib.stride_tricks.sliding_window_view(xp, (spec.L, spec.L), axis=(2, 3))
    return win[:, :, ::spec.M, ::spec.M]


def _chunks(n: int, parts: int):
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def fast_conv2d(x, f, spec: AlgorithmSpec, cfg: LayerConfig | None = None, quant: QuantConfig | None = None,
                threads: int = 1, counter: MultCounter | None = None, reduced: bool = False,
                bank: TransformedFilterBank | None = None, act_scales: ScaleSet | None = None) -> np.ndarray:
    """y = A^T [sum_c (G f G^T) * (B^T x B)] A per output tile.

    Products are accumulated over input channels in the transform domain and
    the output transform runs once per tile.  With `quant`, both operands are
    quantized and multiplied as integers, then dequantized before A^T . A.
    `reduced` uses the symmetry-reduced element-wise product (float only).
    """
    x = as_nchw(x, "input")
    f = as_nchw(f, "filter")
    cfg = cfg or conv_config_for(x, f)
    _check_layer(x, f, cfg)
    if cfg.stride != 1:
        raise ConfigurationError("fast algorithms require stride 1")
    if spec.R != cfg.kernel:
        raise ConfigurationError(f"{spec.name} is for {spec.R}x{spec.R} kernels, layer has {cfg.kernel}")
    if reduced and quant is not None:
        raise ConfigurationError("the reduced product path is float-only")
    plan = TilingPlan.for_layer(spec, cfg)
    counter = counter or MultCounter()
    bank = bank or transform_filters(f, spec, quant)
    tiles = input_tiles(x.astype(np.float64), spec, cfg, plan)
    u = apply_2d(spec.BT, tiles, fold=False)  # [N, C, th, tw, T, T]

    if quant is not None:
        sa = act_scales or calibrate([u], quant, role="activation")
        qa, sa = quantize(u, quant.act_bits, quant.act_grouping, sa)

    n, oc = x.shape[0], f.shape[0]
    M = spec.M
    out = np.zeros((n, oc, plan.tiles_h * M, plan.tiles_w * M))
    den = float((spec.BT.den * spec.G.den * spec.A.den) ** 2)
    sym = None
    if reduced:
        from .symmetry import SymmetryPlan
        sym = SymmetryPlan(spec)

    def run(rows):
        a, b = rows
        if quant is not None:
            prod = quantized_elementwise_multiply((qa[:, :, a:b], sa), (bank.q, bank.scales))
            counter.add(prod.acc.size * x.shape[1])
            acc = prod.dequantize()
        elif sym is not None:
            ub = u[:, :, a:b]
            acc = None
            for c in range(x.shape[1]):
                uc = np.moveaxis(ub[:, c], (-2, -1), (0, 1))[:, :, :, None]       # T,T,N,1,th,tw
                vc = bank.data[:, c].transpose(1, 2, 0)[:, :, None, :, None, None]  # T,T,1,OC,1,1
                pc = sym.multiply(uc, vc, counter.multiply)
                acc = pc if acc is None else acc + pc
            acc = np.moveaxis(acc, (0, 1), (-2, -1))
        else:
            ub = u[:, :, a:b]
            acc = np.zeros((n, oc) + ub.shape[2:])
            for c in range(x.shape[1]):
                acc += counter.multiply(ub[:, c][:, None], bank.data[None, :, c, None, None])
        y = apply_2d(spec.A.T, acc, fold=False) / den  # [N, OC, rows, tw, M, M]
        out[:, :, a * M:b * M] = y.transpose(0, 1, 2, 4, 3, 5).reshape(n, oc, (b - a) * M, -1)

    parts = _chunks(plan.tiles_h, threads)
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, parts))
    else:
        for part in parts:
            run(part)
    return out[:, :, :plan.out_h, :plan.out_w]
