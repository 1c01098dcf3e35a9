"""Symmetric integer quantization of transform-domain tiles.

Layouts: activation tiles are [..., T, T]; filter tiles are [OC, IC, T, T].
Scale groupings:
    tensor             one scale
    frequency          one scale per transform coordinate, [T, T]
    channel            one scale per output channel, [OC]
    channel+frequency  [OC, T, T]
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .rational import ConfigurationError

GROUPINGS = ("tensor", "frequency", "channel", "channel+frequency")
ACT_GROUPINGS = ("tensor", "frequency")
SCALE_FLOOR = 1e-8
INT32_MAX = 2**31 - 1


class AccumulatorOverflowError(OverflowError):
    pass


@dataclass(frozen=True)
class QuantConfig:
    act_bits: int = 8
    filter_bits: int = 8
    act_grouping: str = "frequency"
    filter_grouping: str = "channel+frequency"
    calibration: str = "minmax"  # or "mse"
    rounding: str = "half-even"

    def __post_init__(self):
        for b in (self.act_bits, self.filter_bits):
            if not 4 <= b <= 8:
                raise ConfigurationError(f"bit width {b} outside 4..8")
        if self.act_grouping not in ACT_GROUPINGS:
            raise ConfigurationError(f"activation grouping must be one of {ACT_GROUPINGS}")
        if self.filter_grouping not in GROUPINGS:
            raise ConfigurationError(f"filter grouping must be one of {GROUPINGS}")
        if self.calibration not in ("minmax", "mse"):
            raise ConfigurationError("calibration must be minmax or mse")
        if self.rounding != "half-even":
            raise ConfigurationError("only round-half-even is supported")


@dataclass(frozen=True)
class ScaleSet:
    """Positive scales kept in a shape that broadcasts against the data."""

    scales: np.ndarray
    grouping: str
    bits: int

    def __post_init__(self):
        if not np.all(self.scales > 0):
            raise ValueError("scales must be positive")

    @property
    def zero_points(self) -> np.ndarray:
        return np.zeros_like(self.scales, dtype=np.int64)

    @property
    def grid(self) -> np.ndarray:
        """Scales in their declared shape: (), [T, T], [OC] or [OC, T, T]."""
        s = self.scales
        if self.grouping == "tensor":
            return s.reshape(())
        if self.grouping == "frequency":
            return s.reshape(s.shape[-2:])
        if self.grouping == "channel":
            return s.reshape(s.shape[0])
        return s.reshape(s.shape[0], *s.shape[-2:])

    def to_json(self) -> dict:
        return {"grouping": self.grouping, "bits": self.bits, "scales": self.grid.tolist()}


def qmax(bits: int) -> int:
    return 2 ** (bits - 1) - 1


def _reduce_axes(ndim: int, grouping: str) -> tuple:
    if grouping == "tensor":
        return tuple(range(ndim))
    if grouping == "frequency":
        return tuple(range(ndim - 2))
    if grouping == "channel":
        return tuple(range(1, ndim))
    if grouping == "channel+frequency":
        return tuple(range(1, ndim - 2))
    raise ConfigurationError(f"unknown grouping {grouping}")


def _group_absmax(t: np.ndarray, grouping: str) -> np.ndarray:
    return np.abs(t).max(axis=_reduce_axes(t.ndim, grouping), keepdims=True)


def round_clamp(v: np.ndarray, bits: int) -> np.ndarray:
    """Round half to even, then clamp to the signed range."""
    q = np.rint(v)
    return np.clip(q, -qmax(bits) - 1, qmax(bits)).astype(np.int64)


def calibrate(samples, cfg: QuantConfig | None = None, role: str = "activation",
              bits: int | None = None, grouping: str | None = None, method: str | None = None) -> ScaleSet:
    """Scales from calibration tile sets: min-max, optionally refined by an MSE grid search."""
    samples = [np.asarray(s, dtype=np.float64) for s in samples]
    if not samples:
        raise ValueError("calibration needs at least one sample")
    if cfg is not None:
        bits = bits or (cfg.act_bits if role == "activation" else cfg.filter_bits)
        grouping = grouping or (cfg.act_grouping if role == "activation" else cfg.filter_grouping)
        method = method or cfg.calibration
    bits = bits or 8
    grouping = grouping or "tensor"
    method = method or "minmax"
    amax = None
    for s in samples:
        m = _group_absmax(s, grouping)
        amax = m if amax is None else np.maximum(amax, m)
    base = np.maximum(amax / qmax(bits), SCALE_FLOOR)
    if method == "mse":
        base = _mse_refine(samples, base, bits, grouping)
    return ScaleSet(base, grouping, bits)


def _mse_refine(samples, base, bits, grouping, n_candidates: int = 100):
    best = base.copy()
    best_err = None
    for c in np.linspace(0.3, 1.0, n_candidates):
        s = np.maximum(base * c, SCALE_FLOOR)
        err = 0.0
        for t in samples:
            q = round_clamp(t / s, bits)
            err = err + ((q * s - t) ** 2).sum(axis=_reduce_axes(t.ndim, grouping), keepdims=True)
        if best_err is None:
            best_err, best = err, s
        else:
            better = err < best_err
            best = np.where(better, s, best)
            best_err = np.where(better, err, best_err)
    return best


def quantize(t, bits: int, grouping: str, scales: ScaleSet | None = None):
    """Integer tiles and the scales used: q = clamp(round_half_even(v / s))."""
    if not 4 <= bits <= 8:
        raise ConfigurationError(f"bit width {bits} outside 4..8")
    t = np.asarray(t, dtype=np.float64)
    if scales is None:
        scales = calibrate([t], bits=bits, grouping=grouping)
    if not np.all(scales.scales > 0):
        raise ValueError("nonpositive scale")
    return round_clamp(t / scales.scales, bits), scales


def dequantize(q: np.ndarray, scales: ScaleSet) -> np.ndarray:
    return q * scales.scales


@dataclass(frozen=True)
class QuantizedProduct:
    acc: np.ndarray    # int64, [N, OC, ..., T, T]
    scale: np.ndarray  # broadcasts against acc

    def dequantize(self) -> np.ndarray:
        return self.acc * self.scale


def _filter_scale_for_product(sf: ScaleSet, extra: int) -> np.ndarray:
    """Reshape a filter scale [OC|1, 1, T|1, T|1] to [1, OC|1, (1,)*extra, T|1, T|1]."""
    s = sf.scales
    if s.ndim == 0:
        return s
    s = s[:, 0] if s.ndim == 4 else s.reshape((1,) + s.shape)  # drop IC axis
    return s.reshape((1, s.shape[0]) + (1,) * extra + s.shape[1:])


def quantized_elementwise_multiply(xa, xf) -> QuantizedProduct:
    """Integer products accumulated over input channels, plus the combined scale.

    xa = (qa, sa) with qa shaped [N, IC, ..., T, T]; xf = (qf, sf) with qf
    shaped [OC, IC, T, T].  Partial sums must stay inside the signed 32-bit
    range; leaving it raises AccumulatorOverflowError.
    """
    qa, sa = xa
    qf, sf = xf
    qa = np.asarray(qa, dtype=np.int64)
    qf = np.asarray(qf, dtype=np.int64)
    if qa.shape[1] != qf.shape[1] or qa.shape[-2:] != qf.shape[-2:]:
        raise ConfigurationError(f"tile shapes {qa.shape} and {qf.shape} do not compose")
    extra = qa.ndim - 4
    n, ic = qa.shape[:2]
    oc = qf.shape[0]
    acc = np.zeros((n, oc) + qa.shape[2:], dtype=np.int64)
    fshape = (1, oc) + (1,) * extra + qf.shape[-2:]
    for c in range(ic):
        acc += qa[:, c][:, None] * qf[:, c].reshape(fshape)
        if np.abs(acc).max(initial=0) > INT32_MAX:
            raise AccumulatorOverflowError(f"32-bit accumulator overflow after input channel {c}")
    a_scale = sa.scales.reshape(sa.scales.shape[-2:]) if sa.scales.ndim else sa.scales
    scale = a_scale * _filter_scale_for_product(sf, extra)
    return QuantizedProduct(acc, np.asarray(scale, dtype=np.float64))


def scales_json(ss: ScaleSet) -> str:
    return json.dumps(ss.to_json())
