"""Dense NCHW tensors, layer configuration, SFCT files and the matrix-apply primitive."""
from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .rational import ConfigurationError, RationalMatrix

SFCT_MAGIC = b"SFCT0001"
_DTYPES = {"float32", "float64", "int8", "int16", "int32", "int64"}


def as_nchw(x, name: str = "tensor") -> np.ndarray:
    """Validate a dense 4-D tensor for convolution: right rank, finite values."""
    a = np.asarray(x)
    if a.ndim != 4:
        raise ConfigurationError(f"{name} must be 4-D [N, C, H, W], got shape {a.shape}")
    if a.dtype.kind == "f" and not np.isfinite(a).all():
        raise ValueError(f"{name} contains NaN or Inf")
    return a


@dataclass(frozen=True)
class LayerConfig:
    in_channels: int
    out_channels: int
    height: int
    width: int
    kernel: int
    stride: int = 1
    padding: int | None = None
    name: str = ""

    def __post_init__(self):
        for k in ("in_channels", "out_channels", "height", "width", "kernel", "stride"):
            if getattr(self, k) < 1:
                raise ConfigurationError(f"{k} must be positive")
        if self.padding is None:
            object.__setattr__(self, "padding", self.kernel // 2)
        if self.padding < 0:
            raise ConfigurationError("padding must be non-negative")

    @property
    def out_height(self) -> int:
        return (self.height + 2 * self.padding - self.kernel) // self.stride + 1

    @property
    def out_width(self) -> int:
        return (self.width + 2 * self.padding - self.kernel) // self.stride + 1

    def with_channels(self, cin: int | None = None, cout: int | None = None) -> "LayerConfig":
        d = asdict(self)
        if cin is not None:
            d["in_channels"] = cin
        if cout is not None:
            d["out_channels"] = cout
        return LayerConfig(**d)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "LayerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown layer fields: {sorted(unknown)}")
        return cls(**d)


def load_layers(path) -> list[LayerConfig]:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = doc.get("layers", [])
    return [LayerConfig.from_json(d) for d in doc]


def conv_config_for(x: np.ndarray, f: np.ndarray, stride: int = 1, padding: int | None = None) -> LayerConfig:
    """LayerConfig matching an input/filter pair."""
    return LayerConfig(
        in_channels=x.shape[1], out_channels=f.shape[0], height=x.shape[2], width=x.shape[3],
        kernel=f.shape[2], stride=stride, padding=padding,
    )


# -- SFCT tensor files ---------------------------------------------------------

def write_sfct(path, data: np.ndarray) -> None:
    a = np.ascontiguousarray(data)
    dt = a.dtype.name
    if dt not in _DTYPES:
        raise ConfigurationError(f"unsupported dtype {dt}")
    header = json.dumps({"dtype": dt, "shape": list(a.shape), "layout": "row-major-nchw"}).encode()
    with open(path, "wb") as fh:
        fh.write(SFCT_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(a.astype(a.dtype.newbyteorder("<"), copy=False).tobytes())


def read_sfct(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:8] != SFCT_MAGIC:
        raise ValueError(f"{path}: bad magic")
    (hlen,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12:12 + hlen].decode())
    if header.get("layout") != "row-major-nchw" or header.get("dtype") not in _DTYPES:
        raise ValueError(f"{path}: unsupported header {header}")
    dt = np.dtype(header["dtype"]).newbyteorder("<")
    shape = tuple(header["shape"])
    payload = raw[12 + hlen:]
    if len(payload) != dt.itemsize * int(np.prod(shape, dtype=np.int64)):
        raise ValueError(f"{path}: payload size does not match shape {shape}")
    return np.frombuffer(payload, dtype=dt).reshape(shape).astype(dt.newbyteorder("="))


# -- matrix application ----------------------------------------------------------

def apply_matrix(m: RationalMatrix, t: np.ndarray, axis: int = 0, fold: bool = True) -> np.ndarray:
    """Compute m @ t along `axis` with a fixed left-to-right accumulation order.

    With fold=False the shared denominator is left out, so the result is
    (m.den * m) @ t; callers fold it later.  Integer inputs stay exact in int64,
    everything else accumulates in float64.
    """
    t = np.asarray(t)
    if t.shape[axis] != m.cols:
        raise ConfigurationError(f"matrix with {m.cols} columns cannot act on axis of length {t.shape[axis]}")
    src = np.moveaxis(t, axis, 0)
    dtype = np.int64 if src.dtype.kind in "iub" else np.float64
    src = src.astype(dtype, copy=False)
    out = np.zeros((m.rows,) + src.shape[1:], dtype=dtype)
    for r, row in enumerate(m.num):
        for k, c in enumerate(row):
            if c == 1:
                out[r] += src[k]
            elif c == -1:
                out[r] -= src[k]
            elif c:
                out[r] += c * src[k]
    if fold and m.den != 1:
        out = out / m.den
    return np.moveaxis(out, 0, axis)


def apply_2d(left: RationalMatrix, t: np.ndarray, fold: bool = True) -> np.ndarray:
    """left @ t @ left.T over the two trailing axes."""
    u = apply_matrix(left, t, axis=-2, fold=fold)
    return apply_matrix(left, u, axis=-1, fold=fold)
