"""Seeded synthetic feature maps and filters for desk-scale experiments."""
from __future__ import annotations

import numpy as np

from .rational import ConfigurationError

GENERATORS = ("gaussian", "onef")


def gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape)


def onef(shape, rng: np.random.Generator, alpha: float = 1.0) -> np.ndarray:
    """Field whose amplitude spectrum falls as 1/|k|^alpha, unit variance per map."""
    *lead, h, w = shape
    white = rng.standard_normal((*lead, h, w))
    ky = np.fft.fftfreq(h)[:, None]
    kx = np.fft.rfftfreq(w)[None, :]
    k = np.hypot(ky, kx)
    k[0, 0] = 1.0 / max(h, w)
    field = np.fft.irfft2(np.fft.rfft2(white) / k**alpha, s=(h, w))
    field -= field.mean(axis=(-2, -1), keepdims=True)
    std = field.std(axis=(-2, -1), keepdims=True)
    return field / np.where(std > 0, std, 1.0)


def synthetic(kind: str, shape, rng: np.random.Generator) -> np.ndarray:
    if kind == "gaussian":
        return gaussian(shape, rng)
    if kind == "onef":
        return onef(shape, rng)
    raise ConfigurationError(f"unknown generator {kind!r}; choose from {GENERATORS}")


def he_filters(cout: int, cin: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """He-normal filters, roughly what a trained conv layer looks like in scale."""
    return rng.standard_normal((cout, cin, k, k)) * np.sqrt(2.0 / (cin * k * k))
