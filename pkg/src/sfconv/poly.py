"""First-order symbolic elements c0 + c1*s and their products.

Three rings are used, one per transform length:

* 6 points: s = exp(j*pi/3),   s^2 = s - 1
* 4 points: s = j,             s^2 = -1
* 3 points: s = exp(2j*pi/3),  s^2 = -1 - s
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

SYMBOL = {6: cmath.exp(1j * cmath.pi / 3), 4: 1j, 3: cmath.exp(2j * cmath.pi / 3)}


@dataclass(frozen=True)
class PolyElement:
    c0: float
    c1: float

    def value(self, points: int) -> complex:
        return self.c0 + self.c1 * SYMBOL[points]


def poly_reduce_dft6(c) -> PolyElement:
    c0, c1, c2 = c
    return PolyElement(c0 - c2, c1 + c2)


def poly_reduce_dft4(c) -> PolyElement:
    c0, c1, c2 = c
    return PolyElement(c0 - c2, c1)


def poly_reduce_dft3(c) -> PolyElement:
    c0, c1, c2 = c
    return PolyElement(c0 - c2, c1 - c2)


REDUCE = {6: poly_reduce_dft6, 4: poly_reduce_dft4, 3: poly_reduce_dft3}


def raw_product(a: PolyElement, b: PolyElement) -> tuple:
    return (a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0, a.c1 * b.c1)


def poly_mul(a: PolyElement, b: PolyElement, points: int) -> PolyElement:
    """Schoolbook product followed by reduction (four multiplications)."""
    return REDUCE[points](raw_product(a, b))


# Three-multiplication kernels: out = C @ ((Ea @ a) * (Eb @ b)).
KERNELS = {
    6: (np.array([[1, 0], [0, 1], [1, 1]]), np.array([[1, 0], [0, 1], [1, 1]]),
        np.array([[1, -1, 0], [-1, 0, 1]])),
    4: (np.array([[1, 0], [0, 1], [1, 1]]), np.array([[1, 0], [0, 1], [1, 1]]),
        np.array([[1, -1, 0], [-1, -1, 1]])),
    3: (np.array([[1, 0], [0, 1], [-1, 1]]), np.array([[1, 0], [0, 1], [1, -1]]),
        np.array([[1, -1, 0], [1, 0, 1]])),
}


def poly_mul3(a: PolyElement, b: PolyElement, points: int) -> PolyElement:
    """Product using three real multiplications."""
    ea, eb, c = KERNELS[points]
    p = (ea @ np.array([a.c0, a.c1])) * (eb @ np.array([b.c0, b.c1]))
    o = c @ p
    return PolyElement(o[0], o[1])
