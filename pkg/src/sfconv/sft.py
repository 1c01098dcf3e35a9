"""Symbolic Fourier transforms: integer {-1,0,1} factors of small real DFTs."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .poly import SYMBOL
from .rational import ConfigurationError, RationalMatrix

_F = {
    3: [[1, 1, 1], [1, 0, -1], [0, 1, -1]],
    4: [[1, 1, 1, 1], [1, 0, -1, 0], [0, -1, 0, 1], [1, -1, 1, -1]],
    6: [[1, 1, 1, 1, 1, 1], [1, 1, 0, -1, -1, 0], [0, -1, -1, 0, 1, 1],
        [1, 0, -1, 1, 0, -1], [0, -1, 1, 0, -1, 1], [1, -1, 1, -1, 1, -1]],
}

# Published inverse for 6 points (carries a 1/6 prefactor).
_IF6 = [[1, 1, 1, 1, 1, 1], [1, -1, -2, -1, 1, 2], [-1, -2, -1, 1, 2, 1],
        [-1, -1, 2, -1, -1, 2], [-2, 1, 1, -2, 1, 1], [-1, 1, -1, 1, -1, 1]]

# Symbolic-to-numeric map: each output is F[row_a] + s_coeff * F[row_b].
# Entries are (dft_index, row_a, row_b, s_coeff) where s_coeff is a
# polynomial in s given as (k0, k1) meaning k0 + k1*s.
_S = {
    3: [(0, 0, None, None), (2, 1, 2, (0, 1)), (1, 1, 2, (-1, -1))],
    4: [(0, 0, None, None), (1, 1, 2, (0, 1)), (2, 3, None, None), (3, 1, 2, (0, -1))],
    6: [(0, 0, None, None), (1, 1, 2, (0, 1)), (2, 3, 4, (0, 1)), (3, 5, None, None),
        (5, 1, 2, (1, -1)), (4, 3, 4, (1, -1))],
}

# Conjugation in the (1, s) basis: conj(b0 + b1 s) = (b0, b1) @ CONJ.T
CONJ = {
    6: np.array([[1, 1], [0, -1]]),
    4: np.array([[1, 0], [0, -1]]),
    3: np.array([[1, -1], [0, -1]]),
}

# Published fast-decomposition add counts.
FAST_ADDS = {6: 14}


@dataclass(frozen=True)
class SymbolicDftPlan:
    points: int
    F: RationalMatrix
    iF: RationalMatrix
    S: tuple  # (dft_index, row_a, row_b, s_coeff) per output

    @property
    def S_numeric(self) -> np.ndarray:
        """Complex matrix S with S @ F equal to the DFT rows listed in `dft_rows`."""
        n = self.points
        s = SYMBOL[n]
        out = np.zeros((n, n), dtype=complex)
        for r, (_, a, b, k) in enumerate(self.S):
            out[r, a] = 1
            if b is not None:
                out[r, b] = k[0] + k[1] * s
        return out

    @property
    def dft_rows(self) -> list[int]:
        return [d for d, *_ in self.S]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """F rows that combine into one complex output (a0 row, a1 row), one per conjugate pair."""
        seen, out = set(), []
        for _, a, b, _k in self.S:
            if b is not None and (a, b) not in seen:
                seen.add((a, b))
                out.append((a, b))
        return out

    @property
    def real_rows(self) -> list[int]:
        return [a for _, a, b, _k in self.S if b is None]

    def numeric_dft(self) -> np.ndarray:
        n = self.points
        k = np.arange(n)
        return np.exp(-2j * np.pi * np.outer(k, k) / n)


@lru_cache(maxsize=None)
def build_sft(points: int) -> SymbolicDftPlan:
    if points not in _F:
        raise ConfigurationError(f"unsupported transform length {points}; choose 3, 4 or 6")
    F = RationalMatrix.from_rows(_F[points])
    if points == 6:
        iF = RationalMatrix.from_rows(_IF6, 6)
    else:
        # same layout as the 6-point inverse: iF.T @ F is a one-step cyclic shift
        shift = RationalMatrix.from_rows(np.roll(np.eye(points, dtype=int), 1, axis=1).tolist())
        iF = (shift @ F.inverse()).T
    return SymbolicDftPlan(points, F, iF, tuple(_S[points]))


def cyclic_shift(n: int) -> RationalMatrix:
    """P with (P @ x)[r] = x[(r + 1) mod n]."""
    return RationalMatrix.from_rows(np.roll(np.eye(n, dtype=int), 1, axis=1).tolist())
