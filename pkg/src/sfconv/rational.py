"""Exact rational matrices: integer numerators over one shared denominator."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

INT64_MAX = 2**63 - 1


class ConfigurationError(ValueError):
    """Raised when operands do not conform (shapes, parameters)."""


def _checked(v: int) -> int:
    if abs(v) > INT64_MAX:
        raise OverflowError(f"numerator {v} exceeds the 64-bit range")
    return v


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        if not v.is_integer():
            raise TypeError(f"refusing inexact float entry {v!r}")
        return Fraction(int(v))
    return Fraction(v)


@dataclass(frozen=True)
class RationalMatrix:
    """rows x cols matrix whose entries are num[r][c] / den."""

    num: tuple[tuple[int, ...], ...]
    den: int = 1

    def __post_init__(self):
        if self.den < 1:
            raise ConfigurationError("denominator must be >= 1")
        widths = {len(r) for r in self.num}
        if len(widths) > 1:
            raise ConfigurationError("ragged rows")
        for row in self.num:
            for v in row:
                _checked(v)

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], den: int = 1) -> "RationalMatrix":
        """Build from entries (ints or Fractions) that are further divided by `den`."""
        fr = [[_as_fraction(v) / den for v in row] for row in rows]
        return cls.from_fractions(fr)

    @classmethod
    def from_fractions(cls, rows: Iterable[Sequence[Fraction]]) -> "RationalMatrix":
        rows = [[_as_fraction(v) for v in row] for row in rows]
        d = reduce(lcm, (v.denominator for row in rows for v in row), 1)
        num = tuple(tuple(int(v * d) for v in row) for row in rows)
        return cls(num, d)._reduced()

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(tuple((0,) * cols for _ in range(rows)))

    def _reduced(self) -> "RationalMatrix":
        g = reduce(gcd, (v for row in self.num for v in row), self.den)
        if g <= 1:
            return self
        return RationalMatrix(tuple(tuple(v // g for v in row) for row in self.num), self.den // g)

    # views ----------------------------------------------------------------
    @property
    def rows(self) -> int:
        return len(self.num)

    @property
    def cols(self) -> int:
        return len(self.num[0]) if self.num else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, rc) -> Fraction:
        r, c = rc
        return Fraction(self.num[r][c], self.den)

    def fractions(self) -> list[list[Fraction]]:
        return [[Fraction(v, self.den) for v in row] for row in self.num]

    def numerators(self) -> np.ndarray:
        return np.array(self.num, dtype=np.int64).reshape(self.rows, self.cols)

    def to_float(self) -> np.ndarray:
        return self.numerators().astype(np.float64) / self.den

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.num)) if self.num else (), self.den)

    def is_integer(self) -> bool:
        return self.den == 1

    def row(self, r: int) -> list[Fraction]:
        return [Fraction(v, self.den) for v in self.num[r]]

    # arithmetic -------------------------------------------------------------
    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        return rational_matmul(self, other)

    def scale(self, c) -> "RationalMatrix":
        c = _as_fraction(c)
        return RationalMatrix.from_fractions([[v * c for v in row] for row in self.fractions()])

    def inverse(self) -> "RationalMatrix":
        """Exact inverse by Gauss-Jordan elimination over the rationals."""
        n = self.rows
        if n != self.cols:
            raise ConfigurationError("inverse of a non-square matrix")
        aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(self.fractions())]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if piv is None:
                raise ConfigurationError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [v / p for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return RationalMatrix.from_fractions([row[n:] for row in aug])

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows and other.rows and self.cols != other.cols:
            raise ConfigurationError("column mismatch in vstack")
        return RationalMatrix.from_fractions(self.fractions() + other.fractions())

    def to_json(self) -> dict:
        return {"numerators": [list(r) for r in self.num], "denominator": self.den}

    @classmethod
    def from_json(cls, d: dict) -> "RationalMatrix":
        return cls(tuple(tuple(int(v) for v in r) for r in d["numerators"]), int(d["denominator"]))

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self.num)
        return f"RationalMatrix([{body}] / {self.den})"


def rational_matmul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Exact product; the result denominator is a.den * b.den reduced by the common gcd."""
    if a.cols != b.rows:
        raise ConfigurationError(f"cannot multiply {a.shape} by {b.shape}")
    bt = list(zip(*b.num)) if b.rows else [() for _ in range(b.cols)]
    num = tuple(
        tuple(_checked(sum(x * y for x, y in zip(row, col))) for col in bt) for row in a.num
    )
    return RationalMatrix(num, _checked(a.den * b.den))._reduced()


def solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Solve rows @ u = rhs over the rationals.

    Returns (particular, nullspace) with free variables set to zero in the
    particular solution, or None when the system is inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][c]
        aug[r] = [v / p for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(all(v == 0 for v in row[:n]) and row[n] != 0 for row in aug):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = aug[i][n]
    free = [c for c in range(n) if c not in pivots]
    null = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -aug[i][fc]
        null.append(vec)
    return sol, null
