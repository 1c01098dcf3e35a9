"""Named fast-convolution algorithms and their exact 1-D correctness identity.

Shapes follow y = A^T [(G f G^T) * (B^T x B)] A with
BT: T x L, G: T x R, A: T x M and L = M + R - 1.
Convolution is correlation, as in CNN practice: y[i] = sum_k x[i + k] f[k].
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .rational import ConfigurationError, RationalMatrix


class CatalogIntegrityError(RuntimeError):
    """A published or generated algorithm cannot be made to pass the exactness gate."""


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    family: str  # direct | winograd | sfc
    N: int
    M: int
    R: int
    BT: RationalMatrix
    G: RationalMatrix
    A: RationalMatrix
    overlap_output: RationalMatrix  # L x L output transform of the overlapped (full-convolution) form
    mults_full: int = 0
    mults_reduced: int = 0
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        T, L = self.T, self.L
        if self.BT.shape != (T, L):
            raise ConfigurationError(f"{self.name}: B^T is {self.BT.shape}, expected {(T, L)}")
        if self.G.shape != (T, self.R):
            raise ConfigurationError(f"{self.name}: G is {self.G.shape}, expected {(T, self.R)}")
        if self.A.shape != (T, self.M):
            raise ConfigurationError(f"{self.name}: A is {self.A.shape}, expected {(T, self.M)}")

    @property
    def T(self) -> int:
        return self.BT.rows

    @property
    def L(self) -> int:
        return self.M + self.R - 1

    @property
    def B(self) -> RationalMatrix:
        return self.BT.T

    @property
    def complexity_pct(self) -> float:
        return 100.0 * self.mults_reduced / (self.M**2 * self.R**2)

    def with_matrices(self, **kw) -> "AlgorithmSpec":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return {
            "name": self.name, "family": self.family, "N": self.N, "M": self.M, "R": self.R,
            "T": self.T, "mults_full": self.mults_full, "mults_reduced": self.mults_reduced,
            "BT": self.BT.to_json(), "G": self.G.to_json(), "A": self.A.to_json(),
            "overlap_output": self.overlap_output.to_json(), "notes": list(self.notes),
        }


def identity_residual(BT: RationalMatrix, G: RationalMatrix, A: RationalMatrix, M: int, R: int):
    """Entries (i, k, l) where sum_t A[t,i] G[t,k] BT[t,l] differs from [l == i + k].

    The 2-D algorithm is the tensor square of the 1-D one, so an empty result
    proves exact equality with linear correlation for every input.
    """
    L = M + R - 1
    if BT.cols != L or G.cols != R or A.cols != M or not (BT.rows == G.rows == A.rows):
        return [("shape",)]
    a, g, b = A.fractions(), G.fractions(), BT.fractions()
    bad = []
    for i in range(M):
        for k in range(R):
            for l in range(L):
                s = sum((a[t][i] * g[t][k] * b[t][l] for t in range(len(a))), Fraction(0))
                if s != (1 if l == i + k else 0):
                    bad.append((i, k, l))
    return bad


def make_spec(name, family, N, M, R, BT, G, A, overlap_output, notes=()) -> AlgorithmSpec:
    """Assemble a spec and fill in the multiplication counts."""
    from .symmetry import find_triples

    T = BT.rows
    spec = AlgorithmSpec(name, family, N, M, R, BT, G, A, overlap_output, T * T, T * T, tuple(notes))
    triples = find_triples(spec)
    return replace(spec, mults_reduced=T * T - 3 * len(triples) ** 2)
