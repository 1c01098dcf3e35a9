"""Registry of gated algorithms."""
from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass, field

from .correction import derive_correction_spec, sfc_overlap_output
from .published import ALTERNATES, PUBLISHED
from .rational import RationalMatrix
from .sft import build_sft
from .spec import AlgorithmSpec, CatalogIntegrityError, identity_residual, make_spec
from .validate import repair_matrices
from .winograd import generate_winograd

# Rows of the comparison table, in display order: (name, label, kernel block)
TABLE1_ROWS = [
    ("direct-3x3", "direct convolution", 3),
    ("wino-2x2-3x3", "Wino(2x2, 3x3)", 3),
    ("wino-3x3-3x3", "Wino(3x3, 3x3)", 3),
    ("wino-4x4-3x3", "Wino(4x4, 3x3)", 3),
    ("sfc4-4x4-3x3", "SFC-4(4x4, 3x3)", 3),
    ("sfc6-6x6-3x3", "SFC-6(6x6, 3x3)", 3),
    ("sfc6-7x7-3x3", "SFC-6(7x7, 3x3)", 3),
    ("wino-2x2-5x5", "Wino(2x2, 5x5)", 5),
    ("sfc6-6x6-5x5", "SFC-6(6x6, 5x5)", 5),
    ("wino-2x2-7x7", "Wino(2x2, 7x7)", 7),
    ("sfc6-4x4-7x7", "SFC-6(4x4, 7x7)", 7),
]

CATALOG_NAMES = [
    "sfc4-4x4-3x3", "sfc6-6x6-3x3", "sfc6-7x7-3x3", "sfc6-6x6-5x5", "sfc6-4x4-7x7",
    "wino-2x2-3x3", "wino-3x3-3x3", "wino-4x4-3x3", "wino-2x2-5x5", "wino-2x2-7x7",
    "direct-3x3", "direct-5x5", "direct-7x7",
]

_NAME = re.compile(r"^(sfc(\d)|wino|direct)-(\d+)x(\d+)(?:-(\d+)x(\d+))?$")


class UnknownAlgorithm(KeyError):
    pass


@dataclass
class GateRecord:
    """Outcome of running one published variant through the exactness gate."""

    name: str
    source: str
    passed_as_published: bool
    changes: list = field(default_factory=list)
    accepted: bool = False


_lock = threading.Lock()
_cache: dict[str, AlgorithmSpec] = {}
_gate_log: list[GateRecord] = []


def direct_spec(R: int) -> AlgorithmSpec:
    """M = 1 form: B^T = G = identity, A = ones, so each output is one R x R dot product."""
    eye = RationalMatrix.identity(R)
    ones = RationalMatrix.from_rows([[1]] * R)
    return make_spec(f"direct-{R}x{R}", "direct", R, 1, R, eye, eye, ones, eye)


def _gate_published(name: str, entry: dict, source: str):
    BT = RationalMatrix.from_rows(entry["BT"])
    G = RationalMatrix.from_rows(entry["G"])
    A = RationalMatrix.from_rows(entry["A"], entry["den"])
    M, R = entry["M"], entry["R"]
    ok = not identity_residual(BT, G, A, M, R)
    BT2, G2, A2, changes = repair_matrices(BT, G, A, M, R)
    return GateRecord(name, source, ok, [str(c) for c in changes]), (BT2, G2, A2)


def _build_published(name: str) -> AlgorithmSpec:
    entry = PUBLISHED[name]
    rec, (BT, G, A) = _gate_published(name, entry, "reference")
    rec.accepted = True
    _gate_log.append(rec)
    for alt in ALTERNATES.get(name, []):
        alt_rec, _ = _gate_published(name, alt, alt["source"])
        _gate_log.append(alt_rec)
    plan = build_sft(entry["N"])
    notes = tuple(f"repaired {c}" for c in rec.changes)
    return make_spec(name, "sfc", entry["N"], entry["M"], entry["R"], BT, G, A,
                     sfc_overlap_output(BT, plan), notes=notes)


def _build(name: str) -> AlgorithmSpec:
    if name in PUBLISHED:
        return _build_published(name)
    m = _NAME.match(name)
    if not m:
        raise UnknownAlgorithm(name)
    kind, npts = m.group(1), m.group(2)
    a, b = int(m.group(3)), int(m.group(4))
    if a != b:
        raise UnknownAlgorithm(name)
    if kind == "direct":
        if m.group(5) is not None or a < 1:
            raise UnknownAlgorithm(name)
        return direct_spec(a)
    if m.group(5) is None or m.group(5) != m.group(6):
        raise UnknownAlgorithm(name)
    M, R = a, int(m.group(5))
    if kind == "wino":
        from .winograd import DEFAULT_ROOTS
        if (M, R) not in DEFAULT_ROOTS:
            raise UnknownAlgorithm(f"{name}: no default interpolation points")
        return generate_winograd(M, R)
    try:
        return derive_correction_spec(int(npts), M, R, name=name)
    except ValueError as exc:
        raise UnknownAlgorithm(f"{name}: {exc}") from exc


def catalog_algorithm(name: str) -> AlgorithmSpec:
    """Gated spec by name; built on first use and then shared (immutable)."""
    with _lock:
        spec = _cache.get(name)
        if spec is None:
            spec = _build(name)
            if identity_residual(spec.BT, spec.G, spec.A, spec.M, spec.R):
                raise CatalogIntegrityError(f"{name} failed the exactness gate")
            _cache[name] = spec
        return spec


def all_algorithms() -> list[AlgorithmSpec]:
    return [catalog_algorithm(n) for n in CATALOG_NAMES]


def gate_log() -> list[GateRecord]:
    all_algorithms()
    return list(_gate_log)


def export_catalog() -> dict:
    specs = all_algorithms()
    return {"algorithms": [s.to_json() for s in specs],
            "gate": [vars(r) for r in gate_log()],
            "catalog_hash": catalog_hash()}


def catalog_hash() -> str:
    h = hashlib.sha256()
    for s in all_algorithms():
        d = s.to_json()
        d.pop("notes")
        h.update(json.dumps(d, sort_keys=True).encode())
    return h.hexdigest()
