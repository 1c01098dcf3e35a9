"""Numerical-error analysis and the bit-operations cost model.

Error experiments run on 1-D tiles (the 2-D algorithms are tensor squares of
the 1-D ones).  The condition number reported for an algorithm is that of
its square output map in the overlapped (full-convolution) form, the map
that carries element-wise product errors to the outputs.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .catalog import TABLE1_ROWS, catalog_algorithm, direct_spec
from .data import he_filters, synthetic
from .engine import TilingPlan, direct_conv2d, fast_conv2d, input_tiles
from .quant import QuantConfig, calibrate, quantize
from .rational import ConfigurationError, RationalMatrix
from .sft import FAST_ADDS
from .spec import AlgorithmSpec
from .tensor import LayerConfig, apply_2d, as_nchw

ACC_BITS = 32
_MAX_L = 16  # longest 1-D input tile among cataloged algorithms
_MAX_R = 7


# -- singular values ------------------------------------------------------------------

def singular_values(m) -> np.ndarray:
    """Singular values by one-sided Jacobi rotations, largest first."""
    a = m.to_float() if isinstance(m, RationalMatrix) else np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ConfigurationError("need a non-empty 2-D matrix")
    u = a.T.copy() if a.shape[0] < a.shape[1] else a.copy()
    k = u.shape[1]
    eps = np.finfo(np.float64).eps
    for _ in range(100):
        rotated = False
        for i in range(k - 1):
            for j in range(i + 1, k):
                alpha = u[:, i] @ u[:, i]
                beta = u[:, j] @ u[:, j]
                gamma = u[:, i] @ u[:, j]
                if abs(gamma) <= eps * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                with np.errstate(over="ignore"):
                    zeta = (beta - alpha) / (2.0 * gamma)
                sign = 1.0 if zeta >= 0 else -1.0
                if abs(zeta) > 1e150:  # zeta**2 would overflow
                    t = 0.5 * sign / abs(zeta)
                else:
                    t = sign / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                ui = u[:, i].copy()
                u[:, i] = c * ui - s * u[:, j]
                u[:, j] = s * ui + c * u[:, j]
        if not rotated:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def condition_number(m) -> float:
    """sigma_max / sigma_min; the common denominator does not change it."""
    sv = singular_values(m)
    if sv[-1] <= sv[0] * 1e-13:
        raise ConfigurationError("matrix is rank deficient")
    return float(sv[0] / sv[-1])


def algorithm_kappa(spec: AlgorithmSpec) -> float:
    return condition_number(spec.overlap_output)


def error_bound(spec: AlgorithmSpec | float, delta_s_ratio: float) -> float:
    """Forward-error bound kappa * ||ds|| / ||s|| for a relative product error."""
    if delta_s_ratio <= 0:
        raise ValueError("delta_s_ratio must be positive")
    kappa = spec if isinstance(spec, (int, float)) else algorithm_kappa(spec)
    return float(kappa) * delta_s_ratio


# -- fp16 simulation ------------------------------------------------------------------

def to_fp16(v) -> np.ndarray:
    """Round to the nearest half-precision value (ties to even), kept as float64."""
    return np.asarray(v, dtype=np.float64).astype(np.float16).astype(np.float64)


def fp16_matvec(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """m @ x over the last axis of x, rounding every product and every partial sum.

    Accumulation runs left to right over the nonzero entries of each row.
    """
    out = np.zeros(x.shape[:-1] + (m.shape[0],))
    for r in range(m.shape[0]):
        acc = None
        for c in np.flatnonzero(m[r]):
            term = to_fp16(m[r, c] * x[..., c])
            acc = term if acc is None else to_fp16(acc + term)
        if acc is not None:
            out[..., r] = acc
    return out


@lru_cache(maxsize=8)
def _trial_data(trials: int, seed: int):
    # trial t uses its own stream, so results do not depend on evaluation order
    x = np.empty((trials, _MAX_L))
    f = np.empty((trials, _MAX_R))
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        x[t] = rng.standard_normal(_MAX_L)
        f[t] = rng.standard_normal(_MAX_R)
    x.flags.writeable = False
    f.flags.writeable = False
    return x, f


def _correlate_1d(x: np.ndarray, f: np.ndarray, M: int) -> np.ndarray:
    R = f.shape[-1]
    return np.stack([sum(x[:, i + k] * f[:, k] for k in range(R)) for i in range(M)], axis=1)


def _fp16_outputs(spec: AlgorithmSpec, x: np.ndarray, f: np.ndarray) -> np.ndarray:
    b = fp16_matvec(spec.BT.to_float(), to_fp16(x))
    g = fp16_matvec(spec.G.to_float(), to_fp16(f))
    return fp16_matvec(spec.A.to_float().T, to_fp16(b * g))


def _int_outputs(spec: AlgorithmSpec, x: np.ndarray, f: np.ndarray, q: QuantConfig) -> np.ndarray:
    # 1-D tiles have no channel axis: "channel" groupings collapse to one scale
    b = x @ spec.BT.to_float().T
    g = f @ spec.G.to_float().T
    act = "tensor" if q.act_grouping == "tensor" else "frequency"
    flt = "frequency" if "frequency" in q.filter_grouping else "tensor"
    qb, sb = quantize(b[:, None], q.act_bits, act)
    qg, sg = quantize(g[:, None], q.filter_bits, flt)
    p = (qb * qg)[:, 0] * (sb.scales * sg.scales).reshape(-1)
    return p @ spec.A.to_float()


def _tile_mse(spec: AlgorithmSpec, precision, trials: int, seed: int) -> float:
    x, f = _trial_data(trials, seed)
    x, f = x[:, :spec.L], f[:, :spec.R]
    ref = _correlate_1d(x, f, spec.M)
    if isinstance(precision, QuantConfig):
        y = _int_outputs(spec, x, f, precision)
    elif precision in ("fp16", "fp16-sim"):
        y = _fp16_outputs(spec, x, f)
    else:
        raise ConfigurationError(f"unknown precision {precision!r}")
    return float(((y - ref) ** 2).mean())


@dataclass
class ErrorReport:
    algorithm: str
    mse_normalized: float
    kappa: float
    trials: int
    seed: int
    mse: float = 0.0
    reference_mse: float = 0.0
    precision: str = "fp16"

    def to_json(self) -> dict:
        return asdict(self)


def mse_experiment(spec: AlgorithmSpec, precision="fp16", trials: int = 1000, seed: int = 0) -> ErrorReport:
    """Mean squared output error of the rounded pipeline against fp64 correlation.

    fp16: inputs, every transform multiply and add, the element-wise operands
    and products, and every output-transform add are rounded to half
    precision.  The result is divided by the error of direct correlation with
    the same kernel size under identical rounding and data, so direct = 1.
    An integer QuantConfig instead quantizes the element-wise operands.
    """
    if trials < 100:
        raise ValueError("mse_experiment needs at least 100 trials")
    err = _tile_mse(spec, precision, trials, seed)
    ref = _tile_mse(direct_spec(spec.R), precision, trials, seed)
    label = "fp16" if isinstance(precision, str) else f"int{precision.act_bits}"
    return ErrorReport(spec.name, err / ref, algorithm_kappa(spec), trials, seed, err, ref, label)


# -- forward-error bound --------------------------------------------------------------

@dataclass
class BoundCheck:
    algorithm: str
    kappa: float
    trials: int
    violations: int
    worst_slack: float  # max over trials of measured / bound

    @property
    def passed(self) -> bool:
        return self.violations == 0


def bound_check(spec: AlgorithmSpec, trials: int = 1000, seed: int = 0) -> BoundCheck:
    """Per-trial check of ||dy||/||y|| <= kappa ||ds||/||s|| in the overlapped form.

    With the square output map Sq and P = B^T Sq^-1, the full convolution of
    an M-tap input with an R-tap filter is y = Sq^T s, s = P^T [(G f) * (A x)].
    Operands and products are rounded to fp16; ds is the induced change of s.
    """
    sq = spec.overlap_output
    P = (spec.BT @ sq.inverse()).to_float()
    sqf = sq.to_float()
    kappa = condition_number(sq)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((trials, spec.M))
    f = rng.standard_normal((trials, spec.R))
    a = x @ spec.A.to_float().T
    g = f @ spec.G.to_float().T
    s = (a * g) @ P
    ds = (to_fp16(to_fp16(a) * to_fp16(g)) @ P) - s
    y, dy = s @ sqf, ds @ sqf
    ry = np.linalg.norm(dy, axis=1) / np.linalg.norm(y, axis=1)
    rs = np.linalg.norm(ds, axis=1) / np.linalg.norm(s, axis=1)
    bound = kappa * rs
    with np.errstate(invalid="ignore", divide="ignore"):
        slack = np.where(bound > 0, ry / bound, 0.0)
    violations = int(np.count_nonzero(ry > bound * (1 + 1e-12) + 1e-300))
    return BoundCheck(spec.name, kappa, trials, violations, float(slack.max()))


# -- bit operations -------------------------------------------------------------------

def mult_bops(bits: int) -> int:
    return bits * (bits - 1)


def add_bops(bits: int) -> int:
    return bits


def transform_adds(m: RationalMatrix, known=(), known_cost: int = 0) -> int:
    """Additions to apply m to a vector, reusing earlier rows.

    A row equal (up to sign) to an earlier row is free; a row equal to the
    sum or difference of two earlier rows costs one add; otherwise nnz - 1.
    Scaling by constants is not counted as addition.  `known` rows are
    taken as already computed at `known_cost` adds.
    """
    rows = [tuple(r) for r in m.fractions()]
    seen: list[tuple] = [tuple(r) for r in known]
    total = known_cost
    for r in rows:
        neg = tuple(-v for v in r)
        if not any(r):
            cost = 0
        elif r in seen or neg in seen:
            cost = 0
        elif any(tuple(u[i] + s * v[i] for i in range(len(r))) in (r, neg)
                 for a, u in enumerate(seen) for v in seen[a + 1:] for s in (1, -1)):
            cost = 1
        else:
            cost = sum(1 for v in r if v) - 1
        total += cost
        seen.append(r)
    return total


def input_transform_adds(spec: AlgorithmSpec) -> int:
    """Adds for B^T x; a length-6 symbolic DFT uses its 14-add fast form."""
    if spec.family == "sfc" and spec.N in FAST_ADDS:
        dft_rows = spec.overlap_output.fractions()[:spec.N]
        return transform_adds(spec.BT, dft_rows, FAST_ADDS[spec.N])
    return transform_adds(spec.BT)


@dataclass
class CostReport:
    algorithm: str
    layer: LayerConfig
    mults: int
    adds: int           # transform additions at add_bits
    acc_adds: int       # channel/tap accumulation at acc_bits
    mult_bits: int
    add_bits: int
    acc_bits: int
    bops: int
    complexity_pct: float  # multiplications relative to direct
    bops_pct: float = 100.0
    breakdown: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        return {"layer": self.layer.name, "algorithm": self.algorithm, "mults": self.mults,
                "transform_adds": self.adds, "acc_adds": self.acc_adds, "mult_bits": self.mult_bits,
                "add_bits": self.add_bits, "acc_bits": self.acc_bits, "bops": self.bops,
                "complexity_pct": round(self.complexity_pct, 4), "bops_pct": round(self.bops_pct, 4)}


def _direct_counts(layer: LayerConfig):
    outs = layer.out_height * layer.out_width * layer.out_channels
    taps = layer.in_channels * layer.kernel ** 2
    return outs * taps, outs * (taps - 1)


def bops(layer: LayerConfig, spec: AlgorithmSpec, quant: QuantConfig | None = None) -> CostReport:
    """Multiplications, additions and BOPs for one image through one layer."""
    quant = quant or QuantConfig()
    mb = ab = quant.act_bits
    d_mults, d_acc = _direct_counts(layer)
    d_bops = d_mults * mult_bops(mb) + d_acc * add_bops(ACC_BITS)
    cin, cout = layer.in_channels, layer.out_channels
    if spec.family == "direct" or spec.M == 1:
        if spec.R != layer.kernel:
            raise ConfigurationError(f"{spec.name} does not match kernel {layer.kernel}")
        return CostReport(spec.name, layer, d_mults, 0, d_acc, mb, ab, ACC_BITS, d_bops, 100.0, 100.0,
                          {"mults": d_mults, "accumulate": d_acc})
    if layer.stride != 1:
        raise ConfigurationError("fast algorithms require stride 1")
    if spec.R != layer.kernel:
        raise ConfigurationError(f"{spec.name} is for {spec.R}x{spec.R} kernels")
    plan = TilingPlan.for_layer(spec, layer)
    tiles = plan.tiles_h * plan.tiles_w
    T, L, M, R = spec.T, spec.L, spec.M, spec.R
    a_b, a_g, a_a = input_transform_adds(spec), transform_adds(spec.G), transform_adds(spec.A.T)
    per_tile = spec.mults_reduced
    parts = {
        "mults": per_tile * tiles * cin * cout,
        "input_transform": tiles * cin * a_b * (L + T),
        "filter_transform": cout * cin * a_g * (R + T),
        "output_transform": tiles * cout * a_a * (T + M),
        "accumulate": per_tile * tiles * cout * (cin - 1),
    }
    adds = parts["input_transform"] + parts["filter_transform"] + parts["output_transform"]
    total = parts["mults"] * mult_bops(mb) + adds * add_bops(ab) + parts["accumulate"] * add_bops(ACC_BITS)
    return CostReport(spec.name, layer, parts["mults"], adds, parts["accumulate"], mb, ab, ACC_BITS, total,
                      100.0 * parts["mults"] / d_mults, 100.0 * total / d_bops, parts)


# -- algorithm comparison table --------------------------------------------------------

TABLE1_COLUMNS = ["algorithm", "label", "kernel", "mse_normalized", "kappa", "complexity_pct"]


def table1_report(trials: int = 1000, seed: int = 0) -> list[dict]:
    rows = []
    for name, label, kernel in TABLE1_ROWS:
        spec = catalog_algorithm(name)
        rep = mse_experiment(spec, "fp16", trials, seed)
        rows.append({"algorithm": name, "label": label, "kernel": kernel,
                     "mse_normalized": round(rep.mse_normalized, 4), "kappa": round(rep.kappa, 4),
                     "complexity_pct": round(spec.complexity_pct, 2)})
    return rows


# -- transform-domain statistics and quantized layers ---------------------------------

def frequency_energy(x, spec: AlgorithmSpec) -> np.ndarray:
    """Mean squared B^T x B coefficient per transform coordinate over all tiles and channels."""
    x = as_nchw(x, "input")
    cfg = LayerConfig(x.shape[1], 1, x.shape[2], x.shape[3], spec.R, padding=0)
    tiles = input_tiles(x.astype(np.float64), spec, cfg, TilingPlan.for_layer(spec, cfg))
    u = apply_2d(spec.BT, tiles)
    return (u ** 2).reshape(-1, spec.T, spec.T).mean(axis=0)


def layer_data(layer: LayerConfig, kind: str, seed: int, batch: int = 1):
    rng = np.random.default_rng(seed)
    x = synthetic(kind, (batch, layer.in_channels, layer.height, layer.width), rng)
    f = he_filters(layer.out_channels, layer.in_channels, layer.kernel, rng)
    return x, f


def quantized_mse(x, f, spec: AlgorithmSpec, quant: QuantConfig, layer: LayerConfig | None = None) -> float:
    """Output MSE of the quantized fast pipeline against fp64 direct correlation."""
    ref = direct_conv2d(x, f, layer)
    got = fast_conv2d(x, f, spec, layer, quant=quant)
    return float(((got - ref) ** 2).mean())


GRANULARITIES = [  # (filter grouping, activation grouping), finest first
    ("channel+frequency", "frequency"),
    ("channel", "frequency"),
    ("channel", "tensor"),
]


def quant_ablation(layers, spec: AlgorithmSpec, bits=(8, 6, 4), kind: str = "gaussian", seed: int = 0,
                   data=None) -> list[dict]:
    """MSE for every (layer, bit width, grouping) cell; `data` overrides the generator."""
    rows = []
    for i, layer in enumerate(layers):
        x, f = data[i] if data is not None else layer_data(layer, kind, seed + i)
        for b in bits:
            for fg, ag in GRANULARITIES:
                q = QuantConfig(act_bits=b, filter_bits=b, act_grouping=ag, filter_grouping=fg)
                rows.append({"layer": layer.name or f"layer{i}", "algorithm": spec.name, "bits": b,
                             "filter_grouping": fg, "act_grouping": ag,
                             "mse": quantized_mse(x, f, spec, q, layer)})
    return rows


def calibration_mse(t: np.ndarray, bits: int, grouping: str) -> float:
    """Round-trip MSE of min-max quantization of t under a grouping."""
    s = calibrate([t], bits=bits, grouping=grouping)
    q, s = quantize(t, bits, grouping, s)
    return float(((q * s.scales - t) ** 2).mean())
