"""sfconv command line: validation, the algorithm comparison table, quantization ablations, BOPs, benchmarks."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import analysis
from .catalog import CATALOG_NAMES, UnknownAlgorithm, catalog_algorithm, catalog_hash, export_catalog
from .engine import direct_conv2d, fast_conv2d
from .quant import QuantConfig
from .rational import ConfigurationError, RationalMatrix
from .tensor import LayerConfig, load_layers, read_sfct
from .validate import validate_algorithm

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config_path: str | None
    seed: int
    output_dir: str | None
    catalog_hash: str


def _manifest(args, config_path=None) -> RunManifest:
    out = getattr(args, "out", None)
    return RunManifest(args.command, str(config_path) if config_path else None, args.seed,
                       str(Path(out).parent) if out else None, catalog_hash())


def _default_seed() -> int:
    raw = os.environ.get("SFC_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SFC_SEED={raw!r} is not an integer")


def _emit(text: str, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_json(payload: dict, manifest: RunManifest, out):
    _emit(json.dumps({"manifest": asdict(manifest), **payload}, indent=2, default=str) + "\n", out)


def _write_csv(rows: list[dict], columns: list[str], manifest: RunManifest, out):
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(asdict(manifest), sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), out)


def _spec(name: str):
    try:
        return catalog_algorithm(name)
    except (UnknownAlgorithm, ConfigurationError) as e:
        raise UsageError(f"unknown algorithm {name!r}") from e


def _layers(path) -> list[LayerConfig]:
    try:
        return load_layers(path)
    except FileNotFoundError as e:
        raise UsageError(f"layer config {path} not found") from e
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"bad layer config {path}: {e}") from e


# -- commands -------------------------------------------------------------------------

def _inject_typo(spec):
    """Flip the sign of the first nonzero A entry, bypassing repair."""
    num = [list(r) for r in spec.A.num]
    r, c = next((r, c) for r, row in enumerate(num) for c, v in enumerate(row) if v)
    num[r][c] = -num[r][c]
    return replace(spec, A=RationalMatrix.from_rows(num, spec.A.den), name=spec.name + "+typo")


def cmd_validate(args) -> int:
    names = CATALOG_NAMES if args.alg == "all" else [args.alg]
    specs = [_spec(n) for n in names]
    if args.inject_typo:
        specs = [_inject_typo(s) for s in specs]
    reports = [validate_algorithm(s, args.trials, args.seed) for s in specs]
    _write_json({"reports": [r.to_json() for r in reports]}, _manifest(args), args.out)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.name}: {r.mismatches}/{r.trials} mismatching trials", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_table1(args) -> int:
    rows = analysis.table1_report(args.trials, args.seed)
    _write_csv(rows, analysis.TABLE1_COLUMNS, _manifest(args), args.out)
    if args.figures:
        from . import plotting
        plotting.table1_figure(rows, Path(args.figures) / "table1.png")
    return EXIT_OK


def _load_layer_data(layers, data: str, seed: int):
    if data.startswith("synthetic:"):
        kind = data.split(":", 1)[1]
        if kind not in ("gaussian", "onef"):
            raise UsageError(f"unknown synthetic generator {kind!r}")
        return kind, None
    root = Path(data)
    pairs = []
    for i, layer in enumerate(layers):
        stem = layer.name or f"layer{i}"
        xs, fs = root / f"{stem}_input.sfct", root / f"{stem}_filter.sfct"
        missing = [str(p) for p in (xs, fs) if not p.exists()]
        if missing:
            raise UsageError(f"missing data files: {', '.join(missing)}")
        pairs.append((read_sfct(xs), read_sfct(fs)))
    return None, pairs


QUANTSIM_COLUMNS = ["layer", "algorithm", "bits", "act_bits", "filter_bits", "filter_grouping", "act_grouping", "mse"]


def cmd_quantsim(args) -> int:
    spec = _spec(args.alg)
    layers = _layers(args.layers)
    kind, pairs = _load_layer_data(layers, args.data, args.seed)
    groupings = analysis.GRANULARITIES
    if args.act_group or args.filter_group:
        groupings = [(args.filter_group or "channel+frequency", args.act_group or "frequency")]
    rows = []
    for i, layer in enumerate(layers):
        if layer.stride != 1:
            rows.append({"layer": layer.name or f"layer{i}", "algorithm": spec.name, "mse": "unsupported"})
            continue
        x, f = pairs[i] if pairs is not None else analysis.layer_data(layer, kind, args.seed + i)
        for ab, fb in zip(args.act_bits, args.filter_bits):
            for fg, ag in groupings:
                try:
                    q = QuantConfig(act_bits=ab, filter_bits=fb, act_grouping=ag, filter_grouping=fg)
                    mse = analysis.quantized_mse(x, f, spec, q, layer)
                except ConfigurationError as e:
                    raise UsageError(str(e)) from e
                rows.append({"layer": layer.name or f"layer{i}", "algorithm": spec.name, "bits": ab,
                             "act_bits": ab, "filter_bits": fb, "filter_grouping": fg,
                             "act_grouping": ag, "mse": f"{mse:.6e}"})
    _write_csv(rows, QUANTSIM_COLUMNS, _manifest(args, args.layers), args.out)
    if args.figures and rows:
        from . import plotting
        plotting.ablation_figure(rows, Path(args.figures) / "quant_ablation.png")
        if pairs is None:
            x, _ = analysis.layer_data(layers[0], kind, args.seed)
            plotting.energy_figure(analysis.frequency_energy(x, spec), Path(args.figures) / "energy.png",
                                   f"{spec.name}, {kind} input")
    return EXIT_OK


BOPS_COLUMNS = ["layer", "algorithm", "status", "mults", "transform_adds", "acc_adds", "mult_bits",
                "add_bits", "acc_bits", "bops", "complexity_pct", "bops_pct"]


def cmd_bops(args) -> int:
    layers = _layers(args.layers)
    specs = [_spec(a) for a in args.alg]
    q = QuantConfig(act_bits=args.bits, filter_bits=args.bits)
    rows = []
    for i, layer in enumerate(layers):
        for spec in specs:
            row = {"layer": layer.name or f"layer{i}", "algorithm": spec.name}
            try:
                row.update(analysis.bops(layer, spec, q).to_row(), status="ok")
            except ConfigurationError:
                row["status"] = "unsupported"
            rows.append(row)
    _write_csv(rows, BOPS_COLUMNS, _manifest(args, args.layers), args.out)
    return EXIT_OK


def _parse_layer(text: str, kernel: int) -> LayerConfig:
    try:
        cin, cout, h, w = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--layer expects CIN,COUT,H,W, got {text!r}")
    return LayerConfig(cin, cout, h, w, kernel)


def cmd_bench(args) -> int:
    if args.repeat < 1:
        raise UsageError("--repeat must be >= 1")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    spec = _spec(args.alg)
    layer = _parse_layer(args.layer, spec.R)
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal((1, layer.in_channels, layer.height, layer.width))
    f = rng.standard_normal((layer.out_channels, layer.in_channels, spec.R, spec.R))
    ref = direct_conv2d(x, f, layer)
    got = fast_conv2d(x, f, spec, layer, threads=args.threads)
    err = float(np.abs(got - ref).max() / max(np.abs(ref).max(), 1e-300))
    if err > args.tol:
        print(f"fast and direct outputs disagree: relative error {err:.3e}", file=sys.stderr)
        return EXIT_FAIL

    def timed(fn):
        ts = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            fn()
            ts.append(time.perf_counter() - t0)
        return {"median_s": statistics.median(ts), "min_s": min(ts), "max_s": max(ts)}

    fast = timed(lambda: fast_conv2d(x, f, spec, layer, threads=args.threads))
    direct = timed(lambda: direct_conv2d(x, f, layer))
    macs = layer.out_height * layer.out_width * layer.out_channels * layer.in_channels * spec.R ** 2
    payload = {"algorithm": spec.name, "layer": layer.to_json(), "threads": args.threads,
               "repeat": args.repeat, "max_relative_error": err, "fast": fast, "direct": direct,
               "fast_gmacs_per_s": macs / fast["median_s"] / 1e9, "speedup": direct["median_s"] / fast["median_s"]}
    _write_json(payload, _manifest(args), args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action != "export":
        raise UsageError(f"unknown catalog action {args.action!r}")
    _write_json(export_catalog(), _manifest(args), args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    from . import plotting
    path = Path(args.csv)
    if not path.exists():
        raise UsageError(f"{path} not found")
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    if not rows:
        raise UsageError(f"{path} has no data rows")
    out = Path(args.figures)
    if "kappa" in rows[0]:
        plotting.table1_figure(rows, out / "table1.png")
    elif "filter_grouping" in rows[0]:
        plotting.ablation_figure(rows, out / "quant_ablation.png")
    else:
        raise UsageError(f"{path} is neither a table1 nor a quantsim report")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sfconv", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="output file (default: stdout)"):
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (default: $SFC_SEED or 0)")
        sp.add_argument("--out", default=None, help=out_help)

    v = sub.add_parser("validate", help="exact-arithmetic check against direct correlation")
    v.add_argument("--alg", default="all")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--inject-typo", action="store_true", help="flip one A entry first (fault injection)")
    common(v, "JSON report path")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("table1", help="condition number, fp16 MSE and complexity per algorithm")
    t.add_argument("--trials", type=int, default=1000)
    t.add_argument("--figures", default=None, help="also render figures into this directory")
    common(t, "CSV path")
    t.set_defaults(func=cmd_table1)

    q = sub.add_parser("quantsim", help="quantization granularity ablation on layers")
    q.add_argument("--alg", default="sfc6-6x6-3x3")
    q.add_argument("--act-bits", type=int, nargs="+", default=[8, 6, 4])
    q.add_argument("--filter-bits", type=int, nargs="+", default=None)
    q.add_argument("--act-group", choices=["tensor", "frequency"], default=None)
    q.add_argument("--filter-group", choices=["tensor", "frequency", "channel", "channel+frequency"], default=None)
    q.add_argument("--layers", required=True, help="layer config JSON")
    q.add_argument("--data", default="synthetic:gaussian", help="directory of SFCT files or synthetic:gaussian|onef")
    q.add_argument("--figures", default=None)
    common(q, "CSV path")
    q.set_defaults(func=cmd_quantsim)

    b = sub.add_parser("bops", help="bit-operation cost per layer")
    b.add_argument("--layers", required=True)
    b.add_argument("--alg", nargs="+", default=["direct-3x3", "sfc6-7x7-3x3"])
    b.add_argument("--bits", type=int, default=8)
    common(b, "CSV path")
    b.set_defaults(func=cmd_bops)

    be = sub.add_parser("bench", help="wall-clock fast vs direct convolution")
    be.add_argument("--alg", default="sfc6-6x6-3x3")
    be.add_argument("--layer", default="64,64,56,56", help="CIN,COUT,H,W")
    be.add_argument("--threads", type=int, default=1)
    be.add_argument("--repeat", type=int, default=3)
    be.add_argument("--tol", type=float, default=1e-8)
    common(be, "JSON report path")
    be.set_defaults(func=cmd_bench)

    c = sub.add_parser("catalog", help="catalog operations")
    c.add_argument("action", choices=["export"])
    c.add_argument("--format", choices=["json"], default="json")
    common(c, "JSON path")
    c.set_defaults(func=cmd_catalog)

    pl = sub.add_parser("plot", help="render figures from a table1 or quantsim CSV")
    pl.add_argument("csv")
    pl.add_argument("--figures", required=True)
    common(pl)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.command == "quantsim":
            if args.filter_bits is None:
                args.filter_bits = list(args.act_bits)
            if len(args.filter_bits) != len(args.act_bits):
                raise UsageError("--act-bits and --filter-bits need the same number of values")
        return args.func(args)
    except (UsageError, ConfigurationError) as e:
        print(f"sfconv {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
