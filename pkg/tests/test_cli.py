import csv
import json

import numpy as np
import pytest

from sfconv.cli import BOPS_COLUMNS, EXIT_FAIL, EXIT_OK, EXIT_USAGE, QUANTSIM_COLUMNS, main
from sfconv.analysis import TABLE1_COLUMNS
from sfconv.catalog import catalog_hash
from sfconv.tensor import write_sfct


def _csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# manifest: ")
    return json.loads(lines[0][len("# manifest: "):]), list(csv.DictReader(lines[1:]))


@pytest.fixture
def layers(tmp_path):
    p = tmp_path / "layers.json"
    p.write_text(json.dumps([
        {"name": "c1", "in_channels": 3, "out_channels": 4, "height": 12, "width": 12, "kernel": 3},
        {"name": "down", "in_channels": 4, "out_channels": 4, "height": 12, "width": 12, "kernel": 3,
         "stride": 2},
    ]))
    return p


def test_validate_single_algorithm(tmp_path):
    out = tmp_path / "v.json"
    assert main(["validate", "--alg", "sfc6-6x6-3x3", "--trials", "20", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["manifest"]["command"] == "validate"
    assert doc["reports"][0]["passed"] and doc["reports"][0]["mismatches"] == 0


def test_validate_injected_typo_fails_with_counterexample(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = main(["validate", "--alg", "wino-2x2-3x3", "--trials", "20", "--inject-typo", "--out", str(out)])
    assert code == EXIT_FAIL
    rep = json.loads(out.read_text())["reports"][0]
    assert rep["algorithm"].endswith("+typo") and not rep["passed"]
    assert rep["counterexample"] is not None
    assert "FAIL" in capsys.readouterr().err


def test_validate_unknown_algorithm():
    assert main(["validate", "--alg", "nope-1x1"]) == EXIT_USAGE


def test_bad_flag_is_usage_error():
    assert main(["table1", "--bogus"]) == EXIT_USAGE


def test_table1_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["table1", "--trials", "100", "--seed", "2", "--out", str(a)]) == EXIT_OK
    assert main(["table1", "--trials", "100", "--seed", "2", "--out", str(b)]) == EXIT_OK
    assert a.read_text() == b.read_text()
    manifest, rows = _csv(a.read_text())
    assert manifest["seed"] == 2 and manifest["catalog_hash"] == catalog_hash()
    assert len(rows) == 11 and list(rows[0]) == TABLE1_COLUMNS
    assert float(next(r for r in rows if r["algorithm"] == "direct-3x3")["mse_normalized"]) == 1.0


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SFC_SEED", "7")
    out = tmp_path / "t.csv"
    assert main(["table1", "--trials", "100", "--out", str(out)]) == EXIT_OK
    assert _csv(out.read_text())[0]["seed"] == 7
    monkeypatch.setenv("SFC_SEED", "seven")
    assert main(["table1", "--trials", "100", "--out", str(out)]) == EXIT_USAGE


def test_quantsim_synthetic(tmp_path, layers):
    out = tmp_path / "q.csv"
    code = main(["quantsim", "--layers", str(layers), "--act-bits", "8", "4", "--out", str(out)])
    assert code == EXIT_OK
    _, rows = _csv(out.read_text())
    assert list(rows[0]) == QUANTSIM_COLUMNS
    c1 = [r for r in rows if r["layer"] == "c1"]
    assert len(c1) == 2 * 3
    down = [r for r in rows if r["layer"] == "down"]
    assert [r["mse"] for r in down] == ["unsupported"]
    mse = {(r["bits"], r["filter_grouping"], r["act_grouping"]): float(r["mse"]) for r in c1}
    assert mse[("4", "channel", "tensor")] > 10 * mse[("8", "channel+frequency", "frequency")]


def test_quantsim_zero_input_gives_zero_error(tmp_path):
    lp = tmp_path / "l.json"
    lp.write_text(json.dumps([{"name": "z", "in_channels": 2, "out_channels": 2, "height": 8, "width": 8,
                               "kernel": 3}]))
    data = tmp_path / "data"
    data.mkdir()
    write_sfct(data / "z_input.sfct", np.zeros((1, 2, 8, 8), dtype=np.float32))
    write_sfct(data / "z_filter.sfct", np.ones((2, 2, 3, 3), dtype=np.float32))
    out = tmp_path / "q.csv"
    assert main(["quantsim", "--layers", str(lp), "--data", str(data), "--act-bits", "8",
                 "--out", str(out)]) == EXIT_OK
    _, rows = _csv(out.read_text())
    assert rows and all(float(r["mse"]) == 0.0 for r in rows)


def test_quantsim_missing_data(tmp_path, layers, capsys):
    code = main(["quantsim", "--layers", str(layers), "--data", str(tmp_path / "none")])
    assert code == EXIT_USAGE
    assert "missing data files" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["--act-bits", "3"],
    ["--act-bits", "8", "6", "--filter-bits", "8"],
    ["--data", "synthetic:pink"],
])
def test_quantsim_bad_options(layers, argv):
    assert main(["quantsim", "--layers", str(layers), *argv]) == EXIT_USAGE


def test_quantsim_missing_layer_file(tmp_path):
    assert main(["quantsim", "--layers", str(tmp_path / "absent.json")]) == EXIT_USAGE


def test_bops_rows_and_unsupported(tmp_path, layers):
    out = tmp_path / "b.csv"
    assert main(["bops", "--layers", str(layers), "--out", str(out)]) == EXIT_OK
    _, rows = _csv(out.read_text())
    assert list(rows[0]) == BOPS_COLUMNS
    by = {(r["layer"], r["algorithm"]): r for r in rows}
    assert by[("down", "sfc6-7x7-3x3")]["status"] == "unsupported"
    assert by[("down", "direct-3x3")]["status"] == "ok"
    assert int(by[("c1", "sfc6-7x7-3x3")]["bops"]) < int(by[("c1", "direct-3x3")]["bops"])


def test_bops_empty_layer_list(tmp_path):
    lp = tmp_path / "l.json"
    lp.write_text("[]")
    out = tmp_path / "b.csv"
    assert main(["bops", "--layers", str(lp), "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and lines[1] == ",".join(BOPS_COLUMNS)


@pytest.mark.parametrize("threads", [1, 4])
def test_bench_reports_timings(tmp_path, threads):
    out = tmp_path / "bench.json"
    code = main(["bench", "--layer", "4,4,18,18", "--threads", str(threads), "--repeat", "2", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["threads"] == threads and doc["max_relative_error"] <= 1e-8
    assert doc["fast"]["min_s"] <= doc["fast"]["median_s"] <= doc["fast"]["max_s"]


@pytest.mark.parametrize("argv", [["--repeat", "0"], ["--threads", "0"], ["--layer", "4,4"]])
def test_bench_bad_options(argv):
    assert main(["bench", *argv]) == EXIT_USAGE


def test_catalog_export(tmp_path):
    out = tmp_path / "cat.json"
    assert main(["catalog", "export", "--format", "json", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["manifest"]["catalog_hash"] == catalog_hash()


def test_plot_from_csv(tmp_path):
    csv_path = tmp_path / "t.csv"
    assert main(["table1", "--trials", "100", "--out", str(csv_path)]) == EXIT_OK
    figs = tmp_path / "figs"
    assert main(["plot", str(csv_path), "--figures", str(figs)]) == EXIT_OK
    assert (figs / "table1.png").stat().st_size > 0
    assert main(["plot", str(tmp_path / "absent.csv"), "--figures", str(figs)]) == EXIT_USAGE


def test_quantsim_figures(tmp_path, layers):
    figs = tmp_path / "figs"
    assert main(["quantsim", "--layers", str(layers), "--act-bits", "8", "--figures", str(figs),
                 "--out", str(tmp_path / "q.csv")]) == EXIT_OK
    assert (figs / "quant_ablation.png").exists() and (figs / "energy.png").exists()
