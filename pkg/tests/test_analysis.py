import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sfconv.analysis import (ACC_BITS, add_bops, algorithm_kappa, bops, bound_check, condition_number,
                             error_bound, fp16_matvec, frequency_energy, mse_experiment, mult_bops,
                             quant_ablation, singular_values, table1_report, to_fp16, transform_adds)
from sfconv.catalog import catalog_algorithm
from sfconv.data import gaussian, onef, synthetic
from sfconv.quant import QuantConfig
from sfconv.rational import ConfigurationError, RationalMatrix
from sfconv.tensor import LayerConfig


# -- conditioning -----------------------------------------------------------------------

def test_identity_kappa():
    assert condition_number(np.eye(5)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name,want", [("wino-2x2-3x3", 2.4142), ("sfc6-6x6-3x3", 3.3098),
                                       ("sfc4-4x4-3x3", 2.7066)])
def test_kappa_examples(name, want):
    assert algorithm_kappa(catalog_algorithm(name)) == pytest.approx(want, abs=1e-3)


@pytest.mark.parametrize("c", [1 / 6, 6.0])
def test_kappa_scale_invariant(c):
    a = catalog_algorithm("sfc6-6x6-3x3").overlap_output.to_float()
    assert condition_number(c * a) == pytest.approx(condition_number(a), rel=1e-10)


def test_rational_matrix_accepted():
    m = RationalMatrix.from_rows([[2, 0], [0, 1]], 6)
    assert condition_number(m) == pytest.approx(2.0)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 7), st.integers(1, 7)),
              elements=st.floats(-50, 50, allow_nan=False, allow_infinity=False)))
def test_jacobi_matches_lapack(m):
    want = np.linalg.svd(m, compute_uv=False)
    got = singular_values(m)
    np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9 * max(1.0, want.max(initial=0)))


def test_rank_deficient_rejected():
    with pytest.raises(ConfigurationError):
        condition_number(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_error_bound_examples():
    assert error_bound(1.0, 0.01) == pytest.approx(0.01)
    assert error_bound(catalog_algorithm("sfc6-6x6-3x3"), 0.01) == pytest.approx(0.0331, abs=2e-4)
    with pytest.raises(ValueError):
        error_bound(1.0, 0.0)


@pytest.mark.parametrize("name", ["wino-2x2-3x3", "wino-4x4-3x3", "sfc6-6x6-3x3", "sfc6-7x7-3x3",
                                  "sfc4-4x4-3x3", "sfc6-6x6-5x5"])
def test_bound_holds_on_random_tiles(name):
    chk = bound_check(catalog_algorithm(name), trials=300, seed=3)
    assert chk.passed and chk.violations == 0 and chk.worst_slack <= 1.0


# -- fp16 simulation --------------------------------------------------------------------

def test_to_fp16_rounds_like_half():
    assert to_fp16(1 + 2 ** -11).item() == 1.0        # tie rounds to even
    assert to_fp16(1 + 3 * 2 ** -11).item() == 1 + 2 ** -9
    with np.errstate(over="ignore"):
        assert to_fp16(70000.0).item() == np.inf


def test_fp16_matvec_exact_on_small_integers():
    m = np.array([[1.0, -1.0, 0.0], [2.0, 0.0, 1.0]])
    x = np.array([[3.0, 5.0, 7.0]])
    np.testing.assert_array_equal(fp16_matvec(m, x), x @ m.T)


def test_direct_normalizes_to_one():
    rep = mse_experiment(catalog_algorithm("direct-3x3"), trials=200)
    assert rep.mse_normalized == pytest.approx(1.0, abs=1e-12)


def test_mse_needs_enough_trials():
    with pytest.raises(ValueError):
        mse_experiment(catalog_algorithm("sfc6-6x6-3x3"), trials=99)


def test_sfc_error_below_large_winograd():
    sfc = mse_experiment(catalog_algorithm("sfc6-6x6-3x3"), trials=300).mse_normalized
    w4 = mse_experiment(catalog_algorithm("wino-4x4-3x3"), trials=300).mse_normalized
    assert 1.0 < sfc < w4


def test_table1_is_deterministic():
    a, b = table1_report(trials=100, seed=5), table1_report(trials=100, seed=5)
    assert a == b and len(a) == 11


# -- bit operations ---------------------------------------------------------------------

def test_bop_unit_costs():
    assert mult_bops(8) == 56 and add_bops(8) == 8 and ACC_BITS == 32


def test_transform_adds_reuse():
    m = RationalMatrix.from_rows([[1, 1, 0], [1, -1, 0], [-1, -1, 0], [2, 0, 0], [1, 1, 1]])
    # row 3 duplicates row 1 up to sign; row 4 is row1 + row2; row 5 costs 2
    assert transform_adds(m) == 1 + 1 + 0 + 1 + 2


def test_bops_linear_in_input_channels_for_direct():
    base = LayerConfig(8, 16, 14, 14, 3)
    double = LayerConfig(16, 16, 14, 14, 3)
    d = catalog_algorithm("direct-3x3")
    m1, m2 = bops(base, d).mults, bops(double, d).mults
    assert m2 == 2 * m1


def test_direct_bops_formula():
    layer = LayerConfig(64, 64, 56, 56, 3)
    r = bops(layer, catalog_algorithm("direct-3x3"))
    outs = 56 * 56 * 64
    assert r.mults == outs * 64 * 9
    assert r.bops == r.mults * 56 + outs * (64 * 9 - 1) * 32


@pytest.mark.parametrize("name", ["sfc6-6x6-3x3", "sfc6-7x7-3x3", "sfc4-4x4-3x3", "wino-4x4-3x3"])
def test_fast_bops_below_direct(name):
    layer = LayerConfig(64, 64, 56, 56, 3)
    r = bops(layer, catalog_algorithm(name), QuantConfig(8, 8))
    assert r.bops < bops(layer, catalog_algorithm("direct-3x3")).bops
    assert r.bops_pct < 100 and r.complexity_pct < 100


def test_bops_rejects_stride_and_kernel_mismatch():
    with pytest.raises(ConfigurationError):
        bops(LayerConfig(4, 4, 16, 16, 3, stride=2), catalog_algorithm("sfc6-6x6-3x3"))
    with pytest.raises(ConfigurationError):
        bops(LayerConfig(4, 4, 16, 16, 5), catalog_algorithm("sfc6-6x6-3x3"))


def test_lower_bits_lower_bops():
    layer = LayerConfig(32, 32, 28, 28, 3)
    spec = catalog_algorithm("sfc6-7x7-3x3")
    assert bops(layer, spec, QuantConfig(4, 4)).bops < bops(layer, spec, QuantConfig(8, 8)).bops


# -- frequency statistics ---------------------------------------------------------------

def test_constant_input_energy_sits_in_dc():
    spec = catalog_algorithm("sfc6-6x6-3x3")
    e = frequency_energy(np.ones((1, 1, 32, 32)), spec)
    assert e.shape == (spec.T, spec.T)
    assert e[0, 0] == e.max() and e[0, 0] > 0
    dft = spec.overlap_output.fractions()[:spec.N]
    # pure DFT harmonics beyond DC vanish for a constant tile
    nonzero_harm = [i for i in range(1, spec.N) if any(dft[i])]
    assert all(e[i, i] < 1e-20 for i in nonzero_harm[:2])


def test_white_noise_energy_matches_row_norms():
    spec = catalog_algorithm("sfc6-6x6-3x3")
    x = gaussian((4, 8, 96, 96), np.random.default_rng(0))
    e = frequency_energy(x, spec)
    n = (spec.BT.to_float() ** 2).sum(axis=1)
    np.testing.assert_allclose(e, np.outer(n, n), rtol=0.1)


def test_onef_concentrates_low_frequencies():
    spec = catalog_algorithm("sfc6-6x6-3x3")
    x = onef((2, 4, 96, 96), np.random.default_rng(1))
    e = frequency_energy(x, spec)
    white = frequency_energy(gaussian((2, 4, 96, 96), np.random.default_rng(1)), spec)
    assert e[0, 0] / e.sum() > 2 * white[0, 0] / white.sum()


def test_onef_is_normalized():
    x = onef((1, 2, 64, 64), np.random.default_rng(0))
    assert abs(x.mean()) < 1e-10 and x.std() == pytest.approx(1.0, rel=1e-9)


def test_unknown_generator():
    with pytest.raises(ConfigurationError):
        synthetic("pink", (1, 1, 4, 4), np.random.default_rng(0))


def test_ablation_rows_cover_grid():
    layers = [LayerConfig(3, 3, 12, 12, 3, name="a"), LayerConfig(2, 4, 10, 10, 3, name="b")]
    rows = quant_ablation(layers, catalog_algorithm("sfc6-6x6-3x3"), bits=(8, 4))
    assert len(rows) == 2 * 2 * 3
    assert all(r["mse"] >= 0 for r in rows)
