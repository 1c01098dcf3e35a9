import cmath
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sfconv.poly import (KERNELS, PolyElement, poly_mul, poly_mul3, poly_reduce_dft3, poly_reduce_dft4,
                         poly_reduce_dft6, raw_product)
from sfconv.rational import ConfigurationError, RationalMatrix, rational_matmul, solve_exact
from sfconv.sft import build_sft
from sfconv.tensor import (LayerConfig, apply_2d, apply_matrix, as_nchw, load_layers, read_sfct,
                           write_sfct)

small_ints = st.integers(-20, 20)


def _fraction_matmul(a, b):
    # schoolbook oracle over Python Fractions
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))]
            for i in range(len(a))]


# -- RationalMatrix ---------------------------------------------------------------------

def test_identity_times_matrix():
    m = RationalMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 9]], 4)
    assert rational_matmul(RationalMatrix.identity(3), m) == m


def test_f6_times_exact_inverse_is_identity():
    F6 = build_sft(6).F
    inv = F6.inverse()
    assert rational_matmul(F6, inv) == RationalMatrix.identity(6)
    assert rational_matmul(inv, F6) == RationalMatrix.identity(6)


def test_row_times_column():
    r = RationalMatrix.from_rows([[1, 1, 1]])
    c = RationalMatrix.from_rows([[1], [1], [1]])
    out = rational_matmul(r, c)
    assert out.num == ((3,),) and out.den == 1


def test_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        rational_matmul(RationalMatrix.identity(2), RationalMatrix.identity(3))


def test_denominator_reduced_by_gcd():
    a = RationalMatrix.from_rows([[2, 4]], 4)
    assert a.num == ((1, 2),) and a.den == 2
    b = RationalMatrix.from_rows([[3], [3]], 6)
    out = rational_matmul(a, b)
    assert out.fractions() == [[Fraction(3, 4)]]


def test_overflow_is_rejected():
    with pytest.raises(OverflowError):
        RationalMatrix.from_rows([[2**63]])


def test_json_roundtrip():
    m = RationalMatrix.from_rows([[1, -2], [0, 5]], 6)
    assert RationalMatrix.from_json(json.loads(json.dumps(m.to_json()))) == m


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.data())
def test_matmul_matches_fraction_oracle(n, k, m, data):
    a = data.draw(st.lists(st.lists(small_ints, min_size=k, max_size=k), min_size=n, max_size=n))
    b = data.draw(st.lists(st.lists(small_ints, min_size=m, max_size=m), min_size=k, max_size=k))
    da, db = data.draw(st.sampled_from([1, 4, 6])), data.draw(st.sampled_from([1, 4, 6]))
    A, B = RationalMatrix.from_rows(a, da), RationalMatrix.from_rows(b, db)
    assert rational_matmul(A, B).fractions() == _fraction_matmul(A.fractions(), B.fractions())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_roundtrip_is_exact(rows):
    m = RationalMatrix.from_rows(rows)
    det = round(np.linalg.det(np.array(rows, dtype=float)))
    if det == 0:
        with pytest.raises(ConfigurationError):
            m.inverse()
        return
    assert m @ m.inverse() == RationalMatrix.identity(3)


def test_solve_exact_returns_nullspace():
    u, null = solve_exact([[Fraction(1), Fraction(1)]], [Fraction(2)])
    assert u[0] + u[1] == 2
    assert len(null) == 1 and null[0][0] + null[0][1] == 0
    assert solve_exact([[Fraction(1)], [Fraction(1)]], [Fraction(1), Fraction(2)]) is None


# -- apply_matrix -----------------------------------------------------------------------

def test_identity_apply_is_noop():
    t = np.arange(12.0).reshape(3, 4)
    np.testing.assert_array_equal(apply_matrix(RationalMatrix.identity(3), t), t)


def test_f4_on_first_basis_vector():
    out = apply_matrix(build_sft(4).F, np.array([1, 0, 0, 0]))
    assert out.tolist() == [1, 1, 0, 1]


def test_f6_on_ones():
    out = apply_matrix(build_sft(6).F, np.ones(6, dtype=np.int64))
    assert out.tolist() == [6, 0, 0, 0, 0, 0]


def test_integer_input_stays_integer():
    out = apply_matrix(build_sft(6).F, np.arange(6))
    assert out.dtype == np.int64


def test_fold_divides_denominator():
    m = RationalMatrix.from_rows([[1, 1]], 4)
    assert apply_matrix(m, np.array([2.0, 6.0])).tolist() == [2.0]
    assert apply_matrix(m, np.array([2.0, 6.0]), fold=False).tolist() == [8.0]


def test_apply_matrix_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        apply_matrix(RationalMatrix.identity(3), np.zeros(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_apply_2d_matches_dense_product(seed):
    rng = np.random.default_rng(seed)
    m = RationalMatrix.from_rows(rng.integers(-3, 4, size=(5, 4)).tolist(), 6)
    t = rng.standard_normal((2, 4, 4))
    want = m.to_float() @ t @ m.to_float().T
    np.testing.assert_allclose(apply_2d(m, t), want, rtol=1e-12, atol=1e-12)


# -- symbolic elements --------------------------------------------------------------------

@pytest.mark.parametrize("fn,raw,want", [
    (poly_reduce_dft6, (0, 0, 1), (-1, 1)),
    (poly_reduce_dft6, (5, 2, 0), (5, 2)),
    (poly_reduce_dft4, (0, 0, 1), (-1, 0)),
    (poly_reduce_dft4, (3, 4, 0), (3, 4)),
    (poly_reduce_dft4, (1, 1, 1), (0, 1)),
])
def test_reduction_examples(fn, raw, want):
    out = fn(raw)
    assert (out.c0, out.c1) == want


def test_s_times_s_reduces():
    s = PolyElement(0, 1)
    out = poly_reduce_dft6(raw_product(s, s))
    assert (out.c0, out.c1) == (-1, 1)


ROOTS = {6: cmath.exp(1j * cmath.pi / 3), 4: 1j, 3: cmath.exp(2j * cmath.pi / 3)}
floats = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("points", [3, 4, 6])
def test_reduced_product_matches_complex_multiplication(points):
    rng = np.random.default_rng(points)
    s = ROOTS[points]
    for _ in range(1000):
        a0, a1, b0, b1 = rng.standard_normal(4)
        got = poly_mul(PolyElement(a0, a1), PolyElement(b0, b1), points)
        want = (a0 + a1 * s) * (b0 + b1 * s)
        assert abs(got.c0 + got.c1 * s - want) <= 1e-12 * max(1.0, abs(want))


@pytest.mark.parametrize("points", [3, 4, 6])
@settings(max_examples=50, deadline=None)
@given(a0=floats, a1=floats, b0=floats, b1=floats, c=floats)
def test_reduction_is_linear(points, a0, a1, b0, b1, c):
    from sfconv.poly import REDUCE
    red = REDUCE[points]
    x, y = (a0, a1, b0), (b1, c, a1)
    lhs = red(tuple(u + c * v for u, v in zip(x, y)))
    rx, ry = red(x), red(y)
    assert lhs.c0 == pytest.approx(rx.c0 + c * ry.c0, abs=1e-9, rel=1e-12)
    assert lhs.c1 == pytest.approx(rx.c1 + c * ry.c1, abs=1e-9, rel=1e-12)


@pytest.mark.parametrize("points", [3, 4, 6])
@settings(max_examples=50, deadline=None)
@given(a0=floats, a1=floats, b0=floats, b1=floats)
def test_three_mult_kernel_equals_schoolbook(points, a0, a1, b0, b1):
    a, b = PolyElement(a0, a1), PolyElement(b0, b1)
    want, got = poly_mul(a, b, points), poly_mul3(a, b, points)
    assert got.c0 == pytest.approx(want.c0, abs=1e-8)
    assert got.c1 == pytest.approx(want.c1, abs=1e-8)
    assert KERNELS[points][0].shape[0] == 3


def test_reduce_dft3_rule():
    out = poly_reduce_dft3((0, 0, 1))
    assert (out.c0, out.c1) == (-1, -1)


# -- tensors and configs ------------------------------------------------------------------

def test_as_nchw_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        as_nchw(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_nchw(np.full((1, 1, 2, 2), np.nan))


@pytest.mark.parametrize("dtype", ["float32", "float64", "int8", "int32"])
def test_sfct_roundtrip(tmp_path, dtype):
    a = (np.arange(2 * 3 * 4 * 5) - 50).reshape(2, 3, 4, 5).astype(dtype)
    p = tmp_path / "t.sfct"
    write_sfct(p, a)
    raw = p.read_bytes()
    assert raw[:8] == b"SFCT0001"
    hlen = int.from_bytes(raw[8:12], "little")
    header = json.loads(raw[12:12 + hlen])
    assert header == {"dtype": dtype, "shape": [2, 3, 4, 5], "layout": "row-major-nchw"}
    b = read_sfct(p)
    assert b.dtype == a.dtype
    np.testing.assert_array_equal(a, b)


def test_sfct_bad_magic(tmp_path):
    p = tmp_path / "bad.sfct"
    p.write_bytes(b"NOTSFCT!" + b"\0" * 8)
    with pytest.raises(ValueError):
        read_sfct(p)


def test_layer_config_defaults_and_json(tmp_path):
    cfg = LayerConfig(4, 8, 10, 12, 3, name="c1")
    assert cfg.padding == 1 and cfg.out_height == 10 and cfg.out_width == 12
    p = tmp_path / "layers.json"
    p.write_text(json.dumps([cfg.to_json(), {"in_channels": 2, "out_channels": 2, "height": 9,
                                             "width": 9, "kernel": 5, "stride": 2}]))
    got = load_layers(p)
    assert got[0] == cfg
    assert got[1].stride == 2 and got[1].out_height == 5


def test_layer_config_rejects_unknown_fields():
    with pytest.raises(ConfigurationError):
        LayerConfig.from_json({"in_channels": 1, "out_channels": 1, "height": 4, "width": 4,
                               "kernel": 3, "dilation": 2})
