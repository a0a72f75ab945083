import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from circle_rd import codec as cd
from circle_rd import geometry as g
from circle_rd import verification as vf
from circle_rd.codec import RandomnessModel as RM
from circle_rd.errors import InvalidCodeError, InvalidInputError, ModelMismatchError

PI = math.pi
dithers = st.floats(0.0, 1.0, exclude_max=True)
thetas = st.floats(0.0, 2 * PI, exclude_max=True)


def test_rate():
    assert cd.Rate(0).codewords == 1
    assert cd.Rate(32).codewords == 2**32
    for bad in (-1, 33, 1.0, True):
        with pytest.raises(InvalidInputError):
            cd.Rate(bad)


def test_codebook():
    np.testing.assert_allclose(cd.codebook(2), [0, PI / 2, PI, 3 * PI / 2])
    assert cd.codebook(0).tolist() == [0.0]


@pytest.mark.parametrize("theta, k", [(0.0, 0), (PI, 1), (PI / 2, 0), (3 * PI / 2, 0), (1.0, 0), (2.0, 1)])
def test_vq_encode_one_bit(theta, k):
    assert cd.vq_encode(theta, 1) == k


def test_vq_encode_ties_go_low():
    # R=2 boundaries at pi/4 (0|1) and 7pi/4 (3|0)
    assert cd.vq_encode(PI / 4, 2) == 0
    assert cd.vq_encode(7 * PI / 4, 2) == 0
    assert cd.vq_encode(3 * PI / 4, 2) == 1


@given(thetas, st.integers(1, 12))
def test_vq_encode_is_nearest_center(theta, bits):
    k = cd.vq_encode(theta, bits)
    n = 2**bits
    d_k = g.distortion(theta, 2 * PI * k / n)
    d_all = 1 - np.cos(2 * PI * np.arange(n) / n - theta)
    assert d_k <= d_all.min() + 1e-12


@given(thetas, dithers, dithers)
def test_vq_encode_ignores_dither(theta, u1, u2):
    assert cd.vq_encode(theta, 3, u1) == cd.vq_encode(theta, 3, u2) == cd.vq_encode(theta, 3)


def test_vq_decode_stochastic_examples():
    assert cd.vq_decode_stochastic(0, 0.5, 1) == 0.0
    eps = 1e-9
    v = cd.vq_decode_stochastic(1, 1 - eps, 1)
    assert v < 1.5 * PI and v == pytest.approx(1.5 * PI - PI * eps, abs=1e-14)
    assert cd.vq_decode_stochastic(0, 0.0, 2) == pytest.approx(7 * PI / 4, abs=1e-14)


def test_vq_decode_validation():
    with pytest.raises(InvalidCodeError):
        cd.vq_decode_stochastic(2, 0.5, 1)
    with pytest.raises(InvalidCodeError):
        cd.vq_decode_stochastic(-1, 0.5, 1)
    with pytest.raises(InvalidInputError):
        cd.vq_decode_stochastic(0, 1.0, 1)


def test_vq_decode_condmean_examples():
    p = cd.vq_decode_condmean(0, 1)
    assert (p.x1, p.x2) == pytest.approx((2 / PI, 0.0), abs=1e-15)
    assert p.radius == pytest.approx(0.63662, abs=1e-5)
    q = cd.vq_decode_condmean(1, 1)
    assert (q.x1, q.x2) == pytest.approx((-2 / PI, 0.0), abs=1e-15)
    with pytest.raises(InvalidCodeError):
        cd.vq_decode_condmean(4, 2)


def test_vq_decode_condmean_two_bits_against_sampled_arc():
    r = cd.vq_decode_condmean(0, 2)
    analytic = math.sin(PI / 4) / (PI / 4)
    assert (r.x1, r.x2) == pytest.approx((analytic, 0.0), abs=1e-15)
    assert analytic == pytest.approx(0.90032, abs=1e-5)
    phi = np.random.default_rng(2).uniform(-PI / 4, PI / 4, 400_000)
    assert np.cos(phi).mean() == pytest.approx(analytic, abs=3e-4)
    assert abs(np.sin(phi).mean()) < 3e-3


@pytest.mark.parametrize("theta, u, k", [(0.0, 0.3, 0), (PI, 0.3, 1), (PI, 0.6, 0), (2 * PI - 1e-9, 0.2, 0)])
def test_uq_encode_examples(theta, u, k):
    assert cd.uq_encode(theta, u, 1) == k


def test_uq_encode_rounds_half_away_from_zero():
    # N*theta/(2pi) + u == 0.5 exactly
    assert cd.uq_encode(0.0, 0.5, 1) == 1
    assert cd.uq_encode(PI, 0.5, 2) == 3


@pytest.mark.parametrize("k, u, expected", [(0, 0.0, 0.0), (1, 0.5, PI / 2), (0, 0.6, 1.4 * PI)])
def test_uq_decode_examples(k, u, expected):
    assert cd.uq_decode(k, u, 1) == pytest.approx(expected, abs=1e-14)


def test_uq_example_lies_in_support():
    theta_hat = cd.uq_decode(cd.uq_encode(PI, 0.6, 1), 0.6, 1)
    assert abs(g.wrap(theta_hat - PI)) <= PI / 2


@given(thetas, dithers, st.integers(0, 16))
def test_uq_roundtrip_error_bounded(theta, u, bits):
    n = 2**bits
    err = g.wrap(cd.uq_decode(cd.uq_encode(theta, u, bits), u, bits) - theta)
    assert abs(err) <= PI / n + 1e-9


def test_roundtrip_examples():
    rt = cd.roundtrip("uq", 0.0, 1, RM.SHARED, 0.3)
    assert rt.code == 0 and rt.angle == pytest.approx(g.canonicalize(-0.3 * PI), abs=1e-14)
    rt = cd.roundtrip("vq-stochastic", 0.1, 1, RM.INDEPENDENT, 0.77, 0.5)
    assert rt.code == 0 and rt.angle == 0.0 and rt.radius == 1.0
    rt = cd.roundtrip("vq-condmean", 0.1, 1, RM.NONE)
    assert rt.code == 0 and rt.angle == 0.0 and rt.radius == pytest.approx(2 / PI)
    assert rt.point.x1 == pytest.approx(2 / PI)


def test_roundtrip_model_checks():
    with pytest.raises(ModelMismatchError):
        cd.roundtrip("uq", 0.0, 1, RM.INDEPENDENT, 0.1, 0.2)
    with pytest.raises(ModelMismatchError):
        cd.roundtrip("uq", 0.0, 1, RM.NONE)
    with pytest.raises(ModelMismatchError):
        cd.roundtrip("vq-stochastic", 0.0, 1, RM.NONE)
    with pytest.raises(ModelMismatchError):
        cd.roundtrip("uq", 0.0, 1, RM.SHARED, 0.1, 0.2)
    with pytest.raises(ModelMismatchError):
        cd.roundtrip("vq-stochastic", 0.0, 1, RM.INDEPENDENT, 0.1)
    with pytest.raises(ModelMismatchError):
        cd.roundtrip("lattice", 0.0, 1)
    # shared with an identical decoder dither is fine
    assert cd.roundtrip("uq", 1.0, 1, RM.SHARED, 0.25, 0.25).code == cd.uq_encode(1.0, 0.25, 1)


def test_dither_topologies():
    a1, a2 = cd.draw_dithers(RM.SHARED, 3, 0, 1000)
    assert a1 is a2
    b1, b2 = cd.draw_dithers(RM.INDEPENDENT, 3, 0, 1000)
    np.testing.assert_array_equal(a1, b1)
    assert not np.array_equal(b1, b2)
    assert cd.draw_dithers(RM.NONE, 3, 0, 10) == (None, None)


@pytest.mark.parametrize("theta", [0.0, 1.0, PI, 5.0])
def test_uq_error_is_uniform_on_cell(theta):
    for bits in (1, 3):
        n = 2**bits
        err = vf.roundtrip_errors("uq", bits, theta, n=200_000, seed=11)
        assert err.min() >= -PI / n - 1e-12 and err.max() <= PI / n + 1e-12
        verdict = vf.chi_square_uniformity(err, -PI / n, PI / n, bins=32, alpha=0.01)
        assert verdict.passed, verdict


def test_vq_stochastic_reconstruction_uniform_on_arc():
    bits, n = 2, 4
    u = np.random.default_rng(5).random(200_000)
    for k in range(n):
        off = g.wrap(np.asarray(cd.vq_decode_stochastic(k, u, bits)) - 2 * PI * k / n)
        verdict = vf.chi_square_uniformity(off, -PI / n, PI / n, bins=32)
        assert verdict.passed, (k, verdict)
