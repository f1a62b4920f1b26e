import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from incoherent_ops.bloch import as_bloch, bloch_of, density
from incoherent_ops.channel import ChannelClass, apply, classify_channel
from incoherent_ops.conversion import feasible
from incoherent_ops.gibbs import (
    GIBBS_HEADER,
    InfiniteGapLimit,
    InfiniteTemperatureLimit,
    a2_range,
    gibbs_boundary_channel,
    gibbs_feasible,
    gibbs_params,
    gibbs_region,
    gibbs_region_csv,
    population,
    s_perp_max,
    sz_range,
)

R = (0.5, 0, 0.5)


@st.composite
def bloch(draw):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    n = np.linalg.norm(v)
    return tuple(v / n * draw(st.floats(0, 1))) if n > 1e-9 else (0.0, 0.0, 0.0)


t_values = st.one_of(st.floats(-1, 1), st.sampled_from([-1.0, 0.0, 1.0]))


def image(ch, r):
    return np.array(bloch_of(apply(ch, density(r))))


def test_gibbs_params_examples():
    p = 1 / (1 + math.exp(-1))
    assert gibbs_params(p, 1.0).gap == pytest.approx(1.0)
    with pytest.raises(InfiniteTemperatureLimit):
        gibbs_params(0.5, 1.0)
    with pytest.raises(InfiniteGapLimit):
        gibbs_params(1.0, 1.0)
    with pytest.raises(ValueError):
        gibbs_params(0.3, 0.0)


@given(st.floats(0.01, 0.99).filter(lambda p: abs(p - 0.5) > 1e-6), st.floats(0.1, 10))
def test_gibbs_params_round_trip(p, beta):
    assert gibbs_params(p, beta).population == pytest.approx(p, rel=1e-9)


def test_population():
    assert population(-0.2) == pytest.approx(0.4)


def test_a2_range_examples():
    assert a2_range(0) == 1
    assert a2_range(1) == 0
    assert a2_range(-0.2) == 1
    assert a2_range(0.5) == pytest.approx(1 / 3)


def test_sz_range_examples():
    assert sz_range(R, 0) == pytest.approx((-0.5, 0.5))
    assert sz_range(R, -0.2) == pytest.approx((-2 / 3, 0.5), abs=1e-12)
    assert sz_range(R, 1) == pytest.approx((0.5, 1))


def test_s_perp_max_examples():
    for z in np.linspace(-0.5, 0.5, 11):
        assert s_perp_max(R, 0, z) == pytest.approx(0.5, abs=1e-12)
    assert s_perp_max(R, 1, 1) == pytest.approx(0, abs=1e-12)
    assert s_perp_max(R, -0.2, 0.5) == pytest.approx(0.5, abs=1e-12)
    assert s_perp_max((0.4, 0, 0.3), 0.3, 0.3) == pytest.approx(0.4, abs=1e-9)
    with pytest.raises(ValueError):
        s_perp_max(R, -0.2, -0.9)


def test_closed_form_at_the_poles():
    for z in np.linspace(0.5, 1, 9):
        assert s_perp_max(R, 1, z) == pytest.approx(math.sqrt((1 - z) / 0.5) * 0.5, abs=1e-10)
    for z in np.linspace(-1, 0.5, 9):
        assert s_perp_max(R, -1, z) == pytest.approx(math.sqrt((1 + z) / 1.5) * 0.5, abs=1e-10)


def test_gibbs_feasible_examples():
    assert not gibbs_feasible(R, -0.2, (0, 0, -0.7))
    assert gibbs_feasible(R, -0.2, (0, 0, -0.2))
    assert gibbs_feasible(R, 0.7, R)
    region = gibbs_region(R, -0.2)
    assert (0, 0, -0.7) not in region
    assert region.s_perp_max(0.5) == pytest.approx(0.5)


def test_boundary_channel_examples():
    ch = gibbs_boundary_channel(R, 0, 0.5)
    assert image(ch, R) == pytest.approx(R, abs=1e-12)
    reset = gibbs_boundary_channel(R, 1, 1)
    assert image(reset, (0.3, -0.2, -0.7)) == pytest.approx((0, 0, 1), abs=1e-12)
    ch = gibbs_boundary_channel(R, -0.2, 0.0)
    assert image(ch, (0, 0, -0.2)) == pytest.approx((0, 0, -0.2), abs=1e-12)
    assert image(ch, R) == pytest.approx((s_perp_max(R, -0.2, 0.0), 0, 0), abs=1e-12)


def test_region_csv():
    rows = gibbs_region_csv(R, 0, 21)
    assert [z for z, _ in rows] == pytest.approx(np.linspace(-0.5, 0.5, 21))
    assert all(abs(p - 0.5) <= 1e-12 for _, p in rows)
    rows = gibbs_region_csv(R, 0.7, 15)
    assert (rows[0][0], rows[-1][0]) == pytest.approx(sz_range(R, 0.7))
    rows = gibbs_region_csv(R, 1, 15)
    assert all(abs(p - 0.5 * math.sqrt((1 - z) / 0.5)) <= 1e-10 for z, p in rows)
    assert GIBBS_HEADER == ("s_z", "s_perp_max")


def test_generic_formula_is_continuous_at_the_poles():
    for t, eps in [(1.0, -1e-9), (-1.0, 1e-9)]:
        lo, hi = sz_range(R, t)
        lo2, hi2 = sz_range(R, t + eps)
        assert (lo, hi) == pytest.approx((lo2, hi2), abs=1e-4)
        for z in np.linspace(max(lo, lo2), min(hi, hi2), 9):
            assert s_perp_max(R, t, z) == pytest.approx(s_perp_max(R, t + eps, z), abs=1e-4)


@given(bloch(), t_values, st.floats(0, 1))
def test_boundary_channel_properties(r, t, u):
    lo, hi = sz_range(r, t)
    z = lo + u * (hi - lo)
    ch = gibbs_boundary_channel(r, t, z)
    assert classify_channel(ch) == ChannelClass.SIO
    assert np.allclose(image(ch, (0, 0, t)), (0, 0, t), atol=1e-9)
    out = image(ch, r)
    assert out[2] == pytest.approx(z, abs=1e-9)
    assert math.hypot(out[0], out[1]) == pytest.approx(s_perp_max(r, t, z), abs=1e-9)


@given(bloch(), t_values, bloch())
def test_gibbs_region_inside_sio_region(r, t, s):
    if gibbs_feasible(r, t, s):
        assert feasible(r, s, slack=1e-9)


@given(bloch(), t_values, st.floats(0, 1))
def test_cauchy_schwarz_cap(r, t, u):
    lo, hi = sz_range(r, t)
    assert s_perp_max(r, t, lo + u * (hi - lo)) <= as_bloch(r).perp + 1e-12


@given(bloch(), t_values)
def test_fixed_state_and_identity_reachable(r, t):
    assert gibbs_feasible(r, t, (0, 0, t))
    assert gibbs_feasible(r, t, r)


@pytest.mark.parametrize("t", [-1.0, -0.2, 0.0, 0.7, 1.0])
@pytest.mark.parametrize("r", [(0.5, 0, 0.5), (-0.8, 0, -0.6), (0.6, 0.3, -0.2)])
def test_region_is_convex(r, t):
    rows = gibbs_region_csv(r, t, 60)
    pts = [(p, z) for z, p in rows] + [(0.0, z) for z, _ in rows]
    for i in range(0, len(pts), 3):
        for j in range(i + 1, len(pts), 5):
            mid = ((pts[i][0] + pts[j][0]) / 2, (pts[i][1] + pts[j][1]) / 2)
            assert gibbs_feasible(r, t, (mid[0], 0, mid[1]), slack=1e-6)
