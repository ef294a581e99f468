import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from secrelay.errors import DomainError
from secrelay.model import (
    MAX_RELAYS,
    ChannelParams,
    LinkDraw,
    SecrecyRate,
    Topology,
    db_to_linear,
    draw_link_arrays,
    draw_links,
    linear_to_db,
    make_stream,
    open_uniform,
    sample_exponential,
)


@pytest.mark.parametrize(
    "x_db, expected",
    [(0.0, 1.0), (15.0, math.sqrt(1000.0)), (-10.0, 0.1)],
)
def test_db_to_linear(x_db, expected):
    assert db_to_linear(x_db) == pytest.approx(expected, rel=1e-15)


@given(st.floats(min_value=-40, max_value=40))
def test_db_round_trip(x):
    assert abs(linear_to_db(db_to_linear(x)) - x) <= 1e-12


def test_sample_exponential_examples():
    assert sample_exponential(2.0, math.exp(-1.0)) == pytest.approx(2.0, rel=1e-15)
    assert sample_exponential(1.0, 0.5) == pytest.approx(math.log(2.0), rel=1e-15)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_sample_exponential_rejects_endpoints(u):
    with pytest.raises(DomainError):
        sample_exponential(1.0, u)


def test_sample_exponential_rejects_bad_mean():
    with pytest.raises(DomainError):
        sample_exponential(0.0, 0.5)


def test_sample_exponential_empirical_mean():
    u = open_uniform(make_stream(11), 10**6)
    draws = [sample_exponential(5.0, x) for x in u.tolist()]
    assert abs(sum(draws) / len(draws) - 5.0) <= 0.02


def test_open_uniform_stays_inside_unit_interval():
    u = open_uniform(make_stream(3), 10**6)
    assert u.min() > 0.0 and u.max() < 1.0
    assert np.isfinite(np.log(u)).all()


def test_sampler_passes_ks_in_repeated_runs():
    params = ChannelParams.no_direct(3.0, 1.0, 1)
    passes = 0
    runs = 20
    for seed in range(runs):
        _, _, rd, _ = draw_link_arrays(params, make_stream(seed), 10**5)
        if stats.kstest(rd[:, 0], stats.expon(scale=3.0).cdf).pvalue > 0.01:
            passes += 1
    assert passes >= 0.95 * runs


def test_no_direct_draws_have_zero_direct_links():
    params = ChannelParams.no_direct(2.0, 3.0, 4)
    draw = draw_links(params, make_stream(1))
    assert draw.gamma_sd == 0.0 and draw.gamma_se == 0.0
    assert len(draw.gamma_rd) == len(draw.gamma_re) == 4


def test_draws_are_deterministic_and_distinct():
    params = ChannelParams.with_direct(1.0, 2.0, 3.0, 4.0, 3)
    rng = make_stream(42)
    first, second = draw_links(params, rng), draw_links(params, rng)
    assert first != second
    rng = make_stream(42)
    assert (draw_links(params, rng), draw_links(params, rng)) == (first, second)


def test_single_draws_follow_the_batch_stream():
    params = ChannelParams.with_direct(1.0, 2.0, 3.0, 4.0, 3)
    sd, se, rd, re = draw_link_arrays(params, make_stream(5, 2), 4)
    rng = make_stream(5, 2)
    for i in range(4):
        d = draw_links(params, rng)
        assert d.gamma_sd == sd[i] and d.gamma_se == se[i]
        assert d.gamma_rd == tuple(rd[i]) and d.gamma_re == tuple(re[i])


def test_streams_differ_by_index():
    a = open_uniform(make_stream(9, 0), 8)
    b = open_uniform(make_stream(9, 1), 8)
    assert not np.array_equal(a, b)


def test_relay_snr_moment():
    params = ChannelParams.no_direct(10.0, 1.0, 1)
    _, _, rd, _ = draw_link_arrays(params, make_stream(8), 10**6)
    assert abs(rd.mean() - 10.0) <= 0.05


def test_direct_link_moments():
    params = ChannelParams.with_direct(2.0, 7.0, 1.0, 1.0, 1)
    sd, se, _, _ = draw_link_arrays(params, make_stream(21), 10**6)
    assert abs(sd.mean() - 2.0) <= 0.01
    assert abs(se.mean() - 7.0) <= 0.035


class TestChannelParams:
    def test_no_direct_factory_discards_direct_means(self):
        p = ChannelParams(5.0, 6.0, 1.0, 2.0, 3, Topology.NO_DIRECT)
        assert p.lambda_sd is None and p.lambda_se is None
        assert not p.has_direct

    def test_topology_accepts_strings(self):
        p = ChannelParams(1.0, 1.0, 1.0, 1.0, 1, "with-direct")
        assert p.topology is Topology.WITH_DIRECT

    @pytest.mark.parametrize("n", [0, MAX_RELAYS + 1, -1])
    def test_relay_count_bounds(self, n):
        with pytest.raises(DomainError, match="n_relays"):
            ChannelParams.no_direct(1.0, 1.0, n)

    def test_relay_count_must_be_integral(self):
        with pytest.raises(DomainError):
            ChannelParams.no_direct(1.0, 1.0, 2.5)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_means_must_be_positive_finite(self, bad):
        with pytest.raises(DomainError):
            ChannelParams.with_direct(bad, 1.0, 1.0, 1.0, 1)
        with pytest.raises(DomainError):
            ChannelParams.no_direct(1.0, bad, 1)

    def test_with_direct_requires_direct_means(self):
        with pytest.raises(DomainError):
            ChannelParams(None, 1.0, 1.0, 1.0, 1, Topology.WITH_DIRECT)


def test_secrecy_rate():
    assert SecrecyRate.from_bits(1.0).rate_nats == pytest.approx(math.log(2.0))
    assert SecrecyRate(0.3).threshold == pytest.approx(math.exp(0.3))
    for bad in (-0.1, math.inf, math.nan):
        with pytest.raises(DomainError):
            SecrecyRate(bad)


def test_link_draw_invariants():
    with pytest.raises(DomainError):
        LinkDraw(0.0, 0.0, (1.0, 2.0), (1.0,))
    with pytest.raises(DomainError):
        LinkDraw(-1.0, 0.0, (1.0,), (1.0,))
    assert LinkDraw(0.0, 0.0, (1.0, 2.0), (1.0, 0.5)).n_relays == 2


def test_seed_range():
    with pytest.raises(DomainError):
        make_stream(-1)
    with pytest.raises(DomainError):
        make_stream(2**64)
    make_stream(2**64 - 1)
