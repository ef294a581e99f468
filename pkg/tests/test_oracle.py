import math

import numpy as np
import pytest
from scipy import integrate, stats

from secrelay.analytic import outage_with_direct
from secrelay.errors import DomainError, QuadratureError
from secrelay.model import ChannelParams, draw_link_arrays, make_stream
from secrelay.montecarlo import wilson_interval
from secrelay.verify import triple_agreement_grid
from secrelay.oracle import (
    QuadratureSettings,
    cond_cdf_max,
    cond_cdf_max_binomial,
    integrate_outage_with_direct,
    pdf_v,
    quadrature_outage_with_direct,
)

PARAMS = ChannelParams.with_direct(1.5, 2.5, 4.0, 3.0, 3)


def test_conditional_cdf_continuous_at_zero_offset():
    z = math.exp(0.3)
    assert cond_cdf_max(z, -1e-13, PARAMS) == pytest.approx(cond_cdf_max(z, 0.0, PARAMS), rel=1e-11)


def test_conditional_cdf_limits():
    z = math.exp(0.3)
    assert cond_cdf_max(z, 1e4, PARAMS) == pytest.approx(1.0, abs=1e-12)
    assert cond_cdf_max(z, -1e4, PARAMS) == 0.0


@pytest.mark.parametrize("u", [0.0, 0.1, 1.0, 10.0])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_conditional_cdf_product_and_binomial_agree(u, n):
    p = ChannelParams.with_direct(1.0, 1.0, 2.0, 3.0, n)
    z = math.exp(0.5)
    assert cond_cdf_max(z, u, p) == pytest.approx(cond_cdf_max_binomial(z, u, p), rel=1e-12)


@pytest.mark.parametrize("u", [-2.0, -0.3, 0.0, 0.7, 3.0])
def test_conditional_cdf_matches_simulation(u):
    # u = z - 1 + z g_se - g_sd, so relay n is in outage when g_rd - z g_re <= u
    z, trials = math.exp(0.3), 10**6
    _, _, rd, re = draw_link_arrays(PARAMS, make_stream(31), trials)
    hits = int(np.count_nonzero(np.all(rd - z * re <= u, axis=1)))
    lo, hi = wilson_interval(hits, trials, 0.6827)
    assert abs(hits / trials - cond_cdf_max(z, u, PARAMS)) <= 3 * (hi - lo) / 2


def test_pdf_integrates_to_one():
    z = math.exp(0.3)
    left, _ = integrate.quad(pdf_v, -np.inf, 0.0, args=(z, 1.5, 2.5))
    right, _ = integrate.quad(pdf_v, 0.0, np.inf, args=(z, 1.5, 2.5))
    assert left + right == pytest.approx(1.0, abs=1e-12)


def test_pdf_matches_sampled_difference():
    z, trials = math.exp(0.3), 10**6
    sd, se, _, _ = draw_link_arrays(PARAMS, make_stream(32), trials)
    v = z * se - sd
    edges = np.quantile(v, np.linspace(0, 1, 41))
    edges[0], edges[-1] = -np.inf, np.inf
    probs = np.array([integrate.quad(pdf_v, a, b, args=(z, 1.5, 2.5))[0] for a, b in zip(edges[:-1], edges[1:])])
    observed, _ = np.histogram(v, bins=edges)
    chi2 = stats.chisquare(observed, probs / probs.sum() * trials)
    assert chi2.pvalue > 1e-3


def test_error_estimate_bounds_refined_rerun():
    extra = [(0.3, PARAMS), (0.3, ChannelParams.with_direct(0.2, 30.0, 0.05, 40.0, 5))]
    for rate, params in triple_agreement_grid() + extra:
        base = integrate_outage_with_direct(rate, params)
        fine = integrate_outage_with_direct(rate, params, QuadratureSettings(1e-16, 1e-12))
        assert abs(base.value - fine.value) <= 10 * base.abs_error


def test_tight_settings_reach_relative_accuracy_for_small_values():
    params = ChannelParams.with_direct(10.0, 10**0.5, 1e3, 10**1.5, 4)
    exact = outage_with_direct(0.3, params)
    assert exact < 1e-5
    value = quadrature_outage_with_direct(0.3, params, QuadratureSettings(1e-18, 1e-10))
    assert abs(value - exact) <= 1e-12 * exact


def test_unreachable_tolerance_raises():
    with pytest.raises(QuadratureError) as info:
        integrate_outage_with_direct(0.3, PARAMS, QuadratureSettings(1e-300, 1e-16, 10))
    assert info.value.error_estimate > 0.0


def test_result_is_a_probability():
    value = quadrature_outage_with_direct(0.3, PARAMS)
    assert 0.0 < value < 1.0


def test_rejects_no_direct():
    with pytest.raises(DomainError):
        integrate_outage_with_direct(0.3, ChannelParams.no_direct(1.0, 1.0, 1))


def test_settings_validation():
    with pytest.raises(DomainError):
        QuadratureSettings(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSettings(max_subdivisions=5)
