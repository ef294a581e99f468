"""Numerical-integration cross-check of the direct-link outage probability.

With ``z = e**R`` and ``v = z g_se - g_sd``, all relays are conditionally
independent given ``v``. The outage probability is

    P = integral over v of  F_max(z | u = v + z - 1) * f(v) dv

where ``F_max(z | u)`` is the conditional CDF of the best relay's ratio and
``f`` is the (two-sided exponential) density of ``v``. Nothing from the
closed form is reused here, so agreement between the two is a real check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from scipy import integrate

from .analytic import to_probability
from .errors import DomainError, QuadratureError
from .model import ChannelParams, RateLike, as_rate


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be at least 10")


class QuadratureResult(NamedTuple):
    value: float
    abs_error: float
    evaluations: int


def cond_cdf_max(z: float, u: float, params: ChannelParams) -> float:
    """CDF at ``z`` of the best relay's secrecy ratio, given the direct-link offset ``u``.

    For ``u >= 0`` each relay has CDF ``1 - exp(-u/l_m) l_m / (z l_e + l_m)``
    and the result is its N-th power. For ``u < 0`` the result is
    ``(z l_e / (z l_e + l_m))**N exp(N u / (z l_e))``.
    """
    if not z >= 1.0:
        raise DomainError(f"z must be >= 1 (got {z!r})")
    lm, le, N = params.lambda_m, params.lambda_e, params.n_relays
    zle = z * le
    if u >= 0.0:
        single = (zle - lm * math.expm1(-u / lm)) / (zle + lm)
        return single**N
    return math.exp(N * (math.log(zle / (zle + lm)) + u / zle))


def cond_cdf_max_binomial(z: float, u: float, params: ChannelParams) -> float:
    """Expanded binomial form of :func:`cond_cdf_max` for ``u >= 0``; test cross-check only."""
    if u < 0.0:
        raise DomainError("the binomial form only covers u >= 0")
    lm, le, N = params.lambda_m, params.lambda_e, params.n_relays
    x = -lm / (z * le + lm) * math.exp(-u / lm)
    return math.fsum(math.comb(N, n) * x**n for n in range(N + 1))


def pdf_v(v: float, z: float, lambda_sd: float, lambda_se: float) -> float:
    """Density of ``v = z g_se - g_sd`` for exponential ``g_se``, ``g_sd``."""
    if not z >= 1.0:
        raise DomainError(f"z must be >= 1 (got {z!r})")
    norm = z * lambda_se + lambda_sd
    if v >= 0.0:
        return math.exp(-v / (z * lambda_se)) / norm
    return math.exp(v / lambda_sd) / norm


def _quad(fn, a, b, settings: QuadratureSettings, abs_tol: float):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            fn, a, b,
            epsabs=abs_tol, epsrel=settings.rel_tol,
            limit=settings.max_subdivisions, full_output=1,
        )
    value, err, info = out[0], out[1], out[2]
    if len(out) > 3:
        raise QuadratureError(f"quadrature on [{a:g}, {b:g}] failed: {out[3].splitlines()[0]}", err)
    return value, err, info["neval"]


def integrate_outage_with_direct(
    rate: RateLike, params: ChannelParams, settings: QuadratureSettings = QuadratureSettings()
) -> QuadratureResult:
    """Integrate the conditional CDF against the density of ``v``.

    The integration range is split at ``v = 1 - z`` (where ``u`` changes
    sign) and ``v = 0`` (the density's kink), and further at geometrically
    spaced offsets from both, starting at the narrowest feature width of
    the integrand, so that no scale is skipped by the adaptive rule. Both tails are cut where the
    density's remaining mass drops below ``abs_tol / 10``; the discarded
    mass is added back using the monotonicity of the conditional CDF, and
    the bracket it leaves is counted in the error estimate.
    """
    if not params.has_direct:
        raise DomainError("the quadrature oracle needs with-direct parameters")
    z = as_rate(rate).threshold
    shift = z - 1.0
    lsd, lse = params.lambda_sd, params.lambda_se
    right_scale = z * lse
    norm = right_scale + lsd
    cut = settings.abs_tol / 10.0

    def integrand(v):
        return cond_cdf_max(z, v + shift, params) * pdf_v(v, z, lsd, lse)

    # tail masses: right_scale/norm * exp(-T/right_scale), lsd/norm * exp(-T/lsd)
    t_right = right_scale * max(math.log(right_scale / (norm * cut)), 1.0)
    t_left = max(lsd * max(math.log(lsd / (norm * cut)), 1.0), shift)

    # narrowest feature width: F varies on l_m (u >= 0) or z l_e / N (u < 0)
    h = min(params.lambda_m / params.n_relays, z * params.lambda_e / params.n_relays,
            lsd, right_scale) / 4.0
    breaks = {-t_left, -shift, 0.0, t_right}
    for anchor, lo, hi in ((-shift, -t_left, t_right), (0.0, -t_left, t_right)):
        step = h
        while step < max(hi - anchor, anchor - lo):
            breaks.update(p for p in (anchor - step, anchor + step) if lo < p < hi)
            step *= 2.0
    breaks = sorted(breaks)

    piece_tol = settings.abs_tol / (2.0 * len(breaks))
    total, error, evaluations = 0.0, 0.0, 0
    for a, b in zip(breaks[:-1], breaks[1:]):
        value, err, neval = _quad(integrand, a, b, settings, piece_tol)
        total += value
        error += err
        evaluations += neval

    # integrand <= f(v) on the right, with the conditional CDF rising to 1
    right_mass = right_scale / norm * math.exp(-t_right / right_scale)
    f_right = cond_cdf_max(z, t_right + shift, params)
    total += right_mass * (1.0 + f_right) / 2.0
    error += right_mass * (1.0 - f_right) / 2.0
    # on the left the conditional CDF falls from its value at -t_left to 0
    left_mass = lsd / norm * math.exp(-t_left / lsd)
    f_left = cond_cdf_max(z, shift - t_left, params)
    total += left_mass * f_left / 2.0
    error += left_mass * f_left / 2.0

    if error > settings.abs_tol + settings.rel_tol * abs(total):
        raise QuadratureError("outage quadrature missed its tolerance", error)
    return QuadratureResult(total, error, evaluations)


def quadrature_outage_with_direct(
    rate: RateLike, params: ChannelParams, settings: QuadratureSettings = QuadratureSettings()
) -> float:
    return to_probability(integrate_outage_with_direct(rate, params, settings).value)
