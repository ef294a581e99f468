"""Exact secrecy outage probability of max-ratio relay selection.

Without direct links every relay's secrecy ratio
``Z_n = (1 + g_rd) / (1 + g_re)`` is independent of the others, and the
outage probability is the N-th power of one relay's CDF at ``e**R``.

With direct links the relays share ``g_sd`` and ``g_se``; conditioning on
``v = e**R * g_se - g_sd`` and integrating gives a three-term closed form
whose last term is an alternating binomial sum. That sum is evaluated in
extended precision (see :mod:`secrelay._precision`).

The middle term comes from ``v < 1 - e**R`` and carries the exponent
``-(e**R - 1) / l_sd``. A variant of the formula in circulation uses
``-(e**R - 1) * (1/l_sd + N/(e**R l_e) - N/l_m)`` there; it disagrees with
direct numerical integration and with simulation. ``variant="corrected"``
(the default) uses the integrated exponent and ``variant="as-printed"``
evaluates the other one, for comparison only.
"""

from __future__ import annotations

import math

from . import _precision
from .errors import DomainError, InternalConsistencyError
from .model import ChannelParams, RateLike, Topology, as_rate

PROBABILITY_SLACK = 1e-9
BRANCH_RTOL = 1e-9

VARIANTS = ("corrected", "as-printed")


def to_probability(value: float) -> float:
    """Clamp round-off excursions outside [0, 1]; reject anything larger."""
    if not math.isfinite(value) or value < -PROBABILITY_SLACK or value > 1.0 + PROBABILITY_SLACK:
        raise InternalConsistencyError(f"probability {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def is_degenerate(a: float, b: float) -> bool:
    """True when ``a`` and ``b`` tie closely enough to take the removable-singularity branch."""
    return abs(a - b) <= BRANCH_RTOL * max(a, b)


def cdf_zn_no_direct(z: float, lambda_m: float, lambda_e: float) -> float:
    """CDF of one relay's secrecy ratio without direct links.

    ``1 - exp(-(z - 1)/l_m) * l_m / (z l_e + l_m)``, evaluated as
    ``(z l_e - l_m expm1(-(z - 1)/l_m)) / (z l_e + l_m)`` so that no
    cancellation occurs when the CDF is small.
    """
    if not z >= 1.0:
        raise DomainError(f"z must be >= 1 (got {z!r})")
    if not (lambda_m > 0.0 and lambda_e > 0.0):
        raise DomainError("lambda_m and lambda_e must be positive")
    zle = z * lambda_e
    return (zle - lambda_m * math.expm1(-(z - 1.0) / lambda_m)) / (zle + lambda_m)


def _require(params: ChannelParams, topology: Topology) -> None:
    if params.topology is not topology:
        raise DomainError(f"expected {topology.value} parameters, got {params.topology.value}")


def outage_no_direct(rate: RateLike, params: ChannelParams) -> float:
    """Outage probability without direct links, ``F_1(e**R) ** N``."""
    _require(params, Topology.NO_DIRECT)
    z = as_rate(rate).threshold
    cdf = cdf_zn_no_direct(z, params.lambda_m, params.lambda_e)
    return to_probability(cdf**params.n_relays)


def outage_no_direct_binomial(rate: RateLike, params: ChannelParams) -> float:
    """Same quantity as :func:`outage_no_direct`, via the expanded binomial sum.

    ``sum_{n=0}^{N} C(N, n) (-l_m / (e**R l_e + l_m))**n exp(-n (e**R - 1) / l_m)``
    """
    _require(params, Topology.NO_DIRECT)
    r = as_rate(rate).rate_nats
    lm, le, N = params.lambda_m, params.lambda_e, params.n_relays

    def expansion(ctx):
        z = ctx.exp(r)
        c = ctx.expm1(r)
        ratio = -ctx.mpf(lm) / (z * le + lm)
        decay = ctx.exp(-c / lm)
        return ctx.fsum(math.comb(N, n) * (ratio * decay) ** n for n in range(N + 1))

    return to_probability(_precision.evaluate(expansion, _precision.starting_dps(N)))


def f_correction(n: int, rate: RateLike, lambda_sd: float, lambda_m: float) -> float:
    """Contribution of ``-(e**R - 1) <= v < 0`` to the n-th direct-link sum term.

    Equals ``l_sd l_m (exp((e**R - 1)(n/l_m - 1/l_sd)) - 1) / (n l_sd - l_m)``,
    with the removable-singularity value ``e**R - 1`` at ``n l_sd = l_m``.
    The bracket is computed as ``expm1(c k) / k`` with
    ``k = (n l_sd - l_m) / (l_sd l_m)``, which stays accurate as ``k -> 0``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1 (got {n})")
    if not (lambda_sd > 0.0 and lambda_m > 0.0):
        raise DomainError("lambda_sd and lambda_m must be positive")
    c = math.expm1(as_rate(rate).rate_nats)
    if is_degenerate(n * lambda_sd, lambda_m):
        return c
    k = (n * lambda_sd - lambda_m) / (lambda_sd * lambda_m)
    try:
        return math.expm1(c * k) / k
    except OverflowError:
        return math.inf


def _f_correction_mp(ctx, n, c, lambda_sd, lambda_m):
    if is_degenerate(n * lambda_sd, lambda_m):
        return c
    k = (n * ctx.mpf(lambda_sd) - lambda_m) / (ctx.mpf(lambda_sd) * lambda_m)
    return ctx.expm1(c * k) / k


def _with_direct_expression(r, lsd, lse, lm, le, N, as_printed):
    def expression(ctx):
        z = ctx.exp(r)
        c = ctx.expm1(r)
        denom = z * lse + lsd
        first = 1 - lsd / denom * ctx.exp(-c / lsd)

        harmonic = 1 / ctx.mpf(lsd) + N / (z * le)
        exponent = -c * (harmonic - ctx.mpf(N) / lm) if as_printed else -c / lsd
        second = (z * le / (z * le + lm)) ** N / harmonic / denom * ctx.exp(exponent)

        ratio = -ctx.mpf(lm) / (z * le + lm)
        terms = []
        for n in range(1, N + 1):
            bracket = z * lse * lm / (n * z * lse + lm) + _f_correction_mp(ctx, n, c, lsd, lm)
            terms.append(math.comb(N, n) * ratio**n * ctx.exp(-n * c / lm) / denom * bracket)
        return ctx.fsum([first, second, *terms])

    return expression


def outage_with_direct(rate: RateLike, params: ChannelParams, variant: str = "corrected") -> float:
    """Outage probability with direct source-destination/eavesdropper links.

    Parameters
    ----------
    rate : SecrecyRate or float
        Target secrecy rate in nats.
    params : ChannelParams
        Must use the with-direct topology.
    variant : {"corrected", "as-printed"}
        ``"corrected"`` returns a validated probability. ``"as-printed"``
        evaluates the alternative middle-term exponent and returns
        the raw number, which can leave [0, 1].
    """
    _require(params, Topology.WITH_DIRECT)
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS} (got {variant!r})")
    r = as_rate(rate).rate_nats
    N = params.n_relays
    expression = _with_direct_expression(
        r, params.lambda_sd, params.lambda_se, params.lambda_m, params.lambda_e, N,
        as_printed=variant == "as-printed",
    )
    value = _precision.evaluate(expression, _precision.starting_dps(N))
    if variant == "as-printed":
        return value
    return to_probability(value)


def outage_probability(rate: RateLike, params: ChannelParams) -> float:
    """Exact outage probability for either topology."""
    if params.has_direct:
        return outage_with_direct(rate, params)
    return outage_no_direct(rate, params)
