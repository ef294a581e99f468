"""High-SNR limits of the outage probability.

Three regimes are covered:

* no direct links, ``l_m, l_e -> inf`` at fixed ``kappa = l_m / l_e``;
* fixed direct-link SNRs ``l_sd, l_se`` with the relay SNRs growing;
* every SNR growing at fixed ratios.

For the fixed-direct-link case two forms of the middle term are offered.
The limit of the exact expression keeps a factor ``exp(-(e**R - 1)/l_sd)``
and the denominator ``e**R + N kappa_d``; the ``as-printed`` form drops the
factor and has ``e**R + kappa_d``. ``"limit-consistent"`` is the default and
is the only one that reduces to the no-direct limit as
``kappa_d, kappa_e, kappa_m -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from . import _precision
from .analytic import is_degenerate, to_probability
from .errors import DomainError
from .model import ChannelParams, RateLike, as_rate

MODES = ("limit-consistent", "as-printed")

_RATIO_RTOL = 1e-12


@dataclass(frozen=True)
class SnrRatios:
    """Mean-SNR ratios of one parameter point.

    ``kappa = l_m/l_e``, ``kappa_s = l_sd/l_se``, ``kappa_d = l_sd/l_e``,
    ``kappa_e = l_se/l_m``, ``kappa_m = l_sd/l_m``. Only three of them are
    free; construction checks ``kappa_d = kappa_m kappa = kappa_s kappa_e kappa``.
    Use :meth:`from_params` rather than filling the fields by hand.
    """

    kappa: float
    kappa_s: float
    kappa_d: float
    kappa_e: float
    kappa_m: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{f.name} must be positive and finite (got {v!r})")
        for implied in (self.kappa_m * self.kappa, self.kappa_s * self.kappa_e * self.kappa):
            if not math.isclose(self.kappa_d, implied, rel_tol=_RATIO_RTOL):
                raise DomainError("inconsistent SNR ratios: they must come from one parameter set")

    @classmethod
    def from_params(cls, params: ChannelParams) -> "SnrRatios":
        if not params.has_direct:
            raise DomainError("direct-link ratios need with-direct parameters")
        return cls(
            kappa=params.lambda_m / params.lambda_e,
            kappa_s=params.lambda_sd / params.lambda_se,
            kappa_d=params.lambda_sd / params.lambda_e,
            kappa_e=params.lambda_se / params.lambda_m,
            kappa_m=params.lambda_sd / params.lambda_m,
        )


def _check_common(kappa: float, n_relays: int) -> None:
    if not (math.isfinite(kappa) and kappa > 0.0):
        raise DomainError(f"kappa must be positive and finite (got {kappa!r})")
    if int(n_relays) != n_relays or n_relays < 1:
        raise DomainError(f"n_relays must be a positive integer (got {n_relays!r})")


def asym_no_direct(rate: RateLike, kappa: float, n_relays: int) -> float:
    """``(e**R / (e**R + kappa)) ** N``."""
    _check_common(kappa, n_relays)
    z = as_rate(rate).threshold
    return to_probability((z / (z + kappa)) ** int(n_relays))


def asym_with_direct_fixed(
    rate: RateLike,
    lambda_sd: float,
    lambda_se: float,
    ratios: SnrRatios,
    n_relays: int,
    mode: str = "limit-consistent",
) -> float:
    """High relay-SNR outage probability with fixed direct-link SNRs.

    The ratios are taken at the caller's finite reference point. In
    ``"as-printed"`` mode the raw value is returned without range checks.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES} (got {mode!r})")
    _check_common(ratios.kappa, n_relays)
    if not (lambda_sd > 0.0 and lambda_se > 0.0):
        raise DomainError("lambda_sd and lambda_se must be positive")
    r = as_rate(rate).rate_nats
    N = int(n_relays)
    kappa, kd, ke, km = ratios.kappa, ratios.kappa_d, ratios.kappa_e, ratios.kappa_m
    lsd, lse = lambda_sd, lambda_se

    def expression(ctx):
        z = ctx.exp(r)
        c = ctx.expm1(r)
        denom = z * lse + lsd
        decay = ctx.exp(-c / lsd)
        first = 1 - lsd / denom * decay
        selected = (z / (z + kappa)) ** N
        if mode == "limit-consistent":
            second = selected * z * lsd * decay / (denom * (z + N * kd))
        else:
            second = selected * z * lsd / (denom * (z + kd))
        ratio = -kappa / (z + kappa)
        terms = []
        for n in range(1, N + 1):
            if is_degenerate(n * km, 1.0):
                fa = c
            else:
                k = (n * ctx.mpf(km) - 1) / lsd
                fa = ctx.expm1(c * k) / k
            bracket = z * lse / (n * z * ke + 1) + fa
            terms.append(math.comb(N, n) / denom * ratio**n * bracket)
        return ctx.fsum([first, second, *terms])

    value = _precision.evaluate(expression, _precision.starting_dps(N))
    return value if mode == "as-printed" else to_probability(value)


def asym_with_direct_scaling(
    rate: RateLike,
    kappa: float,
    kappa_s: float,
    kappa_d: float,
    kappa_e: float,
    n_relays: int,
) -> float:
    """Outage probability when every mean SNR grows at fixed ratios."""
    _check_common(kappa, n_relays)
    for name, v in (("kappa_s", kappa_s), ("kappa_d", kappa_d), ("kappa_e", kappa_e)):
        if not (math.isfinite(v) and v > 0.0):
            raise DomainError(f"{name} must be positive and finite (got {v!r})")
    r = as_rate(rate).rate_nats
    N = int(n_relays)

    def expression(ctx):
        z = ctx.exp(r)
        scale = z + kappa_s
        selected = (z / (z + kappa)) ** N
        ratio = -kappa / (z + kappa)
        terms = [z / scale, selected * z * kappa_s / (scale * (z + N * kappa_d))]
        for n in range(1, N + 1):
            terms.append(z * math.comb(N, n) / (scale * (n * z * kappa_e + 1)) * ratio**n)
        return ctx.fsum(terms)

    return to_probability(_precision.evaluate(expression, _precision.starting_dps(N)))
