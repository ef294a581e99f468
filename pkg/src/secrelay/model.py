"""Channel parameters, unit conversions and Rayleigh-fading SNR sampling.

Every mean SNR is stored as a linear power ratio and used as the *mean* of
an exponential law: a link with mean ``lam`` has density
``exp(-x / lam) / lam`` for ``x >= 0``.

Random streams are Philox (counter-based) generators keyed by
``(seed, index)``, so that independent sub-streams can be handed out to
parallel workers without overlap and without hidden global state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError

MAX_RELAYS = 64

_U52 = 2**52
_U52_SCALE = 2.0**-52


class Topology(str, enum.Enum):
    NO_DIRECT = "no-direct"
    WITH_DIRECT = "with-direct"


def _check_mean(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be positive and finite (got {value!r})")
    return value


@dataclass(frozen=True)
class ChannelParams:
    """Mean SNRs of every link plus the relay count.

    In the ``NO_DIRECT`` topology the direct-link means are stored as
    ``None`` whatever was passed in; nothing downstream reads them.
    """

    lambda_sd: Optional[float]
    lambda_se: Optional[float]
    lambda_m: float
    lambda_e: float
    n_relays: int
    topology: Topology = Topology.WITH_DIRECT

    def __post_init__(self):
        topology = Topology(self.topology)
        object.__setattr__(self, "topology", topology)
        object.__setattr__(self, "lambda_m", _check_mean("lambda_m", self.lambda_m))
        object.__setattr__(self, "lambda_e", _check_mean("lambda_e", self.lambda_e))
        if topology is Topology.NO_DIRECT:
            object.__setattr__(self, "lambda_sd", None)
            object.__setattr__(self, "lambda_se", None)
        else:
            if self.lambda_sd is None or self.lambda_se is None:
                raise DomainError("with-direct topology needs lambda_sd and lambda_se")
            object.__setattr__(self, "lambda_sd", _check_mean("lambda_sd", self.lambda_sd))
            object.__setattr__(self, "lambda_se", _check_mean("lambda_se", self.lambda_se))
        n = self.n_relays
        if isinstance(n, bool) or int(n) != n:
            raise DomainError(f"n_relays must be an integer (got {n!r})")
        n = int(n)
        if not 1 <= n <= MAX_RELAYS:
            raise DomainError(f"n_relays must be in [1, {MAX_RELAYS}] (got {n})")
        object.__setattr__(self, "n_relays", n)

    @classmethod
    def no_direct(cls, lambda_m: float, lambda_e: float, n_relays: int) -> "ChannelParams":
        return cls(None, None, lambda_m, lambda_e, n_relays, Topology.NO_DIRECT)

    @classmethod
    def with_direct(
        cls,
        lambda_sd: float,
        lambda_se: float,
        lambda_m: float,
        lambda_e: float,
        n_relays: int,
    ) -> "ChannelParams":
        return cls(lambda_sd, lambda_se, lambda_m, lambda_e, n_relays, Topology.WITH_DIRECT)

    @property
    def has_direct(self) -> bool:
        return self.topology is Topology.WITH_DIRECT


@dataclass(frozen=True)
class SecrecyRate:
    """Target secrecy rate in nats per channel use."""

    rate_nats: float

    def __post_init__(self):
        r = float(self.rate_nats)
        if not (math.isfinite(r) and r >= 0.0):
            raise DomainError(f"rate_nats must be finite and >= 0 (got {self.rate_nats!r})")
        object.__setattr__(self, "rate_nats", r)

    @classmethod
    def from_bits(cls, rate_bits: float) -> "SecrecyRate":
        return cls(float(rate_bits) * math.log(2.0))

    @property
    def threshold(self) -> float:
        """Outage threshold ``e**R`` on the secrecy ratio ``Z``."""
        return math.exp(self.rate_nats)


RateLike = Union[SecrecyRate, float, int]


def as_rate(rate: RateLike) -> SecrecyRate:
    return rate if isinstance(rate, SecrecyRate) else SecrecyRate(rate)


@dataclass(frozen=True)
class LinkDraw:
    """Instantaneous SNRs of every link for one trial."""

    gamma_sd: float
    gamma_se: float
    gamma_rd: tuple[float, ...]
    gamma_re: tuple[float, ...]

    def __post_init__(self):
        if len(self.gamma_rd) != len(self.gamma_re) or not self.gamma_rd:
            raise DomainError("gamma_rd and gamma_re must be non-empty and equally long")
        values = (self.gamma_sd, self.gamma_se, *self.gamma_rd, *self.gamma_re)
        if not all(math.isfinite(g) and g >= 0.0 for g in values):
            raise DomainError("instantaneous SNRs must be finite and non-negative")

    @property
    def n_relays(self) -> int:
        return len(self.gamma_rd)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def sample_exponential(mean: float, u: float) -> float:
    """Inverse-CDF draw ``-mean * ln(u)`` from an exponential law."""
    if not mean > 0.0:
        raise DomainError(f"mean must be positive (got {mean!r})")
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie strictly inside (0, 1) (got {u!r})")
    return -mean * math.log(u)


def make_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Deterministic Philox stream number ``index`` under ``seed``."""
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer (got {seed})")
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(seq))


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform variates on the open interval (0, 1).

    Values are ``(k + 1/2) / 2**52`` for integer ``k``, so both endpoints are
    excluded exactly and ``log`` of the result is always finite.
    """
    k = rng.integers(0, _U52, size=size, dtype=np.uint64)
    return (k.astype(np.float64) + 0.5) * _U52_SCALE


def draw_link_arrays(params: ChannelParams, rng: np.random.Generator, size: int):
    """Draw ``size`` independent trials at once.

    Returns
    -------
    gamma_sd, gamma_se : ndarray, shape (size,)
        Direct-link SNRs; identically zero without direct links.
    gamma_rd, gamma_re : ndarray, shape (size, n_relays)
        Relay-to-destination and relay-to-eavesdropper SNRs.

    Notes
    -----
    Each trial consumes one row of uniforms, ordered
    ``[sd, se, rd_1..rd_N, re_1..re_N]`` (the ``sd``/``se`` columns are
    absent without direct links).
    """
    n = params.n_relays
    if params.has_direct:
        u = open_uniform(rng, (size, 2 + 2 * n))
        logs = -np.log(u)
        gamma_sd = params.lambda_sd * logs[:, 0]
        gamma_se = params.lambda_se * logs[:, 1]
        logs = logs[:, 2:]
    else:
        u = open_uniform(rng, (size, 2 * n))
        logs = -np.log(u)
        gamma_sd = np.zeros(size)
        gamma_se = np.zeros(size)
    gamma_rd = params.lambda_m * logs[:, :n]
    gamma_re = params.lambda_e * logs[:, n:]
    return gamma_sd, gamma_se, gamma_rd, gamma_re


def draw_links(params: ChannelParams, rng: np.random.Generator) -> LinkDraw:
    """One trial's worth of link SNRs, consuming the stream like a batch of one."""
    sd, se, rd, re = draw_link_arrays(params, rng, 1)
    return LinkDraw(
        gamma_sd=float(sd[0]),
        gamma_se=float(se[0]),
        gamma_rd=tuple(float(g) for g in rd[0]),
        gamma_re=tuple(float(g) for g in re[0]),
    )
