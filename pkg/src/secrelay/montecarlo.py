"""Monte Carlo simulation of secrecy-based relay selection.

Each trial draws every link SNR, forms the secrecy ratio
``Z_n = (1 + g_rd[n] + g_sd) / (1 + g_re[n] + g_se)`` for every relay,
selects the relay with the largest ratio and declares an outage when
``Z_max <= e**R``. All relays are assumed to have decoded the source.

Trials are grouped into fixed-size blocks and block ``b`` always draws
from stream ``(seed, b)``. Shards only decide which worker runs which
blocks, so the outage count does not depend on the shard count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import DomainError
from .model import ChannelParams, LinkDraw, RateLike, as_rate, draw_link_arrays, make_stream

log = logging.getLogger(__name__)

BLOCK_TRIALS = 1 << 16


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int = 0
    shards: int = 1
    confidence: float = 0.95

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1 (got {self.trials})")
        if not 1 <= self.shards <= self.trials:
            raise DomainError(f"shards must be in [1, trials] (got {self.shards})")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer (got {self.seed})")
        if not 0.0 < self.confidence < 1.0:
            raise DomainError(f"confidence must lie in (0, 1) (got {self.confidence})")


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    trials: int
    successes: int
    ci_low: float
    ci_high: float

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Unlike the Wald interval it keeps a non-zero width at zero successes,
    which matters for small outage probabilities.
    """
    if trials < 1 or not 0 <= successes <= trials:
        raise DomainError("need 0 <= successes <= trials and trials >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p = successes / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (p + z2n / 2.0) / denom
    margin = z / denom * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))
    return max(0.0, min(center - margin, p)), min(1.0, max(center + margin, p))


def secrecy_ratio(draw: LinkDraw, n: int) -> float:
    if not 0 <= n < draw.n_relays:
        raise DomainError(f"relay index {n} out of range")
    return (1.0 + draw.gamma_rd[n] + draw.gamma_sd) / (1.0 + draw.gamma_re[n] + draw.gamma_se)


def select_relay(draw: LinkDraw) -> tuple[int, float]:
    """Index and value of the largest secrecy ratio; ties go to the lowest index."""
    best, best_z = 0, secrecy_ratio(draw, 0)
    for n in range(1, draw.n_relays):
        z = secrecy_ratio(draw, n)
        if z > best_z:
            best, best_z = n, z
    return best, best_z


def outage_trial(draw: LinkDraw, rate: RateLike) -> bool:
    # R_s = max(ln Z_max, 0) <= R  <=>  Z_max <= e**R for R >= 0
    _, z_max = select_relay(draw)
    return z_max <= as_rate(rate).threshold


def _block_outages(params: ChannelParams, threshold: float, seed: int, block: int, count: int):
    sd, se, rd, re = draw_link_arrays(params, make_stream(seed, block), count)
    ratios = (1.0 + rd + sd[:, None]) / (1.0 + re + se[:, None])
    return ratios.max(axis=1) <= threshold


def _blocks(trials: int) -> list[tuple[int, int]]:
    full, rest = divmod(trials, BLOCK_TRIALS)
    blocks = [(b, BLOCK_TRIALS) for b in range(full)]
    if rest:
        blocks.append((full, rest))
    return blocks


def outage_indicators(params: ChannelParams, rate: RateLike, seed: int, trials: int) -> np.ndarray:
    """Per-trial outage indicators in trial order (same stream layout as :func:`estimate_outage`)."""
    threshold = as_rate(rate).threshold
    return np.concatenate(
        [_block_outages(params, threshold, seed, b, count) for b, count in _blocks(trials)]
    )


def estimate_outage(params: ChannelParams, rate: RateLike, cfg: McConfig) -> McEstimate:
    threshold = as_rate(rate).threshold
    blocks = _blocks(cfg.trials)
    n_shards = min(cfg.shards, len(blocks))
    groups = [blocks[i::n_shards] for i in range(n_shards)]

    def run(group):
        return sum(int(np.count_nonzero(_block_outages(params, threshold, cfg.seed, b, count)))
                   for b, count in group)

    if n_shards == 1:
        successes = run(groups[0])
    else:
        with ThreadPoolExecutor(max_workers=n_shards) as pool:
            successes = sum(pool.map(run, groups))
    log.debug("mc: %d/%d outages (%d shards)", successes, cfg.trials, n_shards)
    lo, hi = wilson_interval(successes, cfg.trials, cfg.confidence)
    return McEstimate(successes / cfg.trials, cfg.trials, successes, lo, hi)
