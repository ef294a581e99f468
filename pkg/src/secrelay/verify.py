"""Cross-validation presets: closed form against quadrature and simulation.

The ``acceptance`` preset checks, on a grid of direct-link parameter
points, that the closed form matches the quadrature oracle to a relative
tolerance and that Monte Carlo lands within three standard errors of it
(one excursion allowed across the grid). It then checks that each
high-SNR limit is within an absolute tolerance of the exact value.

Monte Carlo tolerances use the Wilson interval at one-sigma confidence, so
"three half-widths" means three standard errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Optional

from . import analytic, asymptotic, oracle
from .model import ChannelParams, db_to_linear
from .montecarlo import McConfig, estimate_outage

ONE_SIGMA = NormalDist().cdf(1.0) - NormalDist().cdf(-1.0)
MC_SIGMAS = 3.0
MC_ALLOWED_EXCURSIONS = 1
ORACLE_RTOL = 1e-8
ASYMPTOTIC_ATOL = 1e-3


def triple_agreement_grid() -> list[tuple[float, ChannelParams]]:
    """18 points at R = 0.3 plus two R = 0 edge points with all means equal."""
    direct = [(10**0.5, 10**0.5), (10.0, 10.0), (10**0.5, 10.0)]
    relay = [10**0.5, 10**1.5, 10**2.5]
    grid = [
        (0.3, ChannelParams.with_direct(lsd, lse, lm, lm, n))
        for lsd, lse in direct
        for lm in relay
        for n in (1, 3)
    ]
    grid.append((0.0, ChannelParams.with_direct(10**0.5, 10**0.5, 10**0.5, 10**0.5, 1)))
    grid.append((0.0, ChannelParams.with_direct(10.0, 10.0, 10.0, 10.0, 3)))
    return grid


def asymptotic_cases() -> list[tuple[str, str, Callable[[], float], Callable[[], float]]]:
    """``(kind, point, exact, limit)`` for every high-SNR convergence check."""
    rate = 0.3
    cases = []
    for kappa_db in (0.0, 10.0):
        for n in (1, 2, 4):
            lm = db_to_linear(60.0)
            kappa = db_to_linear(kappa_db)
            p = ChannelParams.no_direct(lm, lm / kappa, n)
            cases.append((
                "asym-no-direct", f"lm=60dB kappa={kappa_db:g}dB N={n}",
                lambda p=p: analytic.outage_no_direct(rate, p),
                lambda kappa=kappa, n=n: asymptotic.asym_no_direct(rate, kappa, n),
            ))
    for n in (1, 2, 4):
        p = ChannelParams.with_direct(db_to_linear(5), db_to_linear(5),
                                      db_to_linear(70), db_to_linear(70), n)
        cases.append((
            "asym-fixed-direct", f"lm=le=70dB lsd=lse=5dB N={n}",
            lambda p=p: analytic.outage_with_direct(rate, p),
            lambda p=p: asymptotic.asym_with_direct_fixed(
                rate, p.lambda_sd, p.lambda_se, asymptotic.SnrRatios.from_params(p), p.n_relays),
        ))
    for n in (1, 2, 4):
        lam = db_to_linear(60)
        p = ChannelParams.with_direct(lam, lam, lam, lam, n)
        cases.append((
            "asym-scaling", f"all=60dB N={n}",
            lambda p=p: analytic.outage_with_direct(rate, p),
            lambda n=n: asymptotic.asym_with_direct_scaling(rate, 1.0, 1.0, 1.0, 1.0, n),
        ))
    return cases


@dataclass
class CheckRow:
    kind: str
    point: str
    reference: float
    value: float
    error: float
    tolerance: float
    status: str


@dataclass
class VerifyReport:
    preset: str
    rows: list[CheckRow] = field(default_factory=list)

    @property
    def excursions(self) -> int:
        return sum(r.status == "EXCURSION" for r in self.rows)

    @property
    def failures(self) -> int:
        return sum(r.status == "FAIL" for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.excursions <= MC_ALLOWED_EXCURSIONS

    def format(self) -> str:
        lines = [
            f"{'check':<18} {'point':<44} {'reference':>14} {'value':>14} "
            f"{'error':>10} {'tolerance':>10}  status"
        ]
        for r in self.rows:
            lines.append(
                f"{r.kind:<18} {r.point:<44} {r.reference:>14.10g} {r.value:>14.10g} "
                f"{r.error:>10.3e} {r.tolerance:>10.3e}  {r.status}"
            )
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(
            f"summary: preset={self.preset} checks={len(self.rows)} failures={self.failures} "
            f"mc_excursions={self.excursions} (allowed {MC_ALLOWED_EXCURSIONS}) -> {verdict}"
        )
        return "\n".join(lines)


def _describe(rate: float, p: ChannelParams) -> str:
    return (f"R={rate:g} lsd={p.lambda_sd:.4g} lse={p.lambda_se:.4g} "
            f"lm={p.lambda_m:.4g} le={p.lambda_e:.4g} N={p.n_relays}")


def run_acceptance(trials: int, seed: int, max_rel_err: Optional[float] = None, shards: int = 1) -> VerifyReport:
    report = VerifyReport("acceptance")
    oracle_rtol = ORACLE_RTOL if max_rel_err is None else max_rel_err
    cfg = McConfig(trials, seed, min(shards, trials), ONE_SIGMA)
    for rate, p in triple_agreement_grid():
        point = _describe(rate, p)
        exact = analytic.outage_with_direct(rate, p)
        quad = oracle.quadrature_outage_with_direct(rate, p)
        rel = abs(quad - exact) / exact
        report.rows.append(CheckRow("oracle", point, exact, quad, rel, oracle_rtol,
                                    "ok" if rel <= oracle_rtol else "FAIL"))

        est = estimate_outage(p, rate, cfg)
        bound = MC_SIGMAS * est.half_width
        diff = abs(est.p_hat - exact)
        if max_rel_err is not None and diff > max_rel_err * exact:
            status = "FAIL"
        elif diff > bound:
            status = "EXCURSION"
        else:
            status = "ok"
        report.rows.append(CheckRow("mc", point, exact, est.p_hat, diff, bound, status))

    for kind, point, exact_fn, limit_fn in asymptotic_cases():
        exact, limit = exact_fn(), limit_fn()
        gap = abs(limit - exact)
        report.rows.append(CheckRow(kind, point, exact, limit, gap, ASYMPTOTIC_ATOL,
                                    "ok" if gap <= ASYMPTOTIC_ATOL else "FAIL"))
    return report


PRESETS = {"acceptance": run_acceptance}
