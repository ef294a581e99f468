"""Extended-precision evaluation of cancellation-prone closed forms.

The alternating binomial sums in the outage formulas lose roughly
``N * log10(1 + x)`` decimal digits to cancellation, which makes them
useless in double precision once ``N`` reaches a few dozen. They are
evaluated with :mod:`mpmath` instead, at a working precision that is raised
until two successive evaluations agree to double precision.
"""

from __future__ import annotations

import math
import threading
from typing import Callable

import mpmath

_local = threading.local()

_GUARD_DIGITS = 20
_MAX_DPS = 4000


def _context() -> mpmath.MPContext:
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        # one private context per thread: mpmath.mp is process-global
        ctx = _local.ctx = mpmath.MPContext()
    return ctx


def starting_dps(n_terms: int) -> int:
    """Digits that absorb the worst-case cancellation of an N-term binomial sum."""
    return 30 + math.ceil(n_terms * math.log10(2.0))


def evaluate(fn: Callable[[mpmath.MPContext], "mpmath.mpf"], dps: int) -> float:
    """Evaluate ``fn(ctx)`` to full double precision.

    ``fn`` builds the quantity from floats using only ``ctx`` arithmetic.
    Precision is increased until two evaluations ``_GUARD_DIGITS`` apart
    round to the same double.
    """
    ctx = _context()
    ctx.dps = dps
    previous = fn(ctx)
    while True:
        dps += _GUARD_DIGITS
        if dps > _MAX_DPS:
            raise ArithmeticError("extended-precision evaluation did not settle")
        ctx.dps = dps
        current = fn(ctx)
        if float(current) == float(previous):
            return float(current)
        tol = ctx.mpf(2) ** -60 * abs(current)
        if abs(current - previous) <= tol:
            return float(current)
        previous = current
