"""Secrecy outage probability of opportunistic decode-and-forward relay selection."""

from .analytic import (
    cdf_zn_no_direct,
    f_correction,
    outage_no_direct,
    outage_no_direct_binomial,
    outage_probability,
    outage_with_direct,
)
from .asymptotic import SnrRatios, asym_no_direct, asym_with_direct_fixed, asym_with_direct_scaling
from .errors import DomainError, InternalConsistencyError, QuadratureError, UsageError
from .model import ChannelParams, LinkDraw, SecrecyRate, Topology, db_to_linear, linear_to_db
from .montecarlo import McConfig, McEstimate, estimate_outage
from .oracle import QuadratureSettings, quadrature_outage_with_direct

__version__ = "0.1.0"
