"""
Linear steering quantities and the bounds relating them to the average
correlation.

s_n is the root of the sum of the n largest squared singular values of T.
The n-setting linear steering inequality is violated iff s_n > 1, and the
two-setting case coincides with the CHSH maximum 2 s_2.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from .avgcorr import average_correlation
from .config import NUMERIC_CONFIG
from .errors import BadSetting, DomainError
from .models import (
    BlochForm, CanonicalCorrelation, Classification, MeasurementSettings, Nonclassical,
    SteeringReport,
)
from .numerics import e_integral

logger = logging.getLogger(__name__)

NONCLASSICAL_NECESSARY = 0.25
NONCLASSICAL_SUFFICIENT = 1 / (2 * math.sqrt(2))


def _check_n(n: int):
    if n not in (2, 3):
        raise BadSetting(f"number of settings must be 2 or 3, got {n}")


def degree_of_steerability(cc: CanonicalCorrelation, n: int) -> float:
    _check_n(n)
    values = cc.as_tuple()[:n]
    return math.sqrt(sum(v * v for v in values))


def steering_violation(cc: CanonicalCorrelation, n: int) -> float:
    """max{0, (s_n - 1) / (sqrt(n) - 1)}."""
    sn = degree_of_steerability(cc, n)
    return max(0.0, (sn - 1.0) / (math.sqrt(n) - 1.0))


def steering_functional(b: BlochForm, m: MeasurementSettings) -> float:
    """(1/sqrt(n)) |sum_i a_i^T T b_i| for explicit measurement directions."""
    T = np.asarray(b.T, dtype=float)
    total = sum(float(a @ T @ bb) for a, bb in zip(m.a, m.b))
    return abs(total) / math.sqrt(m.n)


def sigma_bounds(sn: float, n: int) -> Tuple[float, float]:
    """
    min{s_n/4, E(s_n)/4} <= Sigma <= s_n / (2 sqrt(n)).

    The lower bound switches branch at s_n = 1, where E(1) = 1.
    """
    _check_n(n)
    tol = NUMERIC_CONFIG['DOMAIN_TOL']
    if not -tol <= sn <= math.sqrt(n) + tol:
        raise DomainError(f"s{n} must lie in [0, sqrt({n})], got {sn}")
    sn = min(max(sn, 0.0), math.sqrt(n))
    lower = sn / 4 if sn < 1.0 else e_integral(sn) / 4
    upper = sn / (2 * math.sqrt(n))
    return lower, upper


def classify(sigma: float, s2: float, s3: float) -> Classification:
    if sigma >= NONCLASSICAL_SUFFICIENT:
        verdict = Nonclassical.YES
    elif sigma < NONCLASSICAL_NECESSARY:
        verdict = Nonclassical.NO
    else:
        verdict = Nonclassical.INDETERMINATE
    return Classification(bell_nonlocal=s2 > 1.0, steerable3=s3 > 1.0, nonclassical=verdict)


def steering_report(cc: CanonicalCorrelation) -> SteeringReport:
    """All steering quantities of one canonical triple; bounds are None outside the physical s3 range."""
    s2 = degree_of_steerability(cc, 2)
    s3 = degree_of_steerability(cc, 3)
    try:
        lower, upper = sigma_bounds(s3, 3)
    except DomainError:
        logger.warning("s3=%.6f outside [0, sqrt(3)], bounds not reported", s3)
        lower = upper = None
    return SteeringReport(
        s2=s2,
        s3=s3,
        S2=steering_violation(cc, 2),
        S3=steering_violation(cc, 3),
        chsh_max=2.0 * s2,
        sigma_lower=lower,
        sigma_upper=upper,
    )


def hierarchy_holds(report: SteeringReport, sigma: float, tolerance: float = 1e-9) -> bool:
    """Bell nonlocality => three-setting steering => Sigma >= 1/4."""
    if report.s2 > 1.0 and not report.s3 > 1.0:
        return False
    if report.s3 >= 1.0 and sigma < NONCLASSICAL_NECESSARY - tolerance:
        return False
    return True


def extremal_states(sn: float, n: int) -> Tuple[Optional[CanonicalCorrelation], CanonicalCorrelation]:
    """Canonical triples whose Sigma sits on the lower and upper bound for the given s_n."""
    sigma_bounds(sn, n)
    sn = min(max(sn, 0.0), math.sqrt(n))

    # Isotropic triples saturate the upper bound for both n.
    x = sn / math.sqrt(n)
    upper = CanonicalCorrelation(x, x, x)

    if sn < 1.0:
        lower = CanonicalCorrelation(sn, 0.0, 0.0)
    elif sn <= math.sqrt(2):
        lower = CanonicalCorrelation(1.0, math.sqrt(max(0.0, sn * sn - 1.0)), 0.0)
    else:
        lower = None
    return lower, upper


def bound_violation(cc: CanonicalCorrelation, sigma: float = None, n: int = 3) -> float:
    """How far Sigma strays outside [lower, upper] for s_n; 0 when contained."""
    sigma = average_correlation(cc).sigma if sigma is None else sigma
    lower, upper = sigma_bounds(degree_of_steerability(cc, n), n)
    return max(0.0, lower - sigma, sigma - upper)
