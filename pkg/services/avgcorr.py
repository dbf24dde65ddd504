"""
Average correlation Sigma: the mean of |a^T T b| over independent, uniformly
distributed measurement directions a and b.
"""
import logging
import math

import numpy as np
from scipy import special

from .config import NUMERIC_CONFIG, SAMPLING_CONFIG
from .errors import DomainError
from .models import BlochForm, CanonicalCorrelation, Interval, SigmaMethod, SigmaResult
from .numerics import SQRT3, integrate, sigma_kernel

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2
MC_BLOCK = 1 << 17


def _closed(sigma: float) -> SigmaResult:
    return SigmaResult(sigma=sigma, method=SigmaMethod.CLOSED_FORM, error_estimate=NUMERIC_CONFIG['CLOSED_FORM_ERROR'])


def _isotropic(alpha: float, f: float) -> float:
    return alpha / 4 * (1 + sigma_kernel(f))


def _ratio_function(cc: CanonicalCorrelation):
    b2 = (cc.beta / cc.alpha) ** 2
    c2 = (cc.gamma / cc.alpha) ** 2

    def f(phi: float) -> float:
        return min(1.0, b2 * math.sin(phi) ** 2 + c2 * math.cos(phi) ** 2)

    return f


def average_correlation(cc: CanonicalCorrelation, force_quadrature: bool = False) -> SigmaResult:
    """
    Sigma = (alpha/4) [1 + (1/2pi) int_0^{2pi} g(f(phi)) dphi],
    f(phi) = (beta/alpha)^2 sin^2 phi + (gamma/alpha)^2 cos^2 phi.

    The integrand has period pi and is even, so the quadrature runs over
    [0, pi/2] only. With beta = gamma, f is constant and the closed form is
    used unless force_quadrature is set.
    """
    if cc.alpha <= 0.0:
        return _closed(0.0)
    isotropic = abs(cc.beta - cc.gamma) <= NUMERIC_CONFIG['ISOTROPIC_DISPATCH_TOL'] * cc.alpha
    if isotropic and not force_quadrature:
        return _closed(_isotropic(cc.alpha, (cc.beta / cc.alpha) ** 2))

    f = _ratio_function(cc)
    result = integrate(lambda phi: sigma_kernel(f(phi)), Interval(0.0, HALF_PI))
    scale = cc.alpha / 4 / HALF_PI
    return SigmaResult(
        sigma=cc.alpha / 4 + scale * result.value,
        method=SigmaMethod.SINGLE_INTEGRAL,
        error_estimate=scale * result.abs_error_estimate,
    )


def average_correlation_double(cc: CanonicalCorrelation) -> SigmaResult:
    """Sigma = (alpha/8pi) int_0^{2pi} dphi int_0^pi dtheta sin(theta) sqrt(f(phi) sin^2 theta + cos^2 theta)."""
    if not cc.alpha > 0.0:
        raise DomainError("the double-integral form needs alpha > 0")
    f = _ratio_function(cc)
    inner_errors = []

    def inner(phi: float) -> float:
        fphi = f(phi)
        result = integrate(
            lambda theta: math.sin(theta) * math.sqrt(fphi * math.sin(theta) ** 2 + math.cos(theta) ** 2),
            Interval(0.0, math.pi),
        )
        inner_errors.append(result.abs_error_estimate)
        return result.value

    outer = integrate(inner, Interval(0.0, HALF_PI))
    # Four quarter periods of phi.
    scale = cc.alpha / (8 * math.pi) * 4
    error = scale * (outer.abs_error_estimate + HALF_PI * max(inner_errors))
    return SigmaResult(sigma=scale * outer.value, method=SigmaMethod.DOUBLE_INTEGRAL, error_estimate=error)


def sigma_isotropic(s3: float, f: float = 1.0) -> float:
    """
    Sigma for states with beta = gamma, as a function of s3 and the constant
    f = (s3^2 - alpha^2) / (2 alpha^2). At f = 1 this is the upper bound s3 / (2 sqrt 3).
    """
    tol = NUMERIC_CONFIG['DOMAIN_TOL']
    if not -tol <= s3 <= SQRT3 + tol:
        raise DomainError(f"s3 must lie in [0, sqrt(3)], got {s3}")
    if not -tol <= f <= 1 + tol:
        raise DomainError(f"f must lie in [0, 1], got {f}")
    f = min(max(f, 0.0), 1.0)
    if f == 1.0:
        return s3 / (2 * SQRT3)
    alpha = s3 / math.sqrt(2 * f + 1)
    if alpha > 1 + 1e-9:
        raise DomainError(f"s3={s3} with f={f} implies alpha={alpha} > 1")
    return _isotropic(alpha, f)


def sigma_pure(c: float) -> float:
    """Closed form for pure states in Schmidt form, written in terms of s3^2 = 1 + 8c^2(1 - c^2)."""
    if not 0.0 <= c <= 1.0:
        raise DomainError(f"Schmidt coefficient must lie in [0, 1], got {c}")
    s3_sq = 1 + 8 * c * c * (1 - c * c)
    if s3_sq <= 1.0:
        return 0.25
    if s3_sq >= 3.0:
        return 0.5
    prefactor = math.sqrt(2) * (s3_sq - 1) / (2 * math.sqrt(3 - s3_sq))
    return 0.25 * (1 + prefactor * math.asinh(math.sqrt((3 - s3_sq) / (s3_sq - 1))))


def sigma_planar(alpha: float, beta: float) -> float:
    """Sigma for gamma = 0: (alpha/4) E(1 - (beta/alpha)^2) with E the complete elliptic integral of the second kind."""
    if not 0.0 <= beta <= alpha:
        raise DomainError(f"need 0 <= beta <= alpha, got alpha={alpha}, beta={beta}")
    if alpha == 0.0:
        return 0.0
    return alpha / 4 * float(special.ellipe(1.0 - (beta / alpha) ** 2))


def random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Area-uniform unit vectors: inverse CDF on cos(theta), uniform azimuth."""
    cos_theta = 1.0 - 2.0 * rng.random(n)
    phi = 2.0 * math.pi * rng.random(n)
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - cos_theta ** 2))
    return np.column_stack((sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta))


def _block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def monte_carlo_sigma(b: BlochForm, n: int = None, seed: int = 0) -> SigmaResult:
    """Sample mean of |a^T T b| with its standard error; blocks are keyed by (seed, block index)."""
    n = SAMPLING_CONFIG['MONTE_CARLO_DRAWS'] if n is None else n
    if n < 1000:
        raise DomainError(f"Monte Carlo needs at least 1000 draws, got {n}")
    T = np.asarray(b.T, dtype=float)
    total = 0.0
    total_sq = 0.0
    for block, start in enumerate(range(0, n, MC_BLOCK)):
        size = min(MC_BLOCK, n - start)
        rng = _block_generator(seed, block)
        a_dirs = random_directions(rng, size)
        b_dirs = random_directions(rng, size)
        values = np.abs(np.einsum('ni,ij,nj->n', a_dirs, T, b_dirs))
        total += float(values.sum())
        total_sq += float(np.dot(values, values))

    mean = total / n
    variance = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    logger.debug("monte carlo sigma %.6f over %d draws", mean, n)
    return SigmaResult(sigma=mean, method=SigmaMethod.MONTE_CARLO, error_estimate=math.sqrt(variance / n))
