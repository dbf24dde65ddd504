"""
Numerical kernel shared by the correlation services.

Quadrature and root finding delegate to scipy (QUADPACK's adaptive
Gauss-Kronrod and scipy's bisection); the small dense eigen/singular value
problems go through numpy.linalg.
"""
import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize as sp_optimize

from .config import NUMERIC_CONFIG
from .errors import DomainError, NoSignChange, NonConvergent, NotHermitian
from .models import Interval, QuadratureResult

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)


def integrate(
    f: Callable[[float], float],
    iv: Interval,
    rel_tol: float = None,
    abs_tol: float = None,
    limit: int = None,
) -> QuadratureResult:
    """
    Adaptive panel-subdivision quadrature of f over iv.

    Raises NonConvergent when the panel limit is reached before the error
    estimate drops below max(abs_tol, rel_tol * |value|).
    """
    rel_tol = NUMERIC_CONFIG['QUAD_REL_TOL'] if rel_tol is None else rel_tol
    abs_tol = NUMERIC_CONFIG['QUAD_ABS_TOL'] if abs_tol is None else abs_tol
    limit = NUMERIC_CONFIG['QUAD_PANEL_LIMIT'] if limit is None else limit
    if rel_tol <= 0 or abs_tol <= 0:
        raise DomainError(f"tolerances must be positive, got rel_tol={rel_tol}, abs_tol={abs_tol}")

    # A fourth element in the output is QUADPACK's failure message.
    out = sp_integrate.quad(f, iv.lo, iv.hi, epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1)
    value, error, info = out[0], out[1], out[2]
    if len(out) > 3:
        raise NonConvergent(f"quadrature on [{iv.lo}, {iv.hi}] failed: {out[3]}")
    if not (math.isfinite(value) and math.isfinite(error)):
        raise NonConvergent(f"quadrature on [{iv.lo}, {iv.hi}] produced a non-finite result")
    if error > max(abs_tol, rel_tol * abs(value)):
        raise NonConvergent(f"error estimate {error:.3e} above tolerance on [{iv.lo}, {iv.hi}]")
    return QuadratureResult(value=float(value), abs_error_estimate=float(error), evaluations=int(info['neval']))


def _kernel_scalar(f: float) -> float:
    if f <= 0.0:
        return 0.0
    if f >= 1.0:
        return 1.0
    y = math.sqrt((1.0 - f) / f)
    return math.sqrt(f) * math.asinh(y) / y


def sigma_kernel(fval):
    """
    g(f) = f / sqrt(1 - f) * asinh(sqrt((1 - f) / f)), with g(0) = 0 and g(1) = 1.

    Evaluated as sqrt(f) * asinh(y) / y, y = sqrt((1 - f) / f), which stays
    finite at both ends. Accepts scalars and numpy arrays.
    """
    tol = NUMERIC_CONFIG['DOMAIN_TOL']
    if np.isscalar(fval):
        f = float(fval)
        if not -tol <= f <= 1.0 + tol:
            raise DomainError(f"sigma kernel argument {f} outside [0, 1]")
        return _kernel_scalar(f)

    f = np.asarray(fval, dtype=float)
    if np.any(f < -tol) or np.any(f > 1.0 + tol):
        raise DomainError("sigma kernel argument outside [0, 1]")
    f = np.clip(f, 0.0, 1.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        y = np.sqrt((1.0 - f) / f)
        g = np.sqrt(f) * np.arcsinh(y) / y
    return np.where(f == 0.0, 0.0, np.where(f == 1.0, 1.0, g))


def e_integral(s: float) -> float:
    """E(s) = int_0^{pi/2} sqrt(1 - (2 - s^2) sin^2 phi) dphi on 1 <= s <= sqrt(3)."""
    tol = NUMERIC_CONFIG['DOMAIN_TOL']
    if not 1.0 - tol <= s <= SQRT3 + tol:
        raise DomainError(f"E(s) is only used on [1, sqrt(3)], got {s}")
    m = 2.0 - s * s

    def integrand(phi: float) -> float:
        return math.sqrt(max(0.0, 1.0 - m * math.sin(phi) ** 2))

    return integrate(integrand, Interval(0.0, math.pi / 2)).value


def svd3(M) -> Tuple[float, float, float]:
    """Singular values of a 3x3 real matrix, descending."""
    matrix = np.asarray(M, dtype=float).reshape(3, 3)
    if not np.all(np.isfinite(matrix)):
        raise DomainError("svd3 needs finite entries")
    values = np.linalg.svd(matrix, compute_uv=False)
    return tuple(float(v) for v in values)


def hermitian_eigen4(H) -> Tuple[float, float, float, float]:
    """Ascending eigenvalues of a 4x4 Hermitian matrix."""
    matrix = np.asarray(H, dtype=complex)
    if matrix.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {matrix.shape}")
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    if deviation > NUMERIC_CONFIG['HERMITIAN_TOL']:
        raise NotHermitian(f"matrix deviates from its adjoint by {deviation:.3e}")
    return tuple(float(v) for v in np.linalg.eigvalsh(matrix))


def bisect(f: Callable[[float], float], iv: Interval, tol: float = None) -> float:
    """Root of f inside iv, bracketed to an interval of width <= tol."""
    tol = NUMERIC_CONFIG['BISECT_TOL'] if tol is None else tol
    f_lo, f_hi = f(iv.lo), f(iv.hi)
    if f_lo == 0.0:
        return iv.lo
    if f_hi == 0.0:
        return iv.hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(f"f({iv.lo})={f_lo:.3e} and f({iv.hi})={f_hi:.3e} share a sign")
    return float(sp_optimize.bisect(f, iv.lo, iv.hi, xtol=tol, maxiter=500))
