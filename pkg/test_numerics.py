# test_numerics.py
import math

import numpy as np
import pytest
from scipy import special, stats

from services.errors import DomainError, NoSignChange, NonConvergent, NotHermitian
from services.models import Interval
from services.numerics import SQRT3, bisect, e_integral, hermitian_eigen4, integrate, sigma_kernel, svd3


def test_integrate_smooth_function():
    """sin over [0, pi] integrates to 2"""
    result = integrate(math.sin, Interval(0.0, math.pi))
    assert result.value == pytest.approx(2.0, abs=1e-10)
    assert result.abs_error_estimate <= 1e-10
    assert result.evaluations > 0


def test_integrate_divergent_function_fails():
    """A non-integrable singularity exhausts the panel budget"""
    with pytest.raises(NonConvergent):
        integrate(lambda x: 1.0 / x, Interval(0.0, 1.0), limit=50)


def test_integrate_rejects_non_positive_tolerance():
    with pytest.raises(DomainError):
        integrate(math.sin, Interval(0.0, 1.0), rel_tol=0.0)


def test_empty_interval_is_rejected():
    with pytest.raises(DomainError):
        Interval(1.0, 1.0)


def test_sigma_kernel_endpoints():
    assert sigma_kernel(0.0) == 0.0
    assert sigma_kernel(1.0) == 1.0


def test_sigma_kernel_matches_printed_form():
    """g(f) = f / sqrt(1 - f) * asinh(sqrt((1 - f) / f)) away from the endpoints"""
    for f in (0.01, 0.25, 0.5, 0.9, 0.999):
        printed = f / math.sqrt(1 - f) * math.asinh(math.sqrt((1 - f) / f))
        assert sigma_kernel(f) == pytest.approx(printed, rel=1e-12)


def test_sigma_kernel_vectorized():
    values = np.array([0.0, 0.25, 1.0])
    out = sigma_kernel(values)
    assert out[0] == 0.0 and out[2] == 1.0
    assert out[1] == pytest.approx(sigma_kernel(0.25), rel=1e-14)


def test_sigma_kernel_domain():
    with pytest.raises(DomainError):
        sigma_kernel(1.5)
    with pytest.raises(DomainError):
        sigma_kernel(np.array([0.2, -0.1]))


def test_e_integral_against_elliptic_oracle():
    """E(s) equals scipy's complete elliptic integral with parameter 2 - s^2"""
    assert e_integral(1.0) == pytest.approx(1.0, abs=1e-12)
    for s in np.linspace(1.0, SQRT3, 7):
        assert e_integral(float(s)) == pytest.approx(special.ellipe(2.0 - s * s), abs=1e-10)
    assert e_integral(SQRT3) / 4 == pytest.approx(0.47753, abs=1e-5)


def test_e_integral_domain():
    with pytest.raises(DomainError):
        e_integral(0.5)
    with pytest.raises(DomainError):
        e_integral(2.0)


def test_svd3_descending():
    assert svd3(np.diag([-1.0, 0.5, -2.0])) == pytest.approx((2.0, 1.0, 0.5))


def test_hermitian_eigen4():
    eigenvalues = hermitian_eigen4(np.diag([0.4, 0.1, 0.3, 0.2]))
    assert eigenvalues == pytest.approx((0.1, 0.2, 0.3, 0.4))

    skew = np.zeros((4, 4), dtype=complex)
    skew[0, 1] = 1.0
    with pytest.raises(NotHermitian):
        hermitian_eigen4(skew)


def test_bisect_finds_root():
    root = bisect(lambda x: x * x - 2.0, Interval(0.0, 2.0))
    assert root == pytest.approx(math.sqrt(2), abs=1e-11)


def test_bisect_without_sign_change():
    with pytest.raises(NoSignChange):
        bisect(lambda x: x * x - 2.0, Interval(2.0, 3.0))


@pytest.mark.parametrize("degree", range(0, 11))
def test_integrate_is_exact_on_monomials(degree):
    result = integrate(lambda x: x ** degree, Interval(0.0, 1.0))
    assert result.value == pytest.approx(1.0 / (degree + 1), abs=1e-13)


def test_integrate_polynomial_on_shifted_interval():
    """3x^2 - 2x + 1 on [-1, 2] integrates to 9"""
    result = integrate(lambda x: 3 * x * x - 2 * x + 1, Interval(-1.0, 2.0))
    assert result.value == pytest.approx(9.0, abs=1e-12)


def test_sigma_kernel_increasing_on_grid():
    values = sigma_kernel(np.linspace(0.0, 1.0, 10_001))
    assert np.all(np.diff(values) > 0.0)
    assert np.all((values >= 0.0) & (values <= 1.0))


def test_e_integral_strictly_increasing():
    values = [e_integral(float(s)) for s in np.linspace(1.0, SQRT3, 1000)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_svd3_invariant_under_rotations():
    """Singular values survive O1 M O2^T for orthogonal O1, O2"""
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = rng.standard_normal((3, 3))
        o1 = stats.ortho_group.rvs(3, random_state=rng)
        o2 = stats.ortho_group.rvs(3, random_state=rng)
        assert svd3(o1 @ m @ o2.T) == pytest.approx(svd3(m), abs=1e-12)


def test_hermitian_eigen4_sums_to_trace():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = (a + a.conj().T) / 2
        eigenvalues = hermitian_eigen4(h)
        assert list(eigenvalues) == sorted(eigenvalues)
        assert sum(eigenvalues) == pytest.approx(float(np.trace(h).real), abs=1e-12)
