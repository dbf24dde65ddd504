# test_properties.py
"""Property-based checks of Sigma, the steering bounds and the channel maps."""
import numpy as np
import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as s
from scipy.stats import special_ortho_group, unitary_group

from services.avgcorr import average_correlation
from services.channels import damping_probability, evolve_coeffs
from services.models import BlochForm, CanonicalCorrelation, ChannelKind, ChannelSpec, MeasurementSettings, SamplerSpec
from services.qstate import bloch_decompose, canonical_correlation, local_unitary
from services.sampling import bell_diagonal_eigenvalues, sample
from services.steering import bound_violation, degree_of_steerability, steering_functional

coefficient = s.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_subnormal=False)
unit_interval = s.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_subnormal=False)
seeds = s.integers(min_value=0, max_value=2 ** 31 - 1)


@settings(max_examples=50, deadline=None)
@given(c1=coefficient, c2=coefficient, c3=coefficient)
def test_bell_diagonal_states_respect_bounds(c1, c2, c3):
    """Every Bell-diagonal state inside the tetrahedron keeps Sigma between its bounds"""
    assume(min(bell_diagonal_eigenvalues((c1, c2, c3))) >= 0.0)
    cc = CanonicalCorrelation.from_values((c1, c2, c3))
    sigma = average_correlation(cc).sigma
    assert bound_violation(cc, sigma, 3) <= 1e-9
    assert bound_violation(cc, sigma, 2) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(values=s.tuples(unit_interval, unit_interval, unit_interval), scale=s.floats(min_value=0.01, max_value=1.0))
def test_sigma_is_homogeneous(values, scale):
    cc = CanonicalCorrelation.from_values(values)
    scaled = CanonicalCorrelation.from_values(tuple(scale * v for v in values))
    assert average_correlation(scaled).sigma == pytest.approx(scale * average_correlation(cc).sigma, rel=1e-9, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(values=s.tuples(unit_interval, unit_interval, unit_interval))
def test_sigma_grows_with_weakest_correlation(values):
    cc = CanonicalCorrelation.from_values(values)
    raised = CanonicalCorrelation(cc.alpha, cc.beta, cc.beta)
    assert average_correlation(cc).sigma <= average_correlation(raised).sigma + 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=seeds, index=s.integers(min_value=0, max_value=1000))
def test_canonical_values_survive_local_rotations(seed, index):
    rho = sample(SamplerSpec.from_name('ginibre4', seed), index)
    u = unitary_group.rvs(2, random_state=seed)
    v = unitary_group.rvs(2, random_state=seed + 1)
    before = canonical_correlation(bloch_decompose(rho)).as_tuple()
    after = canonical_correlation(bloch_decompose(local_unitary(rho, u, v))).as_tuple()
    assert after == pytest.approx(before, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(values=s.tuples(coefficient, coefficient, coefficient), seed=seeds, n=s.sampled_from([2, 3]))
def test_steering_functional_bounded_by_closed_form(values, seed, n):
    form = BlochForm.bell_diagonal(values)
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    frame = special_ortho_group.rvs(3, random_state=seed)
    measurement = MeasurementSettings(a=tuple(a), b=tuple(frame[:n]))
    sn = degree_of_steerability(CanonicalCorrelation.from_values(values), n)
    assert steering_functional(form, measurement) <= sn + 1e-9


@settings(max_examples=50, deadline=None)
@given(t=s.floats(min_value=0.0, max_value=20.0), ratio=s.floats(min_value=0.6, max_value=500.0))
def test_gad_probability_stays_in_unit_interval(t, ratio):
    spec = ChannelSpec.from_ratio(ChannelKind.GENERALIZED_AMPLITUDE_DAMPING, 1.0, ratio)
    assert 0.0 <= damping_probability(spec, t) <= 1.0


@settings(max_examples=50, deadline=None)
@given(values=s.tuples(coefficient, coefficient, coefficient), p=unit_interval,
       kind=s.sampled_from([ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP, ChannelKind.PHASE_FLIP]))
def test_unital_noise_never_increases_correlations(values, p, kind):
    before = CanonicalCorrelation.from_values(values)
    after = CanonicalCorrelation.from_values(evolve_coeffs(values, ChannelSpec(kind, 1.0), p))
    for v0, v1 in zip(before.as_tuple(), after.as_tuple()):
        assert v1 <= v0 + 1e-15
