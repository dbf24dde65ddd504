# test_qstate.py
import json

import numpy as np
import pytest
from scipy.stats import unitary_group

from services.errors import NotDensityMatrix, StateParseError
from services.models import BlochForm, SamplerSpec
from services.numerics import hermitian_eigen4
from services.qstate import (
    bloch_compose, bloch_decompose, canonical_correlation, from_matrix, load_state_file, local_unitary, purity,
)
from services.sampling import sample

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def _singlet_matrix():
    return np.outer(SINGLET, SINGLET.conj())


def test_shape_check():
    with pytest.raises(NotDensityMatrix) as info:
        from_matrix(np.eye(3) / 3)
    assert info.value.check == 'shape'


def test_trace_check_reports_magnitude():
    with pytest.raises(NotDensityMatrix) as info:
        from_matrix(np.eye(4) / 2)
    assert info.value.check == 'trace'
    assert info.value.magnitude == pytest.approx(1.0)


def test_hermiticity_check():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.1
    with pytest.raises(NotDensityMatrix) as info:
        from_matrix(m)
    assert info.value.check == 'hermiticity'


def test_positivity_only_raises_on_request():
    """A Bell-diagonal triple outside the tetrahedron is flagged, or rejected when positivity is required"""
    b = BlochForm.bell_diagonal((0.8, 1.0, 1.0))
    rho = bloch_compose(b)
    assert not rho.physical
    assert hermitian_eigen4(rho.entries)[0] == pytest.approx(-0.45, abs=1e-12)

    with pytest.raises(NotDensityMatrix) as info:
        from_matrix(rho.entries, require_physical=True)
    assert info.value.check == 'positivity'


def test_singlet_decomposition():
    b = bloch_decompose(from_matrix(_singlet_matrix()))
    assert np.allclose(b.r, 0.0, atol=1e-14)
    assert np.allclose(b.s, 0.0, atol=1e-14)
    assert np.allclose(b.T, -np.eye(3), atol=1e-14)
    assert canonical_correlation(b).as_tuple() == pytest.approx((1.0, 1.0, 1.0))


def test_compose_inverts_decompose():
    rho = sample(SamplerSpec.from_name('ginibre4', 3), 0)
    rebuilt = bloch_compose(bloch_decompose(rho))
    assert np.allclose(rebuilt.entries, rho.entries, atol=1e-12)
    assert rebuilt.physical


def test_canonical_values_are_local_unitary_invariant():
    rho = sample(SamplerSpec.from_name('ginibre2', 11), 5)
    u = unitary_group.rvs(2, random_state=1)
    v = unitary_group.rvs(2, random_state=2)
    rotated = local_unitary(rho, u, v)
    before = canonical_correlation(bloch_decompose(rho)).as_tuple()
    after = canonical_correlation(bloch_decompose(rotated)).as_tuple()
    assert after == pytest.approx(before, abs=1e-12)
    assert purity(rotated) == pytest.approx(purity(rho), abs=1e-12)


def test_entries_are_read_only():
    rho = from_matrix(np.eye(4) / 4)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1.0


def test_load_matrix_file(tmp_path):
    m = _singlet_matrix()
    path = tmp_path / "singlet.json"
    path.write_text(json.dumps({'matrix': [[[z.real, z.imag] for z in row] for row in m]}))
    rho = load_state_file(path, require_physical=True)
    assert np.allclose(rho.entries, m)


def test_load_bloch_file(tmp_path):
    path = tmp_path / "werner.json"
    path.write_text(json.dumps({'bloch': {'r': [0, 0, 0], 's': [0, 0, 0], 'T': [[-0.5, 0, 0], [0, -0.5, 0], [0, 0, -0.5]]}}))
    rho = load_state_file(path)
    assert rho.physical
    assert np.allclose(bloch_decompose(rho).T, -0.5 * np.eye(3))


def test_load_rejects_bad_files(tmp_path):
    both = tmp_path / "both.json"
    both.write_text(json.dumps({'matrix': [], 'bloch': {}}))
    with pytest.raises(StateParseError):
        load_state_file(both)

    wrong_shape = tmp_path / "shape.json"
    wrong_shape.write_text(json.dumps({'matrix': [[[1, 0]]]}))
    with pytest.raises(StateParseError):
        load_state_file(wrong_shape)

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    with pytest.raises(StateParseError):
        load_state_file(garbage)

    with pytest.raises(StateParseError):
        load_state_file(tmp_path / "missing.json")


def test_load_unphysical_bloch_with_required_positivity(tmp_path):
    path = tmp_path / "unphysical.json"
    path.write_text(json.dumps({'bloch': {'r': [0, 0, 0], 's': [0, 0, 0], 'T': [[0.8, 0, 0], [0, 1, 0], [0, 0, 1]]}}))
    assert not load_state_file(path).physical
    with pytest.raises(NotDensityMatrix):
        load_state_file(path, require_physical=True)


def test_compose_inverts_decompose_on_samples():
    spec = SamplerSpec.from_name('ginibre4', 21)
    for index in range(1000):
        rho = sample(spec, index)
        rebuilt = bloch_compose(bloch_decompose(rho))
        assert np.allclose(rebuilt.entries, rho.entries, atol=1e-12)


@pytest.mark.parametrize("sampler", ['ginibre4', 'ginibre2', 'pure', 'belldiag'])
def test_correlation_matrix_of_physical_states_is_bounded(sampler):
    """alpha <= 1 and alpha^2 + beta^2 + gamma^2 <= 3 for every physical state"""
    spec = SamplerSpec.from_name(sampler, 5)
    for index in range(250):
        cc = canonical_correlation(bloch_decompose(sample(spec, index)))
        assert cc.alpha <= 1.0 + 1e-12
        assert cc.alpha ** 2 + cc.beta ** 2 + cc.gamma ** 2 <= 3.0 + 1e-12
