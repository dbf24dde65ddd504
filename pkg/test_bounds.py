# test_bounds.py
import math

import pytest

from services.bounds import boundary_curve, evaluate_bounds_chunk, summarize_chunks


def _chunk(sampler='ginibre4', seed=7, start=0, stop=20):
    return {
        'sampler': sampler,
        'seed': seed,
        'start': start,
        'stop': stop,
        'failure_threshold': 1e-7,
        'hierarchy_tolerance': 1e-9,
    }


def test_chunk_rows_are_contained():
    result = evaluate_bounds_chunk.apply(args=[_chunk()]).get()
    assert result['status'] == 'completed'
    assert len(result['rows']) == 20
    assert result['violations'] == 0
    assert result['hierarchy_failures'] == 0
    assert result['max_violation'] <= 1e-9
    for s3, sigma, lower, upper, physical in result['rows']:
        assert 0.0 <= s3 <= math.sqrt(3) + 1e-12
        assert lower - 1e-9 <= sigma <= upper + 1e-9
        assert physical is True


def test_chunks_are_independent_of_boundaries():
    whole = evaluate_bounds_chunk.apply(args=[_chunk(start=0, stop=10)]).get()
    tail = evaluate_bounds_chunk.apply(args=[_chunk(start=5, stop=10)]).get()
    assert tail['rows'] == whole['rows'][5:]


def test_pure_states_have_unit_alpha():
    result = evaluate_bounds_chunk.apply(args=[_chunk(sampler='pure', stop=30)]).get()
    assert result['max_alpha_gap'] <= 1e-9


def test_summary_merges_in_index_order():
    first = evaluate_bounds_chunk.apply(args=[_chunk(start=0, stop=4)]).get()
    second = evaluate_bounds_chunk.apply(args=[_chunk(start=4, stop=8)]).get()
    summary = summarize_chunks([second, first], failure_threshold=1e-7)
    assert summary['rows'] == first['rows'] + second['rows']
    assert summary['samples'] == 8
    assert summary['passed'] is True


def test_summary_flags_violations():
    bad = {
        'start': 0, 'stop': 1, 'rows': [[1.2, 0.2, 0.26, 0.35, True]], 'max_violation': 0.06, 'violations': 1,
        'max_alpha_gap': 0.1, 'hierarchy_failures': 1, 'errors': [],
    }
    summary = summarize_chunks([bad], failure_threshold=1e-7)
    assert summary['passed'] is False
    assert summary['violations'] == 1
    assert summary['hierarchy_failures'] == 1


def test_summary_flags_errors():
    broken = {
        'start': 0, 'stop': 1, 'rows': [], 'max_violation': 0.0, 'violations': 0,
        'max_alpha_gap': 0.0, 'hierarchy_failures': 0, 'errors': [{'index': 0, 'error': 'boom'}],
    }
    assert summarize_chunks([broken], failure_threshold=1e-7)['passed'] is False


def test_boundary_curve_endpoints():
    curve = boundary_curve(11)
    assert len(curve) == 11
    assert curve[0] == (0.0, 0.0, 0.0)
    s, lower, upper = curve[-1]
    assert s == pytest.approx(math.sqrt(3))
    assert lower == pytest.approx(0.47753, abs=1e-5)
    assert upper == pytest.approx(0.5, abs=1e-12)
    lowers = [point[1] for point in curve]
    assert lowers == sorted(lowers)
    with pytest.raises(ValueError):
        boundary_curve(1)


def test_two_setting_boundary_curve():
    curve = boundary_curve(21, n=2)
    s, lower, upper = curve[-1]
    assert s == pytest.approx(math.sqrt(2))
    assert lower == pytest.approx(math.pi / 8, abs=1e-10)
    assert upper == pytest.approx(0.5, abs=1e-12)
    assert all(lo <= up + 1e-15 for _, lo, up in curve)
