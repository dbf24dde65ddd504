import logging
import math
from typing import Dict, List

import numpy as np
from celery import Celery

from .avgcorr import average_correlation
from .config import CELERY_CONFIG
from .errors import CorrelationError
from .models import SamplerSpec
from .qstate import bloch_decompose, canonical_correlation
from .sampling import sample
from .steering import bound_violation, hierarchy_holds, sigma_bounds, steering_report

logger = logging.getLogger(__name__)

app = Celery('bounds_service')
app.config_from_object(CELERY_CONFIG)


@app.task(name='evaluate_bounds_chunk')
def evaluate_bounds_chunk(chunk: dict) -> dict:
    """Sample states [start, stop) and check Sigma against both pairs of bounds"""
    spec = SamplerSpec.from_name(chunk['sampler'], int(chunk['seed']))
    tolerance = float(chunk.get('hierarchy_tolerance', 1e-9))
    failure_threshold = float(chunk.get('failure_threshold', 1e-6))

    rows: List[list] = []
    max_violation = 0.0
    violations = 0
    max_alpha_gap = 0.0
    hierarchy_failures = 0
    errors = []

    for index in range(int(chunk['start']), int(chunk['stop'])):
        try:
            rho = sample(spec, index)
            cc = canonical_correlation(bloch_decompose(rho))
            sigma = average_correlation(cc).sigma
            report = steering_report(cc)
            violation = max(bound_violation(cc, sigma, 3), bound_violation(cc, sigma, 2))
        except CorrelationError as e:
            logger.error("sample %d failed: %s", index, e)
            errors.append({'index': index, 'error': str(e)})
            continue

        max_violation = max(max_violation, violation)
        if violation > failure_threshold:
            violations += 1
        max_alpha_gap = max(max_alpha_gap, abs(cc.alpha - 1.0))
        if not hierarchy_holds(report, sigma, tolerance):
            hierarchy_failures += 1
        rows.append([report.s3, sigma, report.sigma_lower, report.sigma_upper, rho.physical])

    return {
        'start': chunk['start'],
        'stop': chunk['stop'],
        'rows': rows,
        'max_violation': max_violation,
        'violations': violations,
        'max_alpha_gap': max_alpha_gap,
        'hierarchy_failures': hierarchy_failures,
        'errors': errors,
        'status': 'failed' if errors else 'completed',
    }


def summarize_chunks(results: List[dict], failure_threshold: float) -> Dict:
    """Merge chunk results in index order."""
    results = sorted(results, key=lambda r: r['start'])
    rows = [row for r in results for row in r['rows']]
    max_violation = max((r['max_violation'] for r in results), default=0.0)
    errors = [e for r in results for e in r['errors']]
    return {
        'rows': rows,
        'samples': len(rows),
        'max_violation': max_violation,
        'violations': sum(r['violations'] for r in results),
        'max_alpha_gap': max((r['max_alpha_gap'] for r in results), default=0.0),
        'hierarchy_failures': sum(r['hierarchy_failures'] for r in results),
        'errors': errors,
        'passed': max_violation <= failure_threshold and not errors,
    }


def boundary_curve(points: int = 201, n: int = 3) -> List[tuple]:
    """(s, lower, upper) over s in [0, sqrt(n)] for the n-setting bounds."""
    if points < 2:
        raise ValueError(f"a boundary curve needs at least 2 points, got {points}")
    return [(float(s), *sigma_bounds(float(s), n)) for s in np.linspace(0.0, math.sqrt(n), points)]
