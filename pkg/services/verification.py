"""
Property suite run by `main.py verify`.

Each check is a named function returning a status dict. The Celery task
wraps a single check, and `run_suite` runs all of them in a fixed order.
"""
import json
import logging
import math
from typing import Callable, Dict, List

import numpy as np
from celery import Celery

from .avgcorr import average_correlation, average_correlation_double, monte_carlo_sigma
from .channels import (
    bloch_after_kraus, death_times_analytic, evolve_coeffs, full_damping_time, kraus_apply, kraus_completeness_error,
    kraus_operators, threshold_crossing, trajectory,
)
from .config import CELERY_CONFIG, RULES_FILE
from .errors import CorrelationError, NoSignChange
from .families import build, family_expected, family_grid
from .models import (
    CanonicalCorrelation, ChannelKind, ChannelSpec, CrossingDirection, FamilyKind,
    FamilySpec, Interval, Quantity, SamplerSpec,
)
from .orchestrator import BoundsScanOrchestrator
from .qstate import bloch_decompose, canonical_correlation
from .sampling import sample
from .steering import degree_of_steerability

logger = logging.getLogger(__name__)

app = Celery('verification_service')
app.config_from_object(CELERY_CONFIG)

UNITAL_KINDS = (ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP, ChannelKind.PHASE_FLIP)


def load_rules(path: str = None) -> Dict:
    with open(path or RULES_FILE, 'r', encoding='utf-8') as f:
        return json.load(f)


def _result(passed: bool, detail: str, **metrics) -> Dict:
    return {'passed': bool(passed), 'detail': detail, 'metrics': metrics}


def _analyzed(rho) -> CanonicalCorrelation:
    return canonical_correlation(bloch_decompose(rho))


def check_bound_containment(rules: Dict, samples: int, seed: int) -> Dict:
    summary = BoundsScanOrchestrator(
        sampler='ginibre4',
        seed=seed,
        samples=samples,
        failure_threshold=rules['bound_tolerance'],
    ).run()
    return _result(
        summary['passed'],
        f"{summary['violations']} of {summary['samples']} states outside the bounds",
        max_violation=summary['max_violation'],
        errors=len(summary['errors']),
    )


def check_werner_saturation(rules: Dict, samples: int, seed: int) -> Dict:
    worst_sigma = worst_s3 = 0.0
    for lam in np.linspace(0.1, 1.0, 10):
        spec = FamilySpec(FamilyKind.WERNER, (float(lam),))
        cc = _analyzed(build(spec))
        worst_sigma = max(worst_sigma, abs(average_correlation(cc).sigma - lam / 2))
        worst_s3 = max(worst_s3, abs(degree_of_steerability(cc, 3) - math.sqrt(3) * lam))
    passed = worst_sigma <= rules['werner_sigma_tolerance'] and worst_s3 <= rules['werner_s3_tolerance']
    return _result(passed, "Werner states sit on the upper bound", sigma_gap=worst_sigma, s3_gap=worst_s3)


def check_extremal_anchors(rules: Dict, samples: int, seed: int) -> Dict:
    top = average_correlation(CanonicalCorrelation(1.0, 1.0, 1.0)).sigma
    bottom = average_correlation(CanonicalCorrelation(1.0, 0.0, 0.0)).sigma
    gap = max(abs(top - 0.5), abs(bottom - 0.25))
    return _result(gap <= 1e-10, "Sigma(1,1,1) = 1/2 and Sigma(1,0,0) = 1/4", gap=gap)


def _family_gap(kind: FamilyKind, points: int) -> float:
    worst = 0.0
    for spec in family_grid(kind, points):
        expected = family_expected(spec)
        computed = average_correlation(_analyzed(build(spec))).sigma
        worst = max(worst, abs(computed - expected.sigma_closed))
    return worst


def check_pure_closed_form(rules: Dict, samples: int, seed: int) -> Dict:
    gap = _family_gap(FamilyKind.PURE_SCHMIDT, rules['pure_state_points'])
    return _result(gap <= rules['pure_state_tolerance'], "pure-state closed form against quadrature", gap=gap)


def check_mems_branches(rules: Dict, samples: int, seed: int) -> Dict:
    gap = _family_gap(FamilyKind.MEMS, rules['mems_points'])
    tol = rules['mems_tolerance']
    jumps = []
    for s in (1 / 3, 2 / 3):
        left = family_expected(FamilySpec(FamilyKind.MEMS, (s - 1e-9,))).sigma_closed
        right = family_expected(FamilySpec(FamilyKind.MEMS, (s + 1e-9,))).sigma_closed
        jumps.append(abs(left - right))
    passed = gap <= tol and max(jumps) <= tol
    return _result(passed, "MEMS branches against quadrature and at the branch points", gap=gap, jump=max(jumps))


def check_oracle_equivalence(rules: Dict, samples: int, seed: int) -> Dict:
    spec = SamplerSpec.from_name('ginibre4', seed)
    factor = rules['oracle_sigma_factor']
    worst_z = 0.0
    worst_form_gap = 0.0
    for index in range(rules['oracle_states']):
        b = bloch_decompose(sample(spec, index))
        cc = canonical_correlation(b)
        single = average_correlation(cc).sigma
        mc = monte_carlo_sigma(b, rules['oracle_draws'], seed + index)
        if mc.error_estimate > 0:
            worst_z = max(worst_z, abs(mc.sigma - single) / mc.error_estimate)
        if cc.alpha > 0:
            worst_form_gap = max(worst_form_gap, abs(average_correlation_double(cc).sigma - single))
    passed = worst_z <= factor and worst_form_gap <= rules['form_equivalence_tolerance']
    return _result(passed, "Monte Carlo and double-integral oracles", worst_z=worst_z, form_gap=worst_form_gap)


def check_channel_cross(rules: Dict, samples: int, seed: int) -> Dict:
    tol = rules['channel_tolerance']
    spec_sampler = SamplerSpec.from_name('belldiag', seed)
    probabilities = np.linspace(0.0, 1.0, rules['channel_probabilities'])
    worst = 0.0
    for kind in ChannelKind:
        channel = ChannelSpec.from_ratio(kind, 1.0, 200.0 if kind is ChannelKind.GENERALIZED_AMPLITUDE_DAMPING else None)
        for index in range(rules['channel_states']):
            rho = sample(spec_sampler, index)
            c = np.diag(bloch_decompose(rho).T)
            for p in probabilities:
                p = float(p)
                evolved = bloch_decompose(kraus_apply(rho, channel, p))
                expected = bloch_after_kraus(c, channel, p)
                worst = max(
                    worst,
                    float(np.max(np.abs(evolved.T - np.diag(evolve_coeffs(c, channel, p))))),
                    float(np.max(np.abs(evolved.r - expected.r))),
                    float(np.max(np.abs(evolved.s - expected.s))),
                    kraus_completeness_error(kraus_operators(channel, p)),
                )
    return _result(worst <= tol, "Kraus maps against closed-form coefficient updates", worst=worst)


def check_death_times(rules: Dict, samples: int, seed: int) -> Dict:
    channel = ChannelSpec(ChannelKind.PHASE_FLIP, 1.0)
    worst = 0.0
    worst_sigma = 0.0
    ordered = True
    for c_abs in rules['death_time_abs_values']:
        times = death_times_analytic(c_abs, channel)
        ordered &= times.t_s2 <= times.t_s3 <= times.t_sigma
        c0 = (c_abs, c_abs, c_abs)
        for quantity, analytic in ((Quantity.S2, times.t_s2), (Quantity.S3, times.t_s3), (Quantity.SIGMA, times.t_sigma)):
            if math.isinf(analytic):
                continue
            numeric = threshold_crossing(c0, channel, quantity, CrossingDirection.DECAY, Interval(0.0, 2.0 * analytic), grid=200)
            rel = abs(numeric - analytic) / analytic
            if quantity is Quantity.SIGMA:
                worst_sigma = max(worst_sigma, rel)
            else:
                worst = max(worst, rel)
    passed = ordered and worst <= rules['death_time_rel_tolerance'] and worst_sigma <= rules['sigma_death_time_rel_tolerance']
    return _result(passed, "closed-form death times against trajectory crossings", rel=worst, sigma_rel=worst_sigma, ordered=ordered)


def check_unital_monotonicity(rules: Dict, samples: int, seed: int) -> Dict:
    tol = rules['monotonicity_tolerance']
    spec_sampler = SamplerSpec.from_name('belldiag', seed)
    worst = 0.0
    for index in range(rules['unital_trajectories']):
        c0 = np.diag(bloch_decompose(sample(spec_sampler, index)).T)
        channel = ChannelSpec(UNITAL_KINDS[index % len(UNITAL_KINDS)], 1.0)
        rows = trajectory(c0, channel, 3.0, rules['unital_steps'])
        for before, after in zip(rows[:-1], rows[1:]):
            worst = max(worst, after.sigma - before.sigma, after.s2 - before.s2, after.s3 - before.s3)
    return _result(worst <= tol, "Sigma, s2 and s3 never grow under unital noise", worst_increase=worst)


def check_gad_revival(rules: Dict, samples: int, seed: int) -> Dict:
    channel = ChannelSpec.from_ratio(ChannelKind.GENERALIZED_AMPLITUDE_DAMPING, 1.0, rules['gad_kappa_over_gamma'])
    c0 = rules['gad_initial_coefficients']
    # p(t) climbs to 1 at the first full-damping time, dips, and is back at 1 by the second
    first_damping = full_damping_time(channel, 0)
    second_damping = full_damping_time(channel, 1)
    rows = trajectory(c0, channel, second_damping, rules['gad_steps'])
    sigma = [row.sigma for row in rows]
    first_low = next((i for i, v in enumerate(sigma) if v < 0.25), None)
    revived = first_low is not None and any(b > a for a, b in zip(sigma[first_low:-1], sigma[first_low + 1:]))

    decay, revival = {}, {}
    for quantity in Quantity:
        decay[quantity] = threshold_crossing(
            c0, channel, quantity, CrossingDirection.DECAY, Interval(0.0, first_damping), rules['gad_crossing_grid'],
        )
        try:
            revival[quantity] = threshold_crossing(
                c0, channel, quantity, CrossingDirection.REVIVAL, Interval(first_damping, second_damping), rules['gad_crossing_grid'],
            )
        except NoSignChange:
            logger.info("%s does not revive before t=%.4f", quantity.value, second_damping)
            revival[quantity] = None

    decay_order = decay[Quantity.S2] <= decay[Quantity.S3] <= decay[Quantity.SIGMA]
    missing = [q.value for q, t in revival.items() if t is None]
    revival_order = not missing and revival[Quantity.S2] >= revival[Quantity.S3] >= revival[Quantity.SIGMA]
    detail = "decay and reverse-order revival under generalized amplitude damping"
    if missing:
        detail += f"; no revival of {', '.join(missing)}"
    return _result(
        revived and decay_order and revival_order,
        detail,
        window=(first_damping, second_damping),
        decay={q.value: t for q, t in decay.items()},
        revival={q.value: t for q, t in revival.items()},
    )


def check_hierarchy(rules: Dict, samples: int, seed: int) -> Dict:
    summary = BoundsScanOrchestrator(
        sampler='ginibre4',
        seed=seed + 1,
        samples=samples,
        hierarchy_tolerance=rules['hierarchy_tolerance'],
    ).run()
    passed = summary['hierarchy_failures'] == 0 and not summary['errors']
    return _result(passed, "Bell => steering => Sigma >= 1/4", failures=summary['hierarchy_failures'])


CHECKS: Dict[str, Callable[[Dict, int, int], Dict]] = {
    'bound_containment': check_bound_containment,
    'werner_saturation': check_werner_saturation,
    'extremal_anchors': check_extremal_anchors,
    'pure_closed_form': check_pure_closed_form,
    'mems_branches': check_mems_branches,
    'oracle_equivalence': check_oracle_equivalence,
    'channel_cross_check': check_channel_cross,
    'death_times': check_death_times,
    'unital_monotonicity': check_unital_monotonicity,
    'gad_revival': check_gad_revival,
    'hierarchy': check_hierarchy,
}


@app.task(name='run_property_check')
def run_property_check(payload: dict) -> dict:
    """Run one named property check and report its status"""
    name = payload['check']
    try:
        outcome = CHECKS[name](payload['rules'], int(payload['samples']), int(payload['seed']))
    except CorrelationError as e:
        logger.error("check %s raised %s", name, e)
        outcome = _result(False, f"{type(e).__name__}: {e}")
    outcome['check'] = name
    outcome['status'] = 'passed' if outcome['passed'] else 'failed'
    return outcome


def run_suite(samples: int, seed: int, rules: Dict) -> List[dict]:
    """Run every check in order; callers name the first failure."""
    results = []
    for name in CHECKS:
        payload = {'check': name, 'samples': samples, 'seed': seed, 'rules': rules}
        outcome = run_property_check.apply(args=[payload]).get()
        logger.info("check %s: %s", name, outcome['status'])
        results.append(outcome)
    return results
