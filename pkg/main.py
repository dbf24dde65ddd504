# main.py
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Optional

import click

from process_logger import ProcessLogger
from services.avgcorr import average_correlation, average_correlation_double, monte_carlo_sigma
from services.bounds import boundary_curve
from services.channels import death_times_analytic, grid_crossings, threshold_crossing, trajectory
from services.config import RUN_LOG_CONFIG, SAMPLING_CONFIG
from services.errors import CorrelationError
from services.families import build, family_expected, family_grid, parse_family
from services.models import (
    TRAJECTORY_HEADER, ChannelKind, ChannelSpec, CrossingDirection, FamilyKind, Interval, Quantity,
    SigmaResult,
)
from services.orchestrator import BoundsScanOrchestrator
from services.qstate import bloch_decompose, canonical_correlation, load_state_file
from services.reporting import BOUNDARY_HEADER, BOUNDS_HEADER, SCAN_HEADER, to_jsonable, write_csv
from services.steering import classify, steering_report
from services.verification import load_rules, run_suite

EXIT_VIOLATION = 1
EXIT_USAGE = 2


def _styled(message: str, **style) -> str:
    if os.getenv('NO_COLOR'):
        return message
    return click.style(message, **style)


def _warn(message: str):
    click.echo(_styled(f"warning: {message}", fg='yellow'), err=True)


def _fail(message: str, code: int):
    click.echo(_styled(f"error: {message}", fg='red'), err=True)
    sys.exit(code)


def _run_log(ctx: click.Context, name: str) -> Optional[ProcessLogger]:
    if ctx.obj['no_run_log'] or not RUN_LOG_CONFIG['ENABLED']:
        return None
    return ProcessLogger(run_name=name, base_dir=ctx.obj['log_dir'], parameters=ctx.params)


def _emit_json(payload: dict, out: str):
    with click.open_file(out, 'w', encoding='utf-8') as f:
        f.write(json.dumps(to_jsonable(payload), indent=2) + "\n")


def _parse_coefficients(text: str):
    try:
        values = tuple(float(v) for v in text.split(','))
    except ValueError:
        raise click.BadParameter(f"expected three comma-separated numbers, got '{text}'")
    if len(values) != 3:
        raise click.BadParameter(f"expected three comma-separated numbers, got '{text}'")
    return values


def _load_state(state: str):
    if Path(state).is_file():
        return load_state_file(state)
    return build(parse_family(state))


def _sigma(b, cc, method: str, mc_draws: int, seed: int) -> SigmaResult:
    if method == 'mc':
        return monte_carlo_sigma(b, mc_draws, seed)
    if method == 'double':
        if cc.alpha > 0:
            return average_correlation_double(cc)
        _warn("the double integral needs alpha > 0; reporting the closed form instead")
    return average_correlation(cc, force_quadrature=(method == 'single'))


def _channel(channel: str, gamma: float, kappa_over_gamma: float) -> ChannelSpec:
    kind = ChannelKind(channel)
    return ChannelSpec.from_ratio(kind, gamma, None if kind.unital else kappa_over_gamma)


@click.group()
@click.option('--log-dir', default=RUN_LOG_CONFIG['BASE_DIR'], show_default=True, help="Directory for run logs.")
@click.option('--no-run-log', is_flag=True, help="Do not write run logs.")
@click.option('-v', '--verbose', is_flag=True, help="Debug logging on stderr.")
@click.pass_context
def cli(ctx, log_dir, no_run_log, verbose):
    """Average correlation and linear steering of two-qubit states."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    ctx.obj = {'log_dir': log_dir, 'no_run_log': no_run_log}


@cli.command()
@click.argument('state')
@click.option('--method', type=click.Choice(['auto', 'single', 'double', 'mc']), default='auto', show_default=True)
@click.option('--mc-draws', type=int, default=SAMPLING_CONFIG['MONTE_CARLO_DRAWS'], show_default=True)
@click.option('--seed', type=int, default=SAMPLING_CONFIG['DEFAULT_SEED'], show_default=True)
@click.option('--out', default='-', help="Output file, '-' for stdout.")
def analyze(state, method, mc_draws, seed, out):
    """Report Sigma, steering quantities and bounds for a state file or family spec (e.g. werner:0.6)."""
    try:
        rho = _load_state(state)
        b = bloch_decompose(rho)
        cc = canonical_correlation(b)
        sigma = _sigma(b, cc, method, mc_draws, seed)
        report = steering_report(cc)
    except CorrelationError as e:
        _fail(str(e), EXIT_USAGE)

    if not rho.physical:
        _warn(f"{state} is not a physical density matrix; values describe the formal correlation matrix")

    _emit_json({
        'state': state,
        'r': b.r,
        's': b.s,
        'T': b.T,
        'canonical': {'alpha': cc.alpha, 'beta': cc.beta, 'gamma': cc.gamma},
        'sigma': {'value': sigma.sigma, 'method': sigma.method, 'error': sigma.error_estimate},
        's2': report.s2,
        's3': report.s3,
        'S2': report.S2,
        'S3': report.S3,
        'chsh_max': report.chsh_max,
        'sigma_lower': report.sigma_lower,
        'sigma_upper': report.sigma_upper,
        'classification': classify(sigma.sigma, report.s2, report.s3),
        'physical': rho.physical,
    }, out)


@cli.command()
@click.argument('family', type=click.Choice([FamilyKind.PURE_SCHMIDT.value, FamilyKind.WERNER.value, FamilyKind.MEMS.value]))
@click.option('--points', type=int, default=101, show_default=True)
@click.option('--out', default='-', help="Output CSV, '-' for stdout.")
def scan(family, points, out):
    """Trace a one-parameter family against the bounds."""
    rows = []
    try:
        for spec in family_grid(FamilyKind(family), points):
            rho = build(spec)
            cc = canonical_correlation(bloch_decompose(rho))
            report = steering_report(cc)
            rows.append((
                spec.params[0], cc.alpha, cc.beta, cc.gamma,
                average_correlation(cc).sigma, family_expected(spec).sigma_closed,
                report.s2, report.s3, report.sigma_lower, report.sigma_upper, rho.physical,
            ))
    except CorrelationError as e:
        _fail(str(e), EXIT_USAGE)

    with click.open_file(out, 'w', encoding='utf-8') as f:
        write_csv(f, SCAN_HEADER, rows)


@cli.command()
@click.option('--sampler', type=click.Choice(['ginibre4', 'ginibre3', 'ginibre2', 'ginibre1', 'pure', 'belldiag']),
              default=SAMPLING_CONFIG['DEFAULT_SAMPLER'], show_default=True)
@click.option('--seed', type=int, default=SAMPLING_CONFIG['DEFAULT_SEED'], show_default=True)
@click.option('--samples', type=int, default=SAMPLING_CONFIG['DEFAULT_SAMPLES'], show_default=True)
@click.option('--chunk-size', type=int, default=SAMPLING_CONFIG['CHUNK_SIZE'], show_default=True)
@click.option('--workers', type=int, default=1, show_default=True)
@click.option('--distributed', is_flag=True, help="Send chunks to Celery workers instead of running them here.")
@click.option('--rules', type=click.Path(exists=True, dir_okay=False), default=None)
@click.option('--out', default='-', help="Output CSV, '-' for stdout.")
@click.pass_context
def bounds(ctx, sampler, seed, samples, chunk_size, workers, distributed, rules, out):
    """Check Sigma against its s_n bounds on random states."""
    rule_set = load_rules(rules)
    run_log = _run_log(ctx, 'bounds')
    try:
        orchestrator = BoundsScanOrchestrator(
            sampler=sampler,
            seed=seed,
            samples=samples,
            chunk_size=chunk_size,
            workers=workers,
            failure_threshold=rule_set['bound_failure_threshold'],
            hierarchy_tolerance=rule_set['hierarchy_tolerance'],
            distributed=distributed,
        )
    except CorrelationError as e:
        _fail(str(e), EXIT_USAGE)

    if run_log:
        run_log.log_step("Bounds Scan Started", {'sampler': sampler, 'seed': seed, 'samples': samples, 'chunks': len(orchestrator.chunks())})
    summary = orchestrator.run()

    with click.open_file(out, 'w', encoding='utf-8') as f:
        write_csv(f, BOUNDS_HEADER, summary['rows'])
    if out != '-':
        with open(f"{out}.boundary.csv", 'w', encoding='utf-8') as f:
            write_csv(f, BOUNDARY_HEADER, boundary_curve(n=3))
        with open(f"{out}.boundary2.csv", 'w', encoding='utf-8') as f:
            write_csv(f, BOUNDARY_HEADER, boundary_curve(n=2))

    report = {k: v for k, v in summary.items() if k != 'rows'}
    click.echo(json.dumps(to_jsonable(report), indent=2), err=(out == '-'))
    if run_log:
        run_log.finalize_process('PASSED' if summary['passed'] else 'VIOLATION', report)
    if summary['errors']:
        _fail(f"{len(summary['errors'])} samples could not be evaluated", EXIT_VIOLATION)
    if not summary['passed']:
        _fail(f"{summary['violations']} states violate the bounds (max {summary['max_violation']:.3e})", EXIT_VIOLATION)


@cli.command()
@click.option('--c', 'coefficients', required=True, help="Initial Bell-diagonal coefficients c1,c2,c3.")
@click.option('--channel', type=click.Choice([k.value for k in ChannelKind]), required=True)
@click.option('--gamma', type=float, default=1.0, show_default=True)
@click.option('--kappa-over-gamma', type=float, default=200.0, show_default=True)
@click.option('--tmax', type=float, default=5.0, show_default=True)
@click.option('--steps', type=int, default=500, show_default=True)
@click.option('--workers', type=int, default=1, show_default=True)
@click.option('--out', default='-', help="Output CSV, '-' for stdout.")
@click.pass_context
def evolve(ctx, coefficients, channel, gamma, kappa_over_gamma, tmax, steps, workers, out):
    """Trajectory of Sigma and the steering quantities under local noise."""
    c0 = _parse_coefficients(coefficients)
    run_log = _run_log(ctx, 'evolve')
    try:
        spec = _channel(channel, gamma, kappa_over_gamma)
        rows = trajectory(c0, spec, tmax, steps, workers)
    except CorrelationError as e:
        _fail(str(e), EXIT_USAGE)

    if not rows[0].physical:
        message = f"initial coefficients {coefficients} do not describe a physical Bell-diagonal state"
        _warn(message)
        if run_log:
            run_log.log_warning(message)

    with click.open_file(out, 'w', encoding='utf-8') as f:
        write_csv(f, TRAJECTORY_HEADER, [row.values() for row in rows])

    if run_log:
        crossings = {q.value: grid_crossings(rows, q) for q in Quantity}
        run_log.log_step("Trajectory Computed", {'channel': spec, 'c0': c0, 'tmax': tmax, 'steps': steps})
        run_log.finalize_process('COMPLETED', {'crossings': crossings, 'physical': rows[0].physical})


@cli.command()
@click.option('--c', 'c_abs', type=float, required=True, help="Symmetric initial coefficient |c|.")
@click.option('--gamma', type=float, default=1.0, show_default=True)
@click.option('--channel', type=click.Choice([k.value for k in ChannelKind if k.unital]), default='phaseflip', show_default=True)
@click.pass_context
def deathtimes(ctx, c_abs, gamma, channel):
    """Closed-form sudden-death times checked against numeric crossings."""
    run_log = _run_log(ctx, 'deathtimes')
    try:
        spec = _channel(channel, gamma, None)
        times = death_times_analytic(c_abs, spec)
        c0 = (c_abs, c_abs, c_abs)
        result = {'c': c_abs, 'gamma': gamma, 'channel': channel, 'A': times.A}
        for quantity, key, analytic in (
            (Quantity.S2, 't_s2', times.t_s2),
            (Quantity.S3, 't_s3', times.t_s3),
            (Quantity.SIGMA, 't_sigma', times.t_sigma),
        ):
            result[key] = analytic
            if math.isinf(analytic):
                result[f'{key}_numeric'] = math.inf
                result[f'{key}_rel_diff'] = 0.0
                continue
            numeric = threshold_crossing(c0, spec, quantity, CrossingDirection.DECAY, Interval(0.0, 2.0 * analytic), grid=200)
            result[f'{key}_numeric'] = numeric
            result[f'{key}_rel_diff'] = abs(numeric - analytic) / analytic
    except CorrelationError as e:
        _fail(str(e), EXIT_USAGE)

    click.echo(json.dumps(to_jsonable(result), indent=2))
    if run_log:
        run_log.finalize_process('COMPLETED', result)


@cli.command()
@click.option('--samples', type=int, default=None, help="States for the containment and hierarchy checks.")
@click.option('--seed', type=int, default=SAMPLING_CONFIG['DEFAULT_SEED'], show_default=True)
@click.option('--rules', type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def verify(ctx, samples, seed, rules):
    """Run the full property suite."""
    rule_set = load_rules(rules)
    samples = rule_set['hierarchy_samples'] if samples is None else samples
    if samples < 1:
        raise click.BadParameter(f"samples must be at least 1, got {samples}")
    run_log = _run_log(ctx, 'verify')

    results = run_suite(samples, seed, rule_set)
    for outcome in results:
        mark = _styled('PASS', fg='green') if outcome['passed'] else _styled('FAIL', fg='red')
        click.echo(f"{mark} {outcome['check']}: {outcome['detail']}", err=True)
        if run_log:
            run_log.log_step(outcome['check'], outcome)
    click.echo(json.dumps(to_jsonable(results), indent=2))

    failed = [outcome['check'] for outcome in results if not outcome['passed']]
    if run_log:
        run_log.finalize_process('FAILED' if failed else 'PASSED', {'failed': failed})
    if failed:
        _fail(f"property check failed: {failed[0]}", EXIT_VIOLATION)


if __name__ == "__main__":
    cli()
