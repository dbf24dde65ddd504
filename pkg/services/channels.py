"""
Local decoherence acting identically on both qubits.

Two routes are kept side by side: the Kraus map on the full density matrix,
and the closed-form update of the Bell-diagonal coefficients. Trajectories and
crossing times are built on the closed form.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np

from .avgcorr import average_correlation
from .config import NUMERIC_CONFIG
from .errors import BadSetting, DomainError, NoSignChange, ParamOutOfRange
from .models import (
    BlochForm, CanonicalCorrelation, ChannelKind, ChannelSpec, CrossingDirection, DeathTimes,
    DensityMatrix, Interval, Quantity, TrajectoryRow,
)
from .numerics import bisect
from .qstate import IDENTITY2, PAULI, bloch_compose, from_matrix
from .steering import degree_of_steerability, steering_violation

logger = logging.getLogger(__name__)

PROBABILITY_SLACK = 1e-12
KRAUS_TOL = 1e-12


def damping_probability(spec: ChannelSpec, t: float) -> float:
    """
    unital: p = 1 - exp(-Gamma t)
    GAD:    p = 1 - exp(-Gamma t) [cos(D t / 2) + (Gamma / D) sin(D t / 2)]^2
    """
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    if spec.kind.unital:
        return float(-math.expm1(-spec.gamma_rate * t))

    d = spec.oscillation_frequency
    bracket = math.cos(d * t / 2) + spec.gamma_rate / d * math.sin(d * t / 2)
    p = 1.0 - math.exp(-spec.gamma_rate * t) * bracket ** 2
    if not -PROBABILITY_SLACK <= p <= 1.0 + PROBABILITY_SLACK:
        raise DomainError(f"damping probability {p} at t={t} left [0, 1]")
    return min(max(p, 0.0), 1.0)


def full_damping_time(spec: ChannelSpec, k: int = 0) -> float:
    """k-th time at which the GAD probability reaches 1; every quantity sits on its threshold there."""
    if spec.kind.unital:
        raise BadSetting("unital damping probabilities never reach 1 in finite time")
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    d = spec.oscillation_frequency
    return 2.0 * (math.pi - math.atan(d / spec.gamma_rate) + k * math.pi) / d


def _check_probability(p: float):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping probability must lie in [0, 1], got {p}")


def _check_coefficients(c) -> Tuple[float, float, float]:
    values = tuple(float(v) for v in np.asarray(c, dtype=float).reshape(-1))
    if len(values) != 3 or not all(math.isfinite(v) for v in values):
        raise ParamOutOfRange(f"expected three finite coefficients, got {c}")
    if any(abs(v) > 1.0 + PROBABILITY_SLACK for v in values):
        raise ParamOutOfRange(f"coefficients must lie in [-1, 1], got {values}")
    return values


def kraus_operators(spec: ChannelSpec, p: float) -> List[np.ndarray]:
    _check_probability(p)
    if spec.kind.unital:
        return [
            math.sqrt(1.0 - p / 2) * IDENTITY2,
            math.sqrt(p / 2) * PAULI[spec.kind.flip_axis],
        ]
    return [
        np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=complex),
        np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=complex),
    ]


def kraus_completeness_error(ops: Sequence[np.ndarray]) -> float:
    """max |sum_k E_k^dagger E_k - 1|."""
    total = sum(op.conj().T @ op for op in ops)
    return float(np.max(np.abs(total - IDENTITY2)))


def kraus_apply(rho: DensityMatrix, spec: ChannelSpec, p: float) -> DensityMatrix:
    """sum_ij (E_i x E_j) rho (E_i x E_j)^dagger with the same channel on both qubits."""
    ops = kraus_operators(spec, p)
    error = kraus_completeness_error(ops)
    if error > KRAUS_TOL:
        raise DomainError(f"Kraus operators are incomplete by {error:.3e}")

    out = np.zeros((4, 4), dtype=complex)
    for e_a in ops:
        for e_b in ops:
            w = np.kron(e_a, e_b)
            out += w @ rho.entries @ w.conj().T
    return from_matrix(out, require_physical=False)


def evolve_coeffs(c, spec: ChannelSpec, p: float) -> Tuple[float, float, float]:
    """Closed-form update of Bell-diagonal coefficients."""
    _check_probability(p)
    c1, c2, c3 = _check_coefficients(c)
    if spec.kind.unital:
        axis = spec.kind.flip_axis
        shrink = (1.0 - p) ** 2
        return tuple(v if i == axis else v * shrink for i, v in enumerate((c1, c2, c3)))
    return (c1 * (1.0 - p), c2 * (1.0 - p), c3 * (1.0 - p) ** 2 + p * p)


def bloch_after_kraus(c, spec: ChannelSpec, p: float) -> BlochForm:
    """Full Bloch form of an evolved Bell-diagonal state; GAD also builds local vectors (0, 0, p)."""
    evolved = evolve_coeffs(c, spec, p)
    local = np.zeros(3) if spec.kind.unital else np.array([0.0, 0.0, p])
    return BlochForm(r=local.copy(), s=local.copy(), T=np.diag(evolved))


def analyze_coefficients(c, spec: ChannelSpec, t: float, p: float) -> TrajectoryRow:
    evolved = evolve_coeffs(c, spec, p)
    cc = CanonicalCorrelation.from_values(evolved)
    physical = bloch_compose(bloch_after_kraus(c, spec, p)).physical
    return TrajectoryRow(
        t=t,
        p=p,
        c=evolved,
        canonical=cc,
        sigma=average_correlation(cc).sigma,
        s2=degree_of_steerability(cc, 2),
        s3=degree_of_steerability(cc, 3),
        S2=steering_violation(cc, 2),
        S3=steering_violation(cc, 3),
        physical=physical,
    )


def row_at(c0, spec: ChannelSpec, t: float) -> TrajectoryRow:
    return analyze_coefficients(c0, spec, t, damping_probability(spec, t))


def trajectory(c0, spec: ChannelSpec, t_max: float, steps: int, workers: int = 1) -> List[TrajectoryRow]:
    """Rows on a uniform grid over [0, t_max], both ends included, ordered by t."""
    if steps < 2:
        raise ParamOutOfRange(f"a trajectory needs at least 2 steps, got {steps}")
    if not t_max > 0:
        raise ParamOutOfRange(f"t_max must be positive, got {t_max}")
    if workers < 1:
        raise ParamOutOfRange(f"workers must be at least 1, got {workers}")
    c0 = _check_coefficients(c0)
    times = [float(t) for t in np.linspace(0.0, t_max, steps)]

    if workers == 1:
        rows = [row_at(c0, spec, t) for t in times]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(lambda t: row_at(c0, spec, t), times))

    if not rows[0].physical:
        logger.warning("initial coefficients %s do not describe a physical Bell-diagonal state", c0)
    return rows


def quantity_value(row: TrajectoryRow, quantity: Quantity) -> float:
    if quantity is Quantity.S2:
        return row.s2
    if quantity is Quantity.S3:
        return row.s3
    return row.sigma


def _symmetric_sigma_root(c_abs: float) -> float:
    """
    Root A of asinh(sqrt((1 - A) / A)) = ((1 - |c|) / |c|) sqrt(1 - A) / A,
    solved in the form A asinh(...) - k sqrt(1 - A) = 0, which stays finite at both ends.
    """
    k = (1.0 - c_abs) / c_abs

    def h(a: float) -> float:
        return a * math.asinh(math.sqrt((1.0 - a) / a)) - k * math.sqrt(1.0 - a)

    return bisect(h, Interval(1e-12, 1.0 - 1e-12), NUMERIC_CONFIG['BISECT_TOL'])


def _death_time(ratio: float, gamma_rate: float) -> float:
    # ratio = exp(-4 Gamma t) at the crossing
    if ratio <= 0.0:
        return math.inf
    return -math.log(ratio) / (4.0 * gamma_rate)


def death_times_analytic(c_abs: float, spec: ChannelSpec) -> DeathTimes:
    """Sudden-death times of s2, s3 and Sigma for c1 = c2 = c3 = |c| under a unital channel."""
    if not spec.kind.unital:
        raise BadSetting("closed-form death times exist only for unital channels")
    if not 0.0 < c_abs <= 1.0:
        raise DomainError(f"|c| must lie in (0, 1], got {c_abs}")

    c_sq = c_abs * c_abs
    t_s2 = _death_time((1.0 - c_sq) / c_sq, spec.gamma_rate) if c_abs * math.sqrt(2) > 1.0 else math.inf
    t_s3 = _death_time((1.0 - c_sq) / (2.0 * c_sq), spec.gamma_rate) if c_abs * math.sqrt(3) > 1.0 else math.inf

    # Sigma(0) = |c| / 2 has to start above 1/4.
    if c_abs <= 0.5:
        a_root = None
        t_sigma = math.inf
    elif c_abs >= 1.0:
        a_root = 0.0
        t_sigma = math.inf
    else:
        a_root = _symmetric_sigma_root(c_abs)
        t_sigma = _death_time(a_root, spec.gamma_rate)

    logger.debug("death times for |c|=%s: s2=%s s3=%s sigma=%s", c_abs, t_s2, t_s3, t_sigma)
    return DeathTimes(t_s2=t_s2, t_s3=t_s3, t_sigma=t_sigma, A=a_root)


def _matches(direction: CrossingDirection, before: float, after: float) -> bool:
    if direction is CrossingDirection.DECAY:
        return before > 0.0 and after <= 0.0
    return before < 0.0 and after >= 0.0


def threshold_crossing(
    c0,
    spec: ChannelSpec,
    quantity: Quantity,
    direction: CrossingDirection,
    iv: Interval,
    grid: int = 1000,
) -> float:
    """
    First time inside iv where quantity - threshold changes sign in the given
    direction. A grid scan brackets the crossing, bisection refines it.
    """
    c0 = _check_coefficients(c0)

    def excess(t: float) -> float:
        return quantity_value(row_at(c0, spec, t), quantity) - quantity.threshold

    times = np.linspace(iv.lo, iv.hi, grid + 1)
    previous = excess(float(times[0]))
    for lo, hi in zip(times[:-1], times[1:]):
        current = excess(float(hi))
        if _matches(direction, previous, current):
            return bisect(excess, Interval(float(lo), float(hi)), NUMERIC_CONFIG['BISECT_TOL'])
        previous = current
    raise NoSignChange(
        f"no {direction.value} crossing of {quantity.value} on [{iv.lo}, {iv.hi}]"
    )


def grid_crossings(rows: Sequence[TrajectoryRow], quantity: Quantity) -> List[Tuple[str, float]]:
    """Crossings of a threshold between neighbouring rows, located by linear interpolation."""
    crossings = []
    for before, after in zip(rows[:-1], rows[1:]):
        v0 = quantity_value(before, quantity) - quantity.threshold
        v1 = quantity_value(after, quantity) - quantity.threshold
        for direction in CrossingDirection:
            if _matches(direction, v0, v1):
                t = before.t + (after.t - before.t) * v0 / (v0 - v1)
                crossings.append((direction.value, float(t)))
    return crossings
