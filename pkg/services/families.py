import logging
import math
from typing import List

import numpy as np

from .avgcorr import sigma_pure
from .errors import ParamOutOfRange, StateParseError
from .models import (
    BlochForm, CanonicalCorrelation, DensityMatrix, FamilyExpectation, FamilyKind, FamilySpec,
    Interval, SchmidtVariant,
)
from .numerics import integrate, sigma_kernel
from .qstate import bloch_compose, from_matrix

logger = logging.getLogger(__name__)

MEMS_BRANCH_POINT = 2.0 / 3.0


def _projector(vector: np.ndarray) -> np.ndarray:
    return np.outer(vector, vector.conj())


def _schmidt_vector(c: float, variant: SchmidtVariant) -> np.ndarray:
    # Basis order |00>, |01>, |10>, |11>.
    other = math.sqrt(max(0.0, 1.0 - c * c))
    sign = 1.0 if variant in (SchmidtVariant.PSI_PLUS, SchmidtVariant.PHI_PLUS) else -1.0
    vector = np.zeros(4, dtype=complex)
    if variant in (SchmidtVariant.PSI_PLUS, SchmidtVariant.PSI_MINUS):
        vector[1], vector[2] = c, sign * other
    else:
        vector[0], vector[3] = c, sign * other
    return vector


def _mems_matrix(s: float) -> np.ndarray:
    if s <= MEMS_BRANCH_POINT:
        diagonal = [1 / 3, 1 / 3, 0.0, 1 / 3]
    else:
        diagonal = [s / 2, 1 - s, 0.0, s / 2]
    matrix = np.diag(np.asarray(diagonal, dtype=complex))
    matrix[0, 3] = matrix[3, 0] = s / 2
    return matrix


def build(spec: FamilySpec) -> DensityMatrix:
    """Density matrix of one of the named example families."""
    if spec.kind is FamilyKind.PURE_SCHMIDT:
        return from_matrix(_projector(_schmidt_vector(spec.params[0], spec.variant)), require_physical=True)

    if spec.kind is FamilyKind.WERNER:
        lam = spec.params[0]
        bell = np.array([0, 1, spec.sign, 0], dtype=complex) / math.sqrt(2)
        matrix = lam * _projector(bell) + (1 - lam) / 4 * np.eye(4)
        return from_matrix(matrix, require_physical=True)

    if spec.kind is FamilyKind.MEMS:
        return from_matrix(_mems_matrix(spec.params[0]), require_physical=True)

    rho = bloch_compose(BlochForm.bell_diagonal(spec.params))
    if not rho.physical:
        logger.warning("Bell-diagonal coefficients %s do not describe a physical state", spec.params)
    return rho


def mems_branch_sigma(s: float, gamma: float) -> float:
    """
    Average correlation of a MEMS member with alpha = beta = s, written with
    f(phi) = sin^2 phi + (gamma / s)^2 cos^2 phi.
    """
    ratio = (gamma / s) ** 2

    def integrand(phi: float) -> float:
        return sigma_kernel(math.sin(phi) ** 2 + ratio * math.cos(phi) ** 2)

    mean_kernel = integrate(integrand, Interval(0.0, math.pi / 2)).value / (math.pi / 2)
    return s / 4 * (1 + mean_kernel)


def family_expected(spec: FamilySpec) -> FamilyExpectation:
    """Closed-form canonical values, s3 and average correlation for each family."""
    x = spec.params[0]

    if spec.kind is FamilyKind.PURE_SCHMIDT:
        b = 2 * x * math.sqrt(max(0.0, 1 - x * x))
        return FamilyExpectation(
            canonical=CanonicalCorrelation(1.0, b, b),
            s3=math.sqrt(1 + 8 * x * x * (1 - x * x)),
            sigma_closed=sigma_pure(x),
        )

    if spec.kind is FamilyKind.WERNER:
        s3 = math.sqrt(3) * x
        return FamilyExpectation(
            canonical=CanonicalCorrelation(x, x, x),
            s3=s3,
            sigma_closed=s3 / (2 * math.sqrt(3)),
        )

    if spec.kind is FamilyKind.MEMS:
        s = x
        if s <= MEMS_BRANCH_POINT:
            s3 = math.sqrt(2 * s * s + 1 / 9)
            if s < 1 / 3:
                # Arccsch(x) = asinh(1/x), so the 9s^2 form is the sigma kernel at f = 9s^2.
                return FamilyExpectation(
                    canonical=CanonicalCorrelation(1 / 3, s, s),
                    s3=s3,
                    sigma_closed=(1 + sigma_kernel(9 * s * s)) / 12,
                )
            return FamilyExpectation(
                canonical=CanonicalCorrelation(s, s, 1 / 3),
                s3=s3,
                sigma_closed=mems_branch_sigma(s, 1 / 3),
            )
        return FamilyExpectation(
            canonical=CanonicalCorrelation(s, s, 2 * s - 1),
            s3=math.sqrt(6 * s * s - 4 * s + 1),
            sigma_closed=mems_branch_sigma(s, 2 * s - 1),
        )

    canonical = CanonicalCorrelation.from_values(spec.params)
    return FamilyExpectation(
        canonical=canonical,
        s3=math.sqrt(sum(v * v for v in canonical.as_tuple())),
        sigma_closed=None,
    )


def parse_family(text: str) -> FamilySpec:
    """
    Parse the CLI family mini-language:
    werner:0.6[:+|-], pure:0.9[:psi+|psi-|phi+|phi-], mems:0.5, belldiag:0.8,1,1
    """
    parts = text.strip().split(':')
    try:
        kind = FamilyKind(parts[0].lower())
    except ValueError:
        raise StateParseError(f"unknown family '{parts[0]}' in '{text}'")
    if len(parts) < 2:
        raise StateParseError(f"family '{text}' is missing its parameter")

    try:
        if kind is FamilyKind.BELL_DIAGONAL:
            if len(parts) != 2:
                raise StateParseError(f"belldiag takes one comma-separated triple, got '{text}'")
            return FamilySpec(kind, tuple(float(v) for v in parts[1].split(',')))

        value = float(parts[1])
        if kind is FamilyKind.PURE_SCHMIDT:
            variant = SchmidtVariant(parts[2].lower()) if len(parts) > 2 else SchmidtVariant.PSI_PLUS
            return FamilySpec(kind, (value,), variant=variant)
        if kind is FamilyKind.WERNER:
            sign = -1
            if len(parts) > 2:
                if parts[2] not in ('+', '-'):
                    raise StateParseError(f"Werner sign must be '+' or '-', got '{parts[2]}'")
                sign = 1 if parts[2] == '+' else -1
            return FamilySpec(kind, (value,), sign=sign)
        if len(parts) > 2:
            raise StateParseError(f"mems takes a single parameter, got '{text}'")
        return FamilySpec(kind, (value,))
    except ValueError as e:
        raise StateParseError(f"cannot parse family '{text}': {e}") from e
    except ParamOutOfRange as e:
        raise StateParseError(str(e)) from e


def family_grid(kind: FamilyKind, points: int) -> List[FamilySpec]:
    """Evenly spaced parameter values in [0, 1] for the one-parameter families."""
    if kind is FamilyKind.BELL_DIAGONAL:
        raise ParamOutOfRange("Bell-diagonal states have no one-parameter grid")
    if points < 2:
        raise ParamOutOfRange(f"a grid needs at least 2 points, got {points}")
    return [FamilySpec(kind, (float(x),)) for x in np.linspace(0.0, 1.0, points)]
