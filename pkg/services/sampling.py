"""
Reproducible random two-qubit states.

Every draw gets its own Philox generator keyed by (seed, index), so a state
depends only on its index and never on call order or thread count.
"""
import logging
import math
from typing import Iterator, Tuple

import numpy as np

from .errors import ParamOutOfRange
from .models import BlochForm, DensityMatrix, SamplerKind, SamplerSpec
from .qstate import bloch_compose, from_matrix

logger = logging.getLogger(__name__)


def _generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def bell_diagonal_eigenvalues(c) -> Tuple[float, float, float, float]:
    c1, c2, c3 = c
    return (
        (1 - c1 - c2 - c3) / 4,
        (1 - c1 + c2 + c3) / 4,
        (1 + c1 - c2 + c3) / 4,
        (1 + c1 + c2 - c3) / 4,
    )


def _bell_diagonal_draw(rng: np.random.Generator) -> Tuple[np.ndarray, int]:
    """Rejection sampling from the cube [-1, 1]^3 down to the physical tetrahedron."""
    attempts = 0
    while True:
        attempts += 1
        c = rng.uniform(-1.0, 1.0, size=3)
        if min(bell_diagonal_eigenvalues(c)) >= 0.0:
            return c, attempts


def sample(spec: SamplerSpec, index: int) -> DensityMatrix:
    if index < 0:
        raise ParamOutOfRange(f"sample index must be non-negative, got {index}")
    rng = _generator(spec.seed, index)

    if spec.kind is SamplerKind.GINIBRE_MIXED:
        g = _complex_gaussian(rng, (4, spec.rank))
        w = g @ g.conj().T
        w = (w + w.conj().T) / 2
        return from_matrix(w / np.trace(w).real, require_physical=True)

    if spec.kind is SamplerKind.HAAR_PURE:
        v = _complex_gaussian(rng, 4)
        v = v / np.linalg.norm(v)
        return from_matrix(np.outer(v, v.conj()), require_physical=True)

    c, _ = _bell_diagonal_draw(rng)
    rho = bloch_compose(BlochForm.bell_diagonal(c))
    return from_matrix(rho.entries, require_physical=True)


def stream(spec: SamplerSpec, count: int) -> Iterator[DensityMatrix]:
    if count < 1:
        raise ParamOutOfRange(f"count must be at least 1, got {count}")
    return (sample(spec, index) for index in range(count))


def acceptance_rate(spec: SamplerSpec, count: int) -> float:
    """Fraction of cube draws kept by the Bell-diagonal rejection sampler over `count` states."""
    if spec.kind is not SamplerKind.BELL_DIAGONAL_UNIFORM:
        raise ParamOutOfRange(f"{spec.name} does not use rejection sampling")
    if count < 1:
        raise ParamOutOfRange(f"count must be at least 1, got {count}")
    attempts = sum(_bell_diagonal_draw(_generator(spec.seed, index))[1] for index in range(count))
    return count / attempts
