from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple
import math

import numpy as np

from .errors import BadSetting, DomainError, ParamOutOfRange


class SigmaMethod(Enum):
    SINGLE_INTEGRAL = "single"
    DOUBLE_INTEGRAL = "double"
    CLOSED_FORM = "closed"
    MONTE_CARLO = "mc"


class FamilyKind(Enum):
    PURE_SCHMIDT = "pure"
    WERNER = "werner"
    MEMS = "mems"
    BELL_DIAGONAL = "belldiag"


class SchmidtVariant(Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


class ChannelKind(Enum):
    BIT_FLIP = "bitflip"
    BIT_PHASE_FLIP = "bitphaseflip"
    PHASE_FLIP = "phaseflip"
    GENERALIZED_AMPLITUDE_DAMPING = "gad"

    @property
    def unital(self) -> bool:
        return self is not ChannelKind.GENERALIZED_AMPLITUDE_DAMPING

    @property
    def flip_axis(self) -> int:
        """Index of the Pauli operator in the second Kraus operator (0=X, 1=Y, 2=Z)."""
        axes = {
            ChannelKind.BIT_FLIP: 0,
            ChannelKind.BIT_PHASE_FLIP: 1,
            ChannelKind.PHASE_FLIP: 2,
        }
        if self not in axes:
            raise BadSetting(f"{self.value} has no flip axis")
        return axes[self]


class SamplerKind(Enum):
    GINIBRE_MIXED = "ginibre"
    HAAR_PURE = "pure"
    BELL_DIAGONAL_UNIFORM = "belldiag"


class Quantity(Enum):
    S2 = "s2>1"
    S3 = "s3>1"
    SIGMA = "sigma>1/4"

    @property
    def threshold(self) -> float:
        return 0.25 if self is Quantity.SIGMA else 1.0


class CrossingDirection(Enum):
    DECAY = "decay"
    REVIVAL = "revival"


class Nonclassical(Enum):
    YES = "yes"
    NO = "no"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    physical: bool


@dataclass(frozen=True, eq=False)
class BlochForm:
    r: np.ndarray
    s: np.ndarray
    T: np.ndarray

    @classmethod
    def bell_diagonal(cls, coefficients) -> "BlochForm":
        c = np.asarray(coefficients, dtype=float).reshape(3)
        return cls(r=np.zeros(3), s=np.zeros(3), T=np.diag(c))


@dataclass(frozen=True)
class CanonicalCorrelation:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not (-1e-12 <= self.gamma <= self.beta + 1e-12 and self.beta <= self.alpha + 1e-12):
            raise DomainError(
                f"canonical values must satisfy 0 <= gamma <= beta <= alpha, got "
                f"({self.alpha}, {self.beta}, {self.gamma})"
            )

    @classmethod
    def from_values(cls, values) -> "CanonicalCorrelation":
        """Sort absolute values descending, e.g. Bell-diagonal coefficients."""
        a, b, c = sorted((abs(float(v)) for v in values), reverse=True)
        return cls(a, b, c)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class FamilySpec:
    kind: FamilyKind
    params: Tuple[float, ...]
    variant: Optional[SchmidtVariant] = None
    sign: int = -1

    def __post_init__(self):
        object.__setattr__(self, 'params', tuple(float(p) for p in self.params))
        expected = 3 if self.kind is FamilyKind.BELL_DIAGONAL else 1
        if len(self.params) != expected:
            raise ParamOutOfRange(f"{self.kind.value} takes {expected} parameter(s), got {len(self.params)}")
        if self.kind is FamilyKind.BELL_DIAGONAL:
            if any(not -1.0 <= c <= 1.0 for c in self.params):
                raise ParamOutOfRange(f"Bell-diagonal coefficients must lie in [-1, 1], got {self.params}")
        elif not 0.0 <= self.params[0] <= 1.0:
            raise ParamOutOfRange(f"{self.kind.value} parameter must lie in [0, 1], got {self.params[0]}")
        if self.kind is FamilyKind.PURE_SCHMIDT and self.variant is None:
            object.__setattr__(self, 'variant', SchmidtVariant.PSI_PLUS)
        if self.sign not in (-1, 1):
            raise ParamOutOfRange(f"Werner sign must be +1 or -1, got {self.sign}")

    @property
    def label(self) -> str:
        if self.kind is FamilyKind.BELL_DIAGONAL:
            return f"belldiag:{','.join(f'{c:g}' for c in self.params)}"
        if self.kind is FamilyKind.PURE_SCHMIDT:
            return f"pure:{self.params[0]:g}:{self.variant.value}"
        if self.kind is FamilyKind.WERNER:
            return f"werner:{self.params[0]:g}:{'+' if self.sign > 0 else '-'}"
        return f"mems:{self.params[0]:g}"


@dataclass(frozen=True)
class FamilyExpectation:
    canonical: CanonicalCorrelation
    s3: float
    sigma_closed: Optional[float]


@dataclass(frozen=True)
class SigmaResult:
    sigma: float
    method: SigmaMethod
    error_estimate: float

    def __post_init__(self):
        if self.sigma < 0 or self.error_estimate < 0:
            raise DomainError(f"invalid sigma result {self.sigma} +/- {self.error_estimate}")


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    a: Tuple[np.ndarray, ...]
    b: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.a) != len(self.b) or len(self.a) not in (2, 3):
            raise BadSetting(f"need 2 or 3 direction pairs, got {len(self.a)} and {len(self.b)}")
        object.__setattr__(self, 'a', tuple(np.asarray(v, dtype=float).reshape(3) for v in self.a))
        object.__setattr__(self, 'b', tuple(np.asarray(v, dtype=float).reshape(3) for v in self.b))
        for v in self.a + self.b:
            if abs(np.linalg.norm(v) - 1.0) > 1e-10:
                raise BadSetting(f"measurement direction {v} is not a unit vector")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def bob_orthonormal(self) -> bool:
        gram = np.array([[np.dot(u, v) for v in self.b] for u in self.b])
        return bool(np.max(np.abs(gram - np.eye(self.n))) <= 1e-10)


@dataclass(frozen=True)
class SteeringReport:
    s2: float
    s3: float
    S2: float
    S3: float
    chsh_max: float
    sigma_lower: Optional[float]
    sigma_upper: Optional[float]


@dataclass(frozen=True)
class Classification:
    bell_nonlocal: bool
    steerable3: bool
    nonclassical: Nonclassical


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    gamma_rate: float
    kappa: Optional[float] = None

    def __post_init__(self):
        if not self.gamma_rate > 0:
            raise ParamOutOfRange(f"decay rate must be positive, got {self.gamma_rate}")
        if self.kind is ChannelKind.GENERALIZED_AMPLITUDE_DAMPING:
            if self.kappa is None or not self.kappa > 0:
                raise ParamOutOfRange("generalized amplitude damping needs a positive kappa")
            if 2 * self.kappa * self.gamma_rate - self.gamma_rate ** 2 <= 0:
                raise ParamOutOfRange(
                    f"weak coupling (gamma={self.gamma_rate}, kappa={self.kappa}) is not supported: need 2*kappa > gamma"
                )

    @classmethod
    def from_ratio(cls, kind: ChannelKind, gamma_rate: float, kappa_over_gamma: Optional[float] = None) -> "ChannelSpec":
        kappa = None if kappa_over_gamma is None else kappa_over_gamma * gamma_rate
        return cls(kind=kind, gamma_rate=gamma_rate, kappa=kappa)

    @property
    def oscillation_frequency(self) -> float:
        """D = sqrt(2 kappa Gamma - Gamma^2); GAD only."""
        if self.kind.unital:
            raise BadSetting("oscillation frequency is only defined for generalized amplitude damping")
        return math.sqrt(2 * self.kappa * self.gamma_rate - self.gamma_rate ** 2)


TRAJECTORY_HEADER = (
    't', 'p', 'c1', 'c2', 'c3', 'alpha', 'beta', 'gamma',
    'sigma', 'two_sigma', 's2', 's3', 'S2', 'S3', 'physical',
)


@dataclass(frozen=True)
class TrajectoryRow:
    t: float
    p: float
    c: Tuple[float, float, float]
    canonical: CanonicalCorrelation
    sigma: float
    s2: float
    s3: float
    S2: float
    S3: float
    physical: bool
    two_sigma: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'two_sigma', 2.0 * self.sigma)

    def values(self) -> tuple:
        return (
            self.t, self.p, *self.c, *self.canonical.as_tuple(),
            self.sigma, self.two_sigma, self.s2, self.s3, self.S2, self.S3, self.physical,
        )


@dataclass(frozen=True)
class DeathTimes:
    t_s2: float
    t_s3: float
    t_sigma: float
    A: Optional[float]


SAMPLER_NAMES = {
    'ginibre4': (SamplerKind.GINIBRE_MIXED, 4),
    'ginibre3': (SamplerKind.GINIBRE_MIXED, 3),
    'ginibre2': (SamplerKind.GINIBRE_MIXED, 2),
    'ginibre1': (SamplerKind.GINIBRE_MIXED, 1),
    'pure': (SamplerKind.HAAR_PURE, 1),
    'belldiag': (SamplerKind.BELL_DIAGONAL_UNIFORM, 4),
}


@dataclass(frozen=True)
class SamplerSpec:
    kind: SamplerKind
    seed: int
    rank: int = 4

    def __post_init__(self):
        if not 1 <= self.rank <= 4:
            raise ParamOutOfRange(f"Ginibre rank must lie in 1..4, got {self.rank}")
        if self.seed < 0:
            raise ParamOutOfRange(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def from_name(cls, name: str, seed: int) -> "SamplerSpec":
        if name not in SAMPLER_NAMES:
            raise BadSetting(f"unknown sampler '{name}', expected one of {sorted(SAMPLER_NAMES)}")
        kind, rank = SAMPLER_NAMES[name]
        return cls(kind=kind, seed=seed, rank=rank)

    @property
    def name(self) -> str:
        if self.kind is SamplerKind.GINIBRE_MIXED:
            return f"ginibre{self.rank}"
        return self.kind.value
