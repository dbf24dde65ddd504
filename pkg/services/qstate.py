import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from .config import NUMERIC_CONFIG
from .errors import NotDensityMatrix, StateParseError
from .models import BlochForm, CanonicalCorrelation, DensityMatrix
from .numerics import hermitian_eigen4, svd3

logger = logging.getLogger(__name__)

# sigma_1 = X, sigma_2 = Y, sigma_3 = Z in the computational basis |0>, |1>.
IDENTITY2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
LOCAL_A = tuple(np.kron(sigma, IDENTITY2) for sigma in PAULI)
LOCAL_B = tuple(np.kron(IDENTITY2, sigma) for sigma in PAULI)
CORRELATORS = tuple(tuple(np.kron(si, sj) for sj in PAULI) for si in PAULI)


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=complex, copy=True)
    matrix.setflags(write=False)
    return matrix


def from_matrix(raw, require_physical: bool = False) -> DensityMatrix:
    """
    Validate a candidate two-qubit density matrix.

    Trace and Hermiticity are always checked; positivity only raises when
    require_physical is set but always determines the physical flag.
    """
    matrix = np.asarray(raw, dtype=complex)
    if matrix.shape != (4, 4):
        raise NotDensityMatrix('shape', float(matrix.size), f"expected 4x4, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NotDensityMatrix('finiteness', float('inf'))

    hermitian_gap = float(np.max(np.abs(matrix - matrix.conj().T)))
    if hermitian_gap > NUMERIC_CONFIG['HERMITIAN_TOL']:
        raise NotDensityMatrix('hermiticity', hermitian_gap)
    trace_gap = abs(complex(np.trace(matrix)) - 1.0)
    if trace_gap > NUMERIC_CONFIG['TRACE_TOL']:
        raise NotDensityMatrix('trace', trace_gap)

    min_eigenvalue = hermitian_eigen4(matrix)[0]
    physical = min_eigenvalue >= NUMERIC_CONFIG['PSD_TOL']
    if require_physical and not physical:
        raise NotDensityMatrix('positivity', min_eigenvalue, "negative eigenvalue")
    return DensityMatrix(entries=_frozen(matrix), physical=physical)


def _expectation(rho: np.ndarray, operator: np.ndarray) -> float:
    value = complex(np.trace(rho @ operator))
    if abs(value.imag) > 1e-10:
        logger.warning("discarding imaginary residue %.3e in expectation value", value.imag)
    return value.real


def bloch_decompose(rho: DensityMatrix) -> BlochForm:
    m = rho.entries
    r = np.array([_expectation(m, op) for op in LOCAL_A])
    s = np.array([_expectation(m, op) for op in LOCAL_B])
    T = np.array([[_expectation(m, op) for op in row] for row in CORRELATORS])
    return BlochForm(r=r, s=s, T=T)


def bloch_compose(b: BlochForm) -> DensityMatrix:
    """Invert the Hilbert-Schmidt decomposition; unphysical inputs come back flagged, not rejected."""
    matrix = np.eye(4, dtype=complex)
    for i in range(3):
        matrix = matrix + b.r[i] * LOCAL_A[i] + b.s[i] * LOCAL_B[i]
        for j in range(3):
            matrix = matrix + b.T[i][j] * CORRELATORS[i][j]
    return from_matrix(matrix / 4.0, require_physical=False)


def canonical_correlation(b: BlochForm) -> CanonicalCorrelation:
    alpha, beta, gamma = svd3(b.T)
    return CanonicalCorrelation(alpha, beta, gamma)


def local_unitary(rho: DensityMatrix, u: np.ndarray, v: np.ndarray) -> DensityMatrix:
    """(U (x) V) rho (U (x) V)^dagger."""
    w = np.kron(u, v)
    return from_matrix(w @ rho.entries @ w.conj().T, require_physical=False)


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def load_state_file(path: Union[str, Path], require_physical: bool = False) -> DensityMatrix:
    """
    Read a state file holding exactly one of
    {"matrix": [[[re, im] x4] x4]} or {"bloch": {"r": [3], "s": [3], "T": [[3] x3]}}.
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise StateParseError(f"cannot read state file {path}: {e}") from e

    if not isinstance(payload, dict) or len(payload.keys() & {'matrix', 'bloch'}) != 1:
        raise StateParseError("state file needs exactly one of the keys 'matrix' or 'bloch'")

    try:
        if 'matrix' in payload:
            pairs = np.asarray(payload['matrix'], dtype=float)
            if pairs.shape != (4, 4, 2):
                raise StateParseError(f"'matrix' must be 4x4 [re, im] pairs, got shape {pairs.shape}")
            return from_matrix(pairs[..., 0] + 1j * pairs[..., 1], require_physical=require_physical)

        bloch = payload['bloch']
        form = BlochForm(
            r=np.asarray(bloch['r'], dtype=float).reshape(3),
            s=np.asarray(bloch['s'], dtype=float).reshape(3),
            T=np.asarray(bloch['T'], dtype=float).reshape(3, 3),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise StateParseError(f"malformed state file {path}: {e}") from e

    rho = bloch_compose(form)
    if require_physical and not rho.physical:
        raise NotDensityMatrix('positivity', hermitian_eigen4(rho.entries)[0], "negative eigenvalue")
    return rho
