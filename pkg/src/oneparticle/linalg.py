"""Dense complex-matrix kernel: eigendecompositions, matrix functions, norms.

All matrices are plain ``numpy.ndarray`` objects with dtype complex128.
Inputs that are meant to be Hermitian are accepted with a defect of up to
``INPUT_HERMITICITY_TOL`` and symmetrized before use, so downstream code can
rely on tight (1e-10 level) internal invariants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, NumericalError, ValidationError

#: accepted Hermiticity defect on user-supplied matrices
INPUT_HERMITICITY_TOL = 1e-8

#: eigenvalues this far below a function's domain edge are clipped, not rejected
DOMAIN_CLIP_TOL = 1e-10


def as_complex_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a C-contiguous complex128 2-D array."""
    A = np.ascontiguousarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    return A


def require_square(M, name: str = "matrix") -> np.ndarray:
    A = as_complex_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def dagger(M: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return M.conj().T


def hermiticity_defect(M: np.ndarray) -> float:
    """max |M - M^dagger|, zero for empty matrices."""
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - M.conj().T)))


def is_hermitian(M, tol: float = 1e-10) -> bool:
    return hermiticity_defect(require_square(M)) <= tol


def hermitian_part(M: np.ndarray) -> np.ndarray:
    """(M + M^dagger) / 2."""
    return (M + M.conj().T) / 2


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Spectral data of a Hermitian matrix: ascending eigenvalues, unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def hermitian_eigs(M, tol: float = INPUT_HERMITICITY_TOL) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized to (M + M^dagger)/2 unconditionally; a defect
    above ``tol`` is rejected first.
    """
    A = require_square(M)
    defect = hermiticity_defect(A)
    if defect > tol:
        raise ValidationError(
            f"hermiticity: max|M - M^dagger| = {defect:.3e} exceeds {tol:.0e}"
        )
    try:
        w, U = np.linalg.eigh(hermitian_part(A))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    return HermitianEigenSystem(eigenvalues=w, eigenvectors=U)


def matrix_function(
    M,
    f: Callable[[float], float],
    domain: tuple[float, float] | None = None,
    tol: float = INPUT_HERMITICITY_TOL,
) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix spectrally.

    f(M) = U diag(f(lambda_1), ..., f(lambda_n)) U^dagger.

    When ``domain`` is given, eigenvalues within ``DOMAIN_CLIP_TOL`` outside it
    are clipped to the nearest edge (density matrices pick up tiny negative
    eigenvalues from round-off); anything further out raises ``DomainError``
    naming the offending eigenvalue.
    """
    eig = hermitian_eigs(M, tol=tol)
    w = eig.eigenvalues.copy()
    if domain is not None:
        lo, hi = domain
        bad = (w < lo - DOMAIN_CLIP_TOL) | (w > hi + DOMAIN_CLIP_TOL)
        if np.any(bad):
            raise DomainError(
                f"eigenvalue {w[bad][0]:.6e} outside domain [{lo}, {hi}] "
                f"beyond clip tolerance {DOMAIN_CLIP_TOL:.0e}"
            )
        w = np.clip(w, lo, hi)
    fw = np.array([f(x) for x in w], dtype=float)
    U = eig.eigenvectors
    return hermitian_part((U * fw) @ U.conj().T)


def matrix_exponential(M) -> np.ndarray:
    """exp(M) by scaling-and-squaring with a Pade approximant (scipy.linalg.expm)."""
    A = require_square(M)
    if A.shape[0] == 0:
        return A.copy()
    return np.asarray(scipy.linalg.expm(A), dtype=np.complex128)


def operator_norm(M) -> float:
    """Largest singular value."""
    A = as_complex_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def min_eigenvalue(M, tol: float = INPUT_HERMITICITY_TOL) -> float:
    """Smallest eigenvalue of a (nearly) Hermitian matrix."""
    A = require_square(M)
    if A.shape[0] == 0:
        return 0.0
    defect = hermiticity_defect(A)
    if defect > tol:
        raise ValidationError(
            f"hermiticity: max|M - M^dagger| = {defect:.3e} exceeds {tol:.0e}"
        )
    return float(np.linalg.eigvalsh(hermitian_part(A))[0])


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of a sequence, left to right (rightmost index fastest)."""
    out = np.array([[1.0 + 0.0j]])
    for F in factors:
        out = np.kron(out, F)
    return out
