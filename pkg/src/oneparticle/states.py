"""One-particle states: block form (rho00, psi, R) of a density matrix on C + C^n.

Index convention: the distinguished vacuum index is 0, excited modes are 1..n.
The assembled matrix is

    [[rho00,  psi^dagger],
     [psi,    R         ]]

with rho00 = 1 - Tr R and R = R^dagger. Validation accepts input defects up to
1e-8 and then tightens: R is symmetrized and rho00 recomputed from the trace,
so stored states satisfy the invariants at the 1e-10 level or better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .linalg import hermitian_part, hermiticity_defect, require_square

INPUT_TOL = 1e-8

#: threshold below which psi / rho00 count as exactly absent
STRICTNESS_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class OneParticleState:
    """Validated density matrix on C + C^n in block form. Build via make_state."""

    rho00: float
    psi: np.ndarray
    R: np.ndarray

    @property
    def n(self) -> int:
        return self.psi.shape[0]

    def excited_weight(self) -> float:
        """Tr R, the total excited population."""
        return float(np.trace(self.R).real)


@dataclass(frozen=True)
class OneParticlePureState:
    """Unit vector phi0 |0> + sum_l varphi_l |l>. Build via make_pure_state."""

    phi0: complex
    varphi: np.ndarray

    @property
    def n(self) -> int:
        return self.varphi.shape[0]

    def amplitudes(self) -> np.ndarray:
        """Full (n+1)-component coefficient vector, vacuum first."""
        return np.concatenate(([self.phi0], self.varphi))


def make_state(rho00: float, psi, R, tol: float = INPUT_TOL) -> OneParticleState:
    """Validate and construct a one-particle state.

    Checks, each with its own error message: R Hermitian, rho00 consistent
    with 1 - Tr R, assembled matrix positive semidefinite.
    """
    R = require_square(R, "R")
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    if psi.ndim != 1:
        raise DimensionError(f"psi must be a vector, got shape {psi.shape}")
    n = R.shape[0]
    if psi.shape[0] != n:
        raise DimensionError(f"psi has length {psi.shape[0]}, R is {n}x{n}")

    defect = hermiticity_defect(R)
    if defect > tol:
        raise ValidationError(
            f"hermiticity: max|R - R^dagger| = {defect:.3e} exceeds {tol:.0e}"
        )
    R = hermitian_part(R)

    tr = float(np.trace(R).real)
    if abs(rho00 - (1.0 - tr)) > tol:
        raise ValidationError(
            f"trace: rho00 = {rho00!r} but 1 - Tr R = {1.0 - tr!r} "
            f"(mismatch beyond {tol:.0e})"
        )
    rho00 = 1.0 - tr
    if -1e-12 < rho00 < 0.0:  # round-off below an exactly unit-trace R
        rho00 = 0.0

    state = OneParticleState(rho00=rho00, psi=_frozen(psi.copy()), R=_frozen(R))
    w = np.linalg.eigvalsh(assemble(state))
    if w[0] < -tol:
        raise ValidationError(
            f"positivity: assembled matrix has eigenvalue {w[0]:.3e} below -{tol:.0e}"
        )
    return state


def vacuum_state(n: int) -> OneParticleState:
    """|0><0| with n (empty) excited modes."""
    return make_state(1.0, np.zeros(n), np.zeros((n, n)))


def from_excited_block(R) -> OneParticleState:
    """Strictly one-particle state 0 (+) R; R must be a density matrix on C^n."""
    R = require_square(R, "R")
    n = R.shape[0]
    return make_state(1.0 - float(np.trace(R).real), np.zeros(n), R)


def make_pure_state(phi0: complex, varphi, tol: float = INPUT_TOL) -> OneParticlePureState:
    """Validate normalization and construct a pure state (renormalized exactly)."""
    varphi = np.ascontiguousarray(varphi, dtype=np.complex128)
    if varphi.ndim != 1:
        raise DimensionError(f"varphi must be a vector, got shape {varphi.shape}")
    norm2 = abs(phi0) ** 2 + float(np.vdot(varphi, varphi).real)
    if abs(norm2 - 1.0) > tol:
        raise ValidationError(
            f"normalization: |phi0|^2 + ||varphi||^2 = {norm2!r}, expected 1"
        )
    scale = 1.0 / np.sqrt(norm2)
    return OneParticlePureState(
        phi0=complex(phi0) * scale, varphi=_frozen(varphi * scale)
    )


def pure_to_density(phi: OneParticlePureState) -> OneParticleState:
    """Rank-1 projector |phi><phi| in block form."""
    v = phi.amplitudes()
    M = np.outer(v, v.conj())
    return disassemble(M)


def is_strictly_one_particle(s: OneParticleState) -> bool:
    """True when the vacuum is unpopulated and carries no coherence.

    Thresholds: ||psi|| <= 1e-12 and rho00 <= 1e-12.
    """
    return (
        float(np.linalg.norm(s.psi)) <= STRICTNESS_TOL
        and s.rho00 <= STRICTNESS_TOL
    )


def assemble(s: OneParticleState) -> np.ndarray:
    """Dense (n+1) x (n+1) matrix with the vacuum at row/column 0."""
    n = s.n
    M = np.empty((n + 1, n + 1), dtype=np.complex128)
    M[0, 0] = s.rho00
    M[0, 1:] = s.psi.conj()
    M[1:, 0] = s.psi
    M[1:, 1:] = s.R
    return M


def disassemble(M, tol: float = INPUT_TOL) -> OneParticleState:
    """Inverse of assemble, with full validation of the dense matrix."""
    A = require_square(M, "density matrix")
    if A.shape[0] < 1:
        raise DimensionError("density matrix must be at least 1x1")
    defect = hermiticity_defect(A)
    if defect > tol:
        raise ValidationError(
            f"hermiticity: max|M - M^dagger| = {defect:.3e} exceeds {tol:.0e}"
        )
    A = hermitian_part(A)
    return make_state(float(A[0, 0].real), A[1:, 0], A[1:, 1:], tol=tol)
