"""Entropies and the mutual-information decomposition for one-particle states.

All entropies are in nats. The building block is

    f(x) = 0 for x = 0,   f(x) = -x ln x for 0 < x <= 1,

applied spectrally to matrices (von Neumann) and entrywise to probability
vectors (Shannon). For a zero-coherence one-particle state and a partition
I1 | I2 of the modes, the mutual information of the embedded state splits as

    I = [S(P1 R P1) + S(P2 R P2) - S(R)]                      (decoherence term)
      + [S_cl(pi1) + S_cl(pi2) - S_cl(pi)]                    (classical term)

with pi = (rho00, Tr P1 R P1, Tr P2 R P2), pi1 = (p0 + p2, p1),
pi2 = (p0 + p1, p2). Both terms are reported separately and must add up to the
total computed from the projected blocks alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import hermitian_part, hermiticity_defect, require_square
from .reduction import QuantumOperation, as_index_set, kraus_sum
from .states import OneParticleState

SCALAR_CLIP_TOL = 1e-12
EIGENVALUE_CLIP_TOL = 1e-10


def entropy_scalar(x: float) -> float:
    """-x ln x with f(0) = 0; accepts round-off noise just outside [0, 1]."""
    if x < -SCALAR_CLIP_TOL or x > 1.0 + SCALAR_CLIP_TOL:
        raise DomainError(f"entropy argument {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0:
        return 0.0
    return -x * math.log(x)


@dataclass(frozen=True)
class ClassicalDistribution:
    """Probability vector; tiny negative entries are clipped to zero."""

    probabilities: tuple[float, ...]

    def __init__(self, probabilities):
        ps = [float(p) for p in probabilities]
        if any(p < -SCALAR_CLIP_TOL or p > 1.0 + SCALAR_CLIP_TOL for p in ps):
            raise ValidationError(f"probabilities outside [0, 1]: {ps}")
        ps = [min(max(p, 0.0), 1.0) for p in ps]
        total = sum(ps)
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probabilities", tuple(ps))

    def __iter__(self):
        return iter(self.probabilities)


def shannon_entropy(pi) -> float:
    """sum_i f(p_i) for a classical distribution (nats)."""
    if not isinstance(pi, ClassicalDistribution):
        pi = ClassicalDistribution(pi)
    return float(sum(entropy_scalar(p) for p in pi))


def _block_entropy(M) -> float:
    """Tr f(M) for a Hermitian PSD block with trace at most 1.

    Works for unnormalized blocks (Tr M < 1) exactly as the identity on the
    projected blocks requires; empty blocks contribute zero.
    """
    M = require_square(M)
    if M.shape[0] == 0:
        return 0.0
    defect = hermiticity_defect(M)
    if defect > 1e-8:
        raise ValidationError(f"hermiticity defect {defect:.3e} exceeds 1e-08")
    w = np.linalg.eigvalsh(hermitian_part(M))
    if w[0] < -EIGENVALUE_CLIP_TOL or w[-1] > 1.0 + EIGENVALUE_CLIP_TOL:
        raise DomainError(
            f"eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1] beyond "
            f"{EIGENVALUE_CLIP_TOL:.0e}"
        )
    return float(sum(entropy_scalar(x) for x in np.clip(w, 0.0, 1.0)))


def von_neumann_entropy(M) -> float:
    """S(M) = Tr f(M) = -sum_i lambda_i ln lambda_i (nats)."""
    return _block_entropy(M)


@dataclass(frozen=True)
class MutualInfoReport:
    """Total mutual information and its decoherence/classical split."""

    total: float
    quantum_term: float
    classical_term: float
    pi: ClassicalDistribution


def _require_zero_coherence(s: OneParticleState) -> None:
    coherence = float(np.linalg.norm(s.psi))
    if coherence > 1e-12:
        raise ValidationError(
            f"mutual information decomposition needs psi = 0; ||psi|| = {coherence:.3e}. "
            "Use the full-space oracle for states with vacuum coherence."
        )


def _assemble_report(
    rho00: float, block1, block2, entropy_R: float
) -> MutualInfoReport:
    p1 = float(np.trace(block1).real) if block1.size else 0.0
    p2 = float(np.trace(block2).real) if block2.size else 0.0
    quantum = _block_entropy(block1) + _block_entropy(block2) - entropy_R
    pi = ClassicalDistribution((rho00, p1, p2))
    classical = (
        shannon_entropy((rho00 + p2, p1))
        + shannon_entropy((rho00 + p1, p2))
        - shannon_entropy(pi)
    )
    return MutualInfoReport(
        total=quantum + classical,
        quantum_term=quantum,
        classical_term=classical,
        pi=pi,
    )


def mutual_information(s: OneParticleState, first, second) -> MutualInfoReport:
    """Mutual information between two index sets partitioning the modes.

    Requires psi = 0. The total equals S(Tr_I2 rho) + S(Tr_I1 rho) - S(rho)
    but is computed from the projected blocks of R and three scalar terms,
    never touching the exponentially large embedding.
    """
    _require_zero_coherence(s)
    n = s.n
    I1 = as_index_set(first, n)
    I2 = as_index_set(second, n)
    if set(I1.members) & set(I2.members) or len(I1) + len(I2) != n:
        raise ValidationError(
            f"index sets {I1.members} and {I2.members} do not partition 1..{n}"
        )
    idx1, idx2 = I1.zero_based(), I2.zero_based()
    block1 = s.R[np.ix_(idx1, idx1)]
    block2 = s.R[np.ix_(idx2, idx2)]
    return _assemble_report(s.rho00, block1, block2, _block_entropy(s.R))


def mutual_information_instrument(
    s: OneParticleState, first: QuantumOperation, second: QuantumOperation
) -> MutualInfoReport:
    """Mutual information generalized to a binary quantum instrument.

    The two operations must sum to a trace-preserving map on the excited
    block. The decoherence term uses the post-instrument ensemble
    Phi1(R) (+) Phi2(R), which reduces to the projection case exactly when
    the operations are ideal reductions onto a partition.
    """
    _require_zero_coherence(s)
    n = s.n
    if first.d_in != n or second.d_in != n:
        raise DimensionError(
            f"instrument acts on dimension {first.d_in}/{second.d_in}, state has n = {n}"
        )
    total = kraus_sum(list(first.kraus) + list(second.kraus))
    defect = float(np.max(np.abs(total - np.eye(n)))) if n else 0.0
    if defect > 1e-10:
        raise ValidationError(
            f"instrument is not trace-preserving: max|sum K^dagger K - I| = {defect:.3e}"
        )
    return _assemble_report(
        s.rho00, first.apply(s.R), second.apply(s.R), _block_entropy(s.R)
    )


def markov_decay_curve(gamma: float, t_grid) -> np.ndarray:
    """Mutual information of the simplest Markovian decay between two subsystems.

    With occupation probabilities p1 = exp(-gamma t), p2 = 1 - exp(-gamma t)
    and nothing in the vacuum, I(t) = f(p1) + f(p2): zero at both ends with a
    single maximum ln 2 at t = ln 2 / gamma. Returns an array of (t, I) rows.
    """
    if gamma <= 0:
        raise DomainError(f"decay rate must be positive, got {gamma!r}")
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1:
        raise DomainError("t_grid must be one-dimensional")
    if ts.size and float(ts.min()) < 0:
        raise DomainError(f"times must be nonnegative, got {ts.min()!r}")
    out = np.empty((ts.size, 2), dtype=float)
    for k, t in enumerate(ts):
        p = math.exp(-gamma * t)
        out[k, 0] = t
        out[k, 1] = entropy_scalar(p) + entropy_scalar(1.0 - p)
    return out
