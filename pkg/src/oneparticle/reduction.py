"""Partial traces over index sets, generalized reductions, and entanglement tests.

Tracing out the modes in an index set I keeps the complementary excited modes
and moves the traced population onto the vacuum:

    rho00' = rho00 + sum_{l in I} R_ll,   psi' = psi on the kept modes,
    R'     = R restricted to the kept modes.

Reduced states are compressed onto the surviving modes; the original labels of
those modes travel along in ``ReducedState.retained``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, ValidationError
from .linalg import as_complex_matrix
from .states import (
    OneParticlePureState,
    OneParticleState,
    is_strictly_one_particle,
    make_state,
)

#: single tolerance for "this block is zero" in separability and strictness tests
ZERO_BLOCK_TOL = 1e-10

#: numerical support threshold for pure-state entanglement predicates
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class IndexSet:
    """Sorted, duplicate-free set of excited-mode indices (1-based)."""

    members: tuple[int, ...]

    def __init__(self, members: Iterable[int]):
        ms = tuple(sorted({int(i) for i in members}))
        if any(i < 1 for i in ms):
            raise DimensionError(f"mode indices must be >= 1, got {ms}")
        object.__setattr__(self, "members", ms)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i) -> bool:
        return i in self.members

    def validate(self, n: int) -> "IndexSet":
        if self.members and self.members[-1] > n:
            raise DimensionError(
                f"index {self.members[-1]} out of range for n = {n} modes"
            )
        return self

    def complement(self, n: int) -> "IndexSet":
        self.validate(n)
        return IndexSet(i for i in range(1, n + 1) if i not in self.members)

    def zero_based(self) -> np.ndarray:
        """Positions inside the excited block (0-based)."""
        return np.array([i - 1 for i in self.members], dtype=int)


def as_index_set(indices, n: int) -> IndexSet:
    I = indices if isinstance(indices, IndexSet) else IndexSet(indices)
    return I.validate(n)


@dataclass(frozen=True)
class ReducedState:
    """A one-particle state on the kept modes plus their original labels."""

    state: OneParticleState
    retained: IndexSet


@dataclass(frozen=True)
class QuantumOperation:
    """Completely positive trace non-increasing map given by Kraus operators.

    All Kraus operators must share one (d_out, d_in) shape; the map acts as
    R -> sum_k K R K^dagger.
    """

    kraus: tuple[np.ndarray, ...]

    def __init__(self, kraus: Iterable):
        ops = tuple(as_complex_matrix(K, "Kraus operator") for K in kraus)
        if not ops:
            raise ValidationError("a quantum operation needs at least one Kraus operator")
        shape = ops[0].shape
        if any(K.shape != shape for K in ops):
            raise DimensionError(
                f"Kraus operators disagree in shape: {[K.shape for K in ops]}"
            )
        total = kraus_sum(ops)
        top = float(np.linalg.eigvalsh(total)[-1])
        if top > 1.0 + ZERO_BLOCK_TOL:
            raise ValidationError(
                f"trace non-increase violated: max eig of sum K^dagger K = {top!r}"
            )
        object.__setattr__(self, "kraus", ops)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def apply(self, R) -> np.ndarray:
        R = as_complex_matrix(R, "R")
        if R.shape != (self.d_in, self.d_in):
            raise DimensionError(
                f"operation expects a {self.d_in}x{self.d_in} block, got {R.shape}"
            )
        out = np.zeros((self.d_out, self.d_out), dtype=np.complex128)
        for K in self.kraus:
            out += K @ R @ K.conj().T
        return out

    @classmethod
    def projection(cls, indices, n: int, compress: bool = True) -> "QuantumOperation":
        """The ideal reduction P_I . P_I onto the modes in ``indices``.

        With ``compress`` the single Kraus operator is |I| x n (output lives on
        the kept modes only); otherwise it is the n x n orthogonal projector.
        """
        I = as_index_set(indices, n)
        idx = I.zero_based()
        if compress:
            K = np.zeros((len(idx), n), dtype=np.complex128)
            K[np.arange(len(idx)), idx] = 1.0
        else:
            K = np.zeros((n, n), dtype=np.complex128)
            K[idx, idx] = 1.0
        return cls([K])


def kraus_sum(ops: Iterable[np.ndarray]) -> np.ndarray:
    """sum_k K^dagger K for a collection of Kraus operators."""
    ops = list(ops)
    d_in = ops[0].shape[1]
    total = np.zeros((d_in, d_in), dtype=np.complex128)
    for K in ops:
        total += K.conj().T @ K
    return total


class SeparabilityVerdict(enum.Enum):
    VIOLATES_NECESSARY = "violates_necessary"
    SEPARABLE_STRICT = "separable_strict"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SeparableDecomposition:
    """Convex split p1 * (block on I) + p2 * (block on the complement).

    ``is_product`` marks the degenerate case p1 * p2 = 0, where only the
    surviving factor is returned and the other block is None.
    """

    p1: float
    R1: np.ndarray | None
    p2: float
    R2: np.ndarray | None
    is_product: bool


def trace_out(s: OneParticleState, indices) -> ReducedState:
    """Trace with respect to the modes in ``indices``; keeps the complement."""
    I = as_index_set(indices, s.n)
    keep = I.complement(s.n)
    idx = keep.zero_based()
    R = s.R[np.ix_(idx, idx)]
    psi = s.psi[idx]
    rho00 = 1.0 - float(np.trace(R).real)
    return ReducedState(state=make_state(rho00, psi, R), retained=keep)


def generalized_reduce(R, operation: QuantumOperation) -> OneParticleState:
    """Non-ideal reduction of a strictly one-particle block R by a quantum operation.

    Returns the state (1 - Tr Phi(R)) (+) Phi(R), the density matrix of a
    subsystem that is not ideally separated from the rest.
    """
    R = as_complex_matrix(R, "R")
    base = make_state(1.0 - float(np.trace(R).real), np.zeros(R.shape[0]), R)
    if not is_strictly_one_particle(base):
        raise ValidationError(
            f"generalized reduction needs a strictly one-particle block: Tr R = "
            f"{np.trace(R).real!r}, expected 1"
        )
    if operation.d_in != R.shape[0]:
        raise DimensionError(
            f"operation acts on dimension {operation.d_in}, block is {R.shape[0]}"
        )
    out = operation.apply(base.R)
    rho00 = 1.0 - float(np.trace(out).real)
    return make_state(rho00, np.zeros(operation.d_out), out)


def schmidt_coefficients(phi: OneParticlePureState, indices) -> np.ndarray:
    """Schmidt coefficients of the embedded pure state across I | complement.

    Closed form: the reduced density matrix after tracing out I acts on the
    two-dimensional span of the kept component (1 (+) P_comp) phi and the
    vacuum, so the coefficients come from a 2x2 eigenproblem. At most two are
    nonzero.
    """
    n = phi.n
    I = as_index_set(indices, n)
    keep = I.complement(n)
    leaked = float(np.sum(np.abs(phi.varphi[I.zero_based()]) ** 2))
    kept_excited = float(np.sqrt(np.sum(np.abs(phi.varphi[keep.zero_based()]) ** 2)))
    c = phi.phi0
    two_level = np.array(
        [
            [abs(c) ** 2 + leaked, c * kept_excited],
            [np.conj(c) * kept_excited, kept_excited**2],
        ],
        dtype=np.complex128,
    )
    w = np.linalg.eigvalsh(two_level)
    coeffs = np.sqrt(np.clip(w, 0.0, None))[::-1]
    return coeffs[coeffs > SUPPORT_TOL]


def pure_state_entangled(phi: OneParticlePureState, indices) -> bool:
    """Entangled across I | complement iff the excited support straddles the cut."""
    n = phi.n
    I = as_index_set(indices, n)
    keep = I.complement(n)
    inside = float(np.linalg.norm(phi.varphi[I.zero_based()]))
    outside = float(np.linalg.norm(phi.varphi[keep.zero_based()]))
    return inside > SUPPORT_TOL and outside > SUPPORT_TOL


def _off_diagonal_block(s: OneParticleState, I: IndexSet, keep: IndexSet) -> float:
    block = s.R[np.ix_(I.zero_based(), keep.zero_based())]
    return float(np.max(np.abs(block))) if block.size else 0.0


def separability_check(s: OneParticleState, indices) -> SeparabilityVerdict:
    """Necessary (and for strictly one-particle states sufficient) separability test.

    A nonzero off-diagonal block P_I R P_comp certifies entanglement of the
    embedded state. A vanishing block certifies separability only in the
    strictly one-particle case; otherwise the test is inconclusive.
    """
    I = as_index_set(indices, s.n)
    keep = I.complement(s.n)
    if _off_diagonal_block(s, I, keep) > ZERO_BLOCK_TOL:
        return SeparabilityVerdict.VIOLATES_NECESSARY
    if is_strictly_one_particle(s):
        return SeparabilityVerdict.SEPARABLE_STRICT
    return SeparabilityVerdict.INCONCLUSIVE


def separable_decomposition(s: OneParticleState, indices) -> SeparableDecomposition:
    """Explicit convex decomposition of a block-diagonal strictly one-particle state.

    p1 = Tr P_I R P_I with the normalized I-block, and likewise for the
    complement. Requires the off-diagonal block to vanish.
    """
    if not is_strictly_one_particle(s):
        raise ValidationError("separable decomposition needs a strictly one-particle state")
    I = as_index_set(indices, s.n)
    keep = I.complement(s.n)
    off = _off_diagonal_block(s, I, keep)
    if off > ZERO_BLOCK_TOL:
        raise ValidationError(
            f"off-diagonal block has magnitude {off:.3e}; state is not block-diagonal"
        )
    inside = s.R[np.ix_(I.zero_based(), I.zero_based())]
    outside = s.R[np.ix_(keep.zero_based(), keep.zero_based())]
    p1 = float(np.trace(inside).real) if inside.size else 0.0
    p2 = float(np.trace(outside).real) if outside.size else 0.0
    if p1 <= SUPPORT_TOL or p2 <= SUPPORT_TOL:
        if p1 > p2:
            return SeparableDecomposition(p1, inside / p1, p2, None, is_product=True)
        return SeparableDecomposition(p1, None, p2, outside / p2, is_product=True)
    return SeparableDecomposition(p1, inside / p1, p2, outside / p2, is_product=False)
