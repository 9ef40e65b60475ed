"""Seeded random states, models, and instruments for tests and verification.

Everything takes an explicit ``numpy.random.Generator`` so runs are
reproducible; ``rng_for`` derives independent streams from (seed, labels)
tuples, which keeps individual checks insensitive to execution order.
"""

from __future__ import annotations

import numpy as np

from .dynamics import GKSLModel
from .reduction import QuantumOperation
from .states import (
    OneParticlePureState,
    OneParticleState,
    disassemble,
    from_excited_block,
    make_pure_state,
    make_state,
)


def rng_for(seed: int, *labels: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *map(int, labels)])


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Ginibre draw, Hermitized."""
    G = complex_normal(rng, (n, n))
    return scale * 0.5 * (G + G.conj().T)


def random_density_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    G = complex_normal(rng, (d, d))
    W = G @ G.conj().T
    return W / np.trace(W).real


def random_one_particle_state(rng: np.random.Generator, n: int) -> OneParticleState:
    return disassemble(random_density_matrix(rng, n + 1))


def random_zero_coherence_state(rng: np.random.Generator, n: int) -> OneParticleState:
    """Random state with psi = 0 (vacuum block decoupled by pinching)."""
    rho = random_density_matrix(rng, n + 1)
    return make_state(float(rho[0, 0].real), np.zeros(n), rho[1:, 1:])


def random_strictly_one_particle_state(rng: np.random.Generator, n: int) -> OneParticleState:
    return from_excited_block(random_density_matrix(rng, n))


def random_pure_state(rng: np.random.Generator, n: int) -> OneParticlePureState:
    v = complex_normal(rng, n + 1)
    v /= np.linalg.norm(v)
    return make_pure_state(v[0], v[1:])


def random_decay_vectors(
    rng: np.random.Generator, n: int, K: int, scale: float = 1.0
) -> np.ndarray:
    """K unit-norm complex vectors times ``scale`` (rows are the f_l)."""
    F = complex_normal(rng, (K, n))
    norms = np.linalg.norm(F, axis=1, keepdims=True)
    return scale * F / norms


def random_model(
    rng: np.random.Generator,
    n: int,
    K: int,
    hamiltonian_scale: float = 1.0,
    decay_scale: float = 1.0,
    time_dependent: bool = False,
) -> GKSLModel:
    """Random zero-temperature model, optionally with smooth time dependence."""
    H0 = random_hermitian(rng, n, hamiltonian_scale)
    F0 = random_decay_vectors(rng, n, K, decay_scale)
    if not time_dependent:
        return GKSLModel(n, H0, F0)
    H1 = random_hermitian(rng, n, 0.5 * hamiltonian_scale)
    w1, w2 = rng.uniform(0.5, 2.0, size=2)

    def hamiltonian(t: float) -> np.ndarray:
        return H0 + np.sin(w1 * t) * H1

    def decay(t: float) -> np.ndarray:
        return (1.0 + 0.5 * np.sin(w2 * t)) * F0

    return GKSLModel(n, hamiltonian, decay)


def random_instrument(
    rng: np.random.Generator, n: int, kraus_counts: tuple[int, int] = (2, 2)
) -> tuple[QuantumOperation, QuantumOperation]:
    """A binary instrument: two operations whose Kraus blocks form an isometry."""
    k1, k2 = kraus_counts
    total = k1 + k2
    G = complex_normal(rng, (total * n, n))
    W, _ = np.linalg.qr(G)
    blocks = [W[i * n : (i + 1) * n, :] for i in range(total)]
    return QuantumOperation(blocks[:k1]), QuantumOperation(blocks[k1:])


def random_parity_preserving_density(rng: np.random.Generator, n_modes: int) -> np.ndarray:
    """Random fermionic density matrix commuting with total parity.

    Pinching a Ginibre density matrix onto the even/odd sectors keeps it
    positive with unit trace and kills all superselection-violating moments.
    """
    D = 2**n_modes
    rho = random_density_matrix(rng, D)
    parity = np.array([bin(i).count("1") % 2 for i in range(D)])
    mask = parity[:, None] == parity[None, :]
    return np.where(mask, rho, 0.0)
