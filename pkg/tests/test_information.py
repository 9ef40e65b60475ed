"""Entropies, the reduced-space mutual-information identity, decay curve."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oneparticle import oracle
from oneparticle.errors import DomainError, ValidationError
from oneparticle.information import (
    ClassicalDistribution,
    entropy_scalar,
    markov_decay_curve,
    mutual_information,
    mutual_information_instrument,
    shannon_entropy,
    von_neumann_entropy,
)
from oneparticle.reduction import QuantumOperation, trace_out
from oneparticle.sampling import (
    random_density_matrix,
    random_instrument,
    random_zero_coherence_state,
    rng_for,
)
from oneparticle.states import assemble, from_excited_block, make_state, vacuum_state


def test_entropy_scalar_pinned_values():
    assert entropy_scalar(0.0) == 0.0
    assert entropy_scalar(1.0) == 0.0
    assert entropy_scalar(0.5) == pytest.approx(math.log(2) / 2)
    assert entropy_scalar(1 / math.e) == pytest.approx(1 / math.e)


def test_entropy_scalar_clipping_and_domain():
    assert entropy_scalar(-1e-13) == 0.0
    with pytest.raises(DomainError):
        entropy_scalar(-1e-11)
    with pytest.raises(DomainError):
        entropy_scalar(1.0 + 1e-11)


@given(st.floats(min_value=0.0, max_value=1.0))
def test_entropy_scalar_nonnegative_and_bounded(x):
    value = entropy_scalar(x)
    assert 0.0 <= value <= 1 / math.e + 1e-15


def test_von_neumann_pinned():
    v = np.array([0.6, 0.8j])
    assert von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(math.log(2))


def test_von_neumann_matches_eigenvalue_sum():
    rng = rng_for(40)
    rho = random_density_matrix(rng, 4)
    expected = sum(entropy_scalar(x) for x in np.clip(np.linalg.eigvalsh(rho), 0, 1))
    assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-12)


def test_shannon_entropy():
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2))
    rng = rng_for(41)
    p = rng.dirichlet([1.0] * 3)
    merged = shannon_entropy([p[0] + p[2], p[1]])
    assert merged == pytest.approx(entropy_scalar(p[0] + p[2]) + entropy_scalar(p[1]))


def test_classical_distribution_validation():
    with pytest.raises(ValidationError):
        ClassicalDistribution([0.5, 0.2])
    with pytest.raises(ValidationError):
        ClassicalDistribution([1.5, -0.5])
    d = ClassicalDistribution([0.5, -1e-13, 0.5])
    assert d.probabilities[1] == 0.0


def test_mutual_information_vacuum_is_zero():
    rep = mutual_information(vacuum_state(2), [1], [2])
    assert rep.total == pytest.approx(0.0, abs=1e-12)


def test_mutual_information_diagonal_example():
    s = make_state(0.0, np.zeros(2), np.diag([0.5, 0.5]))
    rep = mutual_information(s, [1], [2])
    assert rep.quantum_term == pytest.approx(0.0, abs=1e-12)
    assert rep.classical_term == pytest.approx(math.log(2))
    assert rep.total == pytest.approx(math.log(2))


def test_mutual_information_coherent_example_with_oracle():
    s = make_state(0.0, np.zeros(2), np.full((2, 2), 0.5))
    rep = mutual_information(s, [1], [2])
    assert rep.quantum_term == pytest.approx(math.log(2), abs=1e-12)
    assert rep.classical_term == pytest.approx(math.log(2), abs=1e-12)
    assert rep.total == pytest.approx(2 * math.log(2), abs=1e-12)
    full = oracle.embed_density(s)
    SA = von_neumann_entropy(oracle.full_partial_trace(full, [2]).rho_hat)
    SB = von_neumann_entropy(oracle.full_partial_trace(full, [1]).rho_hat)
    SAB = von_neumann_entropy(full.rho_hat)
    assert rep.total == pytest.approx(SA + SB - SAB, abs=1e-10)


def test_lemma_identity_random_states():
    rng = rng_for(42)
    for _ in range(8):
        n = int(rng.integers(2, 7))
        s = random_zero_coherence_state(rng, n)
        size = int(rng.integers(1, n))
        I1 = sorted(int(x) for x in rng.choice(np.arange(1, n + 1), size=size, replace=False))
        I2 = [i for i in range(1, n + 1) if i not in I1]
        rep = mutual_information(s, I1, I2)
        lhs = (
            von_neumann_entropy(assemble(trace_out(s, I2).state))
            + von_neumann_entropy(assemble(trace_out(s, I1).state))
            - von_neumann_entropy(assemble(s))
        )
        assert abs(rep.total - lhs) <= 1e-10
        assert abs(rep.total - (rep.quantum_term + rep.classical_term)) <= 1e-10
        assert rep.total >= -1e-10


def test_mutual_information_rejects_bad_input():
    s = make_state(0.0, np.zeros(3), np.diag([0.4, 0.3, 0.3]))
    with pytest.raises(ValidationError, match="partition"):
        mutual_information(s, [1], [2])
    with pytest.raises(ValidationError, match="partition"):
        mutual_information(s, [1, 2], [2, 3])
    coherent = make_state(0.5, np.array([0.3, 0, 0]), np.diag([0.4, 0.05, 0.05]))
    with pytest.raises(ValidationError, match="psi"):
        mutual_information(coherent, [1], [2, 3])


def test_strictly_one_particle_classical_term_is_plain_entropy():
    rng = rng_for(43)
    s = from_excited_block(random_density_matrix(rng, 4))
    rep = mutual_information(s, [1, 3], [2, 4])
    assert rep.classical_term == pytest.approx(shannon_entropy(rep.pi), abs=1e-12)


def test_instrument_reduces_to_projections():
    rng = rng_for(44)
    s = random_zero_coherence_state(rng, 4)
    rep = mutual_information(s, [2], [1, 3, 4])
    rep_i = mutual_information_instrument(
        s,
        QuantumOperation.projection([2], 4, compress=False),
        QuantumOperation.projection([1, 3, 4], 4, compress=False),
    )
    assert rep_i.total == pytest.approx(rep.total, abs=1e-12)
    assert rep_i.quantum_term == pytest.approx(rep.quantum_term, abs=1e-12)


def test_instrument_partial_projection_probabilities():
    q = 0.3
    R = np.diag([0.5, 0.3, 0.2])
    s = from_excited_block(R)
    P1 = np.zeros((3, 3))
    P1[0, 0] = 1.0
    P2 = np.eye(3) - P1
    phi1 = QuantumOperation([np.sqrt(q) * P1])
    phi2 = QuantumOperation([np.sqrt(1 - q) * P1, P2])
    rep = mutual_information_instrument(s, phi1, phi2)
    p0, p1, p2 = rep.pi.probabilities
    assert p1 == pytest.approx(q * 0.5)
    assert p2 == pytest.approx((1 - q) * 0.5 + 0.5)
    assert p0 == pytest.approx(0.0, abs=1e-14)


def test_instrument_additivity_random():
    rng = rng_for(45)
    s = random_zero_coherence_state(rng, 4)
    phi1, phi2 = random_instrument(rng, 4)
    rep = mutual_information_instrument(s, phi1, phi2)
    q = (
        von_neumann_entropy(phi1.apply(s.R))
        + von_neumann_entropy(phi2.apply(s.R))
        - von_neumann_entropy(s.R)
    )
    p1 = float(np.trace(phi1.apply(s.R)).real)
    p2 = float(np.trace(phi2.apply(s.R)).real)
    cl = (
        shannon_entropy([s.rho00 + p2, p1])
        + shannon_entropy([s.rho00 + p1, p2])
        - shannon_entropy([s.rho00, p1, p2])
    )
    assert rep.total == pytest.approx(q + cl, abs=1e-10)


def test_instrument_requires_trace_preserving_sum():
    s = from_excited_block(np.diag([0.5, 0.5]))
    quarter = QuantumOperation([0.5 * np.eye(2)])
    with pytest.raises(ValidationError, match="trace-preserving"):
        mutual_information_instrument(s, quarter, quarter)


def test_markov_curve_pinned_points():
    assert markov_decay_curve(1.0, [0.0])[0, 1] == 0.0
    peak = markov_decay_curve(2.0, [math.log(2) / 2.0])[0, 1]
    assert peak == pytest.approx(math.log(2), abs=1e-14)
    # scalar oracle evaluation at gamma = 1, t = 3
    p = math.exp(-3.0)
    expected = entropy_scalar(p) + entropy_scalar(1 - p)
    assert markov_decay_curve(1.0, [3.0])[0, 1] == pytest.approx(expected, abs=1e-14)


def test_markov_curve_shape_invariants():
    gamma = 0.7
    grid = np.linspace(0.0, 50.0 / gamma, 4001)
    curve = markov_decay_curve(gamma, grid)
    values = curve[:, 1]
    assert values.min() >= 0.0
    assert values[0] <= 1e-8 and values[-1] <= 1e-8
    k = int(np.argmax(values))
    assert abs(grid[k] - math.log(2) / gamma) <= grid[1] - grid[0]
    assert values[k] <= math.log(2) + 1e-12


def test_markov_curve_rejects_bad_input():
    with pytest.raises(DomainError):
        markov_decay_curve(0.0, [0.0, 1.0])
    with pytest.raises(DomainError):
        markov_decay_curve(1.0, [-0.5, 1.0])
