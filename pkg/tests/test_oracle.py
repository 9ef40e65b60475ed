"""Full tensor-space machinery: embeddings, operators, traces, integration."""

import math
import warnings

import numpy as np
import pytest

from oneparticle import oracle
from oneparticle.dynamics import GKSLModel, accretive_matrix, evolve_state
from oneparticle.errors import DimensionGuardError, NumericalError, ValidationError
from oneparticle.sampling import (
    random_model,
    random_one_particle_state,
    random_pure_state,
    rng_for,
)
from oneparticle.states import assemble, make_pure_state


def test_embed_pure_basis_strings():
    vac = oracle.embed_pure(make_pure_state(1.0, np.zeros(2)))
    assert vac[0] == 1.0 and np.count_nonzero(vac) == 1
    one = oracle.embed_pure(make_pure_state(0.0, np.array([1.0, 0.0])))
    # |1> -> |10>, flat index 2 in the fixed row-major layout
    assert one[2] == 1.0 and np.count_nonzero(one) == 1


def test_embed_pure_preserves_inner_products():
    rng = rng_for(90)
    a = random_pure_state(rng, 4)
    b = random_pure_state(rng, 4)
    lhs = np.vdot(oracle.embed_pure(a), oracle.embed_pure(b))
    rhs = np.vdot(a.amplitudes(), b.amplitudes())
    assert abs(lhs - rhs) <= 1e-12


def test_embed_density_examples_and_spectrum():
    rng = rng_for(91)
    s = random_one_particle_state(rng, 3)
    full = oracle.embed_density(s)
    assert full.trace() == pytest.approx(1.0, abs=1e-12)
    small = np.linalg.eigvalsh(assemble(s))
    big = np.linalg.eigvalsh(full.rho_hat)
    np.testing.assert_allclose(big[-4:], small, atol=1e-10)
    assert np.max(np.abs(big[:-4])) <= 1e-12
    block = oracle.one_particle_block(full)
    np.testing.assert_allclose(block, assemble(s), atol=1e-14)


def test_qubit_operators():
    ops = oracle.build_operators("qubit", 1)
    np.testing.assert_array_equal(ops.lowering[0], [[0, 1], [0, 0]])


def test_fermion_anticommutation_exact():
    ops = oracle.build_operators("fermion", 3)
    a = ops.lowering
    adag = ops.raising
    for i in range(3):
        for j in range(3):
            anti = a[i] @ adag[j] + adag[j] @ a[i]
            expected = np.eye(8) if i == j else np.zeros((8, 8))
            assert np.max(np.abs(anti - expected)) <= 1e-13
            zero = a[i] @ a[j] + a[j] @ a[i]
            assert np.max(np.abs(zero)) <= 1e-13


def test_boson_number_operator_and_ccr():
    ops = oracle.build_operators("boson", 1, boson_cutoff=4)
    a = ops.lowering[0]
    np.testing.assert_allclose(a.conj().T @ a, np.diag([0, 1, 2, 3.0]), atol=1e-13)
    comm = a @ a.conj().T - a.conj().T @ a
    np.testing.assert_allclose(comm[:3, :3], np.eye(3), atol=1e-13)


def test_ladder_action_on_vacuum():
    for kind in ("qubit", "boson", "fermion"):
        ops = oracle.build_operators(kind, 2, boson_cutoff=3)
        D = ops.dimension
        vac = np.zeros(D)
        vac[0] = 1.0
        for l in range(2):
            up = ops.raising[l] @ vac
            assert np.linalg.norm(up) == pytest.approx(1.0, abs=1e-13)
            down = ops.lowering[l] @ up
            np.testing.assert_allclose(down, vac, atol=1e-13)


def test_vacuum_is_stationary_under_dynamics():
    rng = rng_for(92)
    model = random_model(rng, 2, 2)
    ops = oracle.build_operators("qubit", 2)
    vac = np.zeros(4)
    vac[0] = 1.0
    full0 = oracle.density_from_vector(vac, (2, 2))
    out = oracle.integrate_second_quantized(full0, model, ops, 1.0)
    assert np.max(np.abs(out.rho_hat - full0.rho_hat)) <= 1e-12


def test_second_quantized_roundtrip():
    rng = rng_for(93)
    n = 4
    model = random_model(rng, n, 3, time_dependent=True)
    s0 = random_one_particle_state(rng, n)
    ops = oracle.build_operators("qubit", n)
    full0 = oracle.embed_density(s0)
    full_t = oracle.integrate_second_quantized(full0, model, ops, 1.2)
    block = oracle.one_particle_block(full_t)
    s_t = evolve_state(s0, model, 1.2)
    assert np.max(np.abs(block - assemble(s_t))) <= 1e-8


def test_second_quantized_roundtrip_piecewise_model():
    rng = rng_for(101)
    n = 2
    H0 = np.diag([0.4, -0.2]).astype(complex)

    def gamma(t):
        return 0.4 if t < 0.6 else 1.5

    gamma.breakpoints = (0.6,)
    model = GKSLModel.homogeneous(n, gamma, hamiltonian=H0)
    s0 = random_one_particle_state(rng, n)
    ops = oracle.build_operators("qubit", n)
    full_t = oracle.integrate_second_quantized(oracle.embed_density(s0), model, ops, 1.0)
    s_t = evolve_state(s0, model, 1.0)
    assert np.max(np.abs(oracle.one_particle_block(full_t) - assemble(s_t))) <= 1e-10


def test_fermion_normal_moments_obey_their_equation():
    rng = rng_for(94)
    n = 2
    ops = oracle.build_operators("fermion", n)
    model = random_model(rng, n, 2)
    from oneparticle.sampling import random_parity_preserving_density

    full0 = oracle.make_full_state((2,) * n, random_parity_preserving_density(rng, n))
    t, eps = 0.9, 1e-4

    def Y_at(time):
        ft = oracle.integrate_second_quantized(full0, model, ops, time)
        return oracle.moments_from_full(ft, ops).Y

    dY = (Y_at(t + eps) - Y_at(t - eps)) / (2 * eps)
    A = accretive_matrix(model, t)
    residual = dY + A.conj() @ Y_at(t) + Y_at(t) @ A.T
    assert np.max(np.abs(residual)) <= 1e-7


def test_full_partial_trace_product_state():
    full = oracle.density_from_vector(oracle.fock_vector([1, 0], (2, 2)), (2, 2))
    reduced = oracle.full_partial_trace(full, [2])
    np.testing.assert_allclose(reduced.rho_hat, [[0, 0], [0, 1.0]], atol=1e-14)
    assert reduced.mode_dims == (2,)


def test_full_partial_trace_matches_structural_formula():
    # the reduced matrix equals rho restricted to the kept strings plus the
    # traced populations collected on the vacuum string
    rng = rng_for(95)
    n = 4
    s = random_one_particle_state(rng, n)
    full = oracle.embed_density(s)
    I = [2, 4]
    kept = [1, 3]
    brute = oracle.full_partial_trace(full, I)
    M = assemble(s)
    closed = np.zeros((4, 4), dtype=complex)
    idx = [0, 2, 1]  # vacuum, |1> -> |10> (index 2), |3> -> |01> (index 1)
    keep_rows = [0] + kept
    closed[np.ix_(idx, idx)] = M[np.ix_(keep_rows, keep_rows)]
    closed[0, 0] += sum(M[l, l].real for l in I)
    assert np.max(np.abs(brute.rho_hat - closed)) <= 1e-12


def test_full_partial_trace_keeps_trace():
    rng = rng_for(96)
    from oneparticle.sampling import random_density_matrix

    rho = random_density_matrix(rng, 8)
    full = oracle.make_full_state((2, 2, 2), rho)
    out = oracle.full_partial_trace(full, [1, 3])
    assert out.trace() == pytest.approx(full.trace(), abs=1e-12)


def test_schmidt_embedded_examples():
    vac = oracle.embed_pure(make_pure_state(1.0, np.zeros(3)))
    sv = oracle.schmidt(vac, [1], (2, 2, 2))
    assert sv[0] == pytest.approx(1.0) and np.max(sv[1:]) <= 1e-14
    phi = make_pure_state(0.0, np.array([1.0, 1.0]) / math.sqrt(2))
    sv = oracle.schmidt(oracle.embed_pure(phi), [1], (2, 2))
    np.testing.assert_allclose(sv[:2], [1 / math.sqrt(2)] * 2, atol=1e-14)


def test_schmidt_rank_at_most_two():
    rng = rng_for(97)
    for _ in range(5):
        n = int(rng.integers(2, 7))
        phi = random_pure_state(rng, n)
        vec = oracle.embed_pure(phi)
        for size in range(1, n):
            I = sorted(int(x) for x in rng.choice(np.arange(1, n + 1), size=size, replace=False))
            sv = oracle.schmidt(vec, I, (2,) * n)
            assert np.sum(sv > 1e-10) <= 2


def test_moments_from_full_examples():
    ops = oracle.build_operators("boson", 1, boson_cutoff=8)
    alpha = np.array([0.5 - 0.2j])
    full = oracle.density_from_vector(oracle.coherent_vector(alpha, 8), (8,))
    ms = oracle.moments_from_full(full, ops)
    assert np.max(np.abs(ms.m - alpha)) <= 1e-6
    assert np.max(np.abs(ms.Y)) <= 1e-6
    assert np.max(np.abs(ms.Z)) <= 1e-6

    fops = oracle.build_operators("fermion", 2)
    occ = oracle.density_from_vector(oracle.fock_vector([1, 0], (2, 2)), (2, 2))
    ms = oracle.moments_from_full(occ, fops)
    np.testing.assert_array_equal(ms.Y, np.diag([1.0, 0.0]))
    np.testing.assert_array_equal(ms.Z, np.zeros((2, 2)))
    np.testing.assert_array_equal(ms.m, np.zeros(2))


def test_leakage_monitor_and_error():
    # cutoff 2 coherent state has half its mass on the top level
    rng = rng_for(98)
    ops = oracle.build_operators("boson", 1, boson_cutoff=2)
    vec = oracle.coherent_vector([1.0], 2)
    full0 = oracle.density_from_vector(vec, (2,))
    assert oracle.top_level_leakage(full0) > 0.1
    model = random_model(rng, 1, 1)
    with pytest.raises(NumericalError, match="leakage"):
        oracle.integrate_second_quantized(full0, model, ops, 0.1)


def test_leakage_warning_between_thresholds():
    ops = oracle.build_operators("boson", 1, boson_cutoff=6)
    amps = np.zeros(6, dtype=complex)
    amps[0] = 1.0
    amps[5] = math.sqrt(1e-6)
    amps /= np.linalg.norm(amps)
    full0 = oracle.density_from_vector(amps, (6,))
    model = random_model(rng_for(99), 1, 1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        oracle.integrate_second_quantized(full0, model, ops, 0.05)
    assert any("leakage" in str(w.message) for w in caught)


def test_dimension_guard():
    with pytest.raises(DimensionGuardError):
        oracle.build_operators("qubit", 15)
    with pytest.raises(DimensionGuardError):
        oracle.build_operators("boson", 9, boson_cutoff=6)
    oracle.check_dimension_guard((2,) * 14)  # exactly at the cap


def test_full_state_validation():
    with pytest.raises(ValidationError):
        oracle.make_full_state((2,), np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(ValidationError):
        oracle.make_full_state((2,), np.diag([0.9, 0.9]))
    with pytest.raises(ValidationError):
        oracle.make_full_state((2,), np.diag([1.5, -0.5]))
