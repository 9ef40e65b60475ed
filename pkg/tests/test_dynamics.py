"""Propagator dynamics against closed forms and the direct master equation."""

import math

import numpy as np
import pytest

from oneparticle.dynamics import (
    GKSLModel,
    accretive_matrix,
    evolve_state,
    evolve_state_grid,
    homogeneous_ground_population,
    integrate_direct,
    propagate,
    propagate_grid,
    pure_state_evolution,
)
from oneparticle.errors import DomainError, NumericalError, ValidationError
from oneparticle.integrators import StepPolicy
from oneparticle.sampling import (
    complex_normal,
    random_model,
    random_one_particle_state,
    random_strictly_one_particle_state,
    rng_for,
)
from oneparticle.states import assemble, from_excited_block, vacuum_state


def test_accretive_matrix_scalar_examples():
    m = GKSLModel(1, None, [[math.sqrt(2.0)]])
    np.testing.assert_allclose(accretive_matrix(m, 0.0), [[1.0]])
    omega = 1.3
    m2 = GKSLModel(1, [[omega]], [[math.sqrt(2.0)]])
    np.testing.assert_allclose(accretive_matrix(m2, 0.0), [[1.0 + 1j * omega]])


def test_accretive_matrix_is_accretive_for_random_models():
    rng = rng_for(60)
    for _ in range(5):
        model = random_model(rng, 4, 3, time_dependent=True)
        A = accretive_matrix(model, 0.7)
        assert np.linalg.eigvalsh(A + A.conj().T)[0] >= -1e-12


def test_propagate_scalar_decay():
    model = GKSLModel.homogeneous(1, 2.0)
    V = propagate(model, 1.0)
    assert V.matrix[0, 0] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_propagate_zero_time_identity():
    rng = rng_for(61)
    model = random_model(rng, 3, 2)
    np.testing.assert_array_equal(propagate(model, 0.0).matrix, np.eye(3))


def test_propagate_ode_matches_expm():
    rng = rng_for(62)
    model = random_model(rng, 4, 3)
    for t in (0.5, 2.0):
        V1 = propagate(model, t, method="expm").matrix
        V2 = propagate(model, t, method="ode").matrix
        assert np.max(np.abs(V1 - V2)) <= 1e-9


def test_evolve_state_vacuum_fixed_point():
    rng = rng_for(63)
    model = random_model(rng, 3, 2)
    out = evolve_state(vacuum_state(3), model, 2.0)
    assert out.rho00 == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(out.R)) <= 1e-12


def test_evolve_state_scalar_closed_form():
    model = GKSLModel.homogeneous(1, 1.0)
    s0 = from_excited_block(np.array([[1.0]]))
    s1 = evolve_state(s0, model, 1.0)
    assert s1.R[0, 0].real == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert s1.rho00 == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
    direct = integrate_direct(s0, model, 1.0)
    assert direct.rho00 == pytest.approx(s1.rho00, abs=1e-10)


def test_evolve_matches_direct_integration():
    rng = rng_for(64)
    model = random_model(rng, 4, 3)
    s0 = random_one_particle_state(rng, 4)
    for t in (0.5, 1.0, 2.0):
        a = assemble(evolve_state(s0, model, t))
        b = assemble(integrate_direct(s0, model, t))
        assert np.max(np.abs(a - b)) <= 1e-8


def test_evolve_matches_direct_time_dependent():
    rng = rng_for(65)
    model = random_model(rng, 3, 2, time_dependent=True)
    s0 = random_one_particle_state(rng, 3)
    a = assemble(evolve_state(s0, model, 1.4))
    b = assemble(integrate_direct(s0, model, 1.4))
    assert np.max(np.abs(a - b)) <= 1e-8


def test_pure_state_evolution_basics():
    model = GKSLModel.homogeneous(1, 2.0)
    assert pure_state_evolution(np.zeros(1), model, 1.0)[0] == 0.0
    out = pure_state_evolution(np.array([1.0 + 0j]), model, 1.0)
    assert out[0] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_pure_state_outer_product_satisfies_sandwich_equation():
    rng = rng_for(66)
    model = random_model(rng, 3, 2, time_dependent=True)
    psi0 = complex_normal(rng, 3)
    psi0 /= 2.0 * np.linalg.norm(psi0)
    t, eps = 0.8, 1e-4
    psis = {
        dt: pure_state_evolution(psi0, model, t + dt) for dt in (-eps, 0.0, eps)
    }
    outer = {dt: np.outer(v, v.conj()) for dt, v in psis.items()}
    derivative = (outer[eps] - outer[-eps]) / (2 * eps)
    A = accretive_matrix(model, t)
    residual = derivative + A @ outer[0.0] + outer[0.0] @ A.conj().T
    assert np.max(np.abs(residual)) <= 1e-7


def test_contraction_and_semigroup_for_static_models():
    rng = rng_for(67)
    model = random_model(rng, 4, 2)
    norms = [propagate(model, float(t)).norm() for t in np.linspace(0, 3, 7)]
    assert all(v <= 1 + 1e-9 for v in norms)
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
    Vt = propagate(model, 0.9).matrix
    Vs = propagate(model, 1.3).matrix
    Vts = propagate(model, 2.2).matrix
    assert np.max(np.abs(Vts - Vt @ Vs)) <= 1e-8


def test_trace_and_positivity_preserved():
    rng = rng_for(68)
    model = random_model(rng, 4, 3, time_dependent=True)
    s0 = random_one_particle_state(rng, 4)
    for t in (0.6, 1.8):
        M = assemble(evolve_state(s0, model, t))
        assert abs(np.trace(M).real - 1.0) <= 1e-10
        assert np.linalg.eigvalsh(M)[0] >= -1e-8


def test_homogeneous_population_pinned_values():
    assert homogeneous_ground_population(1.0, 0.0, math.log(2)) == pytest.approx(0.5)
    assert homogeneous_ground_population(lambda t: 5.0, 1.0, 3.0) == 1.0
    with pytest.raises(DomainError):
        homogeneous_ground_population(1.0, 1.5, 1.0)
    with pytest.raises(ValidationError):
        homogeneous_ground_population(lambda t: -1.0, 0.5, 1.0)


def test_homogeneous_closed_form_matches_full_dynamics():
    def gamma(t):
        return 1.0 + math.sin(t)

    model = GKSLModel.homogeneous(3, gamma)
    rng = rng_for(69)
    s0 = random_strictly_one_particle_state(rng, 3)
    s2 = evolve_state(s0, model, 2.0)
    closed = homogeneous_ground_population(gamma, 0.0, 2.0)
    assert abs(s2.rho00 - closed) <= 1e-7


def test_homogeneous_trace_identity_and_monotone_filling():
    def gamma(t):
        return 0.5 + 0.5 * math.cos(t) ** 2

    model = GKSLModel.homogeneous(2, gamma)
    s0 = from_excited_block(np.diag([0.7, 0.3]))
    grid = np.linspace(0.0, 3.0, 16)
    states = evolve_state_grid(s0, model, grid)
    import scipy.integrate

    prev = -1.0
    for t, s_t in zip(grid, states):
        integral, _ = scipy.integrate.quad(gamma, 0, float(t), epsabs=1e-12)
        assert abs(s_t.excited_weight() - math.exp(-integral)) <= 1e-8
        assert s_t.rho00 >= prev - 1e-12
        prev = s_t.rho00


def test_constant_rate_norm_bound():
    model = GKSLModel.homogeneous(3, 0.8, hamiltonian=np.diag([0.1, -0.4, 0.9]))
    for t in (0.0, 1.0, 2.5):
        nrm = propagate(model, t).norm()
        assert nrm <= math.exp(-0.4 * t) * (1 + 1e-8)


def test_propagate_grid_matches_single_shots():
    rng = rng_for(70)
    model = random_model(rng, 3, 2, time_dependent=True)
    grid = [0.0, 0.3, 0.3, 1.1]
    Vs = propagate_grid(model, grid, StepPolicy())
    for t, V in zip(grid, Vs):
        single = propagate(model, t)
        assert np.max(np.abs(V.matrix - single.matrix)) <= 1e-9


def test_model_validation():
    with pytest.raises(ValidationError):
        GKSLModel(2, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValidationError):
        GKSLModel.homogeneous(2, -1.0)
    with pytest.raises(DomainError):
        propagate(GKSLModel.homogeneous(1, 1.0), -0.5)
    model = GKSLModel(1, lambda t: [[t * 1j]], None)  # becomes non-Hermitian at t > 0
    with pytest.raises(ValidationError):
        propagate(model, 1.0, method="ode")


def test_decay_vector_count_must_not_change():
    def vectors(t):
        k = 2 if t < 0.5 else 3
        return np.ones((k, 2))

    model = GKSLModel(2, None, vectors)
    with pytest.raises(Exception):
        propagate(model, 1.0, method="ode")


def test_piecewise_constant_coefficients_integrate_exactly():
    # a rate table jumping mid-run: integrations must split at the jump so
    # the step-doubling control only ever sees smooth pieces
    def gamma(t):
        return 0.5 if t < 0.73 else 2.0

    gamma.breakpoints = (0.73,)
    model = GKSLModel.homogeneous(2, gamma)
    assert model.breakpoints == (0.73,)
    s0 = from_excited_block(np.diag([0.6, 0.4]))
    for t in (0.5, 0.73, 1.2):
        s_t = evolve_state(s0, model, t)
        expected = homogeneous_ground_population(gamma, 0.0, t)
        assert abs(s_t.rho00 - expected) <= 1e-9
        direct = integrate_direct(s0, model, t)
        assert abs(direct.rho00 - expected) <= 1e-9


def test_stiff_model_reports_step_size():
    model = GKSLModel.homogeneous(1, 1e8)
    policy = StepPolicy(steps_per_unit=10, step_tol=1e-14, max_refinements=1)
    with pytest.raises(NumericalError, match="step"):
        propagate(model, 1.0, policy, method="ode")
