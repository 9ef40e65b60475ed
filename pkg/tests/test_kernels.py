"""Kernel lanes: compiled and numpy implementations must agree with each other
and with independent references."""

import numpy as np
import pytest
import scipy.linalg

from oneparticle import _kernels
from oneparticle.errors import NumericalError
from oneparticle.integrators import StepPolicy, solve_left, solve_pair
from oneparticle.sampling import complex_normal, rng_for

LANES = sorted(_kernels.IMPLEMENTATIONS)


def _static_samples(A, nsteps):
    return np.ascontiguousarray(np.broadcast_to(A, (4 * nsteps + 1,) + A.shape))


def _td_samples(rng, nsteps, n, h):
    ts = 0.25 * h * np.arange(4 * nsteps + 1)
    base = complex_normal(rng, (n, n))
    drift = complex_normal(rng, (n, n))
    A = base[None, :, :] + np.sin(ts)[:, None, None] * drift[None, :, :]
    return np.ascontiguousarray(A)


@pytest.mark.parametrize("lane", LANES)
def test_left_form_matches_expm(lane):
    rng = rng_for(50)
    n, nsteps = 4, 400
    G = complex_normal(rng, (n, n))
    A = 0.5 * (G + G.conj().T) + 0.7 * np.eye(n)
    impl = _kernels.IMPLEMENTATIONS[lane]
    X, err = impl.rk4_left(_static_samples(A, nsteps), np.eye(n, dtype=complex), 1.0 / nsteps)
    ref = scipy.linalg.expm(-A)
    assert np.max(np.abs(X - ref)) <= 1e-11
    assert err <= 1e-12


@pytest.mark.parametrize("lane", LANES)
def test_pair_form_matches_sandwich(lane):
    rng = rng_for(51)
    n, nsteps = 3, 400
    A = complex_normal(rng, (n, n))
    A /= np.linalg.norm(A, 2)
    R0 = complex_normal(rng, (n, n))
    R0 = R0 @ R0.conj().T / n
    impl = _kernels.IMPLEMENTATIONS[lane]
    R, _ = impl.rk4_pair(
        _static_samples(A, nsteps),
        _static_samples(A.conj().T, nsteps),
        R0,
        1.0 / nsteps,
    )
    V = scipy.linalg.expm(-A)
    assert np.max(np.abs(R - V @ R0 @ V.conj().T)) <= 1e-10


def test_lanes_agree_on_time_dependent_left():
    if len(LANES) < 2:
        pytest.skip("compiled lane not built")
    rng = rng_for(52)
    n, nsteps = 5, 300
    A = _td_samples(rng, nsteps, n, 1.0 / nsteps)
    X0 = complex_normal(rng, (n, 2))
    results = {
        lane: _kernels.IMPLEMENTATIONS[lane].rk4_left(A, X0, 1.0 / nsteps)
        for lane in LANES
    }
    (X1, e1), (X2, e2) = results.values()
    assert np.max(np.abs(X1 - X2)) <= 1e-13
    assert abs(e1 - e2) <= 1e-15


def _naive_decay_reference(Hs, Fs, rho0, h, nsteps):
    # same master equation, built from explicit dense jump matrices
    D = rho0.shape[0]

    def rhs(i, rho):
        out = -1j * (Hs[i] @ rho - rho @ Hs[i])
        for v in Fs[i]:
            L = np.zeros((D, D), dtype=complex)
            L[0, :] = v.conj()
            LdL = L.conj().T @ L
            out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
        return out

    rho = rho0.copy()
    for j in range(nsteps):
        b = 4 * j
        k1 = rhs(b, rho)
        k2 = rhs(b + 1, rho + 0.25 * h * k1)
        k3 = rhs(b + 1, rho + 0.25 * h * k2)
        k4 = rhs(b + 2, rho + 0.5 * h * k3)
        rho = rho + (h / 12) * (k1 + 2 * k2 + 2 * k3 + k4)
        k1 = rhs(b + 2, rho)
        k2 = rhs(b + 3, rho + 0.25 * h * k1)
        k3 = rhs(b + 3, rho + 0.25 * h * k2)
        k4 = rhs(b + 4, rho + 0.5 * h * k3)
        rho = rho + (h / 12) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


@pytest.mark.parametrize("lane", LANES)
def test_decay_kernel_matches_dense_jump_matrices(lane):
    rng = rng_for(53)
    n, K, nsteps = 3, 2, 200
    h = 1.0 / nsteps
    D = n + 1
    Hs = np.zeros((4 * nsteps + 1, D, D), dtype=complex)
    G = complex_normal(rng, (n, n))
    Hs[:, 1:, 1:] = 0.5 * (G + G.conj().T)
    Fs = np.zeros((4 * nsteps + 1, K, D), dtype=complex)
    Fs[:, :, 1:] = complex_normal(rng, (K, n))
    v = complex_normal(rng, D)
    v /= np.linalg.norm(v)
    rho0 = np.outer(v, v.conj())
    impl = _kernels.IMPLEMENTATIONS[lane]
    rho, _ = impl.rk4_lindblad_decay(Hs, Fs, rho0, h)
    ref = _naive_decay_reference(Hs, Fs, rho0, h, nsteps)
    assert np.max(np.abs(rho - ref)) <= 1e-12


def test_driver_refines_until_tolerance():
    rng = rng_for(54)
    G = complex_normal(rng, (3, 3))
    A = 20.0 * (G + G.conj().T) / 2 + 40.0 * np.eye(3)  # stiff but solvable

    def sample(ts):
        return np.ascontiguousarray(np.broadcast_to(A, (ts.size, 3, 3)))

    policy = StepPolicy(steps_per_unit=50, step_tol=1e-10, max_refinements=10)
    X, info = solve_left(sample, np.eye(3, dtype=complex), 0.0, 1.0, policy)
    assert info.refinements > 0
    assert np.max(np.abs(X - scipy.linalg.expm(-A))) <= 1e-7


def test_driver_reports_stiffness():
    A = 1e6 * np.eye(2, dtype=complex)

    def sample(ts):
        return np.ascontiguousarray(np.broadcast_to(A, (ts.size, 2, 2)))

    policy = StepPolicy(steps_per_unit=10, step_tol=1e-12, max_refinements=1)
    with np.errstate(all="ignore"), pytest.raises(NumericalError, match="step"):
        solve_left(sample, np.eye(2, dtype=complex), 0.0, 1.0, policy)


def test_driver_catches_overflow_not_silence():
    # overflow to inf/NaN must surface as a numerical error, never as success
    A = 1e12 * np.eye(2, dtype=complex)

    def sample(ts):
        return np.ascontiguousarray(np.broadcast_to(A, (ts.size, 2, 2)))

    policy = StepPolicy(steps_per_unit=2, step_tol=1e-10, max_refinements=2)
    with np.errstate(all="ignore"), pytest.raises(NumericalError):
        solve_left(sample, np.eye(2, dtype=complex), 0.0, 1.0, policy)


def test_zero_time_is_identity():
    def sample(ts):  # pragma: no cover - never called for zero span
        raise AssertionError

    X, info = solve_pair(sample, np.eye(2, dtype=complex), 0.0, 0.0)
    np.testing.assert_array_equal(X, np.eye(2))
    assert info.steps == 0


def test_lane_selection():
    assert _kernels.get_implementation("python").IMPLEMENTATION == "python"
    auto = _kernels.get_implementation("auto")
    assert auto.IMPLEMENTATION in ("python", "cython")
    with pytest.raises(RuntimeError):
        _kernels.get_implementation("fortran")
