"""Fixed-step RK4 drivers with step-doubling error control.

The drivers own the stepping policy: they sample the time-dependent
coefficients on the quarter-step grid a chunk at a time (bounding memory),
hand the samples to the selected kernel lane, and restart the whole run with
twice as many steps whenever the worst per-step doubling estimate exceeds the
tolerance. Everything is deterministic for a given policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NumericalError, ValidationError


@dataclass(frozen=True)
class StepPolicy:
    """Stepping parameters shared by all linear-ODE integrations.

    ``implementation`` picks the kernel lane ("auto" prefers the compiled
    extension and falls back to numpy).
    """

    steps_per_unit: int = 1000
    step_tol: float = 1e-10
    max_refinements: int = 8
    chunk_steps: int = 512
    implementation: str = "auto"


DEFAULT_POLICY = StepPolicy()


@dataclass(frozen=True)
class IntegrationInfo:
    steps: int
    step_size: float
    max_step_error: float
    refinements: int


def _initial_steps(span: float, policy: StepPolicy) -> int:
    return max(1, math.ceil(span * policy.steps_per_unit))


def _quarter_times(t0: float, h: float, first_step: int, nsteps: int) -> np.ndarray:
    return t0 + h * (first_step + 0.25 * np.arange(4 * nsteps + 1))


def require_finite(A: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(A.view(float))):
        raise ValidationError(f"{what}: non-finite coefficient sample encountered")
    return A


def split_interval(t0: float, t1: float, breakpoints) -> list[tuple[float, float]]:
    """Subintervals of [t0, t1] cut at every interior breakpoint."""
    cuts = sorted({float(b) for b in breakpoints if t0 < float(b) < t1})
    edges = [t0, *cuts, t1]
    return list(zip(edges[:-1], edges[1:]))


def clamp_before(sample, end: float, span: float):
    """Pull samples at exactly ``end`` just inside the piece.

    Piecewise-constant coefficient tables are right-continuous, so the value
    AT a jump time belongs to the next piece; a step that ends exactly on the
    jump must nevertheless see the old coefficients at its right endpoint.
    """
    delta = max(abs(end), span, 1.0) * 1e-13

    def clamped(ts: np.ndarray):
        return sample(np.minimum(ts, end - delta))

    return clamped


def _run_refined(run_once, t0: float, t1: float, policy: StepPolicy, what: str):
    span = t1 - t0
    if span < 0:
        raise DomainError(f"{what}: integration interval reversed ({t0} > {t1})")
    nsteps = _initial_steps(span, policy)
    err = math.inf
    for refinement in range(policy.max_refinements + 1):
        X, err = run_once(nsteps)
        if err <= policy.step_tol:
            return X, IntegrationInfo(nsteps, span / nsteps, err, refinement)
        nsteps *= 2
    raise NumericalError(
        f"{what}: step-doubling estimate {err:.3e} still above {policy.step_tol:.0e} "
        f"at step size {span / (nsteps // 2):.3e}; the problem looks stiff"
    )


def _chunked(kernel_step, samplers_to_args, X0, t0, t1, policy, what):
    def run_once(nsteps):
        h = (t1 - t0) / nsteps
        X = X0
        worst = 0.0
        done = 0
        while done < nsteps:
            m = min(policy.chunk_steps, nsteps - done)
            ts = _quarter_times(t0, h, done, m)
            X, err = kernel_step(samplers_to_args(ts), X, h)
            if not np.all(np.isfinite(X.view(np.float64))):
                return X, math.inf  # blow-up: force a refinement
            if err > worst:
                worst = err
            done += m
        return X, worst

    return _run_refined(run_once, t0, t1, policy, what)


def solve_left(sample_A, X0, t0: float, t1: float, policy: StepPolicy = DEFAULT_POLICY):
    """Integrate X' = -A(t) X from t0 to t1.

    ``sample_A(ts)`` must return a C-contiguous (len(ts), n, n) complex array.
    X0 may be a vector or a matrix. Returns (X(t1), IntegrationInfo).
    """
    impl = _kernels.get_implementation(policy.implementation)
    X0 = np.ascontiguousarray(X0, dtype=np.complex128)
    vector = X0.ndim == 1
    X = X0[:, None] if vector else X0
    if t1 == t0:
        return (X0.copy(), IntegrationInfo(0, 0.0, 0.0, 0))

    X, info = _chunked(
        lambda A, x, h: impl.rk4_left(A, x, h),
        sample_A,
        X,
        t0,
        t1,
        policy,
        "solve_left",
    )
    return (X[:, 0] if vector else X), info


def solve_pair(sample_pair, X0, t0: float, t1: float, policy: StepPolicy = DEFAULT_POLICY):
    """Integrate X' = -(AL(t) X + X AR(t)) from t0 to t1.

    ``sample_pair(ts)`` must return (AL, AR) with shapes (S, n, n), (S, m, m).
    """
    impl = _kernels.get_implementation(policy.implementation)
    X0 = np.ascontiguousarray(X0, dtype=np.complex128)
    if t1 == t0:
        return X0.copy(), IntegrationInfo(0, 0.0, 0.0, 0)
    return _chunked(
        lambda args, x, h: impl.rk4_pair(args[0], args[1], x, h),
        sample_pair,
        X0,
        t0,
        t1,
        policy,
        "solve_pair",
    )


def solve_decay_lindblad(
    sample_HF, rho0, t0: float, t1: float, policy: StepPolicy = DEFAULT_POLICY
):
    """Integrate the embedded zero-temperature master equation from t0 to t1.

    ``sample_HF(ts)`` must return (H, F) with shapes (S, D, D) and (S, K, D):
    Hamiltonian samples embedded with a zero vacuum row/column, decay vectors
    embedded with a zero vacuum component.
    """
    impl = _kernels.get_implementation(policy.implementation)
    rho0 = np.ascontiguousarray(rho0, dtype=np.complex128)
    if t1 == t0:
        return rho0.copy(), IntegrationInfo(0, 0.0, 0.0, 0)
    return _chunked(
        lambda args, x, h: impl.rk4_lindblad_decay(args[0], args[1], x, h),
        sample_HF,
        rho0,
        t0,
        t1,
        policy,
        "solve_decay_lindblad",
    )
