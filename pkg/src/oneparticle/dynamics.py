"""Zero-temperature GKSL dynamics through the dissipative one-particle propagator.

A model is a Hamiltonian H(t) on the excited modes plus decay vectors f_l(t);
the jump operators |0><f_l(t)| empty the excited block into the vacuum. All
reduced dynamics is generated by the accretive matrix

    A(t) = 1/2 sum_l |f_l(t)><f_l(t)| + i H(t)

through the propagator V(t) solving V' = -A(t) V, V(0) = I:
psi(t) = V psi(0) and R(t) = V R(0) V^dagger. ``integrate_direct`` integrates
the full (n+1)-dimensional master equation instead and serves as the
independent cross-check of that reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.integrate

from .errors import DimensionError, DomainError, NumericalError, ValidationError
from .integrators import (
    DEFAULT_POLICY,
    StepPolicy,
    clamp_before,
    require_finite,
    solve_decay_lindblad,
    solve_left,
    split_interval,
)
from .linalg import (
    hermitian_part,
    hermiticity_defect,
    matrix_exponential,
    operator_norm,
    require_square,
)
from .states import OneParticleState, assemble, disassemble, make_state

#: accretivity slack: A + A^dagger is a Gram matrix, anything below is round-off
ACCRETIVITY_TOL = 1e-10

#: allowed excess of ||V|| over 1
CONTRACTION_TOL = 1e-9


class GKSLModel:
    """Coefficients of the zero-temperature master equation on C + C^n.

    ``hamiltonian`` and ``decay_vectors`` are either constants (Hermitian
    (n, n) matrix; sequence of K complex n-vectors) or callables of t
    returning the same shapes. Constant coefficients enable the matrix
    exponential fast path for the propagator.

    Coefficient callables with jump discontinuities (piecewise-constant
    tables) must declare their jump times, either through ``breakpoints``
    here or as a ``breakpoints`` attribute on the callable; integrations are
    split there so the step-doubling control sees smooth pieces only.
    """

    def __init__(self, n: int, hamiltonian=None, decay_vectors=None, breakpoints=()):
        if n < 0:
            raise DimensionError(f"mode count must be nonnegative, got {n}")
        self.n = int(n)
        collected = set(float(b) for b in breakpoints)
        for source in (hamiltonian, decay_vectors):
            collected.update(float(b) for b in getattr(source, "breakpoints", ()))
        if any(b < 0 or not math.isfinite(b) for b in collected):
            raise ValidationError(f"breakpoints must be finite and nonnegative: {sorted(collected)}")
        self.breakpoints: tuple[float, ...] = tuple(sorted(collected))

        self._h_static = None
        self._h_fun: Callable[[float], np.ndarray] | None = None
        if hamiltonian is None:
            self._h_static = np.zeros((n, n), dtype=np.complex128)
        elif callable(hamiltonian):
            self._h_fun = hamiltonian
        else:
            self._h_static = self._check_h(
                np.asarray(hamiltonian, dtype=np.complex128), 0.0
            )

        self._f_static = None
        self._f_fun: Callable[[float], np.ndarray] | None = None
        if decay_vectors is None:
            self._f_static = np.zeros((0, n), dtype=np.complex128)
        elif callable(decay_vectors):
            self._f_fun = decay_vectors
            probe = self._check_f(np.asarray(decay_vectors(0.0), dtype=np.complex128), 0.0)
            self.K = probe.shape[0]
        else:
            self._f_static = self._check_f(
                np.atleast_2d(np.asarray(decay_vectors, dtype=np.complex128)), 0.0
            )
        if self._f_static is not None:
            self.K = self._f_static.shape[0]

    @classmethod
    def homogeneous(cls, n: int, gamma, hamiltonian=None) -> "GKSLModel":
        """Every mode decays at the same rate: f_l(t) = sqrt(gamma(t)) |l>."""
        eye = np.eye(n, dtype=np.complex128)
        if callable(gamma):

            def vectors(t: float) -> np.ndarray:
                g = float(gamma(t))
                if g < 0:
                    raise ValidationError(f"negative decay rate gamma({t}) = {g!r}")
                return math.sqrt(g) * eye

            vectors.breakpoints = tuple(getattr(gamma, "breakpoints", ()))
            return cls(n, hamiltonian, vectors)
        g = float(gamma)
        if g < 0:
            raise ValidationError(f"negative decay rate gamma = {g!r}")
        return cls(n, hamiltonian, math.sqrt(g) * eye)

    @property
    def is_static(self) -> bool:
        return self._h_fun is None and self._f_fun is None

    def _check_h(self, H: np.ndarray, t: float) -> np.ndarray:
        H = require_square(H, "H(t)")
        if H.shape[0] != self.n:
            raise DimensionError(f"H(t) has shape {H.shape}, expected ({self.n}, {self.n})")
        defect = hermiticity_defect(H)
        if defect > 1e-8:
            raise ValidationError(
                f"H({t}) is not Hermitian: defect {defect:.3e} exceeds 1e-08"
            )
        return hermitian_part(H)

    def _check_f(self, F: np.ndarray, t: float) -> np.ndarray:
        if F.ndim != 2 or F.shape[1] != self.n:
            raise DimensionError(
                f"decay vectors at t = {t} have shape {F.shape}, expected (K, {self.n})"
            )
        return np.ascontiguousarray(F, dtype=np.complex128)

    def hamiltonian_at(self, t: float) -> np.ndarray:
        if self._h_static is not None:
            return self._h_static
        return self._check_h(np.asarray(self._h_fun(t), dtype=np.complex128), t)

    def decay_at(self, t: float) -> np.ndarray:
        if self._f_static is not None:
            return self._f_static
        F = self._check_f(np.asarray(self._f_fun(t), dtype=np.complex128), t)
        if F.shape[0] != self.K:
            raise DimensionError(
                f"decay vector count changed over time: {F.shape[0]} at t = {t}, "
                f"expected {self.K}"
            )
        return F

    def coupling_matrix_at(self, t: float) -> np.ndarray:
        """Gamma(t) = sum_l |f_l(t)><f_l(t)|, the PSD coupling matrix."""
        F = self.decay_at(t)
        return np.einsum("li,lj->ij", F, F.conj())


def accretive_matrix(model: GKSLModel, t: float) -> np.ndarray:
    """A(t) = Gamma(t)/2 + i H(t), spectrally checked to be accretive."""
    A = 0.5 * model.coupling_matrix_at(t) + 1j * model.hamiltonian_at(t)
    require_finite(A, f"A({t})")
    if model.n:
        low = float(np.linalg.eigvalsh(A + A.conj().T)[0])
        if low < -ACCRETIVITY_TOL:
            raise ValidationError(
                f"A({t}) is not accretive: min eig of A + A^dagger = {low:.3e}"
            )
    return A


@dataclass(frozen=True)
class Propagator:
    """V(t) solving V' = -A(t) V with V(0) = I; always a contraction."""

    t: float
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def norm(self) -> float:
        return operator_norm(self.matrix)


def _make_propagator(t: float, V: np.ndarray) -> Propagator:
    nrm = operator_norm(V)
    if nrm > 1.0 + CONTRACTION_TOL:
        raise NumericalError(
            f"propagator lost contractivity: ||V({t})|| = {nrm!r} exceeds 1 + 1e-09"
        )
    return Propagator(t=t, matrix=V)


def _accretive_sampler(model: GKSLModel):
    """Batch evaluation of A on a sample grid, with per-sample spectral checks."""
    n = model.n

    if model.is_static:
        A0 = accretive_matrix(model, 0.0)

        def sample(ts: np.ndarray) -> np.ndarray:
            return np.ascontiguousarray(np.broadcast_to(A0, (ts.size, n, n)))

        return sample

    def sample(ts: np.ndarray) -> np.ndarray:
        A = np.empty((ts.size, n, n), dtype=np.complex128)
        for k, t in enumerate(ts):
            A[k] = 0.5 * model.coupling_matrix_at(t) + 1j * model.hamiltonian_at(t)
        require_finite(A, "A(t) samples")
        if n:
            low = float(np.min(np.linalg.eigvalsh(A + A.conj().transpose(0, 2, 1))))
            if low < -ACCRETIVITY_TOL:
                raise ValidationError(
                    f"A(t) is not accretive on the sample grid: min eig = {low:.3e}"
                )
        return A

    return sample


def solve_segment(solver, sample, X, t0, t1, policy, breakpoints):
    """Run ``solver`` over [t0, t1], split at coefficient jump times.

    Samples that land exactly on a jump are clamped just inside the piece
    that is being integrated, which keeps piecewise-constant tables exact.
    """
    cuts = set(breakpoints)
    for a, b in split_interval(t0, t1, breakpoints):
        piece_sample = clamp_before(sample, b, b - a) if b in cuts else sample
        X, _ = solver(piece_sample, X, a, b, policy)
    return X


def propagate(
    model: GKSLModel,
    t_final: float,
    policy: StepPolicy = DEFAULT_POLICY,
    method: str = "auto",
) -> Propagator:
    """Solve the propagator Cauchy problem up to t_final.

    method: "expm" (constant coefficients only), "ode", or "auto" which uses
    the matrix exponential of -A t for static models and RK4 otherwise.
    """
    if t_final < 0:
        raise DomainError(f"propagation time must be nonnegative, got {t_final!r}")
    n = model.n
    eye = np.eye(n, dtype=np.complex128)
    if t_final == 0:
        return Propagator(t=0.0, matrix=eye)
    if method not in ("auto", "expm", "ode"):
        raise ValidationError(f"unknown propagation method {method!r}")
    if method == "expm" and not model.is_static:
        raise ValidationError("matrix-exponential path needs constant coefficients")
    if method == "auto":
        method = "expm" if model.is_static else "ode"
    if method == "expm":
        V = matrix_exponential(-accretive_matrix(model, 0.0) * t_final)
        return _make_propagator(t_final, V)
    V = solve_segment(
        solve_left, _accretive_sampler(model), eye, 0.0, t_final, policy, model.breakpoints
    )
    return _make_propagator(t_final, V)


def propagate_grid(
    model: GKSLModel,
    t_grid: Sequence[float],
    policy: StepPolicy = DEFAULT_POLICY,
    method: str = "auto",
) -> list[Propagator]:
    """Propagators at every grid time, reusing work across the grid.

    Static models evaluate the matrix exponential per point; time-dependent
    models integrate segment by segment and chain the results.
    """
    ts = [float(t) for t in t_grid]
    if any(t < 0 for t in ts):
        raise DomainError("grid times must be nonnegative")
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise DomainError("grid times must be nondecreasing")
    n = model.n
    if model.is_static and method in ("auto", "expm"):
        A = accretive_matrix(model, 0.0)
        return [
            _make_propagator(t, matrix_exponential(-A * t)) if t > 0
            else Propagator(t=0.0, matrix=np.eye(n, dtype=np.complex128))
            for t in ts
        ]
    sampler = _accretive_sampler(model)
    out: list[Propagator] = []
    V = np.eye(n, dtype=np.complex128)
    prev = 0.0
    for t in ts:
        if t > prev:
            V = solve_segment(solve_left, sampler, V, prev, t, policy, model.breakpoints)
            prev = t
        out.append(_make_propagator(t, V.copy()))
    return out


def apply_propagator(s0: OneParticleState, V: Propagator) -> OneParticleState:
    """psi -> V psi, R -> V R V^dagger, rho00 from the trace."""
    if V.n != s0.n:
        raise DimensionError(f"propagator is {V.n}x{V.n}, state has n = {s0.n}")
    psi = V.matrix @ s0.psi
    R = V.matrix @ s0.R @ V.matrix.conj().T
    return make_state(1.0 - float(np.trace(R).real), psi, R)


def evolve_state(
    s0: OneParticleState,
    model: GKSLModel,
    t: float,
    policy: StepPolicy = DEFAULT_POLICY,
    method: str = "auto",
) -> OneParticleState:
    """Evolve a one-particle state through the propagator."""
    if s0.n != model.n:
        raise DimensionError(f"state has n = {s0.n}, model has n = {model.n}")
    return apply_propagator(s0, propagate(model, t, policy, method))


def evolve_state_grid(
    s0: OneParticleState,
    model: GKSLModel,
    t_grid: Sequence[float],
    policy: StepPolicy = DEFAULT_POLICY,
    method: str = "auto",
) -> list[OneParticleState]:
    if s0.n != model.n:
        raise DimensionError(f"state has n = {s0.n}, model has n = {model.n}")
    return [apply_propagator(s0, V) for V in propagate_grid(model, t_grid, policy, method)]


def pure_state_evolution(
    psi0, model: GKSLModel, t: float, policy: StepPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """V(t) psi0: the Schroedinger equation with the dissipative generator."""
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    if psi0.shape != (model.n,):
        raise DimensionError(f"psi0 has shape {psi0.shape}, expected ({model.n},)")
    return propagate(model, t, policy).matrix @ psi0


def _decay_sampler(model: GKSLModel):
    """Embedded (0 (+) H, 0 (+) f_l) samples for the direct master equation."""
    n, K = model.n, model.K

    def build(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        H = np.zeros((ts.size, n + 1, n + 1), dtype=np.complex128)
        F = np.zeros((ts.size, K, n + 1), dtype=np.complex128)
        if model.is_static:
            H[:, 1:, 1:] = model.hamiltonian_at(0.0)
            F[:, :, 1:] = model.decay_at(0.0)
        else:
            for k, t in enumerate(ts):
                H[k, 1:, 1:] = model.hamiltonian_at(t)
                F[k, :, 1:] = model.decay_at(t)
        require_finite(H, "H(t) samples")
        require_finite(F, "decay vector samples")
        return H, F

    return build


def integrate_direct(
    s0: OneParticleState,
    model: GKSLModel,
    t: float,
    policy: StepPolicy = DEFAULT_POLICY,
) -> OneParticleState:
    """Integrate the full (n+1)-dimensional master equation, no propagator.

    This is the independent route used to cross-check the propagator-based
    reduction; the pair of paths is its own oracle.
    """
    if s0.n != model.n:
        raise DimensionError(f"state has n = {s0.n}, model has n = {model.n}")
    if t < 0:
        raise DomainError(f"propagation time must be nonnegative, got {t!r}")
    rho0 = assemble(s0)
    rho = solve_segment(
        solve_decay_lindblad, _decay_sampler(model), rho0, 0.0, t, policy, model.breakpoints
    )

    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-10:
        raise NumericalError(f"direct integration lost the trace: Tr rho = {tr!r}")
    low = float(np.linalg.eigvalsh(hermitian_part(rho))[0])
    if low < -1e-8:
        raise NumericalError(f"direct integration lost positivity: min eig = {low:.3e}")
    return disassemble(rho)


def homogeneous_ground_population(gamma, rho00_0: float, t: float) -> float:
    """Closed-form ground-state population for a homogeneous reservoir.

    rho00(t) = 1 - exp(-int_0^t gamma) (1 - rho00(0)), with the rate integral
    done by adaptive quadrature to 1e-10 absolute accuracy.
    """
    if not -1e-12 <= rho00_0 <= 1.0 + 1e-12:
        raise DomainError(f"rho00(0) must lie in [0, 1], got {rho00_0!r}")
    rho00_0 = min(max(rho00_0, 0.0), 1.0)
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    if not callable(gamma):
        g = float(gamma)
        if g < 0:
            raise ValidationError(f"negative decay rate gamma = {g!r}")
        integral = g * t
    else:

        def integrand(s: float) -> float:
            v = float(gamma(s))
            if v < 0:
                raise ValidationError(f"negative decay rate gamma({s}) = {v!r}")
            return v

        integral, _ = scipy.integrate.quad(integrand, 0.0, t, epsabs=1e-10, limit=500)
    return 1.0 - math.exp(-integral) * (1.0 - rho00_0)
