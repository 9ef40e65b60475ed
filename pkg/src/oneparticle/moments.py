"""First- and second-moment dynamics for quadratic zero-temperature generators.

For bosonic or fermionic modes with means m_j = <a_j>, normal moments
Y_ij = <a_i^dag a_j> and anomalous moments Z_ij = <a_i a_j> (central moments
for bosons, and m = 0 for fermions by superselection), the moments close on
themselves:

    m' = -A(t) m,    Y' = -conj(A) Y - Y A^T,    Z' = -A Z - Z A^T,

with the same accretive A(t) that drives the one-particle dynamics. The
closed-form route applies the propagator: m -> V m, Y -> conj(V) Y V^T,
Z -> V Z V^T. Both routes are exposed and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    GKSLModel,
    Propagator,
    _accretive_sampler,
    propagate,
    propagate_grid,
    solve_segment,
)
from .errors import DimensionError, ValidationError
from .integrators import DEFAULT_POLICY, StepPolicy, solve_left, solve_pair
from .linalg import hermitian_part, hermiticity_defect, require_square

STATISTICS = ("boson", "fermion")

#: fermionic means must vanish identically (superselection)
FERMION_MEAN_TOL = 1e-10


@dataclass(frozen=True)
class MomentState:
    """Validated moment triple (m, Y, Z) for one statistics sector."""

    statistics: str
    m: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    @property
    def n(self) -> int:
        return self.Y.shape[0]


def make_moment_state(
    statistics: str, m=None, Y=None, Z=None, n: int | None = None, tol: float = 1e-8
) -> MomentState:
    """Validate and construct a MomentState.

    Y must be Hermitian PSD (for fermions also bounded by 1); Z symmetric for
    bosons and antisymmetric for fermions. Defects up to ``tol`` are accepted
    and projected away; fermionic means must vanish and are stored as exact
    zeros.
    """
    if statistics not in STATISTICS:
        raise ValidationError(f"statistics must be one of {STATISTICS}, got {statistics!r}")
    for candidate in (Y, Z, m):
        if n is None and candidate is not None:
            n = np.asarray(candidate).shape[0]
    if n is None:
        raise DimensionError("cannot infer the mode count; pass n or an array")

    m = np.zeros(n, dtype=np.complex128) if m is None else np.asarray(m, np.complex128)
    Y = np.zeros((n, n), dtype=np.complex128) if Y is None else np.asarray(Y, np.complex128)
    Z = np.zeros((n, n), dtype=np.complex128) if Z is None else np.asarray(Z, np.complex128)
    if m.shape != (n,):
        raise DimensionError(f"m has shape {m.shape}, expected ({n},)")
    require_square(Y, "Y")
    require_square(Z, "Z")
    if Y.shape != (n, n) or Z.shape != (n, n):
        raise DimensionError(f"Y/Z shapes {Y.shape}/{Z.shape}, expected ({n}, {n})")

    if statistics == "fermion":
        top = float(np.max(np.abs(m))) if n else 0.0
        if top > FERMION_MEAN_TOL:
            raise ValidationError(
                f"fermionic means must vanish by superselection; max|m| = {top:.3e}"
            )
        m = np.zeros(n, dtype=np.complex128)

    defect = hermiticity_defect(Y)
    if defect > tol:
        raise ValidationError(f"Y is not Hermitian: defect {defect:.3e} exceeds {tol:.0e}")
    Y = hermitian_part(Y)
    if n:
        w = np.linalg.eigvalsh(Y)
        if w[0] < -tol:
            raise ValidationError(f"Y has eigenvalue {w[0]:.3e} below -{tol:.0e}")
        if statistics == "fermion" and w[-1] > 1.0 + tol:
            raise ValidationError(
                f"fermionic Y has eigenvalue {w[-1]!r} above 1 + {tol:.0e}"
            )

    sign = 1.0 if statistics == "boson" else -1.0
    sym_defect = float(np.max(np.abs(Z - sign * Z.T))) if n else 0.0
    if sym_defect > tol:
        kind = "symmetric" if statistics == "boson" else "antisymmetric"
        raise ValidationError(
            f"Z must be {kind} for {statistics}s: defect {sym_defect:.3e}"
        )
    Z = 0.5 * (Z + sign * Z.T)

    for arr in (m, Y, Z):
        arr.flags.writeable = False
    return MomentState(statistics=statistics, m=m, Y=Y, Z=Z)


def propagator_closed_form(ms0: MomentState, V: Propagator) -> MomentState:
    """Apply m -> V m, Y -> conj(V) Y V^T, Z -> V Z V^T literally."""
    if V.n != ms0.n:
        raise DimensionError(f"propagator is {V.n}x{V.n}, moments have n = {ms0.n}")
    W = V.matrix
    return make_moment_state(
        ms0.statistics,
        m=W @ ms0.m,
        Y=W.conj() @ ms0.Y @ W.T,
        Z=W @ ms0.Z @ W.T,
    )


def _ode_moments(ms0: MomentState, model: GKSLModel, t0, t1, policy) -> MomentState:
    sample = _accretive_sampler(model)

    def sample_yy(ts):
        A = sample(ts)
        return np.ascontiguousarray(A.conj()), np.ascontiguousarray(A.transpose(0, 2, 1))

    def sample_zz(ts):
        A = sample(ts)
        return A, np.ascontiguousarray(A.transpose(0, 2, 1))

    cuts = model.breakpoints
    if ms0.statistics == "boson":
        m = solve_segment(solve_left, sample, ms0.m, t0, t1, policy, cuts)
    else:
        m = ms0.m
    Y = solve_segment(solve_pair, sample_yy, ms0.Y, t0, t1, policy, cuts)
    Z = solve_segment(solve_pair, sample_zz, ms0.Z, t0, t1, policy, cuts)
    return make_moment_state(ms0.statistics, m=m, Y=Y, Z=Z)


def evolve_moments(
    ms0: MomentState,
    model: GKSLModel,
    t: float,
    method: str = "propagator",
    policy: StepPolicy = DEFAULT_POLICY,
) -> MomentState:
    """Evolve moments either by direct ODE integration or the propagator forms."""
    if model.n != ms0.n:
        raise DimensionError(f"model has n = {model.n}, moments have n = {ms0.n}")
    if method == "propagator":
        return propagator_closed_form(ms0, propagate(model, t, policy))
    if method == "ode":
        return _ode_moments(ms0, model, 0.0, t, policy)
    raise ValidationError(f"method must be 'ode' or 'propagator', got {method!r}")


def evolve_moments_grid(
    ms0: MomentState,
    model: GKSLModel,
    t_grid,
    method: str = "propagator",
    policy: StepPolicy = DEFAULT_POLICY,
) -> list[MomentState]:
    """Moment trajectories on a time grid."""
    if method == "propagator":
        return [
            propagator_closed_form(ms0, V)
            for V in propagate_grid(model, t_grid, policy)
        ]
    if method != "ode":
        raise ValidationError(f"method must be 'ode' or 'propagator', got {method!r}")
    out = []
    current = ms0
    prev = 0.0
    for t in t_grid:
        t = float(t)
        if t < prev:
            raise ValidationError("grid times must be nondecreasing")
        if t > prev:
            current = _ode_moments(current, model, prev, t, policy)
            prev = t
        out.append(current)
    return out
