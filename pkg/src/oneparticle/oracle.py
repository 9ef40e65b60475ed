"""Brute-force tensor-space ground truth for every reduced-space shortcut.

Embedding: mode l = 1..n gets its own factor space; the basis string with a
single excitation at slot l represents |l>, the all-zeros string the vacuum.
Tensor layout is row-major over the mode tuple (the index of mode i varies
fastest for larger i), fixed here and relied on by every matrix in this
module. Fermionic operators use Jordan-Wigner sign strings over modes of
lower index.

Everything here is deliberately direct: dense Kronecker products, dense
partial traces, RK4 time stepping of the second-quantized master equation.
The full dimension is capped at 2^14; this module is desk-scale by design.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import GKSLModel
from .errors import (
    DimensionError,
    DimensionGuardError,
    NumericalError,
    ValidationError,
)
from .integrators import (
    DEFAULT_POLICY,
    StepPolicy,
    clamp_before,
    require_finite,
    split_interval,
)
from .linalg import hermitian_part, hermiticity_defect, kron_all, require_square
from .moments import MomentState, make_moment_state
from .reduction import as_index_set
from .states import OneParticlePureState, OneParticleState, assemble

MAX_FULL_DIMENSION = 2**14

OPERATOR_KINDS = ("qubit", "boson", "fermion")

#: boson truncation monitor thresholds on the top-level population
LEAKAGE_WARN = 1e-8
LEAKAGE_ERROR = 1e-4


def check_dimension_guard(mode_dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in mode_dims)
    if any(d < 2 for d in dims):
        raise DimensionError(f"every mode needs dimension >= 2, got {dims}")
    total = math.prod(dims)
    if total > MAX_FULL_DIMENSION:
        raise DimensionGuardError(
            f"full space dimension {total} = prod{dims} exceeds the guard "
            f"{MAX_FULL_DIMENSION}; the brute-force oracle is desk-scale only"
        )
    return dims


@dataclass(frozen=True)
class FullState:
    """Density matrix on the full tensor product of mode spaces."""

    mode_dims: tuple[int, ...]
    rho_hat: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def dimension(self) -> int:
        return self.rho_hat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.rho_hat).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(hermitian_part(self.rho_hat))[0])


def make_full_state(mode_dims, rho_hat, tol: float = 1e-8) -> FullState:
    dims = check_dimension_guard(mode_dims)
    rho = require_square(rho_hat, "rho_hat")
    D = math.prod(dims)
    if rho.shape != (D, D):
        raise DimensionError(f"rho_hat has shape {rho.shape}, mode dims give {D}")
    defect = hermiticity_defect(rho)
    if defect > tol:
        raise ValidationError(f"rho_hat hermiticity defect {defect:.3e} exceeds {tol:.0e}")
    rho = hermitian_part(rho)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"rho_hat has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise ValidationError(f"rho_hat has eigenvalue {w[0]:.3e} below -{tol:.0e}")
    rho = rho.copy()
    rho.flags.writeable = False
    return FullState(mode_dims=dims, rho_hat=rho)


@dataclass(frozen=True)
class ModeOperatorSet:
    """Per-mode lowering operators on the full space, a_l^dag |vac> = |l>."""

    kind: str
    mode_dims: tuple[int, ...]
    lowering: np.ndarray  # (n, D, D)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def dimension(self) -> int:
        return self.lowering.shape[1]

    @property
    def raising(self) -> np.ndarray:
        return self.lowering.conj().transpose(0, 2, 1)


def _local_lowering(d: int) -> np.ndarray:
    a = np.zeros((d, d), dtype=np.complex128)
    for k in range(1, d):
        a[k - 1, k] = math.sqrt(k)
    return a


def build_operators(kind: str, n: int, boson_cutoff: int = 6) -> ModeOperatorSet:
    """Construct qubit, truncated-boson, or Jordan-Wigner fermion mode operators."""
    if kind not in OPERATOR_KINDS:
        raise ValidationError(f"kind must be one of {OPERATOR_KINDS}, got {kind!r}")
    if n < 1:
        raise DimensionError(f"need at least one mode, got n = {n}")
    if kind == "boson":
        if boson_cutoff < 2:
            raise ValidationError(f"boson cutoff must be >= 2, got {boson_cutoff}")
        dims = (boson_cutoff,) * n
        local = _local_lowering(boson_cutoff)
    else:
        dims = (2,) * n
        local = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
    check_dimension_guard(dims)

    eye = [np.eye(d, dtype=np.complex128) for d in dims]
    sign = np.diag([1.0, -1.0]).astype(np.complex128)
    ops = []
    for l in range(n):
        factors = []
        for j in range(n):
            if j == l:
                factors.append(local)
            elif kind == "fermion" and j < l:
                factors.append(sign)
            else:
                factors.append(eye[j])
        ops.append(kron_all(factors))
    lowering = np.ascontiguousarray(np.stack(ops))
    lowering.flags.writeable = False
    return ModeOperatorSet(kind=kind, mode_dims=dims, lowering=lowering)


def _one_excitation_indices(mode_dims: tuple[int, ...]) -> np.ndarray:
    """Flat basis indices of |vac>, |1>, ..., |n> in the fixed layout."""
    n = len(mode_dims)
    strides = np.ones(n, dtype=int)
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * mode_dims[i + 1]
    return np.concatenate(([0], strides))


def embed_pure(phi: OneParticlePureState, mode_dims=None) -> np.ndarray:
    """Isometric embedding of a one-particle pure state into the full space."""
    dims = check_dimension_guard(mode_dims if mode_dims is not None else (2,) * phi.n)
    if len(dims) != phi.n:
        raise DimensionError(f"{len(dims)} mode dims for a state with n = {phi.n}")
    v = np.zeros(math.prod(dims), dtype=np.complex128)
    v[_one_excitation_indices(dims)] = phi.amplitudes()
    return v


def embed_density(s: OneParticleState, mode_dims=None) -> FullState:
    """rho_hat = sum_lk rho_lk |l-hat><k-hat|."""
    dims = check_dimension_guard(mode_dims if mode_dims is not None else (2,) * s.n)
    if len(dims) != s.n:
        raise DimensionError(f"{len(dims)} mode dims for a state with n = {s.n}")
    D = math.prod(dims)
    rho = np.zeros((D, D), dtype=np.complex128)
    idx = _one_excitation_indices(dims)
    rho[np.ix_(idx, idx)] = assemble(s)
    return make_full_state(dims, rho)


def one_particle_block(full: FullState) -> np.ndarray:
    """Extract the (n+1) x (n+1) block spanned by the vacuum and one-excitation strings."""
    idx = _one_excitation_indices(full.mode_dims)
    return full.rho_hat[np.ix_(idx, idx)].copy()


def full_partial_trace(full: FullState, indices) -> FullState:
    """Brute-force partial trace over the modes in ``indices`` (1-based)."""
    I = as_index_set(indices, full.n_modes)
    dims = full.mode_dims
    m = len(dims)
    T = full.rho_hat.reshape(dims + dims)
    remaining = m
    for pos in sorted((i - 1 for i in I.members), reverse=True):
        T = np.trace(T, axis1=pos, axis2=pos + remaining)
        remaining -= 1
    kept = tuple(d for j, d in enumerate(dims) if (j + 1) not in I)
    Dk = math.prod(kept) if kept else 1
    rho = T.reshape(Dk, Dk)
    out = rho.copy()
    out.flags.writeable = False
    return FullState(mode_dims=kept, rho_hat=out)


def schmidt(phi_hat, bipartition, mode_dims) -> np.ndarray:
    """Singular values of the bipartite reshaping, descending."""
    dims = check_dimension_guard(mode_dims)
    v = np.asarray(phi_hat, dtype=np.complex128).reshape(dims)
    I = as_index_set(bipartition, len(dims))
    first = [i - 1 for i in I.members]
    rest = [j for j in range(len(dims)) if (j + 1) not in I]
    v = np.transpose(v, first + rest)
    d1 = math.prod(dims[j] for j in first) if first else 1
    return np.linalg.svd(v.reshape(d1, -1), compute_uv=False)


def coherent_vector(alphas, cutoff: int) -> np.ndarray:
    """Product of per-mode truncated coherent states, renormalized to 1."""
    factors = []
    for alpha in np.asarray(alphas, dtype=np.complex128):
        amps = np.array(
            [alpha**k / math.sqrt(math.factorial(k)) for k in range(cutoff)],
            dtype=np.complex128,
        )
        amps *= math.exp(-0.5 * abs(alpha) ** 2)
        factors.append(amps)
    v = np.array([1.0 + 0.0j])
    for f in factors:
        v = np.kron(v, f)
    return v / np.linalg.norm(v)


def fock_vector(occupations, mode_dims) -> np.ndarray:
    """Basis vector |n_1, ..., n_k> in the fixed layout."""
    dims = check_dimension_guard(mode_dims)
    occ = [int(o) for o in occupations]
    if len(occ) != len(dims) or any(not 0 <= o < d for o, d in zip(occ, dims)):
        raise DimensionError(f"occupations {occ} incompatible with dims {dims}")
    flat = 0
    for o, d in zip(occ, dims):
        flat = flat * d + o
    v = np.zeros(math.prod(dims), dtype=np.complex128)
    v[flat] = 1.0
    return v


def density_from_vector(v, mode_dims) -> FullState:
    v = np.asarray(v, dtype=np.complex128)
    return make_full_state(mode_dims, np.outer(v, v.conj()))


def top_level_leakage(full: FullState) -> float:
    """Largest population sitting in any mode's top level (truncation monitor)."""
    dims = full.mode_dims
    pops = np.real(np.diag(full.rho_hat)).reshape(dims)
    worst = 0.0
    for j, d in enumerate(dims):
        mass = float(np.take(pops, d - 1, axis=j).sum())
        worst = max(worst, mass)
    return worst


def _verify_ladder_action(ops: ModeOperatorSet) -> None:
    # a_l^dag |vac> = |l> and a_l |l> = |vac>, the only structure Prop-style
    # sector arguments need; cheap enough to assert on every build.
    idx = _one_excitation_indices(ops.mode_dims)
    D = ops.dimension
    vac = np.zeros(D, dtype=np.complex128)
    vac[0] = 1.0
    for l in range(ops.n_modes):
        up = ops.raising[l] @ vac
        expected = np.zeros(D, dtype=np.complex128)
        expected[idx[l + 1]] = 1.0
        if not np.allclose(up, expected, atol=1e-13):
            raise ValidationError(f"raising operator {l + 1} does not map vacuum to |{l + 1}>")
        down = ops.lowering[l] @ expected
        if not np.allclose(down, vac, atol=1e-13):
            raise ValidationError(f"lowering operator {l + 1} does not map |{l + 1}> to vacuum")


def integrate_second_quantized(
    rho0: FullState,
    model: GKSLModel,
    ops: ModeOperatorSet,
    t: float,
    policy: StepPolicy = DEFAULT_POLICY,
) -> FullState:
    """RK4 integration of the second-quantized master equation on the full space.

    The generator is built literally from the model coefficients:
    H-hat(t) = sum_lk H_lk(t) a_l^dag a_k and the dissipator contracts
    Gamma(t) = sum_l |f_l(t)><f_l(t)| against the mode operators. Step
    doubling and refinement mirror the reduced-space integrators.
    """
    if ops.mode_dims != rho0.mode_dims:
        raise DimensionError(
            f"operator dims {ops.mode_dims} differ from state dims {rho0.mode_dims}"
        )
    if model.n != ops.n_modes:
        raise DimensionError(f"model has n = {model.n}, operators have {ops.n_modes} modes")
    if t < 0:
        raise NumericalError(f"time must be nonnegative, got {t!r}")
    _verify_ladder_action(ops)

    n = model.n
    a = ops.lowering
    adag = ops.raising
    pair_products = np.einsum("lab,kbc->lkac", adag, a)  # a_l^dag a_k, (n, n, D, D)

    def sample_coefficients(ts: np.ndarray):
        H = np.empty((ts.size, n, n), dtype=np.complex128)
        G = np.empty((ts.size, n, n), dtype=np.complex128)
        if model.is_static:
            H[:] = model.hamiltonian_at(0.0)
            G[:] = model.coupling_matrix_at(0.0)
        else:
            for k, tk in enumerate(ts):
                H[k] = model.hamiltonian_at(tk)
                G[k] = model.coupling_matrix_at(tk)
        require_finite(H, "H(t) samples")
        require_finite(G, "Gamma(t) samples")
        return H, G

    def integrate(rho_start, t0: float, t1: float, nsteps: int, sampler):
        h = (t1 - t0) / nsteps
        ts = t0 + h * 0.25 * np.arange(4 * nsteps + 1)
        Hs, Gs = sampler(ts)
        built: dict[int, tuple[np.ndarray, np.ndarray]] = {}

        def lift(i: int) -> tuple[np.ndarray, np.ndarray]:
            Hhat = np.tensordot(Hs[i], pair_products, axes=([0, 1], [0, 1]))
            M = np.tensordot(Gs[i], pair_products, axes=([0, 1], [0, 1]))
            return Hhat, M

        if model.is_static:
            static_lift = lift(0)

            def lifted(i: int):
                return static_lift

        else:

            def lifted(i: int):
                hit = built.get(i)
                if hit is None:
                    hit = built[i] = lift(i)
                return hit

        def rhs(i: int, rho: np.ndarray) -> np.ndarray:
            Hhat, M = lifted(i)
            jumps = np.tensordot(Gs[i], a @ rho, axes=([1], [0]))
            J = np.einsum("kab,kbc->ac", jumps, adag)
            return -1j * (Hhat @ rho - rho @ Hhat) + J - 0.5 * (M @ rho + rho @ M)

        def rk4(i0: int, i1: int, i2: int, rho: np.ndarray, step: float) -> np.ndarray:
            k1 = rhs(i0, rho)
            k2 = rhs(i1, rho + (0.5 * step) * k1)
            k3 = rhs(i1, rho + (0.5 * step) * k2)
            k4 = rhs(i2, rho + step * k3)
            return rho + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        rho = rho_start.copy()
        worst = 0.0
        for j in range(nsteps):
            b = 4 * j
            full_step = rk4(b, b + 2, b + 4, rho, h)
            half = rk4(b, b + 1, b + 2, rho, 0.5 * h)
            half = rk4(b + 2, b + 3, b + 4, half, 0.5 * h)
            worst = max(worst, float(np.max(np.abs(full_step - half))))
            rho = half
            built.clear()
        if not np.all(np.isfinite(rho.view(np.float64))):
            return rho, math.inf  # blow-up: force a refinement
        return rho, worst

    def integrate_piece(rho_start, t0: float, t1: float, sampler):
        nsteps = max(1, math.ceil((t1 - t0) * policy.steps_per_unit))
        worst = math.inf
        for _ in range(policy.max_refinements + 1):
            rho, worst = integrate(rho_start, t0, t1, nsteps, sampler)
            if worst <= policy.step_tol:
                return rho
            nsteps *= 2
        raise NumericalError(
            f"second-quantized integration: doubling estimate {worst:.3e} "
            f"above {policy.step_tol:.0e} at {nsteps // 2} steps"
        )

    rho = rho0.rho_hat.copy()
    cuts = set(model.breakpoints)
    for seg_start, seg_end in split_interval(0.0, t, model.breakpoints) if t > 0 else []:
        sampler = (
            clamp_before(sample_coefficients, seg_end, seg_end - seg_start)
            if seg_end in cuts
            else sample_coefficients
        )
        rho = integrate_piece(rho, seg_start, seg_end, sampler)

    tr0 = rho0.trace()
    tr = float(np.trace(rho).real)
    if abs(tr - tr0) > 1e-9:
        raise NumericalError(f"full-space integration lost the trace: {tr!r} vs {tr0!r}")
    low = float(np.linalg.eigvalsh(hermitian_part(rho))[0])
    if low < -1e-8:
        raise NumericalError(f"full-space integration lost positivity: min eig = {low:.3e}")

    out = FullState(mode_dims=ops.mode_dims, rho_hat=hermitian_part(rho))
    if ops.kind == "boson":
        leak = top_level_leakage(out)
        if leak > LEAKAGE_ERROR:
            raise NumericalError(
                f"boson truncation leakage {leak:.3e} above {LEAKAGE_ERROR:.0e}; "
                f"raise the cutoff"
            )
        if leak > LEAKAGE_WARN:
            warnings.warn(
                f"boson truncation leakage {leak:.3e} above {LEAKAGE_WARN:.0e}",
                RuntimeWarning,
                stacklevel=2,
            )
    return out


def moments_from_full(full: FullState, ops: ModeOperatorSet) -> MomentState:
    """Extract (m, Y, Z) from a full-space density matrix.

    Bosons use central moments (means subtracted); fermions use the plain
    expectations and their means must vanish by superselection.
    """
    if ops.kind not in ("boson", "fermion"):
        raise ValidationError(f"moments are defined for boson/fermion operators, not {ops.kind!r}")
    if ops.mode_dims != full.mode_dims:
        raise DimensionError(
            f"operator dims {ops.mode_dims} differ from state dims {full.mode_dims}"
        )
    rho = full.rho_hat
    a = ops.lowering
    adag = ops.raising
    a_rho = a @ rho
    m = np.einsum("kab,ba->k", a, rho)
    Y = np.einsum("iab,jba->ij", adag, a_rho)
    Z = np.einsum("iab,jba->ij", a, a_rho)
    if ops.kind == "boson":
        Y = Y - np.outer(m.conj(), m)
        Z = Z - np.outer(m, m)
        return make_moment_state("boson", m=m, Y=Y, Z=Z)
    return make_moment_state("fermion", m=m, Y=Y, Z=Z)
