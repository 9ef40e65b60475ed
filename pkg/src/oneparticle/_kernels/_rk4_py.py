"""Pure-numpy twin of the compiled RK4 kernels.

Shared sample layout: coefficient arrays hold values on the quarter-step grid
t0 + j*h/4 for j = 0..4N, so shape[0] = 4N + 1 for N steps of size h. Each
step advances with two half steps and compares against one full step; the
returned error is the largest entrywise difference seen (step-doubling
estimate). The half-step result is kept.

Stage index layout per step j: full step uses samples (4j, 4j+2, 4j+4), the
half steps use (4j, 4j+1, 4j+2) and (4j+2, 4j+3, 4j+4).
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def _step_left(A0, A1, A2, X, h):
    k1 = -(A0 @ X)
    k2 = -(A1 @ (X + (0.5 * h) * k1))
    k3 = -(A1 @ (X + (0.5 * h) * k2))
    k4 = -(A2 @ (X + h * k3))
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_left(A, X0, h):
    """Integrate X' = -A(t) X. A: (4N+1, n, n); X0: (n, m)."""
    nsteps = (A.shape[0] - 1) // 4
    X = np.array(X0, dtype=np.complex128)
    max_err = 0.0
    for j in range(nsteps):
        b = 4 * j
        full = _step_left(A[b], A[b + 2], A[b + 4], X, h)
        half = _step_left(A[b], A[b + 1], A[b + 2], X, 0.5 * h)
        half = _step_left(A[b + 2], A[b + 3], A[b + 4], half, 0.5 * h)
        err = float(np.max(np.abs(full - half))) if X.size else 0.0
        if err > max_err:
            max_err = err
        X = half
    return X, max_err


def _step_pair(AL0, AL1, AL2, AR0, AR1, AR2, X, h):
    k1 = -(AL0 @ X + X @ AR0)
    xt = X + (0.5 * h) * k1
    k2 = -(AL1 @ xt + xt @ AR1)
    xt = X + (0.5 * h) * k2
    k3 = -(AL1 @ xt + xt @ AR1)
    xt = X + h * k3
    k4 = -(AL2 @ xt + xt @ AR2)
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_pair(AL, AR, X0, h):
    """Integrate X' = -(AL(t) X + X AR(t)). AL: (4N+1, n, n); AR: (4N+1, m, m)."""
    nsteps = (AL.shape[0] - 1) // 4
    X = np.array(X0, dtype=np.complex128)
    max_err = 0.0
    for j in range(nsteps):
        b = 4 * j
        full = _step_pair(
            AL[b], AL[b + 2], AL[b + 4], AR[b], AR[b + 2], AR[b + 4], X, h
        )
        half = _step_pair(
            AL[b], AL[b + 1], AL[b + 2], AR[b], AR[b + 1], AR[b + 2], X, 0.5 * h
        )
        half = _step_pair(
            AL[b + 2], AL[b + 3], AL[b + 4], AR[b + 2], AR[b + 3], AR[b + 4], half, 0.5 * h
        )
        err = float(np.max(np.abs(full - half))) if X.size else 0.0
        if err > max_err:
            max_err = err
        X = half
    return X, max_err


def _decay_rhs(H, F, rho):
    # -i[H, rho] + sum_l (v^dag rho v) E00 - 1/2 {v v^dag, rho}, v = F[l]
    out = -1j * (H @ rho - rho @ H)
    for v in F:
        w = rho @ v
        z = v.conj() @ rho
        out[0, 0] += np.vdot(v, w)
        out -= 0.5 * (np.outer(v, z) + np.outer(w, v.conj()))
    return out


def _step_decay(H0, H1, H2, F0, F1, F2, rho, h):
    k1 = _decay_rhs(H0, F0, rho)
    k2 = _decay_rhs(H1, F1, rho + (0.5 * h) * k1)
    k3 = _decay_rhs(H1, F1, rho + (0.5 * h) * k2)
    k4 = _decay_rhs(H2, F2, rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_lindblad_decay(H, F, rho0, h):
    """Integrate the zero-temperature master equation with rank-1 jump operators.

    H: (4N+1, D, D) embedded Hamiltonian samples (vacuum row/column zero);
    F: (4N+1, K, D) embedded decay vectors (vanishing vacuum component);
    rho0: (D, D). The jump operators are |0><v_l|, applied through their
    rank-1 structure without forming D x D matrices.
    """
    nsteps = (H.shape[0] - 1) // 4
    rho = np.array(rho0, dtype=np.complex128)
    max_err = 0.0
    for j in range(nsteps):
        b = 4 * j
        full = _step_decay(H[b], H[b + 2], H[b + 4], F[b], F[b + 2], F[b + 4], rho, h)
        half = _step_decay(H[b], H[b + 1], H[b + 2], F[b], F[b + 1], F[b + 2], rho, 0.5 * h)
        half = _step_decay(
            H[b + 2], H[b + 3], H[b + 4], F[b + 2], F[b + 3], F[b + 4], half, 0.5 * h
        )
        err = float(np.max(np.abs(full - half)))
        if err > max_err:
            max_err = err
        rho = half
    return rho, max_err
