# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled RK4 step-doubling kernels.

Same contract as _rk4_py: coefficient arrays sampled on the quarter-step grid
(shape[0] = 4N + 1), full step vs two half steps per step, entrywise maximum
difference returned as the error estimate, half-step result kept.
"""

import numpy as np

IMPLEMENTATION = "cython"

ctypedef double complex cplx


cdef void _mm_neg(const cplx[:, :] A, const cplx[:, :] B, cplx[:, :] C) noexcept:
    # C = -(A @ B)
    cdef Py_ssize_t n = A.shape[0], m = A.shape[1], k = B.shape[1]
    cdef Py_ssize_t i, j, p
    cdef cplx s
    for i in range(n):
        for j in range(k):
            s = 0
            for p in range(m):
                s = s + A[i, p] * B[p, j]
            C[i, j] = -s


cdef void _rhs_pair(const cplx[:, :] AL, const cplx[:, :] AR,
                    const cplx[:, :] X, cplx[:, :] C) noexcept:
    # C = -(AL @ X + X @ AR)
    cdef Py_ssize_t n = X.shape[0], m = X.shape[1]
    cdef Py_ssize_t i, j, p
    cdef cplx s
    for i in range(n):
        for j in range(m):
            s = 0
            for p in range(n):
                s = s + AL[i, p] * X[p, j]
            for p in range(m):
                s = s + X[i, p] * AR[p, j]
            C[i, j] = -s


cdef void _comb(const cplx[:, :] X, double c, const cplx[:, :] K, cplx[:, :] OUT) noexcept:
    # OUT = X + c * K
    cdef Py_ssize_t n = X.shape[0], m = X.shape[1]
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(m):
            OUT[i, j] = X[i, j] + c * K[i, j]


cdef void _rk4_comb(const cplx[:, :] X, double h,
                    const cplx[:, :] k1, const cplx[:, :] k2,
                    const cplx[:, :] k3, const cplx[:, :] k4,
                    cplx[:, :] OUT) noexcept:
    # OUT = X + h/6 * (k1 + 2 k2 + 2 k3 + k4)
    cdef Py_ssize_t n = X.shape[0], m = X.shape[1]
    cdef Py_ssize_t i, j
    cdef double c = h / 6.0
    for i in range(n):
        for j in range(m):
            OUT[i, j] = X[i, j] + c * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])


cdef double _max_diff(const cplx[:, :] A, const cplx[:, :] B) noexcept:
    cdef Py_ssize_t n = A.shape[0], m = A.shape[1]
    cdef Py_ssize_t i, j
    cdef double d, best = 0.0
    for i in range(n):
        for j in range(m):
            d = abs(A[i, j] - B[i, j])
            if d > best:
                best = d
    return best


cdef void _copy(const cplx[:, :] A, cplx[:, :] B) noexcept:
    cdef Py_ssize_t n = A.shape[0], m = A.shape[1]
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(m):
            B[i, j] = A[i, j]


cdef void _step_left(const cplx[:, :] A0, const cplx[:, :] A1, const cplx[:, :] A2,
                     const cplx[:, :] X, double h, cplx[:, :] out,
                     cplx[:, :] k1, cplx[:, :] k2, cplx[:, :] k3, cplx[:, :] k4,
                     cplx[:, :] xt) noexcept:
    _mm_neg(A0, X, k1)
    _comb(X, 0.5 * h, k1, xt)
    _mm_neg(A1, xt, k2)
    _comb(X, 0.5 * h, k2, xt)
    _mm_neg(A1, xt, k3)
    _comb(X, h, k3, xt)
    _mm_neg(A2, xt, k4)
    _rk4_comb(X, h, k1, k2, k3, k4, out)


def rk4_left(const cplx[:, :, ::1] A, X0, double h):
    """Integrate X' = -A(t) X. A: (4N+1, n, n); X0: (n, m)."""
    cdef Py_ssize_t nsteps = (A.shape[0] - 1) // 4
    X_arr = np.array(X0, dtype=np.complex128, order="C")
    cdef cplx[:, ::1] X = X_arr
    cdef Py_ssize_t n = X.shape[0], m = X.shape[1]
    buf = [np.empty((n, m), dtype=np.complex128) for _ in range(7)]
    cdef cplx[:, ::1] big = buf[0], half = buf[1], k1 = buf[2], k2 = buf[3]
    cdef cplx[:, ::1] k3 = buf[4], k4 = buf[5], xt = buf[6]
    cdef double max_err = 0.0, err
    cdef Py_ssize_t j, b
    for j in range(nsteps):
        b = 4 * j
        _step_left(A[b], A[b + 2], A[b + 4], X, h, big, k1, k2, k3, k4, xt)
        _step_left(A[b], A[b + 1], A[b + 2], X, 0.5 * h, half, k1, k2, k3, k4, xt)
        _copy(half, X)
        _step_left(A[b + 2], A[b + 3], A[b + 4], X, 0.5 * h, half, k1, k2, k3, k4, xt)
        err = _max_diff(big, half)
        if err > max_err:
            max_err = err
        _copy(half, X)
    return X_arr, max_err


cdef void _step_pair(const cplx[:, :] AL0, const cplx[:, :] AL1, const cplx[:, :] AL2,
                     const cplx[:, :] AR0, const cplx[:, :] AR1, const cplx[:, :] AR2,
                     const cplx[:, :] X, double h, cplx[:, :] out,
                     cplx[:, :] k1, cplx[:, :] k2, cplx[:, :] k3, cplx[:, :] k4,
                     cplx[:, :] xt) noexcept:
    _rhs_pair(AL0, AR0, X, k1)
    _comb(X, 0.5 * h, k1, xt)
    _rhs_pair(AL1, AR1, xt, k2)
    _comb(X, 0.5 * h, k2, xt)
    _rhs_pair(AL1, AR1, xt, k3)
    _comb(X, h, k3, xt)
    _rhs_pair(AL2, AR2, xt, k4)
    _rk4_comb(X, h, k1, k2, k3, k4, out)


def rk4_pair(const cplx[:, :, ::1] AL, const cplx[:, :, ::1] AR, X0, double h):
    """Integrate X' = -(AL(t) X + X AR(t)). AL: (4N+1, n, n); AR: (4N+1, m, m)."""
    cdef Py_ssize_t nsteps = (AL.shape[0] - 1) // 4
    X_arr = np.array(X0, dtype=np.complex128, order="C")
    cdef cplx[:, ::1] X = X_arr
    cdef Py_ssize_t n = X.shape[0], m = X.shape[1]
    buf = [np.empty((n, m), dtype=np.complex128) for _ in range(7)]
    cdef cplx[:, ::1] big = buf[0], half = buf[1], k1 = buf[2], k2 = buf[3]
    cdef cplx[:, ::1] k3 = buf[4], k4 = buf[5], xt = buf[6]
    cdef double max_err = 0.0, err
    cdef Py_ssize_t j, b
    for j in range(nsteps):
        b = 4 * j
        _step_pair(AL[b], AL[b + 2], AL[b + 4], AR[b], AR[b + 2], AR[b + 4],
                   X, h, big, k1, k2, k3, k4, xt)
        _step_pair(AL[b], AL[b + 1], AL[b + 2], AR[b], AR[b + 1], AR[b + 2],
                   X, 0.5 * h, half, k1, k2, k3, k4, xt)
        _copy(half, X)
        _step_pair(AL[b + 2], AL[b + 3], AL[b + 4], AR[b + 2], AR[b + 3], AR[b + 4],
                   X, 0.5 * h, half, k1, k2, k3, k4, xt)
        err = _max_diff(big, half)
        if err > max_err:
            max_err = err
        _copy(half, X)
    return X_arr, max_err


cdef void _decay_rhs(const cplx[:, :] H, const cplx[:, :] F,
                     const cplx[:, :] rho, cplx[:, :] out,
                     cplx[:] w, cplx[:] z) noexcept:
    # out = -i[H, rho] + sum_l (v^dag rho v) E00 - 1/2 {v v^dag, rho}, v = F[l]
    cdef Py_ssize_t D = rho.shape[0], K = F.shape[0]
    cdef Py_ssize_t i, j, p, l
    cdef cplx s, acc, minus_i = -1j
    for i in range(D):
        for j in range(D):
            s = 0
            for p in range(D):
                s = s + H[i, p] * rho[p, j] - rho[i, p] * H[p, j]
            out[i, j] = minus_i * s
    for l in range(K):
        for i in range(D):
            s = 0
            for p in range(D):
                s = s + rho[i, p] * F[l, p]
            w[i] = s
        for j in range(D):
            s = 0
            for p in range(D):
                s = s + F[l, p].conjugate() * rho[p, j]
            z[j] = s
        acc = 0
        for i in range(D):
            acc = acc + F[l, i].conjugate() * w[i]
        out[0, 0] = out[0, 0] + acc
        for i in range(D):
            for j in range(D):
                out[i, j] = out[i, j] - 0.5 * (F[l, i] * z[j] + w[i] * F[l, j].conjugate())


cdef void _step_decay(const cplx[:, :] H0, const cplx[:, :] H1, const cplx[:, :] H2,
                      const cplx[:, :] F0, const cplx[:, :] F1, const cplx[:, :] F2,
                      const cplx[:, :] rho, double h, cplx[:, :] out,
                      cplx[:, :] k1, cplx[:, :] k2, cplx[:, :] k3, cplx[:, :] k4,
                      cplx[:, :] xt, cplx[:] w, cplx[:] z) noexcept:
    _decay_rhs(H0, F0, rho, k1, w, z)
    _comb(rho, 0.5 * h, k1, xt)
    _decay_rhs(H1, F1, xt, k2, w, z)
    _comb(rho, 0.5 * h, k2, xt)
    _decay_rhs(H1, F1, xt, k3, w, z)
    _comb(rho, h, k3, xt)
    _decay_rhs(H2, F2, xt, k4, w, z)
    _rk4_comb(rho, h, k1, k2, k3, k4, out)


def rk4_lindblad_decay(const cplx[:, :, ::1] H, const cplx[:, :, ::1] F, rho0, double h):
    """Master-equation integration with rank-1 jump operators |0><v_l(t)|.

    H: (4N+1, D, D) embedded Hamiltonian samples; F: (4N+1, K, D) embedded
    decay vectors; rho0: (D, D).
    """
    cdef Py_ssize_t nsteps = (H.shape[0] - 1) // 4
    rho_arr = np.array(rho0, dtype=np.complex128, order="C")
    cdef cplx[:, ::1] rho = rho_arr
    cdef Py_ssize_t D = rho.shape[0]
    buf = [np.empty((D, D), dtype=np.complex128) for _ in range(7)]
    wz = [np.empty(D, dtype=np.complex128) for _ in range(2)]
    cdef cplx[:, ::1] big = buf[0], half = buf[1], k1 = buf[2], k2 = buf[3]
    cdef cplx[:, ::1] k3 = buf[4], k4 = buf[5], xt = buf[6]
    cdef cplx[:] w = wz[0], z = wz[1]
    cdef double max_err = 0.0, err
    cdef Py_ssize_t j, b
    for j in range(nsteps):
        b = 4 * j
        _step_decay(H[b], H[b + 2], H[b + 4], F[b], F[b + 2], F[b + 4],
                    rho, h, big, k1, k2, k3, k4, xt, w, z)
        _step_decay(H[b], H[b + 1], H[b + 2], F[b], F[b + 1], F[b + 2],
                    rho, 0.5 * h, half, k1, k2, k3, k4, xt, w, z)
        _copy(half, rho)
        _step_decay(H[b + 2], H[b + 3], H[b + 4], F[b + 2], F[b + 3], F[b + 4],
                    rho, 0.5 * h, half, k1, k2, k3, k4, xt, w, z)
        err = _max_diff(big, half)
        if err > max_err:
            max_err = err
        _copy(half, rho)
    return rho_arr, max_err
