# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernels.

Mirrors ``_kernels_py.sa_quantities`` point by point. Each (state, time)
builds one 4x4 branch matrix X; the rho_SA spectrum and the spin-flip
lambdas both come from a small one-sided Jacobi SVD, which keeps tiny
singular values accurate and avoids LAPACK call overhead on 4x4 inputs.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log2, NAN

cnp.import_array()

ctypedef double complex cplx

COLUMNS = ("s_s", "s_a", "s_sa", "concurrence")

DEF MAX_SWEEPS = 40
DEF JACOBI_EPS = 1e-15


cdef inline double xlogx(double x) noexcept nogil:
    if x <= 0.0:
        return 0.0
    return x * log2(x)


cdef inline double abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx conj(cplx z) noexcept nogil:
    return z.real - 1j * z.imag


cdef inline double entropy2(double a, double d, cplx b) noexcept nogil:
    cdef double half = 0.5 * (a + d)
    cdef double diff = 0.5 * (a - d)
    cdef double gap = sqrt(diff * diff + abs2(b))
    return -(xlogx(half + gap) + xlogx(half - gap))


cdef int svd4(cplx* A, double* sv) noexcept nogil:
    """Singular values of a 4x4 column-major matrix, descending. A is destroyed.

    Returns the number of sweeps used, or -1 without convergence.
    """
    cdef int sweep, p, q, k
    cdef double alpha, beta, g, zeta, t, c, s, tmp
    cdef cplx gamma, phase, ap, bq
    cdef bint rotated
    for sweep in range(MAX_SWEEPS):
        rotated = False
        for p in range(3):
            for q in range(p + 1, 4):
                alpha = 0.0
                beta = 0.0
                gamma = 0
                for k in range(4):
                    alpha += abs2(A[k + 4 * p])
                    beta += abs2(A[k + 4 * q])
                    gamma = gamma + conj(A[k + 4 * p]) * A[k + 4 * q]
                g = sqrt(abs2(gamma))
                if g <= JACOBI_EPS * sqrt(alpha * beta) or g == 0.0:
                    continue
                rotated = True
                phase = conj(gamma) / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(4):
                    ap = A[k + 4 * p]
                    bq = A[k + 4 * q] * phase
                    A[k + 4 * p] = c * ap - s * bq
                    A[k + 4 * q] = s * ap + c * bq
        if not rotated:
            break
    else:
        sweep = -1
    for p in range(4):
        alpha = 0.0
        for k in range(4):
            alpha += abs2(A[k + 4 * p])
        sv[p] = sqrt(alpha)
    # insertion sort, descending
    for p in range(1, 4):
        tmp = sv[p]
        q = p - 1
        while q >= 0 and sv[q] < tmp:
            sv[q + 1] = sv[q]
            q -= 1
        sv[q + 1] = tmp
    return sweep


def singular_values4(a):
    """Expose the 4x4 Jacobi SVD for testing; returns descending values."""
    cdef cplx[::1, :] A = np.asfortranarray(a, dtype=np.complex128).copy(order="F")
    if A.shape[0] != 4 or A.shape[1] != 4:
        raise ValueError("expected a 4x4 matrix")
    cdef double sv[4]
    cdef int sweeps = svd4(&A[0, 0], sv)
    if sweeps < 0:
        raise ArithmeticError("Jacobi SVD did not converge")
    return np.array([sv[0], sv[1], sv[2], sv[3]])


def sa_quantities(kraus, psi, bint with_concurrence=True):
    """Entropies and concurrence of evolved two-qubit states.

    kraus has shape (T, n, 2, 2) with n <= 4, psi shape (M, 4). Returns an
    (M, T, 4) array with columns S(rho_S), S(rho_A), S(rho_SA), C(rho_SA).
    """
    cdef const cplx[:, :, :, ::1] K = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef const cplx[:, ::1] P = np.ascontiguousarray(
        np.asarray(psi, dtype=np.complex128).reshape(-1, 4))
    cdef Py_ssize_t T = K.shape[0]
    cdef Py_ssize_t n = K.shape[1]
    cdef Py_ssize_t M = P.shape[0]
    if K.shape[2] != 2 or K.shape[3] != 2:
        raise ValueError("Kraus operators must be 2x2")
    if n > 4:
        raise ValueError("at most 4 Kraus operators are supported")

    out = np.empty((M, T, 4), dtype=np.float64)
    cdef double[:, :, ::1] O = out

    cdef cplx X[16]      # column-major: X[p + 4 * i], SA index p = 2 s + a, branch i
    cdef cplx W[16]      # scratch for the SVD
    cdef double sv[4]
    cdef Py_ssize_t m, t, i, j, s, a, p
    cdef cplx acc, rs01, ra01
    cdef double rs00, rs11, ra00, ra11, ent

    with nogil:
        for m in range(M):
            for t in range(T):
                for i in range(4):
                    for s in range(2):
                        for a in range(2):
                            if i < n:
                                acc = K[t, i, s, 0] * P[m, a] + K[t, i, s, 1] * P[m, 2 + a]
                            else:
                                acc = 0
                            X[2 * s + a + 4 * i] = acc

                rs00 = 0.0
                rs11 = 0.0
                ra00 = 0.0
                ra11 = 0.0
                rs01 = 0
                ra01 = 0
                for i in range(4):
                    rs00 += abs2(X[0 + 4 * i]) + abs2(X[1 + 4 * i])
                    rs11 += abs2(X[2 + 4 * i]) + abs2(X[3 + 4 * i])
                    rs01 += X[0 + 4 * i] * conj(X[2 + 4 * i]) + X[1 + 4 * i] * conj(X[3 + 4 * i])
                    ra00 += abs2(X[0 + 4 * i]) + abs2(X[2 + 4 * i])
                    ra11 += abs2(X[1 + 4 * i]) + abs2(X[3 + 4 * i])
                    ra01 += X[0 + 4 * i] * conj(X[1 + 4 * i]) + X[2 + 4 * i] * conj(X[3 + 4 * i])
                O[m, t, 0] = entropy2(rs00, rs11, rs01)
                O[m, t, 1] = entropy2(ra00, ra11, ra01)

                # spectrum of rho_SA = squared singular values of X
                for p in range(16):
                    W[p] = X[p]
                if svd4(W, sv) < 0:
                    O[m, t, 2] = NAN
                else:
                    ent = 0.0
                    for i in range(4):
                        ent -= xlogx(sv[i] * sv[i])
                    O[m, t, 2] = ent

                if not with_concurrence:
                    O[m, t, 3] = NAN
                    continue
                # tau = X^T (sigma_y x sigma_y) X, antidiagonal (-1, 1, 1, -1)
                for j in range(4):
                    for i in range(4):
                        W[i + 4 * j] = (
                            - X[0 + 4 * i] * X[3 + 4 * j]
                            + X[1 + 4 * i] * X[2 + 4 * j]
                            + X[2 + 4 * i] * X[1 + 4 * j]
                            - X[3 + 4 * i] * X[0 + 4 * j]
                        )
                if svd4(W, sv) < 0:
                    O[m, t, 3] = NAN
                else:
                    ent = sv[0] - sv[1] - sv[2] - sv[3]
                    O[m, t, 3] = ent if ent > 0.0 else 0.0
    return out
