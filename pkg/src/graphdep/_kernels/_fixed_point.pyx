# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled damped fixed-point iteration for the spectral-law transform.

Semantics must stay in lockstep with _fixed_point_py.solve_grid: same
start point, damping schedule, restart policy, and stopping rules.
"""

import numpy as np


def solve_grid(double[::1] lam, double[::1] w, double rho,
               double complex[::1] z_points, double tol, long max_iter,
               double alpha, int max_halvings):
    """Solve the fixed point at each z; returns (s, residual, iterations, converged)."""
    cdef Py_ssize_t npts = z_points.shape[0]
    cdef Py_ssize_t natoms = lam.shape[0]
    s_out = np.empty(npts, dtype=np.complex128)
    res_out = np.empty(npts, dtype=np.float64)
    iter_out = np.empty(npts, dtype=np.int64)
    conv_out = np.empty(npts, dtype=np.bool_)
    cdef double complex[::1] s_view = s_out
    cdef double[::1] res_view = res_out
    cdef long[::1] iter_view = iter_out
    cdef unsigned char[::1] conv_view = conv_out.view(np.uint8)
    cdef double complex z, s, s0, s_new, coef, f
    cdef double a, r
    cdef long it
    cdef int halvings
    cdef Py_ssize_t i, j
    cdef bint ok
    for i in range(npts):
        z = z_points[i]
        s0 = -1.0 / z
        s = s0
        a = alpha
        halvings = 0
        it = 0
        ok = False
        r = 0.0
        while True:
            coef = 1.0 - rho - rho * z * s
            f = 0
            for j in range(natoms):
                f = f + w[j] / (lam[j] * coef - z)
            r = abs(s - f)
            if r == r and r <= tol:
                ok = True
                break
            if it >= max_iter:
                break
            it = it + 1
            s_new = (1.0 - a) * s + a * f
            if s_new != s_new or s_new.imag <= 0.0:
                halvings = halvings + 1
                if halvings > max_halvings:
                    break
                a = a * 0.5
                s = s0
            else:
                s = s_new
        s_view[i] = s
        res_view[i] = r
        iter_view[i] = it
        conv_view[i] = 1 if ok else 0
    return s_out, res_out, iter_out, conv_out
