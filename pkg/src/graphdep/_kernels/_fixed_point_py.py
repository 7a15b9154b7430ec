"""NumPy fallback for the fixed-point kernel.

Must stay in lockstep with _fixed_point.pyx: same start point, damping
schedule, restart policy, and stopping rules.  Results agree with the
compiled kernel up to summation rounding.
"""

from __future__ import annotations

import numpy as np


def solve_grid(lam, w, rho, z_points, tol, max_iter, alpha, max_halvings):
    """Solve the fixed point at each z; returns (s, residual, iterations, converged)."""
    lam = np.asarray(lam, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    z_points = np.asarray(z_points, dtype=np.complex128)
    npts = z_points.size
    s_out = np.empty(npts, dtype=np.complex128)
    res_out = np.empty(npts, dtype=np.float64)
    iter_out = np.empty(npts, dtype=np.int64)
    conv_out = np.empty(npts, dtype=np.bool_)
    for i in range(npts):
        z = complex(z_points[i])
        s0 = -1.0 / z
        s = s0
        a = alpha
        halvings = 0
        it = 0
        ok = False
        r = 0.0
        while True:
            coef = 1.0 - rho - rho * z * s
            f = complex(np.sum(w / (lam * coef - z)))
            r = abs(s - f)
            if r == r and r <= tol:
                ok = True
                break
            if it >= max_iter:
                break
            it += 1
            s_new = (1.0 - a) * s + a * f
            if s_new != s_new or s_new.imag <= 0.0:
                halvings += 1
                if halvings > max_halvings:
                    break
                a *= 0.5
                s = s0
            else:
                s = s_new
        s_out[i] = s
        res_out[i] = r
        iter_out[i] = it
        conv_out[i] = ok
    return s_out, res_out, iter_out, conv_out
