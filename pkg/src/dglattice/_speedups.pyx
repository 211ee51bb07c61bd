"""Compiled hot kernel: the lattice right-hand side evaluated site by site.

Arithmetic and association order mirror ``_kernels_py.rhs`` exactly so the
compiled and fallback backends produce identical trajectories.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def rhs(const double complex[::1] u, const double complex[::1] g,
        double alpha, double beta, double delta, double gamma, double mu):
    """Combined-model right-hand side on a fixed window, zero Dirichlet ends."""
    cdef Py_ssize_t w = u.shape[0]
    out_arr = np.empty(w, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double lin = 1.0 - delta
    cdef double halfmu = 0.5 * mu
    cdef double complex disp = 1.0 + alpha * 1j
    cdef double complex stiff = 1.0 + beta * 1j
    cdef double complex un, left, right, lap, nb, cub
    cdef double a2
    cdef Py_ssize_t n
    for n in range(w):
        un = u[n]
        right = u[n + 1] if n + 1 < w else 0
        left = u[n - 1] if n > 0 else 0
        lap = (-2.0 * un + right) + left
        nb = right + left
        a2 = un.real * un.real + un.imag * un.imag
        cub = a2 * (gamma * un + halfmu * nb)
        out[n] = ((lin * un + disp * lap) - stiff * cub) + g[n]
    return out_arr
