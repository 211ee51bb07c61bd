"""Pure-numpy fallback for the hot kernels.

Mirrors ``_speedups.pyx`` operation for operation (same arithmetic, same
association order), so both backends produce identical trajectories.
"""

import numpy as np


def rhs(u, g, alpha, beta, delta, gamma, mu):
    """Combined-model right-hand side on a fixed window, zero Dirichlet ends.

    out_n = (1-delta) u_n + (1+i alpha)(u_{n+1} - 2 u_n + u_{n-1})
            - (1+i beta) |u_n|^2 (gamma u_n + (mu/2)(u_{n+1} + u_{n-1})) + g_n
    """
    lap = -2.0 * u
    lap[:-1] += u[1:]
    lap[1:] += u[:-1]
    nb = np.zeros_like(u)
    nb[:-1] += u[1:]
    nb[1:] += u[:-1]
    a2 = u.real * u.real + u.imag * u.imag
    cub = a2 * (gamma * u + (0.5 * mu) * nb)
    return ((1.0 - delta) * u + (1.0 + 1j * alpha) * lap - (1.0 + 1j * beta) * cub) + g
