"""Pure-numpy ensemble sweep; the portable fallback for the compiled kernel.

Vectorized over detuning nodes, sequential over the time grid.  Half-step
field values come from the 4-point cubic midpoint stencil (one-sided at
the grid edges), which keeps the RK4 time stepping genuinely 4th order;
plain linear interpolation of the endpoint samples would degrade it to
2nd.  Columns ahead of the first nonzero field sample are skipped
outright: a diagonal seed state under zero field and diagonal
Hamiltonian is an exact fixed point of the RK4 step, so the skip is
bit-identical to stepping.
"""

import numpy as np

from ..bloch import COHERENCE_INDEX, rk4_step


def _first_step(omega):
    """Index of the first time step whose field stencil is not all zero."""
    active = np.flatnonzero((omega != 0).any(axis=0))
    if active.size == 0:
        return omega.shape[1] - 1
    return max(0, int(active[0]) - 2)


def _midpoint(omega, k, n_t):
    if n_t < 4:
        return 0.5 * (omega[:, k] + omega[:, k + 1])
    if k == 0:
        return (5.0 * omega[:, 0] + 15.0 * omega[:, 1]
                - 5.0 * omega[:, 2] + omega[:, 3]) / 16.0
    if k == n_t - 2:
        return (omega[:, n_t - 4] - 5.0 * omega[:, n_t - 3]
                + 15.0 * omega[:, n_t - 2] + 5.0 * omega[:, n_t - 1]) / 16.0
    return (-omega[:, k - 1] + 9.0 * omega[:, k]
            + 9.0 * omega[:, k + 1] - omega[:, k + 2]) / 16.0


def sweep_coherences(omega, nodes, weights, rho0, dt, num_threads=0):
    """Sweep the detuning ensemble across the time grid under fixed fields.

    ``num_threads`` is accepted for interface parity and ignored.
    """
    omega = np.ascontiguousarray(omega, dtype=np.complex128)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    n_t = omega.shape[1]
    states = np.repeat(np.asarray(rho0, dtype=np.complex128)[None, :, :],
                       len(nodes), axis=0)
    coh = np.zeros((4, n_t), dtype=np.complex128)
    k_start = _first_step(omega)
    for k in range(k_start, n_t):
        for c, (i, j) in enumerate(COHERENCE_INDEX):
            coh[c, k] = np.dot(weights, states[:, i, j])
        if k == n_t - 1:
            break
        states = rk4_step(states, nodes, omega[:, k],
                          _midpoint(omega, k, n_t), omega[:, k + 1], dt)
    return coh, states
