"""Hot-loop backends for the retarded-time ensemble sweep.

The compiled Cython kernel is preferred when its extension module built;
otherwise the pure-numpy fallback is selected.  Both implement the same
contract:

    sweep_coherences(omega, nodes, weights, rho0, dt, num_threads=0)
        -> (coherences, final_states)

where ``omega`` is the (4, n_t) complex field array at fixed depth,
``coherences`` is the (4, n_t) weighted ensemble average of (rho_13,
rho_14, rho_23, rho_24) sampled before each time step, and
``final_states`` is the (n_nodes, 4, 4) ensemble at the last time
sample.  Set MBX4_FORCE_PYTHON=1 to force the fallback.
"""

import os

_force_python = os.environ.get("MBX4_FORCE_PYTHON", "").strip().lower() in (
    "1", "true", "yes")

if _force_python:
    from ._pysweep import sweep_coherences
    BACKEND = "python"
else:
    try:
        from ._csweep import sweep_coherences
        BACKEND = "cython"
    except ImportError:
        from ._pysweep import sweep_coherences
        BACKEND = "python"


def get_backend() -> str:
    return BACKEND


def resolve_threads(requested: int = 0) -> int:
    """Worker-thread cap: explicit request wins, then MBX4_THREADS, 0 = auto."""
    if requested > 0:
        return requested
    env = os.environ.get("MBX4_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value > 0:
            return value
    return 0
