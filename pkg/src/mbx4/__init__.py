"""Four-pulse coherent propagation in four-level resonant media.

Core pieces: a closed-form soliton family with exact area and
group-velocity laws (`mbx4.analytic`), a depth-marching solver coupling
the atomic von Neumann equation to the four envelope equations
(`mbx4.solver`, hot loop in `mbx4.kernels`), pulse-area and sech-fit
diagnostics (`mbx4.diagnostics`), and a config-driven CLI (`mbx4.cli`).
"""

__version__ = "0.1.0"

from .analytic import (GroupVelocities, SolitonParams, analytic_areas,
                       analytic_fields, fundamental_rabi, group_velocities,
                       kappa_average, phi)
from .bloch import (DetuningEnsemble, averaged_coherences, build_hamiltonian,
                    step_ensemble, von_neumann_rhs)
from .core import (CHANNELS, DomainError, FieldSnapshot, MediumSpec,
                   PulseSpec, RetardedGrid, SchemaError, generate_pulse,
                   initial_snapshot, make_seed_state, validate_density_matrix)
from .diagnostics import (AreaRecord, SechFit, fit_sech, pulse_area,
                          total_areas, track_peaks)
from .solver import (NumericalAbort, PropagationResult, SolverConfig,
                     commutator_consistency_check, maxwell_rhs, propagate)

__all__ = [
    "__version__",
    "CHANNELS", "DomainError", "SchemaError",
    "RetardedGrid", "FieldSnapshot", "MediumSpec", "PulseSpec",
    "make_seed_state", "validate_density_matrix", "generate_pulse",
    "initial_snapshot",
    "SolitonParams", "GroupVelocities", "kappa_average", "phi",
    "fundamental_rabi", "analytic_fields", "analytic_areas",
    "group_velocities",
    "DetuningEnsemble", "build_hamiltonian", "von_neumann_rhs",
    "step_ensemble", "averaged_coherences",
    "SolverConfig", "PropagationResult", "NumericalAbort", "maxwell_rhs",
    "propagate", "commutator_consistency_check",
    "AreaRecord", "SechFit", "pulse_area", "total_areas", "fit_sech",
    "track_peaks",
]
