"""Atomic response: RWA Hamiltonian, von Neumann evolution, detuning ensembles.

Level ordering is (1, 2, 3, 4): two lower levels coupled to two upper
levels by four fields, with common detuning Delta on both upper levels.
With zero fields and a detuned atom the coherence rho_13 obeys
d(rho_13)/dT = -i*Delta*rho_13, i.e. it rotates as exp(-i*Delta*T); the
same convention is used everywhere (kernels included).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DomainError, MediumSpec, make_seed_state

# Upper-triangle indices of the four field-driven coherences, in channel
# order: rho_13, rho_14, rho_23, rho_24.
COHERENCE_INDEX = ((0, 2), (0, 3), (1, 2), (1, 3))

STABILITY_LIMIT = 0.5  # dt * max(|Omega|, |Delta|) above this is unreliable


def gauss_hermite_detunings(t2_star, n_nodes):
    """Detuning nodes and weights for the Gaussian distribution of width 1/t2_star.

    Gauss-Hermite abscissas in the scaled variable x = Delta*t2_star/sqrt(2)
    integrate the Gaussian weight exactly; weights are renormalized to sum
    to one.
    """
    if not t2_star > 0:
        raise DomainError(f"t2_star must be positive, got {t2_star}")
    if n_nodes < 1:
        raise DomainError(f"n_nodes must be >= 1, got {n_nodes}")
    x, w = np.polynomial.hermite.hermgauss(n_nodes)
    return np.sqrt(2.0) * x / t2_star, w / w.sum()


def detuning_nodes(medium: MediumSpec):
    """Nodes and weights for a medium, honoring the sharp-line sentinel."""
    if medium.sharp_line:
        return np.zeros(1), np.ones(1)
    return gauss_hermite_detunings(medium.t2_star, medium.n_detuning)


@dataclass
class DetuningEnsemble:
    """Per-detuning atomic states with their quadrature weights."""

    nodes: np.ndarray
    weights: np.ndarray
    states: np.ndarray  # (n_nodes, 4, 4) complex

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=np.float64)
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        self.states = np.ascontiguousarray(self.states, dtype=np.complex128)
        n = len(self.nodes)
        if len(self.weights) != n or self.states.shape != (n, 4, 4):
            raise DomainError("nodes, weights and states must have matching lengths")
        if self.weights.min() < 0:
            raise DomainError("weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {self.weights.sum()}")

    @classmethod
    def from_medium(cls, medium: MediumSpec):
        nodes, weights = detuning_nodes(medium)
        seed = make_seed_state(medium.alpha_sq, medium.beta_sq)
        states = np.repeat(seed[None, :, :], len(nodes), axis=0)
        return cls(nodes=nodes, weights=weights, states=states)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)


def build_hamiltonian(fields, delta) -> np.ndarray:
    """RWA Hamiltonian (hbar = 1) for four field values and one detuning.

    Couplings sit on the lower-upper block only; the 1-2 and 3-4 entries
    are identically zero (parity-forbidden transitions).  Hermitian by
    construction.
    """
    oa, ob, oc, od = fields
    h = np.zeros((4, 4), dtype=np.complex128)
    h[0, 2] = -0.5 * oa
    h[0, 3] = -0.5 * ob
    h[1, 2] = -0.5 * oc
    h[1, 3] = -0.5 * od
    h[2, 0] = -0.5 * np.conj(oa)
    h[2, 1] = -0.5 * np.conj(oc)
    h[3, 0] = -0.5 * np.conj(ob)
    h[3, 1] = -0.5 * np.conj(od)
    h[2, 2] = -delta
    h[3, 3] = -delta
    return h


def von_neumann_rhs(rho, h) -> np.ndarray:
    """d(rho)/dT = -i[H, rho] (hbar = 1); traceless, Hermiticity-preserving."""
    return -1j * (h @ rho - rho @ h)


def _build_h_batch(fields, nodes):
    """Hamiltonians for one field sample across all detuning nodes: (n, 4, 4)."""
    base = build_hamiltonian(fields, 0.0)
    h = np.broadcast_to(base, (len(nodes), 4, 4)).copy()
    h[:, 2, 2] = -nodes
    h[:, 3, 3] = -nodes
    return h


def _rhs_batch(states, h):
    return -1j * (h @ states - states @ h)


def _hermitize(states):
    return 0.5 * (states + states.conj().transpose(0, 2, 1))


def rk4_step(states, nodes, fields_t, fields_mid, fields_t_dt, dt):
    """One classical RK4 step of the whole ensemble, then re-symmetrization.

    ``fields_mid`` supplies the half-step sample (callers interpolate the
    two endpoint samples linearly).  Re-symmetrizing after each step
    suppresses Hermiticity drift at negligible cost.
    """
    h0 = _build_h_batch(fields_t, nodes)
    hh = _build_h_batch(fields_mid, nodes)
    h1 = _build_h_batch(fields_t_dt, nodes)
    k1 = _rhs_batch(states, h0)
    k2 = _rhs_batch(states + 0.5 * dt * k1, hh)
    k3 = _rhs_batch(states + 0.5 * dt * k2, hh)
    k4 = _rhs_batch(states + dt * k3, h1)
    return _hermitize(states + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def check_stability(max_scale, dt, policy="warn"):
    """Guard dt * max(|Omega|, |Delta|) <= 0.5; warn or abort above it."""
    product = dt * max_scale
    if product > STABILITY_LIMIT:
        msg = (f"time step too coarse: dt*max(|Omega|,|Delta|) = {product:.3f} "
               f"exceeds {STABILITY_LIMIT}")
        if policy == "abort":
            raise DomainError(msg)
        warnings.warn(msg, stacklevel=3)


def step_ensemble(ensemble: DetuningEnsemble, fields_t, fields_t_dt, dt,
                  policy="warn") -> DetuningEnsemble:
    """Advance every detuning node by one RK4 step over [T, T + dt].

    Half-step field values are the linear interpolation of the two
    supplied samples.  Returns a new ensemble; the input is not mutated.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    fields_t = np.asarray(fields_t, dtype=np.complex128)
    fields_t_dt = np.asarray(fields_t_dt, dtype=np.complex128)
    scale = max(np.abs(fields_t).max(), np.abs(fields_t_dt).max(),
                np.abs(ensemble.nodes).max())
    check_stability(scale, dt, policy)
    mid = 0.5 * (fields_t + fields_t_dt)
    states = rk4_step(ensemble.states, ensemble.nodes, fields_t, mid,
                      fields_t_dt, dt)
    return DetuningEnsemble(nodes=ensemble.nodes, weights=ensemble.weights,
                            states=states)


def averaged_coherences(ensemble: DetuningEnsemble) -> np.ndarray:
    """Weighted ensemble averages (rho_13, rho_14, rho_23, rho_24)."""
    out = np.empty(4, dtype=np.complex128)
    for k, (i, j) in enumerate(COHERENCE_INDEX):
        out[k] = np.dot(ensemble.weights, ensemble.states[:, i, j])
    return out
