"""
First-order split-operator propagation of the composite state.

Each step applies the position-diagonal factor first and the Fourier
kinetic factor second. Imaginary-time steps model the success branch of a
probabilistic imaginary-time evolution: the state is renormalized and the
branch probability gamma^2 * ||exp(-(H - E_shift) dtau) psi||^2 is reported.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from geomopt.exceptions import InvalidParameterError, NumericalCollapseError

logger = logging.getLogger(__name__)

COLLAPSE_NORM = 1e-300
DEFAULT_GAMMA = 0.9


@dataclass(frozen=True)
class CompositeState:
    """Normalized amplitudes of shape (n_geometries, *electronic_shape)."""
    amplitudes: np.ndarray
    layout: object = field(default=None, compare=False)
    grid: object = field(default=None, compare=False)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    @property
    def flat(self):
        return self.amplitudes.reshape(-1)

    def with_amplitudes(self, amplitudes):
        return CompositeState(amplitudes, self.layout, self.grid)

    @classmethod
    def normalized(cls, amplitudes, layout=None, grid=None):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise InvalidParameterError('amplitudes', 0.0, message="Cannot normalize a zero state.")
        return cls(amplitudes / norm, layout, grid)


@dataclass(frozen=True)
class TauSchedule:
    """Imaginary-time steps rising from dtau_min to dtau_max over ~kappa steps."""
    dtau_min: float
    dtau_max: float
    kappa: float = 1.0

    def __post_init__(self):
        if not self.dtau_min > 0:
            raise InvalidParameterError('dtau_min', self.dtau_min, '> 0')
        if self.dtau_min > self.dtau_max:
            raise InvalidParameterError(
                'dtau_min', self.dtau_min,
                message=f"dtau_min ({self.dtau_min}) must not exceed dtau_max ({self.dtau_max})."
            )
        if not self.kappa > 0:
            raise InvalidParameterError('kappa', self.kappa, '> 0')

    @classmethod
    def constant(cls, dtau):
        return cls(dtau_min=dtau, dtau_max=dtau, kappa=1.0)

    def steps(self, n_steps):
        return [tau_at(k, self) for k in range(n_steps)]


def tau_at(k, schedule):
    if k < 0:
        raise InvalidParameterError('k', k, '>= 0')
    span = schedule.dtau_max - schedule.dtau_min
    return (1.0 - np.exp(-k / schedule.kappa)) * span + schedule.dtau_min


@dataclass(frozen=True)
class StepOutcome:
    state: CompositeState
    success_probability: float
    energy_before: float
    energy_after: float
    dtau: float
    raw_norm: float


@dataclass
class IteTrajectory:
    initial: CompositeState
    outcomes: list
    cumulative_probability: float = 1.0

    @property
    def final(self):
        return self.outcomes[-1].state if self.outcomes else self.initial

    def rows(self):
        """Rows of (step, dtau, energy_before, energy_after, p_k, cumulative_p)."""
        cumulative = 1.0
        rows = []
        for step, outcome in enumerate(self.outcomes, start=1):
            cumulative *= outcome.success_probability
            rows.append((step, outcome.dtau, outcome.energy_before, outcome.energy_after,
                         outcome.success_probability, cumulative))
        return rows


class SplitOperatorPropagator:
    """
    Trotterized real- and imaginary-time steps for a CompositeHamiltonian.

    Works for any state array whose shape matches the Hamiltonian's
    composite shape, including single-geometry systems.
    """

    def __init__(self, hamiltonian):
        self.hamiltonian = hamiltonian
        self.potential = hamiltonian.potential.values
        self.kinetic = hamiltonian.kinetic.values

    def _amplitudes(self, state):
        amplitudes = state.amplitudes if isinstance(state, CompositeState) else np.asarray(state)
        return np.reshape(amplitudes, self.hamiltonian.shape).astype(complex, copy=False)

    def rte_step(self, state, dt):
        psi = self._amplitudes(state)
        psi = np.exp(-1j * self.potential * dt) * psi
        psi = self.hamiltonian.to_position(np.exp(-1j * self.kinetic * dt) * self.hamiltonian.to_momentum(psi))
        if isinstance(state, CompositeState):
            return state.with_amplitudes(psi)
        return CompositeState(psi)

    def default_energy_shift(self):
        # minimum of the potential plus zero kinetic energy
        return float(self.potential.min())

    def ite_step(self, state, dtau, gamma=DEFAULT_GAMMA, energy_shift=None):
        """
        One imaginary-time step of the PITE success branch.

        Raises:
            NumericalCollapseError: If the raw norm underflows
        """
        if not 0 < gamma <= 1:
            raise InvalidParameterError('gamma', gamma, 'in (0, 1]')
        if energy_shift is None:
            energy_shift = self.default_energy_shift()

        psi = self._amplitudes(state)
        energy_before = self.hamiltonian.expectation(psi)

        phi = np.exp(-(self.potential - energy_shift) * dtau) * psi
        phi = self.hamiltonian.to_position(np.exp(-self.kinetic * dtau) * self.hamiltonian.to_momentum(phi))

        raw_norm = float(np.linalg.norm(phi))
        if not raw_norm >= COLLAPSE_NORM:
            raise NumericalCollapseError(raw_norm, dtau, energy_shift)
        probability = float(np.clip(gamma ** 2 * raw_norm ** 2, np.finfo(float).tiny, 1.0))

        phi = phi / raw_norm
        new_state = (state.with_amplitudes(phi) if isinstance(state, CompositeState)
                     else CompositeState(phi))
        return StepOutcome(
            state=new_state,
            success_probability=probability,
            energy_before=energy_before,
            energy_after=self.hamiltonian.expectation(phi),
            dtau=float(dtau),
            raw_norm=raw_norm,
        )

    def evolve_ite(self, state, n_steps, schedule, gamma=DEFAULT_GAMMA, energy_shift=None,
                   callback=None):
        """
        Run n_steps imaginary-time steps with dtau_k = tau_at(k) from k = 0.

        Args:
            callback: Optional callable(step, outcome) invoked after each step
        """
        if n_steps < 1:
            raise InvalidParameterError('n_steps', n_steps, '>= 1')
        if energy_shift is None:
            energy_shift = self.default_energy_shift()

        trajectory = IteTrajectory(initial=state, outcomes=[])
        current = state
        for k in range(n_steps):
            outcome = self.ite_step(current, tau_at(k, schedule), gamma, energy_shift)
            trajectory.outcomes.append(outcome)
            trajectory.cumulative_probability *= outcome.success_probability
            current = outcome.state
            logger.debug(
                f"ITE step {k + 1}/{n_steps}: dtau={outcome.dtau:.6f} "
                f"E={outcome.energy_after:.8f} p={outcome.success_probability:.6f}"
            )
            if callback is not None:
                callback(k + 1, outcome)
        return trajectory
