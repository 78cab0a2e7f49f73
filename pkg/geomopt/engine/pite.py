"""
PITE geometry optimization pipeline.

Prepares sum_J sqrt(w_0J) |psi_ref[J]> |J>, evolves it in imaginary time,
and reads the optimal geometry from the nuclear-register weights. Also holds
the closed-form classical point-charge variant and the exact spectral-weight
oracle used to check Trotterized runs.
"""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import logsumexp

from geomopt.engine.hamiltonian import (
    DEFAULT_DENSE_CAP,
    CompositeHamiltonian,
    geometry_spectra,
)
from geomopt.engine.potentials import ilj_interaction_energy
from geomopt.engine.propagator import (
    DEFAULT_GAMMA,
    CompositeState,
    SplitOperatorPropagator,
    TauSchedule,
    tau_at,
)
from geomopt.exceptions import CapacityError, InvalidParameterError, ResolutionError

logger = logging.getLogger(__name__)

REFERENCE_KINDS = ('gaussian_symmetric', 'gaussian_antisymmetric', 'custom')
PRNG_ALGORITHM = 'numpy.random.PCG64'


@dataclass(frozen=True)
class InitialGuess:
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise InvalidParameterError('weights', weights.shape, 'a non-empty vector')
        if np.any(weights < 0):
            raise InvalidParameterError('weights', weights.min(), 'non-negative')
        if abs(weights.sum() - 1.0) > 1e-10:
            raise InvalidParameterError('weights', weights.sum(), 'summing to 1')
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls, n_geometries):
        return cls(np.full(n_geometries, 1.0 / n_geometries))

    @classmethod
    def point_mass(cls, n_geometries, J):
        weights = np.zeros(n_geometries)
        weights[J] = 1.0
        return cls(weights)


@dataclass(frozen=True)
class ReferenceSpec:
    """
    Reference electronic state per geometry.

    Gaussians are centered on the centroid of the nuclei (the bond midpoint
    for diatomics). ``provider`` is called as provider(J, layout, grid) for
    the custom kind.
    """
    kind: str = 'gaussian_symmetric'
    width: float = 3.0
    provider: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise InvalidParameterError('kind', self.kind, f"one of {', '.join(REFERENCE_KINDS)}")
        if self.kind != 'custom' and not self.width > 0:
            raise InvalidParameterError('width', self.width, '> 0')
        if self.kind == 'custom' and self.provider is None:
            raise InvalidParameterError('provider', None, message="Custom references need a provider.")


def prepare_reference(J, spec, layout, grid):
    """Normalized reference state at geometry J, shaped like the electronic register."""
    if spec.kind == 'custom':
        state = np.asarray(spec.provider(J, layout, grid), dtype=complex).reshape(layout.electronic_shape)
    else:
        if spec.kind == 'gaussian_antisymmetric' and layout.n_electrons != 2:
            raise InvalidParameterError(
                'kind', spec.kind, message="Antisymmetric Gaussian references need exactly two electrons."
            )
        center = grid.coordinates(J).mean(axis=0)
        x = layout.grid_positions()
        squared = np.zeros(layout.electronic_shape)
        for axis in range(layout.n_axes):
            shape = [1] * layout.n_axes
            shape[axis] = layout.points_per_direction
            mu = axis % layout.spatial_dim
            squared = squared + np.square(x - center[mu]).reshape(shape)
        state = np.exp(-squared / spec.width ** 2)
        if spec.kind == 'gaussian_antisymmetric':
            # (x0 - x1) / w along the first direction
            x0 = x.reshape([-1] + [1] * (layout.n_axes - 1))
            x1 = x.reshape([1] * layout.spatial_dim + [-1] + [1] * (layout.n_axes - layout.spatial_dim - 1))
            state = state * (x0 - x1) / spec.width
        state = state.astype(complex)

    norm = np.linalg.norm(state)
    if not norm > 0:
        raise ResolutionError(J, spec.kind)
    return state / norm


def prepare_input(guess, spec, layout, grid):
    weights = np.asarray(guess.weights, dtype=float)
    if weights.size != grid.n_geometries:
        raise InvalidParameterError(
            'weights', weights.size, message=f"Initial guess has {weights.size} weights "
                                             f"for {grid.n_geometries} geometries."
        )
    amplitudes = np.zeros((grid.n_geometries,) + layout.electronic_shape, dtype=complex)
    for J in range(grid.n_geometries):
        if weights[J] > 0:
            amplitudes[J] = np.sqrt(weights[J]) * prepare_reference(J, spec, layout, grid)
    return CompositeState.normalized(amplitudes, layout, grid)


def extract_weights(state):
    amplitudes = state.amplitudes if isinstance(state, CompositeState) else np.asarray(state)
    axes = tuple(range(1, amplitudes.ndim))
    return np.sum(np.abs(amplitudes) ** 2, axis=axes)


def argmax_geometry(weights):
    """Index of the largest weight; ties go to the smallest flattened index."""
    weights = np.asarray(weights)
    if weights.size == 0:
        raise InvalidParameterError('weights', weights.size, 'non-empty')
    return int(np.argmax(weights))


def sample_histogram(weights, shots, seed):
    """
    Seeded multinomial draw of geometry outcomes by inverse-CDF sampling.

    Returns:
        Integer counts per geometry
    """
    if shots < 1:
        raise InvalidParameterError('shots', shots, '>= 1')
    weights = np.asarray(weights, dtype=float)
    cdf = np.cumsum(weights / weights.sum())
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = np.searchsorted(cdf, rng.random(shots), side='right')
    draws = np.minimum(draws, weights.size - 1)
    return np.bincount(draws, minlength=weights.size)


@dataclass
class PiteConfig:
    system: object
    schedule: TauSchedule
    n_steps: int
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    guess: InitialGuess = None
    gamma: float = DEFAULT_GAMMA
    energy_shift: float = None
    ground_state_weights: bool = True
    shots: int = 1000
    seed: int = 0
    dense_cap: int = DEFAULT_DENSE_CAP
    threads: int = 1


@dataclass
class PiteReport:
    """
    Per-step weights (row s is the state after s steps, row 0 the input).
    """
    weights: np.ndarray
    dtaus: np.ndarray
    success_probabilities: np.ndarray
    argmax_trajectory: list
    histogram: np.ndarray
    ground_state_weights: np.ndarray = None
    ground_energies: np.ndarray = None
    energies_before: np.ndarray = None
    energies_after: np.ndarray = None
    metadata: dict = field(default_factory=dict)

    @property
    def cumulative_probability(self):
        return float(np.prod(self.success_probabilities)) if len(self.success_probabilities) else 1.0

    @property
    def final_weights(self):
        return self.weights[-1]

    @property
    def optimal_geometry(self):
        return self.argmax_trajectory[-1]

    def to_dict(self):
        def plain(value):
            return value.tolist() if isinstance(value, np.ndarray) else value
        return {
            'metadata': self.metadata,
            'dtaus': plain(self.dtaus),
            'weights': plain(self.weights),
            'success_probabilities': plain(self.success_probabilities),
            'cumulative_probability': self.cumulative_probability,
            'argmax_trajectory': self.argmax_trajectory,
            'histogram': plain(self.histogram),
            'ground_state_weights': plain(self.ground_state_weights),
            'ground_energies': plain(self.ground_energies),
            'energies_before': plain(self.energies_before),
            'energies_after': plain(self.energies_after),
        }


def _geometry_labels(grid, indices):
    return [list(grid.geometry_index(J)) if len(grid.active) > 1 else int(J) for J in indices]


def run_pite(config):
    """
    Full PITE geometry optimization on a quantum system.

    The per-geometry ground-state weights need a dense diagonalization per
    geometry and are skipped with a warning above the dense cap.
    """
    system = config.system
    layout, grid = system.layout, system.grid
    guess = config.guess or InitialGuess.uniform(grid.n_geometries)

    hamiltonian = CompositeHamiltonian(system)
    propagator = SplitOperatorPropagator(hamiltonian)
    energy_shift = config.energy_shift
    if energy_shift is None:
        energy_shift = propagator.default_energy_shift()

    state = prepare_input(guess, config.reference, layout, grid)
    logger.info(
        f"PITE: {grid.n_geometries} geometries x {layout.electronic_dimension} grid points, "
        f"{config.n_steps} steps, reference {config.reference.kind}"
    )
    trajectory = propagator.evolve_ite(state, config.n_steps, config.schedule, config.gamma, energy_shift)
    states = [trajectory.initial] + [o.state for o in trajectory.outcomes]
    weights = np.stack([extract_weights(s) for s in states])
    # rows renormalized against accumulated rounding
    weights = weights / weights.sum(axis=1, keepdims=True)

    gs_weights = None
    ground_energies = None
    if config.ground_state_weights:
        try:
            spectra = geometry_spectra(system, n_states=1, dense_cap=config.dense_cap,
                                       threads=config.threads, potential=hamiltonian.potential)
        except CapacityError as e:
            logger.warning(f"Skipping ground-state weights: {e}")
        else:
            ground_energies = np.array([s.eigenvalues[0] for s in spectra])
            gs_weights = np.array([
                [abs(np.vdot(spectra[J].state(0), s.amplitudes[J].reshape(-1))) ** 2
                 for J in range(grid.n_geometries)]
                for s in states
            ])

    argmax_trajectory = [argmax_geometry(row) for row in weights]
    histogram = sample_histogram(weights[-1], config.shots, config.seed)
    return PiteReport(
        weights=weights,
        dtaus=np.array([o.dtau for o in trajectory.outcomes]),
        success_probabilities=np.array([o.success_probability for o in trajectory.outcomes]),
        argmax_trajectory=argmax_trajectory,
        histogram=histogram,
        ground_state_weights=gs_weights,
        ground_energies=ground_energies,
        energies_before=np.array([o.energy_before for o in trajectory.outcomes]),
        energies_after=np.array([o.energy_after for o in trajectory.outcomes]),
        metadata={
            'experiment': 'pite',
            'n_steps': config.n_steps,
            'schedule': asdict(config.schedule),
            'gamma': config.gamma,
            'energy_shift': energy_shift,
            'reference': {'kind': config.reference.kind, 'width': config.reference.width},
            'geometry_shape': list(grid.shape),
            'candidates': [list(grid.active_values(J)) for J in range(grid.n_geometries)],
            'optimal_geometry': _geometry_labels(grid, [argmax_trajectory[-1]])[0],
            'shots': config.shots,
            'seed': config.seed,
            'prng': PRNG_ALGORITHM,
            'numpy_version': np.__version__,
        },
    )


def classical_pair_energies(grid, pair_potential):
    """E_J = sum over nuclear pairs of Z Z v(|R - R'|) for point charges."""
    positions = grid.all_coordinates()
    charges = grid.charges
    energies = np.zeros(grid.n_geometries)
    for a in range(grid.n_nuclei):
        for b in range(a + 1, grid.n_nuclei):
            r = np.linalg.norm(positions[:, a] - positions[:, b], axis=-1)
            energies += charges[a] * charges[b] * pair_potential(r)
    return energies


def classical_ilj_energies(grid, molecule, params, probe=0):
    """ILJ energy of the probe nucleus against a fixed molecule, per geometry."""
    positions = grid.all_coordinates()[:, probe, :]
    return ilj_interaction_energy(positions, molecule, params)


def run_classical_pite(grid, energies, schedule, n_steps, guess=None, shots=1000, seed=0):
    """
    Closed-form PITE on a diagonal classical Hamiltonian.

    w_J(tau) is proportional to w_0J exp(-2 E_J tau), evaluated in log space.

    Args:
        grid: GeometryGrid of the candidates
        energies: Candidate energies E_J (flattened geometry order)
        schedule: TauSchedule (use TauSchedule.constant for a fixed dtau)
        n_steps: Number of steps
    """
    energies = np.asarray(energies, dtype=float)
    guess = guess or InitialGuess.uniform(grid.n_geometries)
    dtaus = np.array(schedule.steps(n_steps))
    taus = np.concatenate([[0.0], np.cumsum(dtaus)])

    with np.errstate(divide='ignore'):
        log_w0 = np.log(np.asarray(guess.weights, dtype=float))
    logs = log_w0[None, :] - 2.0 * taus[:, None] * energies[None, :]
    weights = np.exp(logs - logsumexp(logs, axis=1, keepdims=True))

    argmax_trajectory = [argmax_geometry(row) for row in weights]
    labels = _geometry_labels(grid, argmax_trajectory)
    logger.info(f"Classical PITE: optimal geometry {labels[-1]} after {n_steps} steps")
    return PiteReport(
        weights=weights,
        dtaus=dtaus,
        success_probabilities=np.ones(n_steps),
        argmax_trajectory=argmax_trajectory,
        histogram=sample_histogram(weights[-1], shots, seed),
        ground_energies=energies,
        metadata={
            'experiment': 'classical-pite',
            'n_steps': n_steps,
            'schedule': asdict(schedule),
            'geometry_shape': list(grid.shape),
            'candidates': [list(grid.active_values(J)) for J in range(grid.n_geometries)],
            'argmax_labels': labels,
            'optimal_geometry': labels[-1],
            'shots': shots,
            'seed': seed,
            'prng': PRNG_ALGORITHM,
            'numpy_version': np.__version__,
        },
    )


def accumulated_tau(schedule, n_steps):
    return float(sum(tau_at(k, schedule) for k in range(n_steps)))


def spectral_weight_oracle(system, guess, spec, tau, spectra=None, dense_cap=DEFAULT_DENSE_CAP, threads=1):
    """
    Exact imaginary-time geometry weights from per-geometry spectra.

    w_J(tau) is proportional to w_0J sum_n |<phi_n[J]|psi_ref[J]>|^2 exp(-2 E_n[J] tau).
    """
    layout, grid = system.layout, system.grid
    if spectra is None:
        spectra = geometry_spectra(system, dense_cap=dense_cap, threads=threads)
    with np.errstate(divide='ignore'):
        log_w0 = np.log(np.asarray(guess.weights, dtype=float))

    logs = np.full(grid.n_geometries, -np.inf)
    for J in range(grid.n_geometries):
        if not np.isfinite(log_w0[J]):
            continue
        reference = prepare_reference(J, spec, layout, grid).reshape(-1)
        overlaps = np.abs(spectra[J].eigenvectors.conj().T @ reference) ** 2
        with np.errstate(divide='ignore'):
            terms = np.log(overlaps) - 2.0 * spectra[J].eigenvalues * tau
        logs[J] = log_w0[J] + logsumexp(terms)
    return np.exp(logs - logsumexp(logs))
