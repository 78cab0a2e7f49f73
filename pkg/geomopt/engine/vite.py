"""
Variational imaginary-time evolution over the joint nuclear + electronic register.

Statevectors use qubit 0 as the most significant bit of the flat index. With
the nuclear qubits first, a statevector of the composite system is exactly
the flattened ``(n_geometries, *electronic_shape)`` array.

The ansatz is an initial rotation layer followed by ``depth`` repetitions of
[CZ on every qubit pair, rotation layer]. Parameter j sits on layer
``j // n_qubits`` and qubit ``j % n_qubits``.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from geomopt.engine.hamiltonian import DEFAULT_DENSE_CAP, CompositeHamiltonian, geometry_spectra
from geomopt.exceptions import BoundsError, InvalidParameterError, SingularityError

logger = logging.getLogger(__name__)

PAULI = {
    'x': np.array([[0, 1], [1, 0]], dtype=complex),
    'y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'z': np.array([[1, 0], [0, -1]], dtype=complex),
}

LAYER_COMPOSITION = 'initial rotation layer + depth x [all-pairs CZ entangler, rotation layer]'

INIT_STRATEGIES = ('superposition', 'random')


def rotation(axis, theta):
    """R_axis(theta) = exp(-i theta sigma / 2)."""
    return np.cos(theta / 2) * np.eye(2, dtype=complex) - 1j * np.sin(theta / 2) * PAULI[axis]


def _apply_1q(states, matrix, qubit):
    # states: (batch, 2, ..., 2)
    out = np.tensordot(matrix, states, axes=([1], [qubit + 1]))
    return np.moveaxis(out, 0, qubit + 1)


@dataclass(frozen=True)
class ViteAnsatz:
    n_qubits: int
    depth: int
    axes: tuple = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidParameterError('n_qubits', self.n_qubits, '>= 1')
        if self.depth < 0:
            raise InvalidParameterError('depth', self.depth, '>= 0')
        axes = self.axes
        if axes is None:
            axes = ('y',) * self.n_parameters
        elif isinstance(axes, str):
            axes = (axes,) * self.n_parameters if len(axes) == 1 else tuple(axes)
        axes = tuple(a.lower() for a in axes)
        if len(axes) != self.n_parameters or any(a not in PAULI for a in axes):
            raise InvalidParameterError(
                'axes', self.axes,
                message=f"Need one rotation axis in x/y/z per parameter ({self.n_parameters})."
            )
        object.__setattr__(self, 'axes', axes)

    @property
    def n_parameters(self):
        return self.n_qubits * (self.depth + 1)

    @property
    def dimension(self):
        return 2 ** self.n_qubits

    def entangler_pairs(self):
        return list(combinations(range(self.n_qubits), 2))

    def entangler_phases(self):
        """Diagonal of the full CZ layer: (-1)^(number of pairs of set bits)."""
        index = np.arange(self.dimension)
        ones = np.zeros(self.dimension, dtype=int)
        for q in range(self.n_qubits):
            ones += (index >> (self.n_qubits - 1 - q)) & 1
        return np.where((ones * (ones - 1) // 2) % 2 == 0, 1.0, -1.0)

    def check(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_parameters,):
            raise InvalidParameterError(
                'theta', theta.shape,
                message=f"Expected {self.n_parameters} parameters, got shape {theta.shape}."
            )
        return theta


def _tensor(vector, n_qubits):
    return np.reshape(vector, (-1,) + (2,) * n_qubits)


def states_and_gradients(ansatz, theta):
    """
    Trial state and all gradient states in one sweep.

    Returns:
        (phi, derivatives) with phi of shape (2**n,) and derivatives of shape
        (n_parameters, 2**n); row j is the circuit with (-i/2) sigma inserted
        right after rotation j.
    """
    theta = ansatz.check(theta)
    n = ansatz.n_qubits
    cz = _tensor(ansatz.entangler_phases(), n)

    state = np.zeros((1,) + (2,) * n, dtype=complex)
    state[(0,) * (n + 1)] = 1.0
    derivs = np.zeros((ansatz.n_parameters,) + (2,) * n, dtype=complex)

    j = 0
    for layer in range(ansatz.depth + 1):
        if layer > 0:
            state = state * cz
            derivs[:j] = derivs[:j] * cz
        for q in range(n):
            axis = ansatz.axes[j]
            gate = rotation(axis, theta[j])
            state = _apply_1q(state, gate, q)
            if j:
                derivs[:j] = _apply_1q(derivs[:j], gate, q)
            derivs[j] = _apply_1q(state, -0.5j * PAULI[axis], q)[0]
            j += 1
    return state.reshape(-1), derivs.reshape(ansatz.n_parameters, -1)


def apply_ansatz(ansatz, theta):
    theta = ansatz.check(theta)
    n = ansatz.n_qubits
    cz = _tensor(ansatz.entangler_phases(), n)
    state = np.zeros((1,) + (2,) * n, dtype=complex)
    state[(0,) * (n + 1)] = 1.0
    j = 0
    for layer in range(ansatz.depth + 1):
        if layer > 0:
            state = state * cz
        for q in range(n):
            state = _apply_1q(state, rotation(ansatz.axes[j], theta[j]), q)
            j += 1
    return state.reshape(-1)


def initial_parameters(ansatz, rng, strategy='superposition', spread=0.05):
    """
    Starting angles for the parameter flow.

    ``superposition`` puts pi/2 on the initial rotation layer and near-zero
    angles everywhere else. For x or y rotations every geometry and every grid
    point then starts with the same weight, and the repeated layers start close
    to the identity. The seeded jitter has half-width ``spread``. ``random``
    draws every angle from [0, 2pi).
    """
    if strategy == 'random':
        return rng.uniform(0.0, 2.0 * np.pi, ansatz.n_parameters)
    if strategy != 'superposition':
        raise InvalidParameterError('init', strategy, f"one of {', '.join(INIT_STRATEGIES)}")
    if spread < 0:
        raise InvalidParameterError('init_spread', spread, '>= 0')
    theta = rng.uniform(-spread, spread, ansatz.n_parameters)
    theta[:ansatz.n_qubits] += 0.5 * np.pi
    return theta


def gradient_state(ansatz, theta, j):
    if not 0 <= j < ansatz.n_parameters:
        raise BoundsError('parameter', j, ansatz.n_parameters)
    return states_and_gradients(ansatz, theta)[1][j]


def m_matrix(ansatz, theta, derivatives=None):
    """M_jk = Re <d_j Phi | d_k Phi>."""
    if derivatives is None:
        derivatives = states_and_gradients(ansatz, theta)[1]
    M = np.real(derivatives.conj() @ derivatives.T)
    return 0.5 * (M + M.T)


def _hamiltonian_action(hamiltonian):
    if callable(hamiltonian) and not isinstance(hamiltonian, np.ndarray):
        return hamiltonian
    if hasattr(hamiltonian, 'apply'):
        return hamiltonian.apply
    matrix = np.asarray(hamiltonian)
    return lambda vector: matrix @ vector


def v_vector(ansatz, theta, hamiltonian, phi=None, derivatives=None):
    """
    V_j = -Re <d_j Phi | H | Phi>.

    ``hamiltonian`` may be a CompositeHamiltonian, a dense matrix, or a
    callable mapping a statevector to H times it.
    """
    if phi is None or derivatives is None:
        phi, derivatives = states_and_gradients(ansatz, theta)
    h_phi = _hamiltonian_action(hamiltonian)(phi)
    return -np.real(derivatives.conj() @ h_phi)


def vite_update(theta, M, V, dtau, lambda_reg):
    """
    theta + dtau * (M + lambda_reg I)^-1 V.

    Raises:
        SingularityError: If the regularized system cannot be solved
    """
    A = np.asarray(M, dtype=float) + lambda_reg * np.eye(len(theta))
    try:
        step = scipy.linalg.solve(A, np.asarray(V, dtype=float), assume_a='sym')
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise SingularityError(lambda_reg, str(e))
    if not np.all(np.isfinite(step)):
        raise SingularityError(lambda_reg, 'non-finite solution')
    return np.asarray(theta, dtype=float) + dtau * step


@dataclass(frozen=True)
class AncillaProbe:
    """Analytic outcome probabilities of the one-ancilla matrix-element circuit."""
    phase: float
    probabilities: np.ndarray
    derivative_index: int = None

    @property
    def total(self):
        return float(self.probabilities.sum())


def ancilla_probabilities(w_state, u_state, phase, diagonal, derivative_index=None):
    """
    P(s, k) for ancilla outcome s and basis outcome k, plus the recovered value.

    P(s, k) = |w_k|^2 / 4 + |u_k|^2 / 4 + (-1)^s / 2 (cos(phase) Re v_k - sin(phase) Im v_k)
    with v_k = conj(w_k) u_k. At phase = pi/2 the sum of (-1)^s V_kk P(s, k)
    equals -Im <W|V|U>.

    Returns:
        (AncillaProbe, recovered)
    """
    w_state = np.asarray(w_state, dtype=complex).reshape(-1)
    u_state = np.asarray(u_state, dtype=complex).reshape(-1)
    diagonal = np.asarray(diagonal).reshape(-1)
    if w_state.shape != u_state.shape or diagonal.shape != w_state.shape:
        raise InvalidParameterError(
            'states', (w_state.shape, u_state.shape, diagonal.shape),
            message="W|0>, U|0> and the diagonal observable need the same dimension."
        )
    v = np.conj(w_state) * u_state
    base = 0.25 * (np.abs(w_state) ** 2 + np.abs(u_state) ** 2)
    interference = 0.5 * (np.cos(phase) * v.real - np.sin(phase) * v.imag)
    probabilities = np.stack([base + interference, base - interference])
    recovered = float(np.sum(diagonal * (probabilities[0] - probabilities[1])).real)
    return AncillaProbe(phase, probabilities, derivative_index), recovered


def v_vector_via_ancilla(ansatz, theta, hamiltonian):
    """
    V computed only from ancilla probability tables.

    W_j|0> = 2i dPhi_j and U|0> = Phi. The potential term is probed in the
    computational basis; the kinetic term after an orthonormal Fourier
    transform of the electronic register.
    """
    phi, derivatives = states_and_gradients(ansatz, theta)
    u_momentum = hamiltonian.to_momentum(phi.reshape(hamiltonian.shape)).reshape(-1)
    potential = hamiltonian.potential.values.reshape(-1)
    kinetic = np.broadcast_to(hamiltonian.kinetic.values, hamiltonian.shape).reshape(-1)

    values = np.zeros(ansatz.n_parameters)
    for j in range(ansatz.n_parameters):
        w_position = 2j * derivatives[j]
        w_momentum = hamiltonian.to_momentum(w_position.reshape(hamiltonian.shape)).reshape(-1)
        _, rec_v = ancilla_probabilities(w_position, phi, np.pi / 2, potential, j)
        _, rec_t = ancilla_probabilities(w_momentum, u_momentum, np.pi / 2, kinetic, j)
        # recovered = -Im<W|H|U> = 2 Re<dPhi|H|Phi>
        values[j] = -0.5 * (rec_v + rec_t)
    return values


@dataclass
class ViteConfig:
    system: object
    depth: int = 12
    dtau: float = 0.01
    steps: int = 6000
    lambda_reg: float = 1e-6
    axes: object = 'y'
    init: str = 'superposition'
    init_spread: float = 0.05
    seed: int = 0
    record_every: int = 1
    target_geometry: int = 2
    n_eigencomponents: int = 3
    dense_cap: int = DEFAULT_DENSE_CAP
    threads: int = 1


@dataclass
class ViteState:
    theta: np.ndarray
    dtau: float
    lambda_reg: float
    steps: list = field(default_factory=list)
    energy_errors: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    eigencomponents: list = field(default_factory=list)
    exact_energy: float = None
    metadata: dict = field(default_factory=dict)

    def rows(self):
        return [
            [step, error] + list(w) + list(c)
            for step, error, w, c in zip(self.steps, self.energy_errors, self.weights, self.eigencomponents)
        ]

    def to_dict(self):
        return {
            'metadata': self.metadata,
            'exact_energy': self.exact_energy,
            'final_theta': self.theta.tolist(),
            'steps': list(self.steps),
            'energy_errors': list(self.energy_errors),
            'weights': [list(w) for w in self.weights],
            'eigencomponents': [list(c) for c in self.eigencomponents],
        }


def run_vite(config):
    """
    VITE on the joint register of a MolecularSystem.

    Eigencomponent weights are |<phi_n[J*]|Phi_J*>|^2 renormalized within the
    target geometry block J*.
    """
    system = config.system
    layout, grid = system.layout, system.grid
    hamiltonian = CompositeHamiltonian(system)
    n_qubits = grid.nuclear_qubits + layout.electronic_qubits
    if 2 ** n_qubits != hamiltonian.dimension:
        raise InvalidParameterError(
            'n_qubits', n_qubits, message="Composite dimension is not a power of two."
        )
    if not 0 <= config.target_geometry < grid.n_geometries:
        raise BoundsError('target geometry', config.target_geometry, grid.n_geometries)

    spectra = geometry_spectra(system, n_states=config.n_eigencomponents, dense_cap=config.dense_cap,
                               threads=config.threads, potential=hamiltonian.potential)
    exact_energy = float(min(s.eigenvalues[0] for s in spectra))
    target = spectra[config.target_geometry].eigenvectors

    ansatz = ViteAnsatz(n_qubits, config.depth, config.axes)
    rng = np.random.default_rng(config.seed)
    theta = initial_parameters(ansatz, rng, config.init, config.init_spread)
    result = ViteState(theta=theta, dtau=config.dtau, lambda_reg=config.lambda_reg, exact_energy=exact_energy)
    logger.info(
        f"VITE: {n_qubits} qubits, depth {config.depth}, {ansatz.n_parameters} parameters, "
        f"{config.steps} steps, {config.init} start, E_exact = {exact_energy:.8f}"
    )

    for step in range(config.steps + 1):
        phi, derivatives = states_and_gradients(ansatz, theta)
        if step % config.record_every == 0 or step == config.steps:
            blocks = phi.reshape(grid.n_geometries, -1)
            weights = np.sum(np.abs(blocks) ** 2, axis=1)
            block = blocks[config.target_geometry]
            block_weight = weights[config.target_geometry]
            components = np.abs(target.conj().T @ block) ** 2
            components = components / block_weight if block_weight > 0 else components
            result.steps.append(step)
            result.energy_errors.append(hamiltonian.expectation(phi) - exact_energy)
            result.weights.append(weights.tolist())
            result.eigencomponents.append(components.tolist())
            if step % max(1, config.steps // 10) == 0:
                logger.info(f"VITE step {step}: E - E_exact = {result.energy_errors[-1]:.3e}")
        if step == config.steps:
            break
        M = m_matrix(ansatz, theta, derivatives)
        V = v_vector(ansatz, theta, hamiltonian, phi, derivatives)
        theta = vite_update(theta, M, V, config.dtau, config.lambda_reg)

    result.theta = theta
    result.metadata = {
        'experiment': 'vite',
        'n_qubits': n_qubits,
        'depth': config.depth,
        'n_parameters': ansatz.n_parameters,
        'axes': ''.join(ansatz.axes) if len(set(ansatz.axes)) > 1 else ansatz.axes[0],
        'layer_composition': LAYER_COMPOSITION,
        'dtau': config.dtau,
        'steps': config.steps,
        'lambda_reg': config.lambda_reg,
        'init': config.init,
        'init_spread': config.init_spread if config.init == 'superposition' else None,
        'seed': config.seed,
        'target_geometry': config.target_geometry,
        'candidates': [list(grid.active_values(J)) for J in range(grid.n_geometries)],
        'prng': 'numpy.random.PCG64',
        'numpy_version': np.__version__,
    }
    return result
