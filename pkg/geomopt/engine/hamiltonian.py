"""
Composite Hamiltonian over electrons and candidate geometries.

The potential is diagonal in position and is tabulated for every geometry.
The kinetic energy is diagonal in momentum and applied with orthonormal FFTs
over the electron axes. Small systems can also be assembled as dense
matrices from the same spectral definition and diagonalized per geometry.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from geomopt.engine.potentials import ExternalField
from geomopt.engine.registers import DEFAULT_MAX_AMPLITUDES, GeometryGrid, RegisterLayout
from geomopt.exceptions import (
    CapacityError,
    InvalidParameterError,
    NonHermitianError,
    SingularPotentialError,
)

logger = logging.getLogger(__name__)

DEFAULT_DENSE_CAP = 8192


@dataclass(frozen=True)
class Interactions:
    """
    Pair potentials of a system.

    ``electron_nucleus`` holds one potential per nucleus. ``nucleus_nucleus``
    is either a single potential shared by every nuclear pair or a dict
    keyed by ``(nu, nu')`` with nu < nu'.
    """
    electron_electron: object = None
    electron_nucleus: tuple = ()
    nucleus_nucleus: object = None
    external: ExternalField = field(default_factory=ExternalField.zero)

    def nuclear_pair(self, a, b):
        if isinstance(self.nucleus_nucleus, dict):
            return self.nucleus_nucleus.get((a, b))
        return self.nucleus_nucleus


@dataclass(frozen=True)
class MolecularSystem:
    layout: object
    grid: object
    interactions: Interactions
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES

    def __post_init__(self):
        if self.grid.spatial_dim != self.layout.spatial_dim:
            raise InvalidParameterError(
                'spatial_dim', self.grid.spatial_dim,
                message=f"Nuclear positions are {self.grid.spatial_dim}D but the electronic "
                        f"layout is {self.layout.spatial_dim}D."
            )
        if len(self.interactions.electron_nucleus) not in (0, self.grid.n_nuclei):
            raise InvalidParameterError(
                'electron_nucleus', len(self.interactions.electron_nucleus),
                message=f"Need one electron-nucleus potential per nucleus "
                        f"({self.grid.n_nuclei}), got {len(self.interactions.electron_nucleus)}."
            )
        size = int(np.prod(self.composite_shape))
        if size > self.max_amplitudes:
            raise CapacityError(size, self.max_amplitudes, 'composite state')

    @property
    def composite_shape(self):
        return (self.grid.n_geometries,) + self.layout.electronic_shape


@dataclass(frozen=True)
class PotentialDiagonal:
    """
    Position-diagonal potential for every geometry.

    Arrays broadcast against ``(n_geometries, *electronic_shape)``.
    """
    electron_electron: np.ndarray
    electron_nucleus: np.ndarray
    nucleus_nucleus: np.ndarray
    external: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class KineticSpectrum:
    values: np.ndarray
    single_axis: np.ndarray


def _axis_positions(layout, axis):
    shape = [1] * layout.n_axes
    shape[axis] = layout.points_per_direction
    return layout.grid_positions().reshape(shape)


def _electron_distance(layout, electron, point):
    """|r_electron - point| broadcast over the electronic shape (point may carry leading axes)."""
    point = np.asarray(point, dtype=float)
    lead = point.shape[:-1]
    squared = 0.0
    for mu, axis in enumerate(layout.electron_axes(electron)):
        coord = point[..., mu].reshape(lead + (1,) * layout.n_axes)
        squared = squared + np.square(_axis_positions(layout, axis) - coord)
    return np.sqrt(squared)


def _check_finite(values, term):
    if not np.all(np.isfinite(values)):
        raise SingularPotentialError(term)
    return values


def build_potential_diagonal(layout, grid, interactions):
    """
    Tabulate V_ee + V_en + V_nn + V_ext for every geometry.

    Raises:
        SingularPotentialError: If a bare Coulomb term meets r = 0 on the grid
    """
    eshape = layout.electronic_shape
    n_geom = grid.n_geometries
    positions = grid.all_coordinates()
    charges = grid.charges

    v_ee = np.zeros(eshape)
    if interactions.electron_electron is not None:
        for a, b in combinations(range(layout.n_electrons), 2):
            squared = 0.0
            for axis_a, axis_b in zip(layout.electron_axes(a), layout.electron_axes(b)):
                squared = squared + np.square(
                    _axis_positions(layout, axis_a) - _axis_positions(layout, axis_b)
                )
            with np.errstate(divide='ignore'):
                v_ee = v_ee + interactions.electron_electron(np.sqrt(squared))
        v_ee = _check_finite(np.broadcast_to(v_ee, eshape).copy(), 'electron-electron')

    v_en = np.zeros((n_geom,) + eshape)
    for nu, potential in enumerate(interactions.electron_nucleus):
        if potential is None or charges[nu] == 0:
            continue
        for electron in range(layout.n_electrons):
            r = _electron_distance(layout, electron, positions[:, nu, :])
            with np.errstate(divide='ignore'):
                v_en = v_en - charges[nu] * potential(r)
    v_en = _check_finite(v_en, 'electron-nucleus')

    v_nn = np.zeros(n_geom)
    for a, b in combinations(range(grid.n_nuclei), 2):
        potential = interactions.nuclear_pair(a, b)
        if potential is None:
            continue
        r = np.linalg.norm(positions[:, a, :] - positions[:, b, :], axis=-1)
        with np.errstate(divide='ignore'):
            v_nn = v_nn + charges[a] * charges[b] * potential(r)
    v_nn = _check_finite(v_nn, 'nucleus-nucleus')

    v_ext = np.zeros(eshape)
    if not interactions.external.is_zero:
        for electron in range(layout.n_electrons):
            axes = layout.electron_axes(electron)
            coords = np.stack(
                np.broadcast_arrays(*[_axis_positions(layout, axis) for axis in axes]), axis=-1
            )
            v_ext = v_ext + interactions.external(coords)
        v_ext = _check_finite(np.broadcast_to(v_ext, eshape).copy(), 'external')

    nn_column = v_nn.reshape((n_geom,) + (1,) * layout.n_axes)
    values = v_ee + v_en + nn_column + v_ext
    logger.debug(
        f"Potential diagonal for {n_geom} geometries x {layout.electronic_dimension} grid points, "
        f"range [{values.min():.6f}, {values.max():.6f}]"
    )
    return PotentialDiagonal(
        electron_electron=v_ee,
        electron_nucleus=v_en,
        nucleus_nucleus=nn_column,
        external=v_ext,
        values=values,
    )


def momentum_grid(layout):
    """p = 2 pi k / L with centered integer frequencies k in [-N/2, N/2), FFT order."""
    n = layout.points_per_direction
    return 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / layout.cell_length


def build_kinetic_spectrum(layout):
    single = 0.5 * np.square(momentum_grid(layout))
    values = np.zeros(layout.electronic_shape)
    for axis in range(layout.n_axes):
        shape = [1] * layout.n_axes
        shape[axis] = layout.points_per_direction
        values = values + single.reshape(shape)
    return KineticSpectrum(values=values, single_axis=single)


class CompositeHamiltonian:
    """
    Split representation of H over the composite register.

    States are arrays of shape ``(n_geometries, *electronic_shape)``; the
    Fourier transforms act on the electron axes only.
    """

    def __init__(self, system):
        self.system = system
        self.layout = system.layout
        self.grid = system.grid
        self.potential = build_potential_diagonal(system.layout, system.grid, system.interactions)
        self.kinetic = build_kinetic_spectrum(system.layout)
        self.electron_axes = tuple(range(1, self.layout.n_axes + 1))

    @property
    def shape(self):
        return self.system.composite_shape

    @property
    def dimension(self):
        return int(np.prod(self.shape))

    def to_momentum(self, psi):
        return np.fft.fftn(psi, axes=self.electron_axes, norm='ortho')

    def to_position(self, phi):
        return np.fft.ifftn(phi, axes=self.electron_axes, norm='ortho')

    def apply(self, psi):
        """H psi for a composite array (flat vectors are reshaped)."""
        flat = np.ndim(psi) == 1
        psi = np.reshape(psi, self.shape)
        out = self.potential.values * psi + self.to_position(self.kinetic.values * self.to_momentum(psi))
        return out.reshape(-1) if flat else out

    def expectation(self, psi):
        """<psi|H|psi> as sum V|psi|^2 + sum T|F psi|^2."""
        psi = np.reshape(psi, self.shape)
        potential = np.sum(self.potential.values * np.abs(psi) ** 2)
        kinetic = np.sum(self.kinetic.values * np.abs(self.to_momentum(psi)) ** 2)
        return float(potential + kinetic)


def kinetic_matrix_1d(layout):
    """F^dagger diag(t) F for one direction, real symmetric."""
    n = layout.points_per_direction
    spectrum = build_kinetic_spectrum(layout).single_axis
    # rows of ifft(diag(t) fft(I))
    matrix = np.fft.ifft(spectrum[:, None] * np.fft.fft(np.eye(n), axis=0, norm='ortho'),
                         axis=0, norm='ortho')
    matrix = matrix.real
    return 0.5 * (matrix + matrix.T)


def dense_hamiltonian(layout, grid, interactions, J, dense_cap=DEFAULT_DENSE_CAP, potential=None):
    """
    Dense electronic Hamiltonian at geometry J, including the constant V_nn.

    Args:
        layout: RegisterLayout
        grid: GeometryGrid
        interactions: Interactions
        J: geometry index (flat or multi-index)
        dense_cap: Largest electronic dimension allowed
        potential: Optional prebuilt PotentialDiagonal

    Raises:
        CapacityError: If the electronic dimension exceeds dense_cap
    """
    dim = layout.electronic_dimension
    if dim > dense_cap:
        raise CapacityError(dim, dense_cap, 'dense Hamiltonian')
    if potential is None:
        potential = build_potential_diagonal(layout, grid, interactions)
    j_flat = grid.flat_geometry(J)

    t1 = kinetic_matrix_1d(layout)
    n = layout.points_per_direction
    H = np.zeros((dim, dim))
    for axis in range(layout.n_axes):
        left = np.eye(n ** axis)
        right = np.eye(n ** (layout.n_axes - axis - 1))
        H += np.kron(np.kron(left, t1), right)
    H[np.diag_indices(dim)] += potential.values[j_flat].reshape(-1)
    return H


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    parities: tuple = None

    def state(self, n):
        return self.eigenvectors[:, n]


def exchange_parity(vector, layout):
    """<phi|SWAP|phi> for the first two electrons, rounded by sign to +1 or -1."""
    block = layout.points_per_direction ** layout.spatial_dim
    rest = layout.electronic_dimension // (block * block)
    phi = np.reshape(vector, (block, block, rest))
    swapped = np.transpose(phi, (1, 0, 2))
    value = np.real(np.vdot(phi, swapped))
    return 1 if value >= 0 else -1


def diagonalize(H, layout=None, n_states=None, tolerance=1e-10):
    """
    Ascending eigenpairs of a Hermitian matrix.

    Parity labels are attached when ``layout`` describes two electrons.

    Raises:
        NonHermitianError: If max|H - H^dagger| exceeds the tolerance
    """
    H = np.asarray(H)
    deviation = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if deviation > tolerance * scale:
        raise NonHermitianError(deviation)

    subset = None
    if n_states is not None and n_states < H.shape[0]:
        subset = (0, n_states - 1)
    eigenvalues, eigenvectors = scipy.linalg.eigh(H, subset_by_index=subset)

    parities = None
    if layout is not None and layout.n_electrons == 2:
        parities = tuple(exchange_parity(eigenvectors[:, n], layout) for n in range(eigenvectors.shape[1]))
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors, parities=parities)


def geometry_spectra(system, n_states=None, dense_cap=DEFAULT_DENSE_CAP, threads=1, potential=None):
    """
    Diagonalize the dense Hamiltonian of every candidate geometry.

    Results are returned in geometry order regardless of ``threads``.
    """
    layout, grid = system.layout, system.grid
    if layout.electronic_dimension > dense_cap:
        raise CapacityError(layout.electronic_dimension, dense_cap, 'dense Hamiltonian')
    if potential is None:
        potential = build_potential_diagonal(layout, grid, system.interactions)

    def solve(J):
        H = dense_hamiltonian(layout, grid, system.interactions, J, dense_cap, potential)
        spectrum = diagonalize(H, layout, n_states)
        logger.info(f"Geometry {J}: E_gs = {spectrum.eigenvalues[0]:.8f}")
        return spectrum

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(solve, range(grid.n_geometries)))


def electron_density(state, layout):
    """
    One-electron density n(x) = sum over electrons of the marginal |psi|^2 / dV.

    Sums times dV to n_e for a normalized state.
    """
    prob = np.abs(np.reshape(state, layout.electronic_shape)) ** 2
    density = np.zeros((layout.points_per_direction,) * layout.spatial_dim)
    all_axes = set(range(layout.n_axes))
    for electron in range(layout.n_electrons):
        keep = layout.electron_axes(electron)
        density = density + prob.sum(axis=tuple(sorted(all_axes - set(keep))))
    return density / layout.volume_element


def one_electron_potential(layout, grid, interactions, J):
    """Electron-nucleus potential felt by a single electron along the grid at geometry J."""
    positions = grid.coordinates(J)
    one = RegisterLayout(1, layout.spatial_dim, layout.qubits_per_direction, layout.cell_length)
    values = np.zeros(one.electronic_shape)
    for nu, potential in enumerate(interactions.electron_nucleus):
        if potential is None:
            continue
        values = values - grid.charges[nu] * potential(_electron_distance(one, 0, positions[nu]))
    return values


def dissociation_limit(system, dense_cap=DEFAULT_DENSE_CAP):
    """
    Sum of the ground energies of each nucleus binding one electron alone.

    Defined only when there is one electron per nucleus; returns None otherwise.

    Returns:
        (total, per_nucleus) or None
    """
    layout, grid = system.layout, system.grid
    if layout.n_electrons != grid.n_nuclei or not system.interactions.electron_nucleus:
        return None
    one = RegisterLayout(1, layout.spatial_dim, layout.qubits_per_direction, layout.cell_length)
    per_nucleus = []
    for nu, nucleus in enumerate(grid.nuclei):
        atom = GeometryGrid(nuclei=(nucleus,))
        interactions = Interactions(electron_nucleus=(system.interactions.electron_nucleus[nu],))
        H = dense_hamiltonian(one, atom, interactions, 0, dense_cap)
        per_nucleus.append(float(scipy.linalg.eigh(H, eigvals_only=True, subset_by_index=(0, 0))[0]))
    return sum(per_nucleus), per_nucleus
