"""
Register layouts for the composite electrons x geometries state.

The electronic register holds one grid position per electron and direction.
The nuclear register holds one integer per active nuclear coordinate that
selects a candidate displacement. Composite amplitude arrays are laid out as
``(n_geometries, N, ..., N)`` so the flattened index is
``J_flat * electronic_dimension + K_flat`` and the electron index varies
fastest. Electron axes are ordered electron-major, then direction.
"""

from dataclasses import dataclass, field
from math import prod

import numpy as np

from geomopt.exceptions import BoundsError, CapacityError, InvalidParameterError

# 2**28 complex128 amplitudes is 4 GiB
DEFAULT_MAX_AMPLITUDES = 2 ** 28


@dataclass(frozen=True)
class RegisterLayout:
    """Discretization of the electronic register."""
    n_electrons: int
    spatial_dim: int
    qubits_per_direction: int
    cell_length: float

    @property
    def points_per_direction(self):
        return 2 ** self.qubits_per_direction

    @property
    def spacing(self):
        return self.cell_length / self.points_per_direction

    @property
    def volume_element(self):
        return self.spacing ** self.spatial_dim

    @property
    def n_axes(self):
        return self.n_electrons * self.spatial_dim

    @property
    def electronic_shape(self):
        return (self.points_per_direction,) * self.n_axes

    @property
    def electronic_dimension(self):
        return self.points_per_direction ** self.n_axes

    @property
    def electronic_qubits(self):
        return self.qubits_per_direction * self.n_axes

    def grid_positions(self):
        """Grid coordinates x_k = k * dx along one direction."""
        return np.arange(self.points_per_direction) * self.spacing

    def electron_axes(self, electron):
        """Array axes (within the electronic shape) owned by one electron."""
        start = electron * self.spatial_dim
        return tuple(range(start, start + self.spatial_dim))


def build_layout(n_electrons, spatial_dim, qubits_per_direction, cell_length,
                 max_amplitudes=DEFAULT_MAX_AMPLITUDES):
    """
    Build and validate an electronic register layout.

    Args:
        n_electrons: Number of electrons (>= 1)
        spatial_dim: 1, 2 or 3
        qubits_per_direction: Qubits per electron per direction (>= 1)
        cell_length: Cell edge length in atomic units (> 0)
        max_amplitudes: Largest electronic dimension that may be allocated

    Returns:
        RegisterLayout

    Raises:
        InvalidParameterError: If a parameter is out of range
        CapacityError: If the electronic dimension exceeds max_amplitudes
    """
    if n_electrons < 1:
        raise InvalidParameterError('n_electrons', n_electrons, '>= 1')
    if spatial_dim not in (1, 2, 3):
        raise InvalidParameterError('spatial_dim', spatial_dim, 'one of 1, 2, 3')
    if qubits_per_direction < 1:
        raise InvalidParameterError('qubits_per_direction', qubits_per_direction, '>= 1')
    if not cell_length > 0:
        raise InvalidParameterError('cell_length', cell_length, '> 0')

    layout = RegisterLayout(
        n_electrons=int(n_electrons),
        spatial_dim=int(spatial_dim),
        qubits_per_direction=int(qubits_per_direction),
        cell_length=float(cell_length),
    )
    if layout.electronic_dimension > max_amplitudes:
        raise CapacityError(layout.electronic_dimension, max_amplitudes, 'electronic register')
    return layout


@dataclass(frozen=True)
class Nucleus:
    label: str
    charge: float
    position: tuple


@dataclass(frozen=True)
class ActiveCoordinate:
    """A nuclear coordinate searched over 2**qubits candidate displacements."""
    nucleus: int
    axis: int
    qubits: int
    max_displacement: float

    @property
    def points(self):
        return 2 ** self.qubits

    @property
    def step(self):
        return self.max_displacement / self.points


@dataclass(frozen=True)
class GeometryGrid:
    """
    Candidate geometries of the nuclear register.

    The base value of an active coordinate is the nucleus position given in
    ``nuclei``; every other coordinate stays frozen at its given value.
    Multi-indices J are flattened row-major in the order of ``active``.
    """
    nuclei: tuple
    active: tuple = field(default=())

    @property
    def n_nuclei(self):
        return len(self.nuclei)

    @property
    def spatial_dim(self):
        return len(self.nuclei[0].position) if self.nuclei else 0

    @property
    def shape(self):
        return tuple(c.points for c in self.active)

    @property
    def n_geometries(self):
        return prod(self.shape)

    @property
    def nuclear_qubits(self):
        return sum(c.qubits for c in self.active)

    @property
    def charges(self):
        return np.array([n.charge for n in self.nuclei], dtype=float)

    @property
    def base_positions(self):
        return np.array([n.position for n in self.nuclei], dtype=float)

    def geometry_index(self, J):
        """Normalize J (flat int or multi-index) to a multi-index tuple."""
        if np.ndim(J) == 0:
            flat = int(J)
            if not 0 <= flat < self.n_geometries:
                raise BoundsError('geometry', flat, self.n_geometries)
            if not self.active:
                return ()
            return tuple(int(j) for j in np.unravel_index(flat, self.shape))
        J = tuple(int(j) for j in J)
        if len(J) != len(self.active):
            raise BoundsError('geometry multi-index length', len(J), len(self.active) + 1)
        for j, coord in zip(J, self.active):
            if not 0 <= j < coord.points:
                raise BoundsError(f'nucleus {coord.nucleus} axis {coord.axis}', j, coord.points)
        return J

    def flat_geometry(self, J):
        J = self.geometry_index(J)
        if not J:
            return 0
        return int(np.ravel_multi_index(J, self.shape))

    def coordinates(self, J):
        """Nuclear positions, shape (n_nuclei, spatial_dim), for geometry J."""
        J = self.geometry_index(J)
        positions = self.base_positions.copy()
        for j, coord in zip(J, self.active):
            positions[coord.nucleus, coord.axis] += j * coord.step
        return positions

    def all_coordinates(self):
        """Nuclear positions for every geometry, shape (n_geometries, n_nuclei, dim)."""
        return np.stack([self.coordinates(J) for J in range(self.n_geometries)])

    def active_values(self, J):
        """Values of the active coordinates only, in ``active`` order."""
        positions = self.coordinates(J)
        return tuple(float(positions[c.nucleus, c.axis]) for c in self.active)


def build_geometry_grid(nuclei, active=()):
    """
    Validate nuclei and active coordinates and build a GeometryGrid.

    Raises:
        InvalidParameterError: On inconsistent dimensions, duplicate active
            coordinates, or non-positive qubit counts
    """
    nuclei = tuple(
        n if isinstance(n, Nucleus) else Nucleus(n['label'], float(n['charge']), tuple(n['position']))
        for n in nuclei
    )
    if not nuclei:
        raise InvalidParameterError('nuclei', nuclei, 'a non-empty list')
    dim = len(nuclei[0].position)
    for nucleus in nuclei:
        if len(nucleus.position) != dim:
            raise InvalidParameterError(
                'nuclei', nucleus.label, message=f"Nucleus {nucleus.label} has a position of length "
                                                 f"{len(nucleus.position)}, expected {dim}."
            )

    seen = set()
    checked = []
    for coord in active:
        if not isinstance(coord, ActiveCoordinate):
            coord = ActiveCoordinate(**coord)
        if not 0 <= coord.nucleus < len(nuclei):
            raise BoundsError('active nucleus', coord.nucleus, len(nuclei))
        if not 0 <= coord.axis < dim:
            raise BoundsError('active axis', coord.axis, dim)
        if coord.qubits < 1:
            raise InvalidParameterError('qubits', coord.qubits, '>= 1')
        key = (coord.nucleus, coord.axis)
        if key in seen:
            raise InvalidParameterError(
                'active', key, message=f"Coordinate {key} listed twice in active coordinates."
            )
        seen.add(key)
        checked.append(coord)
    return GeometryGrid(nuclei=nuclei, active=tuple(checked))


def geometry_coordinates(J, grid):
    """Nuclear position vectors for geometry J (flat index or multi-index)."""
    return grid.coordinates(J)


@dataclass(frozen=True)
class CompositeIndex:
    K: tuple
    J: tuple
    flat: int


def flatten(K, J, layout, grid):
    """Flat composite index with the electron index varying fastest."""
    K = tuple(int(k) for k in K)
    if len(K) != layout.n_axes:
        raise BoundsError('electron multi-index length', len(K), layout.n_axes + 1)
    for k in K:
        if not 0 <= k < layout.points_per_direction:
            raise BoundsError('electron grid', k, layout.points_per_direction)
    k_flat = int(np.ravel_multi_index(K, layout.electronic_shape)) if K else 0
    return grid.flat_geometry(J) * layout.electronic_dimension + k_flat


def unflatten(flat, layout, grid):
    total = grid.n_geometries * layout.electronic_dimension
    flat = int(flat)
    if not 0 <= flat < total:
        raise BoundsError('composite', flat, total)
    j_flat, k_flat = divmod(flat, layout.electronic_dimension)
    K = tuple(int(k) for k in np.unravel_index(k_flat, layout.electronic_shape))
    return CompositeIndex(K=K, J=grid.geometry_index(j_flat), flat=flat)
