"""Small systems shared by the engine tests."""
import numpy as np

from geomopt.engine.hamiltonian import Interactions, MolecularSystem
from geomopt.engine.potentials import LIH_SOFTNESS, PairPotential
from geomopt.engine.registers import ActiveCoordinate, Nucleus, build_geometry_grid, build_layout


def lih_interactions():
    return Interactions(
        electron_electron=PairPotential.soft(LIH_SOFTNESS['ee']),
        electron_nucleus=(PairPotential.soft(LIH_SOFTNESS['eH']), PairPotential.soft(LIH_SOFTNESS['eLi'])),
        nucleus_nucleus=PairPotential.soft(LIH_SOFTNESS['LiH']),
    )


def small_lih(qubits_per_direction=4, cell_length=8.0, nuclear_qubits=2):
    """Two electrons, H frozen at 3.0, Li scanned from 3.5 in steps of 0.5."""
    layout = build_layout(2, 1, qubits_per_direction, cell_length)
    grid = build_geometry_grid(
        [Nucleus('H', 1.0, (3.0,)), Nucleus('Li', 1.0, (3.5,))],
        [ActiveCoordinate(nucleus=1, axis=0, qubits=nuclear_qubits,
                          max_displacement=0.5 * 2 ** nuclear_qubits)],
    )
    return MolecularSystem(layout=layout, grid=grid, interactions=lih_interactions())


def lih_preset_system():
    """The full 1D LiH model: 2 x 6 electronic qubits, 3 nuclear qubits, L = 15."""
    layout = build_layout(2, 1, 6, 15.0)
    grid = build_geometry_grid(
        [Nucleus('H', 1.0, (5.5,)), Nucleus('Li', 1.0, (6.05,))],
        [ActiveCoordinate(nucleus=1, axis=0, qubits=3, max_displacement=4.0)],
    )
    return MolecularSystem(layout=layout, grid=grid, interactions=lih_interactions())


def small_h2plus(qubits_per_direction=4, cell_length=10.0, nuclear_qubits=2):
    layout = build_layout(1, 1, qubits_per_direction, cell_length)
    grid = build_geometry_grid(
        [Nucleus('Ha', 1.0, (4.0,)), Nucleus('Hb', 1.0, (4.5,))],
        [ActiveCoordinate(nucleus=1, axis=0, qubits=nuclear_qubits, max_displacement=4.0)],
    )
    interactions = Interactions(
        electron_nucleus=(PairPotential.soft(1.0), PairPotential.soft(1.0)),
        nucleus_nucleus=PairPotential.soft(1.0),
    )
    return MolecularSystem(layout=layout, grid=grid, interactions=interactions)


def random_state(shape, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return psi / np.linalg.norm(psi)


def swap_electrons(psi, layout):
    """Exchange the coordinates of electrons 0 and 1 in a (geometries, *electronic) array."""
    d = layout.spatial_dim
    axes = list(range(psi.ndim))
    first = axes[1:1 + d]
    second = axes[1 + d:1 + 2 * d]
    axes[1:1 + d], axes[1 + d:1 + 2 * d] = second, first
    return np.transpose(psi, axes)
