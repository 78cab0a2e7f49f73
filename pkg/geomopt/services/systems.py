"""
Build engine objects from validated config data.
"""
from django.conf import settings

from geomopt.engine.hamiltonian import Interactions, MolecularSystem
from geomopt.engine.pite import InitialGuess, ReferenceSpec
from geomopt.engine.potentials import (
    ExternalField,
    IljBondParams,
    IljParams,
    MoleculeGeometry,
    PairPotential,
)
from geomopt.engine.propagator import TauSchedule
from geomopt.engine.registers import ActiveCoordinate, Nucleus, build_geometry_grid, build_layout
from geomopt.engine.resources import CostModel


def dense_cap(config):
    return config.get('dense_cap') or settings.GEOMOPT['DENSE_CAP']


def thread_count(config, override=None):
    return override or config.get('threads') or settings.GEOMOPT['DEFAULT_THREADS']


def build_pair_potential(data):
    if data is None:
        return None
    return PairPotential(
        kind=data['kind'],
        softness_sq=data.get('softness_sq'),
        coefficients=tuple(data.get('coefficients', ())),
        r_grid=tuple(data.get('r_grid', ())),
        values=tuple(data.get('values', ())),
    )


def build_external_field(data):
    if not data or data['kind'] == 'zero':
        return ExternalField.zero()
    return ExternalField.uniform(data['strength'])


def build_grid(data):
    nuclei = [Nucleus(n['label'], n['charge'], tuple(n['position'])) for n in data['nuclei']]
    active = [ActiveCoordinate(**dict(c)) for c in data['active']]
    return build_geometry_grid(nuclei, active)


def build_system(config):
    """
    MolecularSystem for a quantum experiment.

    Raises:
        CapacityError: If the electronic register or the composite state exceeds
            GEOMOPT['MAX_AMPLITUDES']
    """
    layout_data = config['layout']
    cap = settings.GEOMOPT['MAX_AMPLITUDES']
    layout = build_layout(
        layout_data['n_electrons'],
        layout_data['spatial_dim'],
        layout_data['qubits_per_direction'],
        layout_data['cell_length'],
        max_amplitudes=cap,
    )
    grid = build_grid(config['geometry'])
    interactions_data = config['interactions']
    interactions = Interactions(
        electron_electron=build_pair_potential(interactions_data.get('electron_electron')),
        electron_nucleus=tuple(build_pair_potential(p) for p in interactions_data['electron_nucleus']),
        nucleus_nucleus=build_pair_potential(interactions_data.get('nucleus_nucleus')),
        external=build_external_field(interactions_data.get('external_field')),
    )
    return MolecularSystem(layout=layout, grid=grid, interactions=interactions, max_amplitudes=cap)


def build_schedule(config):
    data = config['schedule']
    return TauSchedule(dtau_min=data['dtau_min'], dtau_max=data['dtau_max'], kappa=data['kappa'])


def build_reference(config):
    data = config['reference']
    return ReferenceSpec(kind=data['kind'], width=data['width'])


def build_guess(config, n_geometries):
    data = config['initial_guess']
    if data['kind'] == 'weights':
        return InitialGuess(list(data['weights']))
    return InitialGuess.uniform(n_geometries)


def build_ilj(config):
    data = config['ilj']
    params = IljParams(
        bonds={kind: IljBondParams(**dict(bond)) for kind, bond in data['bonds'].items()},
        beta=data['beta'],
        m=data['m'],
    )
    molecule_data = data['molecule']
    molecule = MoleculeGeometry.benzene(molecule_data['cc_bond'], molecule_data['ch_bond'])
    return molecule, params


def build_cost_model(data):
    return CostModel(**dict(data))
