"""
Experiment pipelines behind the management commands.

Each pipeline takes validated config data and an ArtifactWriter, writes its
report and tables, and returns (report, summary lines).
"""
import logging
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from django.conf import settings

from geomopt.engine.hamiltonian import (
    build_potential_diagonal,
    dissociation_limit,
    electron_density,
    geometry_spectra,
    one_electron_potential,
)
from geomopt.engine.pite import (
    PiteConfig,
    classical_ilj_energies,
    classical_pair_energies,
    run_classical_pite,
    run_pite,
)
from geomopt.engine.potentials import scan_ilj_surface
from geomopt.engine.propagator import TauSchedule
from geomopt.engine.resources import (
    depth_report,
    schedule_ee,
    schedule_ee_redundant,
    schedule_en,
    schedule_nn,
)
from geomopt.engine.vite import ViteConfig, run_vite
from geomopt.exceptions import UnsupportedRelationError

from .artifacts import ArtifactWriter
from .systems import (
    build_cost_model,
    build_grid,
    build_guess,
    build_ilj,
    build_pair_potential,
    build_reference,
    build_schedule,
    build_system,
    dense_cap,
    thread_count,
)

logger = logging.getLogger(__name__)

STATE_NAMES = ('gs', 'ex1', 'ex2', 'ex3', 'ex4', 'ex5')


@dataclass
class RunResult:
    experiment: str
    out_dir: Path
    report: dict
    summary: list
    outputs: list


def default_output_dir(config):
    return Path(settings.GEOMOPT['OUTPUT_ROOT']) / f"{config['experiment']}-{config['system']}"


def geometry_columns(grid, prefix='w'):
    """Column names per geometry: w_2 for one active coordinate, w_3_1 for several."""
    names = []
    for J in range(grid.n_geometries):
        index = grid.geometry_index(J)
        names.append(f"{prefix}_{'_'.join(str(j) for j in index)}" if index else prefix)
    return names


def geometry_label(grid, J):
    index = grid.geometry_index(J)
    return index[0] if len(index) == 1 else index


def _state_names(n):
    return [STATE_NAMES[i] if i < len(STATE_NAMES) else f'ex{i}' for i in range(n)]


def run_diagonalize(config, writer, threads):
    system = build_system(config)
    layout, grid = system.layout, system.grid
    options = config['diagonalize']
    n_states = min(options['n_states'], layout.electronic_dimension)
    potential = build_potential_diagonal(layout, grid, system.interactions)
    spectra = geometry_spectra(system, n_states=n_states, dense_cap=dense_cap(config),
                               threads=threads, potential=potential)

    names = _state_names(n_states)
    coordinate_names = [f'R_{c.nucleus}_{c.axis}' for c in grid.active]
    header = ['J'] + coordinate_names + [f'E_{n}' for n in names]
    with_parity = spectra[0].parities is not None
    if with_parity:
        header += [f'parity_{n}' for n in names]
    rows = []
    for J, spectrum in enumerate(spectra):
        row = [J] + list(grid.active_values(J)) + list(spectrum.eigenvalues)
        if with_parity:
            row += list(spectrum.parities)
        rows.append(row)
    writer.write_csv('energies.csv', header, rows)

    ground = np.array([s.eigenvalues[0] for s in spectra])
    argmin = int(np.argmin(ground))
    bond_lengths = None
    if grid.n_nuclei == 2:
        positions = grid.all_coordinates()
        bond_lengths = np.linalg.norm(positions[:, 1] - positions[:, 0], axis=-1).tolist()

    limit = dissociation_limit(system, dense_cap(config))

    density_files = []
    if layout.spatial_dim == 1:
        targets = options['density_geometries'] or sorted({argmin, grid.n_geometries - 1})
        x = layout.grid_positions()
        for J in targets:
            spectrum = spectra[J]
            center = grid.coordinates(J).mean(axis=0)[0]
            densities = [electron_density(spectrum.state(n), layout) for n in range(n_states)]
            v_en = one_electron_potential(layout, grid, system.interactions, J)
            name = f'densities_J{J}.csv'
            writer.write_csv(
                name,
                ['x'] + [f'density_{n}' for n in names] + ['v_en'],
                [[x[i] - center] + [d[i] for d in densities] + [v_en[i]] for i in range(len(x))],
            )
            density_files.append(name)

    report = {
        'experiment': 'diagonalize',
        'system': config['system'],
        'n_states': n_states,
        'candidates': [list(grid.active_values(J)) for J in range(grid.n_geometries)],
        'bond_lengths': bond_lengths,
        'energies': [s.eigenvalues.tolist() for s in spectra],
        'parities': [list(s.parities) for s in spectra] if with_parity else None,
        'argmin_geometry': geometry_label(grid, argmin),
        'argmin_energy': float(ground[argmin]),
        'dissociation_limit': limit[0] if limit else None,
        'isolated_atom_energies': limit[1] if limit else None,
        'density_files': density_files,
    }
    writer.write_json('report.json', report)

    summary = [('SUCCESS', f'Minimum total energy {ground[argmin]:.8f} at geometry {geometry_label(grid, argmin)}')]
    if bond_lengths:
        summary.append(('SUCCESS', f'Equilibrium bond length {bond_lengths[argmin]:.4f}'))
    if limit:
        summary.append(('INFO', f'Dissociation limit {limit[0]:.8f}'))
    return report, summary


def run_pite_pipeline(config, writer, threads):
    system = build_system(config)
    grid = system.grid
    options = config['pite']
    pite_config = PiteConfig(
        system=system,
        schedule=build_schedule(config),
        n_steps=options['n_steps'],
        reference=build_reference(config),
        guess=build_guess(config, grid.n_geometries),
        gamma=options['gamma'],
        energy_shift=options['energy_shift'],
        ground_state_weights=options['ground_state_weights'],
        shots=options['shots'],
        seed=config['seed'],
        dense_cap=dense_cap(config),
        threads=threads,
    )
    report = run_pite(pite_config)

    columns = geometry_columns(grid)
    taus = np.concatenate([[0.0], np.cumsum(report.dtaus)])
    writer.write_csv('weights.csv', ['step', 'tau'] + columns,
                     [[s, taus[s]] + list(row) for s, row in enumerate(report.weights)])
    if report.ground_state_weights is not None:
        writer.write_csv('ground_state_weights.csv', ['step', 'tau'] + geometry_columns(grid, 'w_gs'),
                         [[s, taus[s]] + list(row) for s, row in enumerate(report.ground_state_weights)])
    cumulative = np.cumprod(report.success_probabilities)
    writer.write_csv(
        'trajectory.csv',
        ['step', 'dtau', 'energy_before', 'energy_after', 'p_k', 'cumulative_p'],
        [[k + 1, report.dtaus[k], report.energies_before[k], report.energies_after[k],
          report.success_probabilities[k], cumulative[k]] for k in range(len(report.dtaus))],
    )
    payload = report.to_dict()
    payload['system'] = config['system']
    writer.write_json('report.json', payload)

    optimal = geometry_label(grid, report.optimal_geometry)
    summary = [
        ('SUCCESS', f'Optimal geometry {optimal} with weight {report.final_weights[report.optimal_geometry]:.4f}'),
        ('INFO', f'Cumulative success probability {report.cumulative_probability:.3e}'),
    ]
    return payload, summary


def run_vite_pipeline(config, writer, threads):
    system = build_system(config)
    grid = system.grid
    options = config['vite']
    vite_config = ViteConfig(
        system=system,
        depth=options['depth'],
        dtau=options['dtau'],
        steps=options['steps'],
        lambda_reg=options['lambda_reg'],
        axes=options['axes'],
        init=options['init'],
        init_spread=options['init_spread'],
        seed=config['seed'],
        record_every=options['record_every'],
        target_geometry=options['target_geometry'],
        dense_cap=dense_cap(config),
        threads=threads,
    )
    result = run_vite(vite_config)

    columns = geometry_columns(grid)
    target = options['target_geometry']
    components = [f'w_{target}_{n}' for n in _state_names(vite_config.n_eigencomponents)]
    writer.write_csv('trajectory.csv', ['step', 'energy_error'] + columns + components, result.rows())
    writer.write_csv('weights.csv', ['step'] + columns,
                     [[s] + list(w) for s, w in zip(result.steps, result.weights)])
    payload = result.to_dict()
    payload['system'] = config['system']
    writer.write_json('report.json', payload)

    final = result.weights[-1]
    summary = [
        ('SUCCESS', f'Final w_{target} = {final[target]:.4f}, '
                    f'E - E_exact = {result.energy_errors[-1]:.3e}'),
    ]
    return payload, summary


def _scan_axis(low, high, step):
    count = int(round((high - low) / step)) + 1
    return np.linspace(low, low + (count - 1) * step, count)


def run_classical_pipeline(config, writer, threads):
    grid = build_grid(config['geometry'])
    options = config['classical']
    scan_minimum = None
    if options['surface'] == 'ilj':
        molecule, params = build_ilj(config)
        energies = classical_ilj_energies(grid, molecule, params, options['probe'])
        scan = options['scan']
        if scan:
            xs = _scan_axis(scan['x_min'], scan['x_max'], scan['step'])
            zs = _scan_axis(scan['z_min'], scan['z_max'], scan['step'])
            surface, scan_minimum = scan_ilj_surface(molecule, params, xs, zs)
            if scan['export']:
                writer.write_csv('surface.csv', ['x', 'z', 'energy'],
                                 [[x, z, surface[i, k]] for i, x in enumerate(xs) for k, z in enumerate(zs)])
    else:
        energies = classical_pair_energies(grid, build_pair_potential(config['interactions']['nucleus_nucleus']))

    schedule = build_schedule(config) if config.get('schedule') else TauSchedule.constant(1.0)
    report = run_classical_pite(grid, energies, schedule, options['n_steps'],
                                guess=build_guess(config, grid.n_geometries),
                                shots=options['shots'], seed=config['seed'])

    columns = geometry_columns(grid)
    taus = np.concatenate([[0.0], np.cumsum(report.dtaus)])
    writer.write_csv('weights.csv', ['step', 'tau'] + columns,
                     [[s, taus[s]] + list(row) for s, row in enumerate(report.weights)])
    writer.write_csv(
        'candidates.csv',
        ['J'] + [f'R_{c.nucleus}_{c.axis}' for c in grid.active] + ['energy'],
        [[J] + list(grid.active_values(J)) + [energies[J]] for J in range(grid.n_geometries)],
    )
    writer.write_csv(
        'trajectory.csv', ['step', 'dtau', 'tau', 'argmax'],
        [[s, report.dtaus[s - 1], taus[s], '-'.join(str(j) for j in grid.geometry_index(J))]
         for s, J in enumerate(report.argmax_trajectory) if s > 0],
    )
    payload = report.to_dict()
    payload['system'] = config['system']
    payload['surface'] = options['surface']
    payload['scan_minimum'] = list(scan_minimum) if scan_minimum else None
    writer.write_json('report.json', payload)

    optimal = geometry_label(grid, report.optimal_geometry)
    summary = [('SUCCESS', f'Optimal geometry {optimal} at {list(grid.active_values(report.optimal_geometry))}')]
    if scan_minimum:
        summary.append(('INFO', f'Surface minimum at x={scan_minimum[0]:.3f}, z={scan_minimum[1]:.3f}'))
    return payload, summary


def run_resources_pipeline(config, writer, threads):
    options = config['resources']
    n_e, n_nucl = options['n_electrons'], options['n_nuclei']
    cost = build_cost_model(options['cost'])
    report = depth_report(n_e, n_nucl, options['n_qe'], options['n_qn'], cost, options['redundant'])

    schedules = {}
    if n_e >= 2:
        schedules['ee'] = schedule_ee(n_e, cost.ee_registers)
        schedules['ee_redundant'] = schedule_ee_redundant(n_e)
    try:
        schedules['en'] = schedule_en(n_e, n_nucl)
    except UnsupportedRelationError as e:
        logger.warning(f"{e}")
    if n_nucl >= 2:
        schedules['nn'] = schedule_nn(n_nucl, cost.nn_registers)

    payload = report.to_dict()
    payload['experiment'] = 'resources'
    payload['inputs'] = {k: v for k, v in options.items() if k != 'cost'}
    payload['cost_model'] = dict(options['cost'])
    payload['schedules'] = {
        name: {'gates': s.gate_count, 'depth': s.depth, 'register_disjoint': s.is_register_disjoint()}
        for name, s in schedules.items()
    }
    writer.write_json('report.json', payload)
    if options['netlist']:
        for name, s in schedules.items():
            writer.write_text(f'netlist_{name}.txt', s.to_netlist())

    summary = [('TABLE', row) for row in report.table()]
    if schedules:
        depths = ', '.join(f'{name} {s.depth}' for name, s in schedules.items())
        summary.append(('INFO', f'Schedule depths (layers): {depths}'))
    summary.append(('SUCCESS', f'Total depth per Trotter step: {report.total_depth}'))
    return payload, summary


PIPELINES = {
    'diagonalize': run_diagonalize,
    'pite': run_pite_pipeline,
    'vite': run_vite_pipeline,
    'classical-pite': run_classical_pipeline,
    'resources': run_resources_pipeline,
}


def run_experiment(config, threads=None):
    """
    Run a validated config end to end and write the manifest last.

    Returns:
        RunResult
    """
    started_at = datetime.now(timezone.utc).isoformat()
    start = time.perf_counter()
    out_dir = Path(config.get('output_dir') or default_output_dir(config))
    writer = ArtifactWriter(out_dir)
    threads = thread_count(config, threads)

    logger.info(f"Running {config['experiment']} ({config['system']}) into {out_dir}")
    report, summary = PIPELINES[config['experiment']](config, writer, threads)
    wall_time = time.perf_counter() - start
    writer.write_manifest(config, config['seed'], started_at, wall_time)
    logger.info(f"{config['experiment']} finished in {wall_time:.2f}s")
    return RunResult(
        experiment=config['experiment'],
        out_dir=out_dir,
        report=report,
        summary=summary,
        outputs=list(writer.outputs) + ['manifest.json'],
    )
