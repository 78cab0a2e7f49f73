import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings


def small_lih_config(**extra):
    config = {
        'system': 'custom',
        'description': 'Small LiH for command tests.',
        'seed': 3,
        'layout': {'n_electrons': 2, 'spatial_dim': 1, 'qubits_per_direction': 4, 'cell_length': 8.0},
        'geometry': {
            'nuclei': [
                {'label': 'H', 'charge': 1.0, 'position': [3.0]},
                {'label': 'Li', 'charge': 1.0, 'position': [3.5]},
            ],
            'active': [{'nucleus': 1, 'axis': 0, 'qubits': 2, 'max_displacement': 2.0}],
        },
        'interactions': {
            'electron_electron': {'kind': 'soft_coulomb', 'softness_sq': 0.6},
            'electron_nucleus': [
                {'kind': 'soft_coulomb', 'softness_sq': 0.7},
                {'kind': 'soft_coulomb', 'softness_sq': 2.25},
            ],
            'nucleus_nucleus': {'kind': 'soft_coulomb', 'softness_sq': 2.35},
        },
        'schedule': {'dtau_min': 0.2, 'dtau_max': 0.3, 'kappa': 8.0},
        'pite': {'n_steps': 4, 'shots': 50},
        'diagonalize': {'n_states': 2},
    }
    config.update(extra)
    return config


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.addCleanup(self._tmp.cleanup)

    def write_config(self, config, name='config.json'):
        path = self.tmp / name
        path.write_text(json.dumps(config), encoding='utf-8')
        return str(path)

    def call(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()

    def read_json(self, path):
        return json.loads(Path(path).read_text(encoding='utf-8'))

    def read_csv(self, path):
        with open(path, newline='', encoding='utf-8') as handle:
            return list(csv.reader(handle))


class ResourcesCommandTests(CommandTestCase):

    def test_depth_table_and_netlists(self):
        out_dir = self.tmp / 'resources'
        output = self.call('resources', ne=4, nnucl=3, nqe=6, nqn=3, netlist=True, out=str(out_dir))
        self.assertIn('Total depth per Trotter step: 1152', output)

        report = self.read_json(out_dir / 'report.json')
        self.assertEqual(report['total_depth'], 1152)
        self.assertEqual(report['schedules']['ee'], {'gates': 6, 'depth': 6, 'register_disjoint': True})
        self.assertEqual(report['schedules']['en'], {'gates': 12, 'depth': 4, 'register_disjoint': True})
        self.assertEqual(report['schedules']['nn'], {'gates': 3, 'depth': 3, 'register_disjoint': True})
        self.assertEqual(report['inputs']['n_electrons'], 4)
        for name in ('ee', 'ee_redundant', 'en', 'nn'):
            self.assertTrue((out_dir / f'netlist_{name}.txt').exists())

        manifest = self.read_json(out_dir / 'manifest.json')
        self.assertIn('report.json', manifest['outputs'])

    def test_schedule_depths_without_register_widths(self):
        out_dir = self.tmp / 'schedules'
        output = self.call('resources', ne=4, nnucl=3, out=str(out_dir))
        self.assertIn('Schedule depths (layers): ee 6, ee_redundant 5, en 4, nn 3', output)

        report = self.read_json(out_dir / 'report.json')
        self.assertEqual(report['inputs']['n_qe'], 1)
        self.assertEqual(report['inputs']['n_qn'], 1)
        self.assertEqual(report['register_widths'], {'ee': 1, 'en': 1, 'nn': 1})

    def test_missing_particle_count(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('resources', nnucl=3, out=str(self.tmp / 'bad'))
        self.assertEqual(ctx.exception.returncode, 2)


class ClassicalPiteCommandTests(CommandTestCase):

    def test_benzene_argon_preset(self):
        out_dir = self.tmp / 'classical'
        self.call('classical_pite', preset='benzene-argon', out=str(out_dir))

        report = self.read_json(out_dir / 'report.json')
        self.assertEqual(report['metadata']['optimal_geometry'], [3, 1])
        x_min, z_min = report['scan_minimum']
        self.assertLessEqual(abs(x_min), 0.01)
        self.assertLessEqual(abs(z_min - 3.57), 0.01)
        self.assertFalse((out_dir / 'surface.csv').exists())

        weights = self.read_csv(out_dir / 'weights.csv')
        self.assertEqual(weights[0][:3], ['step', 'tau', 'w_0_0'])
        self.assertEqual(len(weights), 1 + 20)
        trajectory = self.read_csv(out_dir / 'trajectory.csv')
        self.assertEqual(trajectory[-1][-1], '3-1')
        self.assertEqual(len(self.read_csv(out_dir / 'candidates.csv')), 1 + 64)

    def test_wrong_units_for_surface(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('classical_pite', preset='lih-1d', out=str(self.tmp / 'bad'))
        self.assertEqual(ctx.exception.returncode, 2)


class QuantumCommandTests(CommandTestCase):

    def test_diagonalize_small_system(self):
        out_dir = self.tmp / 'diag'
        self.call('diagonalize', config=self.write_config(small_lih_config()), out=str(out_dir))

        rows = self.read_csv(out_dir / 'energies.csv')
        self.assertEqual(rows[0], ['J', 'R_1_0', 'E_gs', 'E_ex1', 'parity_gs', 'parity_ex1'])
        self.assertEqual(len(rows), 1 + 4)

        report = self.read_json(out_dir / 'report.json')
        self.assertIn(report['argmin_geometry'], range(4))
        self.assertEqual(len(report['isolated_atom_energies']), 2)
        for name in report['density_files']:
            self.assertTrue((out_dir / name).exists())

    def test_pite_outputs(self):
        out_dir = self.tmp / 'pite'
        output = self.call('pite', config=self.write_config(small_lih_config()), out=str(out_dir))
        self.assertIn('Optimal geometry', output)

        weights = self.read_csv(out_dir / 'weights.csv')
        self.assertEqual(weights[0], ['step', 'tau', 'w_0', 'w_1', 'w_2', 'w_3'])
        self.assertEqual(len(weights), 1 + 5)
        trajectory = self.read_csv(out_dir / 'trajectory.csv')
        self.assertEqual(trajectory[0], ['step', 'dtau', 'energy_before', 'energy_after', 'p_k', 'cumulative_p'])
        self.assertTrue((out_dir / 'ground_state_weights.csv').exists())

        report = self.read_json(out_dir / 'report.json')
        self.assertEqual(report['metadata']['seed'], 3)
        self.assertEqual(sum(report['histogram']), 50)

    def test_step_override(self):
        out_dir = self.tmp / 'pite'
        self.call('pite', config=self.write_config(small_lih_config()), out=str(out_dir), steps=2)
        self.assertEqual(len(self.read_csv(out_dir / 'weights.csv')), 1 + 3)

    def test_outputs_independent_of_thread_count(self):
        config = self.write_config(small_lih_config())
        serial, parallel = self.tmp / 'serial', self.tmp / 'parallel'
        self.call('pite', config=config, out=str(serial), threads=1)
        self.call('pite', config=config, out=str(parallel), threads=3)
        names = sorted(p.name for p in serial.iterdir() if p.name != 'manifest.json')
        self.assertEqual(names, sorted(p.name for p in parallel.iterdir() if p.name != 'manifest.json'))
        for name in names:
            self.assertEqual((serial / name).read_bytes(), (parallel / name).read_bytes(), name)

    def test_dense_cap_is_a_capacity_error(self):
        config = self.write_config(small_lih_config(dense_cap=10))
        with self.assertRaises(CommandError) as ctx:
            self.call('diagonalize', config=config, out=str(self.tmp / 'capped'))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_composite_state_above_amplitude_cap(self):
        config = self.write_config(small_lih_config())
        with override_settings(GEOMOPT={**settings.GEOMOPT, 'MAX_AMPLITUDES': 512}):
            with self.assertRaises(CommandError) as ctx:
                self.call('pite', config=config, out=str(self.tmp / 'capped'))
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn('composite state', str(ctx.exception))

    def test_unknown_preset(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('pite', preset='water-3d', out=str(self.tmp / 'bad'))
        self.assertEqual(ctx.exception.returncode, 2)


class ValidateCommandTests(CommandTestCase):

    def test_valid_preset(self):
        output = self.call('validate', preset='lih-1d', experiment='pite')
        self.assertIn("Config is valid for 'pite' (lih-1d).", output)

    def test_presets_validate_without_experiment_flag(self):
        for preset, experiment in (
            ('lih-1d', 'pite'), ('h2plus-1d', 'vite'), ('benzene-argon', 'classical-pite'),
        ):
            with self.subTest(preset=preset):
                output = self.call('validate', preset=preset)
                self.assertIn(f"Config is valid for '{experiment}' ({preset}).", output)

    def test_violations_are_listed(self):
        config = small_lih_config(experiment='pite')
        config['layout']['qubits_per_direction'] = 0
        config['schedule']['dtau_min'] = 0.5
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('validate', config=self.write_config(config), stdout=out)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('2 violation(s) found.', str(ctx.exception))
        self.assertIn('layout.qubits_per_direction', out.getvalue())
        self.assertIn('schedule.dtau_min', out.getvalue())

    def test_schema(self):
        schema = json.loads(self.call('validate', show_schema=True))
        self.assertIn('layout', schema)
        self.assertEqual(schema['experiment']['type'], 'choice')
