import numpy as np
from django.test import SimpleTestCase, tag

from geomopt.engine.hamiltonian import geometry_spectra
from geomopt.engine.pite import (
    InitialGuess,
    PiteConfig,
    ReferenceSpec,
    accumulated_tau,
    argmax_geometry,
    classical_ilj_energies,
    classical_pair_energies,
    extract_weights,
    prepare_input,
    prepare_reference,
    run_classical_pite,
    run_pite,
    sample_histogram,
    spectral_weight_oracle,
)
from geomopt.engine.potentials import IljParams, MoleculeGeometry, PairPotential
from geomopt.engine.propagator import CompositeState, TauSchedule
from geomopt.engine.registers import ActiveCoordinate, Nucleus, build_geometry_grid
from geomopt.exceptions import InvalidParameterError, ResolutionError

from .helpers import lih_preset_system, small_h2plus, small_lih, swap_electrons


class InitialGuessTests(SimpleTestCase):

    def test_uniform_and_point_mass(self):
        np.testing.assert_allclose(InitialGuess.uniform(4).weights, [0.25] * 4)
        np.testing.assert_array_equal(InitialGuess.point_mass(3, 1).weights, [0.0, 1.0, 0.0])

    def test_weights_are_validated(self):
        with self.assertRaises(InvalidParameterError):
            InitialGuess([0.5, 0.6])
        with self.assertRaises(InvalidParameterError):
            InitialGuess([1.5, -0.5])
        with self.assertRaises(InvalidParameterError):
            InitialGuess([])

    def test_list_input_is_stored_as_array(self):
        self.assertIsInstance(InitialGuess([0.5, 0.5]).weights, np.ndarray)


class ReferenceStateTests(SimpleTestCase):

    def setUp(self):
        self.system = small_lih()

    def test_normalized(self):
        layout, grid = self.system.layout, self.system.grid
        for kind in ('gaussian_symmetric', 'gaussian_antisymmetric'):
            state = prepare_reference(1, ReferenceSpec(kind=kind), layout, grid)
            self.assertAlmostEqual(np.linalg.norm(state), 1.0, places=12)

    def test_exchange_symmetry(self):
        layout, grid = self.system.layout, self.system.grid
        symmetric = prepare_reference(0, ReferenceSpec(), layout, grid)[None]
        antisymmetric = prepare_reference(0, ReferenceSpec('gaussian_antisymmetric'), layout, grid)[None]
        np.testing.assert_allclose(swap_electrons(symmetric, layout), symmetric, atol=1e-14)
        np.testing.assert_allclose(swap_electrons(antisymmetric, layout), -antisymmetric, atol=1e-14)

    def test_antisymmetric_needs_two_electrons(self):
        system = small_h2plus()
        with self.assertRaises(InvalidParameterError):
            prepare_reference(0, ReferenceSpec('gaussian_antisymmetric'), system.layout, system.grid)

    def test_unresolved_reference(self):
        with self.assertRaises(ResolutionError):
            prepare_reference(0, ReferenceSpec(width=1e-3), self.system.layout, self.system.grid)

    def test_overlap_with_ground_state(self):
        spectra = geometry_spectra(self.system, n_states=1)
        reference = prepare_reference(2, ReferenceSpec(), self.system.layout, self.system.grid)
        self.assertGreater(abs(np.vdot(spectra[2].state(0), reference.reshape(-1))), 0.0)

    def test_custom_provider(self):
        layout, grid = self.system.layout, self.system.grid

        def provider(J, layout, grid):
            return np.ones(layout.electronic_shape)

        state = prepare_reference(0, ReferenceSpec(kind='custom', provider=provider), layout, grid)
        np.testing.assert_allclose(np.abs(state), 1.0 / layout.points_per_direction)


class WeightTests(SimpleTestCase):

    def test_round_trip_through_input_state(self):
        system = small_lih()
        guess = InitialGuess([0.1, 0.2, 0.3, 0.4])
        state = prepare_input(guess, ReferenceSpec(), system.layout, system.grid)
        np.testing.assert_allclose(extract_weights(state), guess.weights, atol=1e-12)

    def test_product_state_gives_indicator(self):
        amplitudes = np.zeros((4, 8), dtype=complex)
        amplitudes[2, 3] = 1.0
        np.testing.assert_array_equal(extract_weights(CompositeState(amplitudes)), [0, 0, 1, 0])

    def test_random_state_weights_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            state = CompositeState.normalized(rng.normal(size=(8, 16)) + 1j * rng.normal(size=(8, 16)))
            self.assertAlmostEqual(extract_weights(state).sum(), 1.0, places=10)

    def test_guess_length_mismatch(self):
        system = small_lih()
        with self.assertRaises(InvalidParameterError):
            prepare_input(InitialGuess.uniform(3), ReferenceSpec(), system.layout, system.grid)

    def test_argmax(self):
        self.assertEqual(argmax_geometry([0.1, 0.7, 0.2]), 1)
        self.assertEqual(argmax_geometry([0.25] * 4), 0)


class HistogramTests(SimpleTestCase):

    def test_point_mass(self):
        np.testing.assert_array_equal(sample_histogram([0, 0, 1, 0], 500, seed=1), [0, 0, 500, 0])

    def test_seeded_runs_are_identical(self):
        weights = [0.1, 0.2, 0.3, 0.4]
        np.testing.assert_array_equal(sample_histogram(weights, 1000, 42), sample_histogram(weights, 1000, 42))

    def test_frequencies_converge(self):
        weights = np.array([0.05, 0.15, 0.3, 0.5])
        counts = sample_histogram(weights, 10 ** 6, seed=3)
        self.assertEqual(counts.sum(), 10 ** 6)
        self.assertLess(np.max(np.abs(counts / 1e6 - weights)), 5e-3)

    def test_shots_must_be_positive(self):
        with self.assertRaises(InvalidParameterError):
            sample_histogram([1.0], 0, seed=0)


class RunPiteTests(SimpleTestCase):

    def test_rows_normalized_and_probabilities_bounded(self):
        system = small_lih()
        report = run_pite(PiteConfig(system=system, schedule=TauSchedule(0.2, 0.3, 8), n_steps=6, shots=100))
        self.assertEqual(report.weights.shape, (7, 4))
        np.testing.assert_allclose(report.weights.sum(axis=1), 1.0, atol=1e-10)
        self.assertTrue(np.all((report.success_probabilities > 0) & (report.success_probabilities <= 1)))
        self.assertAlmostEqual(report.cumulative_probability, float(np.prod(report.success_probabilities)))
        self.assertEqual(report.histogram.sum(), 100)
        self.assertEqual(report.ground_state_weights.shape, (7, 4))
        self.assertEqual(len(report.ground_energies), 4)
        self.assertTrue(np.all(np.diff(report.energies_after) < 0))

    def test_antisymmetric_run_stays_in_its_sector(self):
        system = small_lih()
        report = run_pite(PiteConfig(
            system=system, schedule=TauSchedule(0.2, 0.3, 8), n_steps=5,
            reference=ReferenceSpec('gaussian_antisymmetric'),
        ))
        # ground states are exchange-symmetric
        self.assertLessEqual(np.max(report.ground_state_weights), 1e-10)

    def test_zero_tau_oracle_returns_initial_weights(self):
        system = small_lih()
        guess = InitialGuess([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(
            spectral_weight_oracle(system, guess, ReferenceSpec(), 0.0), guess.weights, atol=1e-12
        )

    def test_trotterized_weights_approach_oracle(self):
        system = small_lih()
        guess = InitialGuess.uniform(4)
        spectra = geometry_spectra(system)
        errors = []
        for n_steps in (10, 20, 40):
            schedule = TauSchedule.constant(1.0 / n_steps)
            report = run_pite(PiteConfig(system=system, schedule=schedule, n_steps=n_steps,
                                         ground_state_weights=False))
            exact = spectral_weight_oracle(system, guess, ReferenceSpec(),
                                           accumulated_tau(schedule, n_steps), spectra=spectra)
            errors.append(np.max(np.abs(report.final_weights - exact)))
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])

    def test_long_time_oracle_picks_lowest_ground_energy(self):
        system = small_lih()
        spectra = geometry_spectra(system)
        weights = spectral_weight_oracle(system, InitialGuess.uniform(4), ReferenceSpec(), 1e5, spectra=spectra)
        lowest = int(np.argmin([s.eigenvalues[0] for s in spectra]))
        self.assertAlmostEqual(weights[lowest], 1.0, places=6)


class ClassicalPiteTests(SimpleTestCase):

    def test_two_candidate_closed_form(self):
        grid = build_geometry_grid(
            [Nucleus('A', 1.0, (0.0,)), Nucleus('B', 1.0, (1.0,))],
            [ActiveCoordinate(nucleus=1, axis=0, qubits=1, max_displacement=2.0)],
        )
        energies = np.array([0.3, 0.8])
        report = run_classical_pite(grid, energies, TauSchedule.constant(0.25), 12)
        taus = np.concatenate([[0.0], np.cumsum(report.dtaus)])
        expected = 1.0 / (1.0 + np.exp(-2 * (energies[1] - energies[0]) * taus))
        np.testing.assert_allclose(report.weights[:, 0], expected, rtol=0, atol=1e-12)
        self.assertEqual(report.optimal_geometry, 0)

    def test_pair_energies(self):
        system = small_h2plus()
        energies = classical_pair_energies(system.grid, PairPotential.soft(1.0))
        distances = [system.grid.coordinates(J)[1, 0] - 4.0 for J in range(4)]
        np.testing.assert_allclose(energies, 1 / np.sqrt(1.0 + np.square(distances)))

    def test_benzene_argon_optimum(self):
        grid = build_geometry_grid(
            [Nucleus('Ar', 0.0, (-2.4, 0.0, 3.2))],
            [
                ActiveCoordinate(nucleus=0, axis=0, qubits=3, max_displacement=6.4),
                ActiveCoordinate(nucleus=0, axis=2, qubits=3, max_displacement=3.2),
            ],
        )
        energies = classical_ilj_energies(grid, MoleculeGeometry.benzene(), IljParams.argon_benzene())
        report = run_classical_pite(grid, energies, TauSchedule.constant(0.004), 19, shots=500, seed=0)
        target = grid.flat_geometry((3, 1))
        self.assertEqual(report.argmax_trajectory[11], target)
        self.assertEqual(report.argmax_trajectory[19], target)
        self.assertEqual(report.metadata['optimal_geometry'], [3, 1])
        np.testing.assert_allclose(report.weights.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(report.weights[0], 1 / 64)


@tag('slow')
class LithiumHydridePiteTests(SimpleTestCase):

    def test_weight_concentrates_on_equilibrium(self):
        system = lih_preset_system()
        schedule = TauSchedule(0.2, 0.3, 8)
        report = run_pite(PiteConfig(system=system, schedule=schedule, n_steps=19,
                                     reference=ReferenceSpec(width=3.0), ground_state_weights=False))
        self.assertEqual(report.argmax_trajectory[9], 2)
        self.assertEqual(report.argmax_trajectory[19], 2)
        self.assertGreater(report.weights[19, 2], report.weights[9, 2])

        exact = spectral_weight_oracle(system, InitialGuess.uniform(8), ReferenceSpec(width=3.0),
                                       accumulated_tau(schedule, 19), threads=2)
        self.assertLessEqual(np.max(np.abs(report.final_weights - exact)), 1e-3)

    def test_antisymmetric_reference_has_no_interior_peak(self):
        report = run_pite(PiteConfig(system=lih_preset_system(), schedule=TauSchedule(0.2, 0.3, 8), n_steps=19,
                                     reference=ReferenceSpec('gaussian_antisymmetric', width=3.0),
                                     ground_state_weights=False))
        final = report.final_weights
        self.assertIn(report.argmax_trajectory[19], (0, 7))
        interior_peaks = [J for J in range(1, 7) if final[J] > final[J - 1] and final[J] > final[J + 1]]
        self.assertEqual(interior_peaks, [])
