import numpy as np
from django.test import SimpleTestCase

from geomopt.engine.potentials import (
    BondSegment,
    ExternalField,
    IljParams,
    MoleculeGeometry,
    PairPotential,
    ilj_atom_bond,
    ilj_interaction_energy,
    lih_electron_nucleus_potential,
    scan_ilj_surface,
    soft_coulomb,
)
from geomopt.exceptions import InvalidParameterError, SingularInputError


class PairPotentialTests(SimpleTestCase):

    def test_soft_coulomb_values(self):
        self.assertAlmostEqual(soft_coulomb(0.0, 0.6), 1.2909944, places=7)
        self.assertAlmostEqual(soft_coulomb(1.0, 0.6), 0.7905694, places=7)

    def test_soft_coulomb_decays_monotonically(self):
        values = soft_coulomb(np.linspace(0, 1e6, 1000), 0.6)
        self.assertTrue(np.all(np.diff(values) < 0))
        self.assertLess(values[-1], 1e-5)

    def test_bare_coulomb_is_singular_at_zero(self):
        v = PairPotential(kind='bare_coulomb')
        self.assertTrue(v.is_singular_at_zero)
        self.assertTrue(np.isinf(v(0.0)))
        self.assertEqual(v(2.0), 0.5)

    def test_polynomial_and_tabulated(self):
        poly = PairPotential(kind='polynomial', coefficients=(1.0, 0.0, 2.0))
        self.assertAlmostEqual(float(poly(3.0)), 19.0)
        table = PairPotential(kind='tabulated', r_grid=(0.0, 1.0, 2.0), values=(2.0, 1.0, 0.0))
        np.testing.assert_allclose(table([0.5, 1.5, 5.0]), [1.5, 0.5, 0.0])

    def test_invalid_definitions(self):
        with self.assertRaises(InvalidParameterError):
            PairPotential(kind='yukawa')
        with self.assertRaises(InvalidParameterError):
            PairPotential(kind='soft_coulomb', softness_sq=0.0)
        with self.assertRaises(InvalidParameterError):
            PairPotential(kind='tabulated', r_grid=(1.0, 0.5), values=(0.0, 1.0))

    def test_lih_electron_potential(self):
        expected = -1 / np.sqrt(0.7) - 1 / np.sqrt(2.25 + 1.55 ** 2)
        self.assertAlmostEqual(float(lih_electron_nucleus_potential(5.5, 5.5, 7.05)), expected, places=12)
        self.assertAlmostEqual(expected, -1.658844, places=5)

    def test_lih_potential_vanishes_far_away(self):
        self.assertAlmostEqual(float(lih_electron_nucleus_potential(0.0, 1e9, 1e9)), 0.0, places=8)


class ExternalFieldTests(SimpleTestCase):

    def test_zero_field(self):
        np.testing.assert_array_equal(ExternalField.zero()(np.ones((4, 2))), np.zeros(4))

    def test_uniform_field_is_linear(self):
        field = ExternalField.uniform([0.1, -0.2])
        np.testing.assert_allclose(field([[1.0, 1.0], [2.0, 0.0]]), [-0.1, 0.2])

    def test_custom_field_must_be_finite(self):
        field = ExternalField.custom(lambda r: 1.0 / r[..., 0])
        with self.assertRaises(SingularInputError):
            field(np.zeros((3, 1)))


class IljTests(SimpleTestCase):

    def setUp(self):
        self.params = IljParams.argon_benzene()
        self.cc = BondSegment((-0.695, 0.0, 0.0), (0.695, 0.0, 0.0), 'CC')

    def test_parallel_well_depth(self):
        bp = self.params.for_bond('CC')
        energy = ilj_atom_bond((bp.lambda_par, 0.0, 0.0), self.cc, self.params)
        self.assertAlmostEqual(float(energy), -bp.D_par, places=12)

    def test_perpendicular_well_depth(self):
        energy = ilj_atom_bond((0.0, 0.0, 3.879), self.cc, self.params)
        self.assertAlmostEqual(float(energy), -3.895, places=12)

    def test_single_well_along_every_direction(self):
        for kind in ('CC', 'CH'):
            bond = BondSegment((-0.695, 0.0, 0.0), (0.695, 0.0, 0.0), kind)
            for angle in np.linspace(0.0, np.pi / 2, 7):
                with self.subTest(kind=kind, angle=angle):
                    direction = np.array([np.cos(angle), 0.0, np.sin(angle)])
                    radii = np.linspace(2.0, 15.0, 4000)
                    energies = ilj_atom_bond(radii[:, None] * direction, bond, self.params)
                    slopes = np.sign(np.diff(energies))
                    self.assertEqual(int(np.count_nonzero(slopes[1:] != slopes[:-1])), 1)
                    self.assertEqual(slopes[0], -1)

    def test_singular_at_bond_center(self):
        with self.assertRaises(SingularInputError):
            ilj_atom_bond((0.0, 0.0, 0.0), self.cc, self.params)

    def test_unknown_bond_kind(self):
        with self.assertRaises(InvalidParameterError):
            ilj_atom_bond((0.0, 0.0, 3.0), BondSegment((0, 0, 0), (1, 0, 0), 'CO'), self.params)

    def test_benzene_geometry(self):
        benzene = MoleculeGeometry.benzene()
        self.assertEqual(len(benzene.bonds), 12)
        radii = np.linalg.norm(benzene.positions, axis=1)
        np.testing.assert_allclose(radii[:6], 1.39)
        np.testing.assert_allclose(radii[6:], 2.48)

    def test_energy_decays_far_above_ring(self):
        energy = ilj_interaction_energy((0.0, 0.0, 1e4), MoleculeGeometry.benzene(), self.params)
        self.assertAlmostEqual(float(energy), 0.0, places=10)

    def test_mirror_symmetry(self):
        benzene = MoleculeGeometry.benzene()
        rng = np.random.default_rng(3)
        points = np.column_stack([rng.uniform(0.1, 3, 20), np.zeros(20), rng.uniform(3, 6, 20)])
        mirrored = points * np.array([-1.0, 1.0, 1.0])
        np.testing.assert_allclose(
            ilj_interaction_energy(points, benzene, self.params),
            ilj_interaction_energy(mirrored, benzene, self.params),
            rtol=1e-12,
        )

    def test_surface_minimum_above_ring_center(self):
        benzene = MoleculeGeometry.benzene()
        xs = np.round(np.arange(-3.0, 3.0 + 1e-9, 0.005), 6)
        zs = np.round(np.arange(3.0, 6.0 + 1e-9, 0.005), 6)
        energies, (x_min, z_min) = scan_ilj_surface(benzene, self.params, xs, zs)
        self.assertEqual(energies.shape, (len(xs), len(zs)))
        self.assertLessEqual(abs(x_min), 0.01)
        self.assertLessEqual(abs(z_min - 3.57), 0.01)
