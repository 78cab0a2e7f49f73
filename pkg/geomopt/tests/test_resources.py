from collections import Counter

from django.test import SimpleTestCase

from geomopt.engine.resources import (
    CostModel,
    depth_report,
    distance_register_sizes,
    schedule_ee,
    schedule_ee_redundant,
    schedule_en,
    schedule_nn,
)
from geomopt.exceptions import InvalidParameterError, UnsupportedRelationError


def electron_pairs(schedule):
    """Unordered electron index pairs touched by the ee gates of a schedule."""
    pairs = []
    for gate in schedule.gates('ee'):
        first, second = (int(op[1:]) for op in gate.operands[:2])
        pairs.append(frozenset((first, second)))
    return pairs


class ScheduleTests(SimpleTestCase):

    def test_four_electrons_three_nuclei(self):
        ee = schedule_ee(4)
        self.assertEqual(ee.gate_count, 6)
        self.assertEqual(ee.depth, 6)

        en = schedule_en(4, 3)
        self.assertEqual(en.gate_count, 12)
        self.assertEqual(en.depth, 4)
        self.assertTrue(all(len(layer) == 3 for layer in en.layers))

        self.assertEqual(schedule_nn(3).gate_count, 3)

    def test_smallest_systems(self):
        self.assertEqual(schedule_ee(2).gate_count, 1)
        self.assertEqual(schedule_nn(2).gate_count, 1)
        self.assertEqual(schedule_en(1, 1).gate_count, 1)

    def test_too_few_particles(self):
        with self.assertRaises(InvalidParameterError):
            schedule_ee(1)
        with self.assertRaises(InvalidParameterError):
            schedule_nn(1)
        with self.assertRaises(InvalidParameterError):
            schedule_ee(4, registers_available=0)

    def test_more_nuclei_than_electrons(self):
        with self.assertRaises(UnsupportedRelationError):
            schedule_en(2, 3)

    def test_every_pair_covered_once(self):
        for n in range(2, 9):
            expected = Counter(frozenset(p) for p in ((a, b) for a in range(n) for b in range(a + 1, n)))
            self.assertEqual(Counter(electron_pairs(schedule_ee(n))), expected)
            self.assertEqual(Counter(electron_pairs(schedule_ee_redundant(n))), expected)

    def test_every_electron_meets_every_nucleus(self):
        for n_e in range(1, 7):
            for n_nucl in range(1, n_e + 1):
                pairs = Counter(g.operands[:2] for g in schedule_en(n_e, n_nucl).gates())
                self.assertEqual(len(pairs), n_e * n_nucl)
                self.assertEqual(set(pairs.values()), {1})

    def test_layers_are_register_disjoint(self):
        for n in range(2, 9):
            self.assertTrue(schedule_ee(n).is_register_disjoint())
            self.assertTrue(schedule_ee(n, registers_available=n).is_register_disjoint())
            self.assertTrue(schedule_ee_redundant(n).is_register_disjoint())
            self.assertTrue(schedule_en(n, max(1, n - 1)).is_register_disjoint())

    def test_extra_registers_reach_matching_depth(self):
        self.assertEqual(schedule_ee(4, registers_available=2).depth, 3)

    def test_redundant_layout(self):
        schedule = schedule_ee_redundant(4)
        self.assertEqual(schedule.layers_with('ee'), 3)
        self.assertEqual(len(schedule.gates('ee')), 6)
        self.assertEqual(schedule.layers_with('copy'), 1)
        self.assertEqual(schedule.layers_with('uncopy'), 1)
        self.assertEqual(schedule.depth, 5)
        self.assertEqual(schedule.layers[0][0].operands, ('e0', 'r0'))

    def test_netlist(self):
        self.assertEqual(
            schedule_ee(3).to_netlist(),
            'layer 0: ee(e1,e0,d_ee0)\n'
            'layer 1: ee(e2,e0,d_ee0)\n'
            'layer 2: ee(e2,e1,d_ee0)\n',
        )


class RegisterSizeTests(SimpleTestCase):

    def test_widths(self):
        self.assertEqual(distance_register_sizes(6, 3), (6, 6, 3))
        self.assertEqual(distance_register_sizes(1, 1), (1, 1, 1))
        self.assertEqual(distance_register_sizes(2, 5, multiplier=2), (4, 10, 10))

    def test_invalid_widths(self):
        with self.assertRaises(InvalidParameterError):
            distance_register_sizes(0, 3)


class DepthReportTests(SimpleTestCase):

    def test_lih_like_counts(self):
        report = depth_report(4, 3, 6, 3)
        self.assertEqual(report.terms['T'].depth, 36)
        self.assertEqual(report.terms['V_ee'].depth, 6 * 108)
        self.assertEqual(report.terms['V_nn'].depth, 3 * 27)
        self.assertEqual(report.terms['V_en'].depth, 4 * 108)
        self.assertEqual(report.terms['V_ext'].depth, 36)
        self.assertEqual(report.total_depth, 36 + 648 + 432 + 36)
        self.assertEqual(report.register_widths, (6, 6, 3))
        self.assertEqual([row[0] for row in report.table()], ['T', 'V_ee', 'V_en', 'V_nn', 'V_ext'])

    def test_single_particles_have_no_pair_terms(self):
        report = depth_report(1, 1, 3, 2)
        self.assertEqual(report.terms['V_ee'].gates, 0)
        self.assertEqual(report.terms['V_nn'].gates, 0)
        self.assertEqual(report.terms['V_en'].gates, 1)

    def test_more_nuclei_than_electrons_falls_back(self):
        report = depth_report(2, 3, 4, 4)
        self.assertEqual(report.terms['V_en'].gates, 6)
        self.assertEqual(report.terms['V_en'].layers, 3)
        self.assertTrue(any('n_nucl > n_e' in note for note in report.notes))

    def test_naive_depth_grows_quadratically(self):
        for n in (8, 16):
            ratio = depth_report(2 * n, 1, 4, 2).terms['V_ee'].depth / depth_report(n, 1, 4, 2).terms['V_ee'].depth
            self.assertAlmostEqual(ratio, 4.0, delta=0.5)

    def test_redundant_depth_grows_linearly(self):
        for n in (8, 16):
            ratio = (depth_report(2 * n, 1, 4, 2, redundant=True).terms['V_ee'].depth
                     / depth_report(n, 1, 4, 2, redundant=True).terms['V_ee'].depth)
            self.assertAlmostEqual(ratio, 2.0, delta=0.3)

    def test_cost_model_scales_gate_depth(self):
        cheap = depth_report(4, 3, 6, 3, cost_model=CostModel(exponent=1.0))
        self.assertEqual(cheap.terms['V_ee'].depth, 6 * 18)
        with self.assertRaises(InvalidParameterError):
            CostModel(dist_coeff=0.0)

    def test_to_dict(self):
        data = depth_report(2, 2, 3, 3, redundant=True).to_dict()
        self.assertEqual(set(data), {'terms', 'total_depth', 'interaction_depth', 'register_widths', 'notes'})
        self.assertEqual(data['register_widths'], {'ee': 3, 'en': 3, 'nn': 3})
        self.assertEqual(data['terms']['V_ee']['gates'], 1)
