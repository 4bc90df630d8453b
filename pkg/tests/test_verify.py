import os
import unittest

from selfsim.catalog import DEFAULT_SUITE, build, cyclic, direct_product, heisenberg_endomorphism
from selfsim.cli import dump_json
from selfsim.config import RunConfig
from selfsim.group_core import closure, element_order_profile, subgroup_generated
from selfsim.morphism import VirtualEndomorphism, extend_hom, search_simple_endos
from selfsim.tree_rep import level_perm_group
from selfsim.verify import (
    Check, EndoChecker, analyze_group, check_restriction, check_theorem1, check_theorem2,
    elementary_abelian_split, find_split_witness, group_checks, has_abelian_maximal_subgroup,
    run_suite, verify_split, wreath_lift,
)


def first_split_endo(G, p):
    for endo in search_simple_endos(G, p).endos:
        if find_split_witness(endo) is not None or endo.H.is_trivial():
            return endo
    raise AssertionError(f"no split endomorphism for {G.name}")


class TestChecks(unittest.TestCase):

    def test_violation_needs_hypothesis(self):
        self.assertFalse(Check('x', False, False).violated)
        self.assertTrue(Check('x', True, False).violated)
        self.assertFalse(Check('x', True, True).violated)

    def test_worked_example(self):
        G = build('heisenberg3')
        endo = heisenberg_endomorphism(G)
        report = EndoChecker(G, 3).run(endo)
        self.assertEqual(report.verdict, 'ok')
        self.assertEqual(report.subject['endo'], 'example23')
        for name in ('theorem1', 'theorem2', 'split_lemma', 'exponent_transfer', 'restriction',
                     'representation'):
            self.assertTrue(report.check(name).hypothesis_met, name)
            self.assertTrue(report.check(name).conclusion_holds, name)
        representation = report.check('representation').witness
        self.assertEqual(representation['separating_depth'], 2)
        self.assertEqual(representation['kernel_depth'], 2)
        self.assertEqual(report.check('theorem2').witness['split_element'], G.labels['b'])

    def test_single_theorem_reports(self):
        G = build('heisenberg3')
        endo = heisenberg_endomorphism(G)
        self.assertEqual([c.name for c in check_theorem1(G, endo).checks], ['theorem1'])
        self.assertEqual(check_theorem2(G, endo).verdict, 'ok')
        self.assertTrue(check_restriction(G, endo).check('restriction').conclusion_holds)

    def test_every_simple_endo_of_small_groups(self):
        for name, p in (('c2xc2', 2), ('heisenberg2', 2), ('c3xc3', 3)):
            G = build(name)
            checker = EndoChecker(G, p)
            for endo in search_simple_endos(G, p).endos:
                self.assertEqual(checker.run(endo).violations, [], f"{name} {endo.label}")

    def test_exponent_bound_on_wreath_product(self):
        G = build('wreath_c3c3')
        endo = search_simple_endos(G, 3, stop_at_first=True).endos[0]
        check = EndoChecker(G, 3).theorem1(endo)
        self.assertTrue(check.hypothesis_met)
        self.assertTrue(check.conclusion_holds)
        self.assertEqual(check.witness, {'n': 2, 'exponent': 9})

    def test_verify_split(self):
        G = build('heisenberg3')
        H = heisenberg_endomorphism(G).H
        self.assertTrue(verify_split(G, H, G.labels['b'], 3))
        self.assertFalse(verify_split(G, H, G.labels['a'], 3))
        self.assertFalse(verify_split(G, subgroup_generated(G, [G.labels['c']]), G.labels['b'], 3))


class TestGroupChecks(unittest.TestCase):

    def test_c2_by_c4_is_not_self_similar(self):
        perms, labels = direct_product([cyclic(2), cyclic(2, 2)])
        G = closure(perms, prime_hint=2, labels=labels, name='c2xc4')
        self.assertTrue(has_abelian_maximal_subgroup(G, 2))
        self.assertIsNone(elementary_abelian_split(G, 2))
        analysis = analyze_group(G)
        self.assertIs(analysis.self_similar, False)
        report = group_checks(G, 2, analysis)
        characterisation = report.check('abelian_maximal_characterisation')
        self.assertTrue(characterisation.hypothesis_met)
        self.assertTrue(characterisation.conclusion_holds)
        self.assertEqual(report.violations, [])

    def test_elementary_abelian_split(self):
        G = build('heisenberg3')
        self.assertIsNotNone(elementary_abelian_split(G, 3))

    def test_obstruction_skips_search(self):
        G = build('extraspecial243')
        analysis = analyze_group(G)
        self.assertTrue(analysis.obstruction)
        self.assertIsNone(analysis.search)
        self.assertIs(analysis.self_similar, False)
        self.assertEqual(analysis.maximal_subgroups, 40)
        report = group_checks(G, 3, analysis)
        self.assertTrue(report.check('obstruction_excludes_simple_endos').conclusion_holds)
        self.assertTrue(report.check('maximal_subgroup_scan').conclusion_holds)

    def test_analysis_dict(self):
        data = analyze_group(build('c4'), RunConfig()).to_dict()
        self.assertEqual(data['self_similar'], False)
        self.assertTrue(data['power_abelian'])
        self.assertEqual(data['search']['homs_examined'], 2)
        self.assertEqual(analyze_group(build('c4'), run_search=False).search_note, 'search not requested')


class TestWreathLift(unittest.TestCase):

    def lift(self, name, p):
        G = build(name)
        automaton, report = wreath_lift(G, first_split_endo(G, p))
        self.assertIsNotNone(automaton)
        self.assertEqual(report.verdict, 'ok')
        return automaton, report

    def test_small_lifts(self):
        for name, p, target in (('c2', 2, 8), ('c3', 3, 81), ('c2xc2', 2, 32)):
            _, report = self.lift(name, p)
            witness = report.check('wreath_order').witness
            self.assertEqual(witness['target'], target, name)
            self.assertIn(target, witness['orders'].values())

    def test_c3_lift_is_the_wreath_product(self):
        automaton, report = self.lift('c3', 3)
        depth = report.check('wreath_order').witness['depth']
        level = level_perm_group(automaton, list(automaton.initial_of.values()), depth)
        expected = build('wreath_c3c3')
        self.assertEqual(level.order, expected.order)
        self.assertEqual(element_order_profile(level), element_order_profile(expected))
        self.assertEqual(element_order_profile(level), {1: 1, 3: 44, 9: 36})
        self.assertIn('sigma', automaton.initial_of)

    def test_heisenberg_lift(self):
        G = build('heisenberg3')
        automaton, report = wreath_lift(G, heisenberg_endomorphism(G))
        self.assertEqual(report.check('wreath_order').witness['target'], 59049)
        self.assertTrue(report.check('wreath_order').conclusion_holds)
        self.assertTrue(report.check('state_closure').conclusion_holds)
        self.assertTrue(report.check('level1_transitive').conclusion_holds)

    def test_no_simple_endo(self):
        G = build('heisenberg3')
        endo = heisenberg_endomorphism(G)
        H = endo.H
        trivial = VirtualEndomorphism(G, H, extend_hom(H, list(H.gens), [0] * len(H.gens)))
        automaton, report = wreath_lift(G, trivial)
        self.assertIsNone(automaton)
        self.assertFalse(report.check('wreath_order').hypothesis_met)


class TestSuite(unittest.TestCase):

    def test_small_suite_is_deterministic(self):
        names = ['c2', 'c4', 'c2xc2', 'quaternion8']
        first = run_suite(names)
        second = run_suite(names)
        self.assertEqual(first.to_dict(), second.to_dict())
        self.assertEqual(first.violations, 0)
        summary = first.summary()
        self.assertEqual(summary['groups'], 4)
        self.assertEqual(summary['failed_groups'], 0)
        self.assertGreater(summary['endomorphisms_checked'], 0)
        self.assertIn('representation', summary['checks'])
        self.assertIsNotNone(first.entries[0].wreath_report)

    def test_errors_are_recorded(self):
        result = run_suite(['c2', 'no_such_group'], wreath=False)
        self.assertEqual(result.entries[1].error['class'], 'UnknownCatalogEntry')
        self.assertEqual(result.summary()['errors'], {'input_error': 1})
        self.assertIsNone(result.entries[0].wreath_report)


@unittest.skipUnless(os.getenv('SELFSIM_FULL_SUITE'), 'set SELFSIM_FULL_SUITE=1 to run the default catalog suite')
class TestDefaultSuite(unittest.TestCase):

    def test_default_catalog(self):
        first = run_suite(DEFAULT_SUITE)
        self.assertEqual(first.violations, 0)
        self.assertEqual(first.summary()['failed_groups'], 0)
        by_name = {entry.name: entry for entry in first.entries}
        self.assertTrue(by_name['extraspecial243'].analysis.obstruction)
        self.assertIs(by_name['quaternion8'].analysis.self_similar, False)
        self.assertIs(by_name['heisenberg3'].analysis.self_similar, True)
        second = run_suite(DEFAULT_SUITE)
        self.assertEqual(dump_json(first.to_dict()), dump_json(second.to_dict()))


if __name__ == '__main__':
    unittest.main()
