import unittest

from selfsim.catalog import build, heisenberg_endomorphism, list_entries
from selfsim.error_handler import DegenerateRestriction, GeneratorsDontGenerate, NotAPGroup
from selfsim.group_core import all_subgroups, maximal_subgroups, subgroup_generated, whole_group
from selfsim.morphism import (
    HomEnumeration, VirtualEndomorphism, derived_obstruction, enumerate_homs, extend_hom,
    f_core, is_simple, kernel_scan_index_p, level_kernel_chain, restrict_endo, search_simple_endos,
)


def brute_force_fcore(endo, subgroups):
    """Largest subgroup K <= H, normal in G, with f(K) <= K, from the full subgroup list."""
    G = endo.group
    best = None
    for K in subgroups:
        if not K.issubset(endo.H):
            continue
        conjugates_inside = all(
            K.mask[G.table[G.table[G.inv[g], K.members], g]].all() for g in range(G.order))
        invariant = K.mask[endo.f.image_of[K.members]].all()
        if conjugates_inside and invariant and (best is None or K.order > best.order):
            best = K
    return best


class TestHomomorphisms(unittest.TestCase):

    def setUp(self):
        self.G = build('heisenberg3')
        self.a, self.b, self.c = (self.G.labels[k] for k in ('a', 'b', 'c'))
        self.H = subgroup_generated(self.G, [self.a, self.c])

    def test_extend_hom(self):
        hom = extend_hom(self.H, [self.a, self.c], [self.c, self.b])
        self.assertIsNotNone(hom)
        self.assertEqual(hom(self.a), self.c)
        self.assertEqual(hom(self.c), self.b)
        self.assertTrue(hom.is_multiplicative())
        self.assertTrue(hom.kernel.is_trivial())
        self.assertEqual(hom.image.order, 9)
        with self.assertRaises(KeyError):
            hom(self.b)

    def test_extend_hom_conflict(self):
        # H is abelian but a and b do not commute
        self.assertIsNone(extend_hom(self.H, [self.a, self.c], [self.a, self.b]))

    def test_extend_hom_needs_generators(self):
        with self.assertRaises(GeneratorsDontGenerate):
            extend_hom(self.H, [self.a], [self.c])

    def test_commuting_pairs(self):
        # homs from C3 x C3 into the Heisenberg group are its commuting pairs: 27 * 11
        stats = HomEnumeration()
        homs = list(enumerate_homs(self.H, self.G, stats))
        self.assertEqual(len(homs), 297)
        self.assertEqual(stats.homs_yielded, 297)
        self.assertEqual(len({h.image_of.tobytes() for h in homs}), 297)
        for hom in homs[::37]:
            self.assertTrue(hom.is_multiplicative())

    def test_cyclic_homs(self):
        G = build('c4')
        self.assertEqual(len(list(enumerate_homs(whole_group(G), G))), 4)

    def test_kernel_scan_matches_hyperplanes(self):
        scanned = kernel_scan_index_p(self.G, 3)
        maximal = maximal_subgroups(self.G, 3)
        self.assertEqual(sorted(S.key for S in scanned), sorted(S.key for S in maximal))


class TestVirtualEndomorphism(unittest.TestCase):

    def setUp(self):
        self.G = build('heisenberg3')
        self.endo = heisenberg_endomorphism(self.G)

    def test_worked_example_is_simple(self):
        self.assertEqual(self.endo.p, 3)
        self.assertEqual(self.endo.H.order, 9)
        self.assertTrue(self.endo.simple)
        self.assertTrue(f_core(self.endo).is_trivial())
        described = self.endo.describe()
        self.assertEqual(described['label'], 'example23')
        self.assertEqual(described['images_named'], ['c', 'b'])

    def test_is_simple(self):
        self.assertTrue(is_simple(self.endo))
        H = self.endo.H
        trivial = VirtualEndomorphism(self.G, H, extend_hom(H, list(H.gens), [0] * len(H.gens)))
        self.assertFalse(is_simple(trivial))
        self.assertEqual(f_core(trivial), H)
        a, c = self.G.labels['a'], self.G.labels['c']
        # a -> a, c -> c fixes H
        identity = VirtualEndomorphism(self.G, H, extend_hom(H, [a, c], [a, c]))
        self.assertFalse(is_simple(identity))

    def test_level_kernel_chain(self):
        orders = [K.order for K in level_kernel_chain(self.endo)]
        self.assertEqual(orders, [27, 9, 1, 1])

    def test_fcore_matches_brute_force(self):
        for entry in list_entries():
            if entry.expected_order > 16:
                continue
            G = build(entry)
            subgroups = all_subgroups(G)
            for H in maximal_subgroups(G, entry.p):
                for hom in enumerate_homs(H, G):
                    endo = VirtualEndomorphism(G, H, hom)
                    self.assertEqual(f_core(endo), brute_force_fcore(endo, subgroups), entry.name)

    def test_prime_index_required(self):
        G = self.G
        H = subgroup_generated(G, [G.labels['c']])
        hom = extend_hom(H, [G.labels['c']], [G.labels['c']])
        with self.assertRaises(NotAPGroup):
            VirtualEndomorphism(G, H, hom)

    def test_restriction(self):
        restricted = restrict_endo(self.endo)
        self.assertEqual(restricted.group.order, 9)
        self.assertEqual(restricted.H.order, 3)
        self.assertTrue(restricted.simple)

    def test_degenerate_restriction(self):
        G = self.G
        a, c = G.labels['a'], G.labels['c']
        trivial = VirtualEndomorphism(G, self.endo.H, extend_hom(self.endo.H, [a, c], [0, 0]))
        self.assertFalse(trivial.simple)
        with self.assertRaises(DegenerateRestriction):
            restrict_endo(trivial)


class TestSearch(unittest.TestCase):

    def test_cyclic_four_is_not_self_similar(self):
        result = search_simple_endos(build('c4'), 2)
        self.assertTrue(result.exhausted)
        self.assertEqual(result.homs_examined, 2)
        self.assertEqual(result.endos, [])
        self.assertIs(result.self_similar, False)

    def test_klein_four(self):
        result = search_simple_endos(build('c2xc2'), 2)
        self.assertTrue(result.exhausted)
        self.assertEqual(result.homs_examined, 12)
        self.assertIs(result.self_similar, True)
        self.assertTrue(all(endo.simple for endo in result.endos))
        self.assertTrue(result.endos[0].label.startswith('H'))

    def test_stop_at_first(self):
        result = search_simple_endos(build('c2xc2'), 2, stop_at_first=True)
        self.assertEqual(len(result.endos), 1)
        self.assertFalse(result.exhausted)
        self.assertIs(result.self_similar, True)

    def test_budget_leaves_question_open(self):
        result = search_simple_endos(build('quaternion8'), 2, budget=1)
        self.assertFalse(result.exhausted)
        self.assertEqual(result.homs_examined, 1)
        self.assertIsNone(result.self_similar)

    def test_not_self_similar(self):
        for name, p in (('quaternion8', 2), ('c8', 2), ('c9', 3), ('extraspecial27_exp9', 3)):
            result = search_simple_endos(build(name), p)
            self.assertTrue(result.exhausted, name)
            self.assertIs(result.self_similar, False, name)

    def test_self_similar(self):
        for name, p in (('c2', 2), ('c3', 3), ('c2xc2xc2', 2), ('c3xc3', 3), ('heisenberg2', 2)):
            result = search_simple_endos(build(name), p, stop_at_first=True)
            self.assertIs(result.self_similar, True, name)

    def test_heisenberg_counts(self):
        result = search_simple_endos(build('heisenberg3'), 3)
        self.assertTrue(result.exhausted)
        self.assertEqual(result.homs_examined, 4 * 297)
        self.assertEqual([row['homs'] for row in result.per_subgroup], [297] * 4)
        self.assertTrue(result.endos)

    def test_derived_obstruction(self):
        self.assertTrue(derived_obstruction(build('extraspecial243'), 3))
        self.assertFalse(derived_obstruction(build('heisenberg3'), 3))
        self.assertFalse(derived_obstruction(build('c4'), 2))
        self.assertFalse(derived_obstruction(build('quaternion8'), 2))


if __name__ == '__main__':
    unittest.main()
