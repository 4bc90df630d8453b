import unittest
from itertools import product

import numpy as np

from selfsim.catalog import build, heisenberg_endomorphism
from selfsim.error_handler import NotInH, NotSimple, TransversalError
from selfsim.group_core import Perm, subgroup_generated
from selfsim.morphism import VirtualEndomorphism, extend_hom, search_simple_endos
from selfsim.tree_rep import (
    MealyAutomaton, act, build_automaton, coset_action, default_transversal, first_level_stabilizer,
    homomorphism_defects, leaf_perms, least_transversal, level_perm_group, parse_word, portrait,
    portrait_classes, separating_depth, split_transversal, transversal_from_reps,
)


class TestTransversals(unittest.TestCase):

    def setUp(self):
        self.G = build('heisenberg3')
        self.endo = heisenberg_endomorphism(self.G)
        self.a, self.b, self.c = (self.G.labels[k] for k in ('a', 'b', 'c'))

    def test_default_transversal_uses_image_witness(self):
        T = default_transversal(self.endo)
        self.assertEqual(T.reps, (0, self.b, self.G.mul(self.b, self.b)))
        self.assertEqual(T.p, 3)
        self.assertEqual(int(T.coset_of[self.a]), 0)
        self.assertEqual(int(T.coset_of[self.b]), 1)

    def test_least_transversal(self):
        T = least_transversal(self.G, self.endo.H)
        self.assertEqual(T.reps[0], 0)
        self.assertEqual(sorted(T.coset_of.tolist()).count(0), 9)

    def test_bad_representatives(self):
        H = self.endo.H
        with self.assertRaises(TransversalError):
            transversal_from_reps(self.G, H, [self.b, 0, self.G.mul(self.b, self.b)])
        with self.assertRaises(TransversalError):
            transversal_from_reps(self.G, H, [0, self.a, self.b])
        with self.assertRaises(TransversalError):
            transversal_from_reps(self.G, H, [0, self.b])

    def test_split_element_must_leave_H(self):
        with self.assertRaises(TransversalError):
            split_transversal(self.G, self.endo.H, self.a)
        with self.assertRaises(TransversalError):
            split_transversal(self.G, self.endo.H, self.G.order)

    def test_transversal_of_another_subgroup(self):
        other = subgroup_generated(self.G, [self.b, self.c])
        with self.assertRaises(NotInH):
            build_automaton(self.endo, split_transversal(self.G, other, self.a))


class TestWorkedExample(unittest.TestCase):

    def setUp(self):
        self.G = build('heisenberg3')
        self.endo = heisenberg_endomorphism(self.G)
        self.A = build_automaton(self.endo)
        self.a, self.b, self.c = (self.G.labels[k] for k in ('a', 'b', 'c'))

    def test_generator_states(self):
        G, A = self.G, self.A
        b2 = G.mul(self.b, self.b)
        self.assertEqual(A.output[self.a].tolist(), [0, 1, 2])
        self.assertEqual(A.delta[self.a].tolist(),
                         [self.c, G.mul(self.c, b2), G.mul(self.c, self.b)])
        # b is the rooted cycle and c = (b, b, b)
        self.assertEqual(A.output[self.b].tolist(), [1, 2, 0])
        self.assertEqual(A.delta[self.b].tolist(), [0, 0, 0])
        self.assertEqual(A.output[self.c].tolist(), [0, 1, 2])
        self.assertEqual(A.delta[self.c].tolist(), [self.b] * 3)

    def test_coset_action(self):
        G, H = self.G, self.endo.H
        T = default_transversal(self.endo)
        self.assertEqual(coset_action(G, H, T, self.b).images, (1, 2, 0))
        self.assertEqual(coset_action(G, H, T, G.mul(self.b, self.b)).images, (2, 0, 1))
        self.assertEqual(coset_action(G, H, T, self.a).images, (0, 1, 2))
        self.assertEqual(coset_action(G, H, T, self.c).images, (0, 1, 2))
        for g in range(G.order):
            sigma = coset_action(G, H, T, g)
            self.assertEqual(self.A.output[g].tolist(), list(sigma.images))
            self.assertEqual(sigma.is_identity(), bool(H.mask[g]))
            for h in range(0, G.order, 4):
                self.assertEqual(coset_action(G, H, T, G.mul(g, h)),
                                 sigma.then(coset_action(G, H, T, h)))

    def test_act(self):
        A = self.A
        self.assertEqual(act(A, A.state('b'), '00'), '10')
        self.assertEqual(act(A, A.state('b'), '2'), '0')
        self.assertEqual(act(A, A.state('c'), '00'), '01')
        self.assertEqual(act(A, A.state('c'), '12'), '10')
        self.assertEqual(act(A, 0, '0212'), '0212')
        self.assertEqual(act(A, A.state('a'), [0, 1]), [0] + act(A, self.c, [1]))
        self.assertEqual(act(A, A.state('a'), ''), '')

    def test_action_is_right_action(self):
        G, A = self.G, self.A
        words = [''.join(map(str, w)) for w in product(range(3), repeat=3)]
        for g in range(0, G.order, 4):
            for h in range(0, G.order, 5):
                gh = G.mul(g, h)
                for w in words:
                    self.assertEqual(act(A, gh, w), act(A, h, act(A, g, w)))

    def test_separating_depth(self):
        result = separating_depth(self.A, range(self.A.n_states))
        self.assertTrue(result.ok)
        self.assertEqual(result.depth, 2)
        shallow = separating_depth(self.A, range(self.A.n_states), cap=1)
        self.assertFalse(shallow.ok)
        self.assertEqual(len(shallow.collisions), 3)
        with self.assertRaises(ValueError):
            separating_depth(self.A, [0, 0])

    def test_portraits(self):
        self.assertEqual(portrait(self.A, self.b, 1).node_perms[()], Perm((1, 2, 0)))
        self.assertEqual(portrait(self.A, self.c, 2), portrait(self.A, self.c, 2))
        classes = portrait_classes(self.A, 1)
        self.assertEqual(np.unique(classes).size, 3)

    def test_level_groups(self):
        gens = [self.a, self.b, self.c]
        self.assertEqual(level_perm_group(self.A, gens, 1).order, 3)
        self.assertEqual(level_perm_group(self.A, gens, 2).order, 27)
        self.assertEqual(leaf_perms(self.A, 2).shape, (27, 9))

    def test_stabilizer_is_h(self):
        self.assertEqual(first_level_stabilizer(self.A, self.endo), self.endo.H)
        self.assertTrue(self.A.first_level_transitive())
        self.assertTrue(self.A.is_state_closed())
        self.assertEqual(self.A.trivial_states(), [0])

    def test_homomorphism_property(self):
        self.assertEqual(homomorphism_defects(self.A, self.G, 2, samples=300), [])

    def test_reachable_sub_automaton(self):
        sub, old = self.A.reachable([self.a, self.b, self.c])
        self.assertEqual(old[:3].tolist(), [self.a, self.b, self.c])
        self.assertTrue(sub.is_state_closed())
        self.assertEqual(sub.state('a'), 0)
        for w in ('0', '12', '2101'):
            self.assertEqual(act(sub, sub.state('a'), w), act(self.A, self.a, w))

    def test_serialisation(self):
        sub, _ = self.A.reachable([self.a, self.b, self.c])
        again = MealyAutomaton.from_dict(sub.to_dict())
        self.assertEqual(again.labels, sub.labels)
        self.assertEqual(act(again, again.state('c'), '120'), act(sub, sub.state('c'), '120'))
        dot = sub.relabel({'b': 'β'}).to_dot('heisenberg3')
        self.assertIn('digraph "heisenberg3"', dot)
        self.assertIn('β|(0 1 2)', dot)
        self.assertIn('0/1', dot)

    def test_non_simple_endomorphism(self):
        G = self.G
        H = self.endo.H
        trivial = VirtualEndomorphism(G, H, extend_hom(H, [self.a, self.c], [0, 0]))
        with self.assertRaises(NotSimple):
            build_automaton(trivial)
        A = build_automaton(trivial, require_simple=False)
        self.assertFalse(separating_depth(A, range(A.n_states), cap=4).ok)


class TestKleinFour(unittest.TestCase):

    def test_faithful_by_depth_three(self):
        G = build('c2xc2')
        endos = search_simple_endos(G, 2).endos
        self.assertTrue(endos)
        for endo in endos:
            A = build_automaton(endo)
            result = separating_depth(A, range(A.n_states), cap=3)
            self.assertTrue(result.ok, endo.label)
            self.assertEqual(first_level_stabilizer(A, endo), endo.H)


class TestWords(unittest.TestCase):

    def test_parse_word(self):
        self.assertEqual(parse_word('0102', 3), [0, 1, 0, 2])
        self.assertEqual(parse_word('10,11', 12), [10, 11])
        self.assertEqual(parse_word('', 2), [])
        with self.assertRaises(ValueError):
            parse_word('3', 3)

    def test_automaton_shape(self):
        with self.assertRaises(ValueError):
            MealyAutomaton(2, ('e',), np.zeros((1, 3), dtype=np.int64), np.zeros((1, 2), dtype=np.int64))

    def test_from_dict_rejects_open_transitions(self):
        data = {'p': 2, 'states': [{'id': 0, 'label': 's', 'output': [1, 0], 'delta': [0, 1]}]}
        with self.assertRaises(ValueError):
            MealyAutomaton.from_dict(data)


if __name__ == '__main__':
    unittest.main()
