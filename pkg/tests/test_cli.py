import json
import os
import tempfile
import unittest
from unittest.mock import MagicMock, patch

from selfsim.cli import main
from selfsim.group_io import load_group


class TestCli(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write_json(self, name, data):
        path = self.path(name)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(data, handle)
        return path

    def run_json(self, *args):
        out = self.path('out.json')
        code = main(list(args) + ['--out', out])
        with open(out, encoding='utf-8') as handle:
            return code, json.load(handle)

    def test_catalog_list(self):
        code, rows = self.run_json('catalog', 'list')
        self.assertEqual(code, 0)
        names = [row['name'] for row in rows]
        self.assertIn('heisenberg3', names)
        self.assertIn('extraspecial243', names)

    def test_catalog_export_and_analyze_file(self):
        group_file = self.path('h3.json')
        self.assertEqual(main(['catalog', 'export', 'heisenberg3', '--out', group_file]), 0)
        self.assertEqual(load_group(group_file).order, 27)
        code, data = self.run_json('analyze', group_file)
        self.assertEqual(code, 0)
        self.assertEqual(data['order'], 27)
        self.assertTrue(data['power_abelian'])
        self.assertFalse(data['potent'])

    def test_analyze_text(self):
        out = self.path('report.txt')
        self.assertEqual(main(['analyze', 'heisenberg2', '--format', 'text', '--out', out]), 0)
        with open(out) as handle:
            text = handle.read()
        self.assertRegex(text, r'power abelian:\s+False')

    def test_search(self):
        code, data = self.run_json('search-selfsim', 'c2xc2', '--all')
        self.assertEqual(code, 0)
        self.assertTrue(data['self_similar'])
        self.assertEqual(data['homs_examined'], 12)
        code, data = self.run_json('search-selfsim', 'quaternion8')
        self.assertFalse(data['self_similar'])

    def test_search_finds_worked_example(self):
        code, data = self.run_json('search-selfsim', 'heisenberg3', '--all')
        self.assertEqual(code, 0)
        found = [(e['H_gens_named'], e['images_named']) for e in data['endos']]
        self.assertIn((['a', 'c'], ['c', 'b']), found)

    def test_elements(self):
        code, data = self.run_json('elements', 'c3')
        self.assertEqual(code, 0)
        self.assertEqual([row['order'] for row in data['elements']], [1, 3, 3])

    def test_worked_example_automaton(self):
        code, data = self.run_json('emit-automaton', 'heisenberg3', '--endo', 'example23')
        self.assertEqual(code, 0)
        self.assertEqual(set(data['initials']), {'α', 'β', 'γ'})
        self.assertEqual(data['transversal'][:2], [0, 2])
        automaton = self.path('example23.json')
        os.rename(self.path('out.json'), automaton)

        code, data = self.run_json('act', '--automaton', automaton, '--state', 'β', '--word', '00')
        self.assertEqual((code, data['image']), (0, '10'))
        code, data = self.run_json('act', '--automaton', automaton, '--state', 'γ', '--word', '12')
        self.assertEqual(data['image'], '10')

    def test_dot_output(self):
        out = self.path('a.dot')
        self.assertEqual(main(['emit-automaton', 'heisenberg3', '--endo', 'example23',
                               '--format', 'dot', '--out', out]), 0)
        with open(out, encoding='utf-8') as handle:
            dot = handle.read()
        self.assertTrue(dot.startswith('digraph'))
        self.assertIn('[label="α|', dot)
        self.assertIn('[label="β|(0 1 2)"]', dot)
        self.assertIn('[label="γ|', dot)
        self.assertIn('[label="0/1"]', dot)
        self.assertIn('[label="2/0"]', dot)

    def test_single_theorem(self):
        code, data = self.run_json('verify', '--theorem', '2', '--group', 'heisenberg3',
                                   '--endo', 'example23')
        self.assertEqual(code, 0)
        self.assertEqual(data['violations'], 0)
        self.assertEqual(data['reports'][0]['checks'][0]['name'], 'theorem2')

    def test_small_suite(self):
        code, data = self.run_json('verify', '--groups', 'c2,c3', '--no-wreath')
        self.assertEqual(code, 0)
        self.assertEqual(data['summary']['groups'], 2)
        self.assertEqual(data['summary']['violations'], 0)

    @patch('selfsim.cli.run_suite')
    def test_violations_exit_one(self, mock_suite):
        result = MagicMock()
        result.violations = 1
        result.to_dict.return_value = {'summary': {'violations': 1}}
        result.summary.return_value = {'groups': 1, 'endomorphisms_checked': 1, 'violations': 1}
        mock_suite.return_value = result
        self.assertEqual(main(['verify', '--suite', 'default', '--out', self.path('r.json')]), 1)

    def test_errors_exit_two(self):
        self.assertEqual(main(['analyze', 'no_such_group']), 2)
        self.assertEqual(main(['verify']), 2)
        self.assertEqual(main(['--closure-cap', '4', 'analyze', 'c8']), 2)
        self.assertEqual(main(['act', '--automaton', self.path('missing.json'), '--state', 'a',
                               '--word', '0']), 2)
        self.assertEqual(main(['--depth-cap', '0', 'catalog', 'list']), 2)

    def test_image_array_group_file(self):
        group_file = self.write_json('c3.json', {'name': 'c3', 'degree': 3, 'generators': [[1, 2, 0]],
                                                 'prime': 3})
        code, data = self.run_json('elements', group_file)
        self.assertEqual(code, 0)
        self.assertEqual([row['order'] for row in data['elements']], [1, 3, 3])
        self.assertEqual(data['elements'][1]['images'], [1, 2, 0])

    def test_algebra_errors_exit_two(self):
        endo_file = self.write_json('flat.json', {'H_gens': [2], 'images': [2]})
        self.assertEqual(main(['emit-automaton', 'c4', '--endo', endo_file]), 2)
        self.assertEqual(main(['emit-automaton', 'heisenberg3', '--endo', 'example23',
                               '--transversal', '1']), 2)
        s3 = self.write_json('s3.json', {'name': 's3', 'degree': 3,
                                         'generators': [[[0, 1, 2]], [[0, 1]]]})
        self.assertEqual(main(['analyze', s3]), 2)

    def test_bad_prime_exits_two(self):
        for prime in ('x', 4, True, -3):
            group_file = self.write_json('c3.json', {'degree': 3, 'generators': [[[0, 1, 2]]],
                                                     'prime': prime})
            self.assertEqual(main(['analyze', group_file]), 2, prime)

    def test_config_file(self):
        config = self.path('config.json')
        with open(config, 'w') as handle:
            json.dump({'limits': {'depth_cap': 6}, 'suite': {'groups': ['c2']},
                       'output': {'format': 'text'}}, handle)
        out = self.path('suite.json')
        self.assertEqual(main(['--config', config, 'verify', '--suite', 'default', '--no-wreath',
                               '--out', out]), 0)
        with open(out) as handle:
            self.assertEqual([e['name'] for e in json.load(handle)['entries']], ['c2'])


if __name__ == '__main__':
    unittest.main()
