"""
  Copyright (c) 2024- by the spherejerk contributors

  This is free software; you can redistribute it and/or modify it
  under the terms of the GNU Lesser General Public License as
  published by the Free Software Foundation; either version 3.0 of
  the License, or (at your option) any later version.

  This software is distributed in the hope that it will be useful,
  but WITHOUT ANY WARRANTY; without even the implied warranty of
  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
  Lesser General Public License for more details.

  You should have received a copy of the GNU Lesser General Public
  License along with this software; if not, write to the Free
  Software Foundation, Inc., 51 Franklin St, Fifth Floor, Boston, MA
  02110-1301 USA, or see the FSF site: http://www.fsf.org.

  Version:
      2024-06-12
"""

import initialize
initialize.set_path()

import json
from pathlib import Path
import tempfile
import unittest

from spherejerk.config import (RunConfig, config_to_dict, load_config, 
    parse_config, save_config)
from spherejerk.errors import ConfigError


class TestUM(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test1(self):
        # defaults of the experiment
        config = load_config()
        self.assertEqual(config, RunConfig())
        self.assertEqual(config.sphere.radius, 0.2)
        self.assertEqual(config.sphere.stiffness, 1000.)
        self.assertEqual(config.servo.servo_rate, 1000.)
        self.assertEqual(config.servo.speed_band, (0.6, 1.0))
        self.assertEqual(config.protocol.n_training, 300)
        self.assertEqual(config.protocol.n_test_pre, 60)
        self.assertEqual(config.analysis.threshold, 0.025)
        self.assertEqual(config.solver.tol, 1e-8)

    def test2(self):
        # partial file overrides single keys
        config = parse_config({'sphere': {'radius': 0.25}, 
                               'subject': {'learning_rate': 0.02},
                               'servo': {'speed_band': [0.5, 0.9]},
                               'seed': 7, 'out': 'results'})
        self.assertEqual(config.sphere.radius, 0.25)
        self.assertEqual(config.sphere.stiffness, 1000.)
        self.assertEqual(config.subject.learning_rate, 0.02)
        self.assertEqual(config.servo.speed_band, (0.5, 0.9))
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.out, 'results')
        self.assertEqual(parse_config({'protocol': {'n_training': 10.0}})
                         .protocol.n_training, 10)

    def test3(self):
        # all problems are reported at once
        with self.assertRaises(ConfigError) as cm:
            parse_config({'spere': {}, 
                          'servo': {'servo_rate': 1050., 'gain': 2},
                          'solver': {'tol': 'small', 'project': 1},
                          'protocol': {'plane_height': 0.3},
                          'seed': -1})
        problems = cm.exception.problems
        print('problems:', *problems, sep='\n    ')
        for text in ('spere: unknown key', 'servo.gain: unknown key',
                     'servo.servo_rate', 'solver.tol', 'solver.project',
                     'plane_height', 'seed'):
            self.assertTrue(any(text in p for p in problems), text)

        # an unknown key keeps the valid keys of its section
        with self.assertRaises(ConfigError) as cm:
            parse_config({'servo': {'servo_rate': 1050., 'typo': 1}})
        problems = cm.exception.problems
        self.assertEqual(len(problems), 2)
        self.assertTrue(any('servo.typo: unknown key' in p
                            for p in problems))
        self.assertTrue(any('servo.servo_rate (1050.0)' in p
                            for p in problems))

        with self.assertRaises(ConfigError):
            parse_config([1, 2])
        with self.assertRaises(ConfigError):
            parse_config({'sphere': 0.2})
        with self.assertRaises(ConfigError):
            parse_config({'analysis': {'window': 0}})

    def test4(self):
        # unreadable and malformed files
        with self.assertRaises(ConfigError):
            load_config(self.dir / 'missing.json')
        file = self.dir / 'bad.json'
        file.write_text('{"seed": 1,\n')
        with self.assertRaises(ConfigError) as cm:
            load_config(file)
        self.assertIn('bad.json', str(cm.exception))

    def test5(self):
        # saved configuration is read back identically
        config = parse_config({'sphere': {'center': [0.1, 0., -0.1]}, 
                               'population': {'n_subjects': 20},
                               'solver': {'project': True}, 'seed': 3})
        file = save_config(config, self.dir / 'sub' / 'config.json')
        self.assertEqual(load_config(file), config)
        data = json.loads(file.read_text())
        self.assertEqual(data, config_to_dict(config))
        self.assertEqual(data['sphere']['center'], [0.1, 0., -0.1])


if __name__ == '__main__':
    unittest.main()
