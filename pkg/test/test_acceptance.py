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
      2024-06-15
"""

import initialize
initialize.set_path()

from contextlib import redirect_stdout
import io
import json
import pandas as pd
from pathlib import Path
import tempfile
from time import time
import unittest

from spherejerk.cli import EXIT_OK, main
from spherejerk.metrics import segment_movements
from spherejerk.triallog import read_trial_log


"""
    End-to-end runs of the default protocol: simulation of a population
    of learning subjects, analysis and population statistics
"""

N_SUBJECT = 20


def run(*argv):
    with redirect_stdout(io.StringIO()) as out:
        code = main([str(a) for a in argv])
    return code, out.getvalue()


class TestUM(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = Path(cls.tmp.name)
        start = time()
        code, out = run('--quiet', 'simulate', '--subjects', N_SUBJECT, 
                        '--seed', 7, '--out', cls.dir / 'logs')
        assert code == EXIT_OK, out
        cls.logs = sorted((cls.dir / 'logs').glob('S*.csv'))
        code, out = run('--quiet', 'analyze', *cls.logs, '--out', 
                        cls.dir / 'results')
        assert code == EXIT_OK, out
        cls.summary = json.loads((cls.dir / 'results' / 
                                  'summary.json').read_text())
        cls.elapsed = time() - start

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test1(self):
        # all generated movements are recovered
        self.assertEqual(len(self.logs), N_SUBJECT)
        log = read_trial_log(self.logs[0])
        self.assertEqual(len(log.movements), 420)
        self.assertEqual(len(segment_movements(log)), 420)
        self.assertEqual(self.summary['n_movements'], 420 * N_SUBJECT)
        print(f'simulation and analysis: {self.elapsed:.1f} s')

    def test2(self):
        # learning reduces deviation, force and profile error in the 
        # training and in the test movements
        for phase in ('training', 'test'):
            tests = self.summary['phases'][phase]['metrics']
            for m in ('apd', 'acf', 'cfv', 'vpe'):
                e = tests[m]
                print(f"{phase} {m}: reduction "
                      f"{e['reduction_percent']:.1f}%, "
                      f"p = {e['p_value']:.3g}")
                label = f'{phase} {m}'
                self.assertEqual(e['n_subjects'], N_SUBJECT, label)
                self.assertLess(e['p_value'], 0.05, label)
                self.assertGreater(e['reduction_percent'], 0., label)
                self.assertGreater(e['fraction_reducing'], 0.5, label)

    def test3(self):
        # change-sign tables of the three pairs
        for phase in ('training', 'test'):
            for e in self.summary['phases'][phase]['pairs']:
                self.assertEqual(e['n_subjects'], N_SUBJECT)
                self.assertTrue(0. <= e['fraction_both'] <= 
                                min(e['fraction1'], e['fraction2']))

    def test4(self):
        # ideal subjects move without deviation, force or profile error
        config = self.dir / 'ideal.json'
        config.write_text(json.dumps({
            'subject': {'path_bias': 0., 'penetration_bias': 0., 
                        'timing_distortion': 0., 'motor_noise': 0.},
            'protocol': {'n_test_pre': 4, 'n_training': 8, 
                         'n_test_post': 4}}))
        out = self.dir / 'ideal'
        self.assertEqual(run('--quiet', 'simulate', '--config', config, 
                             '--out', out)[0], EXIT_OK)
        self.assertEqual(run('--quiet', 'analyze', out / 'S01.csv', 
                             '--out', out)[0], EXIT_OK)
        medians = json.loads((out / 'summary.json').read_text())['medians']
        for m in ('apd', 'acf', 'cfv'):
            self.assertLess(medians[m], 1e-6, m)
        self.assertGreater(medians['ssj'], 0.)

        # speed profile error below one percent of the path length
        table = pd.read_csv(out / 'metrics.csv')
        self.assertEqual(len(table), 16)
        relative = table['vpe'] / table['path_length']
        print('largest vpe / path length:', relative.max())
        self.assertTrue((relative < 0.01).all())


if __name__ == '__main__':
    unittest.main()
