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
      2024-06-14
"""

import initialize
initialize.set_path()

from contextlib import redirect_stderr, redirect_stdout
import io
import json
from pathlib import Path
import tempfile
import unittest

from spherejerk.analysis import EMPTY_MARKER
from spherejerk.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main


SMALL = {'protocol': {'n_test_pre': 2, 'n_training': 4, 'n_test_post': 2},
         'analysis': {'window': 2, 'n_workers': 1}}


def run(*argv):
    """
    Returns:
        exit code, standard output and standard error of main()
    """
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = main([str(a) for a in argv])
        except SystemExit as e:
            code = e.code
    return code, out.getvalue(), err.getvalue()


class TestUM(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def config(self, data, name='config.json'):
        file = self.dir / name
        file.write_text(json.dumps(data))
        return file

    def test1(self):
        # usage errors
        code, out, err = run('solve', '--from', 0, '--to', 0)
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('must differ', err)
        self.assertEqual(run('solve', '--from', 0, '--to', 3)[0], 
                         EXIT_USAGE)
        self.assertEqual(run('simulate', '--seed', -1)[0], EXIT_USAGE)
        self.assertEqual(run('analyze')[0], EXIT_USAGE)
        self.assertEqual(run()[0], EXIT_USAGE)

    def test2(self):
        # invalid configuration, all problems listed
        file = self.config({'servo': {'servo_rate': 1050.}, 'spere': {}})
        code, out, err = run('simulate', '--config', file, '--out', 
                             self.dir / 'sim', '--quiet')
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('servo.servo_rate', err)
        self.assertIn('spere', err)
        code, out, err = run('simulate', '--config', self.dir / 'no.json')
        self.assertEqual(code, EXIT_USAGE)

    def test3(self):
        # solution files are reproduced byte by byte
        outputs = []
        for name in ('a', 'b'):
            out = self.dir / name
            code, text, err = run('--quiet', 'solve', '--from', 0, '--to', 1,
                                  '--out', out)
            self.assertEqual(code, EXIT_OK, err)
            self.assertIn('deviation from geodesic', text)
            outputs.append({f: (out / f).read_bytes() for f in 
                            ('trajectory.csv', 'mesh.csv', 
                             'residuals.json')})
        self.assertEqual(outputs[0], outputs[1])

        residuals = json.loads(outputs[0]['residuals.json'])
        self.assertTrue(residuals['converged'])
        self.assertLess(residuals['deviation_per_radius'], 1e-3)
        self.assertLess(residuals['max_constraint_residual'], 1e-8)
        self.assertLessEqual(residuals['jerk_cost'], 
                             residuals['seed_cost'] * (1. + 1e-6))
        header = outputs[0]['trajectory.csv'].decode().split('\n')[0]
        self.assertEqual(header, 't,x,y,z,speed,lambda,x_ref,y_ref,z_ref,'
                                 'speed_ref')

    def test4(self):
        # non-convergence is a numerical failure with diagnostics
        file = self.config({'solver': {'tol': 1e-12, 'max_iter': 1, 
                                       'max_nodes': 10}})
        code, out, err = run('solve', '--from', 2, '--to', 1, '--config', 
                             file, '--out', self.dir / 'fail', '--quiet')
        self.assertEqual(code, EXIT_NUMERICAL)
        self.assertIn('"converged": false', err)
        self.assertFalse((self.dir / 'fail' / 'trajectory.csv').exists())

    def test5(self):
        # simulate, analyze and report
        file = self.config(SMALL)
        sim = self.dir / 'sim'
        code, out, err = run('simulate', '--config', file, '--subjects', 2,
                             '--seed', 7, '--out', sim, '--workers', 1)
        self.assertEqual(code, EXIT_OK, err)
        logs = sorted(sim.glob('S*.csv'))
        self.assertEqual([f.name for f in logs], ['S01.csv', 'S02.csv'])
        self.assertIn('testPre: 2, training: 4, testPost: 2', out)
        saved = json.loads((sim / 'config.json').read_text())
        self.assertEqual(saved['seed'], 7)
        self.assertEqual(saved['population']['n_subjects'], 2)

        # same seed, same logs
        again = self.dir / 'again'
        run('simulate', '--config', file, '--subjects', 2, '--seed', 7, 
            '--out', again, '--workers', 2)
        for f in logs:
            self.assertEqual((again / f.name).read_bytes(), f.read_bytes())

        res = self.dir / 'res'
        code, out, err = run('analyze', *logs, '--config', file, '--out', 
                             res, '--quiet')
        self.assertEqual(code, EXIT_OK, err)
        self.assertIn('16 movements', out)
        summary = json.loads((res / 'summary.json').read_text())
        self.assertEqual(summary['subjects'], ['S01', 'S02'])
        self.assertIn('at least 5', 
                      summary['phases']['test']['metrics']['apd']['note'])

        code, out, err = run('report', '--out', res)
        self.assertEqual(code, EXIT_OK, err)
        self.assertEqual(out.rstrip('\n'), 
                         (res / 'report.txt').read_text().rstrip('\n'))

    def test6(self):
        # malformed and empty logs
        file = self.config(SMALL)
        sim = self.dir / 'sim'
        run('simulate', '--config', file, '--seed', 3, '--out', sim)
        log = sim / 'S01.csv'
        lines = log.read_text().split('\n')
        lines[9] = lines[9].replace('testPre', 'warmup')
        bad = self.dir / 'bad.csv'
        bad.write_text('\n'.join(lines))
        code, out, err = run('analyze', bad, '--out', self.dir / 'res')
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn(f'{bad}:10:', err)

        still = self.dir / 'still.csv'
        still.write_text(lines[0] + '\n' + lines[1] + '\n' + 
                         '\n'.join(f'{k / 100.!r},0.2,0.0,0.0,0.0,0.0,0.0,'
                                   f'testPre,-1,none' for k in range(50)) + 
                         '\n')
        code, out, err = run('analyze', still, '--out', self.dir / 'empty', 
                             '--quiet')
        self.assertEqual(code, EXIT_OK, err)
        self.assertIn(EMPTY_MARKER, 
                      (self.dir / 'empty' / 'report.txt').read_text())

        code, out, err = run('report', '--out', self.dir / 'nothing')
        self.assertEqual(code, EXIT_USAGE)


if __name__ == '__main__':
    unittest.main()
