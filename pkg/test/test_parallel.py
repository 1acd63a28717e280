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

import pickle
import unittest

from spherejerk.errors import ConfigError, MissingDataError, TrialLogError
from spherejerk.parallel import map_parallel, merge, n_workers, split


def square(x):
    return x * x


def fail_on_three(x):
    if x == 3:
        raise TrialLogError('S03.csv', 7, 'invalid phase')
    return x


class TestUM(unittest.TestCase):
    def setUp(self):
        pass

    def tearDown(self):
        pass

    def test1(self):
        self.assertGreaterEqual(n_workers(), 1)
        self.assertEqual(n_workers(3), 3)
        self.assertEqual(n_workers(8, n_task=2), 2)
        self.assertEqual(n_workers(4, n_task=0), 1)

    def test2(self):
        groups = split(range(7), 3)
        self.assertEqual(groups, [[0, 1, 2], [3, 4, 5], [6, None, None]])
        self.assertEqual(merge(groups), list(range(7)))
        self.assertEqual(split([], 2), [[], []])
        self.assertEqual(merge(split(range(5), 1)), list(range(5)))

    def test3(self):
        # order of the results does not depend on the workers
        items = list(range(11))
        expected = [x * x for x in items]
        for workers in (1, 2, 3):
            self.assertEqual(map_parallel(square, items, workers), expected)
        self.assertEqual(map_parallel(square, []), [])

    def test4(self):
        # errors of workers reach the caller with their attributes
        with self.assertRaises(TrialLogError) as cm:
            map_parallel(fail_on_three, range(6), workers=2)
        self.assertEqual(cm.exception.line, 7)
        self.assertEqual(cm.exception.file, 'S03.csv')

        for e in (TrialLogError('a.csv', 3, 'bad'), 
                  ConfigError(['x: unknown key', 'y: unknown key']),
                  MissingDataError('values missing', ['S02', 'S01'])):
            copy = pickle.loads(pickle.dumps(e))
            self.assertEqual(str(copy), str(e))
            self.assertIs(type(copy), type(e))


if __name__ == '__main__':
    unittest.main()
