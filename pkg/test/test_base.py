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

import logging
from pathlib import Path
import tempfile
from typing import Any
import unittest

from spherejerk.base import Base


class Foo(Base):
    def __init__(self, identifier: str = 'Foo') -> None:
        super().__init__(identifier=identifier)
        self.x = 3.0
        self.calls = []
        self.loaded = False
        self.saved = False

    def load(self) -> bool:
        self.loaded = True
        return True

    def save(self) -> bool:
        self.saved = True
        return True

    def pre(self, **kwargs: Any) -> bool:
        ok = super().pre(**kwargs)
        self.calls.append('pre')
        return ok

    def task(self, **kwargs: Any) -> float:
        super().task(**kwargs)
        self.calls.append('task')
        self.x *= kwargs.get('factor', 2.0)
        return self.x

    def post(self, **kwargs: Any) -> bool:
        ok = super().post(**kwargs)
        self.calls.append('post')
        self.write('    x(' + self.identifier + '): ' + str(self.x))
        return ok


class TestUM(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test1(self):
        # pre, task and post in order, kwargs passed to task
        foo = Foo('root1')
        foo.path = self.tmp.name

        x = foo(factor=3.0, silent=True)
        self.assertEqual(x, 9.0)
        self.assertTrue(foo.silent)
        self.assertEqual(foo.calls, ['pre', 'task', 'post'])
        self.assertTrue(foo.loaded and foo.saved)
        self.assertIn('root1', str(foo))

        x = foo(silent=True)
        self.assertEqual(x, 18.0)
        self.assertEqual(foo.calls, ['pre', 'task', 'post'] * 2)

    def test2(self):
        # messages go to the log file named after the identifier
        foo = Foo('root2')
        foo.path = Path(self.tmp.name) / 'sub'
        foo(silent=True)
        log = foo.path / 'root2.log'
        self.assertTrue(log.is_file())
        text = log.read_text()
        self.assertIn("This is: 'Foo'", text)
        self.assertIn('x(root2): 6.0', text)
        self.assertFalse(logging.getLogger('spherejerk.base').handlers)

    def test3(self):
        # defaults of identifier and path
        b = Base('')
        self.assertEqual(b.identifier, 'Base')
        b.identifier = None
        self.assertEqual(b.identifier, 'Base')
        self.assertTrue(b.path.is_dir())
        b._log_to_file = False
        self.assertEqual(b(silent=True), 0.0)


if __name__ == '__main__':
    unittest.main()
