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
      2024-05-12
"""

__all__ = ['Base']

from datetime import datetime
import logging
import os
from pathlib import Path
import sys
from tempfile import gettempdir
from time import time
from typing import Any, Optional, Union

logger = logging.getLogger(__name__)


class Base(object):
    """
    Controls execution of an operation, see examples in 
    ../test/test_base.py 

    Every object has a uniform interface to code execution via public
    methods:
        - pre-process:   pre() which calls load()
        - main task:    task() which is called by control()
        - post-process: post() which calls save()

    The __call__() method calls prolog(), pre(), control(), post() and
    epilog(). Transient repetition of task() is controlled in derived 
    classes by an overloaded control(), see class Loop

       --------------
      |              |        ---> pre() ---> load()
      |              |       |
      |  __call__()  --------+---> control() ---> task()
      |              |       |
      |              |        ---> post() ---> save()
       --------------
    """

    def __init__(self, identifier: str = 'Base') -> None:
        """
        Args:
            identifier:
                Unique identifier of object, also stem of the log file
        """
        if not identifier:
            identifier = self.__class__.__name__
        self._identifier: str = str(identifier)
        self.program: str = self.__class__.__name__
        self.version: str = '24.05'

        self.path: Optional[Path] = None       # output dir., see setter

        self._exe_time_start: float = 0.0      # start measure exec.time
        self._min_exe_time_shown: float = 1.0  # times < limit not shown

        self._silent: bool = False             # console output if False
        self._log_to_file: bool = True         # file handler in prolog
        self._log_handler: Optional[logging.Handler] = None

    def __call__(self, **kwargs: Any) -> Any:
        """
        Executes object

        Kwargs:
            silent (bool):
                if True, then suppress printing

            Keyword arguments to be passed to pre(), control(), post()

        Returns:
            see self.control()
        """
        if 'silent' in kwargs:
            self.silent = kwargs['silent']

        if not self.prolog():
            self.write('??? Base.prolog() returned with False')

        try:
            if not self.pre(**kwargs):
                self.write('??? Base.pre() returned with False')

            task_result = self.control(**kwargs)

            if not self.post(**kwargs):
                self.write('??? Base.post() returned with False')
        except Exception:
            self._close_log()
            raise

        if not self.epilog():
            self.write('??? Base.epilog() returned with False')

        return task_result

    def __str__(self) -> str:
        return "{identifier: '" + self.identifier + "', program: '" + \
            self.program + "'}"

    @property
    def identifier(self) -> str:
        return self._identifier

    @identifier.setter
    def identifier(self, value: str) -> None:
        if value:
            self._identifier = str(value)
        else:
            self._identifier = self.__class__.__name__

    @property
    def silent(self) -> bool:
        return self._silent

    @silent.setter
    def silent(self, value: bool) -> None:
        self._silent = bool(value)

    @property
    def path(self) -> Path:
        return self._path

    @path.setter
    def path(self, value: Optional[Union[str, Path]]) -> None:
        if not value:
            self._path = Path(gettempdir())
        else:
            self._path = Path(str(value))

    def warn(self, message: str = '') -> None:
        """
        - Sends message to logger
        - Sends message to console if not in silent mode

        Args:
            message:
                Warning to be written to log file and console
        """
        if not self.silent:
            print("!!! '" + self.program + "', warning: '" + message + "'", 
                  file=sys.stderr)
        logger.warning(self.identifier + ' : ' + message)

    def write(self, message: str, end: str = '\n') -> None:
        """
        - Message to logger with file handler
        - Message to console if not in silent mode

        Args:
            message:
                Message to be written to log file and console
                
            end:
                end-of-line string
        """
        if not self.silent:
            print(message, end=end)
        logger.info(message)

    def debug(self, message: str) -> None:
        """
        Message to logger only, used for per-step messages of loops
        """
        logger.debug(self.identifier + ' : ' + message)

    def prolog(self) -> bool:
        if self._log_to_file and not logger.handlers:
            os.makedirs(self.path, exist_ok=True)
            logger.setLevel(logging.INFO)
            f = os.path.join(self.path, self.identifier + '.log')
            handler = logging.FileHandler(f, mode='w')
            handler.setLevel(logging.DEBUG)
            handler.setFormatter(logging.Formatter(
                '%(asctime)s %(levelname)s %(message)s'))
            logger.addHandler(handler)
            self._log_handler = handler

        message = "*** This is: '" + self.program + "'"
        if self.identifier and self.identifier != self.program:
            message += ", id: '" + self.identifier + "'"
        message += ", version: '" + self.version + "'"
        self.write(message)
        self.write('    Date: ' + str(datetime.now().date()) +
                   ' ' + str(datetime.now().time())[:8])
        self.write('    Path: ' + "'" + str(self.path) + "'")
        self.write('=== Pre-processing')
        self._exe_time_start = time()

        return True

    def epilog(self) -> bool:
        exe_time = time() - self._exe_time_start
        if exe_time >= self._min_exe_time_shown:
            self.write('    Execution time: ' + format(round(exe_time, 2)))
        self.write("*** '" + self.program + "' is successfully completed")

        self._close_log()
        sys.stdout.flush()

        return True

    def _close_log(self) -> None:
        if self._log_handler is not None:
            self._log_handler.close()
            logger.removeHandler(self._log_handler)
            self._log_handler = None

    def load(self) -> bool:
        return True

    def save(self) -> bool:
        return True

    def initial_condition(self) -> bool:
        return True

    def update_transient(self) -> bool:
        return True

    def pre(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            Keyword arguments of the derived classes

        Returns:
            False if data loading failed
        """
        return self.load()

    def task(self, **kwargs: Any) -> Any:
        """
        Kwargs:
            Keyword arguments of the derived classes

        Returns:
            Residuum from range [0., 1.], indicating error of task
            OR
            result of the operation in classes derived from Base
        """
        return 0.0

    def post(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            Keyword arguments of the derived classes

        Returns:
            False if data saving failed
        """
        return self.save()

    def control(self, **kwargs: Any) -> Any:
        """
        Kwargs:
            Keyword arguments to be passed to task() of this object

        Returns:
            result of self.task()
        """
        self.write('=== Task-processing')
        task_result = self.task(**kwargs)

        exe_time = time() - self._exe_time_start
        if exe_time >= self._min_exe_time_shown:
            self.write('    Execution time: {:2f} s'.format(
                round(exe_time, 2)))
        self._exe_time_start = time()
        self.write('=== Post-processing')

        return task_result
