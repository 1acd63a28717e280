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

__all__ = ['Loop']

import numpy as np
from time import time
from typing import Any

try:
    from spherejerk.base import Base
except ImportError:
    from base import Base


class Loop(Base):
    """
    Controls transient loops. Instances of this class are high-level 
    objects repeating task() with constant time step until the final
    time is reached or early_stop() returns True
    """

    def __init__(self, identifier: str = 'Loop') -> None:
        super().__init__(identifier)

        # transient settings are only relevant if t_end > 0
        self.t: float = 0.              # actual time
        self.t_begin: float = 0.        # start time
        self.t_end: float = 0.          # final time
        self.dt: float = 1e-2           # time step size
        self.step: int = 0              # index of actual time step

    def __str__(self) -> str:
        s = super().__str__()
        if self.is_transient():
            s += "\n{transient: {t: '" + '{:f}'.format(self.t) + \
                "', t_begin: '" + str(self.t_begin) + "', t_end: '" + \
                str(self.t_end) + "', dt: '" + str(self.dt) + "'}}"
        return s

    def is_transient(self) -> bool:
        return self.t_end > self.t_begin

    def n_step(self) -> int:
        """
        Returns:
            Number of time steps between t_begin and t_end
        """
        if not self.is_transient():
            return 0
        return int(round((self.t_end - self.t_begin) / self.dt))

    def set_transient(self, t_begin: float = 0., t_end: float = 0., 
                      dt: float = 0., n: int = 0) -> None:
        """
        transient loops can be set with two parameter combinations:
            1. dt and n
            2. dt and t_end 
        optionally, the start time t_begin can be set
        """
        self.t_begin = max(float(t_begin), 0.)
        if t_end <= self.t_begin and dt > 0. and n > 0:
            t_end = self.t_begin + n * dt
        self.t_end = max(float(t_end), self.t_begin)

        if self.t_end > self.t_begin:
            if dt <= 0.:
                assert n > 0, 'n must be greater zero if dt is zero'
                dt = (self.t_end - self.t_begin) / n
            self.dt = float(dt)

    def early_stop(self) -> bool:
        return False
    
    def control(self, **kwargs: Any) -> Any:
        """
        Kwargs:
            Keyword arguments passed to super.control() and task()

        Returns:
            Result of last call of task()
        """
        if not self.is_transient():
            return super().control(**kwargs)

        self.write('=== Control (transient: ' +
                   '{:f}'.format(self.t_end) + ')')

        self.t = self.t_begin
        self.step = 0
        self.initial_condition()

        res = None
        n = self.n_step()
        while self.step < n and not self.early_stop():
            self.step += 1
            self.t = self.t_begin + self.step * self.dt
            self.debug('### Physical time: {:f}'.format(self.t))
            self.update_transient()
            res = self.task(**kwargs)

        exe_time = time() - self._exe_time_start
        if exe_time >= self._min_exe_time_shown:
            self.write('    Execution time: {:2f}'.format(
                np.round(exe_time, 2)))
        self._exe_time_start = time()
        self.write('=== Post-processing')

        return res
