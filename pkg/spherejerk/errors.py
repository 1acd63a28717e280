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
      2024-05-08
"""

__all__ = ['SphereJerkError',
           'DegenerateProjectionError', 'OffSurfaceError',
           'CoincidentPointsError', 'AntipodalPointsError',
           'NoIntersectionError', 'ParameterRangeError',
           'InvalidBoundaryError', 'NotConvergedError', 'FitError',
           'DegenerateReferenceError', 'ZeroPathLengthError',
           'UndefinedTestError', 'DegenerateTableError', 'MissingDataError',
           'TrialLogError', 'ConfigError']

from typing import Any, Iterable, Optional


class SphereJerkError(Exception):
    """
    Parent class of all errors raised by this package
    """


class DegenerateProjectionError(SphereJerkError, ValueError):
    """
    Point coincides with the sphere center, radial direction undefined
    """


class OffSurfaceError(SphereJerkError, ValueError):
    pass


class CoincidentPointsError(SphereJerkError, ValueError):
    pass


class AntipodalPointsError(SphereJerkError, ValueError):
    """
    Great circle through two antipodal points is not unique
    """


class NoIntersectionError(SphereJerkError, ValueError):
    pass


class ParameterRangeError(SphereJerkError, ValueError):
    pass


class InvalidBoundaryError(SphereJerkError, ValueError):
    pass


class NotConvergedError(SphereJerkError, ArithmeticError):
    pass


class FitError(SphereJerkError, ArithmeticError):
    pass


class DegenerateReferenceError(SphereJerkError, ValueError):
    pass


class ZeroPathLengthError(SphereJerkError, ValueError):
    pass


class UndefinedTestError(SphereJerkError, ValueError):
    """
    Signed-rank test without any non-zero paired difference
    """


class DegenerateTableError(SphereJerkError, ValueError):
    pass


class MissingDataError(SphereJerkError, ValueError):
    def __init__(self, message: str, 
                 missing: Optional[Iterable[str]] = None) -> None:
        self.message = message
        self.missing = sorted(missing) if missing is not None else []
        if self.missing:
            message += ': ' + ', '.join(str(x) for x in self.missing)
        super().__init__(message)

    def __reduce__(self) -> Any:
        return self.__class__, (self.message, self.missing)


class TrialLogError(SphereJerkError, ValueError):
    def __init__(self, file: str, line: int, message: str) -> None:
        self.file = str(file)
        self.line = int(line)
        self.message = message
        super().__init__(f'{self.file}:{self.line}: {message}')

    def __reduce__(self) -> Any:
        return self.__class__, (self.file, self.line, self.message)


class ConfigError(SphereJerkError, ValueError):
    """
    Collects all problems found in a configuration, not only the first
    """

    def __init__(self, problems: Iterable[str]) -> None:
        self.problems = list(problems)
        super().__init__('invalid configuration:\n    ' + 
                         '\n    '.join(self.problems))

    def __reduce__(self) -> Any:
        return self.__class__, (self.problems,)
