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
      2024-06-03
"""

__all__ = ['RunConfig', 'SolverConfig', 'AnalysisConfig', 'PopulationConfig',
           'load_config', 'parse_config', 'config_to_dict', 'save_config']

from dataclasses import asdict, dataclass, field, fields, is_dataclass
import json
import numpy as np
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

try:
    from spherejerk.errors import ConfigError
    from spherejerk.geometry import SphereSurface
    from spherejerk.haptic import ProtocolConfig, ServoConfig, SubjectModel
except ImportError:
    from errors import ConfigError
    from geometry import SphereSurface
    from haptic import ProtocolConfig, ServoConfig, SubjectModel


"""
    Run configuration, read from one JSON file

    Example file (every key is optional, SI units):
        {
          "sphere":   {"radius": 0.2, "stiffness": 1000.0},
          "subject":  {"learning_rate": 0.01},
          "protocol": {"n_training": 300},
          "solver":   {"tol": 1e-8},
          "seed": 7,
          "out": "results"
        }
"""


@dataclass(frozen=True)
class SolverConfig(object):
    tol: float = 1e-8
    max_iter: int = 50
    max_nodes: int = 100000
    duration: float = 0.86           # movement time of 'solve' [s]
    sample_rate: float = 100.        # rate of the written trajectory [Hz]
    project: bool = False

    def problems(self) -> List[str]:
        p = []
        if not self.tol > 0.:
            p.append(f'solver.tol must be positive: {self.tol}')
        if self.max_iter < 1:
            p.append(f'solver.max_iter must be positive: {self.max_iter}')
        if self.max_nodes < 10:
            p.append(f'solver.max_nodes too small: {self.max_nodes}')
        if not self.duration > 0.:
            p.append(f'solver.duration must be positive: {self.duration}')
        if not self.sample_rate > 0.:
            p.append(f'solver.sample_rate must be positive: '
                     f'{self.sample_rate}')
        return p


@dataclass(frozen=True)
class AnalysisConfig(object):
    threshold: float = 0.025         # segmentation speed [m/s]
    window: int = 20                 # movements of training pre and post
    yates: bool = False
    n_workers: int = 0               # 0: number of physical cores

    def problems(self) -> List[str]:
        p = []
        if not self.threshold > 0.:
            p.append(f'analysis.threshold must be positive: '
                     f'{self.threshold}')
        if self.window < 1:
            p.append(f'analysis.window must be positive: {self.window}')
        if self.n_workers < 0:
            p.append(f'analysis.n_workers must be >= 0: {self.n_workers}')
        return p


@dataclass(frozen=True)
class PopulationConfig(object):
    n_subjects: int = 1
    spread: float = 0.25             # log-normal spread of amplitudes

    def problems(self) -> List[str]:
        p = []
        if self.n_subjects < 1:
            p.append(f'population.n_subjects must be positive: '
                     f'{self.n_subjects}')
        if self.spread < 0.:
            p.append(f'population.spread must be >= 0: {self.spread}')
        return p


@dataclass(frozen=True)
class RunConfig(object):
    sphere: SphereSurface = field(default_factory=SphereSurface)
    servo: ServoConfig = field(default_factory=ServoConfig)
    subject: SubjectModel = field(default_factory=SubjectModel)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    population: PopulationConfig = field(default_factory=PopulationConfig)
    seed: int = 0
    out: str = 'out'

    def problems(self) -> List[str]:
        p = []
        for section in (self.servo, self.subject, self.protocol, 
                        self.solver, self.analysis, self.population):
            p += section.problems()
        if abs(self.protocol.plane_height) >= self.sphere.radius:
            p.append(f'protocol.plane_height ({self.protocol.plane_height})'
                     f' must be inside the sphere ({self.sphere.radius})')
        if self.seed < 0:
            p.append(f'seed must be >= 0: {self.seed}')
        return p


def _coerce(value: Any, typ: Any, name: str, problems: List[str]) -> Any:
    origin = getattr(typ, '__origin__', None)
    try:
        if typ is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if typ is int:
            if isinstance(value, bool) or not float(value).is_integer():
                raise TypeError
            return int(value)
        if typ is float:
            if isinstance(value, bool):
                raise TypeError
            x = float(value)
            if not np.isfinite(x):
                raise ValueError
            return x
        if typ is str:
            if not isinstance(value, str):
                raise TypeError
            return value
        if origin is tuple:
            args = typ.__args__
            if not isinstance(value, (list, tuple)) or \
                    len(value) != len(args):
                raise TypeError
            return tuple(_coerce(v, a, name, problems) 
                         for v, a in zip(value, args))
    except (TypeError, ValueError):
        problems.append(f'{name}: invalid value {value!r} for type '
                        f'{getattr(typ, "__name__", str(typ))}')
        return None
    return value


def _section(cls: type, data: Any, name: str, problems: List[str]) -> Any:
    if not isinstance(data, dict):
        problems.append(f'{name}: expected an object, got {data!r}')
        return cls()
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        key_name = f'{name}.{key}' if name else str(key)
        if key not in known:
            problems.append(f'{key_name}: unknown key')
            continue
        f = known[key]
        if is_dataclass(f.type):
            # built from its valid keys, range checks follow in problems()
            kwargs[key] = _section(f.type, value, key_name, problems)
            continue
        n_before = len(problems)
        x = _coerce(value, f.type, key_name, problems)
        if len(problems) == n_before:
            kwargs[key] = x
    try:
        return cls(**kwargs)
    except ValueError as e:
        problems.append(f'{name}: {e}')
        return cls()


def parse_config(data: Dict[str, Any]) -> RunConfig:
    """
    Args:
        data:
            configuration as nested dictionary

    Returns:
        run configuration

    Raises:
        ConfigError listing all problems found
    """
    problems: List[str] = []
    if not isinstance(data, dict):
        raise ConfigError([f'configuration must be an object: {data!r}'])
    config = _section(RunConfig, data, '', problems)
    problems += config.problems()
    if problems:
        raise ConfigError(problems)
    return config


def load_config(file: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Args:
        file:
            path to a JSON file, defaults only if None

    Returns:
        run configuration

    Raises:
        ConfigError if the file is unreadable or invalid
    """
    if file is None:
        return parse_config({})
    try:
        with open(file) as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError([f'{file}: {e.strerror}'])
    except json.JSONDecodeError as e:
        raise ConfigError([f'{file}:{e.lineno}: {e.msg}'])
    return parse_config(data)


def config_to_dict(config: RunConfig) -> Dict[str, Any]:
    """
    Returns:
        JSON compatible dictionary, parse_config() reproduces config
    """
    def plain(x: Any) -> Any:
        if isinstance(x, dict):
            return {k: plain(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [plain(v) for v in x]
        return x
    return plain(asdict(config))


def save_config(config: RunConfig, file: Union[str, Path]) -> Path:
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    with open(file, 'w') as f:
        json.dump(config_to_dict(config), f, indent=2, sort_keys=True)
        f.write('\n')
    return file
