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
      2024-05-23
"""

__all__ = ['TrialLog', 'read_trial_log', 'write_trial_log', 
           'COLUMNS', 'PHASES', 'DIRECTIONS']

from dataclasses import dataclass, field
import json
import numpy as np
import pandas as pd
from pathlib import Path
from typing import Any, Dict, List, Union

try:
    from spherejerk.datatype import Float1D, Vec3s
    from spherejerk.errors import TrialLogError
except ImportError:
    from datatype import Float1D, Vec3s
    from errors import TrialLogError


"""
    Trial log: one sample per line

    Line 1:  '# ' followed by a JSON object with protocol metadata
    Line 2:  column names
    Line 3+: t,x,y,z,fx,fy,fz,phase,trial,direction

    Floats are written with their shortest round-trip representation, 
    thus a parsed log is written back byte by byte identically
"""

COLUMNS = ['t', 'x', 'y', 'z', 'fx', 'fy', 'fz', 'phase', 'trial', 
           'direction']
FLOAT_COLUMNS = COLUMNS[:7]
PHASES = ('testPre', 'training', 'testPost')
DIRECTIONS = ('forward', 'backward', 'none')
N_HEADER_LINES = 2


@dataclass
class TrialLog(object):
    """
    Samples of one experiment run and its metadata

    'trial' is the running movement index, -1 for samples between two
    movements
    """
    header: Dict[str, Any] = field(default_factory=dict)
    samples: pd.DataFrame = field(default_factory=lambda: 
                                  pd.DataFrame(columns=COLUMNS))

    @property
    def sample_rate(self) -> float:
        return float(self.header.get('servo', {}).get('sample_rate', 100.))

    @property
    def subject_id(self) -> str:
        return str(self.header.get('subject_id', 'subject'))

    @property
    def movements(self) -> List[Dict[str, Any]]:
        return list(self.header.get('movements', []))

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> Float1D:
        return self.samples['t'].to_numpy(dtype=float)

    def positions(self) -> Vec3s:
        return self.samples[['x', 'y', 'z']].to_numpy(dtype=float)

    def forces(self) -> Vec3s:
        return self.samples[['fx', 'fy', 'fz']].to_numpy(dtype=float)

    def phase_counts(self) -> Dict[str, int]:
        """
        Returns:
            number of movements per phase according to the metadata
        """
        counts = {phase: 0 for phase in PHASES}
        for m in self.movements:
            counts[m['phase']] += 1
        return counts


def write_trial_log(log: TrialLog, file: Union[str, Path]) -> Path:
    """
    Args:
        log:
            trial log

        file:
            path to the output file

    Returns:
        path to the written file
    """
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    s = log.samples
    columns = [s[c].astype(float).tolist() for c in FLOAT_COLUMNS]
    columns += [s['phase'].astype(str).tolist(), 
                s['trial'].astype(int).tolist(),
                s['direction'].astype(str).tolist()]

    with open(file, 'w', newline='\n') as f:
        f.write('# ' + json.dumps(log.header, sort_keys=True) + '\n')
        f.write(','.join(COLUMNS) + '\n')
        for row in zip(*columns):
            f.write(','.join(repr(v) for v in row[:7]) + 
                    f',{row[7]},{row[8]},{row[9]}\n')
    return file


def _first_bad_line(file: Path) -> int:
    with open(file) as f:
        for i, line in enumerate(f, start=1):
            if i > N_HEADER_LINES and \
                    len(line.rstrip('\n').split(',')) != len(COLUMNS):
                return i
    return N_HEADER_LINES + 1


def read_trial_log(file: Union[str, Path]) -> TrialLog:
    """
    Args:
        file:
            path to a trial log

    Returns:
        parsed trial log

    Raises:
        TrialLogError naming file and line of the first malformed entry
    """
    file = Path(file)
    try:
        with open(file) as f:
            first = f.readline()
            second = f.readline()
    except OSError as e:
        raise TrialLogError(file, 0, str(e))

    if not first.startswith('# '):
        raise TrialLogError(file, 1, "header must start with '# '")
    try:
        header = json.loads(first[2:])
    except json.JSONDecodeError as e:
        raise TrialLogError(file, 1, f'invalid header: {e}')
    if not isinstance(header, dict):
        raise TrialLogError(file, 1, 'header is not an object')
    if second.rstrip('\n') != ','.join(COLUMNS):
        raise TrialLogError(file, 2, f'expected columns: '
                                     f"{','.join(COLUMNS)}")

    try:
        raw = pd.read_csv(file, skiprows=1, dtype=str, 
                          keep_default_na=False)
    except (pd.errors.ParserError, ValueError) as e:
        raise TrialLogError(file, _first_bad_line(file), str(e))
    if list(raw.columns) != COLUMNS:
        raise TrialLogError(file, 2, 'unexpected columns')

    samples = pd.DataFrame(index=raw.index)
    for c in FLOAT_COLUMNS:
        numeric = pd.to_numeric(raw[c], errors='coerce')
        bad = np.flatnonzero(numeric.isna().to_numpy() | 
                             ~np.isfinite(numeric.to_numpy(dtype=float)))
        if len(bad):
            raise TrialLogError(file, int(bad[0]) + N_HEADER_LINES + 1,
                                f"invalid number in column '{c}': "
                                f"'{raw[c].iloc[bad[0]]}'")
        samples[c] = raw[c].astype(float)

    ok = raw['trial'].str.fullmatch(r'-?\d+').to_numpy(dtype=bool)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        raise TrialLogError(file, i + N_HEADER_LINES + 1, 
                            f"invalid trial index: '{raw['trial'].iloc[i]}'")
    for c, allowed in (('phase', PHASES), ('direction', DIRECTIONS)):
        ok = raw[c].isin(allowed).to_numpy(dtype=bool)
        if not ok.all():
            i = int(np.flatnonzero(~ok)[0])
            raise TrialLogError(file, i + N_HEADER_LINES + 1, 
                                f"invalid {c}: '{raw[c].iloc[i]}'")
    samples['phase'] = raw['phase']
    samples['trial'] = raw['trial'].astype(int)
    samples['direction'] = raw['direction']

    log = TrialLog(header, samples)
    if len(samples) > 1:
        dt = np.diff(samples['t'].to_numpy()) * log.sample_rate
        bad = np.flatnonzero(np.abs(dt - 1.) > 1e-6)
        if len(bad):
            raise TrialLogError(file, int(bad[0]) + N_HEADER_LINES + 2,
                                'time stamps are not uniform')
    return log
