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
      2024-06-05
"""

__all__ = ['normalized_speed_profile', 'average_speed_profiles', 
           'metric_traces', 'trajectory_frame', 'write_plot_data', 
           'render_plots', 'N_PROFILE']

import numpy as np
import pandas as pd
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

try:
    from spherejerk.bvp import BvpSolution, solution_frame
    from spherejerk.datatype import Float1D
    from spherejerk.geometry import GeodesicArc
    from spherejerk.metrics import METRICS, MovementFit
    from spherejerk.reference import quintic_kinematics, reference_trajectory
except ImportError:
    from bvp import BvpSolution, solution_frame
    from datatype import Float1D
    from geometry import GeodesicArc
    from metrics import METRICS, MovementFit
    from reference import quintic_kinematics, reference_trajectory


"""
    Plot data as CSV files: average speed profiles, measures over 
    movements and solver trajectories with their analytic reference.
    Rendering with matplotlib is optional, see render_plots()
"""

N_PROFILE = 101


def normalized_speed_profile(fit: MovementFit, 
                             n: int = N_PROFILE) -> Float1D:
    """
    Returns:
        fitted speed at n equidistant points of the normalized time 
        [0, 1] of the movement [m/s]
    """
    t = np.linspace(fit.t_begin, fit.t_end, n)
    return fit.speed(t)


def average_speed_profiles(groups: Dict[str, Iterable[Float1D]], 
                           n: int = N_PROFILE) -> pd.DataFrame:
    """
    Args:
        groups:
            speed profiles of equal length per group label

    Returns:
        table with normalized time 'tau' and one column of mean speed
        per non-empty group
    """
    frame = pd.DataFrame({'tau': np.linspace(0., 1., n)})
    for label in sorted(groups):
        profiles = [np.asarray(p) for p in groups[label]]
        if profiles:
            frame[label] = np.mean(profiles, axis=0)
    return frame


def metric_traces(table: pd.DataFrame) -> pd.DataFrame:
    """
    Returns:
        population mean of every measure per movement index and phase
    """
    columns = ['trial', 'phase'] + list(METRICS)
    if table.empty:
        return pd.DataFrame(columns=columns)
    traces = table.groupby(['trial', 'phase'], sort=True)[list(METRICS)] \
        .mean().reset_index()
    return traces[columns]


def trajectory_frame(sol: BvpSolution, 
                     arc: Optional[GeodesicArc] = None,
                     sample_rate: float = 100.) -> pd.DataFrame:
    """
    Solver trajectory and the geodesic-quintic reference at common 
    sample times

    Returns:
        table with t, x, y, z, speed, lambda and, if arc is given, 
        x_ref, y_ref, z_ref, speed_ref
    """
    frame = solution_frame(sol, sample_rate)
    if arc is not None:
        r = reference_trajectory(arc, sol.duration, sample_rate)
        if len(r.times) == len(frame):
            frame['x_ref'] = r.positions[:, 0]
            frame['y_ref'] = r.positions[:, 1]
            frame['z_ref'] = r.positions[:, 2]
            frame['speed_ref'] = quintic_kinematics(r.profile, r.times)[1]
    return frame


def write_plot_data(frames: Dict[str, pd.DataFrame], 
                    out: Union[str, Path]) -> List[Path]:
    """
    Returns:
        paths of the written files '<out>/<name>.csv'
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for name, frame in frames.items():
        f = out / f'{name}.csv'
        frame.to_csv(f, index=False, float_format='%.10g')
        files.append(f)
    return files


def render_plots(files: Iterable[Union[str, Path]]) -> List[Path]:
    """
    Draws every plot data file as PNG next to it, first column is the 
    abscissa of all other numeric columns

    Returns:
        paths of the images
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    images = []
    for f in files:
        f = Path(f)
        frame = pd.read_csv(f)
        numeric = frame.select_dtypes(include=[np.number])
        if numeric.shape[1] < 2 or numeric.empty:
            continue
        x = numeric.columns[0]
        fig, ax = plt.subplots(figsize=(8, 5))
        for c in numeric.columns[1:]:
            if c in ('trial', 'n_sample', 'start_target', 'end_target'):
                continue
            ax.plot(numeric[x], numeric[c], label=c)
        ax.set_title(f.stem)
        ax.set_xlabel(x)
        ax.grid()
        ax.legend(fontsize='small')
        image = f.with_suffix('.png')
        fig.savefig(image, dpi=100)
        plt.close(fig)
        images.append(image)
    return images
