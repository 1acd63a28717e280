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
      2024-05-27
"""

__all__ = ['Movement', 'MovementFit', 'MetricRecord', 'init_metrics', 
           'segment_movements', 'fit_tangential_velocity', 
           'reference_for', 'apd', 'acf', 'cfv', 'vpe', 'ssj',
           'compute_metrics', 'analyze_log', 'metrics_table', 
           'METRICS', 'TABLE_COLUMNS']

from collections import Counter
from dataclasses import dataclass, field
import logging
import numpy as np
from numpy.polynomial import Legendre
import pandas as pd
from scipy.integrate import trapezoid
from statsmodels.stats.weightstats import DescrStatsW
from typing import Any, Dict, List, Optional, Tuple, Union

try:
    from spherejerk.datatype import Float1D, Vec3s
    from spherejerk.errors import (CoincidentPointsError, 
        DegenerateReferenceError, FitError, ZeroPathLengthError)
    from spherejerk.geometry import (distance_to_arc, geodesic_between, 
        project_to_sphere, SphereSurface)
    from spherejerk.reference import (QuinticProfile, ReferenceTrajectory,
        quintic_kinematics, reference_trajectory)
    from spherejerk.triallog import TrialLog
except ImportError:
    from datatype import Float1D, Vec3s
    from errors import (CoincidentPointsError, DegenerateReferenceError, 
        FitError, ZeroPathLengthError)
    from geometry import (distance_to_arc, geodesic_between, 
        project_to_sphere, SphereSurface)
    from reference import (QuinticProfile, ReferenceTrajectory, 
        quintic_kinematics, reference_trajectory)
    from triallog import TrialLog


"""
    Per-movement measures of path and force quality

        apd: average path deviation from the geodesic / geodesic length
        acf: path length weighted mean of the contact force magnitude [N]
        cfv: path length weighted variance of the force magnitude [N^2]
        vpe: area between actual and minimum-jerk speed profiles [m]
        ssj: integral of the squared jerk [m^2/s^5]
"""

logger = logging.getLogger(__name__)

FIT_DEGREE = 8
MIN_SAMPLES = FIT_DEGREE + 1
SEGMENTATION_THRESHOLD = 0.025          # [m/s]
REST_FRACTION = 1e-3                    # rest speed / threshold
VPE_OVERSAMPLING = 10
METRICS = ('apd', 'acf', 'cfv', 'vpe', 'ssj')
TABLE_COLUMNS = ['subject', 'trial', 'phase', 'direction', 'start_target',
                 'end_target', 't_start', 'n_sample', 'duration', 
                 'path_length', 'peak_speed'] + list(METRICS)


@dataclass
class Movement(object):
    """
    One segmented point-to-point movement
    """
    times: Float1D                          # [s]
    positions: Vec3s                        # [m]
    forces: Vec3s                           # [N]
    direction: str = 'none'
    phase: str = 'testPre'
    trial: int = -1
    start_target: int = -1
    end_target: int = -1
    subject: str = 'subject'
    sphere: SphereSurface = field(default_factory=SphereSurface)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        self.forces = np.asarray(self.forces, dtype=float) \
            if self.forces is not None else np.zeros_like(self.positions)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def segment_lengths(self) -> Float1D:
        return np.linalg.norm(np.diff(self.positions, axis=0), axis=1)

    def path_length(self) -> float:
        return float(np.sum(self.segment_lengths()))

    def path_weights(self) -> Float1D:
        """
        Returns:
            trapezoidal path length share of every sample [m]
        """
        seg = self.segment_lengths()
        w = np.zeros(len(self))
        w[:-1] += 0.5 * seg
        w[1:] += 0.5 * seg
        return w

    def force_magnitudes(self) -> Float1D:
        return np.linalg.norm(self.forces, axis=1)


@dataclass(frozen=True)
class MovementFit(object):
    """
    Least-squares polynomials of degree 8 for x(t), y(t), z(t), 
    Legendre basis on the normalized time axis of the movement
    """
    t_begin: float
    t_end: float
    coords: Tuple[Legendre, Legendre, Legendre]

    def derivative(self, t: Union[float, Float1D], order: int = 0) -> Vec3s:
        """
        Returns:
            order-th time derivative of the fitted position, 
            shape: (n_time, 3)
        """
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        return np.column_stack([(c.deriv(order) if order else c)(tt) 
                                for c in self.coords])

    def speed(self, t: Union[float, Float1D]) -> Float1D:
        return np.linalg.norm(self.derivative(t, 1), axis=1)

    def jerk(self, t: Union[float, Float1D]) -> Float1D:
        return np.linalg.norm(self.derivative(t, 3), axis=1)

    def squared_jerk_integral(self) -> float:
        """
        Returns:
            exact integral of |p'''|^2 over the fit interval
        """
        j2 = sum(c.deriv(3)**2 for c in self.coords)
        F = j2.integ()
        return float(F(self.t_end) - F(self.t_begin))


def init_metrics(other: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Sets default values of the measures of one movement

    Args:
        other:
            other dictionary with initial values to be added 

    Returns:
        dictionary with default settings
    """
    metrics = {
        'subject': 'subject',
        'trial': -1,                          # running movement index
        'phase': '',                          # testPre, training, testPost
        'direction': 'none',                  # forward or backward
        'start_target': -1,
        'end_target': -1,
        't_start': np.nan,                    # [s]
        'n_sample': 0,
        'duration': np.nan,                   # [s]
        'path_length': np.nan,                # [m]
        'peak_speed': np.nan,                 # fitted [m/s]
        'apd': np.inf,                        # [/]
        'acf': np.inf,                        # [N]
        'cfv': np.inf,                        # [N^2]
        'vpe': np.inf,                        # [m]
        'ssj': np.inf,                        # [m^2/s^5]
        }
    if other is not None:
        for key, value in other.items():
            metrics[key] = value
    return metrics


class MetricRecord(dict):
    """
    Stores the measures and labels of one movement as a dictionary,
    see init_metrics() for the keys
    """

    def __init__(self, other: Optional[Dict[str, Any]] = None) -> None:
        super().__init__()
        self.update(init_metrics())
        if other is not None:
            self.update(other)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self)

    def is_complete(self) -> bool:
        return all(np.isfinite(self[key]) for key in METRICS)


def segment_movements(log: TrialLog, 
                      threshold: float = SEGMENTATION_THRESHOLD,
                      sphere: Optional[SphereSurface] = None) \
        -> List[Movement]:
    """
    Splits a trial log into movements: maximal runs of samples with 
    speed above threshold, closed by the adjacent samples below it.
    A closing sequence continues while the speed decreases and stays
    above rest, a fraction REST_FRACTION of the threshold. Speed from
    central differences

    Args:
        log:
            trial log

        threshold:
            speed threshold [m/s]

        sphere:
            constraint surface, default: from the log header

    Returns:
        movements with at least 9 samples, in time order
    """
    if not threshold > 0.:
        raise ValueError(f'threshold must be positive: {threshold}')
    n = len(log)
    if n < 2:
        return []
    if sphere is None:
        sphere = _sphere_of(log)

    t = log.times()
    P = log.positions()
    F = log.forces()
    speed = np.linalg.norm(np.gradient(P, t, axis=0), axis=1)
    rest = REST_FRACTION * threshold

    above = np.concatenate([[0], (speed > threshold).astype(int), [0]])
    edges = np.diff(above)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1

    s = log.samples
    meta = {m['trial']: m for m in log.movements}
    movements = []
    for i0, i1 in zip(starts, ends):
        lo, hi = max(i0 - 1, 0), min(i1 + 1, n - 1)

        # closing samples run down to the rest position or local minimum
        while lo > 0 and rest < speed[lo - 1] < speed[lo]:
            lo -= 1
        while hi < n - 1 and rest < speed[hi + 1] < speed[hi]:
            hi += 1
        if hi - lo + 1 < MIN_SAMPLES:
            continue
        window = slice(lo, hi + 1)
        labels = [k for k in s['trial'].iloc[window] if k >= 0]
        trial = Counter(labels).most_common(1)[0][0] if labels else -1
        phase = Counter(s['phase'].iloc[window]).most_common(1)[0][0]
        directions = [d for d in s['direction'].iloc[window] if d != 'none']
        direction = Counter(directions).most_common(1)[0][0] \
            if directions else 'none'
        info = meta.get(trial, {})
        movements.append(Movement(t[window], P[window], F[window], 
            direction=direction, phase=phase, trial=int(trial), 
            start_target=int(info.get('start_target', -1)),
            end_target=int(info.get('end_target', -1)),
            subject=log.subject_id, sphere=sphere))
    return movements


def _sphere_of(log: TrialLog) -> SphereSurface:
    h = log.header.get('sphere', {})
    default = SphereSurface()
    return SphereSurface(tuple(h.get('center', default.center)),
                         float(h.get('radius', default.radius)),
                         float(h.get('stiffness', default.stiffness)))


def fit_tangential_velocity(m: Movement) -> MovementFit:
    """
    Least-squares fit of degree 8 for every coordinate over time

    Args:
        m:
            movement with at least 9 samples

    Returns:
        fit providing speed and jerk as analytic derivatives

    Raises:
        FitError if there are too few samples or the timing is degenerate
    """
    if len(m) < MIN_SAMPLES:
        raise FitError(f'{len(m)} samples, at least {MIN_SAMPLES} needed')
    t = m.times
    if not (m.duration > 0. and np.all(np.isfinite(t))):
        raise FitError('degenerate time axis')
    coords = []
    for k in range(3):
        series, (resid, rank, sv, rcond) = Legendre.fit(
            t, m.positions[:, k], FIT_DEGREE, domain=[t[0], t[-1]], 
            full=True)
        if rank < FIT_DEGREE + 1:
            raise FitError(f'rank deficient fit: {rank} < {FIT_DEGREE + 1}')
        coords.append(series)
    return MovementFit(float(t[0]), float(t[-1]), tuple(coords))


def reference_for(m: Movement, 
                  sample_rate: Optional[float] = None) -> ReferenceTrajectory:
    """
    Minimum-jerk reference between the observed end points of a 
    movement with the duration of the movement

    Raises:
        DegenerateReferenceError if the end points coincide
    """
    s = m.sphere
    a = project_to_sphere(m.positions[0], s)
    b = project_to_sphere(m.positions[-1], s)
    try:
        arc = geodesic_between(a, b, s)
    except CoincidentPointsError as e:
        raise DegenerateReferenceError(f'movement {m.trial}: {e}')
    if sample_rate is None:
        sample_rate = (len(m) - 1) / m.duration
    return reference_trajectory(arc, m.duration, sample_rate)


def apd(m: Movement, ref: ReferenceTrajectory) -> float:
    """
    Returns:
        mean distance of the samples to the reference path divided by 
        the length of the reference path [/]
    """
    L = ref.arc.arc_length
    if not L > 0.:
        raise DegenerateReferenceError('reference of zero length')
    return float(np.mean(distance_to_arc(m.positions, ref.arc)) / L)


def _weights(m: Movement, weighting: str) -> Float1D:
    if weighting == 'uniform':
        return np.ones(len(m))
    if weighting != 'path':
        raise ValueError(f"weighting must be 'path' or 'uniform': "
                         f"{weighting}")
    w = m.path_weights()
    if not np.sum(w) > 0.:
        raise ZeroPathLengthError(f'movement {m.trial} has no path length')
    return w


def acf(m: Movement, weighting: str = 'path') -> float:
    """
    Returns:
        path length weighted mean of the force magnitude [N]
    """
    if len(m) < 2:
        raise ValueError('at least 2 samples needed')
    return float(DescrStatsW(m.force_magnitudes(), 
                             weights=_weights(m, weighting)).mean)


def cfv(m: Movement, weighting: str = 'path') -> float:
    """
    Returns:
        path length weighted variance of the force magnitude about its 
        weighted mean [N^2]
    """
    if len(m) < 2:
        raise ValueError('at least 2 samples needed')
    return float(DescrStatsW(m.force_magnitudes(), 
                             weights=_weights(m, weighting), ddof=0).var)


def vpe(m: Movement, ref: QuinticProfile, 
        fit: Optional[MovementFit] = None) -> float:
    """
    Args:
        m:
            movement

        ref:
            minimum-jerk profile with the duration of the movement

        fit:
            fit of m, computed if None

    Returns:
        integral of |v_fit - v_ref| over the movement [m]
    """
    if fit is None:
        fit = fit_tangential_velocity(m)
    n = max(VPE_OVERSAMPLING * (len(m) - 1), 1000) + 1
    t = np.linspace(fit.t_begin, fit.t_end, n)
    tau = np.clip(t - fit.t_begin, 0., ref.duration)
    v_ref = quintic_kinematics(ref, tau)[1]
    return float(trapezoid(np.abs(fit.speed(t) - v_ref), t))


def ssj(m: Movement, fit: Optional[MovementFit] = None) -> float:
    """
    Returns:
        integral of the squared jerk of the fitted polynomials 
        [m^2/s^5]
    """
    if fit is None:
        fit = fit_tangential_velocity(m)
    return fit.squared_jerk_integral()


def compute_metrics(m: Movement, 
                    fit: Optional[MovementFit] = None) -> MetricRecord:
    """
    Args:
        m:
            movement

        fit:
            fit of the movement, computed if None

    Returns:
        all measures of one movement

    Raises:
        FitError, DegenerateReferenceError, ZeroPathLengthError
    """
    if fit is None:
        fit = fit_tangential_velocity(m)
    ref = reference_for(m)
    t = np.linspace(fit.t_begin, fit.t_end, 
                    VPE_OVERSAMPLING * (len(m) - 1) + 1)
    return MetricRecord({
        'subject': m.subject, 'trial': m.trial, 'phase': m.phase, 
        'direction': m.direction, 'start_target': m.start_target,
        'end_target': m.end_target, 't_start': float(m.times[0]), 
        'n_sample': len(m), 'duration': m.duration, 
        'path_length': m.path_length(), 
        'peak_speed': float(np.max(fit.speed(t))),
        'apd': apd(m, ref), 'acf': acf(m), 'cfv': cfv(m), 
        'vpe': vpe(m, ref.profile, fit), 'ssj': ssj(m, fit)})


def analyze_log(log: TrialLog, 
                threshold: float = SEGMENTATION_THRESHOLD) \
        -> List[MetricRecord]:
    """
    Segments a trial log and computes the measures of every movement,
    movements without a valid fit or reference are skipped with a 
    warning

    Returns:
        records in time order
    """
    records = []
    for m in segment_movements(log, threshold):
        try:
            records.append(compute_metrics(m))
        except (FitError, DegenerateReferenceError, 
                ZeroPathLengthError) as e:
            logger.warning(f'{log.subject_id}: movement at '
                           f't={m.times[0]:.2f} s skipped: {e}')
    return records


def metrics_table(records: List[Dict[str, Any]]) -> pd.DataFrame:
    """
    Returns:
        table of records with fixed column order
    """
    return pd.DataFrame([{k: r[k] for k in TABLE_COLUMNS} for r in records],
                        columns=TABLE_COLUMNS)
