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
      2024-05-24
"""

__all__ = ['ServoConfig', 'SubjectModel', 'ProtocolConfig', 'HapticServo',
           'Experiment', 'contact_force', 'synthetic_movement', 
           'run_experiment', 'subject_population']

from dataclasses import asdict, dataclass, replace
import numpy as np
import pandas as pd
from typing import Any, Dict, List, Optional, Tuple, Union

try:
    from spherejerk.base import Base
    from spherejerk.datatype import Float1D, Vec3, Vec3s
    from spherejerk.errors import ConfigError, DegenerateProjectionError
    from spherejerk.geometry import (GeodesicArc, SphereSurface, 
        geodesic_between, slerp, triangle_targets, TEST_PAIR, TRAINING_PAIR)
    from spherejerk.loop import Loop
    from spherejerk.reference import SIGMA, PEAK_SPEED_FACTOR
    from spherejerk.triallog import COLUMNS, TrialLog
except ImportError:
    from base import Base
    from datatype import Float1D, Vec3, Vec3s
    from errors import ConfigError, DegenerateProjectionError
    from geometry import (GeodesicArc, SphereSurface, geodesic_between, 
        slerp, triangle_targets, TEST_PAIR, TRAINING_PAIR)
    from loop import Loop
    from reference import SIGMA, PEAK_SPEED_FACTOR
    from triallog import COLUMNS, TrialLog


"""
    Virtual elastic sphere rendered by a haptic servo and a synthetic
    subject who learns to move along the geodesic during training

    The subject model is synthetic: lateral and radial deviations and
    a skew of the speed profile decay exponentially with the number of
    training movements
"""

N_NOISE_MODES = 4
MAX_TIMING_SKEW = 0.9


@dataclass(frozen=True)
class ServoConfig(object):
    servo_rate: float = 1000.                      # [Hz]
    sample_rate: float = 100.                      # [Hz]
    speed_band: Tuple[float, float] = (0.6, 1.0)   # [m/s]
    rest_every_n: int = 40
    rest_duration: float = 20.                     # [s], metadata only
    separation_threshold: float = 0.005            # [m/s]

    def problems(self) -> List[str]:
        """
        Returns:
            list of violated constraints, empty if valid
        """
        p = []
        if not self.sample_rate > 0.:
            p.append(f'servo.sample_rate must be positive: '
                     f'{self.sample_rate}')
        elif not self.servo_rate >= self.sample_rate or \
                abs(self.servo_rate / self.sample_rate - 
                    round(self.servo_rate / self.sample_rate)) > 1e-9:
            p.append(f'servo.servo_rate ({self.servo_rate}) must be an '
                     f'integer multiple of servo.sample_rate '
                     f'({self.sample_rate})')
        lo, hi = self.speed_band
        if not 0. < lo < hi:
            p.append(f'servo.speed_band must satisfy 0 < min < max: '
                     f'{self.speed_band}')
        if self.rest_every_n < 1:
            p.append(f'servo.rest_every_n must be positive: '
                     f'{self.rest_every_n}')
        if not self.separation_threshold > 0.:
            p.append(f'servo.separation_threshold must be positive: '
                     f'{self.separation_threshold}')
        return p

    @property
    def ticks_per_sample(self) -> int:
        return int(round(self.servo_rate / self.sample_rate))


@dataclass(frozen=True)
class SubjectModel(object):
    """
    Synthetic subject, amplitudes decay with exp(-learning_rate * index)
    where index counts the completed training movements
    """
    path_bias: float = 0.08          # lateral amplitude / arc length
    penetration_bias: float = 0.004  # radial inward offset [m]
    timing_distortion: float = 0.4   # skew of the speed profile
    learning_rate: float = 0.01      # decay per training movement
    motor_noise: float = 0.001       # noise amplitude at peak speed [m]
    rng_seed: int = 0

    def problems(self) -> List[str]:
        p = []
        for name in ('path_bias', 'penetration_bias', 'timing_distortion',
                     'learning_rate', 'motor_noise'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0.):
                p.append(f'subject.{name} must be >= 0: {value}')
        return p

    def decay(self, learning_index: Union[int, float]) -> float:
        return float(np.exp(-self.learning_rate * learning_index))

    @classmethod
    def ideal(cls, rng_seed: int = 0) -> 'SubjectModel':
        """
        Returns:
            subject moving exactly along the geodesic-quintic reference
        """
        return cls(0., 0., 0., 0., 0., rng_seed)


@dataclass(frozen=True)
class ProtocolConfig(object):
    n_test_pre: int = 60
    n_training: int = 300
    n_test_post: int = 60
    plane_height: float = 0.08       # targets above the center [m]
    dwell: float = 0.3               # rest on target between movements [s]
    transit_speed: float = 0.015     # peak speed between phases [m/s]

    def problems(self) -> List[str]:
        p = []
        for name in ('n_test_pre', 'n_training', 'n_test_post'):
            if getattr(self, name) < 0:
                p.append(f'protocol.{name} must be >= 0: '
                         f'{getattr(self, name)}')
        if self.n_test_pre + self.n_training + self.n_test_post == 0:
            p.append('protocol has no movements')
        if self.dwell < 0.:
            p.append(f'protocol.dwell must be >= 0: {self.dwell}')
        if not self.transit_speed > 0.:
            p.append(f'protocol.transit_speed must be positive: '
                     f'{self.transit_speed}')
        return p


def contact_force(p: Union[Vec3, Vec3s], 
                  s: SphereSurface) -> Union[Vec3, Vec3s]:
    """
    Bilateral elastic rendering of the sphere, radial and frictionless

    Args:
        p:
            hand position(s), shape: (3,) or (n_point, 3) [m]

        s:
            sphere with stiffness [N/m]

    Returns:
        restoring force(s) toward the surface [N], zero on the surface

    Raises:
        DegenerateProjectionError if a position is in the center
    """
    P = np.asarray(p, dtype=float) - s.c
    d = np.linalg.norm(P, axis=-1, keepdims=True)
    if np.any(d == 0.):
        raise DegenerateProjectionError('contact force in sphere center')
    return -s.stiffness * (d - s.radius) * P / d


def _noise_modes(tau: Float1D, coef: Float1D) -> Float1D:
    k = np.arange(1, len(coef) + 1)
    return np.sin(np.pi * np.outer(tau, k)) @ coef


def synthetic_movement(arc: GeodesicArc, subject: SubjectModel, 
                       trial_index: Union[int, float], tf: float,
                       servo_rate: float = 1000.,
                       rng: Optional[np.random.Generator] = None) \
        -> Tuple[Float1D, Vec3s]:
    """
    Hand path of one movement at servo rate

    Args:
        arc:
            great circle from start to end target

        subject:
            synthetic subject

        trial_index:
            learning index, number of completed training movements

        tf:
            movement duration [s]

        servo_rate:
            rate of the returned samples [Hz]

        rng:
            random generator for the motor noise, if None it is seeded
            from the subject seed and the trial index

    Returns:
        times [s] and positions [m], shape: (n_tick+1,) and (n_tick+1, 3)
        end points coincide with the arc end points at rest
    """
    if rng is None:
        rng = np.random.default_rng([subject.rng_seed, int(trial_index)])
    coef = rng.standard_normal((2, N_NOISE_MODES)) / \
        np.arange(1, N_NOISE_MODES + 1)

    n = int(round(tf * servo_rate))
    t = np.arange(n + 1) / servo_rate
    tau = np.clip(t / tf, 0., 1.)
    decay = subject.decay(trial_index)

    kappa = min(subject.timing_distortion * decay, MAX_TIMING_SKEW)
    w = tau + kappa * tau * (1. - tau)
    u = np.clip(SIGMA(w), 0., 1.)
    speed_ratio = SIGMA.deriv()(w) * (1. + kappa * (1. - 2. * tau)) / \
        PEAK_SPEED_FACTOR

    r = arc.sphere.radius
    base = slerp(arc, u)
    d = (base - arc.sphere.c) / r
    bump = np.sin(np.pi * u)
    noise = subject.motor_noise * speed_ratio
    lateral = (subject.path_bias * arc.arc_length * decay * bump + 
               noise * _noise_modes(tau, coef[0])) / r
    radial = -subject.penetration_bias * decay * bump + \
        noise * _noise_modes(tau, coef[1])

    # dir - d and R - r vanish exactly for an ideal subject
    scale = 1. / np.sqrt(1. + lateral**2)
    ddir = d * (scale - 1.)[:, np.newaxis] + \
        np.outer(lateral * scale, arc.normal)
    direction = d + ddir
    p = base + radial[:, np.newaxis] * direction + r * ddir
    p[0], p[-1] = arc.start, arc.end

    return t, p


class HapticServo(Loop):
    """
    Renders the contact force at servo rate and records every 
    ticks_per_sample-th tick, one Loop step per sample period
    """

    def __init__(self, sphere: SphereSurface, servo: ServoConfig,
                 identifier: str = 'HapticServo') -> None:
        super().__init__(identifier)
        self.sphere = sphere
        self.servo = servo
        self.hand: Optional[Vec3s] = None         # at servo rate
        self.positions: Optional[Vec3s] = None    # at sample rate
        self.forces: Optional[Vec3s] = None       # at sample rate

    def pre(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            hand (2D array of float):
                hand path at servo rate, shape: (n_tick+1, 3), n_tick is
                a multiple of ticks_per_sample
        """
        ok = super().pre(**kwargs)

        self.hand = np.asarray(kwargs['hand'], dtype=float)
        m = self.servo.ticks_per_sample
        n_sample = (len(self.hand) - 1) // m
        self.positions = np.empty((n_sample + 1, 3))
        self.forces = np.empty((n_sample + 1, 3))
        self.set_transient(dt=1. / self.servo.sample_rate, n=n_sample)
        return ok

    def initial_condition(self) -> bool:
        ok = super().initial_condition()
        self.positions[0] = self.hand[0]
        self.forces[0] = contact_force(self.hand[0], self.sphere)
        return ok

    def task(self, **kwargs: Any) -> Tuple[Vec3s, Vec3s]:
        """
        Returns:
            sampled positions and forces, shape: (n_sample+1, 3)
        """
        if not self.is_transient():
            self.initial_condition()
            return self.positions, self.forces

        m = self.servo.ticks_per_sample
        k = self.step
        ticks = self.hand[(k - 1) * m + 1:k * m + 1]
        f = contact_force(ticks, self.sphere)
        self.positions[k] = ticks[-1]
        self.forces[k] = f[-1]
        return self.positions, self.forces


def _direction(pair: Tuple[int, int], count: int) -> Tuple[str, int, int]:
    """
    Returns:
        direction label, start target and end target of the count-th 
        movement between a (proximal, distal) target pair
    """
    proximal, distal = pair
    if count % 2 == 0:
        return 'forward', proximal, distal
    return 'backward', distal, proximal


class Experiment(Base):
    """
    Two-phase protocol: test movements between the test targets, 
    training movements between the training targets, test movements 
    again

    Example:
        log = Experiment()(sphere=SphereSurface(), subject=SubjectModel(),
                           seed=7, silent=True)
    """

    def __init__(self, identifier: str = 'Experiment') -> None:
        super().__init__(identifier)
        self.sphere: SphereSurface = SphereSurface()
        self.servo: ServoConfig = ServoConfig()
        self.subject: SubjectModel = SubjectModel()
        self.protocol: ProtocolConfig = ProtocolConfig()
        self.subject_id: str = 'subject'
        self.log: Optional[TrialLog] = None

    def pre(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            sphere (SphereSurface), servo (ServoConfig), 
            subject (SubjectModel), protocol (ProtocolConfig):
                configuration, defaults of the classes if not given

            seed (int):
                overrides subject.rng_seed

            subject_id (str):
                label of subject in the trial log

        Raises:
            ConfigError listing all inconsistencies of the configuration
        """
        ok = super().pre(**kwargs)

        self.sphere = kwargs.get('sphere', self.sphere)
        self.servo = kwargs.get('servo', self.servo)
        self.subject = kwargs.get('subject', self.subject)
        self.protocol = kwargs.get('protocol', self.protocol)
        if kwargs.get('seed', None) is not None:
            self.subject = replace(self.subject, rng_seed=int(kwargs['seed']))
        self.subject_id = str(kwargs.get('subject_id', self.subject_id))

        problems = self.servo.problems() + self.subject.problems() + \
            self.protocol.problems()
        if abs(self.protocol.plane_height) >= self.sphere.radius:
            problems.append(f'protocol.plane_height must be inside the '
                            f'sphere: {self.protocol.plane_height}')
        if problems:
            raise ConfigError(problems)
        return ok

    def _schedule(self) -> List[Dict[str, Any]]:
        """
        Returns:
            plan of all movements with phase, learning index, direction
            and targets
        """
        plan = []
        pr = self.protocol
        for phase, pair, n in (('testPre', TEST_PAIR, pr.n_test_pre),
                               ('training', TRAINING_PAIR, pr.n_training),
                               ('testPost', TEST_PAIR, pr.n_test_post)):
            for count in range(n):
                direction, a, b = _direction(pair, count)
                if phase == 'testPre':
                    learning_index = 0
                elif phase == 'training':
                    learning_index = count
                else:
                    learning_index = pr.n_training
                plan.append({'trial': len(plan), 'phase': phase, 
                             'learning_index': learning_index,
                             'direction': direction, 
                             'start_target': a, 'end_target': b})
        return plan

    def task(self, **kwargs: Any) -> TrialLog:
        """
        Returns:
            trial log of the whole experiment
        """
        super().task(**kwargs)

        s, servo, subject = self.sphere, self.servo, self.subject
        rng = np.random.default_rng(subject.rng_seed)
        targets = triangle_targets(s, self.protocol.plane_height)
        m = servo.ticks_per_sample
        n_dwell = int(round(self.protocol.dwell * servo.sample_rate))

        plan = self._schedule()
        hand = [targets[plan[0]['start_target']][np.newaxis, :]]
        spans = []           # (first sample, last sample, plan entry)
        n_sample = 0

        def append(path: Vec3s) -> None:
            nonlocal n_sample
            hand.append(path[1:])
            n_sample += (len(path) - 1) // m

        def dwell() -> None:
            if n_dwell > 0:
                append(np.repeat(hand[-1][-1:], n_dwell * m + 1, axis=0))

        dwell()
        for entry in plan:
            a = targets[entry['start_target']]
            if np.linalg.norm(hand[-1][-1] - a) > 1e-9 * s.radius:
                arc = geodesic_between(hand[-1][-1], a, s)
                n_tr = int(np.ceil(PEAK_SPEED_FACTOR * arc.arc_length / 
                           self.protocol.transit_speed * servo.sample_rate))
                append(synthetic_movement(arc, SubjectModel.ideal(), 0, 
                       n_tr / servo.sample_rate, servo.servo_rate)[1])
                dwell()

            arc = geodesic_between(a, targets[entry['end_target']], s)
            v = rng.uniform(*servo.speed_band)
            n_mv = max(int(round(PEAK_SPEED_FACTOR * arc.arc_length / v * 
                                 servo.sample_rate)), 10)
            tf = n_mv / servo.sample_rate
            path = synthetic_movement(arc, subject, entry['learning_index'],
                                      tf, servo.servo_rate, rng)[1]
            peak = float(np.max(np.linalg.norm(np.diff(path, axis=0), 
                                               axis=1)) * servo.servo_rate)
            entry.update({'t_start': n_sample / servo.sample_rate, 
                          'duration': tf, 'peak_speed': peak,
                          'in_band': bool(servo.speed_band[0] <= peak <= 
                                          servo.speed_band[1]),
                          'rest_after': (entry['trial'] + 1) % 
                          servo.rest_every_n == 0})
            spans.append((n_sample, n_sample + n_mv, entry))
            append(path)
            dwell()

        servo_loop = HapticServo(s, servo)
        servo_loop._log_to_file = False
        servo_loop.path = self.path
        positions, forces = servo_loop(hand=np.concatenate(hand), 
                                       silent=True)

        self.log = self._trial_log(positions, forces, spans, plan,
                                   targets)
        return self.log

    def _trial_log(self, positions: Vec3s, forces: Vec3s, spans: List,
                   plan: List[Dict[str, Any]],
                   targets: Tuple[Vec3, Vec3, Vec3]) -> TrialLog:
        servo = self.servo
        n = len(positions)
        phase = np.full(n, plan[0]['phase'] if plan else 'testPre', 
                        dtype=object)
        trial = np.full(n, -1, dtype=int)
        direction = np.full(n, 'none', dtype=object)

        speed = np.linalg.norm(np.gradient(positions, axis=0), axis=1) * \
            servo.sample_rate if n > 1 else np.zeros(n)
        for first, last, entry in spans:
            phase[first:] = entry['phase']
            moving = first + np.flatnonzero(
                speed[first:last + 1] > servo.separation_threshold)
            if len(moving):
                lo, hi = max(moving[0] - 1, first), min(moving[-1] + 1, last)
                trial[lo:hi + 1] = entry['trial']
                direction[lo:hi + 1] = entry['direction']

        samples = pd.DataFrame({
            't': np.arange(n) / servo.sample_rate,
            'x': positions[:, 0], 'y': positions[:, 1], 'z': positions[:, 2],
            'fx': forces[:, 0], 'fy': forces[:, 1], 'fz': forces[:, 2],
            'phase': phase, 'trial': trial, 'direction': direction}, 
            columns=COLUMNS)

        header = {
            'format': 'spherejerk trial log', 'synthetic': True,
            'subject_id': self.subject_id, 'seed': self.subject.rng_seed,
            'sphere': {'center': [float(x) for x in self.sphere.center], 
                       'radius': float(self.sphere.radius),
                       'stiffness': float(self.sphere.stiffness)},
            'servo': _plain(asdict(servo)),
            'subject': _plain(asdict(self.subject)),
            'protocol': _plain(asdict(self.protocol)),
            'targets': [[float(x) for x in p] for p in targets],
            'movements': _plain(plan)}
        return TrialLog(header, samples)

    def post(self, **kwargs: Any) -> bool:
        ok = super().post(**kwargs)

        if self.log is not None:
            counts = self.log.phase_counts()
            movements = self.log.movements
            self.write('    movements: ' + ', '.join(f'{k}: {v}' for k, v
                                                    in counts.items()))
            if movements:
                peak = np.mean([m['peak_speed'] for m in movements])
                in_band = np.mean([m['in_band'] for m in movements])
                self.write(f'    mean peak speed: {peak:.4f} m/s, '
                           f'in speed band: {in_band:.0%}')
        return ok


def _plain(x: Any) -> Any:
    """
    Returns:
        x with numpy scalars and tuples converted to JSON compatible types
    """
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def run_experiment(sphere: Optional[SphereSurface] = None,
                   servo: Optional[ServoConfig] = None,
                   subject: Optional[SubjectModel] = None,
                   protocol: Optional[ProtocolConfig] = None,
                   seed: Optional[int] = None, subject_id: str = 'subject',
                   silent: bool = True) -> TrialLog:
    """
    Runs the experiment of one subject, see class Experiment

    Returns:
        trial log, identical for identical arguments
    """
    kwargs = {k: v for k, v in (('sphere', sphere), ('servo', servo),
                                ('subject', subject), ('protocol', protocol))
              if v is not None}
    experiment = Experiment(subject_id)
    experiment._log_to_file = False
    return experiment(seed=seed, subject_id=subject_id, silent=silent, 
                      **kwargs)


def subject_population(base: SubjectModel, n: int, seed: int = 0, 
                       spread: float = 0.25) -> List[SubjectModel]:
    """
    Args:
        base:
            typical subject

        n:
            number of subjects

        seed:
            seed of the population

        spread:
            standard deviation of the log-normal factor applied to the
            amplitudes of the base subject

    Returns:
        subjects with individual amplitudes and seeds
    """
    rng = np.random.default_rng(seed)
    subjects = []
    for i in range(n):
        f = np.exp(spread * rng.standard_normal(4))
        subjects.append(replace(base, 
            path_bias=base.path_bias * f[0],
            penetration_bias=base.penetration_bias * f[1],
            timing_distortion=base.timing_distortion * f[2],
            motor_noise=base.motor_noise * f[3],
            rng_seed=int(rng.integers(0, 2**31 - 1))))
    return subjects
