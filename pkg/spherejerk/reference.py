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
      2024-05-15
"""

__all__ = ['QuinticProfile', 'ReferenceTrajectory', 
           'quintic_kinematics', 'reference_trajectory', 'ssj_closed_form',
           'geodesic_quintic_derivatives', 'geodesic_quintic_cost']

from dataclasses import dataclass
import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from typing import Tuple, Union

try:
    from spherejerk.datatype import Float1D, Float3D, Vec3s
    from spherejerk.errors import ParameterRangeError
    from spherejerk.geometry import GeodesicArc, slerp
except ImportError:
    from datatype import Float1D, Float3D, Vec3s
    from errors import ParameterRangeError
    from geometry import GeodesicArc, slerp


"""
    Analytic minimum-jerk references: the rest-to-rest quintic profile 
    and its composition with the great-circle arc
"""

# position fraction sigma(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5
SIGMA = Polynomial([0., 0., 0., 10., -15., 6.])
PEAK_SPEED_FACTOR = 1.875             # max of d sigma / d tau at tau=0.5


@dataclass(frozen=True)
class QuinticProfile(object):
    """
    Rest-to-rest minimum-jerk profile along a path of length L [m] 
    within the duration tf [s]
    """
    path_length: float
    duration: float

    def __post_init__(self) -> None:
        if not (self.path_length > 0. and np.isfinite(self.path_length)):
            raise ValueError(f'path length must be positive: '
                             f'{self.path_length}')
        if not (self.duration > 0. and np.isfinite(self.duration)):
            raise ValueError(f'duration must be positive: {self.duration}')

    @property
    def peak_speed(self) -> float:
        return PEAK_SPEED_FACTOR * self.path_length / self.duration

    def sigma(self, t: Union[float, Float1D]) -> Union[float, Float1D]:
        """
        Returns:
            position fraction in [0, 1] at time(s) t
        """
        return SIGMA(np.clip(np.asarray(t, dtype=float) / self.duration, 
                             0., 1.))

    def speed(self, t: Union[float, Float1D]) -> Union[float, Float1D]:
        return quintic_kinematics(self, t)[1]


def quintic_kinematics(p: QuinticProfile, t: Union[float, Float1D]) \
        -> Tuple[Union[float, Float1D], ...]:
    """
    Closed form kinematics of the quintic profile

    Args:
        p:
            profile

        t:
            time(s), 0 <= t <= tf [s]

    Returns:
        position [m], speed [m/s], acceleration [m/s^2], jerk [m/s^3]

    Raises:
        ParameterRangeError if any t is outside [0, tf]
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.) or np.any(tt > p.duration) or \
            not np.all(np.isfinite(tt)):
        raise ParameterRangeError(f't must be in [0, {p.duration}]: {t}')
    L, tf = p.path_length, p.duration
    tau = tt / tf

    position = L * SIGMA(tau)
    speed = L / tf * (30. * tau**2 - 60. * tau**3 + 30. * tau**4)
    accel = L / tf**2 * (60. * tau - 180. * tau**2 + 120. * tau**3)
    jerk = L / tf**3 * (60. - 360. * tau + 360. * tau**2)

    if np.ndim(t) == 0:
        return float(position), float(speed), float(accel), float(jerk)
    return position, speed, accel, jerk


def ssj_closed_form(p: QuinticProfile) -> float:
    """
    Returns:
        exact integral of the squared jerk of the 1D quintic, 
        720 L^2 / tf^5 [m^2/s^5]
    """
    return 720. * p.path_length**2 / p.duration**5


@dataclass(frozen=True)
class ReferenceTrajectory(object):
    """
    Geodesic arc traversed with the quintic profile, sampled uniformly
    """
    arc: GeodesicArc
    profile: QuinticProfile
    times: Float1D                                          # [s]
    positions: Vec3s                                        # [m]

    @property
    def sample_rate(self) -> float:
        return 1. / (self.times[1] - self.times[0]) \
            if len(self.times) > 1 else np.inf

    def speeds(self) -> Float1D:
        """
        Returns:
            tangential speed at the sample times [m/s]
        """
        return quintic_kinematics(self.profile, self.times)[1]


def reference_trajectory(arc: GeodesicArc, tf: float, 
                         sample_rate: float) -> ReferenceTrajectory:
    """
    Samples the geodesic-quintic composition at times k / sample_rate

    Args:
        arc:
            great-circle arc from start to end point

        tf:
            duration [s]

        sample_rate:
            sampling frequency [Hz]

    Returns:
        reference trajectory, first sample is the arc start and last 
        sample is the arc end
    """
    if not sample_rate > 0.:
        raise ValueError(f'sample rate must be positive: {sample_rate}')
    profile = QuinticProfile(arc.arc_length, tf)

    n = int(np.floor(tf * sample_rate + 1e-9))
    times = np.arange(n + 1) / sample_rate
    if times[-1] < tf - 1e-12:
        times = np.append(times, tf)
    times[-1] = min(times[-1], tf)
    positions = slerp(arc, np.clip(profile.sigma(times), 0., 1.))

    return ReferenceTrajectory(arc, profile, times, positions)


def _phase_polynomial(arc: GeodesicArc, tf: float) -> Polynomial:
    """
    Returns:
        polar angle phi(t) = central_angle * sigma(t / tf) along the arc
    """
    coef = SIGMA.coef * arc.central_angle / tf**np.arange(len(SIGMA.coef))
    return Polynomial(coef)


def geodesic_quintic_derivatives(arc: GeodesicArc, tf: float, 
                                 t: Union[float, Float1D], 
                                 order: int = 5) -> Float3D:
    """
    Analytic time derivatives of slerp(arc, sigma(t / tf))

    With z = exp(i phi(t)), every derivative is z^(k) = w_k z where the
    polynomials w_k = a_k + i b_k follow from w_0 = 1 and
    w_{k+1} = w_k' + i phi' w_k

    Args:
        arc:
            great-circle arc

        tf:
            duration [s]

        t:
            time(s) [s]

        order:
            highest derivative order

    Returns:
        derivatives, shape: (order+1, n_time, 3), index 0 is position
    """
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    phi = _phase_polynomial(arc, tf)
    dphi = phi.deriv()
    r = arc.sphere.radius
    e1, e2 = np.array(arc.start_dir), arc.tangent_dir
    cos_phi, sin_phi = np.cos(phi(tt)), np.sin(phi(tt))

    a, b = Polynomial([1.]), Polynomial([0.])
    out = np.zeros((order + 1, tt.size, 3))
    for k in range(order + 1):
        A, B = a(tt), b(tt)
        re = A * cos_phi - B * sin_phi
        im = A * sin_phi + B * cos_phi
        out[k] = r * (np.outer(re, e1) + np.outer(im, e2))
        a, b = a.deriv() - dphi * b, b.deriv() + dphi * a
    out[0] += arc.sphere.c

    return out


def geodesic_quintic_cost(arc: GeodesicArc, tf: float, 
                          n_gauss: int = 64) -> float:
    """
    Returns:
        integral of the squared spatial jerk of the geodesic-quintic 
        composition [m^2/s^5], Gauss-Legendre quadrature
    """
    x, w = leggauss(n_gauss)
    t = 0.5 * tf * (x + 1.)
    jerk = geodesic_quintic_derivatives(arc, tf, t, order=3)[3]
    return float(0.5 * tf * np.sum(w * np.sum(jerk**2, axis=1)))
