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
      2024-05-14
"""

__all__ = ['SphereSurface', 'GeodesicArc', 
           'as_vec3', 'project_to_sphere', 'geodesic_between', 'slerp', 
           'triangle_targets', 'distance_to_arc', 'rotate_about_center',
           'TRAINING_PAIR', 'TEST_PAIR']

from dataclasses import dataclass, field
import numpy as np
from scipy.spatial.transform import Rotation
from typing import Tuple, Union

try:
    from spherejerk.datatype import Float1D, Vec3, Vec3s
    from spherejerk.errors import (AntipodalPointsError, 
        CoincidentPointsError, DegenerateProjectionError, 
        NoIntersectionError, OffSurfaceError, ParameterRangeError)
except ImportError:
    from datatype import Float1D, Vec3, Vec3s
    from errors import (AntipodalPointsError, CoincidentPointsError, 
        DegenerateProjectionError, NoIntersectionError, OffSurfaceError, 
        ParameterRangeError)


"""
    Spherical geometry: radial projection, great-circle arcs and the
    layout of the three targets

    All lengths in [m], angles in [rad]
"""

ON_SURFACE_TOL = 1e-9         # relative to radius
ANTIPODAL_TOL = 1e-6          # [rad]
COINCIDENT_TOL = 1e-12        # [rad]

# target index pairs (proximal, distal) of the two protocol phases
TRAINING_PAIR = (2, 1)
TEST_PAIR = (0, 1)


def as_vec3(p: Union[Vec3, Tuple[float, float, float]]) -> Vec3:
    """
    Args:
        p:
            array_like with three finite components

    Returns:
        copy of p as 1D float array, shape: (3,)
    """
    v = np.array(p, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f'expected 3 components, got shape {np.shape(p)}')
    if not np.all(np.isfinite(v)):
        raise ValueError(f'non-finite component in {v}')
    return v


@dataclass(frozen=True)
class SphereSurface(object):
    """
    Constraint geometry and elastic rendering parameters

    Defaults: radius 20 cm, stiffness 1 N/mm, center in origin
    """
    center: Tuple[float, float, float] = (0., 0., 0.)      # [m]
    radius: float = 0.20                                   # [m]
    stiffness: float = 1000.                               # [N/m]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'center', tuple(float(x) for x in 
                                                 as_vec3(self.center)))
        if not (np.isfinite(self.radius) and self.radius > 0.):
            raise ValueError(f'radius must be positive: {self.radius}')
        if not (np.isfinite(self.stiffness) and self.stiffness >= 0.):
            raise ValueError(f'stiffness must be non-negative: '
                             f'{self.stiffness}')

    @property
    def c(self) -> Vec3:
        """
        Returns:
            center as numpy array, shape: (3,)
        """
        return np.array(self.center)

    def constraint(self, p: Union[Vec3, Vec3s]) -> Union[float, Float1D]:
        """
        Returns:
            g(p) = |p - center|^2 - r^2 for single point or for each row
        """
        d = np.asarray(p, dtype=float) - self.c
        return np.sum(d * d, axis=-1) - self.radius**2

    def on_surface(self, p: Vec3, rtol: float = ON_SURFACE_TOL) -> bool:
        d = np.linalg.norm(as_vec3(p) - self.c)
        return abs(d - self.radius) <= rtol * self.radius


@dataclass(frozen=True)
class GeodesicArc(object):
    """
    Great-circle arc between two surface points, the intersection of 
    the sphere with the plane through both points and the center
    """
    sphere: SphereSurface
    start_dir: Tuple[float, float, float]
    end_dir: Tuple[float, float, float]
    central_angle: float                                   # [rad]
    arc_length: float = field(init=False)                  # [m]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'arc_length', 
                           self.sphere.radius * self.central_angle)

    @property
    def start(self) -> Vec3:
        return self.sphere.c + self.sphere.radius * np.array(self.start_dir)

    @property
    def end(self) -> Vec3:
        return self.sphere.c + self.sphere.radius * np.array(self.end_dir)

    @property
    def normal(self) -> Vec3:
        """
        Returns:
            unit normal of the great-circle plane (start x end)
        """
        n = np.cross(self.start_dir, self.end_dir)
        return n / np.linalg.norm(n)

    @property
    def tangent_dir(self) -> Vec3:
        """
        Returns:
            unit vector in the great-circle plane, perpendicular to 
            start_dir and pointing towards end_dir
        """
        return np.cross(self.normal, self.start_dir)

    def reversed(self) -> 'GeodesicArc':
        return GeodesicArc(self.sphere, self.end_dir, self.start_dir, 
                           self.central_angle)


def project_to_sphere(p: Vec3, s: SphereSurface) -> Vec3:
    """
    Radial projection of a point onto the sphere surface

    Args:
        p:
            point in 3D space [m]

        s:
            sphere

    Returns:
        point on the surface on the ray from the center through p [m]

    Raises:
        DegenerateProjectionError if p coincides with the center
    """
    d = as_vec3(p) - s.c
    norm = np.linalg.norm(d)
    if norm == 0.:
        raise DegenerateProjectionError(f'point {p} is the sphere center')
    return s.c + d * (s.radius / norm)


def _unit_direction(p: Vec3, s: SphereSurface, name: str) -> Vec3:
    d = as_vec3(p) - s.c
    norm = np.linalg.norm(d)
    if abs(norm - s.radius) > ON_SURFACE_TOL * s.radius:
        raise OffSurfaceError(f'{name}={p} is off the surface by '
                              f'{norm - s.radius:.3e} m')
    return d / norm


def geodesic_between(a: Vec3, b: Vec3, s: SphereSurface) -> GeodesicArc:
    """
    Great-circle arc from a to b

    Args:
        a:
            start point on the surface within 1e-9 * radius [m]

        b:
            end point on the surface within 1e-9 * radius [m]

        s:
            sphere

    Returns:
        arc with unit start and end directions

    Raises:
        OffSurfaceError, CoincidentPointsError, AntipodalPointsError
    """
    ua = _unit_direction(a, s, 'a')
    ub = _unit_direction(b, s, 'b')
    angle = float(np.arctan2(np.linalg.norm(np.cross(ua, ub)), 
                             np.dot(ua, ub)))
    if angle <= COINCIDENT_TOL:
        raise CoincidentPointsError(f'a={a} and b={b} coincide')
    if abs(angle - np.pi) <= ANTIPODAL_TOL:
        raise AntipodalPointsError(f'a={a} and b={b} are antipodal, '
                                   'geodesic is not unique')
    return GeodesicArc(s, tuple(ua), tuple(ub), angle)


def slerp(arc: GeodesicArc, u: Union[float, Float1D]) -> Union[Vec3, Vec3s]:
    """
    Point(s) at fraction u of the arc length, constant angular rate

    Args:
        arc:
            great-circle arc

        u:
            fraction of arc length, scalar or 1D array, 0 <= u <= 1

    Returns:
        point on the surface [m], shape: (3,) for scalar u, otherwise
        shape: (len(u), 3)

    Raises:
        ParameterRangeError if any u is outside [0, 1]
    """
    uu = np.asarray(u, dtype=float)
    if np.any(uu < 0.) or np.any(uu > 1.) or not np.all(np.isfinite(uu)):
        raise ParameterRangeError(f'u must be in [0, 1]: {u}')
    phi = np.multiply.outer(uu, arc.central_angle)[..., np.newaxis]
    dirs = np.cos(phi) * np.array(arc.start_dir) + \
        np.sin(phi) * arc.tangent_dir
    return arc.sphere.c + arc.sphere.radius * dirs


def triangle_targets(s: SphereSurface, plane_height: float) \
        -> Tuple[Vec3, Vec3, Vec3]:
    """
    Vertices of the equilateral triangle in which the horizontal plane 
    at 'plane_height' above the center intersects the sphere. Vertex 0 
    points to +x, vertex 1 is the distal (+y) and vertex 2 the proximal
    (-y) vertex as seen from the subject seated at -y

    Args:
        s:
            sphere

        plane_height:
            height of the target plane above the center [m]

    Returns:
        three points on the surface [m]

    Raises:
        NoIntersectionError if |plane_height| >= radius
    """
    if not abs(plane_height) < s.radius:
        raise NoIntersectionError(f'plane at height {plane_height} m does '
                                  f'not cut the sphere of radius {s.radius}')
    rho = np.sqrt(s.radius**2 - plane_height**2)
    targets = []
    for k in range(3):
        phi = 2. * np.pi * k / 3.
        targets.append(s.c + np.array([rho * np.cos(phi), rho * np.sin(phi), 
                                       plane_height]))
    return tuple(targets)


def distance_to_arc(points: Union[Vec3, Vec3s], arc: GeodesicArc, 
                    geodesic: bool = False) -> Union[float, Float1D]:
    """
    Distance of point(s) to the nearest point of a great-circle arc

    Args:
        points:
            single point or points, shape: (3,) or (n_point, 3) [m]

        arc:
            great-circle arc

        geodesic:
            if True, the points are radially projected onto the surface
            and the in-surface (great-circle) distance is returned,
            otherwise the Euclidean distance in 3D space

    Returns:
        distance(s) [m]
    """
    P = np.atleast_2d(np.asarray(points, dtype=float)) - arc.sphere.c
    r = arc.sphere.radius
    e1 = np.array(arc.start_dir)
    e2 = arc.tangent_dir
    n = arc.normal

    # polar angle of the in-plane component, measured from start_dir
    phi = np.arctan2(P @ e2, P @ e1)
    inside = (phi >= 0.) & (phi <= arc.central_angle)
    phi_near = np.where(inside, phi, 0.)
    near = r * (np.outer(np.cos(phi_near), e1) + 
                np.outer(np.sin(phi_near), e2))

    # outside of the arc the nearest point is one of the end points
    d_start = P - r * e1
    d_end = P - r * np.array(arc.end_dir)
    use_end = np.linalg.norm(d_end, axis=1) < np.linalg.norm(d_start, axis=1)
    ends = np.where(use_end[:, np.newaxis], r * np.array(arc.end_dir), 
                    r * e1)
    near = np.where(inside[:, np.newaxis], near, ends)

    if geodesic:
        norms = np.linalg.norm(P, axis=1)
        if np.any(norms == 0.):
            raise DegenerateProjectionError('point in sphere center')
        U = P / norms[:, np.newaxis]
        V = near / r
        d = r * np.arctan2(np.linalg.norm(np.cross(U, V), axis=1), 
                           np.sum(U * V, axis=1))
    else:
        d = np.linalg.norm(P - near, axis=1)

    return d if np.ndim(points) > 1 else float(d[0])


def rotate_about_center(points: Union[Vec3, Vec3s], rotation: Rotation, 
                        s: SphereSurface) -> Union[Vec3, Vec3s]:
    """
    Rigid rotation of point(s) about the sphere center

    Args:
        points:
            point(s), shape: (3,) or (n_point, 3) [m]

        rotation:
            scipy rotation object

        s:
            sphere providing the center

    Returns:
        rotated point(s), same shape as 'points'
    """
    P = np.asarray(points, dtype=float)
    return s.c + rotation.apply(P - s.c)
