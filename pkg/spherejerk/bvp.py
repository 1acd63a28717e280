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
      2024-05-21
"""

__all__ = ['BvpProblem', 'BvpSolution', 'MinJerkSolver',
           'euler_poisson_rhs', 'lambda_consistent', 
           'solve_constrained_minjerk', 'path_deviation_from_geodesic', 
           'jerk_cost', 'reference_cost', 'speed_profile_error', 
           'time_reversed', 'solution_frame', 'endpoint_arc']

from dataclasses import dataclass, field
import logging
import numpy as np
from numpy.polynomial.legendre import leggauss
import pandas as pd
from scipy.integrate import solve_bvp
from typing import Any, Callable, Optional, Tuple, Union

try:
    from spherejerk.base import Base
    from spherejerk.datatype import Float1D, Float2D, Vec3, Vec3s
    from spherejerk.errors import (CoincidentPointsError,
        InvalidBoundaryError, NotConvergedError)
    from spherejerk.geometry import (GeodesicArc, SphereSurface, as_vec3, 
        distance_to_arc, geodesic_between, ON_SURFACE_TOL)
    from spherejerk.reference import (QuinticProfile, 
        geodesic_quintic_cost, geodesic_quintic_derivatives, 
        quintic_kinematics)
except ImportError:
    from base import Base
    from datatype import Float1D, Float2D, Vec3, Vec3s
    from errors import (CoincidentPointsError, InvalidBoundaryError,
        NotConvergedError)
    from geometry import (GeodesicArc, SphereSurface, as_vec3, 
        distance_to_arc, geodesic_between, ON_SURFACE_TOL)
    from reference import (QuinticProfile, geodesic_quintic_cost, 
        geodesic_quintic_derivatives, quintic_kinematics)


"""
    Constrained minimum-jerk motion on a sphere as a two-point boundary 
    value problem

    Stationarity of the integral of |p'''|^2 + lambda g with the 
    constraint g = |p - c|^2 - r^2 leads to p^(6) = lambda (p - c) for 
    every coordinate. The multiplier is eliminated by requiring the 
    sixth time derivative of g to vanish, which leaves an explicit ODE
    with 18 states: q = p - c and its derivatives of order 1..5

    With r^2 in the denominator of the multiplier, a drift of g obeys 
    g^(6) = 2 lambda g. For central angles beyond about 90 degrees 
    -2 lambda tf^6 reaches the eigenvalues of the clamped sixth order
    operator and the collocation system turns singular. The solver 
    therefore divides by |q|^2, then g^(6) = 0 and the six boundary 
    conditions on g, g', g'' hold g at zero

    State layout: y[3k:3k+3] is the k-th derivative of q, k = 0..5
"""

logger = logging.getLogger(__name__)

N_STATE = 18
N_INITIAL_MESH = 41
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 50
DEFAULT_MAX_NODES = 100000
TANGENT_TOL = 1e-9
N_TIGHTEN = 3
MIN_TOL = 100. * np.finfo(float).eps

# maxima of |d^k sigma / d tau^k| of the quintic time law, k = 0..5
QUINTIC_DERIVATIVE_MAX = np.array([1., 1.875, 5.7735, 60., 360., 720.])


def _derivative(y: Union[Float1D, Float2D], k: int) -> Union[Float1D, 
                                                             Float2D]:
    return y[3*k:3*k+3]


def _dot(u: Union[Float1D, Float2D],
         v: Union[Float1D, Float2D]) -> Union[float, Float1D]:
    return np.sum(u * v, axis=0)


def lambda_consistent(state: Union[Float1D, Float2D],
                      r: Optional[float] = None) -> Union[float, Float1D]:
    """
    Lagrange multiplier which makes the sixth derivative of the
    constraint vanish if p^(6) = lambda q and |q| = r

    Args:
        state:
            18 states, shape: (18,) or (18, n_point)

        r:
            sphere radius [m]. If None, |q|^2 of the state replaces r^2
            and the sixth derivative of g = |q|^2 - r^2 vanishes off the
            surface too. The solver uses this form: a drift in g then
            obeys g^(6) = 0 and is removed by the boundary conditions

    Returns:
        multiplier(s) [1/s^6]
    """
    y = np.asarray(state, dtype=float)
    q0, q1, q2, q3, q4, q5 = (_derivative(y, k) for k in range(6))
    denominator = 2. * (_dot(q0, q0) if r is None else r**2)
    lam = -(12. * _dot(q1, q5) + 30. * _dot(q2, q4) +
            20. * _dot(q3, q3)) / denominator
    return float(lam) if np.ndim(lam) == 0 else lam


def euler_poisson_rhs(state: Union[Float1D, Float2D], 
                      lam: Union[float, Float1D]) -> Union[Float1D, Float2D]:
    """
    Right-hand side of the chained first order system

    Args:
        state:
            18 states, shape: (18,) or (18, n_point)

        lam:
            Lagrange multiplier(s), scalar or shape: (n_point,)

    Returns:
        time derivatives of the states, same shape as 'state'
    """
    y = np.asarray(state, dtype=float)
    dy = np.empty_like(y)
    dy[:15] = y[3:]
    dy[15:] = lam * y[:3]
    return dy


def _lambda_gradient(y: Float2D) -> Float2D:
    """
    Returns:
        partial derivatives of lambda_consistent(y) with the |q|^2
        denominator with respect to the states, shape: (18, n_point)
    """
    qq = _dot(y[0:3], y[0:3])
    scale = -1. / (2. * qq)
    grad = np.zeros_like(y)
    grad[0:3] = -2. * lambda_consistent(y) * y[0:3] / qq
    grad[3:6] = 12. * scale * y[15:18]
    grad[15:18] = 12. * scale * y[3:6]
    grad[6:9] = 30. * scale * y[12:15]
    grad[12:15] = 30. * scale * y[6:9]
    grad[9:12] = 40. * scale * y[9:12]
    return grad


@dataclass(frozen=True)
class BvpProblem(object):
    """
    Boundary data of a constrained minimum-jerk movement 

    Positions, velocities and accelerations at both ends give the 18 
    boundary conditions. Velocities and accelerations default to rest
    """
    sphere: SphereSurface
    start: Vec3
    end: Vec3
    duration: float                                              # [s]
    start_velocity: Vec3 = field(default_factory=lambda: np.zeros(3))
    start_acceleration: Vec3 = field(default_factory=lambda: np.zeros(3))
    end_velocity: Vec3 = field(default_factory=lambda: np.zeros(3))
    end_acceleration: Vec3 = field(default_factory=lambda: np.zeros(3))
    mesh: Optional[Float1D] = None                               # [s]

    def __post_init__(self) -> None:
        for name in ('start', 'end', 'start_velocity', 'start_acceleration',
                     'end_velocity', 'end_acceleration'):
            object.__setattr__(self, name, as_vec3(getattr(self, name)))
        if self.mesh is not None:
            object.__setattr__(self, 'mesh', 
                               np.asarray(self.mesh, dtype=float))

    def validate(self) -> None:
        """
        Checks the boundary data before any iteration

        Raises:
            InvalidBoundaryError if duration or mesh are invalid, if a
            boundary point is off the surface, or if a boundary velocity
            or acceleration violates the differentiated constraint
        """
        s = self.sphere
        r = s.radius
        if not (self.duration > 0. and np.isfinite(self.duration)):
            raise InvalidBoundaryError(f'duration must be positive: '
                                       f'{self.duration}')
        if self.mesh is not None:
            m = self.mesh
            if m.ndim != 1 or len(m) < 2 or np.any(np.diff(m) <= 0.) or \
                    m[0] != 0. or not np.isclose(m[-1], self.duration):
                raise InvalidBoundaryError('mesh must increase strictly '
                                           'from 0 to the duration')
        for label, p, v, a in (
                ('start', self.start, self.start_velocity, 
                 self.start_acceleration),
                ('end', self.end, self.end_velocity, self.end_acceleration)):
            q = p - s.c
            if abs(np.linalg.norm(q) - r) > ON_SURFACE_TOL * r:
                raise InvalidBoundaryError(f'{label} point is off the '
                                           f'surface: {p}')
            if abs(q @ v) > TANGENT_TOL * r * (1. + np.linalg.norm(v)):
                raise InvalidBoundaryError(f'{label} velocity is not '
                                           f'tangent to the surface: {v}')
            # second derivative of the constraint: q.a + |v|^2 = 0
            if abs(q @ a + v @ v) > TANGENT_TOL * r * \
                    (1. + np.linalg.norm(a) + v @ v / r):
                raise InvalidBoundaryError(f'{label} acceleration is '
                                           f'inconsistent with the surface: '
                                           f'{a}')

    def time_mesh(self) -> Float1D:
        if self.mesh is not None:
            return self.mesh.copy()
        return np.linspace(0., self.duration, N_INITIAL_MESH)

    def reversed(self) -> 'BvpProblem':
        """
        Returns:
            problem with swapped ends, velocities change their sign
        """
        mesh = None if self.mesh is None else \
            (self.duration - self.mesh)[::-1]
        return BvpProblem(self.sphere, self.end, self.start, self.duration,
                          -self.end_velocity, self.end_acceleration,
                          -self.start_velocity, self.start_acceleration, 
                          mesh)


@dataclass(frozen=True)
class BvpSolution(object):
    """
    Collocation solution with its diagnostics

    'states' holds q = p - c and its derivatives of order 1..5 at the 
    final mesh, see the state layout of this module
    """
    problem: BvpProblem
    times: Float1D                                   # [s], final mesh
    states: Float2D                                  # shape: (18, n_mesh)
    lam: Float1D                                     # [1/s^6]
    max_constraint_residual: float                   # |g| / r^2
    max_ode_residual: float                          # |p^(6) - lambda q|
    iterations: int
    converged: bool
    message: str = ''
    projected: bool = False
    interpolant: Optional[Callable[[Float1D], Float2D]] = \
        field(default=None, repr=False, compare=False)

    @property
    def duration(self) -> float:
        return self.problem.duration

    @property
    def positions(self) -> Vec3s:
        """
        Returns:
            absolute positions at the mesh, shape: (n_mesh, 3) [m]
        """
        return self.states[0:3].T + self.problem.sphere.c

    def evaluate(self, t: Union[float, Float1D]) -> Float2D:
        """
        Args:
            t:
                time(s) in [0, duration]

        Returns:
            states at t, shape: (18, n_time)
        """
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if self.interpolant is None:
            return np.array([np.interp(tt, self.times, row) 
                             for row in self.states])
        return self.interpolant(tt)

    def speed(self, t: Union[float, Float1D]) -> Float1D:
        """
        Returns:
            tangential speed |p'| at t [m/s]
        """
        return np.linalg.norm(self.evaluate(t)[3:6], axis=0)


def _state_scale(prob: BvpProblem) -> Float1D:
    """
    Factors converting nondimensional states into states in SI units

    Time is measured in units of the duration and lengths in units of
    the radius. The derivative of order k is further divided by its
    expected magnitude, the maximum of the k-th derivative of the
    quintic time law times the central angle. All nondimensional states
    are then of order one and the relative tolerance of the collocation
    applies evenly to them

    Returns:
        scale factors, shape: (18,)
    """
    r, tf = prob.sphere.radius, prob.duration
    try:
        angle = geodesic_between(prob.start, prob.end,
                                 prob.sphere).central_angle
    except CoincidentPointsError:
        angle = 0.
    angle = max(angle,
                np.linalg.norm(prob.start_velocity) * tf / r,
                np.linalg.norm(prob.end_velocity) * tf / r,
                np.linalg.norm(prob.start_acceleration) * tf**2 / r,
                np.linalg.norm(prob.end_acceleration) * tf**2 / r)
    weights = np.maximum(1., angle * QUINTIC_DERIVATIVE_MAX)
    weights[0] = 1.
    return np.repeat(r * weights / tf**np.arange(6), 3)


def _fun(tf: float, scale: Float1D) -> Tuple[Callable, Callable]:
    to_si = scale[:, np.newaxis]

    def fun(x: Float1D, y: Float2D) -> Float2D:
        z = to_si * y
        return tf * euler_poisson_rhs(z, lambda_consistent(z)) / to_si

    def fun_jac(x: Float1D, y: Float2D) -> Float2D:
        z = to_si * y
        m = z.shape[1]
        jac = np.zeros((N_STATE, N_STATE, m))
        for i in range(15):
            jac[i, i + 3] = 1.
        lam = lambda_consistent(z)
        grad = _lambda_gradient(z)
        for i in range(3):
            jac[15 + i] = z[i] * grad
            jac[15 + i, i] += lam
        return tf * jac * (scale[np.newaxis, :, np.newaxis] /
                           scale[:, np.newaxis, np.newaxis])

    return fun, fun_jac


def _bc(prob: BvpProblem, scale: Float1D) -> Tuple[Callable, Callable]:
    c = prob.sphere.c
    left = np.concatenate([prob.start - c, prob.start_velocity,
                           prob.start_acceleration]) / scale[:9]
    right = np.concatenate([prob.end - c, prob.end_velocity,
                            prob.end_acceleration]) / scale[:9]

    def bc(ya: Float1D, yb: Float1D) -> Float1D:
        return np.concatenate([ya[:9] - left, yb[:9] - right])

    def bc_jac(ya: Float1D, yb: Float1D) -> Tuple[Float2D, Float2D]:
        dya = np.zeros((N_STATE, N_STATE))
        dyb = np.zeros((N_STATE, N_STATE))
        dya[np.arange(9), np.arange(9)] = 1.
        dyb[9 + np.arange(9), np.arange(9)] = 1.
        return dya, dyb

    return bc, bc_jac


def _initial_guess(prob: BvpProblem, t: Float1D) -> Float2D:
    """
    Geodesic-quintic composition and its analytic derivatives, or a 
    constant state if start and end coincide
    """
    try:
        arc = geodesic_between(prob.start, prob.end, prob.sphere)
    except CoincidentPointsError:
        y = np.zeros((N_STATE, len(t)))
        y[:3] = (prob.start - prob.sphere.c)[:, np.newaxis]
        return y
    d = geodesic_quintic_derivatives(arc, prob.duration, t, order=5)
    d[0] -= prob.sphere.c
    return d.transpose(0, 2, 1).reshape(N_STATE, len(t))


def solve_constrained_minjerk(prob: BvpProblem, 
                              tol: float = DEFAULT_TOL,
                              max_iter: int = DEFAULT_MAX_ITER,
                              max_nodes: int = DEFAULT_MAX_NODES,
                              project: bool = False) -> BvpSolution:
    """
    Solves the constrained minimum-jerk problem by collocation
    (scipy.integrate.solve_bvp, 4th order Lobatto IIIA with adaptive
    mesh refinement and damped Newton iterations) in nondimensional 
    states, see _state_scale()

    Args:
        prob:
            boundary data

        tol:
            relative tolerance of collocation residuals, boundary 
            conditions and constraint

        max_iter:
            maximum number of mesh refinement passes

        max_nodes:
            maximum number of mesh nodes

        project:
            if True, positions of the returned states are projected
            radially onto the sphere

    Returns:
        solution, 'converged' is False if the solver failed or if the 
        constraint residual exceeds tol

    Raises:
        InvalidBoundaryError if the boundary data are invalid
        AntipodalPointsError if start and end are antipodal
    """
    if not tol > 0.:
        raise ValueError(f'tol must be positive: {tol}')
    prob.validate()
    r, tf = prob.sphere.radius, prob.duration

    scale = _state_scale(prob)
    to_si = scale[:, np.newaxis]
    x0 = prob.time_mesh() / tf
    x0[-1] = 1.
    y0 = _initial_guess(prob, tf * x0) / to_si
    fun, fun_jac = _fun(tf, scale)
    bc, bc_jac = _bc(prob, scale)

    # tightens the collocation tolerance while the constraint drifts
    n_iter, tol_k = 0, tol
    for _ in range(N_TIGHTEN + 1):
        res = solve_bvp(fun, bc, x0, y0, fun_jac=fun_jac, bc_jac=bc_jac,
                        tol=tol_k, max_nodes=max_nodes, bc_tol=tol,
                        verbose=0)
        n_iter += res.niter
        max_g = float(np.max(np.abs(np.sum((to_si[0:3] * res.y[0:3])**2, 
                                           axis=0) - r**2)) / r**2)
        if res.status != 0 or max_g < tol or tol_k < 1e3 * MIN_TOL:
            break
        x0, y0, tol_k = res.x, res.y, tol_k / 10.

    times, states = tf * res.x, to_si * res.y
    lam = lambda_consistent(states)

    def interpolant(t: Float1D, _sol=res.sol) -> Float2D:
        return to_si * _sol(np.asarray(t, dtype=float) / tf)

    # Euler-Poisson residual at the interval midpoints
    s_mid = 0.5 * (res.x[:-1] + res.x[1:])
    y_mid = to_si * res.sol(s_mid)
    dy_mid = to_si * res.sol(s_mid, 1) / tf
    ode = dy_mid[15:18] - lambda_consistent(y_mid) * y_mid[0:3]
    max_ode = float(np.max(np.abs(ode))) if ode.size else 0.

    converged = bool(res.status == 0 and n_iter <= max_iter and
                     max_g < tol)
    message = res.message
    if res.status == 0 and not converged:
        message = f'constraint residual {max_g:.3e} or refinement passes ' \
                  f'{n_iter} exceed the limits'

    if project:
        norms = np.linalg.norm(states[0:3], axis=0)
        states = states.copy()
        states[0:3] *= r / norms

        def interpolant(t: Float1D, _base=interpolant) -> Float2D:
            y = _base(t)
            y[0:3] *= r / np.linalg.norm(y[0:3], axis=0)
            return y

    if not converged:
        logger.warning(f'no convergence: {message}, ode residual: '
                       f'{max_ode:.3e}, constraint residual: {max_g:.3e}')
    else:
        logger.debug(f'converged after {n_iter} passes on '
                     f'{len(times)} nodes')

    return BvpSolution(problem=prob, times=times, states=states, lam=lam,
                       max_constraint_residual=max_g, 
                       max_ode_residual=max_ode, iterations=int(n_iter),
                       converged=converged, message=message, 
                       projected=project, interpolant=interpolant)


def endpoint_arc(sol: BvpSolution) -> Optional[GeodesicArc]:
    """
    Returns:
        great-circle arc between the projected end positions of the 
        solution, None if they coincide
    """
    s = sol.problem.sphere
    p = sol.positions
    try:
        return geodesic_between(s.c + s.radius * (p[0] - s.c) / 
                                np.linalg.norm(p[0] - s.c),
                                s.c + s.radius * (p[-1] - s.c) / 
                                np.linalg.norm(p[-1] - s.c), s)
    except CoincidentPointsError:
        return None


def path_deviation_from_geodesic(sol: BvpSolution) -> float:
    """
    Args:
        sol:
            converged solution

    Returns:
        maximum in-surface distance of the mesh positions (projected
        onto the sphere) from the great-circle arc between the 
        solution's end points [m]

    Raises:
        NotConvergedError if the solution did not converge
    """
    if not sol.converged:
        raise NotConvergedError(f'deviation of a non-converged solution: '
                                f'{sol.message}')
    arc = endpoint_arc(sol)
    p = sol.positions
    if arc is None:
        s = sol.problem.sphere
        u = (p - s.c) / np.linalg.norm(p - s.c, axis=1)[:, np.newaxis]
        u0 = u[0]
        angles = np.arctan2(np.linalg.norm(np.cross(u, u0), axis=1), u @ u0)
        return float(s.radius * np.max(angles))
    return float(np.max(distance_to_arc(p, arc, geodesic=True)))


def jerk_cost(sol: BvpSolution, n_gauss: int = 4) -> float:
    """
    Integral of |p'''|^2 over the duration, Gauss-Legendre quadrature 
    on every mesh interval of the interpolant

    Returns:
        cost [m^2/s^5]
    """
    x, w = leggauss(n_gauss)
    a, b = sol.times[:-1], sol.times[1:]
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, np.newaxis] + half[:, np.newaxis] * x
    jerk = sol.evaluate(t.ravel())[9:12]
    f = np.sum(jerk**2, axis=0).reshape(t.shape)
    return float(np.sum(half * (f @ w)))


def reference_cost(arc: GeodesicArc, tf: float) -> float:
    """
    Returns:
        jerk cost of the geodesic-quintic composition [m^2/s^5]
    """
    return geodesic_quintic_cost(arc, tf)


def speed_profile_error(sol: BvpSolution, n_eval: int = 1001) -> float:
    """
    Maximum difference between the tangential speed of the solution and
    the quintic bell of the same path length and duration

    Returns:
        error relative to the peak speed of the bell, 0 for a solution 
        at rest
    """
    arc = endpoint_arc(sol)
    if arc is None:
        return float(np.max(sol.speed(sol.times)))
    profile = QuinticProfile(arc.arc_length, sol.duration)
    t = np.linspace(0., sol.duration, n_eval)
    bell = quintic_kinematics(profile, t)[1]
    return float(np.max(np.abs(sol.speed(t) - bell)) / profile.peak_speed)


def time_reversed(sol: BvpSolution) -> BvpSolution:
    """
    Returns:
        solution traversed backwards in time, odd derivatives change 
        their sign
    """
    tf = sol.duration
    signs = np.repeat([1., -1., 1., -1., 1., -1.], 3)
    base = sol.interpolant

    def interpolant(t: Float1D) -> Float2D:
        return signs[:, np.newaxis] * base(tf - np.asarray(t))

    return BvpSolution(problem=sol.problem.reversed(), 
                       times=(tf - sol.times)[::-1],
                       states=(signs[:, np.newaxis] * sol.states)[:, ::-1],
                       lam=sol.lam[::-1],
                       max_constraint_residual=sol.max_constraint_residual,
                       max_ode_residual=sol.max_ode_residual,
                       iterations=sol.iterations, converged=sol.converged,
                       message=sol.message, projected=sol.projected,
                       interpolant=interpolant if base is not None 
                       else None)


def solution_frame(sol: BvpSolution, 
                   sample_rate: Optional[float] = None) -> pd.DataFrame:
    """
    Args:
        sol:
            solution

        sample_rate:
            if None, the final mesh is tabulated, otherwise uniform 
            samples at this rate [Hz]

    Returns:
        table with columns t, x, y, z, speed, lambda
    """
    if sample_rate is None:
        t = sol.times
    else:
        n = int(np.floor(sol.duration * sample_rate + 1e-9))
        t = np.arange(n + 1) / sample_rate
        if t[-1] < sol.duration - 1e-12:
            t = np.append(t, sol.duration)
    y = sol.evaluate(t)
    p = y[0:3].T + sol.problem.sphere.c
    return pd.DataFrame({'t': t, 'x': p[:, 0], 'y': p[:, 1], 'z': p[:, 2],
                         'speed': np.linalg.norm(y[3:6], axis=0),
                         'lambda': lambda_consistent(y, 
                                                sol.problem.sphere.radius)})


class MinJerkSolver(Base):
    """
    Operation solving the constrained minimum-jerk problem

    Example:
        s = SphereSurface()
        solver = MinJerkSolver()
        sol = solver(problem=BvpProblem(s, a, b, 0.86), tol=1e-8)
        print(solver.deviation)
    """

    def __init__(self, identifier: str = 'MinJerkSolver') -> None:
        super().__init__(identifier)
        self.problem: Optional[BvpProblem] = None
        self.solution: Optional[BvpSolution] = None
        self.deviation: Optional[float] = None           # [m]
        self.cost: Optional[float] = None                # [m^2/s^5]
        self.seed_cost: Optional[float] = None           # [m^2/s^5]

    def pre(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            problem (BvpProblem):
                boundary data, supersedes the following arguments

            sphere (SphereSurface):
                constraint surface

            start, end (Vec3):
                boundary points [m]

            duration (float):
                movement time [s]
        """
        ok = super().pre(**kwargs)

        prob = kwargs.get('problem', None)
        if prob is None:
            prob = BvpProblem(kwargs.get('sphere', SphereSurface()), 
                              kwargs['start'], kwargs['end'], 
                              kwargs['duration'])
        self.problem = prob
        self.solution, self.deviation, self.cost = None, None, None
        return ok

    def task(self, **kwargs: Any) -> BvpSolution:
        """
        Kwargs:
            tol (float):
                relative tolerance, default: 1e-8

            max_iter (int):
                maximum number of mesh refinement passes

            max_nodes (int):
                maximum number of mesh nodes

            project (bool):
                radial projection of positions, default: False

        Returns:
            solution
        """
        super().task(**kwargs)

        self.solution = solve_constrained_minjerk(
            self.problem, tol=kwargs.get('tol', DEFAULT_TOL), 
            max_iter=kwargs.get('max_iter', DEFAULT_MAX_ITER),
            max_nodes=kwargs.get('max_nodes', DEFAULT_MAX_NODES),
            project=kwargs.get('project', False))
        return self.solution

    def post(self, **kwargs: Any) -> bool:
        ok = super().post(**kwargs)

        sol = self.solution
        if not sol.converged:
            self.warn(f'solver did not converge: {sol.message}')
            self.warn(f'max residuals: ode {sol.max_ode_residual:.3e}, '
                      f'constraint {sol.max_constraint_residual:.3e}')
            return False

        self.deviation = path_deviation_from_geodesic(sol)
        self.cost = jerk_cost(sol)
        arc = endpoint_arc(sol)
        self.seed_cost = reference_cost(arc, sol.duration) \
            if arc is not None else 0.
        self.write(f'    nodes: {len(sol.times)}, passes: {sol.iterations}'
                   f', constraint residual: '
                   f'{sol.max_constraint_residual:.3e}')
        self.write(f'    deviation from geodesic: '
                   f'{self.deviation * 1e3:.6f} mm, jerk cost: '
                   f'{self.cost:.6g} (seed {self.seed_cost:.6g})')
        return ok
