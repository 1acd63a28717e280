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
      2024-06-11
"""

import initialize
initialize.set_path()

import numpy as np
from numpy.polynomial import Polynomial
import pandas as pd
from scipy.spatial.transform import Rotation
import unittest

from spherejerk.errors import DegenerateReferenceError, FitError
from spherejerk.geometry import (SphereSurface, geodesic_between, 
    rotate_about_center, slerp, triangle_targets)
from spherejerk.haptic import (ProtocolConfig, SubjectModel, contact_force,
    run_experiment, synthetic_movement)
from spherejerk.metrics import (METRICS, TABLE_COLUMNS, MetricRecord, 
    Movement, acf, analyze_log, apd, cfv, compute_metrics, 
    fit_tangential_velocity, init_metrics, metrics_table, reference_for, 
    segment_movements, ssj, vpe)
from spherejerk.reference import (SIGMA, QuinticProfile, 
    geodesic_quintic_cost, reference_trajectory, ssj_closed_form)
from spherejerk.triallog import COLUMNS, TrialLog


def line_movement(L: float = 1., tf: float = 1., n: int = 101, 
                  delta: float = 0.) -> Movement:
    """
    Straight 1D quintic along x, plus a constant speed delta
    """
    t = np.linspace(0., tf, n)
    P = np.zeros((n, 3))
    P[:, 0] = L * SIGMA(t / tf) + delta * t
    return Movement(t, P, None)


def log_of(t, P, trial, direction) -> TrialLog:
    n = len(t)
    samples = pd.DataFrame({
        't': t, 'x': P[:, 0], 'y': P[:, 1], 'z': P[:, 2],
        'fx': np.zeros(n), 'fy': np.zeros(n), 'fz': np.zeros(n),
        'phase': ['testPre'] * n, 'trial': trial, 'direction': direction},
        columns=COLUMNS)
    header = {'subject_id': 'S01', 'servo': {'sample_rate': 100.},
              'movements': [{'trial': 0, 'start_target': 2, 
                             'end_target': 1},
                            {'trial': 1, 'start_target': 1, 
                             'end_target': 2}]}
    return TrialLog(header, samples)


class TestUM(unittest.TestCase):
    def setUp(self):
        self.s = SphereSurface()
        T = triangle_targets(self.s, 0.08)
        self.arc = geodesic_between(T[2], T[1], self.s)

    def tearDown(self):
        pass

    def test1(self):
        # squared jerk of the 1D quintic
        m = line_movement()
        self.assertAlmostEqual(ssj(m) / 720., 1., delta=1e-3)
        self.assertAlmostEqual(ssj(m) / ssj_closed_form(QuinticProfile(1., 
                               1.)), 1., delta=1e-3)

        # doubled duration scales with 2^-5
        m2 = line_movement(tf=2.)
        self.assertAlmostEqual(ssj(m2) / ssj(m), 2.**-5, delta=1e-6)

        # high-frequency content increases the squared jerk
        noisy = line_movement()
        noisy.positions[:, 1] = 1e-3 * np.sin(8. * np.pi * noisy.times)
        self.assertGreater(ssj(noisy), ssj(m))

    def test2(self):
        # degree 8 data are reproduced by the fit
        rng = np.random.default_rng(3)
        t = np.linspace(0., 0.5, 51)
        P = np.column_stack([Polynomial(rng.standard_normal(9), 
                             domain=[0., 0.5])(t) for k in range(3)])
        fit = fit_tangential_velocity(Movement(t, P, None))
        residual = np.abs(fit.derivative(t) - P).max()
        self.assertLess(residual / np.abs(P).max(), 1e-9)

        # peak speed of a geodesic-quintic reference, the bias of the fit
        # grows with the curvature of the coordinates over the arc
        angle = 0.6
        arc = geodesic_between([0.2, 0., 0.], 
                               [0.2 * np.cos(angle), 0.2 * np.sin(angle), 
                                0.], self.s)
        ref = reference_trajectory(arc, 0.8, 100.)
        fit = fit_tangential_velocity(Movement(ref.times, ref.positions, 
                                               None))
        peak = fit.speed(np.linspace(0., 0.8, 801)).max()
        self.assertAlmostEqual(peak / ref.profile.peak_speed, 1., delta=5e-3)

        # on the target pair arc the fitted peak is within 1 %
        ref = reference_trajectory(self.arc, 0.8, 100.)
        fit = fit_tangential_velocity(Movement(ref.times, ref.positions, 
                                               None))
        wide = fit.speed(np.linspace(0., 0.8, 801)).max() / \
            ref.profile.peak_speed
        print('fitted peak / reference peak on the target arc:', wide)
        self.assertAlmostEqual(wide, 1., delta=1e-2)

        # too few samples
        t = np.linspace(0., 0.08, 8)
        with self.assertRaises(FitError):
            fit_tangential_velocity(Movement(t, np.random.rand(8, 3), None))
        with self.assertRaises(FitError):
            fit_tangential_velocity(Movement(np.zeros(9), np.zeros((9, 3)),
                                             None))

    def test3(self):
        # path deviation
        ref = reference_trajectory(self.arc, 0.8, 100.)
        m = Movement(ref.times, ref.positions, None)
        self.assertLess(apd(m, reference_for(m)), 1e-12)

        # constant lateral offset d on the surface
        d = 0.002
        alpha = d / self.s.radius
        U = ref.positions / self.s.radius
        offset = self.s.radius * (np.cos(alpha) * U + 
                                  np.sin(alpha) * self.arc.normal)
        m = Movement(ref.times, offset, None)
        expected = 2. * self.s.radius * np.sin(0.5 * alpha)
        self.assertAlmostEqual(apd(m, ref) * self.arc.arc_length, 
                               expected, delta=1e-12)
        self.assertAlmostEqual(apd(m, ref), d / self.arc.arc_length, 
                               delta=1e-6)

    def test4(self):
        # contact force measures
        ref = reference_trajectory(self.arc, 0.8, 1000.)
        m = Movement(ref.times, ref.positions, 
                     contact_force(ref.positions, self.s))
        self.assertLess(acf(m), 1e-9)
        self.assertLess(cfv(m), 1e-12)

        inside = ref.positions * (0.199 / 0.2)
        m = Movement(ref.times, inside, contact_force(inside, self.s))
        self.assertAlmostEqual(acf(m), 1., places=9)
        self.assertAlmostEqual(cfv(m), 0., places=12)

        # penetration on the first half of the path only
        s = np.cumsum(np.r_[0., m.segment_lengths()])
        half = s <= 0.5 * s[-1]
        P = np.where(half[:, np.newaxis], inside, ref.positions)
        m = Movement(ref.times, P, contact_force(P, self.s))
        self.assertAlmostEqual(acf(m), 0.5, delta=0.01)

    def test5(self):
        # two-point force distribution over equal path lengths
        m = line_movement(L=0.3, tf=1., n=101)
        m.positions[:, 0] = np.linspace(0., 0.3, 101)
        f = np.zeros((101, 3))
        f[1::2, 2] = 2.
        m.forces = f
        self.assertAlmostEqual(acf(m), 1., places=12)
        self.assertAlmostEqual(cfv(m), 1., places=12)

        # uniform weights give the ordinary variance
        mags = m.force_magnitudes()
        self.assertAlmostEqual(cfv(m, 'uniform'), np.var(mags), places=12)
        self.assertAlmostEqual(acf(m, 'uniform'), np.mean(mags), places=12)
        with self.assertRaises(ValueError):
            acf(m, 'time')

    def test6(self):
        # velocity profile error
        m = line_movement(L=0.3, tf=0.8, n=81)
        ref = QuinticProfile(0.3, 0.8)
        self.assertLess(vpe(m, ref), 1e-9)
        m = line_movement(L=0.3, tf=0.8, n=81, delta=0.01)
        self.assertAlmostEqual(vpe(m, ref), 0.01 * 0.8, delta=1e-9)

    def test7(self):
        # measures are invariant under rotation about the center
        t, hand = synthetic_movement(self.arc, SubjectModel(), 0, 0.8)
        P = hand[::10]
        m = Movement(t[::10], P, contact_force(P, self.s))
        R = Rotation.from_euler('xyz', [0.3, -1.1, 2.0])
        Q = rotate_about_center(P, R, self.s)
        mr = Movement(m.times, Q, R.apply(m.forces))
        a, b = compute_metrics(m), compute_metrics(mr)
        for key in METRICS:
            self.assertAlmostEqual(a[key] / b[key], 1., delta=1e-8, 
                                   msg=key)
        print('metrics of a learning subject:', 
              {k: round(a[k], 6) for k in METRICS})

        # force measures do not depend on the sample rate
        P2 = hand[::5]
        m2 = Movement(t[::5], P2, contact_force(P2, self.s))
        self.assertAlmostEqual(acf(m2) / acf(m), 1., delta=0.01)
        self.assertAlmostEqual(cfv(m2) / cfv(m), 1., delta=0.01)

    def test8(self):
        # segmentation of two movements separated by rest
        fwd = slerp(self.arc, SIGMA(np.linspace(0., 1., 81)))
        rest = np.repeat(fwd[:1], 30, axis=0)
        P = np.vstack([rest, fwd, np.repeat(fwd[-1:], 30, axis=0), 
                       fwd[::-1], rest])
        n = len(P)
        t = np.arange(n) / 100.
        trial = np.full(n, -1)
        trial[30:111] = 0
        trial[141:222] = 1
        direction = np.where(trial == 0, 'forward', 
                             np.where(trial == 1, 'backward', 'none'))
        log = log_of(t, P, trial, direction)

        movements = segment_movements(log)
        self.assertEqual(len(movements), 2)
        self.assertEqual([m.trial for m in movements], [0, 1])
        self.assertEqual([m.direction for m in movements], 
                         ['forward', 'backward'])
        self.assertEqual(movements[0].start_target, 2)
        self.assertEqual(movements[1].end_target, 2)
        self.assertEqual(movements[0].subject, 'S01')
        for m in movements:
            self.assertAlmostEqual(m.duration, 0.8, places=9)
            np.testing.assert_allclose(m.positions[[0, -1]].ravel(), 
                                       np.r_[P[30], P[110]] 
                                       if m.trial == 0 else 
                                       np.r_[P[141], P[221]], atol=1e-15)

        # rounding noise at rest does not extend the windows
        noise = np.random.default_rng(2).uniform(-1e-16, 1e-16, P.shape)
        noisy = P + np.where((trial < 0)[:, np.newaxis], noise, 0.)
        movements = segment_movements(log_of(t, noisy, trial, direction))
        self.assertEqual(len(movements), 2)
        for m in movements:
            self.assertAlmostEqual(m.duration, 0.8, places=9)

        # slow drift never crosses the threshold
        drift = P[:1] + np.outer(t, [0., 0., 0.01])
        self.assertEqual(segment_movements(log_of(t, drift, trial, 
                                                  direction)), [])
        self.assertEqual(segment_movements(TrialLog()), [])
        with self.assertRaises(ValueError):
            segment_movements(log, threshold=0.)

    def test9(self):
        # ideal subject: no deviation, no force, no profile error
        log = run_experiment(subject=SubjectModel.ideal(), 
                             protocol=ProtocolConfig(2, 2, 2), seed=1)
        records = analyze_log(log)
        self.assertEqual([r['trial'] for r in records], list(range(6)))
        for r in records:
            self.assertLess(r['apd'], 1e-6)
            self.assertLess(r['acf'], 1e-6)
            self.assertLess(r['cfv'], 1e-6)
            self.assertLess(r['vpe'], 0.01 * r['path_length'])
            self.assertTrue(r.is_complete())

        # the segmented windows span exactly the simulated movements
        plan = {e['trial']: e for e in log.movements}
        for r in records:
            self.assertAlmostEqual(r['duration'], 
                                   plan[r['trial']]['duration'], places=9)
            self.assertAlmostEqual(r['t_start'], 
                                   plan[r['trial']]['t_start'], places=9)

        # squared jerk equals that of the fitted reference samples, the 
        # degree 8 fit of a curved path differs from the analytic cost
        m = segment_movements(log)[0]
        ref = reference_for(m)
        fitted = ssj(Movement(ref.times, ref.positions, None))
        self.assertAlmostEqual(ssj(m) / fitted, 1., delta=1e-6)
        arc = geodesic_between(m.positions[0], m.positions[-1], self.s)
        print('fitted / analytic squared jerk:', 
              fitted / geodesic_quintic_cost(arc, m.duration))

        table = metrics_table(records)
        self.assertEqual(list(table.columns), TABLE_COLUMNS)
        self.assertEqual(len(table), 6)
        self.assertEqual(list(table['phase']), ['testPre'] * 2 + 
                         ['training'] * 2 + ['testPost'] * 2)

    def test10(self):
        # records and their defaults
        r = MetricRecord()
        self.assertEqual(set(init_metrics()), set(r))
        self.assertFalse(r.is_complete())
        r = MetricRecord({k: 0. for k in METRICS})
        self.assertTrue(r.is_complete())
        self.assertEqual(init_metrics({'trial': 3})['trial'], 3)
        self.assertIsInstance(r.to_dict(), dict)

        # coincident end points have no reference
        t = np.linspace(0., 0.5, 51)
        P = np.repeat(self.arc.start[np.newaxis, :], 51, axis=0)
        P[:, 2] += 0.001 * np.sin(np.pi * t / 0.5)
        with self.assertRaises(DegenerateReferenceError):
            reference_for(Movement(t, P, None))


if __name__ == '__main__':
    unittest.main()
