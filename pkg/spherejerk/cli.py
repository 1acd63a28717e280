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
      2024-06-07
"""

__all__ = ['main', 'build_parser', 'cmd_solve', 'cmd_simulate', 
           'cmd_analyze', 'cmd_report', 'EXIT_OK', 'EXIT_NUMERICAL', 
           'EXIT_USAGE']

import argparse
from dataclasses import replace
import json
import numpy as np
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

try:
    from spherejerk.analysis import Analysis, Report, write_results
    from spherejerk.bvp import (BvpProblem, MinJerkSolver, solution_frame,
        speed_profile_error, endpoint_arc)
    from spherejerk.config import RunConfig, load_config, save_config
    from spherejerk.errors import ConfigError, NotConvergedError
    from spherejerk.geometry import triangle_targets
    from spherejerk.haptic import (SubjectModel, run_experiment, 
        subject_population)
    from spherejerk.parallel import map_parallel
    from spherejerk.plot import trajectory_frame, write_plot_data
    from spherejerk.triallog import write_trial_log
except ImportError:
    from analysis import Analysis, Report, write_results
    from bvp import (BvpProblem, MinJerkSolver, solution_frame,
        speed_profile_error, endpoint_arc)
    from config import RunConfig, load_config, save_config
    from errors import ConfigError, NotConvergedError
    from geometry import triangle_targets
    from haptic import SubjectModel, run_experiment, subject_population
    from parallel import map_parallel
    from plot import trajectory_frame, write_plot_data
    from triallog import write_trial_log


"""
    Command line interface

        spherejerk solve    --from 0 --to 1 [--config c.json] [--tol 1e-8]
        spherejerk simulate [--config c.json] [--seed 7] [--subjects 20]
        spherejerk analyze  log1.csv log2.csv ... [--out dir]
        spherejerk report   [--out dir] [--plot]

    Exit codes: 0 success, 1 numerical failure, 2 usage or input error
"""

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def _config(args: argparse.Namespace) -> RunConfig:
    """
    Returns:
        configuration file content with command line overrides

    Raises:
        ConfigError listing all problems
    """
    config = load_config(args.config)
    changes: Dict[str, Any] = {}
    if getattr(args, 'seed', None) is not None:
        changes['seed'] = args.seed
    if getattr(args, 'out', None) is not None:
        changes['out'] = args.out
    if getattr(args, 'tol', None) is not None:
        changes['solver'] = replace(config.solver, tol=args.tol)
    if getattr(args, 'subjects', None) is not None:
        changes['population'] = replace(config.population, 
                                        n_subjects=args.subjects)
    if getattr(args, 'workers', None) is not None:
        changes['analysis'] = replace(config.analysis, 
                                      n_workers=args.workers)
    config = replace(config, **changes)
    problems = config.problems()
    if problems:
        raise ConfigError(problems)
    return config


def cmd_solve(args: argparse.Namespace) -> int:
    """
    Solves the constrained minimum-jerk problem between two targets and
    writes the trajectory with its reference, the mesh solution with 
    the multiplier trace, and a residual report
    """
    config = _config(args)
    s, cfg = config.sphere, config.solver
    out = Path(config.out)
    targets = triangle_targets(s, config.protocol.plane_height)

    solver = MinJerkSolver()
    solver.path = out
    sol = solver(problem=BvpProblem(s, targets[args.start], 
                                    targets[args.end], cfg.duration),
                 tol=cfg.tol, max_iter=cfg.max_iter, 
                 max_nodes=cfg.max_nodes, project=cfg.project, 
                 silent=args.quiet)

    residuals = {
        'from': args.start, 'to': args.end, 'duration': cfg.duration,
        'converged': bool(sol.converged), 'message': sol.message,
        'iterations': int(sol.iterations), 'nodes': int(len(sol.times)),
        'max_constraint_residual': float(sol.max_constraint_residual),
        'max_ode_residual': float(sol.max_ode_residual),
        'projected': bool(sol.projected)}
    if not sol.converged:
        print(json.dumps(residuals, indent=2, sort_keys=True), 
              file=sys.stderr)
        raise NotConvergedError(f'no solution from target {args.start} to '
                                f'{args.end}: {sol.message}')

    residuals.update({
        'deviation': solver.deviation, 
        'deviation_per_radius': solver.deviation / s.radius,
        'jerk_cost': solver.cost, 'seed_cost': solver.seed_cost,
        'speed_profile_error': speed_profile_error(sol),
        'lambda_min': float(np.min(sol.lam)), 
        'lambda_max': float(np.max(sol.lam))})
    frames = {'trajectory': trajectory_frame(sol, endpoint_arc(sol), 
                                             config.servo.sample_rate),
              'mesh': solution_frame(sol)}
    write_plot_data(frames, out)
    with open(out / 'residuals.json', 'w') as f:
        json.dump(residuals, f, indent=2, sort_keys=True)
        f.write('\n')

    print(f'deviation from geodesic: {solver.deviation:.6e} m '
          f'({solver.deviation / s.radius:.3e} r)')
    return EXIT_OK


def _simulate(job: Tuple[SubjectModel, str, RunConfig]) -> Dict[str, Any]:
    subject, subject_id, config = job
    log = run_experiment(config.sphere, config.servo, subject, 
                         config.protocol, seed=subject.rng_seed,
                         subject_id=subject_id, silent=True)
    file = write_trial_log(log, Path(config.out) / f'{subject_id}.csv')
    peaks = [m['peak_speed'] for m in log.movements]
    return {'file': str(file), 'subject': subject_id, 
            'counts': log.phase_counts(),
            'peak_speed': float(np.mean(peaks)) if peaks else float('nan')}


def cmd_simulate(args: argparse.Namespace) -> int:
    """
    Simulates the experiment of one subject, or of a population of 
    subjects on multiple cores, and writes one trial log per subject
    """
    config = _config(args)
    n = config.population.n_subjects
    if n == 1:
        subjects = [replace(config.subject, rng_seed=config.seed)]
    else:
        subjects = subject_population(config.subject, n, config.seed,
                                      config.population.spread)
    jobs = [(subject, f'S{i + 1:02d}', config) 
            for i, subject in enumerate(subjects)]
    Path(config.out).mkdir(parents=True, exist_ok=True)
    save_config(config, Path(config.out) / 'config.json')

    for r in map_parallel(_simulate, jobs, config.analysis.n_workers):
        counts = ', '.join(f'{k}: {v}' for k, v in r['counts'].items())
        print(f"{r['file']}: {counts}, mean peak speed: "
              f"{r['peak_speed']:.4f} m/s")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    """
    Computes the measures of all movements in the trial logs, the 
    per-subject summaries and the population statistics
    """
    config = _config(args)
    analysis = Analysis()
    analysis.path = Path(config.out)
    result = analysis(files=args.logs, config=config.analysis, 
                      silent=args.quiet)
    files = write_results(result, config.out)
    print(f'{len(result.table)} movements, report: '
          f'{[f for f in files if f.name == "report.txt"][0]}')
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    """
    Re-renders the text report from the summary of cmd_analyze()
    """
    config = _config(args)
    report = Report()
    report.path = Path(config.out)
    text = report(summary=Path(config.out) / 'summary.json', 
                  plot=args.plot, silent=True)
    print(text)
    return EXIT_OK


def _target(value: str) -> int:
    try:
        k = int(value)
    except ValueError:
        k = -1
    if k not in (0, 1, 2):
        raise argparse.ArgumentTypeError(f'target id must be 0, 1 or 2: '
                                         f'{value}')
    return k


def _seed(value: str) -> int:
    k = int(value)
    if not 0 <= k < 2**64:
        raise argparse.ArgumentTypeError(f'seed must be an unsigned '
                                         f'64 bit integer: {value}')
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='spherejerk', 
        description='Constrained minimum-jerk movements on a sphere: '
                    'solver, haptic simulation and analysis')
    parser.add_argument('--config', default=None, 
                        help='JSON configuration file')
    parser.add_argument('--out', default=None, help='output directory')
    parser.add_argument('--quiet', action='store_true', 
                        help='no progress messages')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('solve', help='solve the boundary-value problem'
                            ' between two targets')
    p.add_argument('--from', dest='start', type=_target, required=True,
                   help='start target id (0, 1, 2)')
    p.add_argument('--to', dest='end', type=_target, required=True,
                   help='end target id (0, 1, 2)')
    p.add_argument('--tol', type=float, default=None, 
                   help='solver tolerance')
    p.set_defaults(func=cmd_solve)

    p = commands.add_parser('simulate', help='simulate the experiment and '
                            'write trial logs')
    p.add_argument('--seed', type=_seed, default=None)
    p.add_argument('--subjects', type=int, default=None, 
                   help='number of synthetic subjects')
    p.add_argument('--workers', type=int, default=None, 
                   help='worker processes, 0: physical cores')
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser('analyze', help='measures and statistics of '
                            'trial logs')
    p.add_argument('logs', nargs='+', help='trial log files')
    p.add_argument('--workers', type=int, default=None, 
                   help='worker processes, 0: physical cores')
    p.set_defaults(func=cmd_analyze)

    p = commands.add_parser('report', help='render the report of a '
                            'previous analysis')
    p.add_argument('--plot', action='store_true', 
                   help='draw the plot data with matplotlib')
    p.set_defaults(func=cmd_report)

    for p in commands.choices.values():
        p.add_argument('--config', default=argparse.SUPPRESS,
                       help='JSON configuration file')
        p.add_argument('--out', default=argparse.SUPPRESS, 
                       help='output directory')
        p.add_argument('--quiet', action='store_true', 
                       default=argparse.SUPPRESS)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Returns:
        exit code, see EXIT_OK, EXIT_NUMERICAL and EXIT_USAGE
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == 'solve' and args.start == args.end:
        parser.error(f'--from and --to must differ: {args.start}')

    try:
        return args.func(args)
    except ArithmeticError as e:
        print(f'spherejerk {args.command}: {e}', file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as e:
        print(f'spherejerk {args.command}: {e}', file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
