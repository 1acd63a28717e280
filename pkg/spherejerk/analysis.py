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
      2024-06-06
"""

__all__ = ['Analysis', 'AnalysisResult', 'Report', 'PAIRS', 
           'SUMMARY_FORMAT', 'EMPTY_MARKER', 'analyze_file', 'phase_summary', 
           'acf_variance', 'metric_tests', 'pair_tests', 'speed_profiles',
           'render_report', 'write_results']

from collections import defaultdict
from dataclasses import dataclass, field
import json
import logging
import numpy as np
import pandas as pd
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

try:
    from spherejerk.base import Base
    from spherejerk.config import AnalysisConfig
    from spherejerk.errors import (ConfigError, DegenerateReferenceError, 
        DegenerateTableError, FitError, MissingDataError, 
        ParameterRangeError, UndefinedTestError, ZeroPathLengthError)
    from spherejerk.metrics import (METRICS, compute_metrics, 
        fit_tangential_velocity, metrics_table, segment_movements)
    from spherejerk.parallel import map_parallel
    from spherejerk.plot import (average_speed_profiles, metric_traces,
        normalized_speed_profile, render_plots, write_plot_data)
    from spherejerk.stats import (CHI2_CRITICAL, MIN_PAIRS, PairedSamples,
        change_sign_table, chi_square_2x2, reduction_percent, 
        wilcoxon_signed_rank)
    from spherejerk.triallog import read_trial_log
except ImportError:
    from base import Base
    from config import AnalysisConfig
    from errors import (ConfigError, DegenerateReferenceError, 
        DegenerateTableError, FitError, MissingDataError, 
        ParameterRangeError, UndefinedTestError, ZeroPathLengthError)
    from metrics import (METRICS, compute_metrics, fit_tangential_velocity,
        metrics_table, segment_movements)
    from parallel import map_parallel
    from plot import (average_speed_profiles, metric_traces,
        normalized_speed_profile, render_plots, write_plot_data)
    from stats import (CHI2_CRITICAL, MIN_PAIRS, PairedSamples,
        change_sign_table, chi_square_2x2, reduction_percent, 
        wilcoxon_signed_rank)
    from triallog import read_trial_log

logger = logging.getLogger(__name__)

PAIRS = (('apd', 'acf'), ('cfv', 'acf'), ('vpe', 'ssj'))
SUMMARY_PHASES = ('training', 'test')
SUMMARY_FORMAT = 'spherejerk-summary-1'
EMPTY_MARKER = '*** NO MOVEMENTS FOUND ***'


def analyze_file(job: Tuple[str, float]) -> Dict[str, Any]:
    """
    Reads one trial log and computes the measures and the normalized 
    speed profile of every movement, executed in worker processes

    Args:
        job:
            file name and segmentation threshold [m/s]

    Returns:
        dictionary with 'file', 'subject', 'records' and 'profiles'

    Raises:
        TrialLogError if the file is malformed
    """
    file, threshold = job
    log = read_trial_log(file)
    records, profiles = [], []
    for m in segment_movements(log, threshold):
        try:
            fit = fit_tangential_velocity(m)
            record = compute_metrics(m, fit)
        except (FitError, DegenerateReferenceError, 
                ZeroPathLengthError) as e:
            logger.warning(f'{file}: movement at t={m.times[0]:.2f} s '
                           f'skipped: {e}')
            continue
        records.append(record.to_dict())
        profiles.append(normalized_speed_profile(fit))
    return {'file': str(file), 'subject': log.subject_id, 
            'records': records, 'profiles': profiles}


def phase_summary(table: pd.DataFrame, phase: str, 
                  window: int = 20) -> pd.DataFrame:
    """
    Per-subject means before and after learning

    Args:
        table:
            metrics table of all subjects

        phase:
            'training': first vs last 'window' training movements, 
            'test': test-pre vs test-post movements

        window:
            number of training movements averaged at each end

    Returns:
        one row per subject (sorted index 'subject') with columns 
        '<metric>_pre', '<metric>_post', 'n_pre', 'n_post'
    """
    if phase not in SUMMARY_PHASES:
        raise ValueError(f'phase must be one of {SUMMARY_PHASES}: {phase}')
    columns = [f'{m}_{p}' for m in METRICS for p in ('pre', 'post')] + \
        ['n_pre', 'n_post']
    rows = {}
    for subject, group in table.groupby('subject', sort=True):
        group = group.sort_values('trial')
        if phase == 'training':
            training = group[group['phase'] == 'training']
            pre, post = training.head(window), training.tail(window)
        else:
            pre = group[group['phase'] == 'testPre']
            post = group[group['phase'] == 'testPost']
        row = {}
        for m in METRICS:
            row[f'{m}_pre'] = float(pre[m].mean()) if len(pre) else np.nan
            row[f'{m}_post'] = float(post[m].mean()) if len(post) else np.nan
        row['n_pre'], row['n_post'] = len(pre), len(post)
        rows[subject] = row
    summary = pd.DataFrame([rows[s] for s in rows], index=list(rows), 
                           columns=columns)
    summary.index.name = 'subject'
    return summary


def acf_variance(table: pd.DataFrame) -> pd.DataFrame:
    """
    Returns:
        variance of ACF across the movements of every subject and 
        phase [N^2], columns subject, phase, n, acf_variance
    """
    columns = ['subject', 'phase', 'n', 'acf_variance']
    if table.empty:
        return pd.DataFrame(columns=columns)
    grouped = table.groupby(['subject', 'phase'], sort=True)['acf']
    frame = pd.DataFrame({'n': grouped.size(), 
                          'acf_variance': grouped.var(ddof=0)})
    return frame.reset_index()[columns]


def _number(x: Any) -> Optional[float]:
    x = float(x)
    return x if np.isfinite(x) else None


def metric_tests(summary: pd.DataFrame, phase: str) -> Dict[str, Any]:
    """
    Signed-rank test, average reduction and fraction of subjects 
    reducing for every measure, subjects without both values are 
    excluded per measure

    Returns:
        JSON compatible dictionary per measure, None where a quantity 
        is undefined, reason in 'note'
    """
    tests = {}
    for m in METRICS:
        values = summary[[f'{m}_pre', f'{m}_post']].dropna()
        pre = values[f'{m}_pre'].to_numpy()
        post = values[f'{m}_post'].to_numpy()
        entry = {'n_subjects': len(values), 'median_pre': None, 
                 'median_post': None, 'fraction_reducing': None,
                 'reduction_percent': None, 'statistic': None, 
                 'p_value': None, 'n_dropped': None, 'method': None, 
                 'significant': None, 'note': ''}
        tests[m] = entry
        if len(values) == 0:
            entry['note'] = 'no subject with pre and post values'
            continue
        entry['median_pre'] = _number(np.median(pre))
        entry['median_post'] = _number(np.median(post))
        entry['fraction_reducing'] = float(np.mean(post < pre))
        if len(values) < MIN_PAIRS:
            entry['note'] = f'{len(values)} subjects, at least ' \
                f'{MIN_PAIRS} needed for the signed-rank test'
            continue

        s = PairedSamples(pre, post, metric=m, phase=phase)
        try:
            entry['reduction_percent'] = reduction_percent(s)
        except ParameterRangeError as e:
            entry['note'] = str(e)
        try:
            w = wilcoxon_signed_rank(s)
        except UndefinedTestError as e:
            entry['note'] = str(e)
            entry['n_dropped'] = len(s)
            continue
        entry.update({'statistic': w.statistic, 'p_value': w.p_value,
                      'n_dropped': w.n_dropped, 'method': w.method,
                      'significant': bool(w.significant)})
    return tests


def pair_tests(summary: pd.DataFrame, yates: bool = False) \
        -> List[Dict[str, Any]]:
    """
    Change-sign contingency tables and chi-square tests of the pairs 
    (APD, ACF), (CFV, ACF) and (VPE, SSJ) over the subjects having 
    all four values of a pair

    Returns:
        JSON compatible dictionary per pair
    """
    pairs = []
    for m1, m2 in PAIRS:
        entry = {'metrics': [m1, m2], 'n_subjects': 0, 'table': None, 
                 'fraction1': None, 'fraction2': None, 
                 'fraction_both': None, 'chi2': None, 'p_value': None,
                 'critical': CHI2_CRITICAL, 'independent': None, 
                 'yates': yates, 'note': ''}
        pairs.append(entry)
        columns = [f'{m}_{p}' for m in (m1, m2) for p in ('pre', 'post')]
        complete = summary.dropna(subset=columns)
        try:
            signs = change_sign_table(complete, m1, m2)
        except MissingDataError as e:
            entry['note'] = str(e)
            continue
        entry.update({'n_subjects': signs.table.total,
                      'table': signs.table.as_array().tolist(),
                      'fraction1': signs.fraction1, 
                      'fraction2': signs.fraction2,
                      'fraction_both': signs.fraction_both})
        try:
            res = chi_square_2x2(signs.table, yates=yates)
        except DegenerateTableError as e:
            entry['note'] = str(e)
            continue
        entry.update({'chi2': res.statistic, 'p_value': res.p_value,
                      'independent': bool(res.independent)})
    return pairs


def speed_profiles(table: pd.DataFrame, profiles: Sequence[np.ndarray],
                   window: int = 20) -> pd.DataFrame:
    """
    Average time-normalized speed profiles grouped by phase, direction
    and, for training, by the early and late block of 'window' 
    movements of every subject

    Args:
        table:
            metrics table, row i belongs to profiles[i]

        profiles:
            normalized speed profile of every movement

    Returns:
        table of normalized time and mean speed per group
    """
    groups = defaultdict(list)
    for subject, group in table.groupby('subject', sort=True):
        training = group[group['phase'] == 'training'].sort_values('trial')
        early = set(training.index[:window])
        late = set(training.index[-window:]) if window > 0 else set()
        for i, row in group.iterrows():
            if row['phase'] == 'training':
                blocks = [b for b, s in (('early', early), ('late', late))
                          if i in s]
            else:
                blocks = ['all']
            for b in blocks:
                label = f"{row['phase']}_{b}_{row['direction']}"
                groups[label].append(profiles[i])
    return average_speed_profiles(groups)


def _unique_subjects(outputs: List[Dict[str, Any]]) -> None:
    seen = defaultdict(int)
    for o in outputs:
        seen[o['subject']] += 1
        if seen[o['subject']] > 1:
            o['subject'] = f"{o['subject']}#{seen[o['subject']]}"
            for r in o['records']:
                r['subject'] = o['subject']


@dataclass
class AnalysisResult(object):
    table: pd.DataFrame                       # one row per movement
    summaries: Dict[str, pd.DataFrame]        # per phase, per subject
    summary: Dict[str, Any]                   # JSON compatible
    plot_data: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.table.empty


class Analysis(Base):
    """
    Measures of all movements in a set of trial logs, per-subject 
    summaries and population statistics

    Example:
        result = Analysis()(files=['s1.csv', 's2.csv'], 
                            config=AnalysisConfig(window=20))
        print(render_report(result.summary))
    """

    def __init__(self, identifier: str = 'Analysis') -> None:
        super().__init__(identifier)
        self.config: AnalysisConfig = AnalysisConfig()
        self.files: List[Path] = []
        self.result: Optional[AnalysisResult] = None

    def pre(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            files (list of str or Path):
                trial logs, at least one

            config (AnalysisConfig):
                analysis parameters

        Raises:
            ValueError if no file is given
            ConfigError if the configuration is invalid
        """
        ok = super().pre(**kwargs)

        files = kwargs.get('files', None) or []
        if not files:
            raise ValueError('at least one trial log needed')
        self.files = [Path(f) for f in files]
        self.config = kwargs.get('config', self.config)
        problems = self.config.problems()
        if problems:
            raise ConfigError(problems)
        self.write(f'+++ trial logs: {len(self.files)}, threshold: '
                   f'{self.config.threshold} m/s, window: '
                   f'{self.config.window}')
        return ok

    def task(self, **kwargs: Any) -> AnalysisResult:
        """
        Returns:
            measures and statistics, subjects sorted by identifier
        """
        super().task(**kwargs)

        cfg = self.config
        jobs = [(str(f), cfg.threshold) for f in self.files]
        outputs = map_parallel(analyze_file, jobs, cfg.n_workers)
        _unique_subjects(outputs)
        outputs.sort(key=lambda o: o['subject'])

        records, profiles = [], []
        for o in outputs:
            order = np.argsort([r['trial'] for r in o['records']], 
                               kind='stable')
            records += [o['records'][i] for i in order]
            profiles += [o['profiles'][i] for i in order]
        table = metrics_table(records)
        self.write(f'    movements: {len(table)}, subjects: '
                   f'{len(outputs)}')

        summaries = {p: phase_summary(table, p, cfg.window) 
                     for p in SUMMARY_PHASES}
        summary = {
            'format': SUMMARY_FORMAT,
            'files': [o['file'] for o in outputs],
            'subjects': [o['subject'] for o in outputs],
            'n_movements': int(len(table)),
            'empty': bool(table.empty),
            'threshold': cfg.threshold,
            'window': cfg.window,
            'medians': {m: (_number(table[m].median()) if len(table) 
                            else None) for m in METRICS},
            'phases': {p: {'metrics': metric_tests(summaries[p], p),
                           'pairs': pair_tests(summaries[p], cfg.yates)}
                       for p in SUMMARY_PHASES},
            'acf_variance': [{k: (_number(v) if k == 'acf_variance' 
                                  else v) for k, v in r.items()} 
                             for r in acf_variance(table).to_dict('records')],
        }
        for r in summary['acf_variance']:
            r['n'] = int(r['n'])
        plot_data = {'metric_traces': metric_traces(table),
                     'speed_profiles': speed_profiles(table, profiles, 
                                                      cfg.window)}
        self.result = AnalysisResult(table, summaries, summary, plot_data)
        return self.result

    def post(self, **kwargs: Any) -> bool:
        ok = super().post(**kwargs)

        if self.result is not None:
            if self.result.empty:
                self.warn('no movement found')
            for p in SUMMARY_PHASES:
                tests = self.result.summary['phases'][p]['metrics']
                for m, entry in tests.items():
                    if entry['p_value'] is not None:
                        self.write(f'    {p:8} {m}: p = '
                                   f"{entry['p_value']:.4g}")
        return ok


def _fmt(x: Any, spec: str = '.4g') -> str:
    if x is None:
        return '-'
    if isinstance(x, bool):
        return 'yes' if x else 'no'
    if isinstance(x, (int, np.integer)):
        return str(x)
    if isinstance(x, float):
        return format(x, spec)
    return str(x)


def render_report(summary: Dict[str, Any]) -> str:
    """
    Human readable report of the machine readable summary

    Returns:
        report text
    """
    lines = ['spherejerk analysis report', '=' * 26, '',
             f"trial logs:  {len(summary['files'])}",
             f"subjects:    {', '.join(summary['subjects'])}",
             f"movements:   {summary['n_movements']}",
             f"threshold:   {summary['threshold']} m/s",
             f"window:      {summary['window']} training movements", '']
    if summary['empty']:
        lines += [EMPTY_MARKER, '']
        return '\n'.join(lines)

    lines.append('median over all movements')
    units = {'apd': '', 'acf': 'N', 'cfv': 'N^2', 'vpe': 'm', 
             'ssj': 'm^2/s^5'}
    for m in METRICS:
        lines.append(f'    {m.upper():4} {_fmt(summary["medians"][m]):>12} '
                     f'{units[m]}')
    lines.append('')

    head = (f"    {'':4} {'n':>3} {'median pre':>11} {'median post':>11}"
            f" {'red. %':>8} {'reducing':>8} {'W':>8} {'p':>9}"
            f" {'method':>6} {'zeros':>5}")
    for p in SUMMARY_PHASES:
        title = 'training: first vs last training movements' \
            if p == 'training' else 'test: test-pre vs test-post movements'
        lines += [title, '-' * len(title), head]
        phase = summary['phases'][p]
        notes = []
        for m in METRICS:
            e = phase['metrics'][m]
            frac = None if e['fraction_reducing'] is None else \
                f"{100. * e['fraction_reducing']:.0f}%"
            lines.append(f"    {m.upper():4} {e['n_subjects']:>3} "
                         f"{_fmt(e['median_pre']):>11} "
                         f"{_fmt(e['median_post']):>11} "
                         f"{_fmt(e['reduction_percent'], '.1f'):>8} "
                         f"{_fmt(frac):>8} {_fmt(e['statistic']):>8} "
                         f"{_fmt(e['p_value']):>9} {_fmt(e['method']):>6} "
                         f"{_fmt(e['n_dropped']):>5}")
            if e['note']:
                notes.append(f'    {m.upper()}: {e["note"]}')
        lines += notes + ['']
        by_pair = {tuple(e['metrics']): e for e in phase['pairs']}
        for e in (by_pair[pair] for pair in PAIRS if pair in by_pair):
            m1, m2 = (m.upper() for m in e['metrics'])
            lines.append(f'    {m1} vs {m2}:')
            if e['table'] is not None:
                (a, b), (c, d) = e['table']
                lines += [f'        {"":14} {m2 + " dec.":>10} '
                          f'{"not dec.":>10}',
                          f'        {m1 + " dec.":14} {a:>10} {b:>10}',
                          f'        {"not dec.":14} {c:>10} {d:>10}',
                          f"        reducing {m1}: "
                          f"{100. * e['fraction1']:.0f}%, {m2}: "
                          f"{100. * e['fraction2']:.0f}%, both: "
                          f"{100. * e['fraction_both']:.0f}%"]
            if e['chi2'] is not None:
                decision = 'independent' if e['independent'] \
                    else 'dependent'
                lines.append(f"        chi2 = {e['chi2']:.5g} "
                             f"(critical {e['critical']:.5g}), "
                             f"p = {e['p_value']:.4g}: {decision}")
            if e['note']:
                lines.append(f"        {e['note']}")
        lines.append('')

    lines.append('variance of ACF across movements [N^2]')
    for r in summary['acf_variance']:
        lines.append(f"    {r['subject']:12} {r['phase']:9} n = "
                     f"{r['n']:>4}  {_fmt(r['acf_variance'])}")
    lines.append('')
    return '\n'.join(lines)


def write_results(result: AnalysisResult, 
                  out: Union[str, Path]) -> List[Path]:
    """
    Writes metrics table, per-subject summaries, summary, report and 
    plot data to directory 'out'

    Returns:
        paths of the written files
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    f = out / 'metrics.csv'
    result.table.to_csv(f, index=False, float_format='%.10g')
    files.append(f)
    for p, frame in result.summaries.items():
        f = out / f'subjects_{p}.csv'
        frame.to_csv(f, float_format='%.10g')
        files.append(f)
    f = out / 'summary.json'
    f.write_text(json.dumps(result.summary, indent=2, sort_keys=True) + 
                 '\n')
    files.append(f)
    f = out / 'report.txt'
    f.write_text(render_report(result.summary))
    files.append(f)
    files += write_plot_data(result.plot_data, out / 'plot')
    return files


class Report(Base):
    """
    Renders the text report of a saved summary and optionally draws the
    plot data files next to it

    Example:
        text = Report()(summary='out/summary.json', plot=True)
    """

    def __init__(self, identifier: str = 'Report') -> None:
        super().__init__(identifier)
        self.summary_file: Optional[Path] = None
        self.summary: Dict[str, Any] = {}
        self.plot: bool = False
        self.images: List[Path] = []

    def pre(self, **kwargs: Any) -> bool:
        """
        Kwargs:
            summary (str or Path):
                summary file written by write_results()

            plot (bool):
                if True, then render the files in the sibling 'plot' 
                directory with matplotlib
        """
        self.summary_file = Path(kwargs['summary'])
        self.plot = bool(kwargs.get('plot', False))

        # load() reads the summary file
        return super().pre(**kwargs)

    def load(self) -> bool:
        if self.summary_file is None:
            return False
        try:
            with open(self.summary_file) as f:
                self.summary = json.load(f)
        except OSError as e:
            raise ConfigError([f'{self.summary_file}: {e.strerror}'])
        except json.JSONDecodeError as e:
            raise ConfigError([f'{self.summary_file}:{e.lineno}: {e.msg}'])
        if self.summary.get('format') != SUMMARY_FORMAT:
            raise ConfigError([f'{self.summary_file}: not a summary of '
                               f'format {SUMMARY_FORMAT}'])
        return True

    def task(self, **kwargs: Any) -> str:
        """
        Returns:
            report text, also written to 'report.txt' next to the 
            summary file
        """
        super().task(**kwargs)

        text = render_report(self.summary)
        (self.summary_file.parent / 'report.txt').write_text(text)
        if self.plot:
            files = sorted((self.summary_file.parent / 'plot').glob('*.csv'))
            self.images = render_plots(files)
        return text

    def post(self, **kwargs: Any) -> bool:
        ok = super().post(**kwargs)

        if self.images:
            self.write(f'    images: {len(self.images)}')
        return ok
