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
      2024-05-29
"""

__all__ = ['PairedSamples', 'WilcoxonResult', 'ContingencyTable2x2', 
           'ChiSquareResult', 'ChangeSigns', 'wilcoxon_signed_rank', 
           'reduction_percent', 'chi_square_2x2', 'change_sign_table',
           'CHI2_CRITICAL', 'ALPHA']

from dataclasses import dataclass
import numpy as np
import pandas as pd
from scipy.stats import chi2, chi2_contingency, norm, rankdata
from typing import Iterable, Optional

try:
    from spherejerk.datatype import Float1D
    from spherejerk.errors import (DegenerateTableError, MissingDataError,
        ParameterRangeError, UndefinedTestError)
except ImportError:
    from datatype import Float1D
    from errors import (DegenerateTableError, MissingDataError, 
        ParameterRangeError, UndefinedTestError)


"""
    Paired signed-rank tests of pre/post changes and 2x2 chi-square 
    tests of the independence of the change signs of two measures
"""

ALPHA = 0.05
CHI2_CRITICAL = float(chi2.ppf(1. - ALPHA, df=1))      # 3.8415
MAX_EXACT = 25
MIN_PAIRS = 5


@dataclass(frozen=True)
class PairedSamples(object):
    """
    Pre and post values of one measure, one pair per subject
    """
    pre: Float1D
    post: Float1D
    metric: str = ''
    phase: str = ''

    def __post_init__(self) -> None:
        pre = np.asarray(self.pre, dtype=float).ravel()
        post = np.asarray(self.post, dtype=float).ravel()
        if pre.shape != post.shape:
            raise ValueError(f'pre and post differ in length: '
                             f'{len(pre)} != {len(post)}')
        if len(pre) < MIN_PAIRS:
            raise ValueError(f'at least {MIN_PAIRS} pairs needed: '
                             f'{len(pre)}')
        if not (np.all(np.isfinite(pre)) and np.all(np.isfinite(post))):
            raise ValueError('non-finite sample')
        object.__setattr__(self, 'pre', pre)
        object.__setattr__(self, 'post', post)

    def __len__(self) -> int:
        return len(self.pre)

    def differences(self) -> Float1D:
        return self.post - self.pre


@dataclass(frozen=True)
class WilcoxonResult(object):
    statistic: float          # min(W+, W-)
    p_value: float            # two-sided
    w_plus: float
    w_minus: float
    n: int                    # pairs with non-zero difference
    n_dropped: int            # pairs with zero difference
    method: str               # 'exact' or 'normal'

    @property
    def significant(self) -> bool:
        return self.p_value < ALPHA


def _exact_lower_tail(ranks: Float1D, w: float) -> float:
    """
    Returns:
        P(W+ <= w) under the null hypothesis of symmetric signs,
        midranks are doubled to integers
    """
    r2 = np.round(2. * ranks).astype(int)
    dist = np.zeros(int(r2.sum()) + 1)
    dist[0] = 1.
    for r in r2:
        shifted = np.zeros_like(dist)
        shifted[r:] = dist[:len(dist) - r]
        dist = dist + shifted
    k = int(np.floor(2. * w + 1e-9))
    return float(dist[:k + 1].sum() / dist.sum())


def wilcoxon_signed_rank(s: PairedSamples, 
                         correction: bool = True) -> WilcoxonResult:
    """
    Two-sided Wilcoxon signed-rank test of post - pre

    Zero differences are dropped, ties get midranks. The null 
    distribution is exact for up to 25 pairs, otherwise the normal 
    approximation with tie correction is used

    Args:
        s:
            paired samples

        correction:
            continuity correction of the normal approximation

    Returns:
        test result

    Raises:
        UndefinedTestError if all differences are zero
    """
    d = s.differences()
    nonzero = d != 0.
    n_dropped = int(np.sum(~nonzero))
    d = d[nonzero]
    n = len(d)
    if n == 0:
        raise UndefinedTestError(f'all {len(s)} differences of '
                                 f"'{s.metric}' are zero")

    ranks = rankdata(np.abs(d))
    w_plus = float(np.sum(ranks[d > 0.]))
    w_minus = float(np.sum(ranks[d < 0.]))
    statistic = min(w_plus, w_minus)

    if n <= MAX_EXACT:
        p = 2. * _exact_lower_tail(ranks, statistic)
        method = 'exact'
    else:
        mean = n * (n + 1) / 4.
        _, counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24. - \
            np.sum(counts**3 - counts) / 48.
        dev = abs(w_plus - mean) - (0.5 if correction else 0.)
        z = max(dev, 0.) / np.sqrt(var) if var > 0. else 0.
        p = 2. * norm.sf(z)
        method = 'normal'

    return WilcoxonResult(statistic=statistic, p_value=float(min(1., p)),
                          w_plus=w_plus, w_minus=w_minus, n=n, 
                          n_dropped=n_dropped, method=method)


def reduction_percent(s: PairedSamples) -> float:
    """
    Returns:
        population average reduction 100 (mean(pre) - mean(post)) / 
        mean(pre), an increase is a negative reduction [%]

    Raises:
        ParameterRangeError if mean(pre) is not positive
    """
    m_pre = float(np.mean(s.pre))
    if not m_pre > 0.:
        raise ParameterRangeError(f"mean pre value of '{s.metric}' is not "
                                  f'positive: {m_pre}')
    return 100. * (m_pre - float(np.mean(s.post))) / m_pre


@dataclass(frozen=True)
class ContingencyTable2x2(object):
    """
    Subjects classified by the decrease of two measures

                          measure 2 decreased   not decreased
        measure 1 decreased        a                 b
        not decreased              c                 d
    """
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError(f'negative count in {self.as_array()}')
        if self.total == 0:
            raise ValueError('empty table')

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def transposed(self) -> 'ContingencyTable2x2':
        return ContingencyTable2x2(self.a, self.c, self.b, self.d)


@dataclass(frozen=True)
class ChiSquareResult(object):
    statistic: float
    p_value: float
    critical: float = CHI2_CRITICAL
    yates: bool = False

    @property
    def independent(self) -> bool:
        return self.statistic < self.critical


def chi_square_2x2(t: ContingencyTable2x2, 
                   yates: bool = False) -> ChiSquareResult:
    """
    Pearson chi-square statistic N (ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d))
    with one degree of freedom

    Args:
        t:
            contingency table

        yates:
            if True, then apply Yates' continuity correction

    Returns:
        statistic, p-value and decision against the 0.05 critical value

    Raises:
        DegenerateTableError if a row or column sum is zero
    """
    table = t.as_array()
    if np.any(table.sum(axis=0) == 0) or np.any(table.sum(axis=1) == 0):
        raise DegenerateTableError(f'zero marginal in table '
                                   f'{table.tolist()}')
    res = chi2_contingency(table, correction=yates)
    statistic = float(res[0])
    return ChiSquareResult(statistic=statistic, 
                           p_value=float(chi2.sf(statistic, df=1)),
                           yates=yates)


@dataclass(frozen=True)
class ChangeSigns(object):
    """
    Contingency table of decreases and the fractions of subjects 
    decreasing measure 1, measure 2 and both
    """
    metric1: str
    metric2: str
    table: ContingencyTable2x2
    fraction1: float
    fraction2: float
    fraction_both: float


def change_sign_table(summary: pd.DataFrame, metric1: str, metric2: str,
                      subjects: Optional[Iterable[str]] = None) \
        -> ChangeSigns:
    """
    Args:
        summary:
            one row per subject (index), columns '<metric>_pre' and
            '<metric>_post'

        metric1, metric2:
            names of the two measures

        subjects:
            subjects which must be present, default: index of summary

    Returns:
        table and fractions, a decrease is post < pre

    Raises:
        MissingDataError listing the subjects without both values of 
        both measures
    """
    columns = [f'{m}_{p}' for m in (metric1, metric2) 
               for p in ('pre', 'post')]
    expected = list(summary.index) if subjects is None else list(subjects)
    missing = [str(s) for s in expected if s not in summary.index]
    present = [s for s in expected if s in summary.index]
    for c in columns:
        if c not in summary.columns:
            raise MissingDataError(f'column {c} missing for subjects', 
                                   [str(s) for s in expected])
    values = summary.loc[present, columns]
    missing += [str(s) for s in values.index[values.isna().any(axis=1)]]
    if missing:
        raise MissingDataError(f'{metric1}/{metric2} values missing', 
                               missing)
    if not present:
        raise MissingDataError('no subjects')

    dec1 = (values[f'{metric1}_post'] < values[f'{metric1}_pre']).to_numpy()
    dec2 = (values[f'{metric2}_post'] < values[f'{metric2}_pre']).to_numpy()
    table = ContingencyTable2x2(int(np.sum(dec1 & dec2)), 
                                int(np.sum(dec1 & ~dec2)),
                                int(np.sum(~dec1 & dec2)), 
                                int(np.sum(~dec1 & ~dec2)))
    n = len(dec1)
    return ChangeSigns(metric1, metric2, table, float(np.sum(dec1)) / n,
                       float(np.sum(dec2)) / n, float(table.a) / n)
