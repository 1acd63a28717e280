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
      2024-06-04
"""

__all__ = ['n_workers', 'split', 'merge', 'map_parallel']

from concurrent.futures import ProcessPoolExecutor
import psutil
from typing import Any, Callable, List, Optional, Sequence


"""
    Tools for splitting and merging task lists, and execution of 
    independent tasks (subjects, trial logs) on multiple cores

    Results are always returned in the order of the input, independent 
    of the number of workers
"""


def n_workers(requested: int = 0, n_task: Optional[int] = None) -> int:
    """
    Args:
        requested:
            number of worker processes, 0 for the number of physical 
            cores

        n_task:
            number of tasks, limits the number of workers

    Returns:
        number of worker processes, at least 1
    """
    n = requested if requested > 0 else \
        (psutil.cpu_count(logical=False) or 1)
    if n_task is not None:
        n = min(n, max(n_task, 1))
    return max(n, 1)


def split(items: Sequence[Any], n_proc: int) -> List[List[Any]]:
    """
    - Fills up the item list with None to a multiple of n_proc
    - Splits the list into n_proc contiguous groups

    Args:
        items:
            sequence of tasks

        n_proc:
            number of groups

    Returns:
        list of n_proc lists of equal length
    """
    items = list(items)
    n_proc = max(int(n_proc), 1)
    n_per_proc = -(-len(items) // n_proc)
    items += [None] * (n_per_proc * n_proc - len(items))
    return [items[i * n_per_proc:(i + 1) * n_per_proc] 
            for i in range(n_proc)]


def merge(groups: Sequence[Sequence[Any]]) -> List[Any]:
    """
    Merges the groups of split() to a single list, fill-up values are 
    excluded

    Args:
        groups:
            sequence of lists

    Returns:
        merged list in group order
    """
    return [x for group in groups for x in group if x is not None]


def _run_group(f: Callable[[Any], Any], group: List[Any]) -> List[Any]:
    return [f(x) if x is not None else None for x in group]


def map_parallel(f: Callable[[Any], Any], items: Sequence[Any], 
                 workers: int = 0) -> List[Any]:
    """
    Applies f to every item, on multiple processes if more than one 
    worker is available

    Args:
        f:
            picklable module-level function of one argument, must not
            return None

        items:
            task arguments, None is not a valid item

        workers:
            number of processes, 0 for the number of physical cores

    Returns:
        f(item) for every item, in the order of items
    """
    items = list(items)
    n = n_workers(workers, len(items))
    if n == 1 or len(items) < 2:
        return [f(x) for x in items]

    groups = split(items, n)
    with ProcessPoolExecutor(max_workers=n) as executor:
        futures = [executor.submit(_run_group, f, g) for g in groups]
        results = [future.result() for future in futures]

    return merge(results)
