"""
Thread-pool map used for independent sweeps (ODE k-grids, Marchenko rows).
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from ..models.exceptions import PotentialValidationError

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

THREADS_ENV = 'TEIG_THREADS'

_configured_workers: Optional[int] = None


def configure(max_workers: Optional[int]) -> None:
    """Set the worker cap from the config file; TEIG_THREADS still wins."""
    global _configured_workers
    _configured_workers = max_workers


def worker_count() -> int:
    """Number of threads a sweep may use."""
    raw = os.environ.get(THREADS_ENV)
    if raw is not None and raw.strip():
        try:
            count = int(raw)
        except ValueError:
            raise PotentialValidationError(f"{THREADS_ENV} must be a positive integer, got '{raw}'")
        if count < 1:
            raise PotentialValidationError(f"{THREADS_ENV} must be a positive integer, got '{raw}'")
        return count
    if _configured_workers is not None:
        return max(1, int(_configured_workers))
    return 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """
    Apply fn to every item, preserving input order.

    Args:
        fn: Pure function of one item
        items: Inputs

    Returns:
        List of results in input order
    """
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
