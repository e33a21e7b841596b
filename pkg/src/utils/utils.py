# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Helper functions shared by the numerical modules

PRINT_PREFIX = "UTILS"

# Standard library imports
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Optional, Sequence

# Third-party imports
import numpy as np

# Local imports
from src import shared


def compensated_sum(values: Iterable[complex]) -> complex:
    """
    Order-stable compensated sum of complex values.

    Args:
        values: Terms, already in the order they should be accumulated

    Returns:
        The sum, real and imaginary parts accumulated with math.fsum
    """
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=complex).ravel()
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def defect_order(numerators: np.ndarray) -> np.ndarray:
    """Indices sorting integer levels by |xi| ascending, then by xi."""
    numerators = np.asarray(numerators)
    return np.lexsort((numerators, np.abs(numerators)))


def ordered_map(func: Callable[[Any], Any], items: Sequence[Any], threads: Optional[int] = None) -> list:
    """
    Map func over items with a thread pool, returning results in submission order.

    Args:
        func: Work function
        items: Work items (chunks)
        threads: Worker cap, defaults to the shared cap

    Returns:
        list of results aligned with items
    """
    workers = threads or shared.get_threads()
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, item) for item in items]
        return [future.result() for future in futures]


def chunked(n: int, size: int) -> list[slice]:
    """Split range(n) into contiguous slices of at most size elements."""
    size = max(1, int(size))
    return [slice(start, min(start + size, n)) for start in range(0, n, size)]


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """
    Least-squares fit of log y = slope * log x + intercept.

    Returns:
        (slope, intercept)
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("loglog_slope needs positive data")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope), float(intercept)


def stable_hash(payload: Any) -> str:
    """sha256 of a JSON rendering with sorted keys."""
    text = json.dumps(payload, sort_keys=True, default=repr, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def fmt_float(value: float) -> str:
    """Round-trip exact float text for CSV output."""
    return repr(float(value))
