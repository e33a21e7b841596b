# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Quadrature rules: Gauss-Legendre panels, periodic rules, order doubling and scipy wrappers

PRINT_PREFIX = "QUADRATURE"

# Standard library imports
import warnings
from functools import lru_cache
from typing import Callable

# Third-party imports
import numpy as np
from scipy import integrate

# Local imports
from config.vars import QUAD_ATOL, QUAD_RTOL
from src.numerics.errors import ToleranceFailure


@lru_cache(maxsize=64)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def legendre_rule(order: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    nodes, weights = _leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def panel_rule(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with equal panels on [a, b]."""
    edges = np.linspace(a, b, max(1, int(panels)) + 1)
    nodes, weights = _leggauss(order)
    half = 0.5 * np.diff(edges)[:, None]
    x = edges[:-1, None] + half * (nodes[None, :] + 1.0)
    w = half * weights[None, :]
    return x.ravel(), w.ravel()


def periodic_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoidal rule on [0, 2pi), spectrally accurate for smooth periodic integrands."""
    theta = 2.0 * np.pi * np.arange(order) / order
    return theta, np.full(order, 2.0 * np.pi / order)


def refine_until(evaluate: Callable[[int], complex], start: int, max_order: int,
                 rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL, label: str = "quadrature") -> tuple[complex, float, int]:
    """
    Double the rule order until two successive estimates agree.

    Args:
        evaluate: evaluate(order) -> estimate (scalar or array)
        start: First order
        max_order: Largest order tried before giving up
        rtol, atol: Acceptance max(atol, rtol*|Q|)
        label: Name used in the failure message

    Returns:
        (estimate, error estimate, order used)
    """
    order = start
    previous = evaluate(order)
    while True:
        order *= 2
        current = evaluate(order)
        error = float(np.max(np.abs(np.asarray(current) - np.asarray(previous))))
        scale = float(np.max(np.abs(current)))
        if error <= max(atol, rtol * scale):
            print(f"[DEBUG] [{PRINT_PREFIX}] {label} converged at order {order} (err {error:.2e})")
            return current, error, order
        if order * 2 > max_order:
            raise ToleranceFailure(f"{label} did not converge by order {order}", achieved=error / max(scale, 1e-300))
        previous = current


def quad_complex(func: Callable[[float], complex], a: float, b: float,
                 rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL, limit: int = 200, **kwargs) -> complex:
    """
    scipy.integrate.quad on the real and imaginary parts of a complex integrand.

    Extra keyword arguments (weight, wvar, points) are forwarded.
    Raises ToleranceFailure when quad reports a problem.
    """
    parts = []
    for part in (np.real, np.imag):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, error = integrate.quad(lambda x: float(part(func(x))), a, b, epsabs=atol,
                                              epsrel=rtol, limit=limit, **kwargs)
            except integrate.IntegrationWarning as e:
                raise ToleranceFailure(f"quad on [{a}, {b}] failed: {e}")
        parts.append(value)
    return complex(parts[0], parts[1])
