# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Exact calculus on finite sums of complex Gaussians x -> c exp(-z|x|^2 + xi.x) in the plane

"""
Closed-form Fourier transform, free Schroedinger propagation, products, plane integrals and
norms for complex Gaussians.

Conventions:
    f_hat(k) = int f(x) exp(-i k.x) dx,   f(x) = (2pi)^-2 int f_hat(k) exp(i k.x) dk
    (e^{it Laplacian} f)_hat(k) = exp(-i t |k|^2) f_hat(k)

Amplitudes are stored as complex logarithms (log|c| + i arg c) so that prefactors like h^-2
with tiny h never overflow. Every field may also be a numpy array; all operations broadcast,
which lets callers evaluate a whole time grid of Gaussians at once.
"""

PRINT_PREFIX = "GAUSSIAN CORE"

# Standard library imports
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

# Third-party imports
import numpy as np

# Local imports
from config.vars import TERM_CAP
from src.numerics.errors import BudgetExceeded, DomainError
from src.utils.utils import compensated_sum

Scalar = Union[complex, np.ndarray]

LOG_TWO_PI = math.log(2.0 * math.pi)


def _dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    return u[0] * v[0] + u[1] * v[1]


def _check_quad(z: Scalar, what: str) -> None:
    if not np.all(np.real(z) > 0):
        raise DomainError(f"{what}: Re(z) must be > 0, got min Re(z) = {np.min(np.real(z))!r}")


@dataclass(frozen=True, eq=False)
class ComplexGaussian:
    """c * exp(-z|x|^2 + xi.x) with c = exp(log_c)."""
    log_c: Scalar
    z: Scalar
    xi: tuple  # (xi_1, xi_2)

    @classmethod
    def from_amplitude(cls, c: complex, z: complex, xi: Sequence[complex] = (0j, 0j)) -> "ComplexGaussian":
        if c == 0:
            return cls(complex(-np.inf, 0.0), complex(z), (complex(xi[0]), complex(xi[1])))
        return cls(complex(np.log(complex(c))), complex(z), (complex(xi[0]), complex(xi[1])))

    @classmethod
    def building_block(cls, K: Sequence[float], eps: float) -> "ComplexGaussian":
        """g_{K,eps}(x) = (2pi)^-2 exp(iK.x) exp(-eps^2 |x|^2 / 2)."""
        if eps <= 0:
            raise DomainError(f"building block width must be positive, got {eps}")
        return cls(complex(-2.0 * LOG_TWO_PI, 0.0), complex(0.5 * eps * eps), (1j * float(K[0]), 1j * float(K[1])))

    @property
    def amplitude(self) -> Scalar:
        return np.exp(self.log_c)

    def with_log_c(self, log_c: Scalar) -> "ComplexGaussian":
        return ComplexGaussian(log_c, self.z, self.xi)

    def allclose(self, other: "ComplexGaussian", rtol: float = 1e-12) -> bool:
        """Coefficient-wise comparison (amplitudes compared as values, not logs)."""
        return bool(
            np.allclose(self.amplitude, other.amplitude, rtol=rtol, atol=0.0)
            and np.allclose(self.z, other.z, rtol=rtol, atol=0.0)
            and np.allclose(np.asarray(self.xi, dtype=complex), np.asarray(other.xi, dtype=complex), rtol=rtol, atol=rtol)
        )


def conjugate(f: ComplexGaussian) -> ComplexGaussian:
    return ComplexGaussian(np.conj(f.log_c), np.conj(f.z), (np.conj(f.xi[0]), np.conj(f.xi[1])))


def scale(f: ComplexGaussian, alpha: complex) -> ComplexGaussian:
    if alpha == 0:
        return f.with_log_c(complex(-np.inf, 0.0))
    return f.with_log_c(f.log_c + np.log(complex(alpha)))


def fourier_transform(f: ComplexGaussian) -> ComplexGaussian:
    """
    Closed-form transform k -> (pi/z) c exp(-|k|^2/(4z) - i xi.k/(2z) + xi.xi/(4z)).

    Raises:
        DomainError: Re(z) <= 0
    """
    _check_quad(f.z, "fourier_transform")
    z = f.z
    log_c = f.log_c + np.log(np.pi / z) + _dot(f.xi, f.xi) / (4.0 * z)
    xi = (-1j * f.xi[0] / (2.0 * z), -1j * f.xi[1] / (2.0 * z))
    return ComplexGaussian(log_c, 1.0 / (4.0 * z), xi)


def inverse_fourier_transform(g: ComplexGaussian) -> ComplexGaussian:
    """(2pi)^-2 int g(k) exp(ik.x) dk, the inverse of fourier_transform."""
    _check_quad(g.z, "inverse_fourier_transform")
    z = g.z
    log_c = g.log_c + np.log(np.pi / z) + _dot(g.xi, g.xi) / (4.0 * z) - 2.0 * LOG_TWO_PI
    xi = (1j * g.xi[0] / (2.0 * z), 1j * g.xi[1] / (2.0 * z))
    return ComplexGaussian(log_c, 1.0 / (4.0 * z), xi)


def propagate(f: ComplexGaussian, t: Scalar) -> ComplexGaussian:
    """
    Free propagator e^{it Laplacian} in d=2.

    Args:
        f: Gaussian with Re z > 0
        t: real time (scalar or array, broadcast against the coefficients)

    Returns:
        (c/(1+4izt)) exp(-(z/(1+4izt))|x|^2 + x.xi/(1+4izt) + it xi.xi/(1+4izt))
    """
    _check_quad(f.z, "propagate")
    denom = 1.0 + 4j * f.z * t
    log_c = f.log_c - np.log(denom) + 1j * t * _dot(f.xi, f.xi) / denom
    return ComplexGaussian(log_c, f.z / denom, (f.xi[0] / denom, f.xi[1] / denom))


def product(fs: Sequence[ComplexGaussian], conjugate_mask: Sequence[bool]) -> ComplexGaussian:
    """
    Pointwise product, conjugating the factors flagged in conjugate_mask.

    Raises:
        DomainError: empty input, mask mismatch, or a non-integrable result
    """
    if not fs:
        raise DomainError("product needs at least one factor")
    if len(fs) != len(conjugate_mask):
        raise DomainError("conjugate_mask must match the factor list")
    log_c, z, xi1, xi2 = 0j, 0j, 0j, 0j
    for f, conj in zip(fs, conjugate_mask):
        g = conjugate(f) if conj else f
        log_c = log_c + g.log_c
        z = z + g.z
        xi1 = xi1 + g.xi[0]
        xi2 = xi2 + g.xi[1]
    _check_quad(z, "product")
    return ComplexGaussian(log_c, z, (xi1, xi2))


def log_integrate_plane(f: ComplexGaussian) -> Scalar:
    """log of int f dx = log c + log(pi/z) + xi.xi/(4z)."""
    _check_quad(f.z, "integrate_plane")
    return f.log_c + np.log(np.pi / f.z) + _dot(f.xi, f.xi) / (4.0 * f.z)


def integrate_plane(f: ComplexGaussian) -> Scalar:
    """int_{R^2} c exp(-z|x|^2 + xi.x) dx = c (pi/z) exp(xi.xi/(4z))."""
    return np.exp(log_integrate_plane(f))


def evaluate(f: ComplexGaussian, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pointwise values of a scalar-coefficient Gaussian on coordinate arrays."""
    r2 = x * x + y * y
    return np.exp(f.log_c - f.z * r2 + f.xi[0] * x + f.xi[1] * y)


@dataclass(frozen=True, eq=False)
class WavePacketSum:
    """Finite sum of ComplexGaussian terms; the empty sum is zero."""
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.terms) > TERM_CAP:
            raise BudgetExceeded(f"packet has {len(self.terms)} terms, cap is {TERM_CAP}",
                                 coverage=TERM_CAP / len(self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def conj(self) -> "WavePacketSum":
        return WavePacketSum(tuple(conjugate(f) for f in self.terms))

    def scale(self, alpha: complex) -> "WavePacketSum":
        return WavePacketSum(tuple(scale(f, alpha) for f in self.terms))

    def fourier_transform(self) -> "WavePacketSum":
        return WavePacketSum(tuple(fourier_transform(f) for f in self.terms))

    def propagate(self, t: float) -> "WavePacketSum":
        return WavePacketSum(tuple(propagate(f, t) for f in self.terms))

    def product(self, other: "WavePacketSum", conjugate_other: bool = False) -> "WavePacketSum":
        """Term-by-term product; m and n terms give m*n terms."""
        count = len(self.terms) * len(other.terms)
        if count > TERM_CAP:
            raise BudgetExceeded(f"product would have {count} terms, cap is {TERM_CAP}", coverage=TERM_CAP / count)
        return WavePacketSum(tuple(product([f, g], [False, conjugate_other]) for f in self.terms for g in other.terms))

    def integrate_plane(self) -> complex:
        return compensated_sum(complex(integrate_plane(f)) for f in self.terms)

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for f in self.terms:
            out += evaluate(f, x, y)
        return out


def _stack(packet: WavePacketSum) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    log_c = np.array([complex(f.log_c) for f in packet.terms])
    z = np.array([complex(f.z) for f in packet.terms])
    xi1 = np.array([complex(f.xi[0]) for f in packet.terms])
    xi2 = np.array([complex(f.xi[1]) for f in packet.terms])
    return log_c, z, xi1, xi2


def norms(f: Union[WavePacketSum, ComplexGaussian]) -> tuple[float, float]:
    """
    Exact L2 and Sigma norms of a packet sum.

    ||f||_Sigma^2 = ||f||^2 + ||grad f||^2 + || |x| f ||^2, each assembled from pairwise
    Gaussian moment integrals: for p = exp(L - Z|x|^2 + X.x),
        int p = I0,  int x_d p = I0 m_d,  int x_d^2 p = I0 (1/(2Z) + m_d^2),  m = X/(2Z).

    Returns:
        (l2, sigma)
    """
    if isinstance(f, ComplexGaussian):
        f = WavePacketSum((f,))
    if len(f) == 0:
        return 0.0, 0.0
    log_c, z, xi1, xi2 = _stack(f)
    finite = np.isfinite(log_c.real)
    log_c, z, xi1, xi2 = log_c[finite], z[finite], xi1[finite], xi2[finite]
    if log_c.size == 0:
        return 0.0, 0.0

    # pair (i, j) integrand: conj(f_i) f_j
    L = np.conj(log_c)[:, None] + log_c[None, :]
    Z = np.conj(z)[:, None] + z[None, :]
    X = (np.conj(xi1)[:, None] + xi1[None, :], np.conj(xi2)[:, None] + xi2[None, :])
    _check_quad(Z, "norms")
    I0 = np.exp(L + np.log(np.pi / Z) + (X[0] ** 2 + X[1] ** 2) / (4.0 * Z))
    mean = (X[0] / (2.0 * Z), X[1] / (2.0 * Z))
    second = (I0 * (0.5 / Z + mean[0] ** 2), I0 * (0.5 / Z + mean[1] ** 2))
    first = (I0 * mean[0], I0 * mean[1])

    zi = np.conj(z)[:, None]
    zj = z[None, :]
    xis_i = (np.conj(xi1)[:, None], np.conj(xi2)[:, None])
    xis_j = (xi1[None, :], xi2[None, :])

    grad = 0j
    for d in range(2):
        # grad f_j = (-2 z_j x + xi_j) f_j
        grad = grad + (4.0 * zi * zj * second[d] - 2.0 * zi * xis_j[d] * first[d]
                       - 2.0 * zj * xis_i[d] * first[d] + xis_i[d] * xis_j[d] * I0)

    l2_sq = compensated_sum(I0.ravel()).real
    grad_sq = compensated_sum(grad.ravel()).real
    moment_sq = compensated_sum((second[0] + second[1]).ravel()).real
    l2_sq = max(l2_sq, 0.0)
    sigma_sq = max(l2_sq + grad_sq + moment_sq, 0.0)
    return math.sqrt(l2_sq), math.sqrt(sigma_sq)
