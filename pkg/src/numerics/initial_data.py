# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Lattice, spectral profiles, Gaussian-truncated initial data, coarse-grained observables and regime checks

PRINT_PREFIX = "INITIAL DATA"

# Standard library imports
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

# Third-party imports
import numpy as np

# Local imports
from config.vars import AR_STRICTNESS
from src.numerics import gaussian_core as gc
from src.numerics.errors import DomainError
from src.utils.utils import compensated_sum, loglog_slope


# ---------------------------------------------------------------------------
# Lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeSpec:
    """Sites Z_L^2 ∩ {|K| <= B}, K = n / L with integer n."""
    L: float
    B: float

    def __post_init__(self):
        if self.L <= 0 or self.B <= 0:
            raise DomainError(f"lattice needs L > 0 and B > 0, got L={self.L}, B={self.B}")

    @cached_property
    def integer_sites(self) -> np.ndarray:
        """(M, 2) integer coordinates, lexicographically sorted."""
        return integer_disc(self.B * self.L)

    @property
    def sites(self) -> np.ndarray:
        return self.integer_sites / self.L

    @property
    def count(self) -> int:
        return int(self.integer_sites.shape[0])

    def to_integer(self, K: Sequence[float]) -> tuple[int, int]:
        """Integer coordinates of a site; raises when K is not on Z_L^2."""
        n = np.asarray(K, dtype=float) * self.L
        rounded = np.rint(n)
        if np.max(np.abs(n - rounded)) > 1e-9:
            raise DomainError(f"{tuple(K)} is not a lattice site of Z_L^2 with L={self.L}")
        return int(rounded[0]), int(rounded[1])


def integer_disc(radius: float) -> np.ndarray:
    """Integer points n with |n| <= radius, sorted lexicographically."""
    bound = int(math.floor(radius + 1e-9))
    axis = np.arange(-bound, bound + 1)
    n1, n2 = np.meshgrid(axis, axis, indexing="ij")
    keep = n1 * n1 + n2 * n2 <= radius * radius + 1e-9
    return np.stack([n1[keep], n2[keep]], axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """
    Envelope eta on R^2 plus metadata.

    radius is the support radius for compact profiles; for non-compact ones (flat,
    rayleigh_jeans) it is the truncation radius used by lattice windows and quadrature boxes.
    """
    name: str
    eta: Callable[[np.ndarray, np.ndarray], np.ndarray]
    radius: float
    sup_norm: float
    compact: bool = True
    params: dict = field(default_factory=dict)

    def __call__(self, kx, ky) -> np.ndarray:
        kx = np.asarray(kx, dtype=float)
        ky = np.asarray(ky, dtype=float)
        return np.asarray(self.eta(kx, ky), dtype=complex) * np.ones(np.broadcast(kx, ky).shape)

    def spectrum(self, kx, ky) -> np.ndarray:
        """n(k) = |eta(k)|^2."""
        return np.abs(self(kx, ky)) ** 2

    def on_sites(self, lat: LatticeSpec) -> np.ndarray:
        sites = lat.sites
        return self(sites[:, 0], sites[:, 1])

    def describe(self) -> dict:
        return {"name": self.name, "radius": self.radius, "params": dict(self.params)}


PROFILE_LIBRARY: dict[str, Callable[..., SpectralProfile]] = {}


def register_profile(name: str) -> Callable:
    def decorator(func: Callable[..., SpectralProfile]) -> Callable[..., SpectralProfile]:
        PROFILE_LIBRARY[name] = func
        return func
    return decorator


def make_profile(name: str, **params) -> SpectralProfile:
    """
    Build a named profile.

    Args:
        name: One of PROFILE_LIBRARY
        params: Profile parameters

    Returns:
        SpectralProfile
    """
    if name not in PROFILE_LIBRARY:
        raise DomainError(f"unknown profile '{name}', known: {', '.join(sorted(PROFILE_LIBRARY))}")
    return PROFILE_LIBRARY[name](**params)


def smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def _bump(rho: np.ndarray) -> np.ndarray:
    inside = rho < 1.0
    safe = np.where(inside, 1.0 - rho * rho, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)


@register_profile("bump")
def bump_profile(radius: float = 1.0, center: Sequence[float] = (0.0, 0.0), amplitude: float = 1.0) -> SpectralProfile:
    c = (float(center[0]), float(center[1]))

    def eta(kx, ky):
        rho = np.hypot(kx - c[0], ky - c[1]) / radius
        return amplitude * _bump(rho)

    return SpectralProfile("bump", eta, radius + math.hypot(*c), abs(amplitude), True,
                           {"radius": radius, "center": list(c), "amplitude": amplitude})


@register_profile("shifted_bump")
def shifted_bump_profile(radius: float = 1.0, shift: Sequence[float] = (0.3, 0.1)) -> SpectralProfile:
    """Bump off the origin, tilted by a linear factor; no rotational symmetry about 0."""
    base = bump_profile(radius=radius, center=shift)

    def eta(kx, ky):
        return base.eta(kx, ky) * (1.0 + 0.5 * (kx - shift[0]) / radius)

    return SpectralProfile("shifted_bump", eta, base.radius, 1.5, True,
                           {"radius": radius, "shift": [float(shift[0]), float(shift[1])]})


@register_profile("truncated_gaussian")
def truncated_gaussian_profile(width: float = 0.4, radius: float = 1.0) -> SpectralProfile:
    def eta(kx, ky):
        rho = np.hypot(kx, ky) / radius
        return np.exp(-(kx * kx + ky * ky) / (2.0 * width * width)) * (1.0 - smooth_step(2.0 * rho - 1.0))

    return SpectralProfile("truncated_gaussian", eta, radius, 1.0, True, {"width": width, "radius": radius})


@register_profile("mollified_disc")
def mollified_disc_profile(radius: float = 1.0, edge: float = 0.2) -> SpectralProfile:
    if not 0 < edge <= radius:
        raise DomainError("mollified_disc needs 0 < edge <= radius")

    def eta(kx, ky):
        r = np.hypot(kx, ky)
        return 1.0 - smooth_step((r - (radius - edge)) / edge)

    return SpectralProfile("mollified_disc", eta, radius, 1.0, True, {"radius": radius, "edge": edge})


@register_profile("flat")
def flat_profile(radius: float = 1.0, value: float = 1.0) -> SpectralProfile:
    """eta = value everywhere; radius only bounds lattice windows and quadrature boxes."""
    def eta(kx, ky):
        return np.full(np.broadcast(kx, ky).shape, value, dtype=complex)

    return SpectralProfile("flat", eta, radius, abs(value), False, {"radius": radius, "value": value})


@register_profile("single_mode")
def single_mode_profile(k: Sequence[float] = (0.0, 0.0), amplitude: complex = 1.0) -> SpectralProfile:
    k0 = (float(k[0]), float(k[1]))

    def eta(kx, ky):
        hit = (np.abs(kx - k0[0]) < 1e-9) & (np.abs(ky - k0[1]) < 1e-9)
        return np.where(hit, amplitude, 0.0)

    return SpectralProfile("single_mode", eta, math.hypot(*k0) + 1e-9, abs(amplitude), True,
                           {"k": list(k0), "amplitude": amplitude})


@register_profile("rayleigh_jeans")
def rayleigh_jeans_profile(a: float = 1.0, b: float = 1.0, radius: float = 2.0) -> SpectralProfile:
    """n = 1/(a + b|k|^2), a stationary state of the collision bracket; not compactly supported."""
    if a <= 0 or b < 0:
        raise DomainError("rayleigh_jeans needs a > 0 and b >= 0")

    def eta(kx, ky):
        return 1.0 / np.sqrt(a + b * (kx * kx + ky * ky))

    return SpectralProfile("rayleigh_jeans", eta, radius, 1.0 / math.sqrt(a), False, {"a": a, "b": b, "radius": radius})


# ---------------------------------------------------------------------------
# Phases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseEnsemble:
    """
    I.i.d. uniform phases per realization.

    Realization r draws from SeedSequence([seed, r]) in the lattice's site order, so any
    realization can be regenerated on its own and in parallel.
    """
    seed: int
    count: int = 1

    def phases(self, index: int, n_sites: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence([int(self.seed), int(index)]))
        return rng.uniform(0.0, 2.0 * np.pi, size=n_sites)

    def batch(self, start: int, stop: int, n_sites: int) -> np.ndarray:
        return np.stack([self.phases(i, n_sites) for i in range(start, stop)]) if stop > start else np.zeros((0, n_sites))

    def outer_phases(self, index: int, n_points: int) -> np.ndarray:
        """Phases for grid points beyond the lattice disc, from a stream independent of the site phases."""
        rng = np.random.default_rng(np.random.SeedSequence([int(self.seed), int(index), 1]))
        return rng.uniform(0.0, 2.0 * np.pi, size=n_points)


PhaseInput = Union[None, PhaseEnsemble, np.ndarray]


def site_values(lat: LatticeSpec, prof: SpectralProfile, phases: PhaseInput = None, realization: int = 0) -> np.ndarray:
    """zeta_K = eta_K exp(i theta_K) on the lattice sites."""
    eta = prof.on_sites(lat)
    if phases is None:
        return eta
    theta = phases.phases(realization, lat.count) if isinstance(phases, PhaseEnsemble) else np.asarray(phases, dtype=float)
    if theta.shape != eta.shape:
        raise DomainError(f"expected {eta.shape[0]} phases, got {theta.shape}")
    return eta * np.exp(1j * theta)


# ---------------------------------------------------------------------------
# Initial data and observables
# ---------------------------------------------------------------------------

def build_phi(lat: LatticeSpec, prof: SpectralProfile, h: float, phases: PhaseInput = None,
              realization: int = 0) -> gc.WavePacketSum:
    """
    phi = sum_K eta_K e^{i theta_K} g_{K,h}, keeping only sites with eta_K != 0.

    Args:
        lat: Lattice
        prof: Envelope eta
        h: Truncation width
        phases: PhaseEnsemble (uses realization) or explicit phase array, None for theta = 0
        realization: Realization index when phases is an ensemble

    Returns:
        WavePacketSum
    """
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    values = site_values(lat, prof, phases, realization)
    sites = lat.sites
    terms = []
    for K, value in zip(sites, values):
        if value == 0:
            continue
        block = gc.ComplexGaussian.building_block(K, h)
        terms.append(gc.scale(block, complex(value)))
    print(f"[DEBUG] [{PRINT_PREFIX}] build_phi: {len(terms)} terms of {lat.count} sites (L={lat.L}, B={lat.B}, h={h})")
    return gc.WavePacketSum(tuple(terms))


def coarse_grain(v: gc.WavePacketSum, K: Sequence[float], sigma: float) -> complex:
    """
    <v>_{K,sigma} = int exp(-|k-K|^2/(2 sigma^2)) v_hat(k) dk, evaluated as
    (2pi)^3 sigma^2 int conj(g_{K,sigma}) v dx term by term.
    """
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    window = gc.ComplexGaussian.building_block(K, sigma)
    prefactor = (2.0 * np.pi) ** 3 * sigma * sigma
    values = (complex(gc.integrate_plane(gc.product([window, f], [True, False]))) for f in v.terms)
    return prefactor * compensated_sum(values)


def coarse_grain_closed_form(lat: LatticeSpec, prof: SpectralProfile, h: float, sigma: float, K: Sequence[float],
                             phases: PhaseInput = None, realization: int = 0) -> complex:
    """sum_{K1} zeta_{K1} (sigma^2/(sigma^2+h^2)) exp(-|K-K1|^2/(2(sigma^2+h^2)))."""
    values = site_values(lat, prof, phases, realization)
    sites = lat.sites
    width = sigma * sigma + h * h
    dist2 = (sites[:, 0] - K[0]) ** 2 + (sites[:, 1] - K[1]) ** 2
    terms = values * (sigma * sigma / width) * np.exp(-dist2 / (2.0 * width))
    order = np.argsort(dist2, kind="stable")
    return compensated_sum(terms[order])


def sup_growth(L_values: Sequence[float], prof: SpectralProfile, grid_n: int = 48) -> tuple[float, list[float]]:
    """
    Sampled sup of F_L(x) = sum_K eta_K e^{iK.x} over one period cell, for several L.

    Returns:
        (fitted growth exponent, sups)
    """
    sups = []
    for L in L_values:
        lat = LatticeSpec(L, prof.radius)
        values = prof.on_sites(lat)
        sites = lat.sites
        axis = 2.0 * np.pi * L * np.arange(grid_n) / grid_n
        x, y = np.meshgrid(axis, axis, indexing="ij")
        field_values = np.zeros(x.shape, dtype=complex)
        for K, value in zip(sites, values):
            if value != 0:
                field_values += value * np.exp(1j * (K[0] * x + K[1] * y))
        sups.append(float(np.max(np.abs(field_values))))
    slope, _ = loglog_slope(L_values, sups)
    return slope, sups


# ---------------------------------------------------------------------------
# Regime
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingParams:
    h: float
    L: float
    sigma: float
    eps: Optional[float] = None
    delta0: float = 0.2
    strictness: float = AR_STRICTNESS
    exponents: Optional[dict] = None  # {"alpha": ..., "beta": ...} when built from exponents

    def __post_init__(self):
        for name in ("h", "L", "sigma", "delta0", "strictness"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.eps is not None and self.eps <= 0:
            raise DomainError(f"eps must be positive, got {self.eps}")

    @classmethod
    def from_exponents(cls, L: float, alpha: float, beta: float, delta0: float = 0.2,
                       eps: Optional[float] = None, strictness: float = AR_STRICTNESS) -> "ScalingParams":
        """h = L^-(4+alpha), sigma = L^beta / L^(3+alpha)."""
        return cls(h=L ** -(4.0 + alpha), L=L, sigma=L ** beta / L ** (3.0 + alpha), eps=eps, delta0=delta0,
                   strictness=strictness, exponents={"alpha": alpha, "beta": beta})

    @property
    def ar_margins(self) -> dict:
        margins = {
            "h L^(4+delta0) <= 1": self.h * self.L ** (4.0 + self.delta0),
            "h L << sigma": self.h * self.L / self.sigma,
            "sigma <= h^(3/4)": self.sigma / self.h ** 0.75,
        }
        if self.eps is not None:
            margins["eps << h^2/L"] = self.eps * self.L / (self.h * self.h)
        return margins

    @property
    def time_guard(self) -> float:
        """Validity horizon 1/(sigma^2 L^2) of the first-order kernel estimates."""
        return 1.0 / (self.sigma * self.sigma * self.L * self.L)


@dataclass
class RegimeReport:
    margins: dict
    passed: bool
    violations: list
    mode: str
    delta: float
    windows: dict
    time_guard: float

    def as_dict(self) -> dict:
        return {"margins": self.margins, "passed": self.passed, "violations": self.violations, "mode": self.mode,
                "delta": self.delta, "windows": self.windows, "time_guard": self.time_guard}


def validate_regime(p: ScalingParams, delta: Optional[float] = None) -> RegimeReport:
    """
    Check regime (AR) and report the admissible time windows.

    Margins are always evaluated numerically. The "<<" conditions are compared to p.strictness,
    except for parameters built from exponents, where hL/sigma = L^-beta is checked as an
    asymptotic statement (beta > 0) and the other conditions through their exponents.

    Returns:
        RegimeReport (report only, never raises)
    """
    delta = p.delta0 / 2.0 if delta is None else delta
    margins = p.ar_margins
    violations = []
    if p.exponents is not None:
        alpha, beta = p.exponents["alpha"], p.exponents["beta"]
        mode = "asymptotic"
        if not p.delta0 <= alpha:
            violations.append("h L^(4+delta0) <= 1")
        if not beta > 0:
            violations.append("h L << sigma")
        if not 4.0 * beta <= alpha:
            violations.append("sigma <= h^(3/4)")
    else:
        mode = "numeric"
        if margins["h L^(4+delta0) <= 1"] > 1.0:
            violations.append("h L^(4+delta0) <= 1")
        if margins["h L << sigma"] > p.strictness:
            violations.append("h L << sigma")
        if margins["sigma <= h^(3/4)"] > 1.0:
            violations.append("sigma <= h^(3/4)")
    if "eps << h^2/L" in margins and margins["eps << h^2/L"] > p.strictness:
        violations.append("eps << h^2/L")

    windows = {
        "window1": [p.L ** delta, p.L ** (1.0 - delta)],
        "window2": [p.L ** (2.0 + delta), 1.0 / (p.h * p.L ** delta)],
    }
    report = RegimeReport(margins, not violations, violations, mode, delta, windows, p.time_guard)
    level = "INFO" if report.passed else "WARNING"
    print(f"[{level}] [{PRINT_PREFIX}] regime ({mode}): {'pass' if report.passed else 'fail: ' + ', '.join(violations)}")
    return report
