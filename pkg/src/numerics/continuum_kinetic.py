# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Continuum kinetic objects: CR operator, level-set profile, principal-value limit and the WK operator

"""
All trilinear integrals use the frequency triple

    K1 = k + a,   K2 = k + a + b,   K3 = k + b,     Delta omega = 2 a.b

with the conjugate on the K2 slot, so that k = K1 - K2 + K3 as on the lattice.

Level sets {2a.b = xi} are parametrized with a in polar coordinates (r, theta) and
b = (xi / 2r) e + nu e_perp, where e = a/|a|. The microcanonical measure is then 1/2 dr dtheta dnu,
which is regular at a = 0. For xi != 0 the radial variable is integrated in log r.
"""

PRINT_PREFIX = "CONTINUUM"

# Standard library imports
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

# Third-party imports
import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import sici

# Local imports
from config.vars import PV_MAX_SPACING, QUAD_ATOL, QUAD_MAX_ORDER, QUAD_RTOL, QUAD_START_ORDER
from src.datamanager import results_manager
from src.numerics.errors import DomainError, ToleranceFailure
from src.numerics.initial_data import SpectralProfile
from src.utils import quadrature
from src.utils.utils import compensated_sum, loglog_slope, ordered_map

# Gauss-Legendre nodes per panel; rule orders are multiples of it
PANEL_ORDER = 16

# (K1, K2, K3) point arrays of shape (..., 2) -> complex values
TripleIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MicrocanonicalChart:
    """The level set {2 a.b = xi} around base point k."""
    k: tuple
    xi: float

    def points(self, r, theta, nu) -> tuple[np.ndarray, np.ndarray]:
        """(a, b) for chart coordinates, broadcast over the inputs, each of shape (..., 2)."""
        r, theta, nu = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float), np.asarray(nu, float))
        e = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        e_perp = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
        a = r[..., None] * e
        b = (self.xi / (2.0 * r))[..., None] * e + nu[..., None] * e_perp
        return a, b

    def triple(self, r, theta, nu) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        a, b = self.points(r, theta, nu)
        k = np.asarray(self.k, dtype=float)
        return k + a, k + a + b, k + b

    @staticmethod
    def weight(r) -> np.ndarray:
        """Density of the microcanonical measure in (r, theta, nu)."""
        return np.full(np.shape(r), 0.5)

    @staticmethod
    def defect(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return 2.0 * np.sum(a * b, axis=-1)


@dataclass
class KineticProfile:
    """R_hat_K on a symmetric xi grid; times_2pi records the co-area convention used."""
    xi: np.ndarray
    values: np.ndarray
    K: tuple = (0.0, 0.0)
    times_2pi: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.xi.shape != self.values.shape:
            raise DomainError("KineticProfile needs one value per xi node")
        if np.any(np.diff(self.xi) <= 0):
            raise DomainError("xi grid must be strictly increasing")

    @property
    def symmetric(self) -> bool:
        return bool(np.allclose(self.xi, -self.xi[::-1], rtol=0.0, atol=1e-12))

    def reflected(self) -> "KineticProfile":
        """xi -> -xi, i.e. R_hat(-xi) on the same grid."""
        if not self.symmetric:
            raise DomainError("reflection needs a symmetric xi grid")
        return KineticProfile(self.xi.copy(), self.values[::-1].copy(), self.K, self.times_2pi, dict(self.meta))

    def export_csv(self, path: str) -> str:
        rows = ((x, v.real, v.imag) for x, v in zip(self.xi, self.values))
        return results_manager.write_csv(path, ["xi", "re", "im"], rows)


# ---------------------------------------------------------------------------
# Integrands
# ---------------------------------------------------------------------------

def trilinear_integrand(u: SpectralProfile, v: SpectralProfile, w: SpectralProfile) -> TripleIntegrand:
    """
    u(K1) conj(v(K2)) w(K3).

    v is the conjugated argument and sits at K2 = K1 - k + K3 = k + a + b, the middle frequency of
    the triple. With u = v = w this matches placing the conjugate at k + lambda a_perp.
    """
    def integrand(p1, p2, p3):
        return u(p1[..., 0], p1[..., 1]) * np.conj(v(p2[..., 0], p2[..., 1])) * w(p3[..., 0], p3[..., 1])
    return integrand


def bracket_integrand(prof: SpectralProfile, k: Sequence[float]) -> TripleIntegrand:
    """n1 n2 n3 - n n2 n3 + n n1 n3 - n n1 n2 with n = |eta|^2, expanded so no n is divided by."""
    n0 = float(prof.spectrum(k[0], k[1]))

    def integrand(p1, p2, p3):
        n1 = prof.spectrum(p1[..., 0], p1[..., 1])
        n2 = prof.spectrum(p2[..., 0], p2[..., 1])
        n3 = prof.spectrum(p3[..., 0], p3[..., 1])
        return (n1 * n2 * n3 - n0 * n2 * n3 + n0 * n1 * n3 - n0 * n1 * n2) + 0j
    return integrand


def _box_radius(k: Sequence[float], profiles: Sequence[SpectralProfile]) -> float:
    return math.hypot(float(k[0]), float(k[1])) + max(p.radius for p in profiles)


def _support_empty(k: Sequence[float], profiles: Sequence[SpectralProfile]) -> bool:
    """k = K1 - K2 + K3 with all three in the supports is impossible beyond 3 radii."""
    if not all(p.compact for p in profiles):
        return False
    return math.hypot(float(k[0]), float(k[1])) > 3.0 * max(p.radius for p in profiles)


# ---------------------------------------------------------------------------
# Chart quadrature
# ---------------------------------------------------------------------------

def _tensor_sum(integrand: TripleIntegrand, chart: MicrocanonicalChart, r, wr, nu_rule, order: int) -> complex:
    """sum over (r, theta, nu) nodes; nu_rule(r) -> (nodes, weights) per radial node."""
    theta, wt = quadrature.periodic_rule(order)
    nu, wn = nu_rule(r)  # (n_r, n_nu)
    w_rn = (wr[:, None] * wn) * chart.weight(r)[:, None]

    def at_angle(j: int) -> complex:
        p1, p2, p3 = chart.triple(r[:, None], theta[j], nu)
        return compensated_sum((integrand(p1, p2, p3) * w_rn).ravel()) * wt[j]

    return compensated_sum(ordered_map(at_angle, list(range(order))))


def _nu_rule(box: float, order: int) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    nodes, weights = quadrature.panel_rule(-box, box, max(1, order // PANEL_ORDER), PANEL_ORDER)

    def rule(r):
        return np.broadcast_to(nodes, (len(r), len(nodes))), np.broadcast_to(weights, (len(r), len(weights)))
    return rule


def _radial_rule(xi: float, box: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    panels = max(1, order // PANEL_ORDER)
    if xi == 0.0:
        return quadrature.panel_rule(0.0, box, panels, PANEL_ORDER)
    r_min = abs(xi) / (2.0 * box)
    s, ws = quadrature.panel_rule(math.log(r_min), math.log(box), panels, PANEL_ORDER)
    r = np.exp(s)
    return r, ws * r


def chart_integral(integrand: TripleIntegrand, k: Sequence[float], xi: float, box: float,
                   rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL, label: str = "chart") -> complex:
    """
    int over {2a.b = xi} of integrand(K1, K2, K3) dS, on the nu-form chart.

    Args:
        integrand: Triple integrand
        k: Base point
        xi: Level
        box: Bound on |a| and |b| enforced by the integrand supports
        rtol, atol: Order-doubling acceptance

    Returns:
        The integral; 0 when |xi| exceeds 2 box^2
    """
    if abs(xi) >= 2.0 * box * box:
        return 0j
    chart = MicrocanonicalChart((float(k[0]), float(k[1])), float(xi))

    def evaluate(order: int) -> complex:
        r, wr = _radial_rule(chart.xi, box, order)
        return _tensor_sum(integrand, chart, r, wr, _nu_rule(box, order), order)

    value, _, _ = quadrature.refine_until(evaluate, QUAD_START_ORDER, QUAD_MAX_ORDER, rtol, atol, label=f"{label} xi={xi:.4g}")
    return complex(value)


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def cr_operator(u: SpectralProfile, v: SpectralProfile, w: SpectralProfile, k: Sequence[float],
                rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL) -> complex:
    """
    T_k(u, v, w) = 1/2 int_R int_R^2 u(k+a) conj(v(k+a+b)) w(k+b) da dlambda with b = lambda a_perp.
    Only v is conjugated, at the middle frequency k + a + b.

    a is integrated in polar coordinates, where the measure becomes 1/2 r dr dtheta dlambda and
    lambda runs over [-box/r, box/r].

    Raises:
        ToleranceFailure: quadrature did not converge
    """
    profiles = (u, v, w)
    if _support_empty(k, profiles):
        print(f"[DEBUG] [{PRINT_PREFIX}] cr_operator: k={tuple(k)} outside the reachable support")
        return 0j
    box = _box_radius(k, profiles)
    chart = MicrocanonicalChart((float(k[0]), float(k[1])), 0.0)
    integrand = trilinear_integrand(u, v, w)

    def lam_rule(order: int):
        x, wx = quadrature.panel_rule(-1.0, 1.0, max(1, order // PANEL_ORDER), PANEL_ORDER)

        def rule(r):
            span = box / r
            # nu = lambda r, weight 1/2 r dlambda; the chart's 1/2 is applied in _tensor_sum
            return (span[:, None] * x[None, :]) * r[:, None], span[:, None] * wx[None, :] * r[:, None]
        return rule

    def evaluate(order: int) -> complex:
        # one global rule in r, unlike the paneled chart_integral
        r, wr = quadrature.legendre_rule(order, 0.0, box)
        return _tensor_sum(integrand, chart, r, wr, lam_rule(order), order)

    value, err, order = quadrature.refine_until(evaluate, QUAD_START_ORDER, QUAD_MAX_ORDER, rtol, atol, label="cr_operator")
    print(f"[DEBUG] [{PRINT_PREFIX}] cr_operator k={tuple(k)}: {complex(value):.10g} (order {order}, err {err:.1e})")
    return complex(value)


def khat_profile(prof: SpectralProfile, K: Sequence[float], xi_grid: Sequence[float], times_2pi: bool = False,
                 rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL) -> KineticProfile:
    """
    R_hat_K(xi) on a grid: the dS integral of eta(K1) conj(eta(K2)) eta(K3) over each level set.

    Args:
        prof: Profile eta
        K: Base point
        xi_grid: Increasing grid
        times_2pi: Multiply by 2 pi (co-area convention) instead of returning the bare dS integral

    Returns:
        KineticProfile
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    integrand = trilinear_integrand(prof, prof, prof)
    box = _box_radius(K, (prof,))
    empty = _support_empty(K, (prof,))

    def node(xi: float) -> complex:
        if empty:
            return 0j
        return chart_integral(integrand, K, xi, box, rtol, atol, label="khat")

    values = np.array([node(float(x)) for x in xi_grid], dtype=complex)
    if times_2pi:
        values = values * (2.0 * np.pi)
    print(f"[INFO] [{PRINT_PREFIX}] khat_profile: {len(xi_grid)} nodes on [{xi_grid[0]:.4g}, {xi_grid[-1]:.4g}] (K={tuple(K)})")
    return KineticProfile(xi_grid, values, (float(K[0]), float(K[1])), times_2pi,
                          {"profile": prof.describe(), "box": box})


def wk_operator(prof: SpectralProfile, k: Sequence[float], rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL,
                parts: bool = False):
    """
    K_k(n) for n = |eta|^2: the collision bracket integrated over the resonant chart.

    Args:
        prof: Profile eta
        k: Base point
        parts: Also return the four expanded terms

    Returns:
        The real value, or (value, {term: value}) when parts is set
    """
    box = _box_radius(k, (prof,))
    if _support_empty(k, (prof,)):
        total = 0.0
        terms = {"n1n2n3": 0.0, "n n2n3": 0.0, "n n1n3": 0.0, "n n1n2": 0.0}
        return (total, terms) if parts else total
    total = chart_integral(bracket_integrand(prof, k), k, 0.0, box, rtol, atol, label="wk_operator").real
    print(f"[DEBUG] [{PRINT_PREFIX}] wk_operator k={tuple(k)}: {total:.10g}")
    if not parts:
        return total

    n0 = float(prof.spectrum(k[0], k[1]))
    n = prof.spectrum
    shapes = {
        "n1n2n3": lambda p1, p2, p3: n(p1[..., 0], p1[..., 1]) * n(p2[..., 0], p2[..., 1]) * n(p3[..., 0], p3[..., 1]) + 0j,
        "n n2n3": lambda p1, p2, p3: n0 * n(p2[..., 0], p2[..., 1]) * n(p3[..., 0], p3[..., 1]) + 0j,
        "n n1n3": lambda p1, p2, p3: n0 * n(p1[..., 0], p1[..., 1]) * n(p3[..., 0], p3[..., 1]) + 0j,
        "n n1n2": lambda p1, p2, p3: n0 * n(p1[..., 0], p1[..., 1]) * n(p2[..., 0], p2[..., 1]) + 0j,
    }
    terms = {name: chart_integral(f, k, 0.0, box, rtol, atol, label=name).real for name, f in shapes.items()}
    return total, terms


# ---------------------------------------------------------------------------
# Principal value and time signal
# ---------------------------------------------------------------------------

class _ProfileSpline:
    """Cubic spline of a complex profile, zero outside the grid."""

    def __init__(self, profile: KineticProfile):
        self.lo, self.hi = float(profile.xi[0]), float(profile.xi[-1])
        self.re = CubicSpline(profile.xi, profile.values.real)
        self.im = CubicSpline(profile.xi, profile.values.imag)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, self.re(x) + 1j * self.im(x), 0.0)

    def derivative_at(self, x: float) -> complex:
        return complex(self.re(x, 1) + 1j * self.im(x, 1))


@dataclass(frozen=True)
class PVResult:
    t: float
    finite: complex
    limit: complex


def _check_pv_grid(profile: KineticProfile) -> float:
    if not profile.symmetric:
        raise DomainError("pv_limit needs a symmetric xi grid")
    zero = np.flatnonzero(np.abs(profile.xi) < 1e-14)
    if zero.size == 0:
        raise ToleranceFailure("pv_limit needs a node at xi = 0", achieved=float(np.min(np.abs(profile.xi))))
    i0 = int(zero[0])
    spacing = float(max(profile.xi[min(i0 + 1, len(profile.xi) - 1)] - profile.xi[i0],
                        profile.xi[i0] - profile.xi[max(i0 - 1, 0)]))
    if spacing > PV_MAX_SPACING:
        raise ToleranceFailure(f"xi grid too coarse at 0 for the difference quotient (max {PV_MAX_SPACING})", achieved=spacing)
    return float(profile.xi[-1])


def pv_limit(profile: KineticProfile, t: float, rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL) -> PVResult:
    """
    int (1 - e^{-it xi})/(i xi) R_hat(xi) dxi and its t -> infinity limit
    pi R_hat(0) + int (R_hat(xi) - R_hat(0))/(i xi) dxi.

    R_hat is split into even and odd parts E and O on [0, A]:
        finite = 2 E(0) Si(tA) + 2 int_0^A (E - E(0))/xi sin(t xi) - 2i int_0^A O/xi (1 - cos(t xi))
        limit  = pi E(0) - 2i int_0^A O/xi
    The oscillatory pieces use QUADPACK's weighted rules.

    Raises:
        ToleranceFailure: no node at 0, grid too coarse near 0, or quad failure
    """
    A = _check_pv_grid(profile)
    spline = _ProfileSpline(profile)
    e0 = complex(spline(0.0))
    o_slope = spline.derivative_at(0.0)

    def even_quotient(x):
        if abs(x) < 1e-12:
            return 0j
        return (0.5 * (spline(x) + spline(-x)) - e0) / x

    def odd_quotient(x):
        if abs(x) < 1e-12:
            return o_slope
        return 0.5 * (spline(x) - spline(-x)) / x

    odd_total = quadrature.quad_complex(odd_quotient, 0.0, A, rtol, atol)
    limit = np.pi * e0 - 2j * odd_total
    if t == 0:
        return PVResult(0.0, 0j, complex(limit))
    si, _ = sici(t * A)
    even_osc = quadrature.quad_complex(even_quotient, 0.0, A, rtol, atol, weight="sin", wvar=t)
    odd_osc = quadrature.quad_complex(odd_quotient, 0.0, A, rtol, atol, weight="cos", wvar=t)
    finite = 2.0 * e0 * si + 2.0 * even_osc - 2j * (odd_total - odd_osc)
    print(f"[DEBUG] [{PRINT_PREFIX}] pv_limit t={t}: finite {complex(finite):.8g}, limit {complex(limit):.8g}")
    return PVResult(float(t), complex(finite), complex(limit))


def quasi_resonant_integral(profile: KineticProfile, t: float) -> complex:
    """int (1 - e^{-it xi})/(i xi) R_hat(xi) dxi at finite t."""
    return pv_limit(profile, t).finite


def time_signal(profile: KineticProfile, times: Sequence[float], rtol: float = QUAD_RTOL, atol: float = 1e-12) -> np.ndarray:
    """R(t) = int e^{it xi} R_hat(xi) dxi on the spline of the profile."""
    spline = _ProfileSpline(profile)
    lo, hi = float(profile.xi[0]), float(profile.xi[-1])
    out = []
    for t in times:
        if t == 0:
            out.append(quadrature.quad_complex(spline, lo, hi, rtol, atol))
            continue
        cos_part = quadrature.quad_complex(spline, lo, hi, rtol, atol, weight="cos", wvar=float(t))
        sin_part = quadrature.quad_complex(spline, lo, hi, rtol, atol, weight="sin", wvar=float(t))
        out.append(cos_part + 1j * sin_part)
    return np.array(out, dtype=complex)


def holder_exponent(prof: SpectralProfile, K: Sequence[float], spacings: Sequence[float],
                    rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL) -> tuple[float, list[float]]:
    """
    Fitted exponent of max adjacent differences of R_hat on the nodes j*spacing, |j| <= 2.

    Returns:
        (alpha, max differences per spacing)
    """
    diffs = []
    for spacing in spacings:
        grid = spacing * np.arange(-2, 3)
        values = khat_profile(prof, K, grid, rtol=rtol, atol=atol).values
        diffs.append(float(np.max(np.abs(np.diff(values)))))
    alpha, _ = loglog_slope(spacings, diffs)
    print(f"[INFO] [{PRINT_PREFIX}] Holder fit alpha={alpha:.3f} over spacings {list(spacings)}")
    return alpha, diffs


# ---------------------------------------------------------------------------
# Monte-Carlo oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothedDeltaEstimate:
    value: complex
    stderr: float
    widths: tuple
    per_width: tuple
    per_width_stderr: tuple


def smoothed_delta_mc(integrand: TripleIntegrand, k: Sequence[float], xi: float, box: float,
                      widths: Sequence[float] = (0.2, 0.1, 0.05), n_samples: int = 2_000_000, seed: int = 0,
                      chunk: int = 250_000) -> SmoothedDeltaEstimate:
    """
    int int integrand * delta_w(2a.b - xi) da db with a Gaussian delta_w, for several widths,
    extrapolated to w = 0 by a fit linear in w^2.

    a and b are drawn uniformly from [-box, box]^2. All widths reuse the same samples.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1729]))
    widths = tuple(float(w) for w in widths)
    volume = (2.0 * box) ** 4
    kk = np.asarray(k, dtype=float)
    sums = np.zeros(len(widths), dtype=complex)
    sq = np.zeros(len(widths))
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        ab = rng.uniform(-box, box, size=(m, 4))
        a, b = ab[:, :2], ab[:, 2:]
        f = integrand(kk + a, kk + a + b, kk + b)
        defect = 2.0 * np.sum(a * b, axis=1) - xi
        for i, w in enumerate(widths):
            sample = f * np.exp(-0.5 * (defect / w) ** 2) / (w * math.sqrt(2.0 * math.pi))
            sums[i] += sample.sum()
            sq[i] += np.sum(np.abs(sample) ** 2)
        done += m
    means = sums / n_samples
    variances = np.maximum(sq / n_samples - np.abs(means) ** 2, 0.0)
    per_width = volume * means
    per_err = volume * np.sqrt(variances / n_samples)
    if len(widths) == 1:
        return SmoothedDeltaEstimate(complex(per_width[0]), float(per_err[0]), widths, tuple(per_width), tuple(per_err))
    x = np.array(widths) ** 2
    design = np.vstack([np.ones_like(x), x]).T
    coeffs_re = np.linalg.lstsq(design, per_width.real, rcond=None)[0]
    coeffs_im = np.linalg.lstsq(design, per_width.imag, rcond=None)[0]
    # intercept error bound from the propagated stderrs
    pinv = np.linalg.pinv(design)[0]
    stderr = float(np.sqrt(np.sum((pinv * per_err) ** 2)))
    value = complex(coeffs_re[0], coeffs_im[0])
    print(f"[DEBUG] [{PRINT_PREFIX}] smoothed_delta_mc xi={xi}: {value:.6g} +- {stderr:.2g}")
    return SmoothedDeltaEstimate(value, stderr, widths, tuple(complex(p) for p in per_width), tuple(float(e) for e in per_err))
