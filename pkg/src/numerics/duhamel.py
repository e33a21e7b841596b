# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# First and second Duhamel iterates of the coarse-grained observable, exact and leading order

"""
Sign convention: with (e^{isLaplacian} f)_hat = e^{-is|k|^2} f_hat, the triple kernel

    W(s) = int conj(P_s g_{K,sigma}) P_s g_{K1,h} conj(P_s g_{K2,h}) P_s g_{K3,h} dx

carries the phase e^{+is Delta omega}. The leading first-order kernel is therefore
int_0^t e^{is x} ds = (e^{itx} - 1)/(ix), and the second iterate is

    V2 = int_0^t [2 N(V1, phi, phi) - N(phi, V1, phi)] ds

whose leading sums use the double-time kernel D(a, b, t) = int_0^t int_0^s e^{isa} e^{-is'b} ds' ds.
"""

PRINT_PREFIX = "DUHAMEL"

# Standard library imports
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

# Third-party imports
import numpy as np

# Local imports
from config.vars import PRUNE_LOG_TOL, QUINTUPLE_CAP, TIME_QUAD_RTOL, TRIPLE_CAP
from src.numerics import gaussian_core as gc
from src.numerics import continuum_kinetic, lattice_resonance
from src.numerics.errors import BudgetExceeded, DomainError, GuardViolation
from src.numerics.initial_data import (LatticeSpec, PhaseInput, ScalingParams, SpectralProfile, site_values,
                                       validate_regime)
from src.utils import quadrature
from src.utils.utils import chunked, compensated_sum, ordered_map

TWO_PI = 2.0 * math.pi
LOG_TWO_PI = math.log(TWO_PI)

# Integer powers of 2pi entering each iterate
PREFACTOR_LEDGER = {
    "observable (2pi)^3 sigma^2": 3,
    "building block (2pi)^-2": -2,
    "plane integral pi/z ~ 2pi/sigma^2": 1,
}

TIME_START_ORDER = 8
TIME_MAX_ORDER = 256
TRIPLE_CHUNK = 4096


def leading_two_pi_power(order: int) -> int:
    """Exponent of 2pi in the leading term of V^order: 2*order + 2 building blocks, one observable, one plane integral."""
    blocks = 2 * order + 2
    power = (PREFACTOR_LEDGER["observable (2pi)^3 sigma^2"] + blocks * PREFACTOR_LEDGER["building block (2pi)^-2"]
             + PREFACTOR_LEDGER["plane integral pi/z ~ 2pi/sigma^2"])
    print(f"[DEBUG] [{PRINT_PREFIX}] prefactor V{order}: 3 + {blocks}*(-2) + 1 = (2pi)^{power}")
    return power


LEADING_PREFACTOR = TWO_PI ** -4


# ---------------------------------------------------------------------------
# Sites
# ---------------------------------------------------------------------------

class SiteIndex:
    """Support sites (eta != 0) with a dense integer lookup."""

    def __init__(self, lat: LatticeSpec, prof: SpectralProfile, phases: PhaseInput = None, realization: int = 0):
        values = site_values(lat, prof, phases, realization)
        keep = values != 0
        self.lat = lat
        self.keep = keep
        self.coords = lat.integer_sites[keep]
        self.values = values[keep]
        self.eta = prof.on_sites(lat)[keep]
        self.count = int(self.coords.shape[0])
        self.reach = int(np.max(np.abs(self.coords))) if self.count else 0
        self.table = np.full((2 * self.reach + 1, 2 * self.reach + 1), -1, dtype=np.int64)
        if self.count:
            self.table[self.coords[:, 0] + self.reach, self.coords[:, 1] + self.reach] = np.arange(self.count)

    @property
    def frequencies(self) -> np.ndarray:
        return self.coords / self.lat.L

    def lookup(self, n1, n2) -> np.ndarray:
        """Index of the site with integer coordinates (n1, n2), -1 when absent."""
        n1, n2 = np.broadcast_arrays(np.asarray(n1, dtype=np.int64), np.asarray(n2, dtype=np.int64))
        inside = (np.abs(n1) <= self.reach) & (np.abs(n2) <= self.reach)
        out = np.full(n1.shape, -1, dtype=np.int64)
        out[inside] = self.table[n1[inside] + self.reach, n2[inside] + self.reach]
        return out

    def triples_for(self, target: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """
        All (i1, i2, i3) with n1 - n2 + n3 = target and every site in the support.

        Returns:
            (indices (m, 3), defect numerators 2 A.B with A = n1 - target, B = n3 - target)
        """
        tgt = np.asarray(target, dtype=np.int64)
        i1, i3 = np.meshgrid(np.arange(self.count), np.arange(self.count), indexing="ij")
        i1, i3 = i1.ravel(), i3.ravel()
        n2 = self.coords[i1] + self.coords[i3] - tgt
        i2 = self.lookup(n2[:, 0], n2[:, 1])
        keep = i2 >= 0
        i1, i2, i3 = i1[keep], i2[keep], i3[keep]
        A = self.coords[i1] - tgt
        B = self.coords[i3] - tgt
        num = 2 * np.sum(A * B, axis=1)
        return np.stack([i1, i2, i3], axis=1), num


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def _first_kernel(x: np.ndarray, t: float) -> np.ndarray:
    """int_0^t e^{isx} ds, equal to t at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, complex(t))
    nz = x != 0
    out[nz] = np.expm1(1j * t * x[nz]) / (1j * x[nz])
    return out


def double_time_kernel(a, b, t: float) -> np.ndarray:
    """
    int_0^t int_0^s e^{isa} e^{-is'b} ds' ds, exact on every stratum.

    For b != 0 this is (E(a) - E(a - b)) / (ib) with E(x) = int_0^t e^{isx} ds, which covers
    a = 0 and a = b through E(0) = t. For b = 0 it is int_0^t s e^{isa} ds, equal to t^2/2 at a = 0.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    out = np.empty(a.shape, dtype=complex)
    nz = b != 0
    if np.any(nz):
        out[nz] = (_first_kernel(a[nz], t) - _first_kernel(a[nz] - b[nz], t)) / (1j * b[nz])
    zb = ~nz
    if np.any(zb):
        az = a[zb]
        vals = np.full(az.shape, 0.5 * t * t, dtype=complex)
        na = az != 0
        e = np.exp(1j * t * az[na])
        vals[na] = e * (t / (1j * az[na]) + 1.0 / az[na] ** 2) - 1.0 / az[na] ** 2
        out[zb] = vals
    return out


@dataclass(frozen=True)
class WKernel1:
    """
    Closed form of the triple kernel W(s) for a batch of triples.

    W = (pi/z) (2pi)^-8 |beta_h|^2 beta_h conj(beta_sigma) exp(gamma + zeta.zeta/(4z)) with
    beta_e(s) = 1/(1 + 2i e^2 s).
    """
    h: float
    sigma: float
    K: tuple
    K1: np.ndarray
    K2: np.ndarray
    K3: np.ndarray

    def beta(self, width: float, s) -> np.ndarray:
        return 1.0 / (1.0 + 2j * width * width * np.asarray(s, dtype=float))

    def z(self, s) -> np.ndarray:
        bh, bs = self.beta(self.h, s), self.beta(self.sigma, s)
        return 0.5 * self.sigma ** 2 * np.conj(bs) + 0.5 * self.h ** 2 * (2.0 * bh + np.conj(bh))

    def zeta(self, s) -> tuple[np.ndarray, np.ndarray]:
        bh, bs = self.beta(self.h, s)[None, :], self.beta(self.sigma, s)[None, :]
        out = []
        for d in range(2):
            out.append(-1j * self.K[d] * np.conj(bs) + 1j * (self.K1[:, d] + self.K3[:, d])[:, None] * bh
                       - 1j * self.K2[:, d][:, None] * np.conj(bh))
        return out[0], out[1]

    def gamma(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        bh, bs = self.beta(self.h, s)[None, :], self.beta(self.sigma, s)[None, :]
        k0 = self.K[0] ** 2 + self.K[1] ** 2
        n1 = np.sum(self.K1 ** 2, axis=1)[:, None]
        n2 = np.sum(self.K2 ** 2, axis=1)[:, None]
        n3 = np.sum(self.K3 ** 2, axis=1)[:, None]
        return 1j * s[None, :] * (k0 * np.conj(bs) - (n1 + n3) * bh + n2 * np.conj(bh))

    def log_value(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        bh, bs = self.beta(self.h, s), self.beta(self.sigma, s)
        z = self.z(s)[None, :]
        zx, zy = self.zeta(s)
        amplitude = np.log(np.pi / z) - 8.0 * LOG_TWO_PI + np.log(np.abs(bh) ** 2 * bh * np.conj(bs))[None, :]
        return amplitude + self.gamma(s) + (zx * zx + zy * zy) / (4.0 * z)

    def value(self, s) -> np.ndarray:
        """(n_triples, n_s) array of W."""
        return np.exp(self.log_value(s))


# ---------------------------------------------------------------------------
# Guards and rules
# ---------------------------------------------------------------------------

def _time_guard(params: ScalingParams, t: float, allow_beyond_guard: bool) -> None:
    if abs(t) <= params.time_guard:
        return
    message = f"t={t} violates t <= 1/(sigma^2 L^2) = {params.time_guard:.6g}"
    if not allow_beyond_guard:
        raise GuardViolation(message, constraint="t <= 1/(sigma^2 L^2)")
    print(f"[WARNING] [{PRINT_PREFIX}] {message}; continuing on request")


def _time_rule(t: float, omega_max: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Panels on [0, t] no longer than pi/omega_max."""
    panels = max(1, int(math.ceil(abs(t) * omega_max / math.pi)))
    return quadrature.panel_rule(0.0, t, panels, order)


def _prune_radius(params: ScalingParams) -> float:
    """|K1 - K2 + K3 - K| beyond which W(0) is below exp(PRUNE_LOG_TOL)."""
    z0 = 0.5 * params.sigma ** 2 + 1.5 * params.h ** 2
    return math.sqrt(4.0 * z0 * abs(PRUNE_LOG_TOL))


def exact_triples(params: ScalingParams, sites: SiteIndex, K: Sequence[float]) -> np.ndarray:
    """Support triples whose momentum mismatch |K1 - K2 + K3 - K| is inside the prune radius."""
    radius = _prune_radius(params) * params.L
    k = np.asarray(K, dtype=float) * params.L
    M = sites.count
    if M ** 3 > TRIPLE_CAP:
        raise BudgetExceeded(f"{M}^3 candidate triples for v1_exact", coverage=TRIPLE_CAP / M ** 3)
    found = []
    i2, i3 = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    i2, i3 = i2.ravel(), i3.ravel()
    base = sites.coords[i3] - sites.coords[i2]
    for i1 in range(M):
        mismatch = sites.coords[i1] + base - k
        keep = np.einsum("ij,ij->i", mismatch, mismatch) <= radius * radius
        if np.any(keep):
            found.append(np.stack([np.full(int(keep.sum()), i1), i2[keep], i3[keep]], axis=1))
    triples = np.concatenate(found) if found else np.zeros((0, 3), dtype=np.int64)
    if triples.shape[0] > TRIPLE_CAP:
        raise BudgetExceeded(f"{triples.shape[0]} triples for v1_exact", coverage=TRIPLE_CAP / triples.shape[0])
    print(f"[DEBUG] [{PRINT_PREFIX}] v1_exact: {triples.shape[0]} triples within prune radius {radius / params.L:.3g}")
    return triples


# ---------------------------------------------------------------------------
# First iterate
# ---------------------------------------------------------------------------

def v1_exact(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float, phases: PhaseInput = None,
             realization: int = 0, allow_beyond_guard: bool = False) -> complex:
    """
    <V1(t)>_{K,sigma} = (2pi)^3 sigma^2 sum zeta1 conj(zeta2) zeta3 int_0^t W(s) ds.

    Args:
        params: h, L, sigma
        prof: Profile eta
        K: Observation site
        t: Time
        phases: Optional random phases on the lattice
        allow_beyond_guard: Continue past t <= 1/(sigma^2 L^2) with a warning

    Returns:
        complex value

    Raises:
        GuardViolation, BudgetExceeded, ToleranceFailure
    """
    _time_guard(params, t, allow_beyond_guard)
    if t == 0:
        return 0j
    lat = LatticeSpec(params.L, prof.radius)
    sites = SiteIndex(lat, prof, phases, realization)
    triples = exact_triples(params, sites, K)
    if triples.shape[0] == 0:
        return 0j
    freq = sites.frequencies
    K1, K2, K3 = freq[triples[:, 0]], freq[triples[:, 1]], freq[triples[:, 2]]
    coeff = sites.values[triples[:, 0]] * np.conj(sites.values[triples[:, 1]]) * sites.values[triples[:, 2]]
    kk = (float(K[0]), float(K[1]))
    omega_max = float(np.max(kk[0] ** 2 + kk[1] ** 2 + np.sum(K1 ** 2 + K2 ** 2 + K3 ** 2, axis=1))) + 1.0
    blocks = chunked(triples.shape[0], TRIPLE_CHUNK)
    leading_two_pi_power(1)

    def evaluate(order: int) -> complex:
        s, ws = _time_rule(t, omega_max, order)

        def block_sum(block: slice) -> complex:
            kernel = WKernel1(params.h, params.sigma, kk, K1[block], K2[block], K3[block])
            return compensated_sum(coeff[block] * (kernel.value(s) @ ws))

        return compensated_sum(ordered_map(block_sum, blocks))

    total, err, order = quadrature.refine_until(evaluate, TIME_START_ORDER, TIME_MAX_ORDER, TIME_QUAD_RTOL, 0.0, label="v1_exact")
    value = TWO_PI ** 3 * params.sigma ** 2 * complex(total)
    print(f"[DEBUG] [{PRINT_PREFIX}] v1_exact K={tuple(K)} t={t}: {value:.10g} (order {order})")
    return value


def v1_leading(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float,
               phases: Optional[object] = None, realization: int = 0, direction: int = 1) -> complex:
    """(2pi)^-4 sum_{K = K1 - K2 + K3} zeta1 conj(zeta2) zeta3 int_0^t e^{is Delta omega} ds over lattice sites."""
    if t == 0:
        return 0j
    lat = LatticeSpec(params.L, prof.radius)
    kernel = lattice_resonance.duhamel_kernel(t, direction)
    return LEADING_PREFACTOR * lattice_resonance.kernel_sum(lat, prof, K, kernel, phases=phases, realization=realization,
                                                            k2_filter=True)


# ---------------------------------------------------------------------------
# Monomial plans
# ---------------------------------------------------------------------------

@dataclass
class MonomialPlan:
    """
    sum_q weights[q] * prod zeta[plus[q]] * prod conj(zeta[minus[q]]).

    Phase-independent weights let one plan serve every random-phase realization.
    """
    plus: np.ndarray
    minus: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    def terms(self, zeta: np.ndarray) -> np.ndarray:
        """Per-monomial values, shape (..., n)."""
        zeta = np.asarray(zeta, dtype=complex)
        out = np.prod(zeta[..., self.plus], axis=-1) * np.prod(np.conj(zeta[..., self.minus]), axis=-1)
        return out * self.weights

    def evaluate(self, zeta: np.ndarray) -> complex:
        return compensated_sum(self.terms(zeta))

    def evaluate_batch(self, zetas: np.ndarray) -> np.ndarray:
        """One value per row of a (R, M) batch of site values."""
        return np.array([self.evaluate(z) for z in zetas], dtype=complex)

    def extend(self, other: "MonomialPlan") -> "MonomialPlan":
        if self.plus.shape[1] != other.plus.shape[1] or self.minus.shape[1] != other.minus.shape[1]:
            raise DomainError("plans of different degree cannot be merged")
        return MonomialPlan(np.concatenate([self.plus, other.plus]), np.concatenate([self.minus, other.minus]),
                            np.concatenate([self.weights, other.weights]), {**self.meta, **other.meta})


def v1_plan(sites: SiteIndex, K: Sequence[float], t: float, direction: int = 1) -> MonomialPlan:
    """Leading V1 as a plan over support triples: plus (K1, K3), minus (K2)."""
    k = sites.lat.to_integer(K)
    idx, num = sites.triples_for(k)
    xi = num / sites.lat.L ** 2
    weights = LEADING_PREFACTOR * _first_kernel(direction * xi, t)
    return MonomialPlan(idx[:, [0, 2]], idx[:, [1]], weights, {"order": 1, "t": t})


def _quintuple_blocks(sites: SiteIndex, k: np.ndarray, pattern: str):
    """
    Outer pairs and the inner V1 triples attached to them.

    pattern 'A': outer (K2, K3) in support, inner triples for K1 = K + K2 - K3.
    pattern 'B': outer (K1, K3) in support, inner triples for K2 = K1 + K3 - K.

    Yields:
        (outer indices (2,), outer defect numerator, inner indices (m, 3), inner numerators (m,))
    """
    cache: dict = {}
    M = sites.count
    for i in range(M):
        for j in range(M):
            if pattern == "A":
                target = k + sites.coords[i] - sites.coords[j]
                n1, n3 = target, sites.coords[j]
            else:
                target = sites.coords[i] + sites.coords[j] - k
                n1, n3 = sites.coords[i], sites.coords[j]
            key = (int(target[0]), int(target[1]))
            if key not in cache:
                cache[key] = sites.triples_for(key)
            inner, inner_num = cache[key]
            if inner.shape[0] == 0:
                continue
            outer_num = 2 * int(np.dot(n1 - k, n3 - k))
            yield (i, j), outer_num, inner, inner_num


def quintuple_count(sites: SiteIndex, K: Sequence[float]) -> int:
    k = np.asarray(sites.lat.to_integer(K), dtype=np.int64)
    return sum(inner.shape[0] for pattern in ("A", "B") for _, _, inner, _ in _quintuple_blocks(sites, k, pattern))


def v2_plan(sites: SiteIndex, K: Sequence[float], t: float) -> MonomialPlan:
    """
    Leading V2 plan: 2 c^2 sum D(dw, -dw', t) over K1-linked quintuples minus
    c^2 sum D(dw, dw'', t) over K2-linked ones, c = (2pi)^-4.

    Raises:
        BudgetExceeded: more than QUINTUPLE_CAP quintuples
    """
    k = np.asarray(sites.lat.to_integer(K), dtype=np.int64)
    total = quintuple_count(sites, K)
    if total > QUINTUPLE_CAP:
        raise BudgetExceeded(f"{total} quintuples requested, cap is {QUINTUPLE_CAP}", coverage=QUINTUPLE_CAP / total)
    den = sites.lat.L ** 2
    c2 = LEADING_PREFACTOR ** 2
    leading_two_pi_power(2)
    plus, minus, weights = [], [], []
    for (i2, i3), outer_num, inner, inner_num in _quintuple_blocks(sites, k, "A"):
        m = inner.shape[0]
        # zeta4 conj(zeta5) zeta6 conj(zeta2) zeta3
        plus.append(np.stack([inner[:, 0], inner[:, 2], np.full(m, i3)], axis=1))
        minus.append(np.stack([inner[:, 1], np.full(m, i2)], axis=1))
        weights.append(2.0 * c2 * double_time_kernel(outer_num / den, -inner_num / den, t))
    for (i1, i3), outer_num, inner, inner_num in _quintuple_blocks(sites, k, "B"):
        m = inner.shape[0]
        # zeta1 conj(zeta4) zeta5 conj(zeta6) zeta3
        plus.append(np.stack([np.full(m, i1), inner[:, 1], np.full(m, i3)], axis=1))
        minus.append(np.stack([inner[:, 0], inner[:, 2]], axis=1))
        weights.append(-c2 * double_time_kernel(outer_num / den, inner_num / den, t))
    if not weights:
        return MonomialPlan(np.zeros((0, 3), dtype=np.int64), np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=complex))
    print(f"[DEBUG] [{PRINT_PREFIX}] v2 plan: {total} quintuples at K={tuple(K)}")
    return MonomialPlan(np.concatenate(plus), np.concatenate(minus), np.concatenate(weights), {"order": 2, "t": t})


def v2_leading(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float, phases: PhaseInput = None,
               realization: int = 0) -> complex:
    """Both second-order sums with the closed double-time kernel."""
    if t == 0:
        return 0j
    sites = SiteIndex(LatticeSpec(params.L, prof.radius), prof, phases, realization)
    return v2_plan(sites, K, t).evaluate(sites.values)


def v2_exact(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float, phases: PhaseInput = None,
             realization: int = 0, allow_beyond_guard: bool = False) -> complex:
    """
    Second iterate from the full Gaussian quintuple kernel, on momentum-matched quintuples.

    The (s, s') triangle is mapped to s' = s u with Jacobian s; the inner cubic product is built at s',
    propagated by s - s' and paired with the outer legs at s.
    """
    _time_guard(params, t, allow_beyond_guard)
    if t == 0:
        return 0j
    if _prune_radius(params) * params.L >= 1.0:
        print(f"[WARNING] [{PRINT_PREFIX}] v2_exact keeps only momentum-matched quintuples but sigma L is not small")
    lat = LatticeSpec(params.L, prof.radius)
    sites = SiteIndex(lat, prof, phases, realization)
    k = np.asarray(lat.to_integer(K), dtype=np.int64)
    total = quintuple_count(sites, K)
    if total > QUINTUPLE_CAP // 100:
        raise BudgetExceeded(f"{total} quintuples for v2_exact, cap is {QUINTUPLE_CAP // 100}",
                             coverage=(QUINTUPLE_CAP // 100) / max(total, 1))
    freq = sites.frequencies
    zeta = sites.values
    h, sigma = params.h, params.sigma
    kk = np.asarray(K, dtype=float)

    rows = {"A": [], "B": []}
    for pattern in ("A", "B"):
        for (i, j), _, inner, _ in _quintuple_blocks(sites, k, pattern):
            for q in inner:
                rows[pattern].append((i, j, int(q[0]), int(q[1]), int(q[2])))
    omega_max = float(kk @ kk) + 5.0 * float(np.max(np.sum(freq ** 2, axis=1))) + 1.0
    tables = {pattern: np.array(rows[pattern], dtype=np.int64).reshape(-1, 5) for pattern in rows}

    def block(fx: np.ndarray, width: float):
        return gc.ComplexGaussian(np.full(fx.shape[:1], -2.0 * LOG_TWO_PI + 0j)[:, None, None], 0.5 * width * width + 0j,
                                  (1j * fx[:, 0][:, None, None], 1j * fx[:, 1][:, None, None]))

    def pattern_sum(pattern: str, s: np.ndarray, ws: np.ndarray, u: np.ndarray, wu: np.ndarray) -> complex:
        table = tables[pattern]
        if table.shape[0] == 0:
            return 0j
        rows_per_chunk = max(1, 2_000_000 // (len(s) * len(u)))
        return compensated_sum(ordered_map(lambda sl: chunk_sum(pattern, table[sl], s, ws, u, wu),
                                           chunked(table.shape[0], rows_per_chunk)))

    def chunk_sum(pattern: str, data: np.ndarray, s: np.ndarray, ws: np.ndarray, u: np.ndarray, wu: np.ndarray) -> complex:
        S = s[None, :, None]
        Sp = (s[:, None] * u[None, :])[None, :, :]
        g4, g5, g6 = block(freq[data[:, 2]], h), block(freq[data[:, 3]], h), block(freq[data[:, 4]], h)
        inner = gc.product([gc.propagate(g4, Sp), gc.propagate(g5, Sp), gc.propagate(g6, Sp)], [False, True, False])
        moved = gc.propagate(inner, S - Sp)
        window = gc.ComplexGaussian(np.array(-2.0 * LOG_TWO_PI + 0j), 0.5 * sigma * sigma + 0j, (1j * kk[0], 1j * kk[1]))
        pw = gc.propagate(window, S)
        gi, gj = gc.propagate(block(freq[data[:, 0]], h), S), gc.propagate(block(freq[data[:, 1]], h), S)
        if pattern == "A":
            # conj(P g_K) * P V1 * conj(P g2) * P g3
            prod = gc.product([pw, moved, gi, gj], [True, False, True, False])
            coeff = zeta[data[:, 2]] * np.conj(zeta[data[:, 3]]) * zeta[data[:, 4]] * np.conj(zeta[data[:, 0]]) * zeta[data[:, 1]]
        else:
            # conj(P g_K) * P g1 * conj(P V1) * P g3
            prod = gc.product([pw, gi, moved, gj], [True, False, True, False])
            coeff = zeta[data[:, 0]] * np.conj(zeta[data[:, 2]]) * zeta[data[:, 3]] * np.conj(zeta[data[:, 4]]) * zeta[data[:, 1]]
        values = gc.integrate_plane(prod)  # (n, n_s, n_u)
        weights = (ws * s)[None, :, None] * wu[None, None, :]
        return compensated_sum(coeff * np.sum(values * weights, axis=(1, 2)))

    def evaluate(order: int) -> complex:
        s, ws = _time_rule(t, omega_max, order)
        u, wu = quadrature.legendre_rule(order, 0.0, 1.0)
        return 2.0 * pattern_sum("A", s, ws, u, wu) - pattern_sum("B", s, ws, u, wu)

    value, _, order = quadrature.refine_until(evaluate, TIME_START_ORDER, 64, TIME_QUAD_RTOL * 100, 0.0, label="v2_exact")
    result = TWO_PI ** 3 * sigma * sigma * complex(value)
    print(f"[DEBUG] [{PRINT_PREFIX}] v2_exact K={tuple(K)} t={t}: {result:.10g} over {total} quintuples (order {order})")
    return result


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass
class ExpansionResult:
    K: tuple
    t: float
    v1_exact: Optional[complex] = None
    v1_leading: Optional[complex] = None
    v2_exact: Optional[complex] = None
    v2_leading: Optional[complex] = None
    regime: dict = field(default_factory=dict)
    budget_used: dict = field(default_factory=dict)

    def remainder(self, order: int) -> Optional[float]:
        exact = self.v1_exact if order == 1 else self.v2_exact
        leading = self.v1_leading if order == 1 else self.v2_leading
        if exact is None or leading is None:
            return None
        return abs(exact - leading)

    def budget(self, L: float) -> float:
        """Reference size t L^2 log L + L^4 of the first-order remainder."""
        return abs(self.t) * L * L * math.log(L) + L ** 4 if L > 1 else float("nan")

    def rows(self) -> list[tuple]:
        out = []
        for order, exact, leading in ((1, self.v1_exact, self.v1_leading), (2, self.v2_exact, self.v2_leading)):
            for kind, value in (("exact", exact), ("leading", leading)):
                if value is None:
                    continue
                rem = self.remainder(order)
                out.append((self.K[0], self.K[1], self.t, order, kind, value.real, value.imag,
                            float("nan") if rem is None else rem, self.budget_used.get(order, 0)))
        return out


EXPANSION_COLUMNS = ["K1", "K2", "t", "order", "kind", "re", "im", "remainder_abs", "budget_used"]


def expansion(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float, orders: Sequence[int] = (1, 2),
              exact: bool = True, allow_beyond_guard: bool = False) -> ExpansionResult:
    report = validate_regime(params)
    result = ExpansionResult((float(K[0]), float(K[1])), float(t), regime=report.as_dict())
    sites = SiteIndex(LatticeSpec(params.L, prof.radius), prof)
    if 1 in orders:
        result.v1_leading = v1_leading(params, prof, K, t)
        result.budget_used[1] = len(sites.triples_for(sites.lat.to_integer(K))[1])
        if exact:
            result.v1_exact = v1_exact(params, prof, K, t, allow_beyond_guard=allow_beyond_guard)
    if 2 in orders:
        result.v2_leading = v2_leading(params, prof, K, t)
        result.budget_used[2] = quintuple_count(sites, K)
        if exact:
            result.v2_exact = v2_exact(params, prof, K, t, allow_beyond_guard=allow_beyond_guard)
    return result


# ---------------------------------------------------------------------------
# Kernel estimates
# ---------------------------------------------------------------------------

def _resonant_sample(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], max_triples: int):
    lat = LatticeSpec(params.L, prof.radius)
    sites = SiteIndex(lat, prof)
    idx, num = sites.triples_for(lat.to_integer(K))
    idx = idx[num == 0]
    if idx.shape[0] > max_triples:
        idx = idx[np.linspace(0, idx.shape[0] - 1, max_triples).astype(np.int64)]
    freq = sites.frequencies
    return WKernel1(params.h, params.sigma, (float(K[0]), float(K[1])), freq[idx[:, 0]], freq[idx[:, 1]], freq[idx[:, 2]])


def gamma_deviation(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], s_values: Sequence[float],
                    max_triples: int = 2000) -> dict:
    """
    max over resonant triples of |1 - Gamma(s)|, Gamma = (2pi)^7 sigma^2 W e^{-is Delta omega},
    against h^2/sigma^2 + s sigma^2 + s^2 h^2 + s^3 sigma^4.
    """
    kernel = _resonant_sample(params, prof, K, max_triples)
    s = np.asarray(s_values, dtype=float)
    gamma = TWO_PI ** 7 * params.sigma ** 2 * kernel.value(s)  # resonant: e^{-is Delta omega} = 1
    deviation = np.max(np.abs(1.0 - gamma), axis=0) if gamma.size else np.zeros_like(s)
    h2, s2 = params.h ** 2, params.sigma ** 2
    bound = h2 / s2 + s * s2 + s * s * h2 + s ** 3 * s2 * s2
    ratio = deviation / bound
    print(f"[INFO] [{PRINT_PREFIX}] Gamma deviation constant {float(np.max(ratio)):.4g} over {len(kernel.K1)} triples")
    return {"s": s.tolist(), "deviation": deviation.tolist(), "bound": bound.tolist(),
            "constant": float(np.max(ratio)), "triples": int(len(kernel.K1))}


def derivative_ratio(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], s_values: Sequence[float],
                     max_triples: int = 2000, step: float = 1e-4) -> dict:
    """|d/ds (W e^{-is Delta omega})| / ((1 + s) sigma^2 |W|) by central differences on resonant triples."""
    kernel = _resonant_sample(params, prof, K, max_triples)
    s = np.asarray(s_values, dtype=float)
    ds = step * np.maximum(1.0, s)
    lo = np.maximum(s - ds, 0.0)
    hi = s + ds
    derivative = (kernel.value(hi) - kernel.value(lo)) / (hi - lo)[None, :]
    w = np.abs(kernel.value(s))
    ratio = np.abs(derivative) / ((1.0 + s)[None, :] * params.sigma ** 2 * w)
    worst = np.max(ratio, axis=0) if ratio.size else np.zeros_like(s)
    return {"s": s.tolist(), "ratio": worst.tolist(), "constant": float(np.max(worst)) if worst.size else 0.0}


# ---------------------------------------------------------------------------
# Deterministic prediction
# ---------------------------------------------------------------------------

def default_xi_grid(prof: SpectralProfile, K: Sequence[float], spacing: float = 0.025) -> np.ndarray:
    reach = 2.0 * (math.hypot(float(K[0]), float(K[1])) + prof.radius) ** 2
    n = int(math.ceil(reach / spacing))
    return spacing * np.arange(-n, n + 1)


def deterministic_prediction(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float,
                             profile: Optional[continuum_kinetic.KineticProfile] = None) -> dict:
    """
    Leading predictions of <v(t)> - eps <phi> in both time windows.

    Window 1 is -i eps^3 L^4 (2pi)^-4 int (e^{it xi} - 1)/(i xi) R_hat(xi) dxi.
    Window 2 is the resonant line -i pi 2t eps^3 L^2 log L / (zeta(2) (2pi)^4) T_K, reported next
    to the resonant-count form -i eps^3 (2pi)^-4 t (2 L^2 log L / zeta(2)) T_K.
    """
    if params.eps is None:
        raise DomainError("deterministic_prediction needs eps")
    eps, L = params.eps, params.L
    windows = validate_regime(params).windows
    if profile is None:
        profile = continuum_kinetic.khat_profile(prof, K, default_xi_grid(prof, K))
    quasi = continuum_kinetic.quasi_resonant_integral(profile.reflected(), t)
    cr = continuum_kinetic.cr_operator(prof, prof, prof, K)
    zeta2 = lattice_resonance.ZETA_2
    window1 = -1j * eps ** 3 * L ** 4 * LEADING_PREFACTOR * quasi
    window2 = -1j * math.pi * 2.0 * t * eps ** 3 * L * L * math.log(L) / (zeta2 * TWO_PI ** 4) * cr
    resonant_line = -1j * eps ** 3 * LEADING_PREFACTOR * t * 2.0 * L * L * math.log(L) / zeta2 * cr
    if windows["window1"][0] <= t <= windows["window1"][1]:
        active = "window1"
    elif windows["window2"][0] <= t <= windows["window2"][1]:
        active = "window2"
    else:
        active = "none"
    return {"t": t, "window": active, "windows": windows, "window1": window1, "window2": window2,
            "resonant_line": resonant_line, "quasi_resonant_integral": quasi, "cr_operator": cr}


# ---------------------------------------------------------------------------
# Decay of the time signal
# ---------------------------------------------------------------------------

def _coupled_integral(fu: gc.ComplexGaussian, fv: gc.ComplexGaussian, fw: gc.ComplexGaussian, k: Sequence[float],
                      t: np.ndarray) -> np.ndarray:
    """
    int int e^{2it a.b} fu(k+a) conj(fv(k+a+b)) fw(k+b) da db by integrating a, then b.

    Raises:
        DomainError: the coupled form loses a positive real part
    """
    kx, ky = float(k[0]), float(k[1])
    z1, z2, z3 = fu.z, np.conj(fv.z), fw.z
    x1, x2, x3 = fu.xi, (np.conj(fv.xi[0]), np.conj(fv.xi[1])), fw.xi
    const = (fu.log_c + np.conj(fv.log_c) + fw.log_c
             - (z1 + z2 + z3) * (kx * kx + ky * ky)
             + (x1[0] + x2[0] + x3[0]) * kx + (x1[1] + x2[1] + x3[1]) * ky)
    Ja = tuple(-2.0 * (z1 + z2) * kd + x1[d] + x2[d] for d, kd in enumerate((kx, ky)))
    Jb = tuple(-2.0 * (z2 + z3) * kd + x2[d] + x3[d] for d, kd in enumerate((kx, ky)))
    za = z1 + z2
    m = z2 - 1j * np.asarray(t, dtype=float)
    # a-integral: exp(-za|a|^2 + (Ja - 2 m b).a)
    log_a = gc.log_integrate_plane(gc.ComplexGaussian(const, za, Ja))
    inner = gc.ComplexGaussian(log_a, z3 + z2 - m * m / za, (Jb[0] - m * Ja[0] / za, Jb[1] - m * Ja[1] / za))
    return gc.integrate_plane(inner)


def decay_profile(u: gc.WavePacketSum, v: gc.WavePacketSum, w: gc.WavePacketSum, times: Sequence[float],
                  k: Sequence[float] = (0.0, 0.0)) -> np.ndarray:
    """
    R_k(t, u, v, w) = int int e^{2it a.b} u(k+a) conj(v(k+a+b)) w(k+b) da db in closed form.

    The packets are functions of frequency. The cross term 2it a.b is absorbed into the quadratic
    form, integrated over a then b.

    Returns:
        complex array over times
    """
    times = np.asarray(times, dtype=float)
    total = np.zeros(times.shape, dtype=complex)
    for fu in u:
        for fv in v:
            for fw in w:
                total = total + _coupled_integral(fu, fv, fw, k, times)
    return total
