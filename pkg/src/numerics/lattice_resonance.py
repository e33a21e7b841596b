# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Frequency triples on Z_L^2: exact resonance defects, level sets, kernel sums and asymptotic constants

"""
Triples are enumerated through A = K1 - K and B = K3 - K in integer lattice units, so that
K2 = K1 + K3 - K and

    Delta omega = |K|^2 - |K1|^2 + |K2|^2 - |K3|^2 = 2 A.B / L^2

is stored exactly as the even integer 2 A.B over the denominator L^2. K1 and K3 range over a
window centred at the origin (the eta-support disc by default); K2 is unrestricted unless
k2_filter is set, and field values at K2 are looked up on a dense grid.
"""

PRINT_PREFIX = "LATTICE"

# Standard library imports
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

# Third-party imports
import numpy as np

# Local imports
from config.vars import CHUNK_PAIRS, TRIPLE_CAP
from src.datamanager import cache_handler, results_manager
from src.numerics.errors import BudgetExceeded, KernelError
from src.numerics.initial_data import LatticeSpec, PhaseEnsemble, SpectralProfile, integer_disc
from src.utils.utils import chunked, compensated_sum, defect_order, ordered_map

ZETA_2 = math.pi ** 2 / 6.0


@dataclass(frozen=True)
class ResonantTriple:
    """Integer coordinates n with K = n / L; defect_num = 2 A.B = L^2 * Delta omega."""
    K1: tuple
    K2: tuple
    K3: tuple
    defect_num: int
    L: float

    @property
    def defect(self) -> float:
        return self.defect_num / (self.L * self.L)

    @property
    def resonant(self) -> bool:
        return self.defect_num == 0


@dataclass(frozen=True)
class LevelSetSum:
    xi_num: int
    xi_den: float
    value: complex
    count: int

    @property
    def xi(self) -> float:
        return self.xi_num / self.xi_den


@dataclass(frozen=True)
class Kernel:
    """Vectorized kernel on nonzero defects plus its caller-supplied value at 0."""
    func: Callable[[np.ndarray], np.ndarray]
    zero_value: Optional[complex]
    name: str = "kernel"


def unit_kernel() -> Kernel:
    return Kernel(lambda x: np.ones_like(x, dtype=complex), 1.0, "unit")


def duhamel_kernel(t: float, direction: int = 1) -> Kernel:
    """
    int_0^t exp(i direction s x) ds.

    direction=+1 gives (e^{itx} - 1)/(ix), the sign produced by the exact Gaussian calculus;
    direction=-1 gives (1 - e^{-itx})/(ix). Both equal t at x = 0.
    """
    def func(x):
        x = np.asarray(x, dtype=float)
        return np.expm1(1j * direction * t * x) / (1j * direction * x)
    return Kernel(func, complex(t), f"duhamel(t={t},dir={direction})")


def sinc2_kernel(t: float) -> Kernel:
    """|sin(t x / 2) / (x / 2)|^2, equal to t^2 at x = 0."""
    def func(x):
        x = np.asarray(x, dtype=float)
        return (np.sin(0.5 * t * x) / (0.5 * x)) ** 2 + 0j
    return Kernel(func, complex(t * t), f"sinc2(t={t})")


# ---------------------------------------------------------------------------
# Fields on the integer grid
# ---------------------------------------------------------------------------

class SiteGrid:
    """
    Dense lookup of a complex field on integer points with |n_i| <= radius; zero outside.

    With a phase ensemble, lattice sites take the realization's site phases and the grid points
    beyond the lattice disc take outer phases, assigned ring by ring in Chebyshev radius so a
    point keeps its phase whatever the grid radius.
    """

    def __init__(self, lat: LatticeSpec, prof: SpectralProfile, radius: int,
                 phases: Optional[PhaseEnsemble] = None, realization: int = 0, values: Optional[np.ndarray] = None):
        self.radius = int(radius)
        axis = np.arange(-self.radius, self.radius + 1)
        n1, n2 = np.meshgrid(axis, axis, indexing="ij")
        self.values = prof(n1 / lat.L, n2 / lat.L).astype(complex)
        sites = lat.integer_sites
        inside = np.all(np.abs(sites) <= self.radius, axis=1)
        if phases is not None:
            outer = np.ones(n1.shape, dtype=bool)
            outer[sites[inside, 0] + self.radius, sites[inside, 1] + self.radius] = False
            o1, o2 = n1[outer], n2[outer]
            order = np.lexsort((o2, o1, np.maximum(np.abs(o1), np.abs(o2))))
            theta = np.empty(o1.shape[0])
            theta[order] = phases.outer_phases(realization, o1.shape[0])
            self.values[outer] = self.values[outer] * np.exp(1j * theta)
        if values is None and phases is not None:
            values = prof.on_sites(lat) * np.exp(1j * phases.phases(realization, lat.count))
        if values is not None:
            self.values[sites[inside, 0] + self.radius, sites[inside, 1] + self.radius] = np.asarray(values)[inside]

    def lookup(self, n1, n2) -> np.ndarray:
        n1, n2 = np.broadcast_arrays(np.asarray(n1, dtype=np.int64), np.asarray(n2, dtype=np.int64))
        inside = (np.abs(n1) <= self.radius) & (np.abs(n2) <= self.radius)
        out = np.zeros(n1.shape, dtype=complex)
        out[inside] = self.values[n1[inside] + self.radius, n2[inside] + self.radius]
        return out


# Weight functions receive the field at K, K1, K2, K3 and return the triple weight.
WEIGHTS: dict[str, Callable[..., np.ndarray]] = {
    "eta": lambda f0, f1, f2, f3: f1 * np.conj(f2) * f3,
    "n123": lambda f0, f1, f2, f3: (np.abs(f1) * np.abs(f2) * np.abs(f3)) ** 2 + 0j,
    "n0_23": lambda f0, f1, f2, f3: (np.abs(f0) * np.abs(f2) * np.abs(f3)) ** 2 + 0j,
    "n0_13": lambda f0, f1, f2, f3: (np.abs(f0) * np.abs(f1) * np.abs(f3)) ** 2 + 0j,
    "n0_12": lambda f0, f1, f2, f3: (np.abs(f0) * np.abs(f1) * np.abs(f2)) ** 2 + 0j,
}


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _window_sites(lat: LatticeSpec, window: Optional[float]) -> np.ndarray:
    """Integer sites of the K1/K3 window (radius in frequency units, default B)."""
    return lat.integer_sites if window is None else integer_disc(window * lat.L)


def enumerate_triples(lat: LatticeSpec, prof: SpectralProfile, K: Sequence[float], k2_filter: bool = False,
                      window: Optional[float] = None) -> Iterator[ResonantTriple]:
    """
    Yield every triple with K1, K3 in the window, in lexicographic (K1, K3) order.

    Plain integer arithmetic; this is the brute-force path the vectorized sums are checked against.
    """
    k = lat.to_integer(K)
    sites = [tuple(int(c) for c in n) for n in _window_sites(lat, window)]
    members = set(sites)
    for n1 in sites:
        for n3 in sites:
            n2 = (n1[0] + n3[0] - k[0], n1[1] + n3[1] - k[1])
            if k2_filter and n2 not in members:
                continue
            a = (n1[0] - k[0], n1[1] - k[1])
            b = (n3[0] - k[0], n3[1] - k[1])
            yield ResonantTriple(n1, n2, n3, 2 * (a[0] * b[0] + a[1] * b[1]), lat.L)


def _level_arrays(lat: LatticeSpec, prof: SpectralProfile, K: Sequence[float], weight: str = "eta",
                  window: Optional[float] = None, phases: Optional[PhaseEnsemble] = None, realization: int = 0,
                  k2_filter: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Level-set accumulation over all (K1, K3) window pairs.

    Returns:
        (levels 2A.B, counts, complex sums), restricted to levels with a nonzero count
    """
    k = np.array(lat.to_integer(K), dtype=np.int64)
    sites = _window_sites(lat, window)
    M = sites.shape[0]
    total = M * M
    if total > TRIPLE_CAP:
        raise BudgetExceeded(f"{total} triples requested for L={lat.L}, cap is {TRIPLE_CAP}", coverage=TRIPLE_CAP / total)

    reach = int(np.max(np.abs(sites))) if M else 0
    kmax = int(np.max(np.abs(k)))
    grid = SiteGrid(lat, prof, 2 * reach + kmax, phases, realization)
    f0 = grid.lookup(k[0], k[1])
    members = np.zeros((2 * reach + 1, 2 * reach + 1), dtype=bool)
    members[sites[:, 0] + reach, sites[:, 1] + reach] = True

    A = sites - k
    Bv = sites - k
    a_max = int(np.max(np.abs(A).sum(axis=1))) if M else 0
    span = 2 * a_max * a_max
    f_sites = grid.lookup(sites[:, 0], sites[:, 1])
    weight_fn = WEIGHTS[weight]
    rows = max(1, CHUNK_PAIRS // max(M, 1))

    def accumulate(block: slice):
        num = 2 * (A[block, 0:1] * Bv[None, :, 0] + A[block, 1:2] * Bv[None, :, 1])
        n2_1 = sites[block, 0:1] + sites[None, :, 0] - k[0]
        n2_2 = sites[block, 1:2] + sites[None, :, 1] - k[1]
        f2 = grid.lookup(n2_1, n2_2)
        w = weight_fn(f0, f_sites[block, None], f2, f_sites[None, :])
        if k2_filter:
            keep = (np.abs(n2_1) <= reach) & (np.abs(n2_2) <= reach)
            keep &= members[np.where(keep, n2_1 + reach, 0), np.where(keep, n2_2 + reach, 0)]
            num, w = num[keep], w[keep]
        idx = (num + span).ravel()
        size = 2 * span + 1
        counts = np.bincount(idx, minlength=size)
        re = np.bincount(idx, weights=np.real(w).ravel(), minlength=size)
        im = np.bincount(idx, weights=np.imag(w).ravel(), minlength=size)
        return counts, re, im

    parts = ordered_map(accumulate, chunked(M, rows))
    size = 2 * span + 1
    counts = np.zeros(size, dtype=np.int64)
    re = np.zeros(size)
    im = np.zeros(size)
    for c, r, i in parts:  # fixed chunk order
        counts += c
        re += r
        im += i
    levels = np.arange(-span, span + 1, dtype=np.int64)
    hit = counts > 0
    print(f"[DEBUG] [{PRINT_PREFIX}] {total} pairs over {M} window sites, {int(hit.sum())} levels (L={lat.L}, K={tuple(K)})")
    return levels[hit], counts[hit], re[hit] + 1j * im[hit]


def _cache_payload(lat, prof, K, weight, window, phases, realization, k2_filter) -> Optional[dict]:
    if phases is not None and not isinstance(phases, PhaseEnsemble):
        return None
    return {
        "kind": "level_set_profile", "L": lat.L, "B": lat.B, "profile": prof.describe(), "K": [float(K[0]), float(K[1])],
        "weight": weight, "window": window, "k2_filter": k2_filter,
        "phases": None if phases is None else {"seed": phases.seed, "realization": realization},
    }


def level_set_profile(lat: LatticeSpec, prof: SpectralProfile, K: Sequence[float], weight: str = "eta",
                      window: Optional[float] = None, phases: Optional[PhaseEnsemble] = None, realization: int = 0,
                      k2_filter: bool = False) -> list[LevelSetSum]:
    """
    Group all window triples by their exact defect.

    Args:
        lat, prof, K: Lattice, profile and base site
        weight: Name in WEIGHTS (default eta_{K1} conj(eta_{K2}) eta_{K3})
        window: K1/K3 window radius in frequency units (default: lattice B)
        phases, realization: Optional random phases applied to lattice sites
        k2_filter: Drop triples whose K2 leaves the window

    Returns:
        LevelSetSum list ordered by |xi| ascending, then xi
    """
    payload = _cache_payload(lat, prof, K, weight, window, phases, realization, k2_filter)
    key = cache_handler.cache_key(payload) if payload is not None else None
    cached = cache_handler.get_arrays(key) if key is not None else None
    if cached is not None:
        levels, counts, values = cached["levels"], cached["counts"], cached["values"]
    else:
        levels, counts, values = _level_arrays(lat, prof, K, weight, window, phases, realization, k2_filter)
        if key is not None:
            cache_handler.set_arrays(key, payload, levels=levels, counts=counts, values=values)
    den = float(lat.L) ** 2
    order = defect_order(levels)
    return [LevelSetSum(int(levels[i]), den, complex(values[i]), int(counts[i])) for i in order]


def export_level_sets(levels: Sequence[LevelSetSum], path: str) -> str:
    """Stream a level-set profile to CSV (xi_num, xi_den, count, re, im)."""
    rows = ((lv.xi_num, lv.xi_den, lv.count, lv.value.real, lv.value.imag) for lv in levels)
    return results_manager.write_csv(path, ["xi_num", "xi_den", "count", "re", "im"], rows)


# ---------------------------------------------------------------------------
# Sums
# ---------------------------------------------------------------------------

def resonant_sum_fast(lat: LatticeSpec, prof: SpectralProfile, K: Sequence[float],
                      phases: Optional[PhaseEnsemble] = None, realization: int = 0) -> tuple[complex, int]:
    """
    Delta omega = 0 stratum through primitive directions.

    For A = 0 every window B contributes; for A != 0 with primitive direction d, B runs over
    the line lambda * d_perp inside the window.

    Returns:
        (sum of eta_{K1} conj(eta_{K2}) eta_{K3}, count)
    """
    k = np.array(lat.to_integer(K), dtype=np.int64)
    sites = lat.integer_sites
    reach = int(np.max(np.abs(sites))) if sites.size else 0
    kmax = int(np.max(np.abs(k)))
    grid = SiteGrid(lat, prof, 2 * reach + kmax, phases, realization)
    members = np.zeros((2 * reach + 1, 2 * reach + 1), dtype=bool)
    members[sites[:, 0] + reach, sites[:, 1] + reach] = True
    radius = lat.B * lat.L + math.hypot(float(k[0]), float(k[1]))

    values = []
    count = 0
    for n1 in sites:
        a = n1 - k
        if a[0] == 0 and a[1] == 0:
            n3 = sites
        else:
            g = math.gcd(int(a[0]), int(a[1]))
            p = np.array([a[1] // g, -(a[0] // g)], dtype=np.int64)
            lam_max = int(radius / math.hypot(float(p[0]), float(p[1]))) + 1
            lam = np.arange(-lam_max, lam_max + 1, dtype=np.int64)
            n3 = k[None, :] + lam[:, None] * p[None, :]
            ok = np.all(np.abs(n3) <= reach, axis=1)
            n3 = n3[ok]
            n3 = n3[members[n3[:, 0] + reach, n3[:, 1] + reach]]
        n2 = n1[None, :] + n3 - k[None, :]
        f1 = grid.lookup(n1[0], n1[1])
        w = f1 * np.conj(grid.lookup(n2[:, 0], n2[:, 1])) * grid.lookup(n3[:, 0], n3[:, 1])
        values.append(w)
        count += int(n3.shape[0])
    total = compensated_sum(np.concatenate(values)) if values else 0j
    return total, count


def resonant_sum(lat: LatticeSpec, prof: SpectralProfile, K: Sequence[float], method: str = "fast",
                 phases: Optional[PhaseEnsemble] = None, realization: int = 0) -> complex:
    """Exact sum over the Delta omega = 0 stratum (method 'fast' or 'levels')."""
    if method == "fast":
        return resonant_sum_fast(lat, prof, K, phases, realization)[0]
    for level in level_set_profile(lat, prof, K, phases=phases, realization=realization):
        if level.xi_num == 0:
            return level.value
    return 0j


def reduce_levels(levels: Sequence[LevelSetSum], kernel: Kernel) -> complex:
    """sum over levels of value * kernel(xi), in the stored |xi| order, compensated."""
    if not levels:
        return 0j
    nums = np.array([lv.xi_num for lv in levels], dtype=np.int64)
    den = levels[0].xi_den
    values = np.array([lv.value for lv in levels], dtype=complex)
    weights = np.zeros(len(levels), dtype=complex)
    nonzero = nums != 0
    weights[nonzero] = kernel.func(nums[nonzero] / den)
    if np.any(~nonzero):
        if kernel.zero_value is None:
            raise KernelError(f"kernel '{kernel.name}' has no value at 0 but the resonant stratum is nonempty")
        weights[~nonzero] = kernel.zero_value
    return compensated_sum(values * weights)


def kernel_sum(lat: LatticeSpec, prof: SpectralProfile, K: Sequence[float], kernel: Kernel, weight: str = "eta",
               window: Optional[float] = None, phases: Optional[PhaseEnsemble] = None, realization: int = 0,
               k2_filter: bool = False) -> complex:
    """
    sum over triples of weight * kernel(Delta omega), reduced level by level.

    Raises:
        KernelError: kernel.zero_value missing while the resonant stratum is nonempty
    """
    levels = level_set_profile(lat, prof, K, weight=weight, window=window, phases=phases, realization=realization,
                               k2_filter=k2_filter)
    return reduce_levels(levels, kernel)


def asymptotic_constants(prof: SpectralProfile, K: Sequence[float], L_values: Sequence[float], delta: float = 0.3,
                         continuum_T: Optional[float] = None) -> list[dict]:
    """
    Per L: the fitted constants of the level-set bounds and the resonant ratio.

    Returns:
        One dict per L with max_level/L^(2+d), harmonic/L^(4+2d), nonresonant/L^(4+d),
        nonresonant/L^5, resonant ratio zeta(2) S / (2 L^2 log L) and, when continuum_T is
        given, its relative deviation.
    """
    report = []
    for L in L_values:
        lat = LatticeSpec(L, prof.radius)
        levels = level_set_profile(lat, prof, K)
        values = np.array([abs(lv.value) for lv in levels])
        nonzero = [lv for lv in levels if lv.xi_num != 0]
        harmonic = math.fsum(abs(lv.value) / abs(lv.xi) for lv in nonzero)
        nonresonant = abs(compensated_sum(lv.value for lv in nonzero))
        resonant = next((lv.value for lv in levels if lv.xi_num == 0), 0j)
        ratio = ZETA_2 * resonant.real / (2.0 * L * L * math.log(L))
        row = {
            "L": L,
            "max_level": float(values.max()) if values.size else 0.0,
            "max_level_const": float(values.max()) / L ** (2 + delta) if values.size else 0.0,
            "harmonic_const": harmonic / L ** (4 + 2 * delta),
            "nonresonant_const": nonresonant / L ** (4 + delta),
            "nonresonant_naive_const": nonresonant / L ** 5,
            "resonant_sum": resonant,
            "resonant_ratio": ratio,
        }
        if continuum_T:
            row["resonant_rel_dev"] = abs(ratio - continuum_T) / abs(continuum_T)
        print(f"[INFO] [{PRINT_PREFIX}] L={L}: resonant ratio {ratio:.6g}, max level const {row['max_level_const']:.4g}")
        report.append(row)
    return report
