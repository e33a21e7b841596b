"""
Tests for resonance defects, level-set profiles, kernel sums and resonant asymptotics on Z_L^2.
"""

# Standard library imports
import csv
import math
from collections import defaultdict

# Third-party imports
import numpy as np
import pytest

# Local imports
from src.datamanager import cache_handler
from src.numerics import continuum_kinetic, lattice_resonance
from src.numerics.errors import KernelError
from src.numerics.initial_data import LatticeSpec, PhaseEnsemble, make_profile, site_values


def _brute_levels(lat, prof, K, k2_filter=False):
    """Level sums from the plain enumeration."""
    sums = defaultdict(complex)
    counts = defaultdict(int)
    for tr in lattice_resonance.enumerate_triples(lat, prof, K, k2_filter=k2_filter):
        f1 = complex(prof(tr.K1[0] / lat.L, tr.K1[1] / lat.L))
        f2 = complex(prof(tr.K2[0] / lat.L, tr.K2[1] / lat.L))
        f3 = complex(prof(tr.K3[0] / lat.L, tr.K3[1] / lat.L))
        sums[tr.defect_num] += f1 * f2.conjugate() * f3
        counts[tr.defect_num] += 1
    return sums, counts


def test_resonant_count_flat_unit_lattice():
    """L=1, B=1.5, K=0: 81 pairs, 33 of them resonant."""
    lat = LatticeSpec(1, 1.5)
    prof = make_profile("flat", radius=1.5)
    triples = list(lattice_resonance.enumerate_triples(lat, prof, (0, 0)))
    assert len(triples) == 81
    assert sum(tr.resonant for tr in triples) == 33

    levels = lattice_resonance.level_set_profile(lat, prof, (0, 0))
    assert sum(lv.count for lv in levels) == 81
    assert levels[0].xi_num == 0 and levels[0].count == 33
    value, count = lattice_resonance.resonant_sum_fast(lat, prof, (0, 0))
    assert count == 33
    assert value == pytest.approx(33.0)


def test_defect_is_exact_integer_identity():
    lat = LatticeSpec(3, 1.0)
    for tr in lattice_resonance.enumerate_triples(lat, make_profile("bump"), (1 / 3, 0)):
        k = (1, 0)
        omega = (k[0] ** 2 + k[1] ** 2 - tr.K1[0] ** 2 - tr.K1[1] ** 2 + tr.K2[0] ** 2 + tr.K2[1] ** 2
                 - tr.K3[0] ** 2 - tr.K3[1] ** 2)
        assert omega == tr.defect_num
        assert (tr.K1[0] - tr.K2[0] + tr.K3[0], tr.K1[1] - tr.K2[1] + tr.K3[1]) == k


@pytest.mark.parametrize("k2_filter", [False, True])
def test_level_sets_match_brute_force(k2_filter):
    lat = LatticeSpec(3, 1.0)
    prof = make_profile("shifted_bump", radius=1.0)
    K = (1 / 3, -1 / 3)
    sums, counts = _brute_levels(lat, prof, K, k2_filter)
    levels = lattice_resonance.level_set_profile(lat, prof, K, k2_filter=k2_filter)
    assert {lv.xi_num: lv.count for lv in levels} == dict(counts)
    for lv in levels:
        assert abs(lv.value - sums[lv.xi_num]) <= 1e-12 * max(1.0, abs(sums[lv.xi_num]))
    # |xi| ascending order
    assert [abs(lv.xi_num) for lv in levels] == sorted(abs(lv.xi_num) for lv in levels)


@pytest.mark.parametrize("L, K", [(4, (0, 0)), (8, (0.25, 0.125)), (16, (0, 0.5))])
def test_fast_path_matches_levels(L, K):
    lat = LatticeSpec(L, 1.0)
    prof = make_profile("bump")
    value, count = lattice_resonance.resonant_sum_fast(lat, prof, K)
    resonant = next(lv for lv in lattice_resonance.level_set_profile(lat, prof, K) if lv.xi_num == 0)
    assert count == resonant.count
    assert abs(value - resonant.value) <= 1e-10 * abs(resonant.value)
    assert lattice_resonance.resonant_sum(lat, prof, K, method="levels") == resonant.value


def test_phases_enter_the_field():
    lat = LatticeSpec(4, 1.0)
    prof = make_profile("bump")
    phases = PhaseEnsemble(seed=3)
    plain = lattice_resonance.resonant_sum_fast(lat, prof, (0, 0))[0]
    phased = lattice_resonance.resonant_sum_fast(lat, prof, (0, 0), phases, 1)[0]
    assert lattice_resonance.resonant_sum(lat, prof, (0, 0), "levels", phases, 1) == pytest.approx(phased, rel=1e-10)
    assert abs(phased - plain) > 1e-6


def test_phases_reach_k2_beyond_the_disc():
    lat = LatticeSpec(1, 1.5)
    prof = make_profile("flat", radius=1.5)
    phases = PhaseEnsemble(seed=5)
    small = lattice_resonance.SiteGrid(lat, prof, 3, phases, 2)
    large = lattice_resonance.SiteGrid(lat, prof, 5, phases, 2)
    n1, n2 = np.array([2, -3, 0, 3]), np.array([1, 0, 2, 3])
    outside = small.lookup(n1, n2)
    assert np.allclose(np.abs(outside), 1.0)
    assert np.all(np.abs(outside - 1.0) > 1e-12)
    # a point keeps its phase when the grid grows
    assert np.array_equal(outside, large.lookup(n1, n2))
    sites = lat.integer_sites
    assert np.allclose(small.lookup(sites[:, 0], sites[:, 1]), site_values(lat, prof, phases, 2), rtol=0, atol=1e-15)
    fast = lattice_resonance.resonant_sum_fast(lat, prof, (0, 0), phases, 2)[0]
    assert lattice_resonance.resonant_sum(lat, prof, (0, 0), "levels", phases, 2) == pytest.approx(fast, rel=1e-12)


def test_kernel_sum_matches_direct_sum():
    lat = LatticeSpec(3, 1.0)
    prof = make_profile("bump")
    t = 2.5
    kernel = lattice_resonance.duhamel_kernel(t)
    direct = 0j
    for tr in lattice_resonance.enumerate_triples(lat, prof, (0, 0)):
        f = [complex(prof(n[0] / lat.L, n[1] / lat.L)) for n in (tr.K1, tr.K2, tr.K3)]
        x = tr.defect
        weight = t if x == 0 else (np.exp(1j * t * x) - 1) / (1j * x)
        direct += f[0] * f[1].conjugate() * f[2] * weight
    assert abs(lattice_resonance.kernel_sum(lat, prof, (0, 0), kernel) - direct) <= 1e-11 * abs(direct)


def test_kernels_and_zero_values():
    x = np.array([-2.0, 0.5, 3.0])
    t = 1.7
    plus = lattice_resonance.duhamel_kernel(t).func(x)
    minus = lattice_resonance.duhamel_kernel(t, -1).func(x)
    assert np.allclose(minus, np.conj(plus))
    assert np.allclose(lattice_resonance.sinc2_kernel(t).func(x), np.abs(plus) ** 2)
    assert lattice_resonance.sinc2_kernel(t).zero_value == t * t
    assert lattice_resonance.duhamel_kernel(t).zero_value == t


def test_missing_zero_value_raises():
    lat = LatticeSpec(2, 1.0)
    kernel = lattice_resonance.Kernel(lambda x: 1.0 / x + 0j, None, "one_over_x")
    with pytest.raises(KernelError):
        lattice_resonance.kernel_sum(lat, make_profile("bump"), (0, 0), kernel)


def test_level_set_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setattr(cache_handler, "CACHE_DIR", str(tmp_path))
    lat = LatticeSpec(4, 1.0)
    prof = make_profile("bump")
    first = lattice_resonance.level_set_profile(lat, prof, (0.25, 0))
    assert (tmp_path / "index.json").exists()
    second = lattice_resonance.level_set_profile(lat, prof, (0.25, 0))
    assert first == second
    assert cache_handler.clear_cache() >= 2


def test_export_level_sets(tmp_path):
    lat = LatticeSpec(1, 1.5)
    levels = lattice_resonance.level_set_profile(lat, make_profile("flat", radius=1.5), (0, 0))
    path = lattice_resonance.export_level_sets(levels, str(tmp_path / "levels.csv"))
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["xi_num", "xi_den", "count", "re", "im"]
    assert rows[1][0] == "0" and rows[1][2] == "33"


def test_asymptotic_constants_report():
    rows = lattice_resonance.asymptotic_constants(make_profile("bump"), (0, 0), [4, 8])
    assert [row["L"] for row in rows] == [4, 8]
    for row in rows:
        assert row["max_level_const"] > 0
        assert row["resonant_ratio"] > 0


@pytest.mark.slow
def test_resonant_sum_approaches_cr_operator():
    """zeta(2) S / (2 L^2 log L) -> T_0(eta) for the bump, with slow logarithmic convergence."""
    prof = make_profile("bump")
    T = continuum_kinetic.cr_operator(prof, prof, prof, (0, 0)).real
    deviations = []
    for L in (16, 32, 64):
        S = lattice_resonance.resonant_sum_fast(LatticeSpec(L, 1.0), prof, (0, 0))[0].real
        ratio = lattice_resonance.ZETA_2 * S / (2.0 * L * L * math.log(L))
        deviations.append(abs(ratio - T) / T)
    assert deviations[-1] <= 0.30
    assert deviations[-1] < deviations[0]
