"""
Tests for the continuum resonant operator, level-set profiles, principal values and the WK operator.
"""

# Standard library imports
import csv
import math

# Third-party imports
import numpy as np
import pytest
from scipy.special import erf

# Local imports
from src.numerics import continuum_kinetic as ck
from src.numerics.errors import DomainError, ToleranceFailure
from src.numerics.initial_data import make_profile

FINE_GRID = 0.01 * np.arange(-600, 601)


def _synthetic(values) -> ck.KineticProfile:
    return ck.KineticProfile(FINE_GRID, values)


def test_chart_points_lie_on_the_level_set():
    chart = ck.MicrocanonicalChart((0.2, -0.1), 0.7)
    r = np.array([0.1, 0.5, 2.0])
    a, b = chart.points(r, 0.3, np.array([-1.0, 0.0, 1.5]))
    assert np.allclose(chart.defect(a, b), 0.7, rtol=0, atol=1e-14)
    K1, K2, K3 = chart.triple(r, 0.3, 0.0)
    assert np.allclose(K1 - K2 + K3, np.broadcast_to([0.2, -0.1], K1.shape))


def test_khat_at_zero_is_the_cr_operator():
    prof = make_profile("bump")
    T = ck.cr_operator(prof, prof, prof, (0.0, 0.0))
    R0 = ck.khat_profile(prof, (0.0, 0.0), [0.0]).values[0]
    assert T.real > 0
    assert abs(R0 - T) <= 1e-4 * abs(T)
    doubled = ck.khat_profile(prof, (0.0, 0.0), [0.0], times_2pi=True)
    assert doubled.values[0] == pytest.approx(2.0 * math.pi * R0)
    assert doubled.times_2pi


def test_cr_operator_conjugates_the_middle_argument():
    bump = make_profile("bump")
    T = ck.cr_operator(bump, bump, bump, (0.1, 0.0))
    rotated = make_profile("bump", amplitude=1j)
    assert ck.cr_operator(bump, rotated, bump, (0.1, 0.0)) == pytest.approx(-1j * T, rel=1e-10)
    assert ck.cr_operator(rotated, bump, bump, (0.1, 0.0)) == pytest.approx(1j * T, rel=1e-10)
    # the conjugate sits at k + a + b, symmetric in a and b, so the outer arguments commute
    u = make_profile("bump", center=(0.2, 0.0))
    w = make_profile("bump", center=(0.0, -0.1))
    assert ck.cr_operator(u, bump, w, (0.1, 0.0)) == pytest.approx(ck.cr_operator(w, bump, u, (0.1, 0.0)), rel=1e-4)


def test_cr_operator_vanishes_outside_reachable_support():
    prof = make_profile("bump")
    assert ck.cr_operator(prof, prof, prof, (3.5, 0.0)) == 0
    assert ck.wk_operator(prof, (3.5, 0.0)) == 0


def test_wk_operator_vanishes_for_flat_spectrum():
    total, terms = ck.wk_operator(make_profile("flat", radius=1.0), (0.0, 0.0), parts=True)
    assert abs(total) <= 1e-10 * max(abs(v) for v in terms.values())
    assert set(terms) == {"n1n2n3", "n n2n3", "n n1n3", "n n1n2"}


@pytest.mark.parametrize("k", [(0.0, 0.0), (0.3, -0.2)])
def test_wk_operator_vanishes_for_rayleigh_jeans(k):
    """The bracket is proportional to the resonance defect for n = 1/(a + b|k|^2)."""
    total, terms = ck.wk_operator(make_profile("rayleigh_jeans", a=1.0, b=0.5, radius=1.5), k, parts=True)
    assert abs(total) <= 1e-8 * max(abs(v) for v in terms.values())


def test_pv_limit_of_even_profile():
    """R_hat = e^{-xi^2}: finite part pi erf(t/2), limit pi."""
    profile = _synthetic(np.exp(-FINE_GRID ** 2))
    for t in (0.5, 3.0):
        result = ck.pv_limit(profile, t)
        assert result.finite == pytest.approx(math.pi * erf(t / 2.0), rel=1e-5)
        assert result.limit == pytest.approx(math.pi, rel=1e-6)
    assert ck.quasi_resonant_integral(profile, 3.0) == pytest.approx(math.pi * erf(1.5), rel=1e-5)


def test_pv_limit_of_odd_profile():
    """R_hat = xi e^{-xi^2}: finite part -i sqrt(pi) (1 - e^{-t^2/4})."""
    profile = _synthetic(FINE_GRID * np.exp(-FINE_GRID ** 2))
    t = 2.0
    result = ck.pv_limit(profile, t)
    expected = -1j * math.sqrt(math.pi) * (1.0 - math.exp(-t * t / 4.0))
    assert abs(result.finite - expected) <= 1e-5 * abs(expected)
    assert abs(result.limit + 1j * math.sqrt(math.pi)) <= 1e-6
    assert ck.pv_limit(profile, 0.0).finite == 0


def test_pv_grid_checks():
    shifted = 0.01 * np.arange(-600, 600) + 0.005
    with pytest.raises(ToleranceFailure):
        ck.pv_limit(ck.KineticProfile(shifted, np.exp(-shifted ** 2)), 1.0)
    coarse = 0.1 * np.arange(-60, 61)
    with pytest.raises(ToleranceFailure):
        ck.pv_limit(ck.KineticProfile(coarse, np.exp(-coarse ** 2)), 1.0)
    lopsided = 0.01 * np.arange(-300, 601)
    with pytest.raises(DomainError):
        ck.pv_limit(ck.KineticProfile(lopsided, np.exp(-lopsided ** 2)), 1.0)


def test_time_signal_of_gaussian():
    """int e^{it xi} e^{-xi^2} dxi = sqrt(pi) e^{-t^2/4}."""
    profile = _synthetic(np.exp(-FINE_GRID ** 2))
    times = [0.0, 1.0, 2.5]
    signal = ck.time_signal(profile, times)
    expected = np.sqrt(np.pi) * np.exp(-np.square(times) / 4.0)
    assert np.allclose(signal, expected, rtol=1e-6, atol=1e-10)


def test_kinetic_profile_validation_and_reflection(tmp_path):
    with pytest.raises(DomainError):
        ck.KineticProfile([0.0, 1.0], [1.0])
    with pytest.raises(DomainError):
        ck.KineticProfile([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
    profile = ck.KineticProfile([-1.0, 0.0, 1.0], [1.0, 2.0, 3.0 + 1j])
    assert profile.symmetric
    assert np.array_equal(profile.reflected().values, np.array([3.0 + 1j, 2.0, 1.0]))
    with pytest.raises(DomainError):
        ck.KineticProfile([0.0, 1.0], [1.0, 2.0]).reflected()

    path = profile.export_csv(str(tmp_path / "khat.csv"))
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["xi", "re", "im"]
    assert len(rows) == 4


@pytest.mark.slow
def test_pv_limit_of_bump_profile_converges():
    """The finite-time quasi-resonant integral is within 5% of its limit at t = 100."""
    prof = make_profile("bump")
    grid = 0.05 * np.arange(-40, 41)
    profile = ck.khat_profile(prof, (0.0, 0.0), grid)
    result = ck.pv_limit(profile, 100.0)
    assert abs(result.finite - result.limit) <= 0.05 * abs(result.limit)


@pytest.mark.slow
def test_holder_exponent_is_positive():
    alpha, diffs = ck.holder_exponent(make_profile("bump"), (0.0, 0.0), [0.2, 0.1, 0.05])
    assert alpha > 0
    assert diffs[-1] < diffs[0]


@pytest.mark.slow
def test_smoothed_delta_matches_cr_operator():
    prof = make_profile("bump")
    T = ck.cr_operator(prof, prof, prof, (0.0, 0.0))
    box = ck._box_radius((0.0, 0.0), (prof,))
    estimate = ck.smoothed_delta_mc(ck.trilinear_integrand(prof, prof, prof), (0.0, 0.0), 0.0, box, seed=4)
    assert abs(estimate.value - T) <= max(0.02 * abs(T), 4.0 * estimate.stderr)
    assert len(estimate.per_width) == 3
