"""
Tests for the Duhamel iterates: kernels, exact and leading sums, monomial plans and the decay profile.
"""

# Standard library imports
import math

# Third-party imports
import numpy as np
import pytest
from scipy import integrate

# Local imports
from src.numerics import continuum_kinetic as ck
from src.numerics import duhamel
from src.numerics import gaussian_core as gc
from src.numerics.errors import DomainError, GuardViolation
from src.numerics.initial_data import LatticeSpec, PhaseEnsemble, ScalingParams, make_profile, validate_regime
from src.utils.utils import loglog_slope

C = (2.0 * math.pi) ** -4


def _double_time_quad(a: float, b: float, t: float) -> complex:
    opts = dict(epsabs=1e-13, epsrel=1e-11)
    re = integrate.dblquad(lambda sp, s: math.cos(s * a - sp * b), 0.0, t, 0.0, lambda s: s, **opts)[0]
    im = integrate.dblquad(lambda sp, s: math.sin(s * a - sp * b), 0.0, t, 0.0, lambda s: s, **opts)[0]
    return complex(re, im)


@pytest.mark.parametrize("a, b", [(1.3, 0.7), (0.0, 0.5), (0.8, 0.8), (0.9, 0.0), (0.0, 0.0), (-2.0, 3.5)])
def test_double_time_kernel_matches_quadrature(a, b):
    t = 1.5
    closed = complex(duhamel.double_time_kernel(a, b, t))
    assert abs(closed - _double_time_quad(a, b, t)) <= 1e-9
    if a == 0 and b == 0:
        assert closed == pytest.approx(t * t / 2.0)


def test_double_time_kernel_broadcasts():
    a = np.array([0.0, 1.0, 0.5])
    out = duhamel.double_time_kernel(a, 0.5, 2.0)
    assert out.shape == (3,)
    assert out[2] == pytest.approx(complex(duhamel.double_time_kernel(0.5, 0.5, 2.0)))


def test_two_pi_ledger():
    assert duhamel.leading_two_pi_power(1) == -4
    assert duhamel.leading_two_pi_power(2) == -8
    assert duhamel.LEADING_PREFACTOR == pytest.approx(C)


def test_v1_exact_matches_leading_sum():
    """With h << sigma << 1/L the Gaussian kernel reduces to the lattice Duhamel sum."""
    params = ScalingParams(h=1e-5, L=1, sigma=1e-3)
    prof = make_profile("flat", radius=1.5)
    phases = PhaseEnsemble(seed=2)
    t = 0.5
    exact = duhamel.v1_exact(params, prof, (0, 0), t, phases)
    leading = duhamel.v1_leading(params, prof, (0, 0), t, phases)
    conjugate_kernel = duhamel.v1_leading(params, prof, (0, 0), t, phases, direction=-1)
    gap = abs(exact - leading)
    assert gap <= 1e-3 * abs(leading)
    assert abs(exact - conjugate_kernel) > 10.0 * gap


def test_single_mode_iterates():
    """A single mode rotates: c t at first order and c^2 t^2 / 2 at second."""
    params = ScalingParams(h=1e-5, L=1, sigma=1e-3)
    prof = make_profile("single_mode")
    t = 0.7
    assert duhamel.v1_leading(params, prof, (0, 0), t) == pytest.approx(C * t)
    assert duhamel.v2_leading(params, prof, (0, 0), t) == pytest.approx(C * C * t * t / 2.0)
    assert duhamel.v1_leading(params, prof, (0, 0), 0.0) == 0


def test_expansion_without_exact_terms():
    params = ScalingParams(h=1e-5, L=1, sigma=1e-3)
    result = duhamel.expansion(params, make_profile("single_mode"), (0, 0), 1.0, exact=False)
    assert result.v1_exact is None and result.v2_exact is None
    assert result.remainder(1) is None
    rows = result.rows()
    assert [(row[3], row[4]) for row in rows] == [(1, "leading"), (2, "leading")]
    assert result.budget_used == {1: 1, 2: 2}
    assert len(rows[0]) == len(duhamel.EXPANSION_COLUMNS)


def test_time_guard():
    params = ScalingParams(h=0.1, L=4, sigma=0.2)
    with pytest.raises(GuardViolation):
        duhamel.v1_exact(params, make_profile("bump"), (0, 0), 2.0)
    with pytest.raises(GuardViolation):
        duhamel.v2_exact(params, make_profile("bump"), (0, 0), 2.0)


def test_v1_plan_evaluates_the_leading_sum():
    params = ScalingParams(h=1e-4, L=4, sigma=1e-2)
    prof = make_profile("bump")
    sites = duhamel.SiteIndex(LatticeSpec(4, prof.radius), prof)
    t = 1.3
    plan = duhamel.v1_plan(sites, (0.25, 0), t)
    direct = duhamel.v1_leading(params, prof, (0.25, 0), t)
    assert abs(plan.evaluate(sites.values) - direct) <= 1e-10 * abs(direct)
    batch = plan.evaluate_batch(np.stack([sites.values, 2.0 * sites.values]))
    assert batch[1] == pytest.approx(8.0 * batch[0])


def test_v2_plan_evaluates_v2_leading():
    params = ScalingParams(h=1e-4, L=2, sigma=1e-2)
    prof = make_profile("bump")
    sites = duhamel.SiteIndex(LatticeSpec(2, prof.radius), prof)
    plan = duhamel.v2_plan(sites, (0, 0), 0.8)
    assert len(plan) == duhamel.quintuple_count(sites, (0, 0))
    assert plan.evaluate(sites.values) == pytest.approx(duhamel.v2_leading(params, prof, (0, 0), 0.8))


def test_plan_extend_checks_degree():
    prof = make_profile("bump")
    sites = duhamel.SiteIndex(LatticeSpec(2, prof.radius), prof)
    first = duhamel.v1_plan(sites, (0, 0), 1.0)
    merged = first.extend(duhamel.v1_plan(sites, (0, 0), 2.0))
    assert len(merged) == 2 * len(first)
    with pytest.raises(DomainError):
        first.extend(duhamel.v2_plan(sites, (0, 0), 1.0))


def test_site_index_lookup():
    prof = make_profile("bump")
    sites = duhamel.SiteIndex(LatticeSpec(4, prof.radius), prof)
    i = sites.lookup(sites.coords[:, 0], sites.coords[:, 1])
    assert np.array_equal(i, np.arange(sites.count))
    assert sites.lookup(100, 0) == -1
    assert np.all(sites.values != 0)


def test_gamma_is_one_at_time_zero():
    params = ScalingParams(h=1e-4, L=4, sigma=1e-2)
    report = duhamel.gamma_deviation(params, make_profile("bump"), (0, 0), [0.0, 1.0])
    assert report["deviation"][0] < 1e-3
    assert report["triples"] > 0


def test_deterministic_prediction_needs_eps():
    with pytest.raises(DomainError):
        duhamel.deterministic_prediction(ScalingParams(h=1e-4, L=4, sigma=1e-2), make_profile("bump"), (0, 0), 1.0)


def test_decay_profile_of_standard_gaussians():
    """u = v = w = e^{-|k|^2} gives pi^2 / (3 + t^2 + 2it)."""
    g = gc.WavePacketSum((gc.ComplexGaussian.from_amplitude(1.0, 1.0),))
    times = np.array([0.0, 0.5, 2.0, 10.0, 20.0, 40.0, 80.0])
    values = duhamel.decay_profile(g, g, g, times)
    expected = np.pi ** 2 / (3.0 + times ** 2 + 2j * times)
    assert np.allclose(values, expected, rtol=1e-12)
    slope, _ = loglog_slope(times[3:], np.abs(values[3:]))
    assert abs(slope + 2.0) < 0.05


def test_default_xi_grid_has_zero_node():
    grid = duhamel.default_xi_grid(make_profile("bump"), (0, 0), spacing=0.05)
    assert np.any(grid == 0)
    assert grid[-1] >= 2.0


def test_v2_exact_matches_leading_for_single_mode():
    params = ScalingParams(h=1e-5, L=1, sigma=1e-3)
    prof = make_profile("single_mode")
    t = 0.7
    exact = duhamel.v2_exact(params, prof, (0, 0), t)
    leading = duhamel.v2_leading(params, prof, (0, 0), t)
    assert leading == pytest.approx(C * C * t * t / 2.0)
    assert abs(exact - leading) <= 1e-3 * abs(leading)


def test_v2_exact_matches_leading_with_phases():
    params = ScalingParams(h=1e-5, L=1, sigma=1e-3)
    prof = make_profile("flat", radius=1.5)
    phases = PhaseEnsemble(seed=2)
    t = 0.5
    exact = duhamel.v2_exact(params, prof, (0, 0), t, phases)
    leading = duhamel.v2_leading(params, prof, (0, 0), t, phases)
    assert abs(exact - leading) <= 1e-3 * abs(leading)


def test_derivative_ratio_is_finite_and_step_independent():
    params = ScalingParams(h=1e-4, L=4, sigma=1e-2)
    prof = make_profile("bump")
    s = [0.0, 1.0, 5.0]
    coarse = duhamel.derivative_ratio(params, prof, (0, 0), s)
    fine = duhamel.derivative_ratio(params, prof, (0, 0), s, step=1e-5)
    assert coarse["s"] == s
    assert np.all(np.isfinite(coarse["ratio"]))
    assert 0.0 <= coarse["constant"] < 1e3
    assert np.allclose(fine["ratio"], coarse["ratio"], rtol=1e-2, atol=1e-6 * max(coarse["constant"], 1.0))


def test_deterministic_prediction_formulas():
    L, eps, t = 4, 0.1, 1.0
    params = ScalingParams(h=1e-4, L=L, sigma=1e-2, eps=eps)
    prof = make_profile("bump")
    profile = ck.khat_profile(prof, (0, 0), duhamel.default_xi_grid(prof, (0, 0)))
    pred = duhamel.deterministic_prediction(params, prof, (0, 0), t, profile=profile)
    quasi = ck.quasi_resonant_integral(profile.reflected(), t)
    assert pred["quasi_resonant_integral"] == pytest.approx(quasi, rel=1e-12)
    assert pred["window1"] == pytest.approx(-1j * eps ** 3 * L ** 4 * C * quasi, rel=1e-12)
    assert pred["window2"] == pytest.approx(math.pi * pred["resonant_line"], rel=1e-12)
    assert pred["cr_operator"] == pytest.approx(ck.cr_operator(prof, prof, prof, (0, 0)), rel=1e-12)
    lo, hi = validate_regime(params).windows["window1"]
    assert (pred["window"] == "window1") == (lo <= t <= hi)
    # at short times the kernel is t, so the integral is t times the total mass of the profile
    short = 1e-3
    mass = ck.quasi_resonant_integral(profile.reflected(), short) / short
    assert abs(mass - integrate.trapezoid(profile.values, profile.xi)) <= 1e-2 * abs(mass)


def test_decay_profile_at_time_zero_matches_quadrature():
    u = gc.WavePacketSum((gc.ComplexGaussian.from_amplitude(1.0, 1.0 + 0.2j, (0.1, 0.0)),))
    v = gc.WavePacketSum((gc.ComplexGaussian.from_amplitude(0.8 + 0.3j, 0.9, (0.0, 0.2j)),))
    w = gc.WavePacketSum((gc.ComplexGaussian.from_amplitude(1.2, 1.1 - 0.1j),))
    k = (0.2, -0.1)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    x, wx = 6.5 * nodes, 6.5 * weights
    A1, A2 = np.meshgrid(x, x, indexing="ij")
    a1, a2, wa = A1.ravel(), A2.ravel(), np.outer(wx, wx).ravel()
    fu = u.evaluate(k[0] + a1, k[1] + a2)
    fw = w.evaluate(k[0] + a1, k[1] + a2)
    direct = 0j
    for block in range(0, a1.shape[0], 512):
        sl = slice(block, block + 512)
        fv = v.evaluate(k[0] + a1[sl, None] + a1[None, :], k[1] + a2[sl, None] + a2[None, :])
        direct += np.sum((wa[sl] * fu[sl])[:, None] * np.conj(fv) * (wa * fw)[None, :])
    closed = duhamel.decay_profile(u, v, w, [0.0], k)[0]
    assert abs(closed - direct) <= 1e-8 * abs(direct)


@pytest.mark.slow
def test_leading_sum_approaches_the_continuum_integral():
    """v1_leading / L^4 tends to the quasi-resonant integral at t = L^0.5, at least at rate 1/L."""
    prof = make_profile("bump")
    profile = ck.khat_profile(prof, (0, 0), duhamel.default_xi_grid(prof, (0, 0), spacing=0.01))
    Ls = np.array([16.0, 32.0, 64.0])
    errors = []
    for L in Ls:
        t = L ** 0.5
        lattice = duhamel.v1_leading(ScalingParams(h=1e-4, L=int(L), sigma=1e-2), prof, (0, 0), t) / L ** 4
        continuum = C * ck.quasi_resonant_integral(profile.reflected(), t)
        errors.append(abs(lattice - continuum) / abs(continuum))
    assert errors[0] > errors[1] > errors[2]
    slope, _ = loglog_slope(1.0 / Ls, np.array(errors))
    assert slope >= 0.7
