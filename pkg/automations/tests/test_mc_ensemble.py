"""
Tests for random-phase pairings, Monte-Carlo second moments and the kinetic sums.
"""

# Third-party imports
import numpy as np
import pytest

# Local imports
from src.numerics import duhamel, mc_ensemble
from src.numerics.errors import DomainError
from src.numerics.initial_data import ScalingParams, make_profile


def _params(L=2, eps=None):
    return ScalingParams(h=1e-4, L=L, sigma=1e-2, eps=eps)


def test_pairing_expectation():
    assert mc_ensemble.pairing_expectation([0, 1], [1, 0]) == 1
    assert mc_ensemble.pairing_expectation([0, 0], [0, 1]) == 0
    assert mc_ensemble.pairing_expectation([0, 0, 2], [2, 0, 0]) == 1
    assert mc_ensemble.pairing_expectation([0, 1], [0, 1], eta=[2.0, 1j]) == pytest.approx(4.0)


def test_paired_second_moment_of_a_single_monomial():
    plan = duhamel.MonomialPlan(np.array([[0, 1]]), np.array([[2]]), np.array([3.0 + 0j]))
    eta = np.array([1.0, 2.0, 0.5], dtype=complex)
    assert mc_ensemble.paired_second_moment(plan, eta) == pytest.approx(9.0 * 1.0 * 4.0 * 0.25)
    empty = duhamel.MonomialPlan(np.zeros((0, 2), dtype=int), np.zeros((0, 1), dtype=int), np.zeros(0, dtype=complex))
    assert mc_ensemble.paired_second_moment(empty, eta) == 0


def test_v1_second_moment_matches_sampling():
    report = mc_ensemble.v1_second_moment(_params(), make_profile("bump"), (0, 0), 1.0, n_samples=3000, seed=9)
    assert report["terms"] > 0
    assert abs(report["mc"] - report["exact"]) <= 4.0 * report["mc_stderr"]
    assert report["approx"] > 0


def test_eps2_coefficient_matches_e0():
    params = _params(L=4, eps=0.1)
    prof = make_profile("bump")
    report = mc_ensemble.variance_mc(params, prof, [(0, 0)], 1.0, n_samples=400, seed=1, second_order=False)
    mean, stderr = report.estimates[0].decomposition["eps2"]
    e0 = mc_ensemble.e0_analytic(params, prof, (0, 0))
    # a single site sits under the window, so |<phi>|^2 does not fluctuate
    assert mean == pytest.approx(e0, rel=1e-9)
    assert stderr <= 1e-9 * e0


def test_ladder_fit_recovers_the_decomposition():
    """Without the second iterate the moment is exactly cubic in eps^2."""
    params = _params(L=2, eps=1.0)
    report = mc_ensemble.variance_mc(params, make_profile("bump"), [(0, 0)], 1.0, n_samples=200, seed=3,
                                     eps_ladder=[1.0, 0.5, 0.25], second_order=False)
    estimate = report.estimates[0]
    fitted = estimate.ladder["fitted"]
    assert fitted[0] == pytest.approx(estimate.decomposition["eps2"][0], rel=1e-6)
    assert fitted[1] == pytest.approx(estimate.decomposition["eps4"][0], rel=1e-6, abs=1e-14)
    assert fitted[2] == pytest.approx(estimate.decomposition["eps6"][0], rel=1e-4, abs=1e-16)


def test_distinct_sites_are_uncorrelated():
    params = _params(L=4, eps=0.1)
    report = mc_ensemble.variance_mc(params, make_profile("bump"), [(0, 0), (0.25, 0)], 1.0, n_samples=300, seed=5,
                                     second_order=False)
    assert len(report.covariances) == 1
    cov = report.covariances[0]
    assert abs(cov["mean"]) <= 4.0 * cov["stderr"] + 1e-30
    assert report.as_dict()["eps_ladder"] == [0.1, 0.05, 0.025]


def test_variance_mc_argument_checks():
    params = _params()
    with pytest.raises(DomainError):
        mc_ensemble.variance_mc(params, make_profile("bump"), [(0, 0)], 1.0, n_samples=50, seed=0)
    with pytest.raises(DomainError):
        mc_ensemble.variance_mc(params, make_profile("bump"), [(0, 0)], 1.0, n_samples=200, seed=0, eps_ladder=[1.0, 0.5])
    with pytest.raises(DomainError):
        mc_ensemble.e1_antisymmetry(params, make_profile("bump"), (0, 0), 1.0, n_samples=10, seed=0)


def test_e1_pairing_correlation_is_real_and_odd():
    """Only Delta omega = 0 triples pair with <phi>, so E[<phi> conj(V1)] is real and E1 vanishes."""
    params = _params()
    prof = make_profile("bump")
    forward = mc_ensemble.e1_pairing(params, prof, (0, 0), 1.5)
    backward = mc_ensemble.e1_pairing(params, prof, (0, 0), -1.5)
    corr = forward["correlation"]
    assert forward["paired_terms"] > 0
    assert corr.real > 0
    assert abs(corr.imag) <= 1e-12 * abs(corr)
    assert abs(forward["e1"]) <= 1e-12 * abs(corr)
    assert backward["correlation"] == pytest.approx(-corr, rel=1e-12)


def test_e1_pairing_of_flat_unit_lattice():
    """Flat unit lattice: 17 paired triples, each contributing c t."""
    params = ScalingParams(h=1e-4, L=1, sigma=1e-2)
    result = mc_ensemble.e1_pairing(params, make_profile("flat", radius=1.5), (0, 0), 0.8)
    assert result["paired_terms"] == 17
    window = params.sigma ** 2 / (params.sigma ** 2 + params.h ** 2)
    assert result["correlation"] == pytest.approx(17 * duhamel.LEADING_PREFACTOR * 0.8 * window, rel=1e-12)


def test_e1_antisymmetry():
    params = ScalingParams(h=1e-4, L=1, sigma=1e-2)
    prof = make_profile("flat", radius=1.5)
    at_zero = mc_ensemble.e1_antisymmetry(params, prof, (0, 0), 0.0, n_samples=500, seed=0)
    assert at_zero["sum"] == 0.0

    t = 1.0
    result = mc_ensemble.e1_antisymmetry(params, prof, (0, 0), t, n_samples=2000, seed=2)
    exact = mc_ensemble.e1_pairing(params, prof, (0, 0), t)["correlation"]
    # the sampled correlation is far from zero and matches the pairing value
    assert abs(exact) > 10.0 * result["correlation_t_stderr"]
    assert abs(result["correlation_t"] - exact) <= 4.0 * result["correlation_t_stderr"]
    # it flips sign with t, so forward plus backward cancels
    assert abs(result["correlation_sum"]) <= 4.0 * result["correlation_stderr"]
    assert abs(result["sum"]) <= 4.0 * result["stderr"] + 1e-20


def test_eps4_coefficients_cancel_between_t_and_minus_t():
    """E|<v(t)>|^2 + E|<v(-t)>|^2 has no eps^4 term."""
    params = _params(L=2, eps=0.1)
    prof = make_profile("bump")
    forward = mc_ensemble.variance_mc(params, prof, [(0, 0)], 1.2, n_samples=400, seed=4, second_order=False)
    backward = mc_ensemble.variance_mc(params, prof, [(0, 0)], -1.2, n_samples=400, seed=4, second_order=False)
    m_fwd, s_fwd = forward.estimates[0].decomposition["eps4"]
    m_bwd, s_bwd = backward.estimates[0].decomposition["eps4"]
    assert abs(m_fwd + m_bwd) <= 3.0 * (s_fwd + s_bwd) + 1e-30
    # the eps^2 terms add instead of cancelling
    e2_fwd = forward.estimates[0].decomposition["eps2"][0]
    assert backward.estimates[0].decomposition["eps2"][0] == pytest.approx(e2_fwd, rel=1e-12)


@pytest.mark.slow
def test_e1_antisymmetry_at_acceptance_scale():
    L = 4
    params = _params(L=L)
    prof = make_profile("bump")
    t = L ** 0.5
    result = mc_ensemble.e1_antisymmetry(params, prof, (0, 0), t, n_samples=10_000, seed=11)
    exact = mc_ensemble.e1_pairing(params, prof, (0, 0), t)["correlation"]
    assert abs(result["sum"]) <= 3.0 * result["stderr"]
    assert abs(result["correlation_sum"]) <= 3.0 * result["correlation_stderr"]
    assert abs(result["correlation_t"] - exact) <= 3.0 * result["correlation_t_stderr"]


def test_kinetic_sum_vanishes_at_time_zero_and_for_flat_spectrum():
    prof = make_profile("bump")
    assert mc_ensemble.kinetic_sum(_params(L=4), prof, (0, 0), 0.0) == 0.0
    flat = make_profile("flat", radius=1.0)
    assert mc_ensemble.kinetic_sum(_params(L=4), flat, (0, 0), 2.0) == pytest.approx(0.0, abs=1e-9)


def test_kinetic_sum_is_real_and_finite():
    value = mc_ensemble.kinetic_sum(_params(L=8), make_profile("bump"), (0.125, 0), 3.0)
    assert np.isfinite(value)


@pytest.mark.slow
def test_kinetic_sum_grows_like_t_L4():
    """Below t ~ L the sinc^2 sum is a Riemann sum, so value / (t L^4) settles as L grows."""
    prof = make_profile("bump")
    t = 2.0
    scaled = [mc_ensemble.kinetic_sum(_params(L=L), prof, (0, 0), t) / (t * L ** 4) for L in (16, 32)]
    assert scaled[0] != 0.0
    assert scaled[1] == pytest.approx(scaled[0], rel=0.1)


def test_moment_estimate_serializes():
    report = mc_ensemble.variance_mc(_params(eps=0.2), make_profile("bump"), [(0, 0)], 0.5, n_samples=100, seed=0)
    data = report.as_dict()
    assert data["n_samples"] == 100
    assert set(data["estimates"][0]["decomposition"]) == {"eps2", "eps4", "eps6"}
