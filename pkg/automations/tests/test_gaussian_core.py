"""
Tests for the closed-form Gaussian calculus against direct quadrature.
"""

# Standard library imports
import math

# Third-party imports
import numpy as np
import pytest
from scipy import integrate

# Local imports
from src.numerics import gaussian_core as gc
from src.numerics.errors import BudgetExceeded, DomainError

SAMPLES = [
    gc.ComplexGaussian.from_amplitude(1.3 - 0.4j, 0.7 + 0.3j, (0.2 + 0.5j, -0.1 + 0.3j)),
    gc.ComplexGaussian.from_amplitude(0.5j, 1.1 - 0.6j, (0.4j, -0.2j)),
    gc.ComplexGaussian.from_amplitude(2.0, 0.9, (0.3, 0.1 - 0.2j)),
]


def _plane(func, R: float = 9.0) -> complex:
    opts = dict(epsabs=1e-13, epsrel=1e-11)
    re = integrate.dblquad(lambda y, x: func(x, y).real, -R, R, -R, R, **opts)[0]
    im = integrate.dblquad(lambda y, x: func(x, y).imag, -R, R, -R, R, **opts)[0]
    return complex(re, im)


@pytest.mark.parametrize("f", SAMPLES)
def test_integrate_plane_matches_quadrature(f):
    """integrate_plane equals the direct 2-D integral."""
    direct = _plane(lambda x, y: complex(gc.evaluate(f, np.float64(x), np.float64(y))))
    closed = complex(gc.integrate_plane(f))
    assert abs(closed - direct) <= 1e-8 * abs(direct)


@pytest.mark.parametrize("f", SAMPLES)
def test_fourier_transform_matches_quadrature(f):
    """fourier_transform evaluated at a frequency equals int f e^{-ik.x} dx."""
    k = (0.3, -0.2)
    direct = _plane(lambda x, y: complex(gc.evaluate(f, np.float64(x), np.float64(y))) * np.exp(-1j * (k[0] * x + k[1] * y)))
    closed = complex(gc.evaluate(gc.fourier_transform(f), np.float64(k[0]), np.float64(k[1])))
    assert abs(closed - direct) <= 1e-8 * abs(direct)


@pytest.mark.parametrize("f", SAMPLES)
def test_inverse_transform_is_identity(f):
    assert gc.inverse_fourier_transform(gc.fourier_transform(f)).allclose(f, rtol=1e-12)


@pytest.mark.parametrize("f", SAMPLES)
def test_propagate_semigroup(f):
    """e^{isL} e^{itL} = e^{i(s+t)L}."""
    assert gc.propagate(gc.propagate(f, 0.4), 1.7).allclose(gc.propagate(f, 2.1), rtol=1e-10)


@pytest.mark.parametrize("f", SAMPLES)
def test_propagate_is_unitary(f):
    before = gc.norms(f)[0]
    for t in (0.5, 3.0, -2.0):
        assert abs(gc.norms(gc.propagate(f, t))[0] - before) <= 1e-10 * before


@pytest.mark.parametrize("f", SAMPLES)
def test_propagate_multiplies_transform_by_phase(f):
    """(e^{itL} f)^ = e^{-it|k|^2} f^."""
    t = 0.8
    k = (0.5, -0.25)
    lhs = gc.evaluate(gc.fourier_transform(gc.propagate(f, t)), np.float64(k[0]), np.float64(k[1]))
    rhs = np.exp(-1j * t * (k[0] ** 2 + k[1] ** 2)) * gc.evaluate(gc.fourier_transform(f), np.float64(k[0]), np.float64(k[1]))
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_plancherel():
    packet = gc.WavePacketSum(tuple(SAMPLES))
    l2 = gc.norms(packet)[0]
    l2_hat = gc.norms(packet.fourier_transform())[0]
    assert math.isclose(l2_hat, 2.0 * math.pi * l2, rel_tol=1e-10)


def test_propagate_broadcasts_over_times():
    f = SAMPLES[0]
    times = np.array([0.0, 0.5, 1.0])
    batch = gc.propagate(f, times)
    for i, t in enumerate(times):
        single = gc.propagate(f, float(t))
        assert np.isclose(np.exp(batch.log_c[i]), single.amplitude, rtol=1e-12)
        assert np.isclose(batch.z[i], single.z, rtol=1e-12)


def test_norms_of_building_block():
    """||g_{K,h}||^2 = (2pi)^-4 pi / h^2."""
    h = 0.3
    g = gc.ComplexGaussian.building_block((1.0, -2.0), h)
    assert math.isclose(gc.norms(g)[0] ** 2, (2 * math.pi) ** -4 * math.pi / (h * h), rel_tol=1e-12)


def test_evaluate_packet_on_grid():
    packet = gc.WavePacketSum(tuple(SAMPLES))
    x, y = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5), indexing="ij")
    expected = sum(gc.evaluate(f, x, y) for f in SAMPLES)
    assert np.allclose(packet.evaluate(x, y), expected, rtol=1e-14)


def test_product_integrates_to_inner_product():
    f, g = SAMPLES[0], SAMPLES[2]
    direct = _plane(lambda x, y: complex(np.conj(gc.evaluate(f, np.float64(x), np.float64(y)))
                                         * gc.evaluate(g, np.float64(x), np.float64(y))))
    closed = complex(gc.integrate_plane(gc.product([f, g], [True, False])))
    assert abs(closed - direct) <= 1e-8 * abs(direct)


def test_non_integrable_raises():
    bad = gc.ComplexGaussian.from_amplitude(1.0, -0.1 + 1j)
    with pytest.raises(DomainError):
        gc.integrate_plane(bad)
    with pytest.raises(DomainError):
        gc.fourier_transform(gc.ComplexGaussian.from_amplitude(1.0, 1j))
    with pytest.raises(DomainError):
        gc.ComplexGaussian.building_block((0, 0), 0.0)


def test_term_cap(monkeypatch):
    monkeypatch.setattr(gc, "TERM_CAP", 4)
    packet = gc.WavePacketSum(tuple(SAMPLES))
    with pytest.raises(BudgetExceeded):
        packet.product(packet)


def _random_gaussians(n: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(n):
        c = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
        z = complex(rng.uniform(0.5, 1.5), rng.uniform(-1.0, 1.0))
        xi = tuple(complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)) for _ in range(2))
        draws.append(gc.ComplexGaussian.from_amplitude(c, z, xi))
    return draws


DRAWS = _random_gaussians(100, seed=17)
NODES, WEIGHTS = np.polynomial.legendre.leggauss(1000)
BOX = 12.0


def _tensor_plane(func) -> complex:
    """Gauss-Legendre tensor rule on [-BOX, BOX]^2."""
    x, w = BOX * NODES, BOX * WEIGHTS
    X, Y = np.meshgrid(x, x, indexing="ij")
    return complex(np.sum(w[:, None] * w[None, :] * func(X, Y)))


def test_random_draws_integrate_and_transform():
    rng = np.random.default_rng(18)
    for f in DRAWS:
        direct = _tensor_plane(lambda x, y: gc.evaluate(f, x, y))
        assert abs(complex(gc.integrate_plane(f)) - direct) <= 1e-8 * abs(direct)

        k = rng.uniform(-1.0, 1.0, size=2)
        direct_hat = _tensor_plane(lambda x, y: gc.evaluate(f, x, y) * np.exp(-1j * (k[0] * x + k[1] * y)))
        closed_hat = complex(gc.evaluate(gc.fourier_transform(f), np.float64(k[0]), np.float64(k[1])))
        assert abs(closed_hat - direct_hat) <= 1e-8 * abs(direct_hat)


def test_random_draws_propagate():
    """The transform of the propagated packet, by quadrature, is e^{-it|k|^2} times the closed transform."""
    rng = np.random.default_rng(19)
    t = 0.05
    for f in DRAWS:
        moved = gc.propagate(f, t)
        k = rng.uniform(-1.0, 1.0, size=2)
        direct = _tensor_plane(lambda x, y: gc.evaluate(moved, x, y) * np.exp(-1j * (k[0] * x + k[1] * y)))
        expected = np.exp(-1j * t * (k[0] ** 2 + k[1] ** 2)) * complex(
            gc.evaluate(gc.fourier_transform(f), np.float64(k[0]), np.float64(k[1])))
        assert abs(direct - expected) <= 1e-8 * abs(expected)


def test_random_draws_invariants():
    for f in DRAWS:
        assert gc.propagate(gc.propagate(f, 0.4), -1.1).allclose(gc.propagate(f, -0.7), rtol=1e-10)
        before = gc.norms(f)[0]
        assert abs(gc.norms(gc.propagate(f, 2.5))[0] - before) <= 1e-10 * before
        l2_hat = gc.norms(gc.fourier_transform(f))[0]
        assert math.isclose(l2_hat, 2.0 * math.pi * before, rel_tol=1e-10)
