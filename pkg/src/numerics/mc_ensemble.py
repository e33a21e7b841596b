# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Random-phase ensembles: second moments of the coarse-grained observable, pairings and the kinetic sum

PRINT_PREFIX = "MONTE CARLO"

# Standard library imports
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

# Third-party imports
import numpy as np

# Local imports
from src.numerics import duhamel, lattice_resonance
from src.numerics.errors import DomainError
from src.numerics.initial_data import LatticeSpec, PhaseEnsemble, ScalingParams, SpectralProfile
from src.utils.utils import chunked, compensated_sum, ordered_map

MIN_SAMPLES = 100
REALIZATION_CHUNK = 256


@dataclass
class MomentEstimate:
    """E|<v(t)>_{K,sigma}|^2 with its split into eps^2, eps^4 and eps^6 coefficients."""
    K: tuple
    eps: float
    mean: complex
    second_moment: float
    stderr: float
    n_samples: int
    decomposition: dict = field(default_factory=dict)  # {"eps2": (mean, stderr), ...}
    ladder: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"K": list(self.K), "eps": self.eps, "mean": self.mean, "second_moment": self.second_moment,
                "stderr": self.stderr, "n_samples": self.n_samples, "decomposition": self.decomposition,
                "ladder": self.ladder}


def _mean_stderr(samples: np.ndarray) -> tuple:
    samples = np.asarray(samples)
    n = samples.shape[0]
    mean = samples.mean()
    spread = np.sqrt(np.mean(np.abs(samples - mean) ** 2) * n / max(n - 1, 1))
    return mean, float(spread / math.sqrt(n))


def pairing_expectation(plus: Sequence[int], minus: Sequence[int], eta: Optional[Sequence[complex]] = None) -> complex:
    """
    E[prod zeta_plus prod conj(zeta_minus)] for independent uniform phases.

    Args:
        plus: Unconjugated site indices (repeats allowed)
        minus: Conjugated site indices
        eta: Site amplitudes; None means unimodular sites

    Returns:
        0 unless plus and minus agree as multisets, else the eta product
    """
    if sorted(plus) != sorted(minus):
        return 0j
    if eta is None:
        return 1 + 0j
    eta = np.asarray(eta, dtype=complex)
    return complex(np.prod(eta[list(plus)]) * np.prod(np.conj(eta[list(minus)])))


def paired_second_moment(plan: duhamel.MonomialPlan, eta: np.ndarray, block_rows: int = 128) -> complex:
    """
    E|sum_q plan_q(zeta)|^2 by enumerating every pair (q, q') with a nonzero pairing.

    A pair pairs when plus_q + minus_q' equals minus_q + plus_q' as multisets.
    """
    n = len(plan)
    if n == 0:
        return 0j
    terms = plan.terms(eta)
    right_plus = plan.minus  # conj of q' swaps its roles
    right_minus = plan.plus
    total = []
    for block in chunked(n, block_rows):
        left = np.concatenate([np.broadcast_to(plan.plus[block, None, :], (block.stop - block.start, n, plan.plus.shape[1])),
                               np.broadcast_to(right_plus[None, :, :], (block.stop - block.start, n, right_plus.shape[1]))],
                              axis=2)
        right = np.concatenate([np.broadcast_to(plan.minus[block, None, :], (block.stop - block.start, n, plan.minus.shape[1])),
                                np.broadcast_to(right_minus[None, :, :], (block.stop - block.start, n, right_minus.shape[1]))],
                               axis=2)
        match = np.all(np.sort(left, axis=2) == np.sort(right, axis=2), axis=2)
        rows, cols = np.nonzero(match)
        total.append(compensated_sum(terms[block][rows] * np.conj(terms[cols])))
    return compensated_sum(total)


# ---------------------------------------------------------------------------
# Per-realization pieces
# ---------------------------------------------------------------------------

class _EnsembleModel:
    """Phase-independent pieces of <v(t)>_K: window coefficients and leading V1/V2 plans."""

    def __init__(self, params: ScalingParams, prof: SpectralProfile, Ks: Sequence[Sequence[float]], t: float,
                 second_order: bool = True):
        self.lat = LatticeSpec(params.L, prof.radius)
        self.sites = duhamel.SiteIndex(self.lat, prof)
        self.eta_all = prof.on_sites(self.lat)
        freq = self.sites.frequencies
        width = params.sigma ** 2 + params.h ** 2
        self.windows, self.v1, self.v2 = [], [], []
        for K in Ks:
            dist2 = np.sum((freq - np.asarray(K, dtype=float)) ** 2, axis=1)
            self.windows.append((params.sigma ** 2 / width) * np.exp(-dist2 / (2.0 * width)))
            self.v1.append(duhamel.v1_plan(self.sites, K, t))
            self.v2.append(duhamel.v2_plan(self.sites, K, t) if second_order else None)

    def zeta(self, ensemble: PhaseEnsemble, index: int) -> np.ndarray:
        theta = ensemble.phases(index, self.lat.count)
        return (self.eta_all * np.exp(1j * theta))[self.sites.keep]

    def pieces(self, zeta: np.ndarray) -> np.ndarray:
        """(n_K, 3) array of (<phi>, V1, V2) for one realization."""
        out = np.zeros((len(self.windows), 3), dtype=complex)
        for i, window in enumerate(self.windows):
            out[i, 0] = compensated_sum(window * zeta)
            out[i, 1] = self.v1[i].evaluate(zeta)
            out[i, 2] = self.v2[i].evaluate(zeta) if self.v2[i] is not None else 0j
        return out


def _sample_pieces(model: _EnsembleModel, ensemble: PhaseEnsemble, n_samples: int) -> np.ndarray:
    """(n_samples, n_K, 3) pieces, realizations evaluated in parallel chunks and stacked in index order."""
    def run(block: slice) -> np.ndarray:
        return np.stack([model.pieces(model.zeta(ensemble, r)) for r in range(block.start, block.stop)])

    return np.concatenate(ordered_map(run, chunked(n_samples, REALIZATION_CHUNK)))


def _observable(pieces: np.ndarray, eps: float) -> np.ndarray:
    """eps <phi> - i eps^3 V1 - eps^5 V2."""
    return eps * pieces[..., 0] - 1j * eps ** 3 * pieces[..., 1] - eps ** 5 * pieces[..., 2]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

@dataclass
class EnsembleReport:
    estimates: list
    covariances: list
    seed: int
    n_samples: int
    eps_ladder: tuple

    def as_dict(self) -> dict:
        return {"estimates": [e.as_dict() for e in self.estimates], "covariances": self.covariances,
                "seed": self.seed, "n_samples": self.n_samples, "eps_ladder": list(self.eps_ladder)}


def variance_mc(params: ScalingParams, prof: SpectralProfile, Ks: Sequence[Sequence[float]], t: float, n_samples: int,
                seed: int, eps_ladder: Optional[Sequence[float]] = None, second_order: bool = True) -> EnsembleReport:
    """
    Random-phase estimate of E|<v(t)>_{K,sigma}|^2 and of the cross terms between sites.

    Each realization evaluates <v(t)> = eps <phi_theta> - i eps^3 V1(theta) - eps^5 V2(theta) with
    the leading kernels. The eps^2, eps^4 and eps^6 coefficients are averaged per sample; a 3-point
    eps ladder is also fitted with a Vandermonde solve in (eps^2, eps^4, eps^6).

    Raises:
        DomainError: fewer than MIN_SAMPLES samples or a ladder that is not 3 points
    """
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"variance_mc needs at least {MIN_SAMPLES} samples, got {n_samples}")
    eps = params.eps if params.eps is not None else 1.0
    ladder = tuple(eps_ladder) if eps_ladder is not None else (eps, eps / 2.0, eps / 4.0)
    if len(ladder) != 3:
        raise DomainError("eps ladder must have 3 points")

    ensemble = PhaseEnsemble(seed, n_samples)
    model = _EnsembleModel(params, prof, Ks, t, second_order)
    pieces = _sample_pieces(model, ensemble, n_samples)
    A, B, C = pieces[..., 0], pieces[..., 1], pieces[..., 2]
    e2 = np.abs(A) ** 2
    e4 = 2.0 * np.real(A * np.conj(-1j * B))
    e6 = np.abs(B) ** 2 + 2.0 * np.real(A * np.conj(-C))

    vander = np.array([[e ** 2, e ** 4, e ** 6] for e in ladder])
    estimates = []
    for i, K in enumerate(Ks):
        X = _observable(pieces[:, i, :], eps)
        mean, _ = _mean_stderr(X)
        second, stderr = _mean_stderr(np.abs(X) ** 2)
        decomposition = {name: _mean_stderr(values[:, i]) for name, values in (("eps2", e2), ("eps4", e4), ("eps6", e6))}
        moments = [float(np.mean(np.abs(_observable(pieces[:, i, :], e)) ** 2)) for e in ladder]
        fitted = np.linalg.solve(vander, np.array(moments))
        estimates.append(MomentEstimate((float(K[0]), float(K[1])), eps, complex(mean), float(second.real), stderr,
                                        n_samples, {k: (float(v[0]), v[1]) for k, v in decomposition.items()},
                                        {"eps": list(ladder), "moments": moments, "fitted": fitted.tolist()}))
        print(f"[INFO] [{PRINT_PREFIX}] K={tuple(K)}: E|v|^2 = {second.real:.6g} +- {stderr:.2g} (n={n_samples})")

    covariances = []
    for i in range(len(Ks)):
        for j in range(i + 1, len(Ks)):
            cross, cross_err = _mean_stderr(_observable(pieces[:, i, :], eps) * np.conj(_observable(pieces[:, j, :], eps)))
            covariances.append({"K": list(Ks[i]), "K_prime": list(Ks[j]), "mean": complex(cross), "stderr": cross_err})
    return EnsembleReport(estimates, covariances, seed, n_samples, ladder)


def e1_pairing(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float) -> dict:
    """
    Exact E[<phi>_K conj(V1)] of the leading first iterate by pairing enumeration.

    Only triples with K2 = K1 or K2 = K3 pair with a single site of <phi>, so the correlation is a
    real sum of |eta1|^2 |eta3|^2 times the window and the kernel at Delta omega = 0.

    Returns:
        {"correlation": complex, "e1": 2 Re(i correlation), "paired_terms": int}
    """
    model = _EnsembleModel(params, prof, [K], t, second_order=False)
    plan, window = model.v1[0], model.windows[0]
    i1, i3, i2 = plan.plus[:, 0], plan.plus[:, 1], plan.minus[:, 0]
    # {j, i2} must equal {i1, i3} as multisets
    j = np.where(i2 == i1, i3, np.where(i2 == i3, i1, -1))
    paired = j >= 0
    n = np.abs(model.sites.eta) ** 2
    terms = np.conj(plan.weights[paired]) * window[j[paired]] * n[i1[paired]] * n[i3[paired]]
    correlation = compensated_sum(terms)
    return {"correlation": complex(correlation), "e1": float(2.0 * np.real(1j * correlation)),
            "paired_terms": int(np.count_nonzero(paired))}


def e1_antisymmetry(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float, n_samples: int,
                    seed: int) -> dict:
    """
    E1(t) + E1(-t) from the eps^4 coefficient, forward and backward runs sharing phases.

    The correlation E[<phi> conj(V1)] behind E1 is sampled too; it is odd in t and carries the
    sign that E1 inherits.

    Returns:
        {"sum", "stderr", "e1_t", "e1_minus_t", "correlation_t", "correlation_t_stderr",
         "correlation_minus_t", "correlation_sum", "correlation_stderr", "n_samples"}
    """
    if t == 0:
        return {"sum": 0.0, "stderr": 0.0, "e1_t": 0.0, "e1_minus_t": 0.0, "correlation_t": 0j,
                "correlation_t_stderr": 0.0, "correlation_minus_t": 0j, "correlation_sum": 0j,
                "correlation_stderr": 0.0, "n_samples": n_samples}
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"e1_antisymmetry needs at least {MIN_SAMPLES} samples, got {n_samples}")
    ensemble = PhaseEnsemble(seed, n_samples)
    forward = _EnsembleModel(params, prof, [K], t, second_order=False)
    backward = _EnsembleModel(params, prof, [K], -t, second_order=False)

    def run(block: slice) -> np.ndarray:
        rows = []
        for r in range(block.start, block.stop):
            zeta = forward.zeta(ensemble, r)
            a, b_fwd, b_bwd = forward.pieces(zeta)[0, 0], forward.v1[0].evaluate(zeta), backward.v1[0].evaluate(zeta)
            rows.append((a * np.conj(b_fwd), a * np.conj(b_bwd)))
        return np.array(rows, dtype=complex)

    samples = np.concatenate(ordered_map(run, chunked(n_samples, REALIZATION_CHUNK)))
    e1 = 2.0 * np.real(1j * samples)
    total, stderr = _mean_stderr(e1[:, 0] + e1[:, 1])
    corr_sum, corr_stderr = _mean_stderr(samples[:, 0] + samples[:, 1])
    corr_t, corr_t_stderr = _mean_stderr(samples[:, 0])
    print(f"[INFO] [{PRINT_PREFIX}] E1(t)+E1(-t) = {float(total):.4g} +- {stderr:.2g} at t={t}")
    return {"sum": float(total), "stderr": stderr, "e1_t": float(e1[:, 0].mean()),
            "e1_minus_t": float(e1[:, 1].mean()), "correlation_t": complex(corr_t), "correlation_t_stderr": corr_t_stderr,
            "correlation_minus_t": complex(samples[:, 1].mean()), "correlation_sum": complex(corr_sum),
            "correlation_stderr": corr_stderr, "n_samples": n_samples}


def kinetic_sum(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float,
                window: Optional[float] = None) -> float:
    """
    sum over triples of (n1 n2 n3 - n n2 n3 + n n1 n3 - n n1 n2) |sin(t dw/2)/(dw/2)|^2.

    K1 and K3 run over a disc of radius |K| + 2B so that every term sees all of its triples.
    """
    lat = LatticeSpec(params.L, prof.radius)
    if window is None:
        window = math.hypot(float(K[0]), float(K[1])) + 2.0 * prof.radius
    kernel = lattice_resonance.sinc2_kernel(t)
    terms = {}
    for name in ("n123", "n0_23", "n0_13", "n0_12"):
        terms[name] = lattice_resonance.kernel_sum(lat, prof, K, kernel, weight=name, window=window).real
    total = math.fsum([terms["n123"], -terms["n0_23"], terms["n0_13"], -terms["n0_12"]])
    print(f"[DEBUG] [{PRINT_PREFIX}] kinetic_sum K={tuple(K)} t={t}: {total:.10g} ({terms})")
    return total


def e0_analytic(params: ScalingParams, prof: SpectralProfile, K: Sequence[float]) -> float:
    """E|<phi_theta>_K|^2 = sum |eta1|^2 (sigma^2/(sigma^2+h^2))^2 exp(-|K-K1|^2/(sigma^2+h^2))."""
    lat = LatticeSpec(params.L, prof.radius)
    sites = lat.sites
    width = params.sigma ** 2 + params.h ** 2
    dist2 = np.sum((sites - np.asarray(K, dtype=float)) ** 2, axis=1)
    terms = np.abs(prof.on_sites(lat)) ** 2 * (params.sigma ** 2 / width) ** 2 * np.exp(-dist2 / width)
    return compensated_sum(terms[np.argsort(dist2, kind="stable")]).real


def v1_second_moment(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float, n_samples: int = 0,
                     seed: int = 0) -> dict:
    """
    E|<V1>|^2 of the leading first iterate.

    Returns:
        {"exact": pairing enumeration, "approx": 4t^2 c^2 |eta_K|^2 (sum|eta|^2)^2 + 2 sum |w|^2 |eta1 eta2 eta3|^2,
         and "mc", "mc_stderr" when n_samples > 0}
    """
    lat = LatticeSpec(params.L, prof.radius)
    sites = duhamel.SiteIndex(lat, prof)
    plan = duhamel.v1_plan(sites, K, t)
    exact = paired_second_moment(plan, sites.eta).real
    n = np.abs(sites.eta) ** 2
    eta_K = complex(prof(K[0], K[1]))
    c = duhamel.LEADING_PREFACTOR
    diagonal = 4.0 * t * t * c * c * abs(eta_K) ** 2 * float(np.sum(n)) ** 2
    triple_n = n[plan.plus[:, 0]] * n[plan.minus[:, 0]] * n[plan.plus[:, 1]]
    approx = diagonal + 2.0 * float(np.sum(np.abs(plan.weights) ** 2 * triple_n))
    report = {"exact": exact, "approx": approx, "terms": len(plan)}
    if n_samples > 0:
        ensemble = PhaseEnsemble(seed, n_samples)
        eta_all = prof.on_sites(lat)

        def run(block: slice) -> np.ndarray:
            return np.array([abs(plan.evaluate((eta_all * np.exp(1j * ensemble.phases(r, lat.count)))[sites.keep])) ** 2
                             for r in range(block.start, block.stop)])

        samples = np.concatenate(ordered_map(run, chunked(n_samples, REALIZATION_CHUNK)))
        mean, stderr = _mean_stderr(samples)
        report.update({"mc": float(mean), "mc_stderr": stderr, "n_samples": n_samples})
    return report
