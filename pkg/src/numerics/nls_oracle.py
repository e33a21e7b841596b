# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Split-step pseudo-spectral solver for i u_t = -Laplacian u + lambda |u|^2 u on a periodic box

"""
Ground-truth oracle for the amplitude expansion.

The box [-S/2, S/2)^2 carries N x N points. The data are Gaussian-truncated, so the periodic
box stands in for the plane as long as the field stays negligible at the boundary; every
construction and every evolve() checks this. Transforms go through scipy.fft with the
shared worker cap.
"""

PRINT_PREFIX = "NLS ORACLE"

# Standard library imports
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

# Third-party imports
import numpy as np
from scipy import fft as sfft

# Local imports
from config.vars import ORACLE_BOX_FACTOR, ORACLE_LEAK_TOL, ORACLE_MIN_BINS, ORACLE_N, ORACLE_PHASE_GUARD
from src import shared
from src.datamanager import checkpoint_handler
from src.numerics import duhamel
from src.numerics.errors import DomainError, GuardViolation
from src.numerics.initial_data import (LatticeSpec, PhaseInput, ScalingParams, SpectralProfile, build_phi,
                                       coarse_grain_closed_form)
from src.utils.utils import loglog_slope, stable_hash

TWO_PI = 2.0 * math.pi


@dataclass
class GridState:
    N: int
    S: float
    u: np.ndarray
    t: float = 0.0
    dt: float = 0.01
    lam: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def dx(self) -> float:
        return self.S / self.N

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.S + self.dx * np.arange(self.N)

    @property
    def k(self) -> np.ndarray:
        return TWO_PI * sfft.fftfreq(self.N, d=self.dx)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.x, indexing="ij")

    def k_squared(self) -> np.ndarray:
        k = self.k
        return k[:, None] ** 2 + k[None, :] ** 2


def _fft(u: np.ndarray) -> np.ndarray:
    return sfft.fft2(u, workers=shared.get_threads())


def _ifft(u_hat: np.ndarray) -> np.ndarray:
    return sfft.ifft2(u_hat, workers=shared.get_threads())


def boundary_leak(u: np.ndarray) -> float:
    """Largest boundary amplitude relative to the peak."""
    peak = float(np.max(np.abs(u)))
    if peak == 0:
        return 0.0
    edge = max(np.max(np.abs(u[0, :])), np.max(np.abs(u[-1, :])), np.max(np.abs(u[:, 0])), np.max(np.abs(u[:, -1])))
    return float(edge) / peak


def _check_leak(u: np.ndarray, when: str) -> None:
    leak = boundary_leak(u)
    if leak > ORACLE_LEAK_TOL:
        raise GuardViolation(f"boundary amplitude {leak:.3g} of peak {when}, limit {ORACLE_LEAK_TOL:g}",
                             constraint="boundary amplitude < 1e-12 of peak")


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def make_state(params: ScalingParams, prof: SpectralProfile, eps: float, N: int = ORACLE_N, box: Optional[float] = None,
               dt: float = 0.01, phases: PhaseInput = None, realization: int = 0, lam: float = 1.0) -> GridState:
    """
    u0 = eps * phi sampled on the grid.

    Args:
        params: h and L (sigma is only used by observe)
        prof: Profile eta
        eps: Amplitude
        N: Points per side
        box: Box side, defaults to ORACLE_BOX_FACTOR / h
        dt: Time step
        phases: Optional random phases
        lam: Nonlinearity sign (+1 defocusing, -1 focusing, 0 linear)

    Raises:
        DomainError: non-positive N, box or dt
        GuardViolation: boundary leak or unresolved frequencies
    """
    if N <= 0 or dt <= 0 or eps < 0:
        raise DomainError(f"make_state needs N > 0, dt > 0, eps >= 0 (got N={N}, dt={dt}, eps={eps})")
    S = float(box) if box is not None else ORACLE_BOX_FACTOR / params.h
    if S <= 0:
        raise DomainError(f"box side must be positive, got {S}")
    state = GridState(int(N), S, np.zeros((N, N), dtype=complex), 0.0, float(dt), float(lam))

    lat = LatticeSpec(params.L, prof.radius)
    phi = build_phi(lat, prof, params.h, phases, realization)
    nyquist = math.pi / state.dx
    reach = prof.radius + 8.0 * params.h
    if reach >= nyquist:
        raise GuardViolation(f"frequencies up to {reach:.3g} exceed the grid Nyquist limit {nyquist:.3g}",
                             constraint="|k| < pi N / S")
    X, Y = state.mesh()
    state.u = eps * phi.evaluate(X, Y)
    _check_leak(state.u, "at t=0")
    state.meta = {"eps": float(eps), "h": params.h, "L": params.L, "sigma": params.sigma, "profile": prof.describe(),
                  "terms": len(phi), "realization": realization}
    print(f"[DEBUG] [{PRINT_PREFIX}] make_state N={N} S={S:.4g} dx={state.dx:.4g} eps={eps} terms={len(phi)}")
    return state


def params_hash(state: GridState) -> str:
    return stable_hash({"N": state.N, "S": state.S, "dt": state.dt, "lam": state.lam, **state.meta})


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------

def evolve(state: GridState, T: float, dt: Optional[float] = None) -> GridState:
    """
    Strang splitting: half kinetic step, nonlinear phase rotation, half kinetic step.

    The step is shrunk so that an integer number of steps reaches T exactly.

    Returns:
        A new GridState at time state.t + T

    Raises:
        GuardViolation: dt |lambda| max|u|^2 above ORACLE_PHASE_GUARD, or boundary leak at T
    """
    if T < 0:
        raise DomainError(f"evolve needs T >= 0, got {T}")
    step = float(dt) if dt is not None else state.dt
    if T == 0:
        return replace(state, u=state.u.copy())
    n_steps = max(1, int(math.ceil(T / step - 1e-12)))
    step = T / n_steps

    peak = float(np.max(np.abs(state.u))) ** 2
    if step * abs(state.lam) * peak > ORACLE_PHASE_GUARD:
        raise GuardViolation(f"dt |lambda| max|u|^2 = {step * abs(state.lam) * peak:.3g} exceeds {ORACLE_PHASE_GUARD}",
                             constraint="dt max|u|^2 << 1")

    half = np.exp(-0.5j * step * state.k_squared())
    u_hat = _fft(state.u)
    for _ in range(n_steps):
        u = _ifft(half * u_hat)
        if state.lam != 0:
            u = u * np.exp(-1j * state.lam * step * np.abs(u) ** 2)
        u_hat = half * _fft(u)
    u = _ifft(u_hat)
    _check_leak(u, f"at t={state.t + T:.4g}")
    print(f"[DEBUG] [{PRINT_PREFIX}] evolve T={T} in {n_steps} steps of {step:.4g}")
    return replace(state, u=u, t=state.t + T, dt=step)


def time_reversed(state: GridState) -> GridState:
    """conj(u) solves the same equation backwards in time."""
    return replace(state, u=np.conj(state.u), t=-state.t)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def interaction_field(state: GridState) -> np.ndarray:
    """v(t) = e^{-it Laplacian} u(t), i.e. v_hat = u_hat e^{+it|k|^2}."""
    return _ifft(_fft(state.u) * np.exp(1j * state.t * state.k_squared()))


def observe(state: GridState, Ks: Sequence[Sequence[float]], sigma: float) -> list[complex]:
    """
    Grid version of <v(t)>_{K,sigma} = (2pi)^3 sigma^2 int conj(g_{K,sigma}) v dx.

    Raises:
        GuardViolation: fewer than ORACLE_MIN_BINS frequency bins per sigma
    """
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    bins = sigma * state.S / TWO_PI
    if bins < ORACLE_MIN_BINS:
        raise GuardViolation(f"sigma spans {bins:.3g} frequency bins, need {ORACLE_MIN_BINS}",
                             constraint="sigma S / (2 pi) >= 4")
    v = interaction_field(state)
    X, Y = state.mesh()
    envelope = np.exp(-0.5 * sigma * sigma * (X * X + Y * Y)) * TWO_PI ** -2
    weight = TWO_PI ** 3 * sigma * sigma * state.dx * state.dx
    out = []
    for K in Ks:
        window = envelope * np.exp(-1j * (float(K[0]) * X + float(K[1]) * Y))
        out.append(complex(weight * np.sum(window * v)))
    return out


def mass(state: GridState) -> float:
    return float(np.sum(np.abs(state.u) ** 2) * state.dx ** 2)


def momentum(state: GridState) -> tuple[float, float]:
    """int conj(u) (-i grad) u dx, evaluated in frequency space."""
    u_hat = _fft(state.u)
    density = np.abs(u_hat) ** 2 * state.dx ** 2 / state.N ** 2
    k = state.k
    return float(np.sum(k[:, None] * density)), float(np.sum(k[None, :] * density))


def hamiltonian(state: GridState) -> float:
    """int |grad u|^2 + (lambda/2) |u|^4."""
    u_hat = _fft(state.u)
    kinetic = np.sum(state.k_squared() * np.abs(u_hat) ** 2) * state.dx ** 2 / state.N ** 2
    potential = 0.5 * state.lam * np.sum(np.abs(state.u) ** 4) * state.dx ** 2
    return float(kinetic + potential)


# ---------------------------------------------------------------------------
# Checkpoints and convergence
# ---------------------------------------------------------------------------

def save_checkpoint(state: GridState, path: str, digest: Optional[str] = None) -> str:
    return checkpoint_handler.save_checkpoint_file(path, state.u, state.S, state.t, state.dt, state.lam,
                                                   digest or params_hash(state))


def load_checkpoint(path: str) -> tuple[GridState, str]:
    """
    Returns:
        (GridState, params hash stored in the header)
    """
    header, u = checkpoint_handler.load_checkpoint_file(path)
    state = GridState(header["N"], header["S"], u, header["t"], header["dt"], header["lam"])
    return state, header["params_hash"]


def convergence_ratio(state: GridState, T: float, dt: float) -> float:
    """||u_dt - u_dt/2|| / ||u_dt/2 - u_dt/4||, close to 4 for a second-order scheme."""
    coarse = evolve(state, T, dt).u
    mid = evolve(state, T, dt / 2.0).u
    fine = evolve(state, T, dt / 4.0).u
    denom = np.linalg.norm(mid - fine)
    if denom == 0:
        return float("inf")
    ratio = float(np.linalg.norm(coarse - mid) / denom)
    print(f"[INFO] [{PRINT_PREFIX}] convergence ratio at dt={dt}: {ratio:.4f}")
    return ratio


# ---------------------------------------------------------------------------
# Expansion comparison
# ---------------------------------------------------------------------------

def expansion_residuals(params: ScalingParams, prof: SpectralProfile, K: Sequence[float], t: float,
                        eps_ladder: Sequence[float], N: int = ORACLE_N, dt: float = 0.01, lam: float = 1.0,
                        box: Optional[float] = None) -> dict:
    """
    |observe(t) - eps <phi> + i lambda eps^3 V1| over an eps ladder, with the fitted log-log slope.

    The first-order correction uses duhamel.v1_exact, so the residual is the eps^5 tail.
    """
    if len(eps_ladder) < 2:
        raise DomainError("the eps ladder needs at least 2 points")
    lat = LatticeSpec(params.L, prof.radius)
    linear = coarse_grain_closed_form(lat, prof, params.h, params.sigma, K)
    v1 = duhamel.v1_exact(params, prof, K, t, allow_beyond_guard=True)
    rows = []
    for eps in eps_ladder:
        state = evolve(make_state(params, prof, eps, N=N, box=box, dt=dt, lam=lam), t)
        observed = observe(state, [K], params.sigma)[0]
        residual = observed - eps * linear + 1j * lam * eps ** 3 * v1
        rows.append({"eps": float(eps), "observed": observed, "linear": eps * linear, "first_order": -1j * lam * eps ** 3 * v1,
                     "residual": abs(residual), "mass": mass(state), "hamiltonian": hamiltonian(state)})
        print(f"[INFO] [{PRINT_PREFIX}] eps={eps}: residual {abs(residual):.4g}")
    slope, _ = loglog_slope([r["eps"] for r in rows], [r["residual"] for r in rows])
    return {"K": [float(K[0]), float(K[1])], "t": t, "v1_exact": v1, "rows": rows, "slope": slope}
