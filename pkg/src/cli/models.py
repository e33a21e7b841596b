# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Pydantic models for scenario files

# Standard library imports
from typing import Literal, Optional

# Third-party imports
from pydantic import BaseModel, ConfigDict, model_validator

# Local imports
from config.vars import AR_STRICTNESS, ORACLE_N, OUTPUT_DIR, QUAD_ATOL, QUAD_RTOL
from src.numerics.errors import ConfigError
from src.numerics.initial_data import ScalingParams, SpectralProfile, make_profile

ExperimentKind = Literal["propagate", "resonances", "cr-op", "wk-op", "expansion", "mc", "oracle-compare", "decay",
                         "validate"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Scenario sections

class RegimeConfig(StrictModel):
    L: float = 8.0
    h: Optional[float] = None
    sigma: Optional[float] = None
    eps: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    delta0: float = 0.2
    strictness: float = AR_STRICTNESS

    @model_validator(mode="after")
    def _check_exponents(self):
        if (self.alpha is None) != (self.beta is None):
            raise ValueError("regime.alpha and regime.beta must be set together")
        return self

    def to_params(self) -> ScalingParams:
        """Raises ConfigError when neither (h, sigma) nor (alpha, beta) is set."""
        if self.alpha is not None and self.beta is not None:
            return ScalingParams.from_exponents(self.L, self.alpha, self.beta, self.delta0, self.eps, self.strictness)
        if self.h is None or self.sigma is None:
            raise ConfigError("regime: set regime.h and regime.sigma, or regime.alpha and regime.beta")
        return ScalingParams(h=self.h, L=self.L, sigma=self.sigma, eps=self.eps, delta0=self.delta0,
                             strictness=self.strictness)


class ProfileConfig(StrictModel):
    name: str = "bump"
    params: dict = {}

    def build(self) -> SpectralProfile:
        return make_profile(self.name, **self.params)


class TimeConfig(StrictModel):
    t: float = 1.0
    times: list[float] = []


class SamplingConfig(StrictModel):
    seed: int = 0
    n_samples: int = 1000


class ToleranceConfig(StrictModel):
    rtol: float = QUAD_RTOL
    atol: float = QUAD_ATOL


class OutputConfig(StrictModel):
    out_dir: str = OUTPUT_DIR


class OptionsConfig(StrictModel):
    # expansion
    orders: list[int] = [1, 2]
    exact: bool = True
    allow_beyond_guard: bool = False
    # resonances / wk-op
    weight: str = "eta"
    k2_filter: bool = False
    method: Literal["fast", "levels"] = "fast"
    L_values: list[float] = []
    delta: float = 0.3
    xi_spacing: float = 0.025
    xi_max: Optional[float] = None
    # mc
    eps_ladder: list[float] = []
    second_order: bool = True
    antisymmetry: bool = False
    # oracle-compare
    N: int = ORACLE_N
    dt: float = 0.01
    lam: float = 1.0
    box: Optional[float] = None
    checkpoint: bool = False
    # decay / propagate
    widths: list[float] = [1.0, 1.0, 1.0]


class ScenarioConfig(StrictModel):
    kind: ExperimentKind
    regime: RegimeConfig = RegimeConfig()
    profile: ProfileConfig = ProfileConfig()
    time: TimeConfig = TimeConfig()
    sites: list[tuple[float, float]] = [(0.0, 0.0)]
    sampling: SamplingConfig = SamplingConfig()
    tolerances: ToleranceConfig = ToleranceConfig()
    output: OutputConfig = OutputConfig()
    options: OptionsConfig = OptionsConfig()
