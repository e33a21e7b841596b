# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Helpers shared by the experiment commands

# Standard library imports
import os

# Local imports
from src.cli.models import ScenarioConfig


def site_tag(K) -> str:
    """Filename-safe label of a site, e.g. (0.25, -1.0) -> 'K_0.25_-1.0'."""
    return f"K_{float(K[0])!r}_{float(K[1])!r}"


def out_path(out_dir: str, name: str) -> str:
    return os.path.join(out_dir, name)


def time_grid(config: ScenarioConfig) -> list[float]:
    return list(config.time.times) if config.time.times else [config.time.t]


def complex_pair(value: complex) -> dict:
    return {"re": float(value.real), "im": float(value.imag)}
