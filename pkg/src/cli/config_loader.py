# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Config Loader - Key-value scenario files, JSON documents, manifests and overrides

"""
Key-value format, one entry per line:

    # comment
    kind = "resonances"
    regime.L = 1
    regime.h = 1e-5
    profile.name = "flat"
    profile.params.radius = 1.5
    sites = [[0, 0]]

Values are parsed as JSON literals and fall back to plain strings.
"""

PRINT_PREFIX = "CONFIG LOADER"

# Standard library imports
import json
import os
from typing import Any, Optional, Sequence

# Third-party imports
from pydantic import ValidationError

# Local imports
from src.cli.models import ScenarioConfig
from src.numerics.errors import ConfigError


def parse_value(text: str) -> Any:
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_path(document: dict, key: str, value: Any) -> None:
    """Set document[a][b][c] = value for key 'a.b.c', creating sections on the way."""
    parts = [part for part in key.strip().split(".") if part]
    if not parts:
        raise ConfigError(f"empty key in '{key}'")
    node = document
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"{key}: '{part}' is a value, not a section")
        node = child
    node[parts[-1]] = value


def parse_keyvalue(text: str, source: str = "<string>") -> dict:
    document: dict = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{line}'")
        key, value = line.split("=", 1)
        set_path(document, key, parse_value(value))
    return document


def load_document(path: str) -> dict:
    """
    Read a scenario file. JSON documents and manifests (their 'config' entry) are accepted
    as well as the key-value format.
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file '{path}' does not exist")
    with open(path, "r") as handle:
        text = handle.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})")
        if "config" in document and "artifact_version" in document:
            print(f"[INFO] [{PRINT_PREFIX}] Loading scenario from manifest {path}")
            return document["config"]
        return document
    return parse_keyvalue(text, source=path)


def apply_overrides(document: dict, overrides: Sequence[str]) -> dict:
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override '{item}' must look like KEY=VAL")
        key, value = item.split("=", 1)
        set_path(document, key, parse_value(value))
        print(f"[DEBUG] [{PRINT_PREFIX}] override {key.strip()} = {value.strip()}")
    return document


def validate(document: dict) -> ScenarioConfig:
    """
    Raises:
        ConfigError: naming the first failing schema path
    """
    try:
        return ScenarioConfig.model_validate(document)
    except ValidationError as e:
        problems = []
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"]) or "<root>"
            problems.append(f"{location}: {error['msg']}")
        raise ConfigError("invalid scenario: " + "; ".join(problems))


def build_config(path: Optional[str] = None, overrides: Sequence[str] = (), kind: Optional[str] = None,
                 seed: Optional[int] = None, out_dir: Optional[str] = None) -> ScenarioConfig:
    """
    Assemble a ScenarioConfig from a file, command-line overrides and the subcommand name.

    Args:
        path: Scenario file, optional when every required key is overridden
        overrides: KEY=VAL items
        kind: Subcommand; replaces the file's kind
        seed: --seed value
        out_dir: --out value

    Returns:
        Validated ScenarioConfig
    """
    document = load_document(path) if path else {}
    apply_overrides(document, overrides)
    if kind is not None:
        document["kind"] = kind
    if seed is not None:
        set_path(document, "sampling.seed", int(seed))
    if out_dir is not None:
        set_path(document, "output.out_dir", out_dir)
    return validate(document)
