# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Results Manager - Output directories, CSV/JSON writers and run manifests

PRINT_PREFIX = "RESULTS"

# Standard library imports
import csv
import datetime
import hashlib
import json
import os
from typing import Any, Iterable, Optional, Sequence

# Third-party imports
import numpy as np

# Local imports
from src.utils.utils import fmt_float

# Project root (two levels up from this file)
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))

MANIFEST_NAME = "manifest.json"


def prepare_output_dir(out_dir: str) -> str:
    """
    Create the output directory if needed.

    Args:
        out_dir: Relative (to the working directory) or absolute path

    Returns:
        Absolute path of the directory
    """
    try:
        path = os.path.abspath(out_dir)
        os.makedirs(path, exist_ok=True)
        return path
    except Exception as e:
        print(f"[ERROR] [{PRINT_PREFIX}] Failed to create output directory '{out_dir}': {e}")
        raise e


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    return str(value)


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    Stream rows to a CSV file with a fixed column order and round-trip exact floats.

    Returns:
        The path written
    """
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([_cell(value) for value in row])
            count += 1
    print(f"[DEBUG] [{PRINT_PREFIX}] Wrote {count} rows to {path}")
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(np.real(value)), "im": float(np.imag(value))}
    return repr(value)


def to_jsonable(payload: Any) -> Any:
    """Round-trip through json so complex and numpy values become plain JSON types."""
    return json.loads(json.dumps(payload, default=_json_default))


def write_json(path: str, payload: Any) -> str:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write("\n")
    return path


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def artifact_version() -> str:
    """sha256 over the package sources (src/ and config/vars.py), in sorted path order."""
    digest = hashlib.sha256()
    paths = []
    for base in ("src", "config"):
        for root, _, files in os.walk(os.path.join(PROJECT_ROOT, base)):
            paths.extend(os.path.join(root, name) for name in files if name.endswith(".py"))
    for path in sorted(paths):
        digest.update(os.path.relpath(path, PROJECT_ROOT).replace(os.sep, "/").encode("utf-8"))
        with open(path, "rb") as handle:
            digest.update(handle.read())
    return digest.hexdigest()


def output_hashes(out_dir: str) -> dict[str, str]:
    """sha256 of every file in out_dir except the manifest."""
    hashes = {}
    for name in sorted(os.listdir(out_dir)):
        path = os.path.join(out_dir, name)
        if name != MANIFEST_NAME and os.path.isfile(path):
            hashes[name] = file_sha256(path)
    return hashes


def write_manifest(out_dir: str, command: str, config: dict, seed: Optional[int], threads: int) -> str:
    """
    Write manifest.json describing a finished run.

    Returns:
        Path of the manifest
    """
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "threads": threads,
        "artifact_version": artifact_version(),
        "outputs": output_hashes(out_dir),
        "created": datetime.datetime.now().isoformat(timespec="seconds"),
    }
    path = os.path.join(out_dir, MANIFEST_NAME)
    write_json(path, manifest)
    print(f"[INFO] [{PRINT_PREFIX}] Manifest written to {path}")
    return path


def read_manifest(path: str) -> dict:
    with open(path, "r") as handle:
        return json.load(handle)
