# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Cache Handler - Memoizes level-set profiles under WAVEKIN_CACHE

PRINT_PREFIX = "CACHE"

# Standard library imports
import json
import os
import threading
from typing import Optional

# Third-party imports
import numpy as np

# Local imports
from config.vars import WAVEKIN_CACHE
from src.utils.utils import stable_hash

# Empty string disables the cache
CACHE_DIR = WAVEKIN_CACHE

_index_lock = threading.Lock()


def cache_enabled() -> bool:
    return bool(CACHE_DIR)


def _index_path() -> str:
    return os.path.join(CACHE_DIR, "index.json")


def _load_index() -> dict:
    if not os.path.exists(_index_path()):
        return {}
    with open(_index_path(), "r") as f:
        return json.load(f)


def cache_key(payload: dict) -> str:
    """Key of a cached entry: sha256 of the JSON-rendered inputs."""
    return stable_hash(payload)


def get_arrays(key: str) -> Optional[dict]:
    """Get cached arrays for a key, None on a miss or when the cache is disabled."""
    if not cache_enabled():
        return None
    path = os.path.join(CACHE_DIR, f"{key}.npz")
    if not os.path.exists(path):
        print(f"[DEBUG] [{PRINT_PREFIX}] miss {key[:12]}")
        return None
    with np.load(path, allow_pickle=False) as data:
        print(f"[DEBUG] [{PRINT_PREFIX}] hit {key[:12]}")
        return {name: data[name] for name in data.files}


def set_arrays(key: str, description: dict, **arrays: np.ndarray) -> None:
    """Store arrays for a key and record the inputs in index.json."""
    if not cache_enabled():
        return
    os.makedirs(CACHE_DIR, exist_ok=True)
    np.savez(os.path.join(CACHE_DIR, f"{key}.npz"), **arrays)
    with _index_lock:
        index = _load_index()
        index[key] = description
        with open(_index_path(), "w") as f:
            json.dump(index, f, indent=2, sort_keys=True, default=repr)
    print(f"[DEBUG] [{PRINT_PREFIX}] stored {key[:12]}")


def clear_cache() -> int:
    """
    Delete every cached entry.

    Returns:
        Number of files removed
    """
    if not cache_enabled() or not os.path.isdir(CACHE_DIR):
        return 0
    removed = 0
    for name in os.listdir(CACHE_DIR):
        if name.endswith(".npz") or name == "index.json":
            os.remove(os.path.join(CACHE_DIR, name))
            removed += 1
    print(f"[INFO] [{PRINT_PREFIX}] Removed {removed} cache files from {CACHE_DIR}")
    return removed
