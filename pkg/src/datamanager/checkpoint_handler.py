# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Checkpoint Handler - Binary snapshots of the NLS grid state

"""
Byte layout (little-endian):

    offset  size  field
    0       4     magic b"WKLC"
    4       4     u32 format version (1)
    8       4     u32 N (grid points per side)
    12      8     f64 S (box side)
    20      8     f64 t
    28      8     f64 dt
    36      8     f64 nonlinearity sign lambda
    44      32    sha256 of the generating parameters (raw bytes)
    76      16*N*N  complex128 field, C order, row index = x1
"""

PRINT_PREFIX = "CHECKPOINT"

# Standard library imports
import struct

# Third-party imports
import numpy as np

MAGIC = b"WKLC"
VERSION = 1
HEADER = struct.Struct("<4sIIdddd32s")


def save_checkpoint_file(path: str, field: np.ndarray, S: float, t: float, dt: float, lam: float, params_hash: str) -> str:
    """
    Write a checkpoint.

    Args:
        path: Destination file
        field: (N, N) complex array
        S, t, dt, lam: Box side, time, step and nonlinearity sign
        params_hash: 64-character hex sha256

    Returns:
        The path written
    """
    field = np.ascontiguousarray(field, dtype="<c16")
    if field.ndim != 2 or field.shape[0] != field.shape[1]:
        raise ValueError(f"checkpoint field must be square, got {field.shape}")
    header = HEADER.pack(MAGIC, VERSION, field.shape[0], float(S), float(t), float(dt), float(lam), bytes.fromhex(params_hash))
    with open(path, "wb") as f:
        f.write(header)
        f.write(field.tobytes(order="C"))
    print(f"[DEBUG] [{PRINT_PREFIX}] Saved N={field.shape[0]} t={t} to {path}")
    return path


def load_checkpoint_file(path: str) -> tuple[dict, np.ndarray]:
    """
    Read a checkpoint.

    Returns:
        (header dict with N, S, t, dt, lam, params_hash; field array)
    """
    with open(path, "rb") as f:
        raw = f.read()
    magic, version, N, S, t, dt, lam, digest = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise ValueError(f"{path} is not a checkpoint (magic {magic!r})")
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    expected = HEADER.size + 16 * N * N
    if len(raw) != expected:
        raise ValueError(f"checkpoint {path} has {len(raw)} bytes, expected {expected}")
    field = np.frombuffer(raw, dtype="<c16", offset=HEADER.size).reshape(N, N).copy()
    header = {"N": N, "S": S, "t": t, "dt": dt, "lam": lam, "params_hash": digest.hex()}
    return header, field
