"""Deterministic artifact emission: CSV tables, JSON reports, binary
field/atom histories.

All writers produce byte-identical output for identical inputs.  Every
artifact carries the configuration hash of the run that produced it in
its header.  The binary history layout is little-endian:

    magic   8 bytes  b"SLSOLH1\\0"
    u32     version (1)
    u32     dtype code (1 = complex128)
    u64     n_zeta, n_tau, n_delta
    f8[n_tau]    tau grid
    f8[n_zeta]   zeta checkpoints
    f8[n_delta]  detuning nodes
    f8[n_delta]  detuning weights
    c16[n_zeta, n_tau]            omega_plus  (row-major)
    c16[n_zeta, n_tau]            omega_minus
    c16[n_zeta, n_tau, n_delta, 3] psi         (row-major, (e, +, -))
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .core import DetuningDistribution
from .dynamics import AtomGrid, FieldGrid, PropagationResult
from .errors import SlowsolError

MAGIC = b"SLSOLH1\x00"
VERSION = 1
DTYPE_COMPLEX128 = 1


def config_hash(config: dict) -> str:
    """Stable hash of a configuration document."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def write_csv(path, columns: dict, header: dict | None = None) -> None:
    """Write named columns as CSV with ``# key=value`` header comments."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise SlowsolError("CSV columns must have equal length")
    lines = []
    for key, value in (header or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(names))
    for i in range(n):
        lines.append(",".join(format(float(a[i]), ".17g") for a in arrays))
    path.write_text("\n".join(lines) + "\n")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def save_history(
    path, result: PropagationResult, nu: DetuningDistribution | None = None
) -> None:
    fields, atoms = result.fields, result.atoms
    n_zeta, n_tau = fields.omega_p.shape
    n_delta = atoms.deltas.size
    # weights ride along so a saved history is self-contained
    weights = nu.weights if nu is not None else np.full(n_delta, np.nan)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, DTYPE_COMPLEX128))
        fh.write(struct.pack("<QQQ", n_zeta, n_tau, n_delta))
        for arr in (fields.tau, fields.zeta, atoms.deltas):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(weights, dtype="<f8").tobytes())
        for arr in (fields.omega_p, fields.omega_m, atoms.psi):
            fh.write(np.ascontiguousarray(arr, dtype="<c16").tobytes())


def load_history(path) -> tuple[PropagationResult, np.ndarray]:
    """Read a binary history; returns the result and the stored
    detuning weights (NaN-filled when the writer had none)."""
    with open(path, "rb") as fh:
        if fh.read(8) != MAGIC:
            raise SlowsolError(f"{path}: not a slowsol history file")
        version, dtype = struct.unpack("<II", fh.read(8))
        if version != VERSION or dtype != DTYPE_COMPLEX128:
            raise SlowsolError(f"{path}: unsupported version/dtype")
        n_zeta, n_tau, n_delta = struct.unpack("<QQQ", fh.read(24))

        def read(count, dt):
            buf = fh.read(count * np.dtype(dt).itemsize)
            if len(buf) != count * np.dtype(dt).itemsize:
                raise SlowsolError(f"{path}: truncated history")
            return np.frombuffer(buf, dtype=dt).copy()

        tau = read(n_tau, "<f8")
        zeta = read(n_zeta, "<f8")
        deltas = read(n_delta, "<f8")
        weights = read(n_delta, "<f8")
        omega_p = read(n_zeta * n_tau, "<c16").reshape(n_zeta, n_tau)
        omega_m = read(n_zeta * n_tau, "<c16").reshape(n_zeta, n_tau)
        psi = read(n_zeta * n_tau * n_delta * 3, "<c16").reshape(
            n_zeta, n_tau, n_delta, 3
        )
    fields = FieldGrid(tau, zeta, omega_p, omega_m)
    atoms = AtomGrid(tau, zeta, deltas, psi)
    return PropagationResult(fields, atoms, None, 0.0), weights


def distribution_from_history(deltas: np.ndarray, weights: np.ndarray, kind="custom"):
    return DetuningDistribution(kind, deltas, weights)
