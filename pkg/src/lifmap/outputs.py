"""CSV and manifest writers. Numbers are written with 9 significant digits so reruns are byte-identical."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .errors import OutputError


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def write_csv(path: Path, header: list[str], rows) -> Path:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def write_matrix_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> Path:
    """Column-oriented numeric CSV (all float columns formatted %.9g)."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns]) if columns else None
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            if data is not None and data.size:
                np.savetxt(fh, data, fmt="%.9g", delimiter=",")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path: Path, command: str, spec: dict | None, outputs: list[Path], **extra) -> Path:
    """Everything needed to replay a run: resolved spec, seed, tool version, output hashes."""
    manifest = {
        "tool": "lifmap",
        "version": __version__,
        "command": command,
        **extra,
        "spec": spec,
        "outputs": {Path(p).name: sha256(p) for p in outputs},
    }
    try:
        Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return Path(path)


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {path}: {exc.strerror}") from None
    return path
