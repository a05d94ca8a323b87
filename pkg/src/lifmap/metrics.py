"""Trace-comparison metrics."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatchError, UndefinedCorrelationError

DENSITY_BINS = 100


def _pair(a, b, min_len):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise LengthMismatchError(f"series lengths differ: {a.size} vs {b.size}")
    if a.size < min_len:
        raise LengthMismatchError(f"need at least {min_len} samples, got {a.size}")
    return a, b


def rmse(a, b) -> float:
    a, b = _pair(a, b, 1)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def pearson(a, b) -> float:
    """Product-moment correlation; raises on a constant series instead of returning 0."""
    a, b = _pair(a, b, 2)
    da = a - a.mean()
    db = b - b.mean()
    saa = float(np.dot(da, da))
    sbb = float(np.dot(db, db))
    # relative test: a series whose spread is pure rounding noise counts as constant
    scale_a = max(float(np.max(np.abs(a))), 1e-300)
    scale_b = max(float(np.max(np.abs(b))), 1e-300)
    if saa <= (1e-14 * scale_a) ** 2 * a.size or sbb <= (1e-14 * scale_b) ** 2 * b.size:
        raise UndefinedCorrelationError("correlation undefined for a constant series")
    r = float(np.dot(da, db)) / np.sqrt(saa * sbb)
    return float(min(1.0, max(-1.0, r)))


def density(a, b, bins: int = DENSITY_BINS):
    """Shared-edge histograms of two traces over the union of their ranges."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    return edges, np.histogram(a, edges)[0], np.histogram(b, edges)[0]


def match_spikes(ref, emu):
    """Pair two sorted spike-time lists in order.

    When counts differ, the shorter list is slid along the longer one and the
    alignment with the smallest worst-case offset wins. Returns the offsets
    (emu - ref) of the matched pairs.
    """
    ref = np.asarray(ref, dtype=float)
    emu = np.asarray(emu, dtype=float)
    if ref.size == 0 or emu.size == 0:
        return np.zeros(0)
    short, long_, sign = (ref, emu, 1.0) if ref.size <= emu.size else (emu, ref, -1.0)
    best = None
    for shift in range(long_.size - short.size + 1):
        diff = long_[shift : shift + short.size] - short
        if best is None or np.max(np.abs(diff)) < np.max(np.abs(best)):
            best = diff
    return sign * best
