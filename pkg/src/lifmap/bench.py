"""CPU-time scaling of both engines over network size."""

from __future__ import annotations

import contextlib
import os
import time
from dataclasses import dataclass

import numpy as np

from .loihi import run_loihi
from .network import translate_network
from .reference import run_reference_network
from .specfile import build_experiment, parse_spec

DEFAULT_SIZES = (20, 100, 500, 1000, 5000, 10000)
ENGINES = ("reference", "loihi")


@dataclass(frozen=True)
class BenchRow:
    size: int
    engine: str
    cpu_seconds: float
    steps: int
    n_synapses: int
    spikes: int


def bench_spec(size: int, duration_ms: float = 500.0, seed: int = 0, out_degree: float = 10.0):
    """Random network of ``size`` sampled neurons, ~``out_degree`` synapses each, Poisson-driven."""
    p = min(1.0, out_degree / max(size - 1, 1))
    return parse_spec(
        {
            "neurons": [{"count": size, "sample": {}}],
            "connectivity": {"random": {"p": p, "weight_nA": 0.005, "delay_ms": 1.0}},
            "stimulus": {"poisson": [{"targets": "all", "rate_Hz": 100.0, "weight_nA": 0.01}]},
            "mapping": {"dt_ms": 1.0, "v_scale_mV": 1e-4},
            "run": {"duration_ms": duration_ms, "seed": seed},
        }
    )


@contextlib.contextmanager
def single_core():
    """Pin the process to one CPU where the platform supports it."""
    if not hasattr(os, "sched_getaffinity"):
        yield
        return
    before = os.sched_getaffinity(0)
    try:
        os.sched_setaffinity(0, {min(before)})
    except OSError:
        pass
    try:
        yield
    finally:
        with contextlib.suppress(OSError):
            os.sched_setaffinity(0, before)


def _cpu(fn, repeats):
    best = None
    result = None
    for _ in range(repeats):
        start = time.process_time()
        result = fn()
        elapsed = time.process_time() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, result


def bench_scaling(
    sizes=DEFAULT_SIZES,
    duration_ms: float = 500.0,
    seed: int = 0,
    repeats: int = 1,
    engines=ENGINES,
) -> list[BenchRow]:
    """Time each engine (translation included for the emulator; network construction excluded).

    The minimum over ``repeats`` runs is reported.
    """
    rows = []
    with single_core():
        for size in sizes:
            spec = bench_spec(size, duration_ms, seed)
            graph, stim, cfg = build_experiment(spec)
            steps = int(round(duration_ms / cfg.dt_ms))
            for engine in engines:
                if engine == "reference":
                    fn = lambda: run_reference_network(
                        graph, stim, duration_ms, cfg.dt_ms, record=False
                    )
                else:
                    fn = lambda: run_loihi(translate_network(graph, cfg, stim), steps, record=False)
                seconds, res = _cpu(fn, repeats)
                rows.append(
                    BenchRow(size, engine, seconds, steps, graph.n_synapses, res.spike_count)
                )
    return rows


def scaling_ratio(rows, engine: str, big: int, small: int) -> float:
    t = {r.size: r.cpu_seconds for r in rows if r.engine == engine}
    return t[big] / t[small]


def timing_table(rows):
    """(sizes, {engine: seconds array}) for plotting."""
    sizes = sorted({r.size for r in rows})
    out = {}
    for engine in sorted({r.engine for r in rows}):
        by = {r.size: r.cpu_seconds for r in rows if r.engine == engine}
        out[engine] = np.array([by[s] for s in sizes])
    return sizes, out
