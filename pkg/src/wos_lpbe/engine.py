"""Batch execution of walks.

Built-in geometries run through compiled loops (serial or threaded); any other
``Domain`` falls back to the per-walker Python walk. Walker ``i`` of a batch
always uses stream ``(seed, first_index + i)``, so results do not depend on
the thread count or on how a run is split into batches.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .geometry import Domain, Vec3, as_vec3, project_code, signed_distance_code
from .rng import RngStream, direction_from_uniforms, stream_key, uniform_at
from .walker import Method, OutcomeKind, SolverConfig, run_walk, survival_of_product

_ABSORBED = int(OutcomeKind.ABSORBED)
_KILLED = int(OutcomeKind.KILLED)
_TRUNCATED = int(OutcomeKind.TRUNCATED)
_ESCAPED = int(OutcomeKind.ESCAPED)


@njit(cache=True)
def _walk_one(kind, params, x, y, z, kappa, delta, max_steps, weighted, cutoff, key):
    counter = np.uint64(0)
    one = np.uint64(1)
    steps = 0
    weight = 1.0
    while True:
        d = signed_distance_code(kind, params, x, y, z)
        if d < delta:
            bx, by, bz = project_code(kind, params, x, y, z)
            return _ABSORBED, steps, weight, bx, by, bz
        if weighted and d > cutoff:
            return _ESCAPED, steps, 0.0, math.nan, math.nan, math.nan
        if steps >= max_steps:
            return _TRUNCATED, steps, weight, math.nan, math.nan, math.nan
        p = survival_of_product(d * kappa)
        if weighted:
            weight *= p
        else:
            eta = uniform_at(key, counter)
            counter += one
            if eta > p:
                return _KILLED, steps, 0.0, math.nan, math.nan, math.nan
        u = uniform_at(key, counter)
        v = uniform_at(key, counter + one)
        counter += np.uint64(2)
        dx, dy, dz = direction_from_uniforms(u, v)
        x = x + d * dx
        y = y + d * dy
        z = z + d * dz
        steps += 1


@njit(cache=True)
def _batch_serial(kind, params, x0, y0, z0, kappa, delta, max_steps, weighted, cutoff,
                  seed, first_index, kinds, steps, weights, points):
    for i in range(kinds.shape[0]):
        key = stream_key(seed, first_index + np.uint64(i))
        k, s, w, bx, by, bz = _walk_one(kind, params, x0, y0, z0, kappa, delta,
                                        max_steps, weighted, cutoff, key)
        kinds[i] = k
        steps[i] = s
        weights[i] = w
        points[i, 0] = bx
        points[i, 1] = by
        points[i, 2] = bz


@njit(cache=True, parallel=True)
def _batch_parallel(kind, params, x0, y0, z0, kappa, delta, max_steps, weighted, cutoff,
                    seed, first_index, kinds, steps, weights, points):
    for i in prange(kinds.shape[0]):
        key = stream_key(seed, first_index + np.uint64(i))
        k, s, w, bx, by, bz = _walk_one(kind, params, x0, y0, z0, kappa, delta,
                                        max_steps, weighted, cutoff, key)
        kinds[i] = k
        steps[i] = s
        weights[i] = w
        points[i, 0] = bx
        points[i, 1] = by
        points[i, 2] = bz


@dataclass
class WalkBatch:
    """Outcomes of walkers ``first_index .. first_index + n - 1``."""

    first_index: int
    kinds: np.ndarray
    steps: np.ndarray
    weights: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.kinds)

    def count(self, kind: OutcomeKind) -> int:
        return int(np.count_nonzero(self.kinds == int(kind)))

    def scores(self, domain: Domain) -> np.ndarray:
        """Per-walk contribution: ``weight * psi0(boundary point)`` if absorbed, else 0."""
        out = np.zeros(len(self))
        hit = self.kinds == _ABSORBED
        if hit.any():
            out[hit] = self.weights[hit] * domain.boundary_values(self.points[hit])
        return out


def max_threads() -> int:
    return numba.config.NUMBA_NUM_THREADS


@contextmanager
def _threads(n: int):
    previous = numba.get_num_threads()
    numba.set_num_threads(n)
    try:
        yield
    finally:
        numba.set_num_threads(previous)


def run_walks(domain: Domain, config: SolverConfig, start, count: int | None = None,
              first_index: int = 0, threads: int | None = 1) -> WalkBatch:
    """Run ``count`` walks (default ``config.n_walkers``) from ``start``.

    ``threads=None`` uses every thread numba was started with; requests beyond
    that are clamped.
    """
    start = as_vec3(start)
    config.check(domain, start)
    n = config.n_walkers if count is None else int(count)
    kinds = np.empty(n, dtype=np.int8)
    steps = np.empty(n, dtype=np.int64)
    weights = np.empty(n)
    points = np.empty((n, 3))

    code = domain.kernel_code
    if code is None:
        for i in range(n):
            out = run_walk(domain, config, start, RngStream(config.seed, first_index + i))
            kinds[i] = int(out.kind)
            steps[i] = out.steps
            weights[i] = out.weight
            points[i] = tuple(out.boundary_point) if out.boundary_point is not None else (math.nan,) * 3
        return WalkBatch(first_index, kinds, steps, weights, points)

    kind, params = code
    cutoff = math.inf if config.cutoff_distance is None else float(config.cutoff_distance)
    args = (kind, params, start.x, start.y, start.z, float(config.kappa), float(config.delta),
            int(config.max_steps), config.method is Method.OLD, cutoff,
            np.uint64(config.seed), np.uint64(first_index), kinds, steps, weights, points)
    n_threads = max_threads() if threads is None else max(1, min(int(threads), max_threads()))
    if n_threads == 1:
        _batch_serial(*args)
    else:
        with _threads(n_threads):
            _batch_parallel(*args)
    return WalkBatch(first_index, kinds, steps, weights, points)


def warm_up() -> None:
    """Compile the batch kernels so later timings exclude JIT cost."""
    from .geometry import Slab

    for method in Method:
        cfg = SolverConfig(kappa=1.0, delta=1e-2, n_walkers=2, method=method)
        run_walks(Slab(1.0), cfg, Vec3(0, 0, 0), threads=1)
        if max_threads() > 1:
            run_walks(Slab(1.0), cfg, Vec3(0, 0, 0), threads=2)
