"""Point estimates, the absorption-layer bias check and the laboriousness benchmark."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .engine import WalkBatch, run_walks, warm_up
from .errors import ConfigurationError
from .geometry import Domain, as_vec3
from .walker import Method, OutcomeKind, SolverConfig


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n_total: int
    n_survived: int
    n_truncated: int
    wall_time: float
    n_killed: int = 0
    n_escaped: int = 0
    mean_steps: float = 0.0

    @classmethod
    def from_batches(cls, domain: Domain, batches: list[WalkBatch], wall_time: float = 0.0) -> Estimate:
        """Combine batches. Sums are exactly rounded, so batch order and split do not matter."""
        scores = np.concatenate([b.scores(domain) for b in batches])
        kinds = np.concatenate([b.kinds for b in batches])
        steps = np.concatenate([b.steps for b in batches])
        n = len(scores)
        mean = math.fsum(scores) / n
        if n > 1:
            var = math.fsum((scores - mean) ** 2) / (n - 1)
            se = math.sqrt(var / n)
        else:
            se = math.nan
        return cls(
            mean=mean,
            std_error=se,
            n_total=n,
            n_survived=int(np.count_nonzero(kinds == int(OutcomeKind.ABSORBED))),
            n_truncated=int(np.count_nonzero(kinds == int(OutcomeKind.TRUNCATED))),
            wall_time=wall_time,
            n_killed=int(np.count_nonzero(kinds == int(OutcomeKind.KILLED))),
            n_escaped=int(np.count_nonzero(kinds == int(OutcomeKind.ESCAPED))),
            mean_steps=math.fsum(steps) / n,
        )


def estimate(domain: Domain, config: SolverConfig, point, threads: int | None = 1,
             first_index: int = 0) -> Estimate:
    """Monte Carlo estimate of the solution at ``point`` from ``config.n_walkers`` walks.

    The mean is the summed scores of absorbed walkers divided by the total
    number of walkers (killed and escaped walkers count as zero).
    """
    point = as_vec3(point)
    t0 = time.perf_counter()
    batch = run_walks(domain, config, point, first_index=first_index, threads=threads)
    wall = time.perf_counter() - t0
    return Estimate.from_batches(domain, [batch], wall)


@dataclass(frozen=True)
class DeltaBias:
    delta: float
    at_delta: Estimate
    at_tenth: Estimate

    @property
    def difference(self) -> float:
        return self.at_delta.mean - self.at_tenth.mean

    @property
    def combined_std_error(self) -> float:
        return math.hypot(self.at_delta.std_error, self.at_tenth.std_error)


def delta_bias_check(domain: Domain, config: SolverConfig, point, threads: int | None = 1) -> DeltaBias:
    """Estimate at ``delta`` and ``delta / 10`` with independent streams.

    The second run uses seed ``config.seed + 1``.
    """
    first = estimate(domain, config, point, threads=threads)
    second_cfg = config.with_(delta=config.delta / 10, seed=(config.seed + 1) % 2**64)
    second = estimate(domain, second_cfg, point, threads=threads)
    return DeltaBias(config.delta, first, second)


@dataclass(frozen=True)
class MethodRecord:
    method: Method
    cpu_time_per_run: float
    variance: float
    run_means: tuple[float, ...] = field(repr=False)

    @property
    def laboriousness(self) -> float:
        return self.cpu_time_per_run * self.variance

    @property
    def mean(self) -> float:
        return math.fsum(self.run_means) / len(self.run_means)

    @property
    def std_error(self) -> float:
        """Standard error of the mean over all runs."""
        return math.sqrt(self.variance / len(self.run_means))


@dataclass(frozen=True)
class BenchReport:
    records: tuple[MethodRecord, ...]
    runs: int
    n_walkers: int
    kappa: float
    delta: float

    def __getitem__(self, method) -> MethodRecord:
        method = Method(method)
        for rec in self.records:
            if rec.method is method:
                return rec
        raise KeyError(method)


def _timed_run_mean(domain: Domain, config: SolverConfig, point, first_index: int) -> tuple[float, float]:
    t0 = time.perf_counter()
    batch = run_walks(domain, config, point, first_index=first_index, threads=1)
    elapsed = time.perf_counter() - t0
    return elapsed, math.fsum(batch.scores(domain)) / config.n_walkers


def _record(method: Method, times: list[float], means: list[float]) -> MethodRecord:
    m = math.fsum(means) / len(means)
    var = math.fsum((x - m) ** 2 for x in means) / (len(means) - 1)
    return MethodRecord(method, math.fsum(times) / len(times), var, tuple(means))


def laboriousness(domain: Domain, config_new: SolverConfig, config_old: SolverConfig, point,
                  runs: int = 100) -> BenchReport:
    """Time and across-run variance of both methods over ``runs`` independent runs.

    Run ``j`` uses walker indices ``j*N .. (j+1)*N - 1``. Timing is single
    threaded and excludes compilation.
    """
    if runs < 2:
        raise ConfigurationError(f"need at least 2 runs to form a variance, got {runs}")
    if config_new.method is not Method.NEW or config_old.method is not Method.OLD:
        raise ConfigurationError("expected one new-method and one old-method configuration")
    for attr in ("kappa", "delta", "n_walkers"):
        if getattr(config_new, attr) != getattr(config_old, attr):
            raise ConfigurationError(f"configs differ in {attr}")
    point = as_vec3(point)
    config_new.check(domain, point)
    config_old.check(domain, point)
    warm_up()
    configs = (config_old, config_new)
    times: list[list[float]] = [[], []]
    means: list[list[float]] = [[], []]
    n = config_new.n_walkers
    # alternate methods so drift in machine load hits both equally
    for j in range(runs):
        for k, cfg in enumerate(configs):
            t, m = _timed_run_mean(domain, cfg, point, j * n)
            times[k].append(t)
            means[k].append(m)
    records = tuple(_record(cfg.method, times[k], means[k]) for k, cfg in enumerate(configs))
    return BenchReport(records, runs, config_new.n_walkers, config_new.kappa, config_new.delta)
