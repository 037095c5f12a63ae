"""Single random walks: survival-probability killing and the weighted variant.

Both walks repeatedly jump to a uniform point on the largest sphere that fits
in the domain. The new method removes the walker before a jump of radius ``d``
with probability ``1 - p(d)``; the weighted method never removes walkers and
instead multiplies a weight by ``p(d)``. Per step the new method draws the
survival uniform first, then ``cos(theta)`` and the azimuth.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from numba import njit

from .errors import ConfigurationError, InvalidPointError
from .geometry import Domain, Vec3, as_vec3
from .rng import U64_MASK, RngStream, direction_from_uniforms

SERIES_CUTOFF = 1e-4
LOG_CUTOFF = 700.0
DEFAULT_MAX_STEPS = 1_000_000


@njit(cache=True)
def survival_of_product(x):
    """``x / sinh(x)`` for ``x >= 0``, stable at both ends."""
    if x < SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    if x > LOG_CUTOFF:
        # sinh(x) = e^x / 2 to double precision here
        return math.exp(math.log(2.0 * x) - x)
    return x / math.sinh(x)


def survival_probability(d: float, kappa: float) -> float:
    """Probability that a walker survives a jump of radius ``d``: ``d*kappa / sinh(d*kappa)``."""
    if not d > 0:
        raise ValueError(f"radius must be positive, got {d}")
    if not kappa >= 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    return survival_of_product(d * kappa)


class Method(str, enum.Enum):
    NEW = "new"
    OLD = "old"


class OutcomeKind(enum.IntEnum):
    ABSORBED = 0
    KILLED = 1
    TRUNCATED = 2
    # weighted method only: walker passed the cut-off distance, scored 0
    ESCAPED = 3


@dataclass(frozen=True)
class SolverConfig:
    kappa: float
    delta: float = 1e-4
    n_walkers: int = 100_000
    seed: int = 0
    method: Method = Method.NEW
    max_steps: int = DEFAULT_MAX_STEPS
    cutoff_distance: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ConfigurationError(f"kappa must be finite and >= 0, got {self.kappa}")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ConfigurationError(f"delta must be positive, got {self.delta}")
        if self.n_walkers < 1:
            raise ConfigurationError(f"n_walkers must be >= 1, got {self.n_walkers}")
        if self.max_steps < 1:
            raise ConfigurationError(f"max_steps must be >= 1, got {self.max_steps}")
        if not 0 <= self.seed <= U64_MASK:
            raise ConfigurationError(f"seed must be in [0, 2**64), got {self.seed}")
        if self.cutoff_distance is not None and not self.cutoff_distance > 0:
            raise ConfigurationError(f"cutoff_distance must be positive, got {self.cutoff_distance}")

    def with_(self, **changes) -> SolverConfig:
        return replace(self, **changes)

    def check(self, domain: Domain, start: Vec3) -> None:
        """Reject configurations whose walks from ``start`` may not terminate."""
        d0 = domain.signed_distance(start)
        if d0 < 0:
            raise InvalidPointError(f"start {start} is outside {domain!r}")
        if self.method is Method.NEW and self.kappa == 0 and domain.is_open:
            raise ConfigurationError(
                f"kappa=0 on the open domain {domain!r} never terminates with the new method"
            )
        if self.method is Method.OLD and domain.is_open and self.cutoff_distance is None:
            raise ConfigurationError(f"the weighted method needs cutoff_distance on the open domain {domain!r}")
        if self.cutoff_distance is not None and not self.cutoff_distance > d0:
            raise ConfigurationError(
                f"cutoff_distance {self.cutoff_distance} must exceed the start's distance {d0} to the boundary"
            )


@dataclass(frozen=True)
class WalkerState:
    position: Vec3
    steps: int = 0
    weight: float = 1.0


@dataclass(frozen=True)
class WalkOutcome:
    kind: OutcomeKind
    boundary_point: Vec3 | None
    steps: int
    weight: float

    @property
    def absorbed(self) -> bool:
        return self.kind is OutcomeKind.ABSORBED


def _jump(p: Vec3, d: float, stream: RngStream) -> Vec3:
    dx, dy, dz = direction_from_uniforms(stream.uniform(), stream.uniform())
    return Vec3(p.x + d * dx, p.y + d * dy, p.z + d * dz)


def wos_step(state: WalkerState, domain: Domain, stream: RngStream, delta: float = 0.0) -> WalkerState:
    """Jump to a uniform point on the largest sphere around ``state.position`` inside the domain."""
    d = domain.signed_distance(state.position)
    if not d > 0:
        raise InvalidPointError(f"{state.position} is not inside {domain!r}")
    if d < delta:
        raise InvalidPointError(f"{state.position} is inside the absorption layer (d={d} < {delta})")
    return WalkerState(_jump(state.position, d, stream), state.steps + 1, state.weight)


def run_walk_new(domain: Domain, config: SolverConfig, start, stream: RngStream) -> WalkOutcome:
    if config.method is not Method.NEW:
        raise ConfigurationError("run_walk_new requires method=new")
    pos = as_vec3(start)
    config.check(domain, pos)
    kappa, delta = config.kappa, config.delta
    steps = 0
    while True:
        d = domain.signed_distance(pos)
        if d < delta:
            return WalkOutcome(OutcomeKind.ABSORBED, domain.project(pos), steps, 1.0)
        if steps >= config.max_steps:
            return WalkOutcome(OutcomeKind.TRUNCATED, None, steps, 1.0)
        if stream.uniform() > survival_of_product(d * kappa):
            return WalkOutcome(OutcomeKind.KILLED, None, steps, 0.0)
        pos = _jump(pos, d, stream)
        steps += 1


def run_walk_old(domain: Domain, config: SolverConfig, start, stream: RngStream) -> WalkOutcome:
    if config.method is not Method.OLD:
        raise ConfigurationError("run_walk_old requires method=old")
    pos = as_vec3(start)
    config.check(domain, pos)
    kappa, delta = config.kappa, config.delta
    cutoff = math.inf if config.cutoff_distance is None else config.cutoff_distance
    steps = 0
    weight = 1.0
    while True:
        d = domain.signed_distance(pos)
        if d < delta:
            return WalkOutcome(OutcomeKind.ABSORBED, domain.project(pos), steps, weight)
        if d > cutoff:
            return WalkOutcome(OutcomeKind.ESCAPED, None, steps, 0.0)
        if steps >= config.max_steps:
            return WalkOutcome(OutcomeKind.TRUNCATED, None, steps, weight)
        weight *= survival_of_product(d * kappa)
        pos = _jump(pos, d, stream)
        steps += 1


def run_walk(domain: Domain, config: SolverConfig, start, stream: RngStream) -> WalkOutcome:
    if config.method is Method.NEW:
        return run_walk_new(domain, config, start, stream)
    return run_walk_old(domain, config, start, stream)
