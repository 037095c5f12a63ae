import math

import numpy as np
import pytest
from scipy import stats

from wos_lpbe import (
    ConfigurationError,
    CylinderExterior,
    Domain,
    HalfSpace,
    InvalidPointError,
    Method,
    OutcomeKind,
    Slab,
    SolverConfig,
    SphereExterior,
    Vec3,
    WalkerState,
    make_stream,
    run_walk_new,
    run_walk_old,
    run_walks,
    survival_probability,
    wos_step,
)
from wos_lpbe.walker import survival_of_product


class ForcedStream:
    """Stream stub returning a fixed sequence of uniforms."""

    def __init__(self, values):
        self.values = list(values)
        self.counter = 0

    def uniform(self):
        v = self.values[self.counter]
        self.counter += 1
        return v


# values frozen from mpmath at 30 digits
def test_survival_examples():
    assert survival_probability(1, 0) == 1
    assert math.isclose(survival_probability(1, 1), 0.8509181282393216, rel_tol=1e-14)
    assert math.isclose(survival_probability(2, 5), 9.079985971212216e-4, rel_tol=1e-13)


def test_survival_errors():
    with pytest.raises(ValueError):
        survival_probability(0, 1)
    with pytest.raises(ValueError):
        survival_probability(-1, 1)
    with pytest.raises(ValueError):
        survival_probability(1, -1)


@pytest.mark.parametrize("x", [1e-8, 1e-4, 0.5, 30.0, 699.0, 701.0, 705.0])
def test_survival_against_high_precision(x):
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    exact = float(mpmath.mpf(x) / mpmath.sinh(mpmath.mpf(x)))
    assert math.isclose(survival_of_product(x), exact, rel_tol=1e-13)


def test_wos_step_length():
    dom = SphereExterior(1)
    stream = make_stream(3, 0)
    state = WalkerState(Vec3(0.3, -0.2, 2.5))
    for _ in range(200):
        d = dom.distance_to_boundary(state.position)
        if d < 1e-3:
            break
        new = wos_step(state, dom, stream)
        assert abs((new.position - state.position).norm() - d) <= 1e-12 * d
        assert new.steps == state.steps + 1
        state = new


def test_wos_step_forced_direction():
    new = wos_step(WalkerState(Vec3(0, 0, 2)), SphereExterior(1), ForcedStream([1.0, 0.0]))
    assert new.position == Vec3(0, 0, 3)


def test_wos_step_in_layer_rejected():
    with pytest.raises(InvalidPointError):
        wos_step(WalkerState(Vec3(0, 0, 1e-5)), HalfSpace(), make_stream(0, 0), delta=1e-4)


def test_wos_step_directions_uniform():
    dom = Slab(1)
    start = WalkerState(Vec3(0, 0, 0.2))
    d = dom.distance_to_boundary(start.position)
    stream = make_stream(21, 0)
    dirs = np.array([tuple((wos_step(start, dom, stream).position - start.position) * (1 / d))
                     for _ in range(100_000)])
    octant = (dirs[:, 0] > 0) * 4 + (dirs[:, 1] > 0) * 2 + (dirs[:, 2] > 0)
    assert stats.chisquare(np.bincount(octant, minlength=8)).pvalue > 0.01


def test_immediate_absorption():
    cfg = SolverConfig(kappa=1.0, delta=1e-4)
    out = run_walk_new(HalfSpace(), cfg, Vec3(1, 2, 5e-5), make_stream(0, 0))
    assert out.kind is OutcomeKind.ABSORBED
    assert out.steps == 0
    assert out.boundary_point == Vec3(1, 2, 0)
    assert out.weight == 1.0


def test_start_on_boundary_absorbed():
    cfg = SolverConfig(kappa=1.0)
    out = run_walk_new(SphereExterior(1), cfg, Vec3(0, 0, 1), make_stream(0, 0))
    assert out.absorbed and out.steps == 0


def test_laplace_limit_never_kills():
    cfg = SolverConfig(kappa=0.0, n_walkers=10_000, max_steps=10**6)
    batch = run_walks(Slab(1), cfg, Vec3(0, 0, 0))
    assert batch.count(OutcomeKind.ABSORBED) == 10_000


def test_strong_screening_kills_everything():
    # analytic absorbed fraction is exp(-100) / 11
    cfg = SolverConfig(kappa=10.0, n_walkers=100_000)
    batch = run_walks(SphereExterior(1), cfg, Vec3(0, 0, 11))
    assert batch.count(OutcomeKind.KILLED) == 100_000


def _replay_radii(dom, cfg, start, seed, index):
    """Radii of the jumps of a weighted walk, replayed through wos_step."""
    stream = make_stream(seed, index)
    state = WalkerState(start)
    radii = []
    while dom.signed_distance(state.position) >= cfg.delta:
        radii.append(dom.signed_distance(state.position))
        state = wos_step(state, dom, stream, cfg.delta)
    return radii, state.position


def test_old_weight_is_product_of_survival_probabilities():
    dom = Slab(1)
    cfg = SolverConfig(kappa=1.3, method="old")
    start = Vec3(0, 0, 0.1)
    for i in range(50):
        out = run_walk_old(dom, cfg, start, make_stream(cfg.seed, i))
        radii, end = _replay_radii(dom, cfg, start, cfg.seed, i)
        q = 1.0
        for d in radii:
            q *= survival_probability(d, cfg.kappa)
        assert out.kind is OutcomeKind.ABSORBED
        assert out.steps == len(radii)
        assert out.weight == q
        assert out.boundary_point == dom.project(end)


def test_old_laplace_limit_weight_one():
    cfg = SolverConfig(kappa=0.0, method="old", n_walkers=2000)
    batch = run_walks(Slab(1), cfg, Vec3(0, 0, 0.4))
    assert np.all(batch.weights == 1.0)


def test_old_slab_mean_weight():
    cfg = SolverConfig(kappa=1.0, method="old", n_walkers=100_000, seed=5)
    batch = run_walks(Slab(1), cfg, Vec3(0, 0, 0))
    w = batch.weights
    assert abs(w.mean() - 1 / math.cosh(1)) < 3 * w.std(ddof=1) / math.sqrt(len(w))


def test_old_method_never_kills():
    cfg = SolverConfig(kappa=2.0, method="old", n_walkers=5000, cutoff_distance=5.0)
    batch = run_walks(SphereExterior(1), cfg, Vec3(0, 0, 2))
    assert batch.count(OutcomeKind.KILLED) == 0
    assert batch.count(OutcomeKind.ESCAPED) > 0
    assert np.all(batch.weights[batch.kinds == OutcomeKind.ESCAPED] == 0)
    assert np.all((batch.weights >= 0) & (batch.weights <= 1))


def test_stream_accounting():
    dom = Slab(1)
    cfg = SolverConfig(kappa=1.0)
    killed = 0
    for i in range(300):
        stream = make_stream(cfg.seed, i)
        out = run_walk_new(dom, cfg, Vec3(0, 0, 0), stream)
        eta_draws = stream.counter - 2 * out.steps
        assert eta_draws == out.steps + (out.kind is OutcomeKind.KILLED)
        killed += out.kind is OutcomeKind.KILLED
    assert killed > 0
    stream = make_stream(0, 0)
    out = run_walk_old(dom, cfg.with_(method="old"), Vec3(0, 0, 0), stream)
    assert stream.counter == 2 * out.steps


def test_replay_draw_order():
    # survival uniform first, then cos(theta), then azimuth
    dom = Slab(1)
    cfg = SolverConfig(kappa=1.0)
    out = run_walk_new(dom, cfg, Vec3(0, 0, 0), ForcedStream([0.999, 0.5, 0.25]))
    assert out.kind is OutcomeKind.KILLED and out.steps == 0
    # first jump straight up (u=1 -> cos 1) reaches the plate
    out = run_walk_new(dom, cfg, Vec3(0, 0, 0), ForcedStream([0.0, 1.0, 0.0]))
    assert out.kind is OutcomeKind.ABSORBED and out.steps == 1
    assert out.boundary_point == Vec3(0, 0, 1)


def test_truncation():
    cfg = SolverConfig(kappa=0.5, max_steps=1, n_walkers=1000)
    batch = run_walks(Slab(1), cfg, Vec3(0, 0, 0))
    kinds = np.bincount(batch.kinds, minlength=4)
    assert kinds.sum() == 1000
    assert kinds[OutcomeKind.TRUNCATED] > 0
    assert np.all(batch.steps <= 1)


def test_outcomes_deterministic():
    cfg = SolverConfig(kappa=1.0, n_walkers=500, seed=99)
    a = run_walks(HalfSpace(), cfg, Vec3(0, 0, 1))
    b = run_walks(HalfSpace(), cfg, Vec3(0, 0, 1))
    assert np.array_equal(a.kinds, b.kinds)
    assert np.array_equal(a.points, b.points, equal_nan=True)


@pytest.mark.parametrize("method", ["new", "old"])
@pytest.mark.parametrize("dom,start", [
    (Slab(1), Vec3(0.1, 0.2, 0.3)),
    (HalfSpace(), Vec3(0, 0, 1)),
    (CylinderExterior(1), Vec3(2, 0, 0)),
    (SphereExterior(1), Vec3(0, 0, 2)),
])
def test_compiled_batch_matches_reference_walk(dom, start, method):
    cfg = SolverConfig(kappa=1.0, seed=7, method=method,
                       cutoff_distance=50.0 if method == "old" and dom.is_open else None)
    batch = run_walks(dom, cfg, start, count=200, first_index=1000)
    walk = run_walk_new if method == "new" else run_walk_old
    for i in range(200):
        out = walk(dom, cfg, start, make_stream(7, 1000 + i))
        assert out.kind == batch.kinds[i]
        assert out.steps == batch.steps[i]
        assert out.weight == batch.weights[i]
        if out.absorbed:
            assert tuple(out.boundary_point) == tuple(batch.points[i])


def test_configuration_errors():
    with pytest.raises(ConfigurationError):
        SolverConfig(kappa=-1)
    with pytest.raises(ConfigurationError):
        SolverConfig(kappa=1, delta=0)
    with pytest.raises(ConfigurationError):
        SolverConfig(kappa=1, max_steps=0)
    with pytest.raises(ConfigurationError):
        SolverConfig(kappa=1, n_walkers=0)
    with pytest.raises(ValueError):
        SolverConfig(kappa=1, method="sideways")
    with pytest.raises(ConfigurationError):
        run_walk_new(SphereExterior(1), SolverConfig(kappa=0), Vec3(0, 0, 2), make_stream(0, 0))
    with pytest.raises(ConfigurationError):
        run_walk_old(HalfSpace(), SolverConfig(kappa=1, method="old"), Vec3(0, 0, 2), make_stream(0, 0))
    with pytest.raises(ConfigurationError):
        run_walk_old(HalfSpace(), SolverConfig(kappa=1, method="old", cutoff_distance=1.0),
                     Vec3(0, 0, 2), make_stream(0, 0))
    with pytest.raises(ConfigurationError):
        run_walk_old(Slab(1), SolverConfig(kappa=1), Vec3(0, 0, 0), make_stream(0, 0))
    with pytest.raises(InvalidPointError):
        run_walk_new(SphereExterior(1), SolverConfig(kappa=1), Vec3(0, 0, 0.5), make_stream(0, 0))


def test_slab_accepts_laplace_limit():
    SolverConfig(kappa=0).check(Slab(1), Vec3(0, 0, 0))
    assert SolverConfig(kappa=1, method=Method.OLD).method is Method.OLD


class Ball(Domain):
    """Interior of a ball: a user-defined domain exercising the generic walk path."""

    is_open = False

    def __init__(self, R):
        super().__init__(1.0)
        self.R = R

    def signed_distance(self, p):
        return self.R - p.norm()

    def project(self, p):
        return p * (self.R / p.norm())


def test_generic_domain_against_closed_form():
    # inside a ball: psi(rho) = R sinh(kappa rho) / (rho sinh(kappa R))
    R, kappa, rho = 1.0, 2.0, 0.5
    from wos_lpbe import estimate

    est = estimate(Ball(R), SolverConfig(kappa=kappa, n_walkers=20_000, seed=3), Vec3(0, 0, rho))
    exact = R * math.sinh(kappa * rho) / (rho * math.sinh(kappa * R))
    assert abs(est.mean - exact) < 4 * est.std_error
