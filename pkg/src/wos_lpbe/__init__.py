"""Grid-free walk-on-spheres Monte Carlo for the linearized Poisson-Boltzmann equation."""
from .analytic import (
    analytic_cylinder,
    analytic_half_space,
    analytic_profile,
    analytic_slab,
    analytic_sphere,
    bessel_k0,
)
from .engine import WalkBatch, run_walks
from .errors import ConfigurationError, InvalidPointError, OffBoundaryError, WosError
from .estimator import BenchReport, DeltaBias, Estimate, MethodRecord, delta_bias_check, estimate, laboriousness
from .geometry import CylinderExterior, Domain, HalfSpace, Slab, SphereExterior, Vec3, make_domain
from .rng import RngStream, make_stream
from .walker import (
    Method,
    OutcomeKind,
    SolverConfig,
    WalkerState,
    WalkOutcome,
    run_walk_new,
    run_walk_old,
    survival_probability,
    wos_step,
)

__all__ = [
    "BenchReport", "ConfigurationError", "CylinderExterior", "DeltaBias", "Domain", "Estimate",
    "HalfSpace", "InvalidPointError", "Method", "MethodRecord", "OffBoundaryError", "OutcomeKind",
    "RngStream", "Slab", "SolverConfig", "SphereExterior", "Vec3", "WalkBatch", "WalkOutcome",
    "WalkerState", "WosError", "analytic_cylinder", "analytic_half_space", "analytic_profile",
    "analytic_slab", "analytic_sphere", "bessel_k0", "delta_bias_check", "estimate",
    "laboriousness", "make_domain", "make_stream", "run_walk_new", "run_walk_old", "run_walks",
    "survival_probability", "wos_step",
]
