"""Domains for the Dirichlet problem and the four benchmark geometries.

A domain is seen by the walker only through its signed distance (positive
inside), the projection onto the boundary, and the boundary data. The
built-in geometries additionally publish a ``(kind, params)`` code so the
compiled batch walker can evaluate the same formulas without calling back
into Python.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from numba import njit

from .errors import InvalidPointError, OffBoundaryError

BOUNDARY_TOL = 1e-9

HALF_SPACE = 0
SLAB = 1
CYLINDER = 2
SPHERE = 3


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate {name}={v}")
            object.__setattr__(self, name, v)

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def __add__(self, other: Vec3) -> Vec3:
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> Vec3:
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @classmethod
    def parse(cls, text: str) -> Vec3:
        """Parse ``"x,y,z"``."""
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated numbers, got {text!r}")
        return cls(*(float(p) for p in parts))


def as_vec3(p) -> Vec3:
    if isinstance(p, Vec3):
        return p
    x, y, z = p
    return Vec3(x, y, z)


# Compiled shape formulas, shared by the Python methods and the batch walker so
# both paths produce bit-identical walks.

@njit(cache=True)
def signed_distance_code(kind, params, x, y, z):
    if kind == HALF_SPACE:
        return z
    if kind == SLAB:
        L = params[0]
        return min(L - z, z + L)
    if kind == CYLINDER:
        return math.sqrt(x * x + y * y) - params[0]
    return math.sqrt(x * x + y * y + z * z) - params[0]


@njit(cache=True)
def project_code(kind, params, x, y, z):
    if kind == HALF_SPACE:
        return x, y, 0.0
    if kind == SLAB:
        L = params[0]
        # ties at z == 0 go to the upper plate
        if L - z <= z + L:
            return x, y, L
        return x, y, -L
    if kind == CYLINDER:
        s = params[0] / math.sqrt(x * x + y * y)
        return x * s, y * s, z
    s = params[0] / math.sqrt(x * x + y * y + z * z)
    return x * s, y * s, z * s


@njit(cache=True)
def _signed_distances(kind, params, points):
    out = np.empty(points.shape[0])
    for i in range(points.shape[0]):
        out[i] = signed_distance_code(kind, params, points[i, 0], points[i, 1], points[i, 2])
    return out


BoundaryData = Union[float, Callable[[Vec3], float]]


class Domain:
    """Open region with Dirichlet data on its boundary.

    Subclasses provide ``signed_distance`` (positive inside) and ``project``
    (closest boundary point, valid for points inside or just outside). They
    may override ``boundary_data``; the default returns ``potential`` if it is
    a number and calls it otherwise.
    """

    #: True when the distance to the boundary is unbounded over the domain.
    is_open: bool = True

    def __init__(self, potential: BoundaryData = 1.0):
        if not callable(potential):
            potential = float(potential)
        self.potential = potential

    @property
    def kernel_code(self) -> tuple[int, np.ndarray] | None:
        return None

    def signed_distance(self, p: Vec3) -> float:
        raise NotImplementedError

    def project(self, p: Vec3) -> Vec3:
        raise NotImplementedError

    def signed_distances(self, points: np.ndarray) -> np.ndarray:
        """``signed_distance`` for each row of an ``(n, 3)`` array."""
        return np.array([self.signed_distance(Vec3(*row)) for row in points], dtype=float)

    def boundary_data(self, b: Vec3) -> float:
        if callable(self.potential):
            return float(self.potential(b))
        return self.potential

    @property
    def max_boundary_value(self) -> float | None:
        """Largest boundary value when the data are constant per component, else None."""
        return None if callable(self.potential) else self.potential

    def contains(self, p) -> bool:
        return self.signed_distance(as_vec3(p)) > 0.0

    def distance_to_boundary(self, p) -> float:
        p = as_vec3(p)
        d = self.signed_distance(p)
        if not d > 0.0:
            raise InvalidPointError(f"{p} is not inside {self!r} (signed distance {d})")
        return d

    def nearest_boundary_point(self, p) -> Vec3:
        p = as_vec3(p)
        self.distance_to_boundary(p)
        return self.project(p)

    def boundary_value(self, b) -> float:
        b = as_vec3(b)
        d = self.signed_distance(b)
        if abs(d) > BOUNDARY_TOL:
            raise OffBoundaryError(f"{b} is {d} away from the boundary of {self!r}")
        return self.boundary_data(b)

    def boundary_values(self, points: np.ndarray) -> np.ndarray:
        """``boundary_value`` for each row of an ``(n, 3)`` array."""
        return np.array([self.boundary_value(Vec3(*row)) for row in points], dtype=float)


class _CodedDomain(Domain):
    kind: int = -1

    def __init__(self, params, potential: BoundaryData = 1.0):
        super().__init__(potential)
        self._params = np.asarray(params, dtype=np.float64)
        self._params.setflags(write=False)

    @property
    def kernel_code(self) -> tuple[int, np.ndarray]:
        return self.kind, self._params

    def signed_distance(self, p: Vec3) -> float:
        return signed_distance_code(self.kind, self._params, p.x, p.y, p.z)

    def project(self, p: Vec3) -> Vec3:
        return Vec3(*project_code(self.kind, self._params, p.x, p.y, p.z))

    def signed_distances(self, points: np.ndarray) -> np.ndarray:
        return _signed_distances(self.kind, self._params, np.ascontiguousarray(points, dtype=np.float64))

    def boundary_values(self, points: np.ndarray) -> np.ndarray:
        if callable(self.potential):
            return super().boundary_values(points)
        return np.full(len(points), self.potential)


class HalfSpace(_CodedDomain):
    """Region ``z > 0`` above a charged plane at ``z = 0``."""

    kind = HALF_SPACE

    def __init__(self, potential: BoundaryData = 1.0):
        super().__init__([0.0], potential)

    def __repr__(self) -> str:
        return "HalfSpace()"


class Slab(_CodedDomain):
    """Region ``|z| < L`` between plates at ``z = +L`` and ``z = -L``.

    ``lower_potential`` defaults to ``potential`` (both plates equally charged).
    """

    kind = SLAB
    is_open = False

    def __init__(self, L: float = 1.0, potential: float = 1.0, lower_potential: float | None = None):
        if not L > 0:
            raise ValueError(f"slab half-width must be positive, got {L}")
        super().__init__([L], potential)
        self.L = float(L)
        self.lower_potential = float(potential if lower_potential is None else lower_potential)

    def boundary_data(self, b: Vec3) -> float:
        return self.potential if b.z > 0 else self.lower_potential

    @property
    def max_boundary_value(self) -> float:
        return max(self.potential, self.lower_potential)

    def boundary_values(self, points: np.ndarray) -> np.ndarray:
        return np.where(points[:, 2] > 0, self.potential, self.lower_potential)

    def __repr__(self) -> str:
        return f"Slab(L={self.L})"


class CylinderExterior(_CodedDomain):
    """Region outside an infinite cylinder of radius ``R`` along the z-axis."""

    kind = CYLINDER

    def __init__(self, R: float = 1.0, potential: BoundaryData = 1.0):
        if not R > 0:
            raise ValueError(f"cylinder radius must be positive, got {R}")
        super().__init__([R], potential)
        self.R = float(R)

    def __repr__(self) -> str:
        return f"CylinderExterior(R={self.R})"


class SphereExterior(_CodedDomain):
    """Region outside a sphere of radius ``R`` centred at the origin."""

    kind = SPHERE

    def __init__(self, R: float = 1.0, potential: BoundaryData = 1.0):
        if not R > 0:
            raise ValueError(f"sphere radius must be positive, got {R}")
        super().__init__([R], potential)
        self.R = float(R)

    def __repr__(self) -> str:
        return f"SphereExterior(R={self.R})"


GEOMETRIES = ("half_space", "slab", "cylinder", "sphere")


def make_domain(name: str, L: float = 1.0, R: float = 1.0) -> Domain:
    """Build a benchmark geometry from its CLI name."""
    if name == "half_space":
        return HalfSpace()
    if name == "slab":
        return Slab(L)
    if name == "cylinder":
        return CylinderExterior(R)
    if name == "sphere":
        return SphereExterior(R)
    raise ValueError(f"unknown geometry {name!r}; expected one of {', '.join(GEOMETRIES)}")


def profile_point(domain: Domain, r: float) -> Vec3:
    """Point at profile coordinate ``r`` as plotted for each benchmark.

    ``r`` is the distance to the plate / cylinder surface / sphere surface, or
    the offset from the mid-plane for the slab.
    """
    if isinstance(domain, HalfSpace):
        return Vec3(0.0, 0.0, r)
    if isinstance(domain, Slab):
        return Vec3(0.0, 0.0, r)
    if isinstance(domain, CylinderExterior):
        return Vec3(domain.R + r, 0.0, 0.0)
    if isinstance(domain, SphereExterior):
        return Vec3(0.0, 0.0, domain.R + r)
    raise TypeError(f"no profile coordinate defined for {domain!r}")
