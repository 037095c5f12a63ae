"""Closed-form potentials for the benchmark geometries, normalised to 1 on the boundary.

All profiles are functions of ``r``, the distance from the charged surface
(or from the mid-plane for the slab).
"""
from __future__ import annotations

import math

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_MAX_TERMS = 500


def _k0_series(x: float) -> float:
    # K0 = -(ln(x/2) + gamma) I0(x) + sum_k (x^2/4)^k / (k!)^2 * H_k
    q = 0.25 * x * x
    term = 1.0
    i0 = 1.0
    tail = 0.0
    harmonic = 0.0
    for k in range(1, _MAX_TERMS):
        term *= q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        tail += term * harmonic
        if term < _EPS * i0 and term * harmonic < _EPS * tail:
            break
    return -(math.log(0.5 * x) + EULER_GAMMA) * i0 + tail


def _k0_continued_fraction(x: float) -> float:
    # Steed's method for the second continued fraction (order zero):
    # K0(x) = sqrt(pi / 2x) e^{-x} / s
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_TERMS):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind, order zero, for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"bessel_k0 needs x > 0, got {x}")
    if x <= 2.0:
        return _k0_series(x)
    return _k0_continued_fraction(x)


def analytic_half_space(r: float, kappa: float) -> float:
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return math.exp(-kappa * r)


def analytic_slab(r: float, L: float, kappa: float) -> float:
    """``cosh(kappa r) / cosh(kappa L)`` for ``|r| <= L``."""
    if abs(r) > L:
        raise ValueError(f"|r| = {abs(r)} exceeds the half-width {L}")
    if kappa * L > 700:
        # ratio of exponentials, avoids cosh overflow
        return math.exp(kappa * (abs(r) - L)) * (1 + math.exp(-2 * kappa * abs(r))) / (1 + math.exp(-2 * kappa * L))
    return math.cosh(kappa * r) / math.cosh(kappa * L)


def analytic_cylinder(r: float, R: float, kappa: float) -> float:
    """``K0(kappa (R + r)) / K0(kappa R)`` outside a cylinder of radius ``R``."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if not kappa > 0:
        raise ValueError("the exterior cylinder profile needs kappa > 0")
    if r == 0:
        return 1.0
    return bessel_k0(kappa * (R + r)) / bessel_k0(kappa * R)


def analytic_sphere(r: float, R: float, kappa: float) -> float:
    """``R / (R + r) * exp(-kappa r)`` outside a sphere of radius ``R``."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    return R / (R + r) * math.exp(-kappa * r)


def analytic_profile(geometry: str, r: float, kappa: float, L: float = 1.0, R: float = 1.0) -> float:
    """Analytic value for a benchmark geometry selected by its CLI name."""
    if geometry == "half_space":
        return analytic_half_space(r, kappa)
    if geometry == "slab":
        return analytic_slab(r, L, kappa)
    if geometry == "cylinder":
        return analytic_cylinder(r, R, kappa)
    if geometry == "sphere":
        return analytic_sphere(r, R, kappa)
    raise ValueError(f"unknown geometry {geometry!r}")
