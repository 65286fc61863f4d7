"""Finite-time Lyapunov exponents by QR cocycle accumulation.

An orthonormal frame is propagated through the differential along the
orbit and re-orthonormalized every step (condition growth is roughly
e^{(lam1-lam2) k} at saddles, so any lag is unaffordable); the exponents
are per-step averages of the log triangular diagonal.  A burn-in phase
aligns the frame with the Oseledec flag before accumulation starts:
frame memory decays like (|lam2|/|lam1|)^t, and without it the averages
carry an O(1/N) transient that would defeat the advertised tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OrbitEscaped
from .escape import filtration_radius
from .maps import HenonMap, Point, evaluate, in_escape_region, jacobian


@dataclass(frozen=True)
class LyapunovEstimate:
    """Finite-time exponents (nats per iteration), lambda1 >= lambda2."""

    lambda1: float
    lambda2: float
    horizon: int
    start: Point


def _qr_step(J, q1, q2):
    """One modified Gram-Schmidt step of the frame through J."""
    w1 = (J[0] * q1[0] + J[1] * q1[1], J[2] * q1[0] + J[3] * q1[1])
    r11 = math.sqrt(abs(w1[0]) ** 2 + abs(w1[1]) ** 2)
    q1n = (w1[0] / r11, w1[1] / r11)
    w2 = (J[0] * q2[0] + J[1] * q2[1], J[2] * q2[0] + J[3] * q2[1])
    proj = q1n[0].conjugate() * w2[0] + q1n[1].conjugate() * w2[1]
    w2 = (w2[0] - proj * q1n[0], w2[1] - proj * q1n[1])
    r22 = math.sqrt(abs(w2[0]) ** 2 + abs(w2[1]) ** 2)
    q2n = (w2[0] / r22, w2[1] / r22)
    return q1n, q2n, r11, r22


def finite_time_exponents(hmap: HenonMap, z: Point, horizon: int,
                          burn_in: int = 64, cycle=None,
                          frame=None) -> LyapunovEstimate:
    """Per-step averaged exponents over ``horizon`` steps after burn-in.

    Without ``cycle`` the orbit is iterated forward and must stay out of
    the escape region for the whole window (OrbitEscaped otherwise).
    With ``cycle`` (a verified periodic orbit containing z) the stored
    points are cycled instead, which keeps arbitrarily long windows on
    the true orbit.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    total = burn_in + horizon
    radius = filtration_radius(hmap)

    if cycle is not None:
        cyc = list(cycle)
        try:
            i0 = next(i for i, w in enumerate(cyc)
                      if abs(w[0] - z[0]) + abs(w[1] - z[1]) < 1e-8)
        except StopIteration:
            raise ValueError("z is not a point of the supplied cycle") from None

        def points():
            i = i0
            while True:
                yield cyc[i % len(cyc)]
                i += 1
    else:
        if in_escape_region(z, radius, "forward"):
            raise OrbitEscaped("start lies in the escape region", escaped_at=0)

        def points():
            cur = z
            step = 0
            while True:
                yield cur
                cur = evaluate(hmap, cur)
                step += 1
                if in_escape_region(cur, radius, "forward"):
                    raise OrbitEscaped(
                        f"orbit escaped at step {step} before the horizon",
                        escaped_at=step)

    q1 = frame[0] if frame else (1 + 0j, 0j)
    q2 = frame[1] if frame else (0j, 1 + 0j)
    s1 = 0.0
    s2 = 0.0
    gen = points()
    for k in range(total):
        w = next(gen)
        J = jacobian(hmap, w)
        q1, q2, r11, r22 = _qr_step(J, q1, q2)
        if k >= burn_in:
            s1 += math.log(r11)
            s2 += math.log(r22)
    l1 = s1 / horizon
    l2 = s2 / horizon
    if l1 < l2:
        l1, l2 = l2, l1
    return LyapunovEstimate(l1, l2, horizon, z)


def inverse_exponents(hmap: HenonMap, z: Point, horizon: int,
                      burn_in: int = 64, cycle=None) -> LyapunovEstimate:
    """Exponents of f^{-1} along the backward orbit from z.

    On a periodic orbit these are exactly (-lambda2, -lambda1) of the
    forward estimate, up to rounding.
    """
    from .maps import evaluate_inverse, jacobian_inverse

    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    total = burn_in + horizon
    radius = filtration_radius(hmap)

    if cycle is not None:
        cyc = list(cycle)
        try:
            i0 = next(i for i, w in enumerate(cyc)
                      if abs(w[0] - z[0]) + abs(w[1] - z[1]) < 1e-8)
        except StopIteration:
            raise ValueError("z is not a point of the supplied cycle") from None

        def points():
            i = i0
            while True:
                yield cyc[i % len(cyc)]
                i -= 1
    else:
        if in_escape_region(z, radius, "backward"):
            raise OrbitEscaped("start lies in the backward escape region",
                               escaped_at=0)

        def points():
            cur = z
            step = 0
            while True:
                yield cur
                cur = evaluate_inverse(hmap, cur)
                step += 1
                if in_escape_region(cur, radius, "backward"):
                    raise OrbitEscaped(
                        f"backward orbit escaped at step {step}",
                        escaped_at=step)

    q1 = (1 + 0j, 0j)
    q2 = (0j, 1 + 0j)
    s1 = 0.0
    s2 = 0.0
    gen = points()
    for k in range(total):
        w = next(gen)
        J = jacobian_inverse(hmap, w)
        q1, q2, r11, r22 = _qr_step(J, q1, q2)
        if k >= burn_in:
            s1 += math.log(r11)
            s2 += math.log(r22)
    l1 = s1 / horizon
    l2 = s2 / horizon
    if l1 < l2:
        l1, l2 = l2, l1
    return LyapunovEstimate(l1, l2, horizon, z)
