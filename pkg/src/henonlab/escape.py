"""Escape detection, bounded-set membership and Green functions.

The filtration radius R makes the region |y| >= max(|x|, R) forward
invariant with guaranteed doubling of |y| under every elementary factor
(and symmetrically in x for the inverse).  Green values are escape-rate
limits G(z) = lim d^{-n} log+ ||f^{+-n}(z)|| computed with an a
posteriori geometric tail bound; iteration past escape runs in
extended-range arithmetic, so doubly exponential magnitudes never
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import MaxDepthExceeded
from .maps import HenonMap, Point, in_escape_region
from .numerics import (XC, LN2, xc_abs_log, xc_add, xc_horner_monic, xc_mul,
                       xc_mulc, xc_sub)


def _factor_bounds(hmap: HenonMap):
    """Per-factor coefficient sums S_j, forward B_j = S_j + |a_j| and
    backward Btil_j = S_j + 1."""
    S = [sum(abs(c) for c in f.coeffs) for f in hmap.factors]
    Bf = [s + abs(f.a) for s, f in zip(S, hmap.factors)]
    Bb = [s + 1.0 for s in S]
    return S, Bf, Bb


def filtration_radius(hmap: HenonMap) -> float:
    """Radius R of the escape filtration.

    Chosen from the coefficient magnitudes by the reverse triangle
    inequality so that on |y| >= max(|x|, R) each forward factor gives
    |y'| >= 2|y| (and the inverse factors double |x| on the symmetric
    region): |p(y) - a x| >= |y|^D - (sum|c_i| + |a|)|y|^{D-1}.
    """
    S, Bf, _ = _factor_bounds(hmap)
    r = 1.0
    for s, bf, f in zip(S, Bf, hmap.factors):
        r = max(r, bf + 2.0)                 # forward doubling
        r = max(r, s + 1.0 + 2.0 * abs(f.a))  # backward doubling
    return r


def _scan(hmap: HenonMap, z: Point, max_n: int, direction: str, radius: float):
    """(escape index or None, stayed inside the radius bidisk)."""
    from .maps import evaluate, evaluate_inverse

    step = evaluate if direction == "forward" else evaluate_inverse
    inside = True
    cur = z
    for n in range(max_n + 1):
        if in_escape_region(cur, radius, direction):
            return n, inside
        if max(abs(cur[0]), abs(cur[1])) > radius:
            inside = False
        if n < max_n:
            cur = step(hmap, cur)
    return None, inside


def escape_time(hmap: HenonMap, z: Point, max_n: int, direction: str = "forward",
                radius: float | None = None) -> int | None:
    """First n <= max_n with the orbit in the escape region, else None.

    None within max_n is the numerical proxy for membership in K+
    (forward) or K- (backward).
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if radius is None:
        radius = filtration_radius(hmap)
    t, _ = _scan(hmap, z, max_n, direction, radius)
    return t


class KStatus(str, Enum):
    IN_K = "in_K"
    ESCAPES = "escapes"
    UNDETERMINED = "undetermined"


def in_K(hmap: HenonMap, z: Point, max_n: int = 1000) -> KStatus:
    """Bounded-orbit verdict for both time directions.

    IN_K requires no escape in either direction and the whole scanned
    window inside the radius-R bidisk; windows that leave the bidisk
    without triggering escape stay UNDETERMINED.
    """
    radius = filtration_radius(hmap)
    tf, insf = _scan(hmap, z, max_n, "forward", radius)
    if tf is not None:
        return KStatus.ESCAPES
    tb, insb = _scan(hmap, z, max_n, "backward", radius)
    if tb is not None:
        return KStatus.ESCAPES
    if insf and insb:
        return KStatus.IN_K
    return KStatus.UNDETERMINED


@dataclass(frozen=True)
class GreenValue:
    """Green function evaluation: value (natural log scale), truncation
    depth, and an a posteriori bound on |value - limit|."""

    value: float
    depth: int
    error_bound: float

    def __post_init__(self):
        if self.value < 0 or self.error_bound < 0:
            raise ValueError("green values and error bounds are nonnegative")


def _tail_constants(hmap: HenonMap, direction: str):
    """(C_const, C_decay, gate) for the per-step log-increment bound.

    One full map application from magnitude w in the escape region obeys
    |log w' - d log w - const| <= C_decay / w once w >= gate, where the
    constant term collects the factor log|a_j| for the inverse branch.
    """
    S, Bf, Bb = _factor_bounds(hmap)
    degs = [f.degree for f in hmap.factors]
    avals = [abs(f.a) for f in hmap.factors]
    if direction == "backward":
        degs = degs[::-1]
        B = Bb[::-1]
        alog = [abs(math.log(a)) for a in avals[::-1]]
    else:
        B = Bf
        alog = [0.0] * len(Bf)
    d = float(hmap.d)
    c_const = 0.0
    c_decay = 0.0
    prod = 1.0
    for j, (dg, b, al) in enumerate(zip(degs, B, alog)):
        prod *= dg
        c_const += d * al / prod
        c_decay += 2.0 * d * b / (prod * 2.0**j)
    gate = max(filtration_radius(hmap), 2.0 * max(B))
    return c_const, c_decay, gate


def green(hmap: HenonMap, z: Point, direction: str = "plus", tol: float = 1e-10,
          max_depth: int = 1000) -> GreenValue:
    """Escape-rate Green function G+ (direction 'plus') or G- ('minus').

    Iterates until escape, then continues in extended-range arithmetic
    until the certified geometric tail falls below ``tol``.  Orbits with
    no escape that stay inside the radius-R bidisk return value 0 at the
    maximum depth; windows that leave the bidisk without escaping raise
    MaxDepthExceeded.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if direction not in ("plus", "minus"):
        raise ValueError("direction must be 'plus' or 'minus'")
    orbit_dir = "forward" if direction == "plus" else "backward"
    radius = filtration_radius(hmap)

    t, inside = _scan(hmap, z, max_depth, orbit_dir, radius)
    if t is None:
        if inside:
            return GreenValue(0.0, max_depth, 0.0)
        raise MaxDepthExceeded("orbit neither escaped nor stayed in the bidisk")

    # replay to the escape point in doubles, then switch representation
    from .maps import evaluate, evaluate_inverse

    step = evaluate if orbit_dir == "forward" else evaluate_inverse
    cur = z
    for _ in range(t):
        cur = step(hmap, cur)

    d = float(hmap.d)
    c_const, c_decay, gate = _tail_constants(hmap, direction)
    X = XC(cur[0])
    Y = XC(cur[1])
    n = t
    extra_cap = max(64, int(math.log(max(c_const, 1.0) / (tol * (d - 1.0)) + 3.0) / math.log(d)) + 32)
    for k in range(extra_cap + 1):
        # growing coordinate: |y| forward, |x| backward
        g_log = xc_abs_log(Y if orbit_dir == "forward" else X)
        w = math.exp(min(g_log, 700.0))
        if k >= 10 and w >= gate:
            bound = d**(-n) * (c_const / (d - 1.0) + (c_decay / w) * (2.0 / (2.0 * d - 1.0)))
            if bound <= tol:
                value = max(g_log, 0.0) * d**(-n)
                return GreenValue(max(value, 0.0), n, bound)
        if orbit_dir == "forward":
            for f in hmap.factors:
                X, Y = Y, xc_sub(xc_horner_monic(f.coeffs, Y), xc_mulc(X, f.a))
        else:
            for f in reversed(hmap.factors):
                X, Y = xc_mulc(xc_sub(xc_horner_monic(f.coeffs, X), Y), 1.0 / f.a), X
        n += 1
    raise MaxDepthExceeded("green tail bound did not reach tol, increase depth")
