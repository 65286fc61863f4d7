"""Generalized Henon maps of C^2.

A map is an ordered composition of elementary factors

    f_j(x, y) = (y, p_j(y) - a_j x),      p_j monic of degree >= 2, a_j != 0,

applied left to right: f = f_m o ... o f_1.  Such compositions are
polynomial automorphisms; the inverse factors are
f_j^{-1}(x, y) = ((p_j(x) - y)/a_j, x) applied in reverse order.

Points of C^2 are plain ``(complex, complex)`` tuples and every
operation here is a pure function, safe to call concurrently.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError, Overflow
from .numerics import M2_EYE, OVERFLOW_CEILING, m2_mul

Point = tuple[complex, complex]


def _finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


def point(x: complex, y: complex) -> Point:
    """Validated point of C^2 (both components finite)."""
    x = complex(x)
    y = complex(y)
    if not (_finite(x) and _finite(y)):
        raise ValueError("point components must be finite")
    return (x, y)


def sup_norm(z: Point) -> float:
    return max(abs(z[0]), abs(z[1]))


@dataclass(frozen=True)
class ElementaryFactor:
    """One factor (x, y) -> (y, p(y) - a x); ``coeffs`` are c_0..c_{D-1} of
    the monic p, the leading coefficient 1 is implied."""

    coeffs: tuple[complex, ...]
    a: complex

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "a", complex(self.a))
        if len(coeffs) < 2:
            raise ConfigError("factor degree must be >= 2")
        if self.a == 0:
            raise ConfigError("factor coefficient a must be nonzero")
        if not all(_finite(c) for c in coeffs) or not _finite(self.a):
            raise ConfigError("factor coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def p(self, y: complex) -> complex:
        acc = 1 + 0j
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def dp(self, y: complex) -> complex:
        deg = len(self.coeffs)
        acc = complex(deg)
        for i in range(deg - 1, 0, -1):
            acc = acc * y + i * self.coeffs[i]
        return acc


@dataclass(frozen=True)
class HenonMap:
    """Composition of elementary factors with its algebraic degrees.

    For these maps in C^2 (k=2, p=1) the degrees of f and f^{-1} agree
    and equal the main dynamical degree: d_plus = d_minus = d = prod d_j.
    """

    factors: tuple[ElementaryFactor, ...]
    d_plus: int = field(init=False)
    d_minus: int = field(init=False)
    p: int = field(init=False, default=1)
    d: int = field(init=False)

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ConfigError("a map needs at least one factor")
        object.__setattr__(self, "factors", factors)
        d = 1
        for f in factors:
            d *= f.degree
        object.__setattr__(self, "d_plus", d)
        object.__setattr__(self, "d_minus", d)
        object.__setattr__(self, "d", d)

    @property
    def jac_det(self) -> complex:
        det = 1 + 0j
        for f in self.factors:
            det *= f.a
        return det


def quadratic_map(a: complex, c: complex) -> HenonMap:
    """The quadratic family f(x, y) = (y, y^2 + c - a x)."""
    return HenonMap((ElementaryFactor((complex(c), 0j), complex(a)),))


def _check_ceiling(x: complex, y: complex):
    if (abs(x.real) > OVERFLOW_CEILING or abs(x.imag) > OVERFLOW_CEILING
            or abs(y.real) > OVERFLOW_CEILING or abs(y.imag) > OVERFLOW_CEILING):
        raise Overflow("orbit magnitude passed the overflow ceiling")


def evaluate(hmap: HenonMap, z: Point) -> Point:
    """f(z); raises Overflow instead of returning Inf."""
    x, y = z
    for f in hmap.factors:
        x, y = y, f.p(y) - f.a * x
        _check_ceiling(x, y)
    return (x, y)


def evaluate_inverse(hmap: HenonMap, z: Point) -> Point:
    """f^{-1}(z); raises Overflow instead of returning Inf."""
    x, y = z
    for f in reversed(hmap.factors):
        x, y = (f.p(x) - y) / f.a, x
        _check_ceiling(x, y)
    return (x, y)


def jacobian(hmap: HenonMap, z: Point):
    """Df(z) as a row-major 2x2 tuple, chain rule over the factors."""
    x, y = z
    J = M2_EYE
    for f in hmap.factors:
        J = m2_mul((0j, 1 + 0j, -f.a, f.dp(y)), J)
        x, y = y, f.p(y) - f.a * x
        _check_ceiling(x, y)
    return J


def jacobian_inverse(hmap: HenonMap, z: Point):
    """Df^{-1}(z) as a row-major 2x2 tuple."""
    x, y = z
    J = M2_EYE
    for f in reversed(hmap.factors):
        # derivative of (x, y) -> ((p(x) - y)/a, x)
        J = m2_mul((f.dp(x) / f.a, -1 / f.a, 1 + 0j, 0j), J)
        x, y = (f.p(x) - y) / f.a, x
        _check_ceiling(x, y)
    return J


@dataclass(frozen=True)
class OrbitResult:
    """Orbit segment [z, f z, ..]; ``escaped_at`` is the first index inside
    the escape region, or None if escape detection never triggered."""

    points: tuple[Point, ...]
    escaped_at: int | None


def in_escape_region(z: Point, radius: float, direction: str) -> bool:
    x, y = z
    if direction == "forward":
        return abs(y) >= max(abs(x), radius)
    return abs(x) >= max(abs(y), radius)


def iterate_orbit(hmap: HenonMap, z: Point, n: int, direction: str = "forward",
                  escape_radius: float | None = None) -> OrbitResult:
    """[z, f^{+-1}(z), ..., f^{+-n}(z)], stopping early on escape.

    With ``escape_radius`` set, iteration stops at the first index whose
    point lies in the escape region; without it the full orbit is
    computed and deep iterates may raise Overflow.
    """
    if n < 0:
        raise ValueError("orbit length must be >= 0")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    step = evaluate if direction == "forward" else evaluate_inverse
    pts = [z]
    if escape_radius is not None and in_escape_region(z, escape_radius, direction):
        return OrbitResult((z,), 0)
    cur = z
    for i in range(1, n + 1):
        cur = step(hmap, cur)
        pts.append(cur)
        if escape_radius is not None and in_escape_region(cur, escape_radius, direction):
            return OrbitResult(tuple(pts), i)
    return OrbitResult(tuple(pts), None)


# ---------------------------------------------------------------------------
# map description files
# ---------------------------------------------------------------------------

def _pair(v) -> complex:
    if (not isinstance(v, (list, tuple))) or len(v) != 2:
        raise ConfigError("complex values must be [re, im] pairs")
    return complex(float(v[0]), float(v[1]))


def map_from_dict(obj: dict) -> HenonMap:
    if not isinstance(obj, dict) or "factors" not in obj:
        raise ConfigError("map description needs a 'factors' list")
    extra = set(obj) - {"factors"}
    if extra:
        raise ConfigError(f"unknown map fields: {sorted(extra)}")
    factors = []
    for fo in obj["factors"]:
        extra = set(fo) - {"coeffs", "a"}
        if extra:
            raise ConfigError(f"unknown factor fields: {sorted(extra)}")
        coeffs = tuple(_pair(c) for c in fo.get("coeffs", ()))
        factors.append(ElementaryFactor(coeffs, _pair(fo.get("a", None))))
    return HenonMap(tuple(factors))


def map_to_dict(hmap: HenonMap) -> dict:
    return {
        "factors": [
            {"coeffs": [[c.real, c.imag] for c in f.coeffs],
             "a": [f.a.real, f.a.imag]}
            for f in hmap.factors
        ]
    }


def parse_map_json(text: str) -> HenonMap:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"map file is not valid JSON: {exc}") from exc
    return map_from_dict(obj)
