"""Spectral data along periodic orbits and saddle classification.

The differential Df^n along a verified cycle is accumulated with the
largest entry magnitude factored into a log accumulator each step, so
eigenvalue log moduli stay exact long after the raw product would
overflow.  Classification compares log moduli against log 1 = 0 and the
epsilon thresholds (n/2) log(d - eps); comparisons near a threshold are
left indeterminate rather than silently flipping counts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from .census import Classification, PeriodicRecord, newton_orbit_refine
from .errors import DegenerateOrbit, NearDefective, NoConvergence, SingularJacobian
from .escape import filtration_radius
from .maps import HenonMap, Point, evaluate, jacobian
from .numerics import eig2, eigvec2, m2_mul, m2_norm, m2_scale

_TIE_TOL = 1e-8


@dataclass(frozen=True)
class SpectralData:
    """Eigen-data of Df^n at a periodic point, log scale throughout.

    ``log_moduli`` is ordered |lam1| >= |lam2|; ``e_u``/``e_s`` are unit
    eigenvectors for the large/small eigenvalue and ``angle_us`` their
    principal angle; ``eig_gap`` is the relative gap used to detect
    near-defective products.
    """

    log_moduli: tuple[float, float]
    args: tuple[float, float]
    e_u: tuple[complex, complex]
    e_s: tuple[complex, complex]
    angle_us: float
    dist_to_one: float
    eig_gap: float


def _dist_to_one(log_mod: float, arg: float) -> float:
    if abs(log_mod) <= math.log(1e3):
        lam = cmath.exp(complex(log_mod, arg))
        return abs(lam - 1.0)
    if log_mod > 0:
        return math.expm1(min(log_mod, 700.0))
    # |lam - 1| >= 1 - |lam|, and |lam| < 1e-3 here
    return 1.0 - math.exp(log_mod)


def differential_along_orbit(hmap: HenonMap, orbit) -> SpectralData:
    """Spectral data of the monodromy product prod Df(z_i) over a cycle."""
    n = len(orbit)
    if n < 1:
        raise ValueError("orbit must contain at least one point")
    scale = max(max(abs(z[0]), abs(z[1])) for z in orbit)
    res = 0.0
    for i in range(n):
        fz = evaluate(hmap, orbit[i])
        nxt = orbit[(i + 1) % n]
        res = max(res, abs(fz[0] - nxt[0]), abs(fz[1] - nxt[1]))
    if res > 1e-9 * (1.0 + scale):
        raise DegenerateOrbit(f"cycle residual {res:.3e} too large")

    M = (1 + 0j, 0j, 0j, 1 + 0j)
    logscale = 0.0
    for z in orbit:
        M = m2_mul(jacobian(hmap, z), M)
        s = m2_norm(M)
        logscale += math.log(s)
        M = m2_scale(M, 1.0 / s)
    l1, l2 = eig2(M)
    gap = abs(l1 - l2) / max(abs(l1) + abs(l2), 1e-300)
    lm1 = logscale + math.log(abs(l1))
    lm2 = logscale + math.log(abs(l2))
    e_u = eigvec2(M, l1)
    e_s = eigvec2(M, l2)
    inner = abs(e_u[0].conjugate() * e_s[0] + e_u[1].conjugate() * e_s[1])
    angle = math.acos(min(1.0, max(-1.0, inner)))
    d1 = _dist_to_one(lm1, cmath.phase(l1))
    d2 = _dist_to_one(lm2, cmath.phase(l2))
    return SpectralData(log_moduli=(lm1, lm2),
                        args=(cmath.phase(l1), cmath.phase(l2)),
                        e_u=e_u, e_s=e_s, angle_us=angle,
                        dist_to_one=min(d1, d2), eig_gap=gap)


def classify(spec: SpectralData, n: int, hmap: HenonMap, eps: float) -> Classification:
    """Saddle / saddle_eps / attracting / repelling per log-scale thresholds.

    saddle_eps additionally requires log|lam1| > (n/2) log(d+ - eps) and
    log|lam2| < -(n/2) log(d- - eps); moduli within 1e-8 of any decision
    threshold are left indeterminate.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    l1, l2 = spec.log_moduli
    if abs(l1) < _TIE_TOL or abs(l2) < _TIE_TOL:
        return Classification.INDETERMINATE
    if l1 > 0 > l2:
        hi = 0.5 * n * math.log(hmap.d_plus - eps)
        lo = -0.5 * n * math.log(hmap.d_minus - eps)
        if abs(l1 - hi) < _TIE_TOL or abs(l2 - lo) < _TIE_TOL:
            return Classification.INDETERMINATE
        if l1 > hi and l2 < lo:
            return Classification.SADDLE_EPS
        return Classification.SADDLE
    if l1 < 0:
        return Classification.ATTRACTING
    if l2 > 0:
        return Classification.REPELLING
    return Classification.INDETERMINATE


def stable_unstable_directions(spec: SpectralData):
    """(e_s, e_u, angle_us) for a saddle; the product direction E_s x E_u
    is transverse to the diagonal exactly when the angle is positive."""
    l1, l2 = spec.log_moduli
    if not (l1 > 0 > l2):
        raise ValueError("directions are defined for saddle spectra only")
    if spec.eig_gap < 1e-10:
        raise NearDefective("eigenvalue gap below 1e-10")
    return spec.e_s, spec.e_u, spec.angle_us


def _rebuild_cycle(hmap: HenonMap, rec: PeriodicRecord):
    orbit = [rec.point]
    cur = rec.point
    for _ in range(rec.n - 1):
        cur = evaluate(hmap, cur)
        orbit.append(cur)
    radius = filtration_radius(hmap)
    ref = newton_orbit_refine(hmap, tuple(orbit), tol=1e-12 * (1 + radius))
    return ref.orbit


def classify_records(hmap: HenonMap, records, eps: float):
    """Fill spectral fields and classification on census records."""
    out = []
    for rec in records:
        try:
            cycle = _rebuild_cycle(hmap, rec)
            spec = differential_along_orbit(hmap, cycle)
        except (NoConvergence, SingularJacobian, DegenerateOrbit):
            out.append(replace(rec, classification=Classification.INDETERMINATE))
            continue
        out.append(replace(
            rec,
            eigen_log_moduli=spec.log_moduli,
            eigen_args=spec.args,
            classification=classify(spec, rec.n, hmap, eps),
            dist_to_one=spec.dist_to_one,
            angle_us=spec.angle_us,
        ))
    return out


@dataclass(frozen=True)
class TangencyStats:
    """Count and d^n-normalized fraction of near-tangent records, with a
    decade histogram of dist_to_one."""

    count_near_tangent: int
    fraction: float
    histogram: tuple[tuple[float, float, int], ...]


_HIST_DECADES = [10.0 ** k for k in range(-14, 3)]


def tangency_statistic(records, eta: float, d: int) -> TangencyStats:
    """Empirical near-tangency statistic over classified records.

    A near-tangency of the iterated graph with the diagonal at a point is
    an eigenvalue of the monodromy near 1, so the statistic counts
    records with dist_to_one below eta and normalizes by d^n.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    dists = [rec.dist_to_one for rec in records if rec.dist_to_one is not None]
    if len(dists) != len(records):
        raise ValueError("records must carry spectral data; run classify first")
    if not records:
        return TangencyStats(0, 0.0, ())
    n = records[0].n
    count = sum(1 for x in dists if x < eta)
    bins = []
    edges = _HIST_DECADES
    for lo, hi in zip(edges[:-1], edges[1:]):
        c = sum(1 for x in dists if lo <= x < hi)
        bins.append((lo, hi, c))
    under = sum(1 for x in dists if x < edges[0])
    if under:
        bins.insert(0, (0.0, edges[0], under))
    over = sum(1 for x in dists if x >= edges[-1])
    if over:
        bins.append((edges[-1], math.inf, over))
    return TangencyStats(count, count / float(d) ** n, tuple(bins))
