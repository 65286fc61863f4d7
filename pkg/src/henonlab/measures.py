"""Empirical measures on C^2 and weak-convergence diagnostics.

Weak convergence is metrized two independent ways: a sliced Wasserstein-1
distance (averaged 1D transport over random directions of R^4) and a
finite moment vector.  A bootstrap self-distance gives the noise floor
used to decide whether two clouds are numerically indistinguishable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .census import Classification
from .errors import EmptySelection
from .rng import derive


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted finite point cloud in C^2 with provenance metadata."""

    points: np.ndarray        # (N, 2) complex
    weights: np.ndarray       # (N,) nonnegative, sums to 1
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).reshape(-1, 2)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(pts) != len(w):
            raise ValueError("points and weights must have equal length")
        if len(w) == 0:
            raise EmptySelection("empirical measure needs at least one point")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        s = w.sum()
        if not math.isclose(s, 1.0, rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"weights must sum to 1 (got {s!r})")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    def reals(self) -> np.ndarray:
        """(N, 4) real view (Re x, Im x, Re y, Im y)."""
        return np.column_stack([self.points[:, 0].real, self.points[:, 0].imag,
                                self.points[:, 1].real, self.points[:, 1].imag])

    def to_dict(self) -> dict:
        return {
            "points": [[z[0].real, z[0].imag, z[1].real, z[1].imag]
                       for z in self.points],
            "weights": list(map(float, self.weights)),
            "provenance": self.provenance,
        }

    @staticmethod
    def from_dict(obj: dict) -> "EmpiricalMeasure":
        pts = np.array([[complex(p[0], p[1]), complex(p[2], p[3])]
                        for p in obj["points"]], dtype=complex)
        w = np.asarray(obj["weights"], dtype=float)
        return EmpiricalMeasure(pts, w / w.sum(), obj.get("provenance", {}))


def uniform_measure(points, provenance=None) -> EmpiricalMeasure:
    pts = np.asarray(points, dtype=complex).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        raise EmptySelection("no points")
    return EmpiricalMeasure(pts, np.full(n, 1.0 / n), provenance or {})


_SELECTORS = ("P_n", "SP_n", "SP_n_eps")


def from_census(records, selector: str, n: int, d: int) -> EmpiricalMeasure:
    """Uniform 1/d^n mass on the selected census points, renormalized.

    The raw mass d^{-n} |Q_n| goes into the provenance; raw mass 1 for
    the full selector is itself one of the checkable claims.
    """
    if selector not in _SELECTORS:
        raise ValueError(f"selector must be one of {_SELECTORS}")
    if selector == "P_n":
        sel = list(records)
    elif selector == "SP_n":
        sel = [r for r in records
               if r.classification in (Classification.SADDLE, Classification.SADDLE_EPS)]
    else:
        sel = [r for r in records if r.classification == Classification.SADDLE_EPS]
    if not sel:
        raise EmptySelection(f"selector {selector} matched no records")
    pts = np.array([[r.point[0], r.point[1]] for r in sel], dtype=complex)
    raw_mass = len(sel) / float(d) ** n
    return uniform_measure(pts, {"method": "census", "selector": selector,
                                 "n": n, "d": d, "raw_mass": raw_mass})


def moments(m: EmpiricalMeasure, max_order: int) -> np.ndarray:
    """Mixed holomorphic/antiholomorphic moments up to total order.

    Entries are sum_i w_i x^al conj(x)^be y^ga conj(y)^de for all
    multi-indices with al+be+ga+de <= max_order, enumerated in
    lexicographic order of (total, al, be, ga, de).
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    x = m.points[:, 0]
    y = m.points[:, 1]
    xc = np.conj(x)
    yc = np.conj(y)
    out = []
    for total in range(max_order + 1):
        for al, be, ga, de in sorted(
                (i, j, k, total - i - j - k)
                for i in range(total + 1)
                for j in range(total + 1 - i)
                for k in range(total + 1 - i - j)):
            out.append(np.sum(m.weights * x**al * xc**be * y**ga * yc**de))
    return np.asarray(out, dtype=complex)


def moment_distance(m1: EmpiricalMeasure, m2: EmpiricalMeasure, max_order: int) -> float:
    return float(np.linalg.norm(moments(m1, max_order) - moments(m2, max_order)))


def _w1_1d(x1, w1, x2, w2) -> float:
    """Exact 1D Wasserstein-1 between weighted samples."""
    xs = np.concatenate([x1, x2])
    deltas = np.concatenate([w1, -w2])
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    cdf = np.cumsum(deltas[order])[:-1]
    return float(np.sum(np.abs(cdf) * np.diff(xs)))


def sliced_w1(m1: EmpiricalMeasure, m2: EmpiricalMeasure, slices: int,
              rng_seed: int) -> float:
    """Average 1D W1 over random unit directions of R^4 = C^2.

    Deterministic in rng_seed; a pseudometric for a fixed seed.
    """
    if slices < 1:
        raise ValueError("slices must be >= 1")
    gen = derive(rng_seed, "sliced-w1")
    dirs = gen.standard_normal((slices, 4))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    p1 = m1.reals() @ dirs.T
    p2 = m2.reals() @ dirs.T
    acc = 0.0
    for s in range(slices):
        acc += _w1_1d(p1[:, s], m1.weights, p2[:, s], m2.weights)
    return acc / slices


def noise_floor(m: EmpiricalMeasure, slices: int, rng_seed: int,
                splits: int = 50, percentile: float = 95.0) -> float:
    """Bootstrap self-distance scale of a cloud.

    Each split halves the cloud at random and measures the sliced W1
    between the renormalized halves; the given percentile over splits is
    the scale below which two clouds are indistinguishable.
    """
    n = len(m)
    if n < 4:
        raise ValueError("noise floor needs at least 4 points")
    gen = derive(rng_seed, "noise-floor")
    vals = []
    for s in range(splits):
        perm = gen.permutation(n)
        half = n // 2
        ia, ib = perm[:half], perm[half:]
        wa = m.weights[ia]
        wb = m.weights[ib]
        ma = EmpiricalMeasure(m.points[ia], wa / wa.sum(), {})
        mb = EmpiricalMeasure(m.points[ib], wb / wb.sum(), {})
        vals.append(sliced_w1(ma, mb, slices, rng_seed + 7919 * s + 1))
    return float(np.percentile(vals, percentile))


def pair_noise_floor(m1, m2, slices, rng_seed, splits=50) -> float:
    """Conservative floor for comparing two clouds: the larger of the two
    self-distance floors."""
    return max(noise_floor(m1, slices, rng_seed, splits),
               noise_floor(m2, slices, rng_seed, splits))


def convergence_report(series, reference: EmpiricalMeasure, max_order: int,
                       slices: int, rng_seed: int = 0) -> dict:
    """Per-n distances of a measure series to a reference.

    ``series`` is a list of (n, EmpiricalMeasure) with increasing n.
    Reports raw mass, moment distance, sliced W1 to the reference and
    between consecutive entries, and flags non-monotone tails beyond the
    reference noise floor.
    """
    if not series:
        raise ValueError("series must be nonempty")
    floor = noise_floor(reference, slices, rng_seed) if len(reference) >= 4 else 0.0
    entries = []
    prev_measure = None
    for n, m in series:
        ent = {
            "n": n,
            "raw_mass": float(m.provenance.get("raw_mass", float("nan"))),
            "moment_dist": moment_distance(m, reference, max_order),
            "sw1_ref": sliced_w1(m, reference, slices, rng_seed),
            "sw1_successive": (sliced_w1(m, prev_measure, slices, rng_seed)
                               if prev_measure is not None else None),
        }
        entries.append(ent)
        prev_measure = m
    flags = []
    for prev, cur in zip(entries, entries[1:]):
        if cur["sw1_ref"] > prev["sw1_ref"] + floor:
            flags.append(cur["n"])
    return {"reference_noise_floor": floor, "entries": entries,
            "non_monotone_flags": flags}


# ---------------------------------------------------------------------------
# pathological tangency fixture
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def _gauss(fn, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.sum(_GL_WEIGHTS * fn(mid + half * _GL_NODES)))


def _adaptive_gauss(fn, a: float, b: float, rel_tol: float, whole=None,
                    depth: int = 0) -> float:
    if whole is None:
        whole = _gauss(fn, a, b)
    mid = 0.5 * (a + b)
    left = _gauss(fn, a, mid)
    right = _gauss(fn, mid, b)
    if depth >= 60:
        return left + right
    if abs(left + right - whole) <= rel_tol * max(abs(left + right), 1e-300):
        return left + right
    return (_adaptive_gauss(fn, a, mid, rel_tol, left, depth + 1)
            + _adaptive_gauss(fn, mid, b, rel_tol, right, depth + 1))


def _graph_area(m: int, rho: float, rel_tol: float = 1e-9) -> float:
    """Area of the graph of x -> x^m over the disc of radius rho, up to 2*pi.

    Radial integrand r (1 + |m x^{m-1}|^2) spans ~150 orders of magnitude
    for large m; the adaptive rule subdivides toward the boundary spike.
    """
    def integrand(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            grad = float(m) ** 2 * r ** (2 * m - 2)
        return r * (1.0 + grad)

    return _adaptive_gauss(integrand, 0.0, rho, rel_tol)


def pathological_graph_mass_ratio(d_power: int, delta: float) -> float:
    """Mass fraction of the graph of x -> x^{d_power} over |x| <= 1-delta.

    The ratio collapses to 0 as d_power grows: normalized graph mass
    flees every compact subdisc even though the intersection with the
    diagonal slice stays put.  This is the failure mode an
    equidistribution argument has to exclude.
    """
    if d_power < 1:
        raise ValueError("d_power must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    inner = _graph_area(d_power, 1.0 - delta)
    total = _graph_area(d_power, 1.0)
    return inner / total
