"""Equilibrium measure sampling by generic line intersections.

Intersection points of f^{-n}(L+) with f^n(L-) for generic affine lines
L+, L- equidistribute toward the equilibrium measure.  A root t of

    g(t) = ell_plus(f^{2n}(gamma_minus(t)))

gives the intersection point f^n(gamma_minus(t)).  The root search is a
batched Newton multistart: orbits and tangents are propagated in
extended-range arithmetic (f^{2n} grows doubly exponentially off the
bounded set), the Newton step g/g' collapses back to an ordinary complex
number near roots.  Roots of the previous depth seed the next one, since
consecutive pullback curves accumulate on the same slice.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from .census import _compose
from .errors import EmptySelection, RootDeficitWarning
from .escape import filtration_radius, green
from .maps import HenonMap, Point
from .measures import EmpiricalMeasure
from .numerics import (vx_abs_log, vx_add, vx_addc, vx_from, vx_horner_deriv_monic,
                       vx_horner_monic, vx_mul, vx_mulc, vx_ratio)
from .rng import derive

_AXIS_MARGIN = 0.05


@dataclass(frozen=True)
class AffineLine:
    """Affine complex line base + t*dir with its normal form al x + be y = c."""

    base: Point
    dir: tuple[complex, complex]
    normal_form: tuple[complex, complex, complex]

    def at(self, t):
        return (self.base[0] + t * self.dir[0], self.base[1] + t * self.dir[1])

    def to_dict(self) -> dict:
        return {"base": [self.base[0].real, self.base[0].imag,
                         self.base[1].real, self.base[1].imag],
                "dir": [self.dir[0].real, self.dir[0].imag,
                        self.dir[1].real, self.dir[1].imag]}

    @staticmethod
    def from_dict(obj: dict) -> "AffineLine":
        b = obj["base"]
        d = obj["dir"]
        return make_line((complex(b[0], b[1]), complex(b[2], b[3])),
                         (complex(d[0], d[1]), complex(d[2], d[3])))


def make_line(base: Point, direction: tuple[complex, complex]) -> AffineLine:
    dx, dy = complex(direction[0]), complex(direction[1])
    norm = math.sqrt(abs(dx) ** 2 + abs(dy) ** 2)
    if norm == 0:
        raise ValueError("line direction must be nonzero")
    dx, dy = dx / norm, dy / norm
    alpha, beta = dy, -dx
    c = alpha * base[0] + beta * base[1]
    return AffineLine((complex(base[0]), complex(base[1])), (dx, dy), (alpha, beta, c))


def is_generic(line: AffineLine) -> bool:
    """Direction at least the margin away from both coordinate axes."""
    return min(abs(line.dir[0]), abs(line.dir[1])) >= _AXIS_MARGIN


def random_line(rng_seed: int, scale: float) -> AffineLine:
    """Deterministic generic line: base uniform in the radius-scale bidisk,
    direction uniform on the unit sphere of C^2, axis-near draws rejected."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    gen = derive(rng_seed, "random-line")
    while True:
        u = gen.random(4)
        base = (scale * math.sqrt(u[0]) * np.exp(2j * np.pi * u[1]),
                scale * math.sqrt(u[2]) * np.exp(2j * np.pi * u[3]))
        v = gen.standard_normal(4)
        line = make_line((complex(base[0]), complex(base[1])),
                         (complex(v[0], v[1]), complex(v[2], v[3])))
        if is_generic(line):
            return line


# ---------------------------------------------------------------------------
# batched Newton on g(t) = ell_plus(f^{2m}(gamma_minus(t)))
# ---------------------------------------------------------------------------

def _g_dg(hmap: HenonMap, lplus: AffineLine, lminus: AffineLine,
          t: np.ndarray, steps: int):
    bx, by = lminus.base
    dx, dy = lminus.dir
    Xm, Xe = vx_from(bx + t * dx)
    Ym, Ye = vx_from(by + t * dy)
    VXm, VXe = vx_from(np.full(t.shape, dx, dtype=complex))
    VYm, VYe = vx_from(np.full(t.shape, dy, dtype=complex))
    for _ in range(steps):
        for f in hmap.factors:
            pm, pe = vx_horner_monic(f.coeffs, Ym, Ye)
            am, ae = vx_mulc(Xm, Xe, -f.a)
            nYm, nYe = vx_add(pm, pe, am, ae)
            dm, de = vx_horner_deriv_monic(f.coeffs, Ym, Ye)
            t1m, t1e = vx_mul(dm, de, VYm, VYe)
            t2m, t2e = vx_mulc(VXm, VXe, -f.a)
            nVYm, nVYe = vx_add(t1m, t1e, t2m, t2e)
            Xm, Xe, Ym, Ye = Ym, Ye, nYm, nYe
            VXm, VXe, VYm, VYe = VYm, VYe, nVYm, nVYe
    al, be, cc = lplus.normal_form
    gm, ge = vx_add(*vx_mulc(Xm, Xe, al), *vx_mulc(Ym, Ye, be))
    gm, ge = vx_addc(gm, ge, -cc)
    gpm, gpe = vx_add(*vx_mulc(VXm, VXe, al), *vx_mulc(VYm, VYe, be))
    return (gm, ge), (gpm, gpe)


def _newton_roots(hmap, lplus, lminus, seeds: np.ndarray, steps: int,
                  rounds: int = 48, ctol: float = 5e-14) -> np.ndarray:
    t = np.asarray(seeds, dtype=complex)
    found = []
    for _ in range(rounds):
        if len(t) == 0:
            break
        (gm, ge), (gpm, gpe) = _g_dg(hmap, lplus, lminus, t, steps)
        dt = vx_ratio(gm, ge, gpm, gpe)
        ok = np.isfinite(dt.real) & np.isfinite(dt.imag)
        cap = 0.5 * (1.0 + np.abs(t))
        mag = np.abs(dt)
        with np.errstate(invalid="ignore"):
            big = ok & (mag > cap)
        dt = np.where(big, dt * (cap / np.where(mag == 0, 1.0, mag)), dt)
        tn = t - dt
        conv = ok & (mag <= ctol * (1.0 + np.abs(t)))
        if np.any(conv):
            found.append(tn[conv])
        keep = ok & ~conv & (np.abs(tn) < 1e6)
        t = tn[keep]
    if not found:
        return np.empty(0, dtype=complex)
    return np.concatenate(found)


def _dedup(roots: np.ndarray, radius: float = 1e-8) -> np.ndarray:
    """Deflation by rejection: cluster-collapse roots closer than radius."""
    if len(roots) == 0:
        return roots
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    out = []
    for r in roots:
        dup = False
        for prev in reversed(out):
            if r.real - prev.real > radius:
                break
            if abs(r - prev) <= radius:
                dup = True
                break
        if not dup:
            out.append(r)
    return np.array(out, dtype=complex)


def _nearest_spacing(roots: np.ndarray) -> np.ndarray:
    """Approximate nearest-neighbour distance via a sorted-window sweep."""
    n = len(roots)
    if n < 2:
        return np.full(n, 0.1)
    order = np.argsort(roots.real, kind="stable")
    sorted_roots = roots[order]
    nnd = np.full(n, np.inf)
    win = 16
    for i in range(n):
        for j in range(max(0, i - win), min(n, i + win + 1)):
            if i == j:
                continue
            dist = abs(sorted_roots[i] - sorted_roots[j])
            if dist < nnd[i]:
                nnd[i] = dist
    out = np.empty(n)
    out[order] = nnd
    return np.clip(out, 1e-9, 1.0)


def _circle_seeds(count: int, rng) -> np.ndarray:
    """Multistart seeds on geometric circles |t| = r_k, 1e-3 <= r_k <= 1e3."""
    n_circ = 40
    per = max(4, count // n_circ)
    radii = np.geomspace(1e-3, 1e3, n_circ)
    seeds = []
    for r in radii:
        ang = rng.random(per)
        seeds.append(r * np.exp(2j * np.pi * ang))
    return np.concatenate(seeds)[:count]


def _disk_seeds(count: int, radius: float, rng) -> np.ndarray:
    u = rng.random(count)
    ang = rng.random(count)
    return radius * np.sqrt(u) * np.exp(2j * np.pi * ang)


def _children(roots: np.ndarray, per_root: int, gen) -> np.ndarray:
    """Multi-scale perturbation cloud around known roots."""
    nnd = _nearest_spacing(roots)
    ang = gen.random((len(roots), per_root))
    scale = 10.0 ** gen.uniform(-1.0, 0.7, (len(roots), per_root))
    rad = nnd[:, None] * scale
    return (roots[:, None] + rad * np.exp(2j * np.pi * ang)).ravel()


def find_intersection_params(hmap: HenonMap, n: int, lplus: AffineLine,
                             lminus: AffineLine, budget: int,
                             rng_seed: int) -> np.ndarray:
    """Roots of ell_plus(f^{2n}(gamma_minus(t))), deduplicated.

    Depths 1..n are solved in turn: the roots of depth m-1 seed depth m
    (consecutive pullback curves accumulate on the same slice), each
    depth then alternates Newton sweeps with perturbation reseeding
    around the roots found so far until the count stalls or the seed
    budget is spent.
    """
    radius = filtration_radius(hmap)
    # parameter of the closest approach of the line to the origin
    t_center = -(lminus.dir[0].conjugate() * lminus.base[0]
                 + lminus.dir[1].conjugate() * lminus.base[1])
    t_spread = 2.5 * radius
    roots = np.empty(0, dtype=complex)
    for m in range(1, n + 1):
        expected = hmap.d ** (2 * m)
        gen = derive(rng_seed, "mu-seeds", m)
        if len(roots):
            # the active zone barely moves between depths: retarget on it
            t_center = complex(np.mean(roots))
            t_spread = 1.4 * float(np.max(np.abs(roots - t_center))) + 0.1
        fresh = int(min(budget, 4 * expected + 2000))
        parts = [_circle_seeds(fresh // 4, gen),
                 t_center + _disk_seeds(fresh - fresh // 4, t_spread, gen)]
        if len(roots):
            parts.append(_children(roots, 8, gen))
            parts.append(roots)  # previous roots refine toward nearby new ones
        spent = sum(len(p) for p in parts)
        roots = _dedup(_newton_roots(hmap, lplus, lminus,
                                     np.concatenate(parts), 2 * m))
        while spent < budget and len(roots) < expected:
            t_center = complex(np.mean(roots))
            t_spread = 1.4 * float(np.max(np.abs(roots - t_center))) + 0.1
            per_root = int(min(16, max(4, (budget - spent) // max(1, len(roots)))))
            parts = [_children(roots, per_root, gen)]
            room = budget - spent - len(parts[0])
            if room > 0:
                parts.append(t_center + _disk_seeds(min(room, fresh), t_spread, gen))
            seeds = np.concatenate(parts)
            spent += len(seeds)
            new = _newton_roots(hmap, lplus, lminus, seeds, 2 * m)
            before = len(roots)
            roots = _dedup(np.concatenate([roots, new]))
            if len(roots) == before:
                break
    return roots


# plain vectorized orbit scans for the membership filter -------------------

def _vec_scan(hmap, pts: np.ndarray, depth: int, radius: float, direction: str):
    """First escape step per point (-1 if none within depth)."""
    X = pts[:, 0].copy()
    Y = pts[:, 1].copy()
    esc = np.full(len(pts), -1, dtype=int)
    act = np.ones(len(pts), dtype=bool)
    for k in range(depth + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            if direction == "forward":
                reg = act & (np.abs(Y) >= np.maximum(np.abs(X), radius))
            else:
                reg = act & (np.abs(X) >= np.maximum(np.abs(Y), radius))
        esc[reg] = k
        act &= ~reg
        if not act.any() or k == depth:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            if direction == "forward":
                for f in hmap.factors:
                    pv = np.ones_like(Y)
                    for c in reversed(f.coeffs):
                        pv = pv * Y + c
                    X, Y = np.where(act, Y, X), np.where(act, pv - f.a * X, Y)
            else:
                for f in reversed(hmap.factors):
                    pv = np.ones_like(X)
                    for c in reversed(f.coeffs):
                        pv = pv * X + c
                    X, Y = np.where(act, (pv - Y) / f.a, X), np.where(act, X, Y)
        bad = act & ~(np.isfinite(Y.real) & np.isfinite(Y.imag)
                      & np.isfinite(X.real) & np.isfinite(X.imag))
        esc[bad] = min(k + 1, depth)
        act &= ~bad
    return esc


def sample_mu(hmap: HenonMap, n: int, lines: tuple[AffineLine, AffineLine],
              budget: int, rng_seed: int, green_depth: int = 200,
              green_tol: float = 5e-3) -> EmpiricalMeasure:
    """Uniform empirical measure on verified points of f^-n(L+) /\\ f^n(L-).

    Every returned point passes the membership filter (both Green values
    below ``green_tol`` at ``green_depth``).  The shortfall against the
    algebraic count d^{2n} is reported as ``root_deficit`` in the
    provenance and as a RootDeficitWarning; equidistribution claims are
    treated as non-certifying when the deficit exceeds 5%.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lplus, lminus = lines
    if not (is_generic(lplus) and is_generic(lminus)):
        raise ValueError("lines must be generic (away from the axis directions)")
    expected = hmap.d ** (2 * n)
    roots = find_intersection_params(hmap, n, lplus, lminus, budget, rng_seed)

    # push the line parameters to the sample points f^n(gamma_minus(t))
    X = lminus.base[0] + roots * lminus.dir[0]
    Y = lminus.base[1] + roots * lminus.dir[1]
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n):
            for f in hmap.factors:
                pv = np.ones_like(Y)
                for c in reversed(f.coeffs):
                    pv = pv * Y + c
                X, Y = Y, pv - f.a * X
    finite = np.isfinite(X.real) & np.isfinite(X.imag) & np.isfinite(Y.real) & np.isfinite(Y.imag)
    pts = np.column_stack([X[finite], Y[finite]])

    radius = filtration_radius(hmap)
    esc_f = _vec_scan(hmap, pts, green_depth, radius, "forward")
    esc_b = _vec_scan(hmap, pts, green_depth, radius, "backward")
    keep = np.ones(len(pts), dtype=bool)
    for i in np.nonzero((esc_f >= 0) | (esc_b >= 0))[0]:
        z = (complex(pts[i, 0]), complex(pts[i, 1]))
        gp = green(hmap, z, "plus", tol=1e-9, max_depth=green_depth).value \
            if esc_f[i] >= 0 else 0.0
        gm = green(hmap, z, "minus", tol=1e-9, max_depth=green_depth).value \
            if esc_b[i] >= 0 else 0.0
        if max(gp, gm) >= green_tol:
            keep[i] = False
    pts = pts[keep]
    if len(pts) == 0:
        raise EmptySelection("no verified intersection points found")

    order = np.lexsort((pts[:, 1].imag, pts[:, 1].real, pts[:, 0].imag, pts[:, 0].real))
    pts = pts[order]
    deficit = expected - len(pts)
    if deficit > 0:
        warnings.warn(f"found {len(pts)} of {expected} intersection points",
                      RootDeficitWarning, stacklevel=2)
    prov = {"method": "line-intersection", "n": n,
            "lines": {"plus": lplus.to_dict(), "minus": lminus.to_dict()},
            "root_deficit": int(deficit), "expected_roots": int(expected),
            "found_roots": int(len(roots)), "verified_points": int(len(pts))}
    w = np.full(len(pts), 1.0 / len(pts))
    return EmpiricalMeasure(pts, w, prov)


def line_section_poly(hmap: HenonMap, lplus: AffineLine, lminus: AffineLine,
                      n: int) -> np.ndarray:
    """Coefficients (ascending) of t -> ell_plus(f^{2n}(gamma_minus(t))).

    Explicit symbolic composition, tractable only for tiny n; serves as
    the companion-matrix cross-check of the Newton multistart.
    """
    if hmap.d ** (2 * n) > 256:
        raise ValueError("explicit composition limited to d^{2n} <= 256")
    X = np.array([lminus.base[0], lminus.dir[0]], dtype=complex)
    Y = np.array([lminus.base[1], lminus.dir[1]], dtype=complex)
    for _ in range(2 * n):
        for f in hmap.factors:
            p = np.array(list(f.coeffs) + [1.0 + 0j], dtype=complex)
            Yn = npoly.polysub(_compose(p, Y), f.a * X)
            X, Y = Y, Yn
    al, be, cc = lplus.normal_form
    g = npoly.polyadd(al * X, be * Y)
    g = npoly.polysub(g, np.array([cc], dtype=complex))
    return g
