"""Periodic point censuses.

Solutions of f^n(z) = z are found by multiple-shooting Newton on the
cyclic orbit system F(z_0..z_{n-1}) = (f(z_i) - z_{i+1 mod n})_i, whose
block-cyclic Jacobian is eliminated sequentially; f^n itself is never
composed, so every quantity stays of the order of the filtration radius.
An exact small-period oracle (scalar cyclic elimination, resultant by
evaluation-interpolation, companion-matrix roots) certifies counts with
multiplicity for n <= 3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import (DegreeOverflow, NoConvergence, OracleDegenerate, Overflow,
                     SeedBudgetWarning, SingularJacobian)
from .escape import filtration_radius
from .maps import HenonMap, Point, evaluate, jacobian
from .numerics import M2_EYE, m2_mul, m2_norm, m2_solve, m2_vec
from .parallel import run_ordered
from .rng import derive


class Classification(str, Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    SADDLE = "saddle"
    SADDLE_EPS = "saddle_eps"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class PeriodicRecord:
    """One verified solution of f^n(z) = z.

    Spectral fields stay None until the classification pass fills them.
    """

    point: Point
    n: int
    exact_period: int
    residual: float
    multiplicity_flag: bool = False
    eigen_log_moduli: tuple[float, float] | None = None
    eigen_args: tuple[float, float] | None = None
    classification: Classification | None = None
    dist_to_one: float | None = None
    angle_us: float | None = None

    @property
    def eigenvalues(self) -> tuple[complex, complex] | None:
        if self.eigen_log_moduli is None:
            return None
        out = []
        for lm, ar in zip(self.eigen_log_moduli, self.eigen_args):
            out.append(math.exp(min(lm, 700.0)) * complex(math.cos(ar), math.sin(ar)))
        return tuple(out)


@dataclass(frozen=True)
class RefineResult:
    orbit: tuple[Point, ...]
    residual: float
    iterations: int
    singular_ratio: float
    multiplicity_flag: bool


def _eval_and_jac(hmap: HenonMap, z: Point):
    x, y = z
    J = M2_EYE
    for f in hmap.factors:
        J = m2_mul((0j, 1 + 0j, -f.a, f.dp(y)), J)
        x, y = y, f.p(y) - f.a * x
    return (x, y), J


def _residuals(hmap: HenonMap, orbit):
    n = len(orbit)
    out = []
    jacs = []
    for i in range(n):
        fz, J = _eval_and_jac(hmap, orbit[i])
        nxt = orbit[(i + 1) % n]
        out.append((fz[0] - nxt[0], fz[1] - nxt[1]))
        jacs.append(J)
    return out, jacs


def newton_orbit_refine(hmap: HenonMap, orbit, tol: float = 1e-11,
                        max_iter: int = 40) -> RefineResult:
    """Newton on the cyclic orbit system with sequential block elimination.

    Eliminating delta_{i+1} = A_i delta_i + r_i reduces the system to a
    single 2x2 solve against (monodromy - I); quadratic convergence over
    the last two steps is required, linear tails near a singular
    monodromy raise SingularJacobian instead.
    """
    n = len(orbit)
    if n < 1:
        raise ValueError("orbit must contain at least one point")
    pts = [(complex(z[0]), complex(z[1])) for z in orbit]
    guard = 16.0 * (filtration_radius(hmap) + 1.0)
    res_hist = []
    sing_ratio = math.inf
    for it in range(max_iter + 1):
        try:
            rs, jacs = _residuals(hmap, pts)
        except Overflow as exc:
            raise NoConvergence("orbit blew up during refinement") from exc
        res = max(max(abs(r[0]), abs(r[1])) for r in rs)
        res_hist.append(res)
        if res < tol:
            flag = sing_ratio < 1e-8
            return RefineResult(tuple(pts), res, it, sing_ratio, flag)
        if it == max_iter:
            break
        # forward elimination: delta_i = T_i delta_0 + u_i
        T = M2_EYE
        u = (0j, 0j)
        Ts = [T]
        us = [u]
        for i in range(n - 1):
            A = jacs[i]
            T = m2_mul(A, T)
            Au = m2_vec(A, u)
            u = (Au[0] + rs[i][0], Au[1] + rs[i][1])
            Ts.append(T)
            us.append(u)
        M = m2_mul(jacs[n - 1], T)
        S = (M[0] - 1, M[1], M[2], M[3] - 1)
        w = m2_vec(jacs[n - 1], u)
        rhs = (-(rs[n - 1][0] + w[0]), -(rs[n - 1][1] + w[1]))
        nS = m2_norm(S)
        det = S[0] * S[3] - S[1] * S[2]
        ratio = abs(det) / max(nS * nS, 1e-300)
        sing_ratio = min(sing_ratio, ratio)
        if ratio < 1e-14:
            raise SingularJacobian("monodromy minus identity numerically singular")
        d0 = m2_solve(S, rhs)
        step = 0.0
        for i in range(n):
            di = m2_vec(Ts[i], d0)
            di = (di[0] + us[i][0], di[1] + us[i][1])
            step = max(step, abs(di[0]), abs(di[1]))
            pts[i] = (pts[i][0] + di[0], pts[i][1] + di[1])
        if step > guard or any(max(abs(z[0]), abs(z[1])) > guard for z in pts):
            raise NoConvergence("Newton step left the working region")
    # not below tol: decide between linear stall (multiple root) and failure
    if len(res_hist) >= 2 and res_hist[-2] < 1e-3 and res_hist[-1] > res_hist[-2] ** 1.5:
        if sing_ratio < 1e-8:
            raise SingularJacobian("linear convergence near singular monodromy")
    raise NoConvergence(f"no convergence after {max_iter} iterations "
                        f"(residual {res_hist[-1]:.3e})")


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

_HALTON_BASES = (2, 3, 5, 7)


def _van_der_corput(i: int, base: int) -> float:
    f = 1.0
    r = 0.0
    while i:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def _halton_bidisk(i: int, radius: float) -> Point:
    u = [_van_der_corput(i, b) for b in _HALTON_BASES]
    x = radius * math.sqrt(u[0]) * complex(math.cos(2 * math.pi * u[1]),
                                           math.sin(2 * math.pi * u[1]))
    y = radius * math.sqrt(u[2]) * complex(math.cos(2 * math.pi * u[3]),
                                           math.sin(2 * math.pi * u[3]))
    return (x, y)


def _rng_bidisk(gen, radius: float) -> Point:
    u = gen.random(4)
    x = radius * math.sqrt(u[0]) * complex(math.cos(2 * math.pi * u[1]),
                                           math.sin(2 * math.pi * u[1]))
    y = radius * math.sqrt(u[2]) * complex(math.cos(2 * math.pi * u[3]),
                                           math.sin(2 * math.pi * u[3]))
    return (x, y)


def _symbol_seeds(hmap: HenonMap, n: int, limit: int, rng_seed: int):
    """Orbit seeds from symbol sequences of the scalar recurrence.

    Along an orbit the first coordinates satisfy s_{t+1} = p(s_t) - a
    s_{t-1}; for strongly horseshoe-like coefficients every cycle shadows
    a sequence over the roots of the step polynomials, so seeding the
    cyclic Newton with all root patterns reaches cycles whose basins the
    bidisk seeds miss.
    """
    m = len(hmap.factors)
    L = n * m
    roots_per_step = []
    for t in range(L):
        f = hmap.factors[t % m]
        p = np.array(list(f.coeffs) + [1.0 + 0j], dtype=complex)
        roots_per_step.append(np.roots(p[::-1]))
    total = 1
    for r in roots_per_step:
        total *= len(r)
        if total > 4 * limit:
            break
    seqs = []
    if total <= limit:
        import itertools

        for combo in itertools.product(*(range(len(r)) for r in roots_per_step)):
            seqs.append([roots_per_step[t][i] for t, i in enumerate(combo)])
    else:
        gen = derive(rng_seed, "census-symbol-seeds", n)
        for _ in range(limit):
            seqs.append([r[gen.integers(len(r))] for r in roots_per_step])
    out = []
    for s in seqs:
        out.append(tuple((s[(j * m) % L], s[(j * m + 1) % L]) for j in range(n)))
    return out


def _seed_orbits(hmap: HenonMap, n: int, seeds: int, rng_seed: int, radius: float):
    """Symbol-sequence seeds, constant orbits at low-discrepancy points,
    and truncated true orbits of random points (bounded prefixes
    preferred)."""
    expected = hmap.d ** n
    out = _symbol_seeds(hmap, n, min(expected, max(seeds // 3, 1)), rng_seed)
    n_const = (seeds - len(out)) // 2
    out += [tuple([_halton_bidisk(i + 1, radius)] * n) for i in range(n_const)]
    gen = derive(rng_seed, "census-orbit-seeds", n)
    while len(out) < seeds:
        orbit = None
        for _try in range(12):
            z = _rng_bidisk(gen, radius)
            pts = [z]
            ok = True
            cur = z
            for _i in range(n - 1):
                try:
                    cur = evaluate(hmap, cur)
                except Overflow:
                    ok = False
                    break
                if max(abs(cur[0]), abs(cur[1])) > 2.0 * radius:
                    ok = False
                    break
                pts.append(cur)
            if ok:
                orbit = tuple(pts)
                break
        if orbit is None:
            orbit = tuple([_rng_bidisk(gen, radius)] * n)
        out.append(orbit)
    return out


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

def _lex_key(z: Point):
    return (z[0].real, z[0].imag, z[1].real, z[1].imag)


def _cluster_points(items, radius: float):
    """Greedy clustering of (point, payload) pairs under the sup metric.

    Input is sorted lexicographically first, so the outcome does not
    depend on arrival order.
    """
    items = sorted(items, key=lambda it: _lex_key(it[0]))
    clusters = []
    for z, payload in items:
        hit = None
        for cl in reversed(clusters):
            if z[0].real - cl["maxre"] > radius:
                break
            for w in cl["pts"]:
                if max(abs(z[0] - w[0]), abs(z[1] - w[1])) <= radius:
                    hit = cl
                    break
            if hit:
                break
        if hit is None:
            clusters.append({"pts": [z], "payloads": [payload], "maxre": z[0].real})
        else:
            hit["pts"].append(z)
            hit["payloads"].append(payload)
            hit["maxre"] = max(hit["maxre"], z[0].real)
    return clusters


def _divisors(n: int):
    return [m for m in range(1, n + 1) if n % m == 0]


def exact_period_filter(records, hmap: HenonMap, tol: float = 1e-8):
    """Fill exact_period with the smallest divisor m of n with f^m(z)=z."""
    out = []
    for rec in records:
        period = rec.n
        for m in _divisors(rec.n)[:-1]:
            cur = rec.point
            try:
                for _ in range(m):
                    cur = evaluate(hmap, cur)
            except Overflow:
                break
            if max(abs(cur[0] - rec.point[0]), abs(cur[1] - rec.point[1])) < tol:
                period = m
                break
        out.append(replace(rec, exact_period=period))
    return out


@dataclass(frozen=True)
class CensusResult:
    records: tuple[PeriodicRecord, ...]
    diagnostics: dict


def census(hmap: HenonMap, n: int, seeds: int, rng_seed: int, tol: float = 1e-9,
           cluster_radius: float = 1e-6, threads: int = 1) -> CensusResult:
    """Enumerate fixed points of f^n by multistart multiple shooting.

    Converged cycles contribute all n rotations; candidates are clustered
    at ``cluster_radius`` with the cluster centroid re-refined, the
    output is sorted lexicographically by (Re x, Im x, Re y, Im y) and is
    a deterministic function of (map, n, seeds, rng_seed).
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    expected = hmap.d ** n
    warns = []
    if seeds < expected:
        warnings.warn(f"census seeds {seeds} below expected count {expected}",
                      SeedBudgetWarning, stacklevel=2)
        warns.append("seed budget below expected point count")
    radius = filtration_radius(hmap)
    newt_tol = 1e-12 * (1.0 + radius)
    seed_orbits = _seed_orbits(hmap, n, seeds, rng_seed, radius)

    counts = {"attempted": len(seed_orbits), "converged": 0,
              "no_convergence": 0, "singular": 0}

    def work(orbit):
        try:
            return newton_orbit_refine(hmap, orbit, tol=newt_tol)
        except SingularJacobian:
            return "singular"
        except NoConvergence:
            return None

    results = run_ordered(work, seed_orbits, threads=threads)
    candidates = []
    for res in results:
        if res == "singular":
            counts["singular"] += 1
            continue
        if res is None:
            counts["no_convergence"] += 1
            continue
        counts["converged"] += 1
        if res.residual > tol:
            continue
        for i in range(n):
            z = res.orbit[i]
            if max(abs(z[0]), abs(z[1])) > radius + 1e-3:
                continue
            candidates.append((z, res))

    clusters = _cluster_points(candidates, cluster_radius)
    reps = []
    for cl in clusters:
        cx = sum(z[0] for z in cl["pts"]) / len(cl["pts"])
        cy = sum(z[1] for z in cl["pts"]) / len(cl["pts"])
        flag = any(p.multiplicity_flag for p in cl["payloads"])
        orbit = [(cx, cy)]
        cur = (cx, cy)
        ok = True
        for _ in range(n - 1):
            try:
                cur = evaluate(hmap, cur)
            except Overflow:
                ok = False
                break
            orbit.append(cur)
        if ok:
            try:
                ref = newton_orbit_refine(hmap, tuple(orbit), tol=newt_tol)
                reps.append((ref.orbit[0], ref.residual, flag or ref.multiplicity_flag))
                continue
            except (NoConvergence, SingularJacobian):
                pass
        best = min(cl["payloads"], key=lambda p: p.residual)
        i = cl["payloads"].index(best)
        reps.append((cl["pts"][i], best.residual, flag))

    merged = _cluster_points(((z, (r, fl)) for z, r, fl in reps), cluster_radius)
    records = []
    for cl in merged:
        i = min(range(len(cl["payloads"])), key=lambda j: cl["payloads"][j][0])
        z = cl["pts"][i]
        r, fl = cl["payloads"][i]
        records.append(PeriodicRecord(point=z, n=n, exact_period=n, residual=r,
                                      multiplicity_flag=fl))
    records = exact_period_filter(records, hmap)
    records.sort(key=lambda rec: _lex_key(rec.point))
    counts["deduped"] = len(records)
    if len(records) < expected:
        warns.append(f"found {len(records)} of {expected} expected points")
    diagnostics = {"attempted": counts["attempted"], "converged": counts["converged"],
                   "no_convergence": counts["no_convergence"],
                   "singular": counts["singular"], "deduped": counts["deduped"],
                   "warnings": warns}
    return CensusResult(tuple(records), diagnostics)


# ---------------------------------------------------------------------------
# exact oracle for n <= 3
# ---------------------------------------------------------------------------

def _factor_schedule(hmap: HenonMap, n: int):
    """Elementary factor sequence for n map applications."""
    return [hmap.factors[t % len(hmap.factors)] for t in range(n * len(hmap.factors))]


def _poly_of_factor(f):
    return np.array(list(f.coeffs) + [1.0 + 0j], dtype=complex)


def _compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    acc = np.array([outer[-1]], dtype=complex)
    for c in outer[-2::-1]:
        acc = npoly.polymul(acc, inner)
        acc[0] += c
    return acc


def _sylvester(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    da = len(pa) - 1
    db = len(pb) - 1
    m = da + db
    out = np.zeros((m, m), dtype=complex)
    for i in range(db):
        out[i, i:i + da + 1] = pa[::-1]
    for i in range(da):
        out[db + i, i:i + db + 1] = pb[::-1]
    return out


def _trim_to_degree(coeffs: np.ndarray, degree: int) -> np.ndarray:
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise OracleDegenerate("resultant vanished identically")
    tail = np.abs(coeffs[degree + 1:])
    if tail.size and tail.max() > 1e-7 * scale:
        raise OracleDegenerate("resultant degree above the algebraic count")
    if abs(coeffs[degree]) < 1e-9 * scale:
        raise OracleDegenerate("resultant degree below the algebraic count")
    return coeffs[:degree + 1]


def _cluster_roots(roots: np.ndarray, eps: float):
    """Greedy root clustering; returns (representative, multiplicity)."""
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    groups = []
    for r in roots:
        if groups and abs(r - groups[-1][-1]) <= eps:
            groups[-1].append(r)
        else:
            groups.append([r])
    return [(sum(g) / len(g), len(g)) for g in groups]


def oracle_small_n(hmap: HenonMap, n: int):
    """Exact period-n point list with multiplicity, n*len(factors) <= 3.

    Orbits satisfy the scalar recurrence s_{t+1} = q_t(s_t) - b_t s_{t-1}
    over one elementary step; the cyclic system has no solutions at
    infinity (the top-degree parts only share the origin), so its Bezout
    count d^n is exact.  Chain length 1 and 2 reduce to a univariate
    polynomial by direct substitution, length 3 by a Sylvester resultant
    evaluated on a circle and interpolated by FFT.  Roots come from the
    companion matrix; multiplicities from clustering.
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    L = n * len(hmap.factors)
    if L > 3:
        raise DegreeOverflow("oracle supports chain length <= 3 "
                             f"(requested {L})")
    sched = _factor_schedule(hmap, n)
    qs = [_poly_of_factor(f) for f in sched]
    bs = [f.a for f in sched]
    total = 1
    for f in sched:
        total *= f.degree
    radius = filtration_radius(hmap)

    if L == 1:
        U = qs[0].copy()
        U = npoly.polyadd(U, np.array([0, -(1.0 + bs[0])], dtype=complex))
        pairs = _roots_with_mult(U, radius)
        sol = [([(s, s)], m) for s, m in pairs]
    elif L == 2:
        if abs(1.0 + bs[0]) < 1e-10 or abs(1.0 + bs[1]) < 1e-10:
            raise OracleDegenerate("a_j = -1 degenerates the period-2 elimination")
        h = qs[0] / (1.0 + bs[0])
        U = _compose(qs[1], h)
        U = npoly.polyadd(U, np.array([0, -(1.0 + bs[1])], dtype=complex))
        pairs = _roots_with_mult(U, radius)
        sol = [([(s0, npoly.polyval(s0, h))], m) for s0, m in pairs]
    else:
        sol = _oracle_chain3(qs, bs, total, radius)

    return _merge_solutions(hmap, n, sol, total, radius)


def _roots_with_mult(U: np.ndarray, radius: float):
    deg = len(U) - 1
    scale = np.max(np.abs(U))
    roots = np.roots(U[::-1] / scale)
    eps = 5e-6 * max(1.0, radius)
    return _cluster_roots(roots, eps)


def _a_coeffs(qs, bs, x: complex) -> np.ndarray:
    """A(x, s1) = b0 q1(s1) + s1 - b0 b1 x - q0(x), coefficients in s1."""
    c = bs[0] * qs[1].copy()
    if len(c) < 2:
        c = np.pad(c, (0, 2 - len(c)))
    c[1] += 1.0
    c[0] += -bs[0] * bs[1] * x - npoly.polyval(x, qs[0])
    return c


def _b_coeffs(qs, bs, x: complex) -> np.ndarray:
    """B(x, s1) = q2((q0(x) - s1)/b0) - b2 s1 - x, coefficients in s1."""
    u = npoly.polyval(x, qs[0])
    inner = np.array([u / bs[0], -1.0 / bs[0]], dtype=complex)
    c = _compose(qs[2], inner)
    if len(c) < 2:
        c = np.pad(c, (0, 2 - len(c)))
    c[1] += -bs[2]
    c[0] += -x
    return c


def _oracle_chain3(qs, bs, total: int, radius: float):
    D0 = len(qs[0]) - 1
    D1 = len(qs[1]) - 1
    D2 = len(qs[2]) - 1
    # resultant degree bound before trimming to the true count
    degree_bound = D0 * D2 * (1 + D1) + 4
    N = 1
    while N < 2 * (degree_bound + 1):
        N *= 2
    rho = 1.25 * radius
    xs = rho * np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.empty(N, dtype=complex)
    for j, x in enumerate(xs):
        S = _sylvester(_a_coeffs(qs, bs, x), _b_coeffs(qs, bs, x))
        vals[j] = np.linalg.det(S)
    coeffs = np.fft.fft(vals) / N / rho ** np.arange(N)
    U = _trim_to_degree(coeffs, total)
    pairs = _roots_with_mult(U, radius)
    sol = []
    for s0, mult in pairs:
        ac = _a_coeffs(qs, bs, s0)
        bc = _b_coeffs(qs, bs, s0)
        cands = np.roots(ac[::-1] / np.max(np.abs(ac)))
        bscale = max(np.max(np.abs(bc)), 1.0)
        good = [s1 for s1 in cands
                if abs(npoly.polyval(s1, bc)) < 1e-4 * bscale * max(1.0, abs(s1)) ** (len(bc) - 1)]
        if not good:
            raise OracleDegenerate("no consistent back-substitution for a root")
        sol.append(([(s0, s1) for s1 in good], mult))
    return sol


def _refine_soft(hmap: HenonMap, orbit, iters: int = 48):
    """Regularized Newton polish that tolerates singular monodromies.

    Multiple intersection points (monodromy eigenvalue 1) only converge
    linearly; a small Tikhonov term keeps the block solve defined there.
    """
    pts = [(complex(z[0]), complex(z[1])) for z in orbit]
    n = len(pts)
    best = None
    for _ in range(iters):
        rs, jacs = _residuals(hmap, pts)
        res = max(max(abs(r[0]), abs(r[1])) for r in rs)
        if best is None or res < best[1]:
            best = (list(pts), res)
        if res < 1e-14:
            break
        T = M2_EYE
        u = (0j, 0j)
        Ts = [T]
        us = [u]
        for i in range(n - 1):
            A = jacs[i]
            T = m2_mul(A, T)
            Au = m2_vec(A, u)
            u = (Au[0] + rs[i][0], Au[1] + rs[i][1])
            Ts.append(T)
            us.append(u)
        M = m2_mul(jacs[n - 1], T)
        S = (M[0] - 1, M[1], M[2], M[3] - 1)
        w = m2_vec(jacs[n - 1], u)
        rhs = (-(rs[n - 1][0] + w[0]), -(rs[n - 1][1] + w[1]))
        nS = m2_norm(S)
        det = S[0] * S[3] - S[1] * S[2]
        if abs(det) < 1e-12 * nS * nS:
            lam = 1e-8 * max(nS, 1.0)
            S = (S[0] + lam, S[1], S[2], S[3] + lam)
        try:
            d0 = m2_solve(S, rhs)
        except ZeroDivisionError:
            break
        for i in range(n):
            di = m2_vec(Ts[i], d0)
            pts[i] = (pts[i][0] + di[0] + us[i][0], pts[i][1] + di[1] + us[i][1])
    return tuple(best[0]), best[1]


def _merge_solutions(hmap: HenonMap, n: int, sol, total: int, radius: float):
    """Refine back-substituted candidates and merge multiplicities.

    Each resultant root distributes its multiplicity over the candidate
    points that survive refinement; numerically split multiple roots
    re-merge here, so the total count stays exactly d^n.
    """
    weighted = []
    for cands, mult in sol:
        refined = []
        for z in cands:
            orbit = [z]
            cur = z
            ok = True
            for _ in range(n - 1):
                try:
                    cur = evaluate(hmap, cur)
                except Overflow:
                    ok = False
                    break
                orbit.append(cur)
            if not ok:
                continue
            pts, res = _refine_soft(hmap, tuple(orbit))
            if res < 1e-6 * (1.0 + radius):
                refined.append(pts[0])
        if not refined:
            raise OracleDegenerate("no candidate of a resultant root refined "
                                   "to a periodic point")
        wgt = mult / len(refined)
        weighted.extend((z, wgt) for z in refined)

    clusters = _cluster_points(weighted, 1e-5)
    out = []
    for cl in clusters:
        w = sum(cl["payloads"])
        mult = round(w)
        if abs(w - mult) > 0.26 or mult < 1:
            raise OracleDegenerate("multiplicities did not merge to integers")
        i = min(range(len(cl["pts"])), key=lambda j: _lex_key(cl["pts"][j]))
        out.append((cl["pts"][i], mult))
    if sum(m for _, m in out) != total:
        raise OracleDegenerate("total multiplicity does not match the degree")
    out.sort(key=lambda it: _lex_key(it[0]))
    return out
