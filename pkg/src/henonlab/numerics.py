"""Extended-range complex arithmetic and small dense kernels.

Forward orbits off the bounded set grow doubly exponentially, so deep
iterates overflow IEEE doubles long before the quantities of interest
(log magnitudes) do.  An ``XC`` value stores a complex mantissa together
with an unbounded base-2 integer exponent: precision stays that of a
double while the representable range becomes unbounded.  A vectorized
twin (``vx_*`` functions on mantissa/exponent array pairs) serves the
batched root searches.

Plain double-precision paths treat magnitudes above ``OVERFLOW_CEILING``
as overflow; the ceiling leaves headroom for squaring (1e150**2 is still
finite in a double).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import Overflow

LN2 = math.log(2.0)

OVERFLOW_CEILING = 1e150


# ---------------------------------------------------------------------------
# scalar extended-range complex values
# ---------------------------------------------------------------------------

class XC:
    """Complex value ``mant * 2**exp2``, mantissa normalized to O(1)."""

    __slots__ = ("mant", "exp2")

    def __init__(self, mant: complex, exp2: int = 0):
        mag = max(abs(mant.real), abs(mant.imag))
        if mag == 0.0:
            self.mant = 0j
            self.exp2 = 0
            return
        _, k = math.frexp(mag)
        if k:
            mant = complex(math.ldexp(mant.real, -k), math.ldexp(mant.imag, -k))
            exp2 += k
        self.mant = mant
        self.exp2 = exp2

    def __repr__(self):
        return f"XC({self.mant!r}, {self.exp2})"

    def is_zero(self) -> bool:
        return self.mant == 0j


XC_ZERO = XC(0j)
XC_ONE = XC(1.0 + 0j)


def xc_mul(a: XC, b: XC) -> XC:
    return XC(a.mant * b.mant, a.exp2 + b.exp2)


def xc_mulc(a: XC, c: complex) -> XC:
    return XC(a.mant * c, a.exp2)


def xc_add(a: XC, b: XC) -> XC:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    d = a.exp2 - b.exp2
    if d >= 106:
        return a
    if d <= -106:
        return b
    if d >= 0:
        m = a.mant + complex(math.ldexp(b.mant.real, -d), math.ldexp(b.mant.imag, -d))
        return XC(m, a.exp2)
    m = b.mant + complex(math.ldexp(a.mant.real, d), math.ldexp(a.mant.imag, d))
    return XC(m, b.exp2)


def xc_sub(a: XC, b: XC) -> XC:
    return xc_add(a, XC(-b.mant, b.exp2))


def xc_addc(a: XC, c: complex) -> XC:
    return xc_add(a, XC(c))


def xc_abs_log(a: XC) -> float:
    """Natural log of |a|; -inf for zero."""
    if a.is_zero():
        return -math.inf
    return math.log(abs(a.mant)) + a.exp2 * LN2


def xc_to_complex(a: XC) -> complex:
    if a.is_zero():
        return 0j
    if a.exp2 > 500:
        raise Overflow(f"extended value too large for a double (exp2={a.exp2})")
    if a.exp2 < -1060:
        return 0j
    return complex(math.ldexp(a.mant.real, a.exp2), math.ldexp(a.mant.imag, a.exp2))


def xc_ratio(a: XC, b: XC) -> complex:
    """a / b as a plain complex, saturated at ~1e300 instead of overflowing."""
    if b.is_zero():
        raise ZeroDivisionError("xc_ratio by zero")
    if a.is_zero():
        return 0j
    q = a.mant / b.mant
    e = a.exp2 - b.exp2
    if e > 996:
        return q / abs(q) * 1e300
    if e < -1060:
        return 0j
    return complex(math.ldexp(q.real, e), math.ldexp(q.imag, e))


def xc_horner_monic(coeffs: tuple[complex, ...], y: XC) -> XC:
    """Evaluate the monic polynomial y^D + sum coeffs[i] y^i at an XC point."""
    acc = XC_ONE
    for c in reversed(coeffs):
        acc = xc_add(xc_mul(acc, y), XC(c))
    return acc


def xc_horner_deriv_monic(coeffs: tuple[complex, ...], y: XC) -> XC:
    """Evaluate the derivative of the monic polynomial at an XC point."""
    deg = len(coeffs)
    acc = XC(complex(deg))
    for i in range(deg - 1, 0, -1):
        acc = xc_add(xc_mul(acc, y), XC(i * coeffs[i]))
    return acc


# ---------------------------------------------------------------------------
# vectorized extended-range complex arrays (mantissa, exp2) pairs
# ---------------------------------------------------------------------------

def vx_norm(m: np.ndarray, e: np.ndarray):
    mag = np.maximum(np.abs(m.real), np.abs(m.imag))
    nz = mag > 0.0
    _, k = np.frexp(np.where(nz, mag, 1.0))
    k = k.astype(np.int64)
    mnew = np.ldexp(m.real, -k) + 1j * np.ldexp(m.imag, -k)
    return np.where(nz, mnew, 0j), np.where(nz, e + k, 0)


def vx_from(c: np.ndarray):
    return vx_norm(np.asarray(c, dtype=np.complex128), np.zeros(np.shape(c), dtype=np.int64))


def vx_mul(m1, e1, m2, e2):
    return vx_norm(m1 * m2, e1 + e2)


def vx_mulc(m1, e1, c):
    return vx_norm(m1 * c, e1)


def vx_add(m1, e1, m2, e2):
    d = np.clip(e1 - e2, -1074, 1074).astype(np.int64)
    big1 = d >= 0
    s1 = np.where(big1, 0, d)
    s2 = np.where(big1, -d, 0)
    m = (np.ldexp(m1.real, s1) + 1j * np.ldexp(m1.imag, s1)) + \
        (np.ldexp(m2.real, s2) + 1j * np.ldexp(m2.imag, s2))
    e = np.where(big1, e1, e2)
    z1 = m1 == 0j
    z2 = m2 == 0j
    m = np.where(z1, m2, np.where(z2, m1, m))
    e = np.where(z1, e2, np.where(z2, e1, e))
    return vx_norm(m, e)


def vx_addc(m, e, c):
    cc = np.broadcast_to(np.asarray(c, dtype=np.complex128), m.shape)
    mc, ec = vx_from(cc)
    return vx_add(m, e, mc, ec)


def vx_abs_log(m, e):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(m)) + e * LN2


def vx_ratio(m1, e1, m2, e2):
    """Elementwise a/b as plain complex, saturated; b==0 yields inf."""
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(m2 == 0j, np.inf + 0j, m1 / m2)
    e = np.clip(e1 - e2, -1060, 996).astype(np.int64)
    return (np.ldexp(q.real, e) + 1j * np.ldexp(q.imag, e))


def vx_horner_monic(coeffs: tuple[complex, ...], ym, ye):
    accm = np.ones_like(ym)
    acce = np.zeros_like(ye)
    for c in reversed(coeffs):
        accm, acce = vx_mul(accm, acce, ym, ye)
        accm, acce = vx_addc(accm, acce, c)
    return accm, acce


def vx_horner_deriv_monic(coeffs: tuple[complex, ...], ym, ye):
    deg = len(coeffs)
    accm = np.full_like(ym, complex(deg))
    acce = np.zeros_like(ye)
    for i in range(deg - 1, 0, -1):
        accm, acce = vx_mul(accm, acce, ym, ye)
        accm, acce = vx_addc(accm, acce, i * coeffs[i])
    return accm, acce


# ---------------------------------------------------------------------------
# 2x2 complex matrices as row-major tuples (a, b, c, d)
# ---------------------------------------------------------------------------

M2_EYE = (1 + 0j, 0j, 0j, 1 + 0j)


def m2_mul(A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def m2_vec(A, v):
    a, b, c, d = A
    x, y = v
    return (a * x + b * y, c * x + d * y)


def m2_det(A):
    a, b, c, d = A
    return a * d - b * c


def m2_solve(A, r):
    """Solve A v = r by Cramer's rule; caller checks conditioning."""
    a, b, c, d = A
    det = a * d - b * c
    if det == 0:
        raise ZeroDivisionError("singular 2x2 system")
    rx, ry = r
    return ((rx * d - b * ry) / det, (a * ry - rx * c) / det)


def m2_norm(A):
    return max(abs(A[0]), abs(A[1]), abs(A[2]), abs(A[3]))


def m2_scale(A, s):
    return (A[0] * s, A[1] * s, A[2] * s, A[3] * s)


def m2_sub(A, B):
    return (A[0] - B[0], A[1] - B[1], A[2] - B[2], A[3] - B[3])


def eig2(A):
    """Eigenvalues of a 2x2 complex matrix, |lam1| >= |lam2|.

    Uses the trace/determinant closed form with the cancellation-safe
    branch: the larger root comes from the additive branch, the smaller
    from det/lam1.
    """
    a, b, c, d = A
    tr = a + d
    det = a * d - b * c
    disc = cmath.sqrt(tr * tr - 4.0 * det)
    l1 = 0.5 * (tr + disc)
    l1b = 0.5 * (tr - disc)
    if abs(l1b) > abs(l1):
        l1 = l1b
    if l1 == 0:
        return 0j, 0j
    l2 = det / l1
    return l1, l2


def eigvec2(A, lam):
    """Unit eigenvector of A for eigenvalue lam (2x2)."""
    a, b, c, d = A
    v1 = (b, lam - a)
    v2 = (lam - d, c)
    n1 = abs(v1[0]) ** 2 + abs(v1[1]) ** 2
    n2 = abs(v2[0]) ** 2 + abs(v2[1]) ** 2
    v = v1 if n1 >= n2 else v2
    n = math.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
    if n == 0.0:
        # defective direction: any vector is fine, pick e1
        return (1 + 0j, 0j)
    return (v[0] / n, v[1] / n)
