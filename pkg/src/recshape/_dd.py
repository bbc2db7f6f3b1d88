"""Complex double-double arithmetic on numpy arrays.

A value is a pair (hi, lo) of complex arrays with |lo| <= ulp(hi) / 2 per
component.  Only the few operations needed for closed-form evaluation are
provided.
"""

from __future__ import annotations

import numpy as np

from .polynomial import _two_prod, _two_sum


def _fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _add_real(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    return _fast_two_sum(s, e + (al + bl))


def _mul_real(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    return _fast_two_sum(p, e + (ah * bl + al * bh))


def add(a, b):
    (ah, al), (bh, bl) = a, b
    rh, rl = _add_real(ah.real, al.real, bh.real, bl.real)
    ih, il = _add_real(ah.imag, al.imag, bh.imag, bl.imag)
    return rh + 1j * ih, rl + 1j * il


def mul(a, b):
    (ah, al), (bh, bl) = a, b
    ar, arl, ai, ail = ah.real, al.real, ah.imag, al.imag
    br, brl, bi, bil = bh.real, bl.real, bh.imag, bl.imag
    rr = _mul_real(ar, arl, br, brl)
    ii = _mul_real(ai, ail, bi, bil)
    ri = _mul_real(ar, arl, bi, bil)
    ir = _mul_real(ai, ail, br, brl)
    re = _add_real(rr[0], rr[1], -ii[0], -ii[1])
    im = _add_real(ri[0], ri[1], ir[0], ir[1])
    return re[0] + 1j * im[0], re[1] + 1j * im[1]


def lift(x):
    x = np.asarray(x, dtype=complex)
    return x, np.zeros_like(x)


def powers(r: complex, n: np.ndarray):
    """r**n for integer n >= 0, by binary exponentiation in double-double."""
    n = np.asarray(n, dtype=np.int64)
    result = lift(np.ones(n.shape))
    base = lift(np.full(n.shape, complex(r)))
    e = n.copy()
    while np.any(e > 0):
        odd = (e & 1) == 1
        prod = mul(result, base)
        result = (np.where(odd, prod[0], result[0]), np.where(odd, prod[1], result[1]))
        base = mul(base, base)
        e >>= 1
    return result
