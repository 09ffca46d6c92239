"""Minimal double-double (compensated) arithmetic on float64 ndarrays.

A double-double value is an unevaluated sum ``hi + lo`` with |lo| <= ulp(hi)/2,
giving ~31 significant digits.  Only the operations needed by the ascending
Bessel series live here.  Splitting follows Dekker (1971); two_sum is Knuth's
branch-free version, so everything vectorizes over numpy arrays.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(xh, xl, yh, yl):
    sh, sl = two_sum(xh, yh)
    sl = sl + (xl + yl)
    return two_sum(sh, sl)


def dd_mul(xh, xl, yh, yl):
    ph, pl = two_prod(xh, yh)
    pl = pl + (xh * yl + xl * yh)
    return two_sum(ph, pl)


def dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = dd_mul(q1, np.zeros_like(q1), yh, yl)
    rh, rl = dd_add(xh, xl, -ph, -pl)
    q2 = (rh + rl) / yh
    return two_sum(q1, q2)
