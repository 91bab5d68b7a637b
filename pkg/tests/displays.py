"""Low-rank Bethe vectors written out term by term from monodromy entries acting on the vacuum.

These are independent of the recursion: each one is a fixed polynomial in
creation operators with explicit rational coefficients.
"""

from orthobethe.bethe import as_chain
from orthobethe.monodromy import apply_entry
from orthobethe.partitions import frak_f, g, h
from orthobethe.scalarfield import Q

c = Q(1)


def _T(sp, i, j, u, v):
    return apply_entry(sp, u, i, j, v)


def o5_one_plus_one(sp, a, b):
    """Sets ``t^0 = {b}``, ``t^1 = {a}``."""
    lam, v0 = as_chain(sp).lam, as_chain(sp).vacuum
    return (_T(sp, 0, 2, a, v0).scale(1 / lam(2, a))
            + _T(sp, 1, 2, a, _T(sp, 0, 1, b, v0)).scale(1 / (g(a, b, c) * lam(2, a) * lam(1, b))))


def o5_one_plus_two(sp, t0, t1, t2):
    """Sets ``t^0 = {t0}``, ``t^1 = {t1, t2}``."""
    lam, v0 = as_chain(sp).lam, as_chain(sp).vacuum
    H = h(t1, t2, c) * h(t2, t1, c)
    out = (_T(sp, 0, 2, t2, _T(sp, 1, 2, t1, v0)).scale(h(t1, t0, c) / H)
           + _T(sp, 1, 2, t2, _T(sp, 0, 2, t1, v0)).scale(1 / (g(t2, t0, c) * H))
           + _T(sp, 1, 2, t2, _T(sp, 1, 2, t1, _T(sp, 0, 1, t0, v0))).scale(
               1 / (g(t1, t0, c) * g(t2, t0, c) * H * lam(1, t0))))
    return out.scale(1 / (lam(2, t1) * lam(2, t2)))


def o5_two_plus_one(sp, s1, s2, u):
    """Sets ``t^0 = {s1, s2}``, ``t^1 = {u}``."""
    lam, v0 = as_chain(sp).lam, as_chain(sp).vacuum
    L2 = lam(2, u)
    gu = g(u, s1, c) * g(u, s2, c)
    return (_T(sp, -1, 2, u, v0).scale(-1 / L2)
            + _T(sp, 0, 2, u, _T(sp, 0, 1, s1, v0)).scale(frak_f(s2, s1, c) / (g(u, s1, c) * L2 * lam(1, s1)))
            + _T(sp, 0, 2, u, _T(sp, 0, 1, s2, v0)).scale(frak_f(s1, s2, c) / (g(u, s2, c) * L2 * lam(1, s2)))
            - _T(sp, 1, 2, u, _T(sp, -1, 1, s2, v0)).scale(1 / (gu * h(s2, s1, c) * L2 * lam(1, s2)))
            + _T(sp, 1, 2, u, _T(sp, 0, 1, s2, _T(sp, 0, 1, s1, v0))).scale(
                1 / (gu * frak_f(s2 + c / 2, s1, c) * L2 * lam(1, s2) * lam(1, s1))))


def o7_one_one_one(sp, x0, x1, x2):
    """Sets ``t^s = {x_s}``; the four-term form including the term that vanishes on a chain."""
    lam, v0 = as_chain(sp).lam, as_chain(sp).vacuum
    return (_T(sp, 0, 3, x2, v0).scale(1 / lam(3, x2))
            + _T(sp, 1, 3, x2, _T(sp, 0, 1, x0, v0)).scale(1 / (g(x1, x0, c) * lam(3, x2) * lam(1, x0)))
            + _T(sp, 2, 3, x2, _T(sp, 0, 2, x1, v0)).scale(1 / (g(x2, x1, c) * lam(3, x2) * lam(2, x1)))
            + _T(sp, 2, 3, x2, _T(sp, 1, 2, x1, _T(sp, 0, 1, x0, v0))).scale(
                1 / (g(x2, x1, c) * g(x1, x0, c) * lam(2, x1) * lam(1, x0) * lam(1, x0))))
