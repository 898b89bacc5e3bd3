"""Quadrature primitives for abelian integrals x^k dx / y.

Three integral shapes cover everything in the package:

* ``chebyshev_segment``: along a straight segment joining two branch points.
  With x = m + h u the factor (x - A)(x - B) = -h^2 (1 - u^2) comes out of F,
  so the inverse-square-root endpoint singularities are absorbed exactly by a
  Gauss-Chebyshev rule in u.
* ``gl_segment``: along a segment staying clear of all branch points
  (Gauss-Legendre, branch of y tracked along the nodes).
* ``takeoff``: from a branch point e outward, parametrised x = e + t^2 c so
  the integrand is smooth in t; and ``infinity_tail``: from a staging point
  out to x = infinity in the coordinate tau = 1/x, where x^k dx / y is
  regular at tau = 0 for k <= g - 1.

All drivers refine by doubling the node count until two successive levels
agree within the requested tolerance.
"""

from __future__ import annotations

import cmath
from functools import lru_cache

import numpy as np

from .curve import HyperellipticCurve, track_sqrt
from .errors import QuadratureNotConverged


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _refine(evaluate, n0: int, tol: float, n_max: int, what: str):
    """Run ``evaluate(n)`` with doubling n until successive results agree.

    Returns (value, final node count).
    """
    n = n0
    prev = evaluate(n)
    while n < n_max:
        n *= 2
        cur = evaluate(n)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if float(np.max(np.abs(cur - prev))) <= tol * scale:
            return cur, n
        prev = cur
    raise QuadratureNotConverged(f"{what}: no convergence at {n} nodes")


# -- segment between two branch points ----------------------------------------


def chebyshev_segment(
    c: HyperellipticCurve,
    ia: int,
    ib: int,
    exponents,
    anchor_y: complex | None = None,
    tol: float = 1e-10,
    n0: int = 64,
    n_max: int = 4096,
    with_node_count: bool = False,
):
    """integral over [e_ia, e_ib] of x^k dx / y for each k in ``exponents``.

    The branch of y is pinned by its value ``anchor_y`` at the segment
    midpoint (default: principal square root of F there).  Returns a complex
    vector, one entry per exponent.
    """
    bp = c.branch_points
    A, B = bp[ia], bp[ib]
    m, h = (A + B) / 2.0, (B - A) / 2.0
    others = np.array([bp[j] for j in range(len(bp)) if j not in (ia, ib)])
    lead = c.leading_coeff
    y_mid = complex(anchor_y) if anchor_y is not None else cmath.sqrt(complex(c.F(m)))
    exponents = list(exponents)

    def evaluate(n: int):
        k = np.arange(1, n + 1)
        us = np.cos((2 * k - 1) * np.pi / (2 * n))[::-1]  # ascending in u
        xs = m + h * us
        # F(x) = -lead h^2 (1 - u^2) R(u) with R the product over other roots
        R = np.ones_like(xs)
        for e in others:
            R = R * (xs - e)
        S2 = -lead * h * h * R
        # sqrt(S2) tracked outward from u = 0 where it equals y(midpoint)
        S = np.empty_like(S2)
        pos = np.where(us >= 0)[0]
        neg = np.where(us < 0)[0][::-1]
        for idx_run in (pos, neg):
            prev = y_mid
            for i in idx_run:
                cand = cmath.sqrt(S2[i])
                prev = cand if abs(cand - prev) <= abs(-cand - prev) else -cand
                S[i] = prev
        return np.array([(np.pi / n) * np.sum(xs**k * h / S) for k in exponents])

    vals, n_final = _refine(evaluate, n0, tol, n_max, "branch-cut segment")
    if with_node_count:
        return vals, n_final
    return vals


# -- regular segment -----------------------------------------------------------


def gl_segment(
    c: HyperellipticCurve,
    a: complex,
    b: complex,
    y_a: complex,
    exponents,
    tol: float = 1e-10,
    n0: int = 32,
    n_max: int = 8192,
):
    """integral along the straight segment a -> b with y tracked from y_a.

    Returns (vector of integrals, y at b).  The segment must keep away from
    branch points; accuracy degrades (and refinement compensates) as it
    approaches them.
    """
    a, b = complex(a), complex(b)
    exponents = list(exponents)

    def evaluate(n: int):
        xgl, wgl = _leggauss(n)
        ts = (xgl + 1.0) / 2.0
        ws = wgl / 2.0
        xs = a + (b - a) * ts
        ys = track_sqrt(c.F(xs), y_a)
        vals = [np.sum((b - a) * xs**k / ys * ws) for k in exponents]
        y_b = ys[-1]
        cand = cmath.sqrt(complex(c.F(b)))
        y_b = cand if abs(cand - y_b) <= abs(-cand - y_b) else -cand
        return np.array(vals + [y_b])

    out, _ = _refine(evaluate, n0, tol, n_max, "regular segment")
    return out[:-1], complex(out[-1])


# -- takeoff / landing at a branch point ----------------------------------------


def takeoff(
    c: HyperellipticCurve,
    branch_index: int,
    target: complex,
    exponents,
    tol: float = 1e-10,
    n0: int = 32,
    n_max: int = 4096,
):
    """integral from the branch point e out to ``target`` along x = e + t^2 (target - e).

    The emergence branch is the one continued from the principal square root
    of F/(x - e) at t = 0.  Returns (vector of integrals, y at target on that
    branch).  The other emergence gives the exactly negated integral.
    """
    bp = c.branch_points
    e = bp[branch_index]
    others = np.array([bp[j] for j in range(len(bp)) if j != branch_index])
    lead = c.leading_coeff
    chat = complex(target) - e
    sq_chat = cmath.sqrt(chat)
    G0 = cmath.sqrt(lead * complex(np.prod(e - others)))
    exponents = list(exponents)

    def q_values(xs):
        Q = np.full(xs.shape, lead, dtype=complex)
        for r in others:
            Q = Q * (xs - r)
        return Q

    def evaluate(n: int):
        xgl, wgl = _leggauss(n)
        ts = (xgl + 1.0) / 2.0
        ws = wgl / 2.0
        xs = e + ts**2 * chat
        G = track_sqrt(q_values(xs), G0)
        # x^k dx / y = 2 x^k sqrt(chat) / G dt
        vals = [np.sum(2.0 * xs**k * sq_chat / G * ws) for k in exponents]
        g_end = G[-1]
        cand = cmath.sqrt(q_values(np.array([complex(target)]))[0])
        g_end = cand if abs(cand - g_end) <= abs(-cand - g_end) else -cand
        return np.array(vals + [sq_chat * g_end])

    out, _ = _refine(evaluate, n0, tol, n_max, "branch-point takeoff")
    return out[:-1], complex(out[-1])


# -- tail out to infinity --------------------------------------------------------


def infinity_tail(
    c: HyperellipticCurve,
    staging: complex,
    y_staging: complex,
    exponents,
    tol: float = 1e-10,
    n0: int = 32,
    n_max: int = 4096,
):
    """integral from ``staging`` out to x = infinity along the radial ray.

    Works in tau = 1/x where W(tau) = y tau^{g+1} satisfies W^2 = rev(F)(tau),
    analytic and nonvanishing near 0.  Returns (vector of integrals, landing
    sheet +-1) where +1 means the infinite point with y / x^{g+1} -> principal
    sqrt of the leading coefficient.
    """
    g = c.genus
    rev = np.asarray(c.coeffs)[::-1]
    tau0 = 1.0 / complex(staging)
    W0 = complex(y_staging) * tau0 ** (g + 1)
    sqrt_lead = cmath.sqrt(c.leading_coeff)
    exponents = list(exponents)
    if any(k > g - 1 for k in exponents):
        raise ValueError("infinity tail only defined for exponents <= g-1")

    def w_values(taus):
        return np.polynomial.polynomial.polyval(taus, rev)

    def evaluate(n: int):
        xgl, wgl = _leggauss(n)
        ts = (xgl + 1.0) / 2.0
        ws = wgl / 2.0
        taus = tau0 * (1.0 - ts)  # from tau0 to 0
        W = track_sqrt(w_values(taus), W0)
        # x^k dx / y = -tau^{g-1-k} dtau / W(tau);  dtau = -tau0 dt
        vals = [np.sum(taus ** (g - 1 - k) * tau0 / W * ws) for k in exponents]
        w_end = W[-1]
        cand = sqrt_lead
        sheet = 1.0 if abs(cand - w_end) <= abs(-cand - w_end) else -1.0
        return np.array(vals + [sheet])

    out, _ = _refine(evaluate, n0, tol, n_max, "infinity tail")
    return out[:-1], int(out[-1].real)
