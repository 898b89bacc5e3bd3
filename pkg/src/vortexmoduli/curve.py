"""Hyperelliptic curves y^2 = F(x) as two-sheeted covers of the x-sphere.

Conventions used throughout the package:

* ``F`` has even degree 2g+2 with ``F(0) != 0``, so neither x = 0 nor
  x = infinity is a branch point.  ``normalize`` turns any squarefree input
  of degree 2g+1 or 2g+2 into this shape with a Moebius change of the base
  coordinate.
* Coefficients are stored lowest-degree first.
* Branch points are the 2g+2 roots of F, sorted lexicographically by
  (real, imaginary) part.  This fixed ordering is relied on by the homology
  construction in :mod:`vortexmoduli.periods`.
* The two points over x = infinity are first-class values,
  ``SurfacePoint.infinite(+1)`` and ``SurfacePoint.infinite(-1)``; the sign
  is the branch of lim y / x^{g+1} relative to the principal square root of
  the leading coefficient.
* The hyperelliptic involution is (x, y) -> (x, -y); it swaps the two
  infinite points and fixes exactly the branch points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegreeTooLow,
    NeedsNormalization,
    NotSquarefree,
    PathTooCloseToBranchPoint,
    PointNotOnCurve,
    ContinuationNotConverged,
)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances; all relative unless noted."""

    squarefree_tol: float = 1e-9
    residual_tol: float = 1e-9
    continuation_tol: float = 1e-12
    # path_clearance = clearance_factor * branch-point diameter
    clearance_factor: float = 1e-6
    point_tol: float = 1e-8

    def replace(self, **kwargs) -> "Tolerances":
        data = self.__dict__.copy()
        data.update(kwargs)
        return Tolerances(**data)


@dataclass(frozen=True)
class SurfacePoint:
    """A point on the curve: finite (x, y) or one of the two points over infinity.

    ``sheet`` is 0 for finite points and +-1 for infinite ones.
    """

    x: complex | None
    y: complex | None
    sheet: int = 0

    @staticmethod
    def finite(x: complex, y: complex) -> "SurfacePoint":
        return SurfacePoint(complex(x), complex(y), 0)

    @staticmethod
    def infinite(sheet: int) -> "SurfacePoint":
        if sheet not in (1, -1):
            raise ValueError("infinite sheet must be +1 or -1")
        return SurfacePoint(None, None, sheet)

    @property
    def is_infinite(self) -> bool:
        return self.sheet != 0

    def __repr__(self) -> str:
        if self.is_infinite:
            return f"SurfacePoint.infinite({self.sheet:+d})"
        return f"SurfacePoint({self.x:.6g}, {self.y:.6g})"


def points_close(p: SurfacePoint, q: SurfacePoint, tol: float, scale: float = 1.0) -> bool:
    """Tolerance-based point identity: joint (x, y) distance, relative to scale."""
    if p.is_infinite or q.is_infinite:
        return p.sheet == q.sheet
    return abs(p.x - q.x) + abs(p.y - q.y) <= tol * max(1.0, scale)


@dataclass(frozen=True)
class MobiusMap:
    """x -> (a x + b) / (c x + d) on the base sphere."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if abs(self.det) < 1e-13 * (abs(self.a) + abs(self.b) + abs(self.c) + abs(self.d)) ** 2:
            raise ValueError("Moebius map is degenerate")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(1.0, 0.0, 0.0, 1.0)

    @property
    def is_identity(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def apply(self, x: complex | None) -> complex | None:
        """Evaluate, with None standing for the point at infinity."""
        if x is None:
            return None if self.c == 0 else self.a / self.c
        den = self.c * x + self.d
        if den == 0:
            return None
        return (self.a * x + self.b) / den

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)


@dataclass(frozen=True)
class HyperellipticCurve:
    """Validated curve y^2 = F(x), deg F = 2g+2, F squarefree, F(0) != 0."""

    coeffs: tuple          # lowest-degree first
    genus: int
    branch_points: tuple   # sorted by (re, im)
    leading_coeff: complex
    tol: Tolerances = field(default_factory=Tolerances)

    # -- geometry helpers ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def diameter(self) -> float:
        bp = self.branch_points
        return max(abs(a - b) for a in bp for b in bp)

    @property
    def min_branch_separation(self) -> float:
        bp = self.branch_points
        return min(abs(bp[i] - bp[j]) for i in range(len(bp)) for j in range(i + 1, len(bp)))

    @property
    def centroid(self) -> complex:
        return sum(self.branch_points) / len(self.branch_points)

    @property
    def path_clearance(self) -> float:
        return self.tol.clearance_factor * self.diameter

    def F(self, x):
        """Evaluate F at a scalar or array of x values."""
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))

    def dF(self, x):
        der = np.polynomial.polynomial.polyder(np.asarray(self.coeffs))
        return np.polynomial.polynomial.polyval(x, der)

    def contains(self, p: SurfacePoint) -> bool:
        if p.is_infinite:
            return True
        fx = self.F(p.x)
        return abs(p.y * p.y - fx) <= self.tol.residual_tol * max(1.0, abs(fx))

    def require_on_curve(self, p: SurfacePoint) -> None:
        if not self.contains(p):
            raise PointNotOnCurve(f"{p!r} does not satisfy y^2 = F(x)")

    def points_over(self, x: complex) -> tuple:
        """The fibre of the double cover over finite x.

        Returns a pair (p, sigma(p)); at a branch point both entries are the
        ramification point itself.
        """
        fx = complex(self.F(x))
        y = cmath.sqrt(fx)
        nearest = min(abs(x - e) for e in self.branch_points)
        if nearest <= self.tol.point_tol * max(1.0, self.diameter):
            i = min(range(len(self.branch_points)), key=lambda k: abs(x - self.branch_points[k]))
            r = self.ramification_point(i)
            return r, r
        return SurfacePoint.finite(x, y), SurfacePoint.finite(x, -y)

    def ramification_point(self, i: int) -> SurfacePoint:
        return SurfacePoint.finite(self.branch_points[i], 0.0)

    def curve_hash(self) -> str:
        import hashlib

        payload = ",".join(f"{z.real:.17e}:{z.imag:.17e}" for z in self.coeffs)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


# -- construction ------------------------------------------------------------


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    # one Newton step per root; keeps companion-matrix output residual-checkable
    der = np.polynomial.polynomial.polyder(coeffs)
    roots = np.asarray(roots, dtype=complex)
    fr = np.polynomial.polynomial.polyval(roots, coeffs)
    dfr = np.polynomial.polynomial.polyval(roots, der)
    safe = np.abs(dfr) > 0
    roots = roots.copy()
    roots[safe] -= fr[safe] / dfr[safe]
    return roots


def _sorted_roots(coeffs: np.ndarray) -> np.ndarray:
    roots = np.roots(coeffs[::-1])
    roots = _polish_roots(coeffs, roots)
    return np.array(sorted(roots, key=lambda z: (z.real, z.imag)))


def new_curve(coeffs, tol: Tolerances | None = None) -> HyperellipticCurve:
    """Validate coefficients (lowest-degree first) and build the curve.

    Raises NeedsNormalization for odd degree or F(0) = 0, NotSquarefree for a
    repeated root, DegreeTooLow below degree 3.
    """
    tol = tol or Tolerances()
    c = np.asarray([complex(z) for z in coeffs])
    if c.size == 0:
        raise DegreeTooLow("empty coefficient list")
    # strip numerically-zero leading coefficients
    scale = float(np.max(np.abs(c))) or 1.0
    deg = c.size - 1
    while deg > 0 and abs(c[deg]) <= 1e-14 * scale:
        deg -= 1
    c = c[: deg + 1]
    if deg < 3:
        raise DegreeTooLow(f"degree {deg} < 3 gives genus < 1")
    if deg % 2 == 1:
        raise NeedsNormalization(f"degree {deg} is odd: branch point at infinity")
    if abs(c[0]) <= tol.squarefree_tol * scale:
        raise NeedsNormalization("F(0) = 0: branch point over x = 0")

    roots = _sorted_roots(c)
    diam = max(abs(a - b) for a in roots for b in roots)
    min_sep = min(
        abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots))
    )
    if min_sep <= tol.squarefree_tol * max(1.0, diam):
        raise NotSquarefree(f"repeated root: min separation {min_sep:.3e}")
    # a true double root splits into a ~sqrt(eps) pair that passes the distance
    # test; F'(x_i) != 0 at the right scale catches it
    der = np.polynomial.polynomial.polyder(c)
    der_scale = float(np.max(np.abs(der))) or 1.0
    for r in roots:
        rel = abs(np.polynomial.polynomial.polyval(r, der)) / (
            der_scale * (1.0 + abs(r)) ** (deg - 1)
        )
        if rel <= math.sqrt(tol.squarefree_tol):
            raise NotSquarefree(f"F'({r:.6g}) ~ 0: repeated root")

    resid = max(
        abs(np.polynomial.polynomial.polyval(r, c)) / (1.0 + abs(r)) ** deg for r in roots
    )
    if resid > tol.residual_tol * scale:
        raise NotSquarefree(f"root residual {resid:.3e} exceeds tolerance")

    genus = deg // 2 - 1
    return HyperellipticCurve(
        coeffs=tuple(complex(z) for z in c),
        genus=genus,
        branch_points=tuple(complex(r) for r in roots),
        leading_coeff=complex(c[-1]),
        tol=tol,
    )


def _transform_coeffs(c: np.ndarray, m: MobiusMap, target_deg: int) -> np.ndarray:
    """Coefficients of (c x + d)^N F((a x + b)/(c x + d)), N = target_deg."""
    P = np.polynomial.polynomial
    num = np.array([m.b, m.a])
    den = np.array([m.d, m.c])
    out = np.zeros(target_deg + 1, dtype=complex)
    for j, fj in enumerate(c):
        term = np.array([fj], dtype=complex)
        for _ in range(j):
            term = P.polymul(term, num)
        for _ in range(target_deg - j):
            term = P.polymul(term, den)
        out[: term.size] += term
    return out


def normalize(coeffs, tol: Tolerances | None = None):
    """Bring a squarefree F of degree 2g+1 or 2g+2 (possibly F(0)=0) to standard
    position: even degree and no branch point over 0 or infinity.

    Returns (curve, moebius) where ``moebius`` maps the new base coordinate to
    the old one; branch points of the new curve are preimages of the old
    branch set (including infinity when the input degree was odd).
    """
    tol = tol or Tolerances()
    c = np.asarray([complex(z) for z in coeffs])
    scale = float(np.max(np.abs(c))) or 1.0
    deg = c.size - 1
    while deg > 0 and abs(c[deg]) <= 1e-14 * scale:
        deg -= 1
    c = c[: deg + 1]
    if deg < 3:
        raise DegreeTooLow(f"degree {deg} < 3 gives genus < 1")

    odd = deg % 2 == 1
    root_at_zero = abs(c[0]) <= tol.squarefree_tol * scale
    if not odd and not root_at_zero:
        return new_curve(c, tol), MobiusMap.identity()

    roots = _sorted_roots(c)
    min_sep = min(
        abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots))
    ) if len(roots) > 1 else 1.0
    diam = max((abs(a - b) for a in roots for b in roots), default=1.0)
    if min_sep <= tol.squarefree_tol * max(1.0, diam):
        raise NotSquarefree(f"repeated root: min separation {min_sep:.3e}")

    cen = complex(roots.mean())

    def far_from_roots(z, margin):
        return all(abs(z - r) > margin for r in roots)

    if odd:
        # full map x = (u t + v)/(t + 1): sends t=inf -> u, t=0 -> v, t=-1 -> inf;
        # both u and v must avoid the branch set.
        rho = 1.5 * (diam + 1.0)
        margin = 0.25 * max(min_sep, 1e-3 * rho)
        u = v = None
        for k in range(64):
            ang = 2.399963229728653 * k  # golden angle, deterministic scan
            cu = cen + rho * cmath.exp(1j * ang)
            cv = cen - rho * cmath.exp(1j * ang)
            if far_from_roots(cu, margin) and far_from_roots(cv, margin):
                u, v = cu, cv
                break
        if u is None:
            raise NotSquarefree("could not place Moebius images away from roots")
        m = MobiusMap(u, v, 1.0, 1.0)
        target_deg = deg + 1
    else:
        # a shift suffices: x = t + v with F(v) != 0; infinity stays unramified
        base = 0.4 * min_sep
        v = None
        for k in range(64):
            ang = 2.399963229728653 * k
            cv = base * cmath.exp(1j * ang)
            if far_from_roots(cv, 0.25 * base):
                v = cv
                break
        if v is None:
            raise NotSquarefree("could not shift branch point away from 0")
        m = MobiusMap(1.0, v, 0.0, 1.0)
        target_deg = deg

    new_c = _transform_coeffs(c, m, target_deg)
    curve = new_curve(new_c, tol)
    return curve, m


# -- involution and charts ----------------------------------------------------


def involution(c: HyperellipticCurve, p: SurfacePoint) -> SurfacePoint:
    """The hyperelliptic involution sigma: (x, y) -> (x, -y), swapping s1 <-> s2."""
    c.require_on_curve(p)
    if p.is_infinite:
        return SurfacePoint.infinite(-p.sheet)
    return SurfacePoint.finite(p.x, -p.y)


@dataclass(frozen=True)
class ChartInfo:
    """Which local coordinate is valid at a point.

    kind 'x' (generic finite), 'inv_x' (near infinity) or 'w' (w = y near a
    ramification point, where x - x_i = w^2 / F'(x_i) + O(w^4)).
    """

    kind: str
    center: complex | None
    leading: complex | None = None  # 1/F'(x_i) for the w-chart


def local_chart(c: HyperellipticCurve, p: SurfacePoint) -> ChartInfo:
    c.require_on_curve(p)
    if p.is_infinite:
        return ChartInfo("inv_x", 0.0)
    merge = c.tol.point_tol * max(1.0, c.diameter)
    for i, e in enumerate(c.branch_points):
        if abs(p.x - e) + abs(p.y) <= merge:
            return ChartInfo("w", e, 1.0 / complex(c.dF(e)))
    return ChartInfo("x", p.x)


# -- analytic continuation of the y-sheet --------------------------------------


def segment_point_distance(a: complex, b: complex, p: complex) -> float:
    """Distance from p to the closed segment [a, b]."""
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a).real * ab.real + (p - a).imag * ab.imag) / L2
    t = min(1.0, max(0.0, t))
    return abs(a + t * ab - p)


def track_sqrt(values, start):
    """sqrt of a dense nonvanishing path of complex values, continued from start.

    The branch at each step is the candidate nearest to the previous value;
    callers are responsible for sampling densely enough (see
    ``sheet_continuation`` for the refinement loop).
    """
    y = start
    out = np.empty(len(values), dtype=complex)
    for i, v in enumerate(values):
        cand = cmath.sqrt(v)
        y = cand if abs(cand - y) <= abs(-cand - y) else -cand
        out[i] = y
    return out


def sheet_continuation(
    c: HyperellipticCurve,
    x_path,
    y_start: complex,
    tol: float | None = None,
    clearance: float | None = None,
) -> complex:
    """Analytic continuation of y = sqrt(F) along a polyline in the x-plane.

    Step sizes are halved until two successive refinements agree within
    ``tol`` (default: the curve's continuation tolerance).  The path must
    stay ``clearance`` away from every branch point.
    """
    pts = [complex(z) for z in x_path]
    if len(pts) < 1:
        raise ValueError("empty path")
    tol = c.tol.continuation_tol if tol is None else tol
    clearance = c.path_clearance if clearance is None else clearance

    f0 = complex(c.F(pts[0]))
    if abs(y_start * y_start - f0) > c.tol.residual_tol * max(1.0, abs(f0)):
        raise PointNotOnCurve("y_start^2 != F(path start)")

    for a, b in zip(pts[:-1], pts[1:]):
        for e in c.branch_points:
            d = segment_point_distance(a, b, e)
            if d < clearance:
                raise PathTooCloseToBranchPoint(
                    f"path within {d:.3e} of branch point {e:.6g}"
                )

    if len(pts) == 1 or all(a == b for a, b in zip(pts[:-1], pts[1:])):
        return y_start

    def run(n_per_edge: int) -> complex:
        samples = []
        for a, b in zip(pts[:-1], pts[1:]):
            ts = np.linspace(0.0, 1.0, n_per_edge + 1)[1:]
            samples.append(a + (b - a) * ts)
        values = c.F(np.concatenate(samples))
        return complex(track_sqrt(values, y_start)[-1])

    n = 8
    prev = run(n)
    while n <= 1 << 16:
        n *= 2
        cur = run(n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ContinuationNotConverged(
        f"sheet tracking did not stabilise at {n} steps per edge"
    )


# -- curve JSON interface -------------------------------------------------------


def curve_from_json(data: dict) -> HyperellipticCurve:
    """Build a curve from the JSON spec {"coeffs": [[re, im], ...], "tolerances": {...}}."""
    from .errors import ConfigInvalid

    if "coeffs" not in data:
        raise ConfigInvalid("curve spec missing 'coeffs'")
    try:
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad coefficient list: {exc}") from exc
    tol = Tolerances()
    overrides = data.get("tolerances", {})
    if overrides:
        unknown = set(overrides) - set(tol.__dict__)
        if unknown:
            raise ConfigInvalid(f"unknown tolerance keys: {sorted(unknown)}")
        tol = tol.replace(**overrides)
    return new_curve(coeffs, tol)
