"""The Abel-Jacobi map on positive divisors and the linear-equivalence oracle.

The base divisor is d copies of the first ramification point r_1, so the map
of a positive divisor D = sum m_p p is the per-point integral vector

    AJ(D) = sum_p m_p (int_{r_1}^{p} omega_1, ..., omega_g)  mod Lambda.

Every per-point path starts with a takeoff piece leaving the branch point
(where the integrand is regularised exactly, see
:func:`vortexmoduli.quadrature.takeoff`), continues along a detoured polyline,
and ends with a landing piece (another branch point), a plain endpoint, or a
tail out to x = infinity.  Which of the two sheets the takeoff emerges onto
is immaterial for the value of the integral with a fixed endpoint on the
surface (the out-and-back loop through the branch point is contractible), so
endpoint sheet mismatches are corrected by negating the whole integral.

By construction the integral to sigma(p) is exactly the negative of the
integral to p, hence AJ(p + sigma(p)) = 0 identically; the sigma-symmetric
structure of the fixed-locus computations inherits this exactness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import HyperellipticCurve, SurfacePoint
from .divisor import Divisor
from .errors import DegreeMismatch
from .paths import build_path
from .periods import JacobianPoint, PeriodLattice, lattice_distance, reduce_mod_lattice
from .quadrature import gl_segment, infinity_tail, takeoff


@dataclass(frozen=True)
class AJConfig:
    """Path policy and tolerances for Abel-Jacobi evaluation.

    The base divisor is deg(D) copies of the ramification point selected by
    ``base_index`` (default: the first).  ``detour_scale`` fixes the detour
    radius as a fraction of the branch diameter; ``waypoint_seed`` randomises
    detour sides (None keeps the deterministic policy).  ``aj_tol`` is the
    lattice-distance threshold for equality in the Jacobian.
    """

    base_index: int = 0
    aj_tol: float = 1e-6
    quad_tol: float = 1e-10
    detour_scale: float = 0.05
    takeoff_scale: float = 0.5   # takeoff length as a fraction of the detour radius
    staging_scale: float = 3.0   # staging radius for infinity tails, in diameters
    waypoint_seed: int | None = None

    def detour_radius(self, c: HyperellipticCurve) -> float:
        return min(self.detour_scale * c.diameter, 0.45 * c.min_branch_separation)


class AbelJacobiMap:
    """Abel-Jacobi evaluation with per-point caching against one curve and lattice."""

    def __init__(self, c: HyperellipticCurve, P: PeriodLattice, cfg: AJConfig | None = None):
        self.curve = c
        self.lattice = P
        self.cfg = cfg or AJConfig()
        self._cache: dict = {}
        self._exps = list(range(c.genus))

    # -- per-point integrals -------------------------------------------------

    def _key(self, p: SurfacePoint):
        if p.is_infinite:
            return ("inf", p.sheet)
        return (round(p.x.real, 12), round(p.x.imag, 12), round(p.y.real, 12), round(p.y.imag, 12))

    def point_integral(self, p: SurfacePoint) -> np.ndarray:
        """integral vector (omega_1 .. omega_g) from the base ramification point to p."""
        key = self._key(p)
        if key in self._cache:
            return self._cache[key]
        val = self._compute_point_integral(p)
        self._cache[key] = val
        if not p.is_infinite:
            sigma_p = SurfacePoint.finite(p.x, -p.y)
        else:
            sigma_p = SurfacePoint.infinite(-p.sheet)
        self._cache[self._key(sigma_p)] = -val
        return val

    def _compute_point_integral(self, p: SurfacePoint) -> np.ndarray:
        c = self.curve
        cfg = self.cfg
        c.require_on_curve(p)
        g = c.genus
        base = c.branch_points[cfg.base_index]
        radius = cfg.detour_radius(c)
        rho = cfg.takeoff_scale * radius
        merge = c.tol.point_tol * max(1.0, c.diameter)

        if not p.is_infinite and abs(p.x - base) + abs(p.y) <= merge:
            return np.zeros(g, dtype=complex)  # the base point itself

        # ramification target?
        landing_index = None
        if not p.is_infinite:
            for i, e in enumerate(c.branch_points):
                if abs(p.x - e) + abs(p.y) <= merge:
                    landing_index = i
                    break

        if p.is_infinite:
            target_x = c.centroid + cfg.staging_scale * max(c.diameter, 1.0) * self._egress(c)
        elif landing_index is not None:
            e_t = c.branch_points[landing_index]
            direction = (base - e_t) / abs(base - e_t)
            target_x = e_t + rho * direction
        else:
            target_x = p.x

        takeoff_dir = (target_x - base) / abs(target_x - base)
        takeoff_end = base + rho * takeoff_dir
        total, y_here = takeoff(c, cfg.base_index, takeoff_end, self._exps, tol=cfg.quad_tol)

        waypoints = build_path(c, takeoff_end, target_x, radius=radius, seed=cfg.waypoint_seed)
        for a, b in zip(waypoints[:-1], waypoints[1:]):
            if a == b:
                continue
            vals, y_here = gl_segment(c, a, b, y_here, self._exps, tol=cfg.quad_tol)
            total = total + vals

        if p.is_infinite:
            vals, sheet = infinity_tail(c, target_x, y_here, self._exps, tol=cfg.quad_tol)
            total = total + vals
            return total if sheet == p.sheet else -total

        if landing_index is not None:
            vals, y_rim = takeoff(c, landing_index, target_x, self._exps, tol=cfg.quad_tol)
            # landing = reversed takeoff on the matching emergence branch
            if abs(y_rim - y_here) <= abs(y_rim + y_here):
                total = total - vals
            else:
                total = total + vals
            return total

        # plain finite endpoint: match the prescribed y
        if abs(y_here - p.y) <= abs(y_here + p.y):
            return total
        return -total

    @staticmethod
    def _egress(c: HyperellipticCurve) -> complex:
        """Deterministic staging direction for tails to infinity."""
        first = c.branch_points[0]
        v = first - c.centroid
        if abs(v) < 1e-12 * max(1.0, c.diameter):
            return 1.0 + 0.0j
        return v / abs(v)

    # -- divisor-level map ----------------------------------------------------

    def raw(self, D: Divisor) -> np.ndarray:
        if not D.is_positive():
            raise DegreeMismatch("Abel-Jacobi map expects a positive divisor")
        total = np.zeros(self.curve.genus, dtype=complex)
        for p, m in D.points():
            total = total + m * self.point_integral(p)
        return total

    def map(self, D: Divisor) -> JacobianPoint:
        return reduce_mod_lattice(self.lattice, self.raw(D))


def abel_jacobi(
    c: HyperellipticCurve, P: PeriodLattice, cfg: AJConfig | None, D: Divisor
) -> JacobianPoint:
    """AJ(D) with base divisor deg(D) * r_1, reduced modulo the period lattice."""
    return AbelJacobiMap(c, P, cfg).map(D)


def aj_equal(p: JacobianPoint, q: JacobianPoint, tol: float | None = None) -> bool:
    """Equality in the Jacobian: lattice distance of the raw difference below tol."""
    if len(p.raw) != len(q.raw):
        raise DegreeMismatch("Jacobian points live over different lattices")
    tol = 1e-6 if tol is None else tol
    diff = np.asarray(p.raw) - np.asarray(q.raw)
    return lattice_distance(p.lattice, diff) <= tol


def linear_equivalence_oracle(
    c: HyperellipticCurve,
    P: PeriodLattice,
    cfg: AJConfig | None,
    D: Divisor,
    D_prime: Divisor,
) -> bool:
    """Abel's-theorem test: D ~ D' iff AJ(D) = AJ(D') modulo the lattice."""
    if D.degree != D_prime.degree:
        raise DegreeMismatch(f"degrees {D.degree} != {D_prime.degree}")
    if not (D.is_positive() and D_prime.is_positive()):
        raise DegreeMismatch("oracle expects positive divisors")
    ajmap = AbelJacobiMap(c, P, cfg)
    cfg = ajmap.cfg
    diff = ajmap.raw(D) - ajmap.raw(D_prime)
    return lattice_distance(P, diff) <= cfg.aj_tol


def fibre_dim_lower_bound(d: int, g: int) -> int:
    """Riemann-Roch bound max(d - g, 0) on the projective fibre dimension.

    Not tight for special divisors (the canonical fibre at d = 2g-2 has
    dimension g-1); the bound is documented as a lower bound only.
    """
    return max(d - g, 0)
