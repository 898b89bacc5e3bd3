"""Deterministic polyline paths in the x-plane.

Paths are straight segments with semicircular detours (sampled as polyline
arcs) inserted around any branch point that comes too close.  The detour
bulges on the side away from the segment midpoint, which keeps the
construction deterministic; an optional seed randomises the side choices for
path-independence experiments.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .curve import HyperellipticCurve, segment_point_distance
from .errors import PathConstructionFailed

ARC_SAMPLES = 12


def _detour_arc(e: complex, p_in: complex, p_out: complex, side: int):
    """Polyline samples of the circular arc around e from p_in to p_out.

    ``side`` +1 walks counterclockwise, -1 clockwise.
    """
    r = abs(p_in - e)
    a0 = cmath.phase(p_in - e)
    a1 = cmath.phase(p_out - e)
    delta = (a1 - a0) % (2 * math.pi)
    if side < 0:
        delta = delta - 2 * math.pi
    ts = np.linspace(0.0, 1.0, ARC_SAMPLES + 1)[1:-1]
    return [e + r * cmath.exp(1j * (a0 + delta * t)) for t in ts]


def _detour_segment(a: complex, b: complex, branch_points, radius: float, rng=None):
    """Waypoints from a to b avoiding each branch point by ~radius."""
    ab = b - a
    L = abs(ab)
    if L == 0:
        return [a]
    mid = (a + b) / 2.0
    offenders = []
    for e in branch_points:
        if abs(e - a) < 1e-15 or abs(e - b) < 1e-15:
            continue
        d = segment_point_distance(a, b, e)
        if d < radius:
            t = ((e - a).real * ab.real + (e - a).imag * ab.imag) / (L * L)
            offenders.append((t, e))
    offenders.sort(key=lambda item: item[0])

    pts = [a]
    for t, e in offenders:
        # entry/exit: intersections of the segment with the circle |x - e| = radius
        # solve |a + s ab - e|^2 = radius^2
        w = a - e
        A = L * L
        B = 2 * (w.real * ab.real + w.imag * ab.imag)
        C = abs(w) ** 2 - radius * radius
        disc = B * B - 4 * A * C
        if disc <= 0:
            continue  # grazing; leave the straight segment in place
        s1 = (-B - math.sqrt(disc)) / (2 * A)
        s2 = (-B + math.sqrt(disc)) / (2 * A)
        if not (0.0 < s1 and s2 < 1.0):
            continue  # an endpoint sits inside the disk; keep the segment straight
        p_in = a + s1 * ab
        p_out = a + s2 * ab
        # bulge away from the midpoint-to-branch-point direction
        nhat = 1j * ab / L
        toward = (e - mid).real * nhat.real + (e - mid).imag * nhat.imag
        side = -1 if toward > 0 else 1
        if rng is not None:
            side = 1 if rng.random() < 0.5 else -1
        pts.append(p_in)
        pts.extend(_detour_arc(e, p_in, p_out, side))
        pts.append(p_out)
    pts.append(b)
    return pts


def build_path(
    c: HyperellipticCurve,
    a: complex,
    b: complex,
    radius: float | None = None,
    seed: int | None = None,
):
    """Polyline from a to b with detours; endpoints may sit on branch points.

    The detour radius defaults to the smaller of 5% of the branch diameter and
    45% of the minimal branch separation, so arcs around one branch point
    cannot collide with another.
    """
    if radius is None:
        radius = min(0.05 * c.diameter, 0.45 * c.min_branch_separation)
    if radius <= 0:
        raise PathConstructionFailed("nonpositive detour radius")
    rng = np.random.default_rng(seed) if seed is not None else None
    return _detour_segment(complex(a), complex(b), c.branch_points, radius, rng)


def proper_crossing(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    """True iff open segments (p1,p2) and (q1,q2) cross transversally."""

    def orient(a, b, cc):
        v = (b.real - a.real) * (cc.imag - a.imag) - (b.imag - a.imag) * (cc.real - a.real)
        if v > 0:
            return 1
        if v < 0:
            return -1
        return 0

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def count_cut_crossings(polyline, cuts) -> int:
    """Number of transversal crossings of a polyline with a list of cut segments."""
    n = 0
    for a, b in zip(polyline[:-1], polyline[1:]):
        for qa, qb in cuts:
            if proper_crossing(a, b, qa, qb):
                n += 1
    return n
