"""Holomorphic differentials, homology cycles and the numerical period lattice.

Homology construction.  The sorted branch points e_1, ..., e_{2g+2} are paired
into g+1 cuts C_k = [e_{2k-1}, e_{2k}].  Writing I_j for the integral of a
differential over the chain segment [e_j, e_{j+1}] (branch of y pinned at the
segment midpoint to a global single-valued reference branch on the cut
complement), contour deformation gives

* a-cycle k (a loop around cut C_k):        A_k = 2 I_{2k-1},
* b-cycle k (through cuts C_k and C_{g+1}): B_k = 2 (I_{2k} + I_{2k+2} + ... + I_{2g}),

with 1-based segment indices; the cut-segment contributions inside a b-cycle
cancel pairwise between the two sides of the cut, which is why only gap
segments appear in B_k.  Each segment integral uses the Gauss-Chebyshev
substitution of :func:`vortexmoduli.quadrature.chebyshev_segment`, so the
1/sqrt endpoint behaviour of 1/y is absorbed exactly.

The reference branch is fixed by continuing y from a base point far outside
the branch set; continuation along an arbitrary polyline picks up one sign
flip per transversal cut crossing, which is corrected combinatorially.  With
this bookkeeping (a_1..a_g, b_1..b_g) is a canonically intersecting basis up
to one global orientation, pinned down in :func:`gram_from_periods` by
positive definiteness.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from .curve import HyperellipticCurve, sheet_continuation
from .errors import (
    CycleNotClosed,
    IllConditionedLattice,
    NotPositiveDefinite,
)
from .paths import build_path, count_cut_crossings
from .quadrature import chebyshev_segment


@dataclass(frozen=True)
class DifferentialBasis:
    """The g holomorphic forms x^{i-1} dx / y, stored as exponents i-1 = 0..g-1."""

    exponents: tuple

    @property
    def size(self) -> int:
        return len(self.exponents)


def differential_basis(c: HyperellipticCurve) -> DifferentialBasis:
    return DifferentialBasis(tuple(range(c.genus)))


@dataclass(frozen=True)
class Cycle:
    """One homology cycle: 'a' or 'b' kind, 1-based cut index k.

    ``cut_traversals`` lists the cuts the cycle passes through (empty for
    a-cycles, (k, g+1) for b-cycles); ``segment_terms`` is the recipe
    [(segment index, coefficient)] expressing the period through chain-segment
    integrals; ``loop`` is an explicit polyline realisation used for the
    closure check.
    """

    kind: str
    index: int
    cut_traversals: tuple
    segment_terms: tuple
    loop: tuple


@dataclass(frozen=True)
class CycleBasis:
    cycles: tuple          # 2g cycles: a_1..a_g then b_1..b_g
    cuts: tuple            # g+1 pairs of branch points
    base_point: complex    # reference branch anchor
    base_sheet: complex    # y value there (principal square root)

    @property
    def size(self) -> int:
        return len(self.cycles)


def _choose_base_point(c: HyperellipticCurve) -> complex:
    cen = c.centroid
    R = 2.5 * max(c.diameter, 1.0)
    for k in range(32):
        cand = cen + R * cmath.exp(1j * (0.37 + 2.399963229728653 * k))
        if all(abs(cand - e) > 0.5 * R for e in c.branch_points):
            return cand
    return cen + R  # unreachable for finite branch sets


def _ellipse_loop(center: complex, along: complex, semi_major: float, semi_minor: float, n=48):
    """Polyline ellipse around ``center`` with axes along/perpendicular to ``along``."""
    u = along / abs(along)
    pts = []
    for t in np.linspace(0.0, 2.0 * math.pi, n + 1):
        pts.append(center + u * (semi_major * math.cos(t)) + 1j * u * (semi_minor * math.sin(t)))
    return tuple(pts)


def _stadium_loop(chain, radius: float, n_arc=18):
    """Closed polyline at offset ``radius`` around a polyline chain."""
    pts = []
    segs = list(zip(chain[:-1], chain[1:]))
    # one side
    for a, b in segs:
        nhat = 1j * (b - a) / abs(b - a)
        pts.append(a + radius * nhat)
        pts.append(b + radius * nhat)
    # far cap around chain[-1]
    endhat = (chain[-1] - chain[-2]) / abs(chain[-1] - chain[-2])
    a0 = cmath.phase(1j * endhat)
    for t in np.linspace(0.0, math.pi, n_arc)[1:-1]:
        pts.append(chain[-1] + radius * cmath.exp(1j * (a0 - t)))
    # other side, reversed
    for a, b in reversed(segs):
        nhat = 1j * (b - a) / abs(b - a)
        pts.append(b - radius * nhat)
        pts.append(a - radius * nhat)
    # near cap back to start
    starthat = (chain[1] - chain[0]) / abs(chain[1] - chain[0])
    a1 = cmath.phase(-1j * starthat)
    for t in np.linspace(0.0, math.pi, n_arc)[1:-1]:
        pts.append(chain[0] + radius * cmath.exp(1j * (a1 - t)))
    pts.append(pts[0])
    return tuple(pts)


def build_cycles(c: HyperellipticCurve) -> CycleBasis:
    """Pair sorted branch points into cuts and assemble the 2g standard cycles.

    Closedness of every explicit loop is verified by sheet continuation;
    a failure raises CycleNotClosed.
    """
    g = c.genus
    bp = c.branch_points
    cuts = tuple((bp[2 * k], bp[2 * k + 1]) for k in range(g + 1))
    base = _choose_base_point(c)
    y_base = cmath.sqrt(complex(c.F(base)))

    min_sep = c.min_branch_separation
    cycles = []
    for k in range(1, g + 1):
        A, B = cuts[k - 1]
        center, half = (A + B) / 2.0, (B - A) / 2.0
        others = [e for e in bp if abs(e - A) > 1e-14 and abs(e - B) > 1e-14]
        gap = min(min(abs(e - A), abs(e - B)) for e in others)
        loop = _ellipse_loop(center, half, abs(half) + 0.45 * gap, 0.45 * gap)
        cycles.append(
            Cycle("a", k, (), ((2 * k - 1, 2.0),), loop)
        )
    for k in range(1, g + 1):
        chain = [bp[j] for j in range(2 * k - 1, 2 * g + 1)]
        terms = tuple((j, 2.0) for j in range(2 * k, 2 * g + 1, 2))
        radius = 0.3 * min_sep
        loop = _stadium_loop(chain, radius) if len(chain) >= 2 else ()
        cycles.append(Cycle("b", k, (k, g + 1), terms, loop))

    basis = CycleBasis(tuple(cycles), cuts, base, y_base)
    for cyc in basis.cycles:
        if not cyc.loop:
            raise CycleNotClosed(f"cycle {cyc.kind}{cyc.index} has no loop realisation")
        y_end = sheet_continuation(c, cyc.loop, _start_sheet(c, cyc.loop[0]))
        y0 = _start_sheet(c, cyc.loop[0])
        if abs(y_end - y0) > 1e-6 * max(1.0, abs(y0)):
            raise CycleNotClosed(f"cycle {cyc.kind}{cyc.index} flips sheet")
    return basis


def _start_sheet(c: HyperellipticCurve, x0: complex) -> complex:
    return cmath.sqrt(complex(c.F(x0)))


def winding_numbers(loop, points) -> list:
    """Winding number of a closed polyline around each point."""
    out = []
    for p in points:
        total = 0.0
        for a, b in zip(loop[:-1], loop[1:]):
            total += cmath.phase((b - p) / (a - p))
        out.append(round(total / (2.0 * math.pi)))
    return out


@dataclass(frozen=True)
class PeriodLattice:
    """2g x g complex matrix; row k holds the periods of omega_1..omega_g over cycle k."""

    matrix: np.ndarray
    genus: int
    condition_number: float
    meta: dict = field(default_factory=dict)

    @property
    def real_matrix(self) -> np.ndarray:
        return _realify_rows(self.matrix)

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "rows": [[[z.real, z.imag] for z in row] for row in self.matrix],
            "condition_number": self.condition_number,
            "meta": self.meta,
        }


def _realify_rows(P: np.ndarray) -> np.ndarray:
    rows, g = P.shape
    M = np.empty((rows, 2 * g))
    M[:, 0::2] = P.real
    M[:, 1::2] = P.imag
    return M


def _realify_vector(v: np.ndarray) -> np.ndarray:
    out = np.empty(2 * v.size)
    out[0::2] = np.asarray(v).real
    out[1::2] = np.asarray(v).imag
    return out


def _segment_anchor(c: HyperellipticCurve, basis: CycleBasis, j: int) -> complex:
    """Reference-branch y value at the midpoint of chain segment j (1-based).

    Continuation from the base point runs to a point offset from the midpoint
    on the left-normal side, corrected by one sign per transversal cut
    crossing; a final nearest-candidate step lands on the midpoint itself.
    """
    bp = c.branch_points
    A, B = bp[j - 1], bp[j]
    mid = (A + B) / 2.0
    nhat = 1j * (B - A) / abs(B - A)
    off = mid + 0.05 * abs(B - A) * nhat
    path = build_path(c, basis.base_point, off)
    y_off = sheet_continuation(c, path, basis.base_sheet)
    flips = count_cut_crossings(path, basis.cuts)
    y_off *= (-1) ** flips
    cand = cmath.sqrt(complex(c.F(mid)))
    return cand if abs(cand - y_off) <= abs(-cand - y_off) else -cand


def compute_periods(
    c: HyperellipticCurve,
    basis: CycleBasis | None = None,
    tol: float = 1e-10,
) -> PeriodLattice:
    """Numerical period lattice over the cycle basis.

    Every entry is a signed combination of chain-segment integrals; each
    segment is refined independently until doubling the node count changes it
    by less than ``tol``.
    """
    basis = basis or build_cycles(c)
    g = c.genus
    exps = list(range(g))
    needed = sorted({j for cyc in basis.cycles for j, _ in cyc.segment_terms})
    seg_integrals = {}
    node_counts = {}
    for j in needed:
        anchor = _segment_anchor(c, basis, j)
        seg_integrals[j], node_counts[j] = chebyshev_segment(
            c, j - 1, j, exps, anchor_y=anchor, tol=tol, with_node_count=True
        )

    rows = []
    for cyc in basis.cycles:
        row = np.zeros(g, dtype=complex)
        for j, coeff in cyc.segment_terms:
            row += coeff * seg_integrals[j]
        rows.append(row)
    P = np.array(rows)

    M = _realify_rows(P)
    cond = float(np.linalg.cond(M))
    svals = np.linalg.svd(M, compute_uv=False)
    if svals[-1] <= 1e-10 * svals[0]:
        raise IllConditionedLattice(f"realified period matrix rank-deficient: {svals}")
    meta = {
        "curve_hash": c.curve_hash(),
        "tol": tol,
        "node_counts": {str(j): node_counts[j] for j in needed},
        "base_point": [basis.base_point.real, basis.base_point.imag],
    }
    return PeriodLattice(P, g, cond, meta)


def segment_integral(
    c: HyperellipticCurve,
    i_from: int,
    i_to: int,
    exponent: int = 0,
    tol: float = 1e-10,
    anchor_y: complex | None = None,
) -> complex:
    """integral of x^k dx / y between two branch points (indices into the sorted list).

    The branch is anchored at the segment midpoint: principal square root by
    default.  This is the primitive out of which all periods are built.
    """
    vals = chebyshev_segment(c, i_from, i_to, [exponent], anchor_y=anchor_y, tol=tol)
    return complex(vals[0])


def gram_from_periods(P: PeriodLattice) -> np.ndarray:
    """Hermitian positive-definite H_ij = (i/2) integral of omega_i wedge conj(omega_j).

    Riemann bilinear relations over the canonical basis: with a-block A and
    b-block B (rows = cycles), H = (i/2) (A^T conj(B) - B^T conj(A)).  A wrong
    global b-orientation makes the result negative definite; it is flipped
    once before giving up.
    """
    g = P.genus
    A = P.matrix[:g, :]
    B = P.matrix[g:, :]

    def assemble(Bblock):
        return 0.5j * (A.T @ np.conj(Bblock) - Bblock.T @ np.conj(A))

    for Bblock in (B, -B):
        H = assemble(Bblock)
        Hh = 0.5 * (H + H.conj().T)
        eig = np.linalg.eigvalsh(Hh)
        if eig[0] > 0:
            return H
    raise NotPositiveDefinite(f"Gram eigenvalues {eig} not positive")


@dataclass(frozen=True)
class JacobianPoint:
    """A point of C^g / Lambda: fractional coordinates in [0,1)^{2g} plus the raw vector."""

    coords: tuple
    raw: tuple
    lattice: PeriodLattice

    def to_json(self) -> dict:
        return {
            "coords": list(self.coords),
            "raw": [[z.real, z.imag] for z in self.raw],
        }


def _lattice_solve(P: PeriodLattice, v: np.ndarray) -> np.ndarray:
    M = P.real_matrix.T  # columns = realified lattice generators
    if P.condition_number > 1e12:
        raise IllConditionedLattice(f"condition number {P.condition_number:.3e}")
    return np.linalg.solve(M, _realify_vector(v))


def reduce_mod_lattice(P: PeriodLattice, v) -> JacobianPoint:
    """Fractional lattice coordinates of v (in [0,1)^{2g}) plus the raw representative."""
    v = np.asarray(v, dtype=complex)
    lam = _lattice_solve(P, v)
    frac = lam - np.floor(lam)
    frac = np.where(frac >= 1.0, frac - 1.0, frac)  # guard against 1.0 - eps rounding
    return JacobianPoint(tuple(float(t) for t in frac), tuple(complex(z) for z in v), P)


@lru_cache(maxsize=8)
def _neighbour_shifts(g2: int) -> np.ndarray:
    grids = np.meshgrid(*([np.array([-1.0, 0.0, 1.0])] * g2), indexing="ij")
    return np.stack([grid.ravel() for grid in grids], axis=1)  # (3^g2, g2)


def lattice_distance(P: PeriodLattice, v) -> float:
    """Euclidean distance from v to the nearest lattice vector.

    Minimises over the 3^{2g} integer shifts neighbouring the rounded
    coordinate solution.
    """
    v = np.asarray(v, dtype=complex)
    lam = _lattice_solve(P, v)
    candidates = np.round(lam)[None, :] + _neighbour_shifts(lam.size)
    residuals = v[None, :] - candidates @ P.matrix
    return float(np.sqrt((np.abs(residuals) ** 2).sum(axis=1).min()))
