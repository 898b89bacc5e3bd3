"""Divisors: integer formal sums of surface points.

Implements the explicit principal divisors of the meromorphic functions x, y
and the forms dx, x^i dx / y, the divisor of a general rational expression
P(x) y^e / Q(x) y^f, and the purely combinatorial linear-equivalence decision
for fixed-locus component labels, including an explicit witness function for
every equivalent pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import (
    HyperellipticCurve,
    SurfacePoint,
    points_close,
    _sorted_roots,
)
from .errors import DegreeNonzero, IndexOutOfRange, ParityViolation


class Divisor:
    """Formal integer combination of surface points.

    Point keys are merged under the curve's point tolerance, so supports
    coming from independent root-finding runs combine correctly.
    """

    def __init__(self, entries=None, point_tol: float = 1e-8, scale: float = 1.0):
        self.point_tol = point_tol
        self.scale = scale
        self._entries: list = []  # list of [SurfacePoint, int]
        for p, m in entries or []:
            self.add_point(p, m)

    @staticmethod
    def for_curve(c: HyperellipticCurve, entries=None) -> "Divisor":
        return Divisor(entries, point_tol=c.tol.point_tol, scale=c.diameter)

    def add_point(self, p: SurfacePoint, mult: int = 1) -> None:
        if mult == 0:
            return
        for entry in self._entries:
            if points_close(entry[0], p, self.point_tol, self.scale):
                entry[1] += mult
                if entry[1] == 0:
                    self._entries.remove(entry)
                return
        self._entries.append([p, int(mult)])

    def points(self):
        """Yield (point, multiplicity) pairs, multiplicities nonzero."""
        return [(p, m) for p, m in self._entries]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self._entries)

    def multiplicity(self, p: SurfacePoint) -> int:
        for q, m in self._entries:
            if points_close(q, p, self.point_tol, self.scale):
                return m
        return 0

    def is_positive(self) -> bool:
        """Effective: every multiplicity positive (vacuously true for the zero divisor)."""
        return all(m > 0 for _, m in self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def __add__(self, other: "Divisor") -> "Divisor":
        out = Divisor(self._entries, self.point_tol, self.scale)
        for p, m in other._entries:
            out.add_point(p, m)
        return out

    def __neg__(self) -> "Divisor":
        return Divisor([(p, -m) for p, m in self._entries], self.point_tol, self.scale)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor([(p, k * m) for p, m in self._entries], self.point_tol, self.scale)

    def __repr__(self) -> str:
        if not self._entries:
            return "Divisor(0)"
        terms = " + ".join(f"{m}*{p!r}" for p, m in self._entries)
        return f"Divisor({terms})"

    def equals(self, other: "Divisor") -> bool:
        """Point-set equality with multiplicities, under the point tolerance."""
        return (self - other).is_zero()

    def to_json(self):
        out = []
        for p, m in sorted(
            self._entries,
            key=lambda e: (e[0].is_infinite, e[0].sheet, 0.0 if e[0].is_infinite else e[0].x.real,
                           0.0 if e[0].is_infinite else e[0].x.imag),
        ):
            if p.is_infinite:
                out.append({"point": {"inf": p.sheet}, "mult": m})
            else:
                out.append({"point": {"x": [p.x.real, p.x.imag], "y": [p.y.real, p.y.imag]},
                            "mult": m})
        return out


def degree(D: Divisor) -> int:
    return D.degree


def add(D: Divisor, E: Divisor) -> Divisor:
    return D + E


def negate(D: Divisor) -> Divisor:
    return -D


def is_positive(D: Divisor) -> bool:
    return D.is_positive()


def sigma_pushforward(c: HyperellipticCurve, D: Divisor) -> Divisor:
    """sum a_i p_i -> sum a_i sigma(p_i), multiplicities preserved."""
    out = Divisor.for_curve(c)
    for p, m in D.points():
        c.require_on_curve(p)
        if p.is_infinite:
            out.add_point(SurfacePoint.infinite(-p.sheet), m)
        else:
            out.add_point(SurfacePoint.finite(p.x, -p.y), m)
    return out


# -- the named principal divisors ----------------------------------------------


def infinite_pair(c: HyperellipticCurve) -> tuple:
    return SurfacePoint.infinite(+1), SurfacePoint.infinite(-1)


def divisor_of_x(c: HyperellipticCurve) -> Divisor:
    """(x) = t1 + t2 - s1 - s2, with t1, t2 the two points over x = 0."""
    t1, t2 = c.points_over(0.0)
    s1, s2 = infinite_pair(c)
    return Divisor.for_curve(c, [(t1, 1), (t2, 1), (s1, -1), (s2, -1)])


def divisor_of_y(c: HyperellipticCurve) -> Divisor:
    """(y) = r_1 + ... + r_{2g+2} - (g+1) s1 - (g+1) s2."""
    g = c.genus
    s1, s2 = infinite_pair(c)
    entries = [(c.ramification_point(i), 1) for i in range(2 * g + 2)]
    entries += [(s1, -(g + 1)), (s2, -(g + 1))]
    return Divisor.for_curve(c, entries)


def canonical_divisor(c: HyperellipticCurve) -> Divisor:
    """(dx) = r_1 + ... + r_{2g+2} - 2 s1 - 2 s2, of degree 2g - 2."""
    g = c.genus
    s1, s2 = infinite_pair(c)
    entries = [(c.ramification_point(i), 1) for i in range(2 * g + 2)]
    entries += [(s1, -2), (s2, -2)]
    return Divisor.for_curve(c, entries)


def holomorphic_form_divisor(c: HyperellipticCurve, i: int) -> Divisor:
    """(x^i dx / y) = (g-i-1)(s1 + s2) + i (t1 + t2), positive of degree 2g - 2."""
    g = c.genus
    if not 0 <= i <= g - 1:
        raise IndexOutOfRange(f"form index {i} outside 0..{g - 1}")
    s1, s2 = infinite_pair(c)
    t1, t2 = c.points_over(0.0)
    return Divisor.for_curve(
        c, [(s1, g - i - 1), (s2, g - i - 1), (t1, i), (t2, i)]
    )


# -- rational expressions --------------------------------------------------------


@dataclass(frozen=True)
class RationalExpr:
    """P(x) y^e / (Q(x) y^f) with e, f in {0, 1}; coefficients lowest-first."""

    num_coeffs: tuple
    den_coeffs: tuple = (1.0,)
    num_y: int = 0
    den_y: int = 0

    def __post_init__(self):
        if self.num_y not in (0, 1) or self.den_y not in (0, 1):
            raise ValueError("y exponents must be 0 or 1")
        if not any(abs(complex(z)) > 0 for z in self.den_coeffs):
            raise ValueError("denominator is identically zero")

    @staticmethod
    def x_poly(coeffs) -> "RationalExpr":
        return RationalExpr(tuple(complex(z) for z in coeffs))

    @staticmethod
    def x_minus(a: complex) -> "RationalExpr":
        return RationalExpr((-complex(a), 1.0))

    @staticmethod
    def y_over(den_coeffs) -> "RationalExpr":
        return RationalExpr((1.0,), tuple(complex(z) for z in den_coeffs), num_y=1)

    def describe(self) -> str:
        def poly_str(cs):
            terms = []
            for k, z in enumerate(cs):
                if z == 0:
                    continue
                terms.append(f"({z:.6g})" + ("" if k == 0 else f"*x^{k}"))
            return " + ".join(terms) or "0"

        num = poly_str(self.num_coeffs) + (" * y" if self.num_y else "")
        den = poly_str(self.den_coeffs) + (" * y" if self.den_y else "")
        return f"[{num}] / [{den}]"


def _poly_root_divisor(c: HyperellipticCurve, coeffs) -> Divisor:
    """Divisor on the curve of a polynomial in x, as a meromorphic function.

    Each root z contributes its fibre (two points, or a ramification point
    doubled); the poles sit at the two infinite points, deg P each.
    """
    cs = np.asarray([complex(z) for z in coeffs])
    scale = float(np.max(np.abs(cs))) or 1.0
    deg = cs.size - 1
    while deg > 0 and abs(cs[deg]) <= 1e-13 * scale:
        deg -= 1
    cs = cs[: deg + 1]
    out = Divisor.for_curve(c)
    if deg == 0:
        return out
    roots = _sorted_roots(cs)
    # cluster numerically equal roots into multiplicities
    merge = c.tol.point_tol * max(1.0, c.diameter)
    clustered: list = []
    for z in roots:
        for entry in clustered:
            if abs(entry[0] - z) <= merge:
                entry[1] += 1
                break
        else:
            clustered.append([complex(z), 1])
    s1, s2 = infinite_pair(c)
    for z, mult in clustered:
        p, q = c.points_over(z)
        if points_close(p, q, c.tol.point_tol, c.diameter):
            out.add_point(p, 2 * mult)  # fibre over a branch point
        else:
            out.add_point(p, mult)
            out.add_point(q, mult)
    out.add_point(s1, -deg)
    out.add_point(s2, -deg)
    return out


def divisor_of_rational(c: HyperellipticCurve, e: RationalExpr) -> Divisor:
    """Zeros and poles of P(x) y^a / (Q(x) y^b), with multiplicity.

    Assembled from the root fibres of P and Q and the known divisor of y;
    the result must have total degree 0 or DegreeNonzero is raised.
    """
    D = _poly_root_divisor(c, e.num_coeffs) - _poly_root_divisor(c, e.den_coeffs)
    ynet = e.num_y - e.den_y
    if ynet:
        D = D + ynet * divisor_of_y(c)
    if D.degree != 0:
        raise DegreeNonzero(f"rational divisor has degree {D.degree}")
    return D


# -- combinatorial equivalence of fixed-locus labels ------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    witness: RationalExpr | None = None


def _validate_label(g: int, b, d: int) -> None:
    if len(b) != 2 * g + 2 or any(x not in (0, 1) for x in b):
        raise ParityViolation(f"label must be a bitvector of length {2 * g + 2}")
    rem = d - sum(b)
    if rem < 0 or rem % 2:
        raise ParityViolation(f"d - sum(b) = {rem} must be even and >= 0")


def decide_label_equivalence(g: int, b, b_prime, d: int, curve: HyperellipticCurve | None = None):
    """Decide linear equivalence of two sigma-fixed component labels.

    Cancel indices where both labels carry a ramification point; the classes
    are equivalent iff nothing is left or the remaining supports partition all
    2g+2 indices.  For equivalent pairs with b != b', the witness function
    y / prod_{i in supp(b')} (x - x_i) is returned (its divisor is exactly the
    difference of the two canonical representatives padded with s1-points).
    """
    b = tuple(int(x) for x in b)
    bp = tuple(int(x) for x in b_prime)
    _validate_label(g, b, d)
    _validate_label(g, bp, d)

    reduced_b = tuple(x and not y for x, y in zip(b, bp))
    reduced_bp = tuple(y and not x for x, y in zip(b, bp))
    total = sum(reduced_b) + sum(reduced_bp)

    if b == bp:
        return EquivalenceVerdict(True, None)
    if total != 2 * g + 2:
        return EquivalenceVerdict(False, None)

    witness = None
    if curve is not None:
        supp_bp = [i for i, x in enumerate(reduced_bp) if x]
        den = np.array([1.0 + 0j])
        for i in supp_bp:
            den = np.polynomial.polynomial.polymul(
                den, np.array([-curve.branch_points[i], 1.0])
            )
        witness = RationalExpr((1.0,), tuple(den), num_y=1)
    return EquivalenceVerdict(True, witness)


def witness_matches_difference(
    c: HyperellipticCurve, b, b_prime, d: int
) -> bool:
    """Check (witness) == rep(b) - rep(b') for the canonical s1-padded representatives.

    Representatives use D' = k * s1, so D' + sigma(D') = k (s1 + s2); the
    label difference then reduces to ramification points plus an s-point
    balance that the witness function reproduces exactly.
    """
    g = c.genus
    verdict = decide_label_equivalence(g, b, b_prime, d, curve=c)
    if not verdict.equivalent:
        raise ValueError("labels are inequivalent; no witness exists")
    if verdict.witness is None:
        return True  # b == b': the witness is the constant function
    s1, s2 = infinite_pair(c)
    k = (d - sum(b)) // 2
    k_p = (d - sum(b_prime)) // 2

    def representative(bits, kk):
        D = Divisor.for_curve(c, [(s1, kk), (s2, kk)])
        for i, bit in enumerate(bits):
            if bit:
                D.add_point(c.ramification_point(i), 1)
        return D

    diff = representative(b, k) - representative(b_prime, k_p)
    return divisor_of_rational(c, verdict.witness).equals(diff)
