"""Connected components of the involution's fixed locus in Sym^d and their fibres.

A component is labelled by a bitvector b over the 2g+2 ramification points
together with k = (d - sum b)/2 >= 0; it consists of the divisors
D' + sigma(D') + sum b_i r_i with deg D' = k and is a copy of CP^k.  The
partition of labels into Abel-Jacobi fibres is decided combinatorially and
cross-validated against the numerical oracle on representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .abeljacobi import AbelJacobiMap, AJConfig
from .curve import HyperellipticCurve, SurfacePoint
from .divisor import Divisor, decide_label_equivalence, sigma_pushforward
from .errors import DegreeMismatch, OracleDisagreement, ParityViolation
from .periods import PeriodLattice, lattice_distance


@dataclass(frozen=True)
class ComponentLabel:
    """b in {0,1}^{2g+2} and k with 2k + sum(b) = d; the component is a CP^k."""

    b: tuple
    k: int
    d: int

    def __post_init__(self):
        if any(x not in (0, 1) for x in self.b):
            raise ParityViolation("label bits must be 0 or 1")
        if 2 * self.k + sum(self.b) != self.d:
            raise ParityViolation(f"2k + sum(b) = {2 * self.k + sum(self.b)} != d = {self.d}")


def enumerate_components(g: int, d: int) -> list:
    """All labels with d - sum(b) even and nonnegative, sorted deterministically.

    The count for fixed k is C(2g+2, d-2k); the total is the sum over k.
    """
    n = 2 * g + 2
    labels = []
    for k in range(d // 2 + 1):
        weight = d - 2 * k
        if weight < 0 or weight > n:
            continue
        for support in combinations(range(n), weight):
            bits = tuple(1 if i in support else 0 for i in range(n))
            labels.append(ComponentLabel(bits, k, d))
    labels.sort(key=lambda lab: (lab.k, lab.b), reverse=False)
    return labels


def component_dimension(label: ComponentLabel) -> int:
    """The component is isomorphic to CP^k."""
    return label.k


def random_symmetric_part(
    c: HyperellipticCurve, k: int, rng: np.random.Generator
) -> Divisor:
    """A random positive divisor D' of degree k, sampled away from branch points.

    x is drawn uniformly on a disk covering the branch set; the sheet sign is
    a fair coin.  Rejection keeps points at least a tenth of the minimal
    branch separation away from every branch point.
    """
    cen = c.centroid
    radius = 1.2 * max(abs(e - cen) for e in c.branch_points)
    guard = 0.1 * c.min_branch_separation
    D = Divisor.for_curve(c)
    count = 0
    while count < k:
        z = cen + radius * math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())
        if min(abs(z - e) for e in c.branch_points) < guard:
            continue
        p, q = c.points_over(complex(z))
        D.add_point(p if rng.random() < 0.5 else q, 1)
        count += 1
    return D


def representative_divisor(
    c: HyperellipticCurve, label: ComponentLabel, D_prime: Divisor
) -> Divisor:
    """D' + sigma(D') + sum b_i r_i: a sigma-fixed positive divisor of degree d."""
    if D_prime.degree != label.k:
        raise DegreeMismatch(f"deg D' = {D_prime.degree} != k = {label.k}")
    D = D_prime + sigma_pushforward(c, D_prime)
    for i, bit in enumerate(label.b):
        if bit:
            D.add_point(c.ramification_point(i), 1)
    return D


@dataclass(frozen=True)
class FibrePartition:
    labels: tuple
    classes: tuple     # tuple of tuples of label indices
    checks: dict

    def class_of(self, idx: int) -> int:
        for ci, cls in enumerate(self.classes):
            if idx in cls:
                return ci
        raise IndexError(idx)

    def to_json(self) -> dict:
        return {
            "labels": [{"b": list(lab.b), "k": lab.k, "d": lab.d} for lab in self.labels],
            "partition": [list(cls) for cls in self.classes],
            "checks": self.checks,
        }


def classify_fibres(
    c: HyperellipticCurve,
    P: PeriodLattice,
    cfg: AJConfig | None,
    labels,
    seed: int = 7,
) -> FibrePartition:
    """Partition labels into Abel-Jacobi fibres.

    The partition itself comes from the combinatorial decision; every pair is
    cross-validated against the numerical oracle on representatives, and any
    disagreement is fatal.  For merged pairs with b != b' the dimension
    identity k + k' = d - g - 1 is verified on the spot.
    """
    labels = list(labels)
    if not labels:
        return FibrePartition((), (), {"pairs": 0, "agreements": 0, "k_sum_identity": True})
    g = c.genus
    d = labels[0].d
    ajmap = AbelJacobiMap(c, P, cfg)
    cfg = ajmap.cfg
    rng = np.random.default_rng(seed)

    raws = []
    for lab in labels:
        D = representative_divisor(c, lab, random_symmetric_part(c, lab.k, rng))
        raws.append(ajmap.raw(D))

    n = len(labels)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    agreements = 0
    k_sum_ok = True
    for i in range(n):
        for j in range(i + 1, n):
            comb = decide_label_equivalence(g, labels[i].b, labels[j].b, d).equivalent
            orac = lattice_distance(P, raws[i] - raws[j]) <= cfg.aj_tol
            if comb != orac:
                raise OracleDisagreement(
                    f"labels {labels[i].b} / {labels[j].b}: "
                    f"combinatorial={comb} oracle={orac}"
                )
            agreements += 1
            if comb:
                if labels[i].b != labels[j].b and labels[i].k + labels[j].k != d - g - 1:
                    k_sum_ok = False
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(sorted(v)) for v in sorted(groups.values()))
    checks = {"pairs": n * (n - 1) // 2, "agreements": agreements, "k_sum_identity": k_sum_ok}
    return FibrePartition(tuple(labels), classes, checks)


def canonical_component_check(
    c: HyperellipticCurve, P: PeriodLattice, cfg: AJConfig | None = None
) -> dict:
    """Checks on the canonical fibre at d = 2g-2.

    (i) the divisor of dx/y equals (g-1)(s1 + s2), assembled from the divisor
    arithmetic of dx and y; (ii) the divisors of all g basis forms
    x^i dx / y are Abel-Jacobi equal.  Returns a report with the distances.
    """
    from .divisor import canonical_divisor, divisor_of_y, holomorphic_form_divisor

    g = c.genus
    form0 = canonical_divisor(c) - divisor_of_y(c)
    s1 = SurfacePoint.infinite(+1)
    s2 = SurfacePoint.infinite(-1)
    expected = Divisor.for_curve(c, [(s1, g - 1), (s2, g - 1)])
    divisor_ok = form0.equals(expected) and form0.equals(holomorphic_form_divisor(c, 0))

    ajmap = AbelJacobiMap(c, P, cfg)
    cfg = ajmap.cfg
    raw0 = ajmap.raw(holomorphic_form_divisor(c, 0))
    distances = []
    for i in range(g):
        raw_i = ajmap.raw(holomorphic_form_divisor(c, i))
        distances.append(lattice_distance(P, raw_i - raw0))
    aj_ok = all(dist <= cfg.aj_tol for dist in distances)
    return {
        "divisor_of_dx_over_y_matches": divisor_ok,
        "aj_distances": distances,
        "aj_equal": aj_ok,
        "passed": divisor_ok and aj_ok,
    }
