"""The leading-order fibre metric near the Bradlow limit.

All the geometry enters through a Hermitian Gram matrix H on the section
coefficients.  On the sphere H(a, a) = 4 pi d, after quotienting the residual
phase the kinetic form

    (eps/2) ( H(adot, adot) - |H(adot, a)|^2 / (4 pi d) )

is a constant multiple of the Fubini-Study metric on CP^k; ``verify_fs``
checks this numerically for any positive-definite H.  Quantitative Gram
matrices are computed for the canonical-bundle fibre, where the L^2 pairing
(i/2) int omega ^ conj(omega') needs no auxiliary choices: on the double
cover it reduces to 2 int x^{i-1} conj(x)^{j-1} / |F(x)| over the plane.

The 2D quadrature tiles the plane with the Voronoi cells of the branch
points clipped to a square (local polar coordinates about each branch point
absorb the integrable 1/|x - x_i| singularity exactly) plus the outside of
the square mapped through tau = 1/x, where the integrand is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Point, Polygon, box

from .curve import HyperellipticCurve
from .errors import NotPositiveDefinite, ProportionalityViolated, QuadratureNotConverged


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian positive-definite (k+1) x (k+1) matrix of section inner products."""

    matrix: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.matrix)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("Gram matrix must be square")
        herm_err = float(np.linalg.norm(H - H.conj().T))
        if herm_err > 1e-10 * max(1.0, float(np.linalg.norm(H))):
            raise NotPositiveDefinite(f"not Hermitian: deviation {herm_err:.3e}")
        eig = np.linalg.eigvalsh(0.5 * (H + H.conj().T))
        if eig[0] <= 0:
            raise NotPositiveDefinite(f"min eigenvalue {eig[0]:.3e} <= 0")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def pairing(self, b, c) -> complex:
        """H(b, c) = sum_ij b_i H_ij conj(c_j)."""
        b = np.asarray(b, dtype=complex)
        c = np.asarray(c, dtype=complex)
        return complex(b @ self.matrix @ np.conj(c))

    def to_json(self):
        return [[[z.real, z.imag] for z in row] for row in self.matrix]


@dataclass(frozen=True)
class ModuliTangent:
    """Section coefficients a (homogeneous coordinates), velocity adot, area excess."""

    a: tuple
    adot: tuple
    epsilon: float
    d: int


CONSTRAINT_TOL = 1e-9


def _check_constraint(H: GramMatrix, a, d: int) -> float:
    val = H.pairing(a, a).real
    target = 4.0 * math.pi * d
    if abs(val - target) > CONSTRAINT_TOL * max(1.0, target):
        raise ValueError(
            f"section norm H(a,a) = {val:.12g} violates the sphere constraint 4*pi*d = {target:.12g}"
        )
    return target


def normalize_to_constraint(H: GramMatrix, a, d: int):
    """Scale a so that H(a, a) = 4 pi d."""
    a = np.asarray(a, dtype=complex)
    norm = H.pairing(a, a).real
    if norm <= 0:
        raise ValueError("cannot normalise a null vector")
    return a * math.sqrt(4.0 * math.pi * d / norm)


def bradlow_check(d: int, volume: float, tol: float = 1e-9) -> str:
    """Classify 4 pi d against the surface volume: Allowed / AtLimit / Forbidden."""
    threshold = 4.0 * math.pi * d
    scale = max(1.0, abs(volume), threshold)
    if abs(volume - threshold) <= tol * scale:
        return "AtLimit"
    return "Allowed" if threshold < volume else "Forbidden"


def gauge_fixed_velocity(H: GramMatrix, a, adot):
    """Project out the residual-phase direction: adot - (H(adot,a)/4 pi d) a.

    The vortex number is read off the constraint H(a,a) = 4 pi d.
    """
    a = np.asarray(a, dtype=complex)
    adot = np.asarray(adot, dtype=complex)
    haa = H.pairing(a, a).real
    return adot - (H.pairing(adot, a) / haa) * a


def fibre_metric(H: GramMatrix, a, adot, epsilon: float, d: int) -> float:
    """(eps/2)(H(adot,adot) - |H(adot,a)|^2 / 4 pi d); nonnegative, zero iff adot in C a."""
    target = _check_constraint(H, a, d)
    hdd = H.pairing(adot, adot).real
    hda = H.pairing(adot, a)
    val = 0.5 * epsilon * (hdd - abs(hda) ** 2 / target)
    if val < 0 and -val <= 1e-12 * max(1.0, epsilon * hdd):
        return 0.0  # Cauchy-Schwarz guarantees >= 0; clip roundoff
    return val


def fubini_study(a, adot) -> float:
    """FS quadratic form in homogeneous coordinates w.r.t. the standard Hermitian product."""
    a = np.asarray(a, dtype=complex)
    adot = np.asarray(adot, dtype=complex)
    aa = float(np.vdot(a, a).real)
    dd = float(np.vdot(adot, adot).real)
    da = complex(np.vdot(a, adot))  # <adot, a> with numpy's conjugation on the first slot
    return (dd * aa - abs(da) ** 2) / (aa * aa)


def orthonormalizing_map(H: GramMatrix) -> np.ndarray:
    """Matrix T with (T b) . conj(T c) = H(b, c): T = L^T from the Cholesky H = L L^H."""
    Hm = np.asarray(H.matrix)
    Hm = 0.5 * (Hm + Hm.conj().T)
    try:
        L = np.linalg.cholesky(Hm)
    except np.linalg.LinAlgError:
        # pivoted fallback through the eigendecomposition for near-degenerate H
        eigval, eigvec = np.linalg.eigh(Hm)
        if eigval.min() <= 0:
            raise NotPositiveDefinite(f"Gram eigenvalues {eigval}")
        L = eigvec @ np.diag(np.sqrt(eigval))
    return L.T


def verify_fs(
    H: GramMatrix,
    k: int,
    d: int,
    epsilon: float = 0.01,
    trials: int = 100,
    tol: float = 1e-8,
    seed: int = 0,
) -> dict:
    """Check that the gauge-fixed fibre metric is a single multiple of Fubini-Study.

    Draws ``trials`` random constrained (a, adot) pairs, maps them to
    coordinates where H is the identity, and compares the metric against the
    FS form; the proportionality constant must be the same across all trials
    to relative spread ``tol``.  Also verifies phase invariance, invariance
    under a random unitary change of orthonormal frame, and that the gauge
    and scaling directions are exact zero modes.
    """
    if H.dim != k + 1:
        raise ValueError(f"H is {H.dim}x{H.dim} but k = {k} needs {k + 1}")
    rng = np.random.default_rng(seed)
    T = orthonormalizing_map(H)
    target = 4.0 * math.pi * d

    def sample_vector():
        return rng.standard_normal(k + 1) + 1j * rng.standard_normal(k + 1)

    ratios = []
    gauge_residual = 0.0
    scaling_residual = 0.0
    phase_residual = 0.0
    unitary_residual = 0.0
    for _ in range(trials):
        a = normalize_to_constraint(H, sample_vector(), d)
        adot = sample_vector()
        m = fibre_metric(H, a, adot, epsilon, d)
        gauge_residual = max(gauge_residual, abs(fibre_metric(H, a, 1j * a, epsilon, d)))
        scaling_residual = max(scaling_residual, abs(fibre_metric(H, a, a, epsilon, d)))
        if k == 0:
            ratios.append(0.0)
            continue
        fs = fubini_study(T @ a, T @ adot)
        if fs <= 0:
            continue
        ratios.append(m / fs)
        # phase invariance of the metric value
        phase = np.exp(0.7j)
        m_rot = fibre_metric(H, phase * a, phase * adot, epsilon, d)
        phase_residual = max(phase_residual, abs(m_rot - m) / max(1.0, abs(m)))
        # H-unitary invariance: conjugate a random unitary back through T
        Q = np.linalg.qr(
            rng.standard_normal((k + 1, k + 1)) + 1j * rng.standard_normal((k + 1, k + 1))
        )[0]
        U = np.linalg.solve(T, Q @ T)
        m_u = fibre_metric(H, U @ a, U @ adot, epsilon, d)
        unitary_residual = max(unitary_residual, abs(m_u - m) / max(1.0, abs(m)))

    if k == 0:
        report = {
            "k": k, "d": d, "epsilon": epsilon, "trials": trials, "seed": seed,
            "c_fs": 0.0, "spread": 0.0,
            "gauge_residual": gauge_residual, "scaling_residual": scaling_residual,
            "phase_residual": 0.0, "unitary_residual": 0.0, "passed": True,
        }
        if max(gauge_residual, scaling_residual) > 1e-10:
            raise ProportionalityViolated("k=0 fibre metric is not identically zero")
        return report

    ratios = np.asarray(ratios)
    c_fs = float(np.mean(ratios))
    spread = float((ratios.max() - ratios.min()) / abs(c_fs)) if c_fs else math.inf
    passed = spread <= tol and max(gauge_residual, scaling_residual) <= 1e-10
    report = {
        "k": k, "d": d, "epsilon": epsilon, "trials": trials, "seed": seed,
        "c_fs": c_fs, "spread": spread,
        "gauge_residual": gauge_residual, "scaling_residual": scaling_residual,
        "phase_residual": phase_residual, "unitary_residual": unitary_residual,
        "passed": bool(passed),
    }
    if not passed:
        raise ProportionalityViolated(
            f"spread {spread:.3e} (tol {tol:.1e}), gauge {gauge_residual:.3e}, "
            f"scaling {scaling_residual:.3e}"
        )
    return report


# -- direct 2D Gram quadrature ----------------------------------------------------


def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def _cell_quadrature(c: HyperellipticCurve, centre: complex, vertices, n: int) -> np.ndarray:
    """integral over a convex polygon of x^i conj(x)^j / |F| dA in local polar coords.

    The polygon must contain ``centre`` (a branch point) strictly inside; the
    angular range is split at the vertex directions so the radial extent is
    analytic on each piece.
    """
    g = c.genus
    verts = [complex(*v) for v in vertices]
    m = len(verts)
    edges = [(verts[i], verts[(i + 1) % m]) for i in range(m)]
    angles = sorted(math.atan2((v - centre).imag, (v - centre).real) for v in verts)
    pieces = [(angles[i], angles[i + 1]) for i in range(len(angles) - 1)]
    pieces.append((angles[-1], angles[0] + 2.0 * math.pi))

    def rho_max(phi: float) -> float:
        d = complex(math.cos(phi), math.sin(phi))
        best = math.inf
        for a, b in edges:
            e = b - a
            den = d.real * (-e.imag) - d.imag * (-e.real)
            if abs(den) < 1e-15:
                continue
            rhs = a - centre
            t = (rhs.real * (-e.imag) - rhs.imag * (-e.real)) / den
            if t > 0:
                w = centre + t * d - a
                s = (w.real * e.real + w.imag * e.imag) / (abs(e) ** 2)
                if -1e-9 <= s <= 1 + 1e-9:
                    best = min(best, t)
        return best

    xg, wg = _leggauss(n)
    xr, wr = _leggauss(n)
    H = np.zeros((g, g), dtype=complex)
    for p0, p1 in pieces:
        if p1 - p0 < 1e-14:
            continue
        phis = (p0 + p1) / 2.0 + (p1 - p0) / 2.0 * xg
        wphi = (p1 - p0) / 2.0 * wg
        rmax = np.array([rho_max(ph) for ph in phis])
        rnod = rmax[:, None] * (xr[None, :] + 1.0) / 2.0
        rwts = rmax[:, None] / 2.0 * wr[None, :]
        X = centre + rnod * np.exp(1j * phis)[:, None]
        Fv = np.abs(c.F(X))
        base = rnod / Fv * rwts * wphi[:, None]
        for i in range(g):
            for j in range(g):
                H[i, j] += np.sum(X**i * np.conj(X) ** j * base)
    return H


def _outer_quadrature(c: HyperellipticCurve, L: float, n: int) -> np.ndarray:
    """integral over the outside of the square |Re x|,|Im x| <= L through tau = 1/x.

    With N = 2g+2 the integrand becomes tau^{g-1-i} conj(tau)^{g-1-j} /
    (|lead| |prod(1 - e_k tau)|): smooth on the tau-disk.  The curved boundary
    is a radial graph with kinks only at multiples of pi/4.
    """
    g = c.genus
    lead = abs(c.leading_coeff)
    bp = c.branch_points
    xg, wg = _leggauss(n)
    xr, wr = _leggauss(n)
    H = np.zeros((g, g), dtype=complex)
    for kk in range(8):
        p0, p1 = kk * math.pi / 4.0, (kk + 1) * math.pi / 4.0
        phis = (p0 + p1) / 2.0 + (p1 - p0) / 2.0 * xg
        wphi = (p1 - p0) / 2.0 * wg
        rsq = L / np.maximum(np.abs(np.cos(phis)), np.abs(np.sin(phis)))
        rmax = 1.0 / rsq
        rnod = rmax[:, None] * (xr[None, :] + 1.0) / 2.0
        rwts = rmax[:, None] / 2.0 * wr[None, :]
        TAU = rnod * np.exp(1j * phis)[:, None]
        prod = np.ones_like(TAU)
        for e in bp:
            prod = prod * (1.0 - e * TAU)
        base = rnod / (lead * np.abs(prod)) * rwts * wphi[:, None]
        for i in range(g):
            for j in range(g):
                H[i, j] += np.sum(TAU ** (g - 1 - i) * np.conj(TAU) ** (g - 1 - j) * base)
    return H


def _halfplane_towards(e: complex, o: complex, size: float) -> Polygon:
    """A large rectangle covering the points strictly closer to e than to o."""
    u = (o - e) / abs(o - e)
    v = 1j * u
    m = (e + o) / 2.0
    corners = [m + size * v, m + size * v - 2 * size * u,
               m - size * v - 2 * size * u, m - size * v]
    return Polygon([(z.real, z.imag) for z in corners])


def _voronoi_cells(c: HyperellipticCurve, L: float):
    """(branch point, polygon vertices) per Voronoi cell clipped to the square.

    Built by direct half-plane intersection, which stays exact in the
    degenerate cocircular configurations typical of test curves.
    """
    bp = c.branch_points
    sq = box(-L, -L, L, L)
    size = 16.0 * L
    cells = []
    for e in bp:
        poly = sq
        for o in bp:
            if o == e:
                continue
            poly = poly.intersection(_halfplane_towards(e, o, size))
        if poly.geom_type != "Polygon" or poly.is_empty:
            raise QuadratureNotConverged(f"degenerate Voronoi cell at {e:.6g}")
        if not poly.contains(Point(e.real, e.imag)):
            raise QuadratureNotConverged(f"branch point {e:.6g} outside its cell")
        cells.append((e, list(poly.exterior.coords)[:-1]))
    return cells


def gram_direct(c: HyperellipticCurve, tol: float = 1e-8) -> GramMatrix:
    """Canonical-bundle Gram matrix H_ij = (i/2) int omega_i wedge conj(omega_j).

    Independent of the period computation: a genuinely two-dimensional
    quadrature of 2 x^{i-1} conj(x)^{j-1} / |F| over the plane, refined until
    doubling the per-patch order changes nothing beyond ``tol``.
    """
    L = 2.0 * max(abs(e) for e in c.branch_points)
    cells = _voronoi_cells(c, L)

    def evaluate(n: int) -> np.ndarray:
        H = np.zeros((c.genus, c.genus), dtype=complex)
        for owner, verts in cells:
            H += _cell_quadrature(c, owner, verts, n)
        H += _outer_quadrature(c, L, 2 * n)
        return 2.0 * H

    n = 12
    prev = evaluate(n)
    while n <= 96:
        n *= 2
        cur = evaluate(n)
        if np.linalg.norm(cur - prev) <= tol * max(1.0, np.linalg.norm(cur)):
            return GramMatrix(0.5 * (cur + cur.conj().T))
        prev = cur
    raise QuadratureNotConverged(f"direct Gram quadrature stalled at order {n}")
