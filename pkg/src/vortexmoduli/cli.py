"""Command-line interface.

Subcommands mirror the library surface: curve-info, periods, aj, equiv,
fixed-locus, gram, fibre-metric, scatter.  Output is deterministic JSON (or
CSV/SVG for trajectories), stamped with the package version and a hash of the
curve coefficients; all randomness is seeded.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .abeljacobi import AbelJacobiMap, AJConfig, linear_equivalence_oracle
from .bradlowmetric import GramMatrix, gram_direct, verify_fs
from .curve import HyperellipticCurve, SurfacePoint, curve_from_json
from .divisor import Divisor, decide_label_equivalence
from .errors import ConfigInvalid, VortexModuliError
from .fixedlocus import classify_fibres, enumerate_components
from .periods import build_cycles, compute_periods, gram_from_periods, lattice_distance
from .scattering import linear_preset, PairPath, scattering_angle, simulate


def _load_curve(path: str) -> HyperellipticCurve:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read curve file {path}: {exc}") from exc
    return curve_from_json(data)


def _dump(payload: dict, curve: HyperellipticCurve | None, out: str | None) -> None:
    payload = {"version": __version__, **payload}
    if curve is not None:
        payload["curve_hash"] = curve.curve_hash()
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON-serialisable: {type(obj)}")


def _parse_divisor(c: HyperellipticCurve, text: str) -> Divisor:
    """Divisor JSON: [{"point": {...}, "mult": n}, ...].

    Point forms: {"inf": +-1}, {"x": [re,im], "y": [re,im]},
    {"branch": i} for the i-th ramification point (0-based), or
    {"over": [re,im], "sheet": +-1} for a point above x with the principal
    (+1) or negated (-1) square root.
    """
    try:
        items = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"divisor is not valid JSON: {exc}") from exc
    D = Divisor.for_curve(c)
    try:
        for item in items:
            spec = item["point"]
            mult = int(item.get("mult", 1))
            if "inf" in spec:
                p = SurfacePoint.infinite(int(spec["inf"]))
            elif "branch" in spec:
                p = c.ramification_point(int(spec["branch"]))
            elif "over" in spec:
                x = complex(*spec["over"])
                plus, minus = c.points_over(x)
                p = plus if int(spec.get("sheet", 1)) >= 0 else minus
            else:
                p = SurfacePoint.finite(complex(*spec["x"]), complex(*spec["y"]))
            c.require_on_curve(p)
            D.add_point(p, mult)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigInvalid(f"bad divisor entry: {exc}") from exc
    return D


def _curve_option(fn):
    return click.option("--curve", "curve_path", required=True,
                        type=click.Path(exists=True, dir_okay=False),
                        help="curve spec JSON file")(fn)


def _out_option(fn):
    return click.option("--out", "out", default=None, type=click.Path(dir_okay=False),
                        help="output file (default: stdout)")(fn)


@click.group()
@click.version_option(version=__version__)
def main():
    """Vortex-moduli computations on hyperelliptic curves."""


@main.command("curve-info")
@_curve_option
@_out_option
def cmd_curve_info(curve_path, out):
    """Genus, branch points and validation summary."""
    c = _load_curve(curve_path)
    payload = {
        "genus": c.genus,
        "degree": c.degree,
        "branch_points": [[e.real, e.imag] for e in c.branch_points],
        "leading_coeff": c.leading_coeff,
        "diameter": c.diameter,
        "min_branch_separation": c.min_branch_separation,
    }
    _dump(payload, c, out)


@main.command("periods")
@_curve_option
@_out_option
@click.option("--tol", default=1e-10, show_default=True, help="quadrature tolerance")
def cmd_periods(curve_path, out, tol):
    """Numerical period lattice over the standard cycle basis."""
    c = _load_curve(curve_path)
    P = compute_periods(c, build_cycles(c), tol=tol)
    _dump({"lattice": P.to_json()}, c, out)


@main.command("aj")
@_curve_option
@_out_option
@click.option("--divisor", "divisor_text", required=True, help="divisor JSON")
@click.option("--compare-to", "compare_text", default=None, help="optional second divisor JSON")
@click.option("--aj-tol", default=1e-6, show_default=True)
def cmd_aj(curve_path, out, divisor_text, compare_text, aj_tol):
    """Abel-Jacobi image of a positive divisor."""
    c = _load_curve(curve_path)
    P = compute_periods(c)
    cfg = AJConfig(aj_tol=aj_tol)
    ajmap = AbelJacobiMap(c, P, cfg)
    D = _parse_divisor(c, divisor_text)
    point = ajmap.map(D)
    payload = {"divisor": D.to_json(), "jacobian_point": point.to_json(), "aj_tol": aj_tol}
    if compare_text:
        E = _parse_divisor(c, compare_text)
        other = ajmap.map(E)
        dist = lattice_distance(P, np.asarray(point.raw) - np.asarray(other.raw))
        payload["lattice_distance_to"] = dist
    _dump(payload, c, out)


@main.command("equiv")
@_curve_option
@_out_option
@click.option("--divisor", "divisor_text", required=True, help="first divisor JSON")
@click.option("--divisor2", "divisor2_text", required=True, help="second divisor JSON")
@click.option("--aj-tol", default=1e-6, show_default=True)
def cmd_equiv(curve_path, out, divisor_text, divisor2_text, aj_tol):
    """Linear equivalence: numerical oracle, plus the combinatorial fast path
    when both divisors are sums of ramification points."""
    c = _load_curve(curve_path)
    D = _parse_divisor(c, divisor_text)
    E = _parse_divisor(c, divisor2_text)
    P = compute_periods(c)
    oracle = linear_equivalence_oracle(c, P, AJConfig(aj_tol=aj_tol), D, E)

    fast = None
    bits = _ramification_bits(c, D), _ramification_bits(c, E)
    if bits[0] is not None and bits[1] is not None:
        verdict = decide_label_equivalence(c.genus, bits[0], bits[1], D.degree)
        fast = "Equivalent" if verdict.equivalent else "Inequivalent"
    payload = {"oracle": oracle, "fast_path": fast}
    if fast is not None:
        payload["agreement"] = (fast == "Equivalent") == oracle
    _dump(payload, c, out)


def _ramification_bits(c: HyperellipticCurve, D: Divisor):
    """Bitvector if D is a multiplicity-one sum of ramification points, else None."""
    bits = [0] * len(c.branch_points)
    for p, m in D.points():
        if p.is_infinite or m != 1:
            return None
        placed = False
        for i in range(len(c.branch_points)):
            from .curve import points_close

            if points_close(p, c.ramification_point(i), c.tol.point_tol, c.diameter):
                bits[i] = 1
                placed = True
                break
        if not placed:
            return None
    return tuple(bits)


@main.command("fixed-locus")
@_curve_option
@_out_option
@click.option("-d", "--vortex-number", "d", required=True, type=int)
@click.option("--seed", default=7, show_default=True)
@click.option("--aj-tol", default=1e-6, show_default=True)
def cmd_fixed_locus(curve_path, out, d, seed, aj_tol):
    """Enumerate fixed-locus components and partition them into fibres."""
    c = _load_curve(curve_path)
    labels = enumerate_components(c.genus, d)
    P = compute_periods(c)
    partition = classify_fibres(c, P, AJConfig(aj_tol=aj_tol), labels, seed=seed)
    _dump({"d": d, "seed": seed, **partition.to_json()}, c, out)


@main.command("gram")
@_curve_option
@_out_option
@click.option("--tol", default=1e-8, show_default=True)
def cmd_gram(curve_path, out, tol):
    """Canonical-fibre Gram matrix by both methods plus their distance."""
    c = _load_curve(curve_path)
    P = compute_periods(c)
    H_periods = gram_from_periods(P)
    H_direct = gram_direct(c, tol=tol)
    dist = float(np.linalg.norm(H_direct.matrix - H_periods) / np.linalg.norm(H_periods))
    payload = {
        "gram_from_periods": GramMatrix(H_periods).to_json(),
        "gram_direct": H_direct.to_json(),
        "relative_frobenius_distance": dist,
    }
    _dump(payload, c, out)


@main.command("fibre-metric")
@_out_option
@click.option("--curve", "curve_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="curve file: use the canonical-fibre Gram matrix (k = g-1, d = 2g-2)")
@click.option("-k", "--fibre-dim", "k", default=None, type=int,
              help="synthetic positive-definite Gram of size k+1")
@click.option("--trials", default=100, show_default=True)
@click.option("--epsilon", default=0.01, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tol", default=1e-8, show_default=True)
def cmd_fibre_metric(out, curve_path, k, trials, epsilon, seed, tol):
    """Verify the Fubini-Study proportionality of the fibre metric."""
    if curve_path is None and k is None:
        raise ConfigInvalid("provide --curve or -k")
    if curve_path is not None:
        c = _load_curve(curve_path)
        H = gram_direct(c)
        k_eff = c.genus - 1
        d = 2 * c.genus - 2
    else:
        c = None
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((k + 1, k + 1)) + 1j * rng.standard_normal((k + 1, k + 1))
        H = GramMatrix(A @ A.conj().T + (k + 1) * np.eye(k + 1))
        k_eff, d = k, max(k, 1)
    report = verify_fs(H, k_eff, d, epsilon=epsilon, trials=trials, tol=tol, seed=seed)
    _dump({"report": report, "gram": H.to_json()}, c, out)


@main.command("scatter")
@_curve_option
@_out_option
@click.option("--input", "input_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON with lambda_path {ts, lam1, lam2} as [re,im] lists")
@click.option("--preset-branch", default=None, type=int,
              help="linear path through the given branch point index")
@click.option("--velocity", nargs=2, type=float, default=(1.0, 0.4),
              show_default=True, help="preset velocity (re, im)")
@click.option("--samples", default=2001, show_default=True)
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["csv", "json", "svg"]))
def cmd_scatter(curve_path, out, input_path, preset_branch, velocity, samples, fmt):
    """Simulate a symmetric vortex pair; emit trajectory and events."""
    c = _load_curve(curve_path)
    if input_path is not None:
        with open(input_path) as fh:
            data = json.load(fh)
        try:
            lp = data["lambda_path"]
            ts = np.asarray(lp["ts"], dtype=float)
            lam1 = np.asarray([complex(re, im) for re, im in lp["lam1"]])
            lam2 = np.asarray([complex(re, im) for re, im in lp["lam2"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"bad lambda_path: {exc}") from exc
        path = PairPath(ts, lam1, lam2)
    elif preset_branch is not None:
        path = linear_preset(c, preset_branch, complex(*velocity), samples=samples)
    else:
        raise ConfigInvalid("provide --input or --preset-branch")

    traj = simulate(c, path)
    reports = []
    for event in traj.events:
        try:
            rep = scattering_angle(c, traj, event)
            reports.append({
                "t_star": event.t_star,
                "branch_index": event.branch_index,
                "w_distance": event.w_distance,
                "angle": rep.angle,
                "orientation": rep.orientation,
                "c_fitted": rep.c_fitted,
                "c_analytic": rep.c_analytic,
            })
        except VortexModuliError:
            reports.append({
                "t_star": event.t_star,
                "branch_index": event.branch_index,
                "w_distance": event.w_distance,
                "angle": None,
            })

    if fmt == "json":
        _dump({"events": reports, "samples": len(path.ts)}, c, out)
        return
    if fmt == "csv":
        lines = ["t,re_x,im_x,re_y,im_y,sheet,event"]
        flagged = {e.sample_index for e in traj.events}
        for i, t in enumerate(path.ts):
            x, y = traj.xi[i], traj.y1[i]
            principal = complex(np.sqrt(complex(c.F(x)))) if not np.isnan(x.real) else 0j
            sheet = 1 if abs(y - principal) <= abs(y + principal) else -1
            lines.append(f"{t:.12g},{x.real:.12g},{x.imag:.12g},"
                         f"{y.real:.12g},{y.imag:.12g},{sheet},{1 if i in flagged else 0}")
        text = "\n".join(lines) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
        return
    svg = _trajectory_svg(c, traj)
    if out:
        with open(out, "w") as fh:
            fh.write(svg)
    else:
        click.echo(svg, nl=False)


def _trajectory_svg(c: HyperellipticCurve, traj) -> str:
    """x-plane picture: branch points as crosses, trajectory polyline, event markers."""
    xs = [z for z in traj.xi if not np.isnan(z.real)]
    pts = xs + list(c.branch_points)
    res = [p.real for p in pts]
    ims = [p.imag for p in pts]
    x0, x1 = min(res), max(res)
    y0, y1 = min(ims), max(ims)
    pad = 0.1 * max(x1 - x0, y1 - y0, 1.0)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    W = 640
    Hgt = int(W * (y1 - y0) / (x1 - x0))

    def to_px(z):
        return ((z.real - x0) / (x1 - x0) * W, Hgt - (z.imag - y0) / (y1 - y0) * Hgt)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{Hgt}" '
             f'viewBox="0 0 {W} {Hgt}">',
             f'<rect width="{W}" height="{Hgt}" fill="white"/>']
    poly = " ".join(f"{px:.2f},{py:.2f}" for px, py in map(to_px, xs))
    parts.append(f'<polyline points="{poly}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    for e in c.branch_points:
        px, py = to_px(e)
        parts.append(f'<path d="M {px-5:.2f} {py-5:.2f} L {px+5:.2f} {py+5:.2f} '
                     f'M {px-5:.2f} {py+5:.2f} L {px+5:.2f} {py-5:.2f}" '
                     f'stroke="crimson" stroke-width="2"/>')
    for ev in traj.events:
        px, py = to_px(ev.xi_star)
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="6" fill="none" '
                     f'stroke="darkorange" stroke-width="2"/>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def run():
    try:
        main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.exceptions.Abort:
        sys.exit(130)
    except VortexModuliError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)


if __name__ == "__main__":
    run()
