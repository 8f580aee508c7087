"""Batch front end: ``riccati-holonomy --scene scene.json [--validate-only]``.

Each scene names one command; results go to ``<output_prefix>.csv``, point
clouds to ``<output_prefix>.ppm`` and scalar summaries to
``<output_prefix>.summary.csv``.  Exit status: 0 success, 2 invalid scene,
3 numerical failure (error class name on stderr).
"""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from . import continuation, projective, riccati_family, semigroup
from .errors import HolonomyError
from .integrate import DEFAULT_TOLERANCES, Tolerances
from .moebius import INF, Moebius, classify, trace_squared
from .rational import RationalMap1D
from .transport import BasePath, peripheral_loop, standard_loops

EXIT_OK, EXIT_INVALID, EXIT_FAILURE = 0, 2, 3


class SceneError(Exception):
    """Scene file is unreadable or does not match the schema."""


# ---------------------------------------------------------------------------
# scene loading


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("scene.schema.json").read_text())


def _finite_float(s: str) -> float:
    x = float(s)
    if not math.isfinite(x):
        raise SceneError(f"non-finite number {s}")
    return x


def _reject_constant(s: str):
    raise SceneError(f"non-finite number {s}")


def load_scene(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SceneError(str(exc)) from exc
    try:
        scene = json.loads(text, parse_float=_finite_float, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SceneError(f"malformed JSON: {exc}") from exc
    try:
        jsonschema.validate(scene, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SceneError(f"{where}: {exc.message}") from exc
    return scene


def cplx(v, default=0j) -> complex:
    if v is None:
        return complex(default)
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def tolerances(scene: dict) -> Tolerances:
    return DEFAULT_TOLERANCES.replace(**scene.get("tolerances", {}))


# ---------------------------------------------------------------------------
# output


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".17g")
    return str(x)


def write_csv(path: Path, header: list, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def _out(prefix: Path, ext: str) -> Path:
    return prefix.with_name(prefix.name + ext)


def write_summary(prefix: Path, items: list) -> None:
    write_csv(_out(prefix, ".summary.csv"), ["quantity", "value"], items)


def re_im(z) -> tuple:
    if z is None:
        return (None, None)
    if z is INF:
        return (math.inf, math.inf)
    z = complex(z)
    return (z.real, z.imag)


class Raster:
    """Black points on a white square image covering ``center +- half_width``."""

    def __init__(self, viewport=(0j, 1.0), pixels: int = 512):
        if not 16 <= pixels <= 8192:
            raise ValueError("pixels must lie in [16, 8192]")
        self.center = complex(viewport[0])
        self.half = float(viewport[1])
        self.pixels = int(pixels)
        self.ink = np.zeros((self.pixels, self.pixels), dtype=bool)

    def add(self, points) -> None:
        z = np.asarray(points, dtype=complex).ravel()
        z = z[np.isfinite(z)]
        if z.size == 0:
            return
        span = 2 * self.half
        col = np.floor((z.real - (self.center.real - self.half)) / span * self.pixels)
        row = np.floor(((self.center.imag + self.half) - z.imag) / span * self.pixels)
        ok = (col >= 0) & (col < self.pixels) & (row >= 0) & (row < self.pixels)
        self.ink[row[ok].astype(np.int64), col[ok].astype(np.int64)] = True

    def to_ppm(self) -> bytes:
        rgb = np.where(self.ink[..., None], np.uint8(0), np.uint8(255))
        rgb = np.broadcast_to(rgb, (self.pixels, self.pixels, 3))
        return f"P6\n{self.pixels} {self.pixels}\n255\n".encode() + np.ascontiguousarray(rgb).tobytes()


def render_cloud(points, viewport=(0j, 1.0), pixels: int = 512) -> bytes:
    r = Raster(viewport, pixels)
    r.add(points)
    return r.to_ppm()


def write_ppm(prefix: Path, raster: Raster) -> None:
    path = _out(prefix, ".ppm")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(raster.to_ppm())


def _viewport(p: dict, default) -> tuple:
    v = p.get("viewport")
    return (cplx(v["center"]), float(v["half_width"])) if v else default


# ---------------------------------------------------------------------------
# commands


def _loop(spec: dict, basepoint: complex, poles, tol: Tolerances) -> BasePath:
    loop = peripheral_loop(basepoint, cplx(spec["center"]), float(spec["radius"]), poles=poles,
                           margin=tol.pole_margin)
    return loop.reversed() if spec.get("direction", "ccw") == "cw" else loop


def cmd_schwarzian_verify(p, prefix, tol):
    lam = cplx(p.get("lambda"))
    t, res = riccati_family.schwarzian_residuals(lam, p.get("samples", 100), p.get("seed", 0))
    write_csv(_out(prefix, ".csv"), ["index", "t_re", "t_im", "relative_residual"],
              ((k, z.real, z.imag, r) for k, (z, r) in enumerate(zip(t, res))))
    write_summary(prefix, [("lambda_re", lam.real), ("lambda_im", lam.imag), ("max_residual", float(res.max()))])


def cmd_monodromy(p, prefix, tol):
    lam = cplx(p.get("lambda"))
    b = cplx(p.get("basepoint"))
    sys_ = riccati_family.explicit_riccati(lam)
    if "loops" in p:
        loops = [_loop(s, b, riccati_family.FOURTH_ROOTS, tol) for s in p["loops"]]
        centers = [cplx(s["center"]) for s in p["loops"]]
    else:
        loops = standard_loops(b, riccati_family.FOURTH_ROOTS, margin=tol.pole_margin)
        centers = sorted(riccati_family.FOURTH_ROOTS, key=lambda q: cmath.phase(q - b) % (2 * math.pi))
    mats = projective.monodromy_representation(sys_, b, loops, tol)
    rows = []
    for k, (c, m) in enumerate(zip(centers, mats)):
        t2 = complex(trace_squared(m))
        rows.append((k, c.real, c.imag, *re_im(m.a), *re_im(m.b), *re_im(m.c), *re_im(m.d),
                     t2.real, t2.imag, classify(m)))
    write_csv(_out(prefix, ".csv"),
              ["loop", "center_re", "center_im", "a_re", "a_im", "b_re", "b_im", "c_re", "c_im",
               "d_re", "d_im", "tr2_re", "tr2_im", "class"], rows)


def cmd_trace_scan(p, prefix, tol):
    b = cplx(p.get("basepoint"))
    loop = _loop(p["loop"], b, riccati_family.FOURTH_ROOTS, tol)
    if "lambdas" in p:
        lams = [cplx(v) for v in p["lambdas"]]
    else:
        ln = p["line"]
        a, e, n = cplx(ln["start"]), cplx(ln["end"]), ln["count"]
        lams = [a + (e - a) * k / max(n - 1, 1) for k in range(n)]
    scan = projective.trace_map_scan(lams, loop, tol)
    write_csv(_out(prefix, ".csv"), ["lambda_re", "lambda_im", "T_re", "T_im", "real", "elliptic"],
              ((l.real, l.imag, v.real, v.imag, r, e)
               for l, v, r, e in zip(scan.lambdas, scan.values, scan.real, scan.elliptic)))


def _group(spec: dict, tol):
    if "ideal_polygon" in spec:
        return projective.ideal_polygon_group([cplx(v) for v in spec["ideal_polygon"]]).generators
    if "roots_of_unity" in spec:
        n = spec["roots_of_unity"]
        return projective.ideal_polygon_group([cmath.exp(2j * math.pi * k / n) for k in range(n)]).generators
    return projective.explicit_monodromy(cplx(spec["explicit_lambda"]), tol=tol)


def cmd_limit_set(p, prefix, tol):
    gens = _group(p["group"], tol)
    cloud = projective.limit_set_orbit(list(gens), p["depth"], cplx(p.get("seed")))
    pts, lens = cloud.points, cloud.lengths
    if p.get("frontier_only", False):
        keep = lens == lens.max()
        pts, lens = pts[keep], lens[keep]
    write_csv(_out(prefix, ".csv"), ["x", "y", "word_length"],
              ((z.real, z.imag, n) for z, n in zip(pts, lens)))
    r = Raster(_viewport(p, (0j, 1.0)), p.get("pixels", 512))
    r.add(pts)
    write_ppm(prefix, r)


def cmd_boundary_probe(p, prefix, tol):
    lam = cplx(p.get("lambda"))
    kw = {k: p[k] for k in ("directions", "cloud_depth", "width", "threshold", "core_radius") if k in p}
    if "radii" in p:
        kw["radii"] = p["radii"]
    exp = continuation.natural_boundary_experiment(lam, tol=tol, **kw)
    rows = []
    for ray in exp.rays:
        rows.append((math.degrees(ray.angle), ray.status, ray.singular_kind, ray.singular_radius,
                     *re_im(ray.endpoint), *re_im(ray.crossing), ray.gap, ray.passes, ray.core_complete))
    write_csv(_out(prefix, ".csv"),
              ["angle_deg", "status", "singular_kind", "singular_radius", "end_re", "end_im",
               "crossing_re", "crossing_im", "chordal_gap", "passes", "core_complete"], rows)
    write_summary(prefix, [("fraction", exp.fraction), ("fraction_with_crossing", exp.fraction_with_crossing),
                           ("core_complete", exp.core_complete), ("rays", len(exp.rays))])
    ps = projective.from_quadratic(riccati_family.explicit_quadratic(lam), tol=tol)
    gens = projective.peripheral_monodromy(ps, tol)[:3]
    r = Raster(_viewport(p, (0j, 3.0)), p.get("pixels", 512))
    for chunk in projective.iter_orbit_frontier(gens, kw.get("cloud_depth", 10), 0j):
        r.add(chunk)
    r.add([ray.endpoint for ray in exp.rays if ray.endpoint is not INF])
    write_ppm(prefix, r)


def _word_str(word, k: int) -> str:
    return " ".join(str(j + 1) if j < k else str(-(j - k + 1)) for j in word)


def cmd_shadow(p, prefix, tol):
    if "generators" in p:
        gens = [Moebius.from_entries(*(cplx(v) for v in m)) for m in p["generators"]]
    else:
        gens = projective.explicit_monodromy(cplx(p["lambda"]), tol=tol)
    res = continuation.shadowing_word_sequence(
        gens, cplx(p.get("target"), 2 + 1j), cplx(p.get("z0")), p.get("delta", 0.05),
        p.get("max_word_len", 8), p.get("steps", 5))
    k = len(gens)
    write_csv(_out(prefix, ".csv"), ["step", "word", "candidates", "distance", "log_derivative"],
              ((n + 1, _word_str(w, k), c, d, g) for n, (w, c, d, g) in
               enumerate(zip(res.words, res.candidates, res.distances, res.log_derivatives))))
    write_summary(prefix, [("delta", res.delta), ("slope", res.slope), ("log_c", res.log_c)])


def _disc_map(spec: dict, radius: float) -> semigroup.DiscMap:
    if "affine" in spec:
        s, o = (cplx(v) for v in spec["affine"])
        return semigroup.DiscMap.affine(s, o, radius)
    if "moebius" in spec:
        return semigroup.DiscMap.moebius(Moebius.from_entries(*(cplx(v) for v in spec["moebius"])), radius)
    if "automorphism" in spec:
        return semigroup.DiscMap.disc_automorphism(cplx(spec["automorphism"]), radius)
    return semigroup.DiscMap.polynomial([cplx(v) for v in spec["polynomial"]], radius,
                                        spec.get("identity_plus", False))


def cmd_ifs(p, prefix, tol):
    R = p.get("domain_radius", 1.0)
    ifs = semigroup.IFSystem(tuple(_disc_map(m, R) for m in p["maps"]))
    pts = semigroup.limit_set(ifs, p["depth"])
    write_csv(_out(prefix, ".csv"), ["address", "x", "y", "cylinder_diam"],
              ((" ".join(str(i) for i in a.address), a.point.real, a.point.imag, a.cylinder_diam) for a in pts))
    summary = [("separation", ifs.separation), ("min_gap", ifs.min_gap())]
    if "modulus_depth" in p:
        mg = semigroup.modulus_growth_check(ifs, p["modulus_depth"])
        summary += [("c_estimate", mg.c_estimate), ("c_all_depths", mg.c_all_depths),
                    ("violations", len(mg.violations))]
    write_summary(prefix, summary)
    r = Raster(_viewport(p, (0j, R)), p.get("pixels", 512))
    r.add([a.point for a in pts])
    write_ppm(prefix, r)


def cmd_renormalize(p, prefix, tol):
    g = _disc_map(p["g"], p.get("domain_radius", 1.0))
    kw = {k: p[k] for k in ("N", "iterations", "grid", "degree") if k in p}
    res = semigroup.loray_rebelo_renormalize(cplx(p["lambda"]), g, **kw)
    sups = res.sups
    rows = [(k + 1, s, None if k == 0 or sups[k - 1] == 0 else s / sups[k - 1], st.residual)
            for k, (s, st) in enumerate(zip(sups, res.steps))]
    write_csv(_out(prefix, ".csv"), ["k", "sup_deviation", "ratio", "refit_residual"], rows)
    write_summary(prefix, [("N", res.N), ("affine_degenerate", res.affine_degenerate)])


def cmd_dense_limit(p, prefix, tol):
    lam, k, r = cplx(p["lambda"]), p["k"], float(p["r"])
    spec = p.get("g_list", "hex")
    g_list = semigroup.hex_cover_maps(lam, k, r) if spec == "hex" else [_disc_map(m, 1.0) for m in spec]
    res = semigroup.dense_limit_construction(lam, k, g_list, r, p.get("grid", 41), p.get("steps", 30))
    cov = res.coverage
    write_csv(_out(prefix, ".csv"), ["x", "y", "chain"],
              ((z.real, z.imag, " ".join(str(int(i) + 1) for i in ch)) for z, ch in zip(cov.points, cov.chains)))
    write_summary(prefix, [("maps", len(g_list)), ("M_bound", res.M_bound), ("contraction", res.contraction),
                           ("complete", cov.complete), ("max_modulus", cov.max_modulus)])


def cmd_painleve(p, prefix, tol):
    R = RationalMap1D.polynomial([cplx(v) for v in p["R"]])
    S = RationalMap1D.polynomial([cplx(v) for v in p["S"]])
    start = tuple(cplx(v) for v in p["start"])
    path = BasePath(tuple(cplx(v) for v in p["path"]))
    out = continuation.painleve_continue(R, S, start, path, p.get("branch_tol", 1e-4), tol)
    write_csv(_out(prefix, ".csv"), ["x_re", "x_im", "y_re", "y_im"],
              ((*re_im(x), *re_im(y)) for x, y in out.track))
    write_summary(prefix, [("status", out.status), ("singular_kind", out.singular_kind),
                           ("parameter_reached", out.parameter_reached), ("x_re", out.x.real),
                           ("x_im", out.x.imag), ("y_re", out.y.real), ("y_im", out.y.imag),
                           ("drift", out.drift), ("drift_per_length", out.drift_per_length)])


def cmd_curve_holonomy(p, prefix, tol):
    sys_ = riccati_family.explicit_riccati(cplx(p.get("lambda")))
    num = [cplx(v) for v in p["curve"]["numerator"]]
    den = [cplx(v) for v in p["curve"].get("denominator", [1])]
    curve = RationalMap1D.from_coefficients(num, den)
    start = tuple(cplx(v) for v in p["start"])
    path = BasePath(tuple(cplx(v) for v in p["path"]))
    t, y = continuation.holonomy_to_curve(sys_, start, path, curve, tol=tol)
    write_csv(_out(prefix, ".csv"), ["t_re", "t_im", "y_re", "y_im", "curve_residual"],
              [(t.real, t.imag, y.real, y.imag, abs(y - curve(t)))])


def cmd_compactify(p, prefix, tol):
    cd = riccati_family.CuspData.from_counts(p["n"])
    tang = riccati_family.tangency_count(cd)
    delta = riccati_family.diagonal_self_intersection(cd)
    write_csv(_out(prefix, ".csv"), ["quantity", "value"],
              [("tangency", tang), ("delta_self_intersection", delta),
               ("note", riccati_family.hirzebruch_note(delta))])


COMMANDS: dict[str, Callable] = {
    "schwarzian-verify": cmd_schwarzian_verify,
    "monodromy": cmd_monodromy,
    "trace-scan": cmd_trace_scan,
    "limit-set": cmd_limit_set,
    "boundary-probe": cmd_boundary_probe,
    "shadow": cmd_shadow,
    "ifs": cmd_ifs,
    "renormalize": cmd_renormalize,
    "dense-limit": cmd_dense_limit,
    "painleve": cmd_painleve,
    "curve-holonomy": cmd_curve_holonomy,
    "compactify": cmd_compactify,
}


def run(scene_file, validate_only: bool = False) -> int:
    try:
        scene = load_scene(scene_file)
    except SceneError as exc:
        print(f"SceneError: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if validate_only:
        return EXIT_OK
    prefix = Path(scene["output_prefix"])
    try:
        COMMANDS[scene["command"]](scene.get("params", {}), prefix, tolerances(scene))
    except (HolonomyError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="riccati-holonomy", description=__doc__.splitlines()[0])
    ap.add_argument("--scene", required=True, help="path to a JSON scene file")
    ap.add_argument("--validate-only", action="store_true", help="check the scene and exit")
    args = ap.parse_args(argv)
    return run(args.scene, args.validate_only)


if __name__ == "__main__":
    sys.exit(main())
