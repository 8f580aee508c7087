"""One PASS/FAIL line per acceptance criterion, with measured values and runtimes.

Run under pytest (lines are echoed in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""

import cmath
import filecmp
import math
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from riccati_holonomy.continuation import natural_boundary_experiment, shadowing_word_sequence
from riccati_holonomy.errors import HolonomyError
from riccati_holonomy.moebius import Moebius, classify
from riccati_holonomy.projective import explicit_monodromy
from riccati_holonomy.rational import RationalMap1D
from riccati_holonomy.riccati_family import (
    CuspData,
    diagonal_self_intersection,
    explicit_quadratic,
    schwarzian_residuals,
    tangency_count,
)
from riccati_holonomy.semigroup import (
    DiscMap,
    IFSystem,
    address_point,
    cylinders,
    dense_limit_construction,
    hex_cover_maps,
    limit_set,
    loray_rebelo_renormalize,
    min_cylinder_gap,
    modulus_growth_check,
)
from riccati_holonomy.continuation import painleve_continue
from riccati_holonomy.transport import BasePath

ROOT = Path(__file__).resolve().parents[1]


def c1_schwarzian():
    worst = max(schwarzian_residuals(lam, samples=100, seed=7)[1].max() for lam in (0, 1, 0.3 + 0.1j, -2j))
    return worst <= 1e-9, f"max relative residual {worst:.2e}"


def c2_parabolic():
    worst, notes = 0.0, []
    for lam in (0j, 0.3 + 0.1j):
        Ms = explicit_monodromy(lam)
        worst = max(worst, max(abs(m.trace_squared() - 4) for m in Ms))
        prod = Moebius.identity()
        for m in Ms:
            prod = m @ prod
        notes.append(f"lambda={lam}: loop at infinity {classify(prod)}")
    return worst <= 1e-6, f"max |tr^2 - 4| {worst:.2e}; " + "; ".join(notes)


def c3_fuchsian():
    Ms = explicit_monodromy(0j)
    mats = np.array([m.as_array() for m in Ms] + [m.inverse().as_array() for m in Ms])
    inv = np.array([(i + 4) % 8 for i in range(8)])
    words, last = np.eye(2, dtype=complex)[None], np.array([-1])
    worst, count = 0.0, 0
    for _ in range(4):
        ws, ls = [], []
        for j in range(8):
            keep = last != inv[j]
            ws.append(words[keep] @ mats[j])
            ls.append(np.full(int(keep.sum()), j))
        words, last = np.concatenate(ws), np.concatenate(ls)
        tr2 = (words[:, 0, 0] + words[:, 1, 1]) ** 2
        worst = max(worst, float(np.abs(tr2.imag).max()))
        count += words.shape[0]
    return worst <= 1e-6, f"{count} reduced words, max |Im tr^2| {worst:.2e}"


def c4_symmetry():
    rng = np.random.default_rng(4)
    worst = 0.0
    for lam in (0.3 + 0.1j, 1.0, -2j):
        qp, qm = explicit_quadratic(lam).q, explicit_quadratic(-lam).q
        done = 0
        while done < 50:
            t = complex(*rng.uniform(-1.5, 1.5, 2))
            if abs(t ** 4 - 1) <= 0.1:
                continue
            worst = max(worst, abs(qp(1j * t) * (1j) ** 2 - qm(t)))
            done += 1
    return worst <= 1e-10, f"max |q_l(it) i^2 - q_-l(t)| {worst:.2e} over 150 samples"


def c5_natural_boundary():
    exp = natural_boundary_experiment(0j)
    ok = exp.fraction >= 0.9 and exp.core_complete
    return ok, (f"{sum(r.passes for r in exp.rays)}/{len(exp.rays)} rays singular within 0.05 of the cloud "
                f"(fraction {exp.fraction:.3f}, among rays with a crossing {exp.fraction_with_crossing:.3f}); "
                f"core complete {exp.core_complete}")


def c6_cantor():
    ifs = IFSystem((DiscMap.affine(0.25, 0.5), DiscMap.affine(0.25, -0.5)))
    pts = limit_set(ifs, 12)
    gap = min_cylinder_gap(cylinders(ifs, 12))
    exact = all(p.cylinder_diam == 2 * 4.0 ** -12 for p in pts)
    err = abs(address_point(ifs, (1,) * 12).point - 2 / 3)
    mg = modulus_growth_check(ifs, 12)
    c = mg.c_estimate / math.log(4)
    ok = gap > 0 and exact and err <= 4.0 ** -12 and c >= 0.9 and not mg.violations
    return ok, (f"min gap {gap:.2e}, diameters exact {exact}, |x(1..1) - 2/3| {err:.2e}, "
                f"m(12)/(12 log 4) {c:.4f}, violations {len(mg.violations)}")


def c7_renormalization():
    g = DiscMap.polynomial([0, 0, 0.001], identity_plus=True)
    res = loray_rebelo_renormalize(0.99, g, iterations=20)
    s = res.sups
    below = next((k + 1 for k, x in enumerate(s) if x < 1e-8), None)
    ratios = [b / a for a, b in zip(s[-6:], s[-5:])]
    geometric = all(r <= 0.5 for r in ratios)
    above = [x > 1e-15 for x in s]
    aff = loray_rebelo_renormalize(0.99, DiscMap.affine(1.0, 1e-3), iterations=3).affine_degenerate
    ok = below is not None and below <= 20 and geometric and all(above) and aff
    first_small = next((k + 1 for k, a in enumerate(above) if not a), None)
    return ok, (f"N={res.N}, sup < 1e-8 at k={below}, last-5 ratios "
                f"{', '.join(f'{r:.4f}' for r in ratios)}, sup <= 1e-15 from k={first_small} "
                f"(min {min(s):.2e}), affine flagged {aff}")


def c8_dense_limit():
    lam = 0.9 * cmath.exp(1j)
    maps = hex_cover_maps(lam, 8, 0.1)
    res = dense_limit_construction(lam, 8, maps, 0.1, grid=41, steps=30)
    ok = res.contraction < 1 and res.coverage.complete
    return ok, (f"{len(maps)} maps, 2M|lambda|^k = {res.contraction:.4f}, "
                f"{res.coverage.points.size} grid points all complete {res.coverage.complete}")


def c9_painleve():
    rng = np.random.default_rng(9)
    worst, runs = 0.0, 0
    while runs < 20:
        rc = rng.normal(size=rng.integers(1, 4)) + 1j * rng.normal(size=1)
        sc = rng.normal(size=rng.integers(1, 4)) + 1j * rng.normal(size=1)
        S = RationalMap1D.polynomial(sc)
        y0 = complex(*rng.normal(size=2))
        if abs(S(y0)) < 0.1:
            continue
        out = painleve_continue(RationalMap1D.polynomial(rc), S, (0j, y0), BasePath((0, 0.5 + 0.3j)))
        worst = max(worst, out.drift_per_length)
        runs += 1
    br = painleve_continue(RationalMap1D.constant(1), RationalMap1D.polynomial([0, 1]), (0j, 1 + 0j),
                           BasePath((0, -1)))
    err = abs(br.x + 0.5)
    ok = worst <= 1e-8 and br.status == "singular" and err <= 1e-3
    return ok, f"max drift per length {worst:.2e} over 20 systems; branch point at x={br.x.real:.6f} ({br.status})"


def c10_compactify():
    a, b = CuspData.from_counts((0, 0, 0, 0)), CuspData.from_counts((0, 1, 1))
    ex = ((tangency_count(a), diagonal_self_intersection(a)), (tangency_count(b), diagonal_self_intersection(b)))
    rng = np.random.default_rng(10)
    ident = all(
        diagonal_self_intersection(cd) == 2 - len(cd.n) + tangency_count(cd)
        for cd in (CuspData.from_counts(rng.integers(0, 6, rng.integers(1, 9))) for _ in range(50))
    )
    ok = ex == ((0, -2), (2, 1)) and ident
    return ok, f"(0,0,0,0) -> {ex[0]}, (0,1,1) -> {ex[1]}, identity on 50 random {ident}"


def c11_shadowing():
    gens = explicit_monodromy(-1.0)
    try:
        res = shadowing_word_sequence(gens, 2 + 1j, z0=0j, delta=0.05, max_word_len=8, steps=5)
    except HolonomyError as exc:
        return False, f"lambda=-1: {type(exc).__name__}: {exc}"
    d = res.distances
    ok = all(b < a for a, b in zip(d, d[1:])) and d[-1] < 0.1 and res.slope <= -math.log(4) + 0.5
    return ok, f"distances {', '.join(f'{x:.3g}' for x in d)}, slope {res.slope:.3f}"


def _run_all(outdir: Path):
    codes = {}
    for scene in sorted((ROOT / "scenes").glob("*.json")):
        p = subprocess.run([sys.executable, "-m", "riccati_holonomy.cli", "--scene", str(scene)],
                           cwd=outdir, capture_output=True, text=True)
        codes[scene.stem] = (p.returncode, p.stderr)
    return codes


def c12_determinism():
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        ca, cb = _run_all(Path(a)), _run_all(Path(b))
        fa = sorted(p.relative_to(a) for p in Path(a).rglob("*") if p.is_file())
        fb = sorted(p.relative_to(b) for p in Path(b).rglob("*") if p.is_file())
        same = fa == fb and all(filecmp.cmp(Path(a) / f, Path(b) / f, shallow=False) for f in fa)
        failed = sorted(k for k, (code, _) in ca.items() if code != 0)
    ok = same and ca == cb
    return ok, (f"{len(ca)} scenes, {len(fa)} files byte-identical {same}, exit codes identical {ca == cb}"
                f" (non-zero: {', '.join(failed) or 'none'})")


CRITERIA = [
    (1, "Schwarzian identity", c1_schwarzian, 1),
    (2, "parabolic peripheral monodromy", c2_parabolic, 5),
    (3, "Fuchsian reality at lambda=0", c3_fuchsian, 30),
    (4, "lambda sign symmetry", c4_symmetry, None),
    (5, "natural boundary probe", c5_natural_boundary, 120),
    (6, "Cantor limit set", c6_cantor, 10),
    (7, "Loray-Rebelo renormalization", c7_renormalization, 60),
    (8, "dense-limit construction", c8_dense_limit, 60),
    (9, "Painleve conserved quantity", c9_painleve, 10),
    (10, "compactification arithmetic", c10_compactify, 1),
    (11, "shadowing sequence", c11_shadowing, 300),
    (12, "determinism", c12_determinism, None),
]


def evaluate(num, title, fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok, detail = False, detail + f"; runtime above {limit} s"
    return ok, f"[{'PASS' if ok else 'FAIL'}] {num:2d} {title}: {detail} ({dt:.2f} s)"


@pytest.mark.parametrize("num,title,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, limit, acceptance_log):
    ok, line = evaluate(num, title, fn, limit)
    print(line)
    acceptance_log.append(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
