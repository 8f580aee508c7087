import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riccati_holonomy.errors import DegenerateVertices, PoleTooClose
from riccati_holonomy.moebius import Moebius, apply, classify
from riccati_holonomy.projective import (
    dedupe_points,
    developing_value,
    explicit_monodromy,
    from_quadratic,
    ideal_polygon_group,
    iter_orbit_frontier,
    iter_orbit_levels,
    limit_set_orbit,
    trace_map_scan,
)
from riccati_holonomy.riccati_family import explicit_quadratic
from riccati_holonomy.transport import BasePath, circle_path, peripheral_loop


def _parabolic_fixed_point(m):
    # (a - d) / (2c) is the double root of c z^2 + (d - a) z - b
    return (m.a - m.d) / (2 * m.c)


def test_peripheral_monodromy_is_parabolic(monodromy_lambda0):
    for m in monodromy_lambda0:
        assert abs(m.trace_squared() - 4) <= 1e-6
        assert classify(m, tol=1e-6) == "parabolic"


def test_lambda0_group_preserves_circle(monodromy_lambda0):
    cusps = [_parabolic_fixed_point(m) for m in monodromy_lambda0]
    R = abs(cusps[0])
    assert all(abs(abs(c) - R) < 1e-8 for c in cusps)
    # cusps at the four compass points
    assert sorted(round(cmath.phase(c) / (math.pi / 2)) % 4 for c in cusps) == [0, 1, 2, 3]
    for m in monodromy_lambda0:
        for a in (0.1, 1.3, 4.0):
            assert abs(abs(apply(m, R * cmath.exp(1j * a))) - R) < 1e-8
    cloud = limit_set_orbit(monodromy_lambda0, 5)
    assert np.abs(cloud.points).max() <= R + 1e-8


def test_fuchsian_words_have_real_traces(monodromy_lambda0):
    mats = list(monodromy_lambda0) + [m.inverse() for m in monodromy_lambda0]
    inv = {i: (i + 4) % 8 for i in range(8)}
    worst = 0.0
    for n in range(1, 4):
        for w in itertools.product(range(8), repeat=n):
            if any(inv[a] == b for a, b in zip(w, w[1:])):
                continue
            M = Moebius.identity()
            for j in w:
                M = M @ mats[j]
            worst = max(worst, abs(M.trace_squared().imag))
    assert worst <= 1e-6


def test_monodromy_is_not_fuchsian_off_axis():
    Ms = explicit_monodromy(0.3 + 0.1j)
    prod = Ms[0] @ Ms[1]
    assert abs(prod.trace_squared().imag) > 1e-3


def test_basepoint_change_conjugates():
    # moving the basepoint conjugates every generator, so traces agree
    a, b = explicit_monodromy(1.0), explicit_monodromy(1.0, basepoint=0.2j)
    ta = sorted((round(m.trace_squared().real, 6), round(m.trace_squared().imag, 6)) for m in a)
    tb = sorted((round(m.trace_squared().real, 6), round(m.trace_squared().imag, 6)) for m in b)
    assert ta == tb


def test_developing_derivative_matches_difference():
    ps = from_quadratic(explicit_quadratic(0.5j))
    t, h = 0.3 + 0.2j, 1e-5
    v = developing_value(ps, BasePath((0, t)))
    vp = developing_value(ps, BasePath((0, t, t + h)))
    vm = developing_value(ps, BasePath((0, t, t - h)))
    fd = (vp.value - vm.value) / (2 * h)
    assert abs(v.derivative - fd) < 1e-6 * abs(fd)


def test_developing_paths_must_start_at_basepoint():
    ps = from_quadratic(explicit_quadratic(0))
    with pytest.raises(ValueError):
        developing_value(ps, BasePath((0.1, 0.2)))
    with pytest.raises(PoleTooClose):
        from_quadratic(explicit_quadratic(0), basepoint=1.0)


def test_trace_scan_is_nonconstant_and_flags():
    loop = peripheral_loop(0, 1).then(peripheral_loop(0, 1j))
    scan = trace_map_scan([0, 0.5, 1j, 0.3 + 0.1j], loop)
    assert np.ptp(np.abs(scan.values)) > 1e-3
    assert scan.real[0]
    with pytest.raises(ValueError):
        trace_map_scan([0], BasePath((0, 0.2)))


@given(st.lists(st.floats(0, 2 * math.pi), min_size=3, max_size=7, unique=True))
def test_ideal_polygon_generators(angles):
    angles = sorted(angles)
    gaps = np.diff(angles + [angles[0] + 2 * math.pi])
    if gaps.min() < 0.05:
        return
    verts = [cmath.exp(1j * a) for a in angles]
    g = ideal_polygon_group(verts)
    n = len(verts)
    for i, m in enumerate(g.generators):
        assert abs(m.trace_squared() - 4) < 1e-7
        shared = verts[(i + 1) % n]
        assert abs(apply(m, shared) - shared) < 1e-7
        for a in (0.2, 2.5):
            assert abs(abs(apply(m, cmath.exp(1j * a))) - 1) < 1e-7
        assert abs(apply(m, 0j)) < 1


@pytest.mark.parametrize(
    "verts",
    [[1, 1j], [1, 1, 1j], [1, 2, 1j], [1, -1j, -1]],
)
def test_degenerate_vertices(verts):
    with pytest.raises(DegenerateVertices):
        ideal_polygon_group(verts)


def test_cube_roots_orbit_fills_circle():
    verts = [cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    cloud = limit_set_orbit(ideal_polygon_group(verts), 8)
    f = cloud.frontier()
    assert np.all(np.abs(cloud.points) < 1 + 1e-9)
    assert np.abs(f).min() > 0.9
    # convergence towards the cusps is only parabolic: any empty angular
    # bin must sit next to a vertex
    edges = np.linspace(-math.pi, math.pi, 73)
    hit = np.histogram(np.angle(f), edges)[0] > 0
    centres = 0.5 * (edges[1:] + edges[:-1])
    for c in centres[~hit]:
        gap = min(abs(cmath.phase(cmath.exp(1j * c) / v)) for v in verts)
        assert gap < 0.35
    assert hit.mean() > 0.8


def test_frontier_chunks_match_levels():
    gens = ideal_polygon_group([1, 1j, -1, -1j]).generators
    levels = list(iter_orbit_levels(gens, 4, 0.1j))
    assert [x.size for x in levels] == [1, 8, 56, 392, 2744]
    chunks = np.concatenate(list(iter_orbit_frontier(gens, 4, 0.1j, split=2)))
    a = np.sort_complex(np.round(levels[-1], 12))
    b = np.sort_complex(np.round(chunks, 12))
    assert np.array_equal(a, b)


def test_dedupe_and_lengths():
    z = np.array([0.5, 0.5 + 1e-13, 0.25j])
    assert dedupe_points(z).size == 2
    cloud = limit_set_orbit([Moebius.identity()], 3)
    assert cloud.points.size == 1 and cloud.lengths[0] == 0
    with pytest.raises(ValueError):
        limit_set_orbit([Moebius.identity()], -1)


def test_loop_around_regular_point_is_trivial():
    ps = from_quadratic(explicit_quadratic(0.3))
    from riccati_holonomy.transport import holonomy

    loop = BasePath((0, 0.5j)).then(circle_path(0.2 + 0.5j, 0.2, math.pi)).then(BasePath((0.5j, 0)))
    assert classify(holonomy(ps.system, loop)) == "identity"
