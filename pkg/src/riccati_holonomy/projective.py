"""Projective structures on punctured spheres: developing maps, monodromy, Fuchsian groups.

A quadratic differential ``q dt^2`` is realised as the Riccati system
``(alpha0, alpha1, alpha2) = (1, 0, q/2)``, whose holonomy ``phi = -b/a`` has
Schwarzian ``q``.  The developing map is normalised by ``phi(basepoint) = 0``
and ``phi'(basepoint) = -1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateVertices, PoleTooClose
from .integrate import DEFAULT_TOLERANCES, Tolerances
from .moebius import (
    INF,
    Circle,
    Moebius,
    SpherePoint,
    orthocircle,
    reflect,
    trace_squared,
)
from .rational import RationalMap1D
from .riccati_family import FOURTH_ROOTS, QuadDifferential, explicit_riccati
from .transport import (
    BasePath,
    Frame,
    RiccatiSystem,
    holonomy,
    monodromy_representation,
    standard_loops,
    transport,
)


@dataclass(frozen=True, eq=False)
class ProjectiveStructure:
    qd: QuadDifferential
    basepoint: complex
    base_frame: Frame
    system: RiccatiSystem = field(repr=False)

    @property
    def punctures(self) -> tuple:
        return self.qd.punctures


def companion_system(q: RationalMap1D) -> RiccatiSystem:
    return RiccatiSystem(RationalMap1D.constant(1), RationalMap1D.constant(0), 0.5 * q)


def from_quadratic(qd: QuadDifferential, basepoint=0j,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> ProjectiveStructure:
    b = complex(basepoint)
    sys = companion_system(qd.q)
    for p in tuple(qd.punctures) + tuple(sys.poles):
        if abs(b - p) < tol.pole_margin:
            raise PoleTooClose(f"basepoint {b} within {tol.pole_margin} of puncture {p}")
    return ProjectiveStructure(qd, b, Frame.identity(b), sys)


@dataclass(frozen=True)
class DevelopingValue:
    value: SpherePoint
    derivative: complex
    frame: Frame
    chart: str = "affine"  # "inverse" when value is INF: derivative of -a/b


def developing_from_frame(ps: ProjectiveStructure, frame: Frame) -> DevelopingValue:
    H = frame.H
    a0 = ps.system.alpha0(frame.endpoint)
    if abs(H.a) < 1e-12:
        return DevelopingValue(INF, a0 / H.b ** 2, frame, "inverse")
    return DevelopingValue(-H.b / H.a, -a0 / H.a ** 2, frame)


def developing_value(ps: ProjectiveStructure, path: BasePath,
                     tol: Tolerances = DEFAULT_TOLERANCES) -> DevelopingValue:
    """``phi = -b/a`` at the end of ``path`` and ``phi' = -alpha0 / a^2``."""
    if abs(path.start - ps.basepoint) > 1e-12:
        raise ValueError("developing paths must start at the basepoint")
    frame = transport(ps.system, path, ps.base_frame, tol)
    return developing_from_frame(ps, frame)


def explicit_monodromy(lam, basepoint=0j, tol: Tolerances = DEFAULT_TOLERANCES, **loop_kw) -> list[Moebius]:
    """Peripheral monodromy of the explicit Riccati family, loops ordered by argument."""
    loops = standard_loops(basepoint, FOURTH_ROOTS, margin=tol.pole_margin, **loop_kw)
    return monodromy_representation(explicit_riccati(lam), basepoint, loops, tol)


def peripheral_monodromy(ps: ProjectiveStructure, tol: Tolerances = DEFAULT_TOLERANCES,
                         **loop_kw) -> list[Moebius]:
    loops = standard_loops(ps.basepoint, ps.punctures, margin=tol.pole_margin, **loop_kw)
    return monodromy_representation(ps.system, ps.basepoint, loops, tol)


# ---------------------------------------------------------------------------
# trace map over the explicit family


@dataclass
class TraceScan:
    lambdas: list
    values: list
    real: list
    elliptic: list


def trace_map_scan(lambdas: Sequence[complex], loop: BasePath,
                   tol: Tolerances = DEFAULT_TOLERANCES, real_tol: float = 1e-6) -> TraceScan:
    """``T(lam) = tr^2`` of the holonomy of the explicit family along a closed loop."""
    if abs(loop.start - loop.end) > 1e-12:
        raise ValueError("trace map needs a closed loop")
    vals = [complex(trace_squared(holonomy(explicit_riccati(lam), loop, tol))) for lam in lambdas]
    real = [abs(v.imag) <= real_tol for v in vals]
    ell = [r and 0 <= v.real < 4 for r, v in zip(real, vals)]
    return TraceScan([complex(x) for x in lambdas], vals, real, ell)


# ---------------------------------------------------------------------------
# Fuchsian groups of ideal polygons


@dataclass(frozen=True, eq=False)
class FuchsianGroup:
    vertices: tuple
    generators: tuple
    side_circles: tuple


def reflection_product(c1: Circle, c2: Circle) -> Moebius:
    """``r1 o r2`` as a Moebius map, reconstructed from three point images."""
    pts = (0.1 + 0.05j, -0.2 + 0.1j, 0.05 - 0.3j)
    imgs = [reflect(c1, reflect(c2, z)) for z in pts]
    return Moebius.from_three_points(pts, imgs)


def ideal_polygon_group(vertices: Sequence[complex], tol: float = 1e-10) -> FuchsianGroup:
    """Generators ``rho_i = r_i o r_{i+1}`` for the ideal polygon with the given vertices."""
    v = tuple(complex(x) for x in vertices)
    n = len(v)
    if n < 3:
        raise DegenerateVertices("need at least three vertices")
    if any(abs(abs(x) - 1) > 1e-9 for x in v):
        raise DegenerateVertices("vertices must lie on the unit circle")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(v[i] - v[j]) <= 1e-9:
                raise DegenerateVertices("coincident vertices")
    angles = [0.0] + [cmath.phase(x / v[0]) % (2 * math.pi) for x in v[1:]]
    if any(b <= a for a, b in zip(angles, angles[1:])):
        raise DegenerateVertices("vertices are not in counter-clockwise cyclic order")
    circles = tuple(orthocircle(v[i], v[(i + 1) % n]) for i in range(n))
    gens = tuple(reflection_product(circles[i], circles[(i + 1) % n]) for i in range(n))
    return FuchsianGroup(v, gens, circles)


# ---------------------------------------------------------------------------
# orbit clouds


def _letters(generators: Sequence[Moebius]) -> tuple[np.ndarray, np.ndarray]:
    mats = [g.as_array() for g in generators] + [g.inverse().as_array() for g in generators]
    k = len(generators)
    inv = np.array([(i + k) % (2 * k) for i in range(2 * k)])
    return np.array(mats), inv


def _apply_letter(m: np.ndarray, z: np.ndarray) -> np.ndarray:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def iter_orbit_levels(generators: Sequence[Moebius], depth: int, seed) -> Iterator[np.ndarray]:
    """Images of ``seed`` under reduced words, one array per word length."""
    mats, inv = _letters(generators)
    z = np.array([complex(seed)])
    last = np.array([-1])
    yield z
    for _ in range(depth):
        zs, ls = [], []
        for j in range(len(mats)):
            keep = last != inv[j]
            zs.append(_apply_letter(mats[j], z[keep]))
            ls.append(np.full(int(keep.sum()), j))
        z, last = np.concatenate(zs), np.concatenate(ls)
        yield z


def iter_orbit_frontier(generators: Sequence[Moebius], depth: int, seed,
                        split: int | None = None) -> Iterator[np.ndarray]:
    """Images under reduced words of exactly ``depth`` letters, in chunks.

    The first ``split`` letters (innermost) are enumerated up front and each
    prefix is expanded separately, which bounds memory for deep clouds.
    """
    mats, inv = _letters(generators)
    if split is None:
        split = max(0, depth - 6)
    split = min(split, depth)
    z = np.array([complex(seed)])
    last = np.array([-1])
    for _ in range(split):
        zs, ls = [], []
        for j in range(len(mats)):
            keep = last != inv[j]
            zs.append(_apply_letter(mats[j], z[keep]))
            ls.append(np.full(int(keep.sum()), j))
        z, last = np.concatenate(zs), np.concatenate(ls)
    for k in range(z.size):
        zz, ll = z[k : k + 1], last[k : k + 1]
        for _ in range(depth - split):
            zs, ls = [], []
            for j in range(len(mats)):
                keep = ll != inv[j]
                zs.append(_apply_letter(mats[j], zz[keep]))
                ls.append(np.full(int(keep.sum()), j))
            zz, ll = np.concatenate(zs), np.concatenate(ls)
        yield zz


def dedupe_points(z: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    key = np.round(np.stack([z.real, z.imag], axis=1) / tol).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return z[np.sort(idx)]


@dataclass
class OrbitCloud:
    points: np.ndarray
    lengths: np.ndarray  # word length that first produced each point

    def frontier(self) -> np.ndarray:
        return self.points[self.lengths == self.lengths.max()]


def limit_set_orbit(group, depth: int, seed=0j, dedupe_tol: float = 1e-10) -> OrbitCloud:
    """Orbit of ``seed`` under all reduced words of length at most ``depth``.

    ``group`` is a :class:`FuchsianGroup` or a plain list of Moebius generators.
    """
    gens = group.generators if isinstance(group, FuchsianGroup) else list(group)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    pts, lens = [], []
    for n, level in enumerate(iter_orbit_levels(gens, depth, seed)):
        pts.append(level)
        lens.append(np.full(level.size, n))
    z = np.concatenate(pts)
    ln = np.concatenate(lens)
    key = np.round(np.stack([z.real, z.imag], axis=1) / dedupe_tol).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    idx = np.sort(idx)
    return OrbitCloud(z[idx], ln[idx])
