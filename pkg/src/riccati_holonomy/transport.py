"""Transport of the SL(2) linear lift of a Riccati equation along base paths.

A Riccati system ``dy/dt = alpha2 y^2 + alpha1 y + alpha0`` lifts to the
traceless linear system ``H' = [[alpha1/2, alpha0], [-alpha2, -alpha1/2]] H``.
Leaves of the foliation are ``y(t) = H(t) H(t0)^{-1} (y0)``, so the holonomy
along a path is a Moebius map read off from the transported frame.

Paths are polylines.  Each segment is integrated in its arclength parameter
and the frame is pushed back to ``det = 1`` after every accepted step.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LoopNotClosed, PoleTooClose
from .integrate import DEFAULT_TOLERANCES, Tolerances, integrate
from .moebius import Moebius
from .rational import RationalMap1D

LOOP_RADIUS = 0.15
LOOP_VERTICES = 64


@dataclass(frozen=True, eq=False)
class RiccatiSystem:
    alpha0: RationalMap1D
    alpha1: RationalMap1D
    alpha2: RationalMap1D
    poles: tuple = field(default=())

    def __post_init__(self):
        found: list[complex] = []
        for coef in (self.alpha0, self.alpha1, self.alpha2):
            for r in coef.poles:
                if all(abs(r - p) > 1e-8 for p in found):
                    found.append(complex(r))
        object.__setattr__(self, "poles", tuple(found))

    def coefficients(self, t) -> tuple[complex, complex, complex]:
        return self.alpha0(t), self.alpha1(t), self.alpha2(t)

    def vector_field(self, t, y) -> complex:
        """Right-hand side of the scalar Riccati equation."""
        a0, a1, a2 = self.coefficients(t)
        return a0 + a1 * y + a2 * y * y


@dataclass(frozen=True)
class BasePath:
    vertices: tuple
    refinement: float = 0.1

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        if len(verts) < 2:
            raise ValueError("a base path needs at least two vertices")
        if not self.refinement > 0:
            raise ValueError("refinement must be positive")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def segment(cls, a, b, refinement: float = 0.1) -> "BasePath":
        return cls((a, b), refinement)

    @classmethod
    def constant(cls, p) -> "BasePath":
        return cls((p, p))

    @property
    def start(self) -> complex:
        return self.vertices[0]

    @property
    def end(self) -> complex:
        return self.vertices[-1]

    @property
    def length(self) -> float:
        v = self.vertices
        return sum(abs(v[k + 1] - v[k]) for k in range(len(v) - 1))

    def segments(self):
        """Consecutive (start, end) pairs, split to at most ``refinement`` long."""
        v = self.vertices
        for k in range(len(v) - 1):
            a, b = v[k], v[k + 1]
            n = max(1, math.ceil(abs(b - a) / self.refinement - 1e-12))
            for j in range(n):
                yield a + (b - a) * j / n, a + (b - a) * (j + 1) / n

    def point_at(self, s: float) -> complex:
        """Point at arclength ``s`` from the start."""
        v = self.vertices
        for k in range(len(v) - 1):
            seg = abs(v[k + 1] - v[k])
            if s <= seg or k == len(v) - 2:
                if seg == 0:
                    return v[k + 1]
                return v[k] + (v[k + 1] - v[k]) * min(s, seg) / seg
            s -= seg
        return v[-1]

    def reversed(self) -> "BasePath":
        return BasePath(self.vertices[::-1], self.refinement)

    def then(self, other: "BasePath") -> "BasePath":
        if abs(self.end - other.start) > 1e-12:
            raise ValueError("paths are not composable")
        return BasePath(self.vertices + other.vertices[1:], min(self.refinement, other.refinement))

    def __mul__(self, other: "BasePath") -> "BasePath":
        return self.then(other)

    def refined(self, factor: int = 2) -> "BasePath":
        return BasePath(self.vertices, self.refinement / factor)

    def subdivided(self, factor: int = 2) -> "BasePath":
        """Same geometric path with every segment split into ``factor`` pieces."""
        out = [self.vertices[0]]
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            out.extend(a + (b - a) * j / factor for j in range(1, factor + 1))
        return BasePath(tuple(out), self.refinement)


@dataclass(frozen=True)
class Frame:
    H: Moebius
    endpoint: complex
    accumulated_error: float = 0.0

    @classmethod
    def identity(cls, at) -> "Frame":
        return cls(Moebius.identity(), complex(at), 0.0)


# ---------------------------------------------------------------------------
# path geometry


def segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    u = ((p - a) * d.conjugate()).real / abs(d) ** 2
    u = min(1.0, max(0.0, u))
    return abs(a + u * d - p)


def path_pole_distance(path: BasePath, poles: Sequence[complex]) -> float:
    best = math.inf
    v = path.vertices
    for k in range(len(v) - 1):
        for p in poles:
            best = min(best, segment_distance(v[k], v[k + 1], p))
    return best


def check_pole_margin(path: BasePath, poles, margin: float) -> None:
    d = path_pole_distance(path, poles)
    if d < margin:
        raise PoleTooClose(f"path passes within {d:.3e} of a pole (margin {margin:.1e})")


def winding_number(path: BasePath, point: complex) -> float:
    """Total argument increment around ``point`` divided by 2 pi."""
    v = np.asarray(path.vertices) - point
    ang = np.angle(v[1:] / v[:-1])
    return float(np.sum(ang) / (2 * math.pi))


def homotopic(p1: BasePath, p2: BasePath, poles: Sequence[complex]) -> bool:
    """Winding-number test for homotopy rel endpoints in the pole complement."""
    if abs(p1.start - p2.start) > 1e-12 or abs(p1.end - p2.end) > 1e-12:
        return False
    loop = p1.then(p2.reversed())
    return all(abs(winding_number(loop, p)) * 2 * math.pi < math.pi for p in poles)


def circle_path(center, radius: float, start_angle: float = 0.0, n: int = LOOP_VERTICES,
                ccw: bool = True, turns: int = 1, refinement: float = 0.1) -> BasePath:
    sgn = 1 if ccw else -1
    pts = [
        complex(center) + radius * cmath.exp(1j * (start_angle + sgn * 2 * math.pi * k / n))
        for k in range(n * turns + 1)
    ]
    pts[-1] = pts[0]
    return BasePath(tuple(pts), refinement)


def _detour(a: complex, b: complex, poles, margin: float) -> list[complex]:
    out = [a]
    d = b - a
    hits = []
    for p in poles:
        if d != 0 and segment_distance(a, b, p) < 2 * margin:
            u = ((p - a) * d.conjugate()).real / abs(d) ** 2
            if 0 < u < 1:
                hits.append((u, p))
    for u, p in sorted(hits):
        foot = a + u * d
        n = foot - p
        if abs(n) < 1e-15:
            n = 1j * d
        out.append(p + 2 * margin * n / abs(n))
    out.append(b)
    return out


def peripheral_loop(basepoint, puncture, radius: float = LOOP_RADIUS, poles=(),
                    margin: float = DEFAULT_TOLERANCES.pole_margin, n: int = LOOP_VERTICES,
                    refinement: float = 0.1) -> BasePath:
    """Counter-clockwise loop around ``puncture`` based at ``basepoint``.

    Straight connector to the circle of ``radius`` around the puncture, one
    turn of an ``n``-gon, and back.  Connectors are pushed sideways by
    ``2 * margin`` around any other pole they would otherwise graze.
    """
    b, p = complex(basepoint), complex(puncture)
    direction = (b - p) / abs(b - p)
    foot = p + radius * direction
    others = [q for q in poles if abs(q - p) > 1e-12]
    go = _detour(b, foot, others, margin)
    ring = circle_path(p, radius, cmath.phase(direction), n).vertices
    back = go[::-1]
    verts = tuple(go) + ring[1:] + tuple(back[1:])
    return BasePath(verts, refinement)


def standard_loops(basepoint, punctures, radius: float = LOOP_RADIUS, **kw) -> list[BasePath]:
    """Peripheral loops ordered by the argument of each puncture seen from the basepoint."""
    order = sorted(punctures, key=lambda p: cmath.phase(complex(p) - complex(basepoint)) % (2 * math.pi))
    return [peripheral_loop(basepoint, p, radius, poles=punctures, **kw) for p in order]


# ---------------------------------------------------------------------------
# transport


def _frame_rhs(sys: RiccatiSystem, a: complex, u: complex):
    al0, al1, al2 = sys.alpha0, sys.alpha1, sys.alpha2

    def rhs(s, y):
        t = a + s * u
        p = 0.5 * al1(t) * u
        q = al0(t) * u
        r = -al2(t) * u
        return np.array(
            [p * y[0] + q * y[2], p * y[1] + q * y[3], r * y[0] - p * y[2], r * y[1] - p * y[3]]
        )

    return rhs


def _renormalizer(drift: list):
    def on_accept(s, y):
        det = y[0] * y[3] - y[1] * y[2]
        drift[0] += abs(det - 1)
        return y / cmath.sqrt(det), False

    return on_accept


def transport(sys: RiccatiSystem, path: BasePath, start_frame: Frame | None = None,
              tol: Tolerances = DEFAULT_TOLERANCES) -> Frame:
    """Frame at the end of ``path``, starting from ``start_frame`` (identity by default)."""
    check_pole_margin(path, sys.poles, tol.pole_margin)
    frame = start_frame or Frame.identity(path.start)
    H = frame.H
    y = np.array([H.a, H.b, H.c, H.d], dtype=complex)
    drift = [frame.accumulated_error]
    on_accept = _renormalizer(drift)
    for a, b in path.segments():
        L = abs(b - a)
        if L == 0:
            continue
        res = integrate(_frame_rhs(sys, a, (b - a) / L), y, L, tol, on_accept)
        y = res.y
    return Frame(Moebius(*(complex(v) for v in y)), path.end, drift[0])


def holonomy(sys: RiccatiSystem, path: BasePath, tol: Tolerances = DEFAULT_TOLERANCES) -> Moebius:
    """Moebius map from the fibre over the path start to the fibre over its end."""
    return transport(sys, path, None, tol).H


def monodromy_representation(sys: RiccatiSystem, basepoint, loops: Sequence[BasePath],
                             tol: Tolerances = DEFAULT_TOLERANCES) -> list[Moebius]:
    """Holonomy of each closed loop at ``basepoint``.

    Concatenation ``g * h`` (g first) has holonomy ``M_h @ M_g``.
    """
    out = []
    b = complex(basepoint)
    for loop in loops:
        if abs(loop.start - b) > 1e-12 or abs(loop.end - b) > 1e-12:
            raise LoopNotClosed(f"loop from {loop.start} to {loop.end} is not closed at {b}")
        out.append(holonomy(sys, loop, tol))
    return out
