"""Moebius transformations and spherical geometry on the Riemann sphere.

Points of the sphere are plain Python ``complex`` numbers plus the singleton
:data:`INF`.  A :class:`Moebius` stores one SL(2, C) representative; the pair
``+-M`` is a single transformation, so every comparison is made up to sign.

The spherical metric is ``|dw| / (1 + |w|^2)`` (a sphere of radius 1/2), so
antipodal points are at distance ``pi/2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import AntipodalVertices

DEFAULT_TOL = 1e-10


class _Infinity:
    """The point at infinity.  Use the module constant :data:`INF`."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
SpherePoint = Union[complex, _Infinity]


def is_inf(w) -> bool:
    return w is INF


def as_point(w) -> SpherePoint:
    if w is INF:
        return INF
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"non-finite coordinate {w!r}; use INF for the point at infinity")
    return w


def homogeneous(w) -> tuple[complex, complex]:
    """Unit-norm homogeneous coordinates ``(p, q)`` with ``w = p / q``."""
    if w is INF:
        return 1 + 0j, 0j
    w = complex(w)
    s = math.sqrt(1.0 + abs(w) ** 2)
    return w / s, 1 / s


def from_homogeneous(p: complex, q: complex) -> SpherePoint:
    if q == 0:
        return INF
    return p / q


def antipode(w) -> SpherePoint:
    if w is INF:
        return 0j
    w = complex(w)
    if w == 0:
        return INF
    return -1 / w.conjugate()


def spherical_distance(u, v) -> float:
    """Geodesic distance for ``|dw|/(1+|w|^2)``; ``d(0, INF) = pi/2``."""
    p1, q1 = homogeneous(u)
    p2, q2 = homogeneous(v)
    return math.atan2(abs(p1 * q2 - p2 * q1), abs(p1 * p2.conjugate() + q1 * q2.conjugate()))


def chordal_distance(u, v) -> float:
    """Chordal distance on the unit-diameter sphere of the same metric."""
    p1, q1 = homogeneous(u)
    p2, q2 = homogeneous(v)
    return abs(p1 * q2 - p2 * q1)


@dataclass(frozen=True)
class Moebius:
    """``w -> (a w + b) / (c w + d)`` with ``ad - bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def from_entries(cls, a, b, c, d) -> "Moebius":
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular matrix does not define a Moebius map")
        s = cmath.sqrt(det)
        return cls(a / s, b / s, c / s, d / s)

    @classmethod
    def from_array(cls, m) -> "Moebius":
        m = np.asarray(m, dtype=complex)
        return cls.from_entries(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @classmethod
    def homothety(cls, lam) -> "Moebius":
        s = cmath.sqrt(complex(lam))
        return cls(s, 0j, 0j, 1 / s)

    @classmethod
    def translation(cls, b) -> "Moebius":
        return cls(1 + 0j, complex(b), 0j, 1 + 0j)

    @classmethod
    def from_three_points(cls, z, w) -> "Moebius":
        """The map sending the finite points ``z[k]`` to the finite points ``w[k]``."""
        return _to_standard(w).inverse() @ _to_standard(z)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def renormalized(self) -> "Moebius":
        if abs(self.det - 1) <= 1e-12:
            return self
        return Moebius.from_entries(self.a, self.b, self.c, self.d)

    def __call__(self, w) -> SpherePoint:
        return apply(self, w)

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return compose(self, other)

    def inverse(self) -> "Moebius":
        return inverse(self)

    def trace_squared(self) -> complex:
        return trace_squared(self)

    def close_to(self, other: "Moebius", tol: float = DEFAULT_TOL) -> bool:
        return sign_aligned_distance(self, other) <= tol


def apply(m: Moebius, w) -> SpherePoint:
    """Evaluate ``(a w + b)/(c w + d)`` with exact handling of infinity."""
    if w is INF:
        return INF if m.c == 0 else m.a / m.c
    w = complex(w)
    den = m.c * w + m.d
    if den == 0:
        return INF
    out = (m.a * w + m.b) / den
    # quotients beyond the float range are the point at infinity
    return out if cmath.isfinite(out) else INF


def compose(f: Moebius, g: Moebius) -> Moebius:
    """``f o g``."""
    r = Moebius(
        f.a * g.a + f.b * g.c,
        f.a * g.b + f.b * g.d,
        f.c * g.a + f.d * g.c,
        f.c * g.b + f.d * g.d,
    )
    return r.renormalized()


def inverse(m: Moebius) -> Moebius:
    return Moebius(m.d, -m.b, -m.c, m.a)


def trace_squared(m: Moebius) -> complex:
    return (m.a + m.d) ** 2


def sign_aligned_distance(m1: Moebius, m2: Moebius) -> float:
    e1 = (m1.a, m1.b, m1.c, m1.d)
    e2 = (m2.a, m2.b, m2.c, m2.d)
    plus = max(abs(x - y) for x, y in zip(e1, e2))
    minus = max(abs(x + y) for x, y in zip(e1, e2))
    return min(plus, minus)


def derivative_norm(m: Moebius, w) -> float:
    """Spherical norm ``|m'(w)| (1+|w|^2) / (1+|m(w)|^2)``, continuous at infinity."""
    p, q = homogeneous(w)
    x = m.a * p + m.b * q
    y = m.c * p + m.d * q
    return 1.0 / (abs(x) ** 2 + abs(y) ** 2) * abs(m.det)


def classify(m: Moebius, tol: float = 1e-8) -> str:
    """One of identity, parabolic, elliptic, hyperbolic, loxodromic.

    Values inside the tolerance band of tr^2 = 4 are reported as parabolic.
    """
    if sign_aligned_distance(m, Moebius.identity()) <= tol:
        return "identity"
    t2 = trace_squared(m)
    if abs(t2 - 4) <= tol:
        return "parabolic"
    if abs(t2.imag) <= tol:
        if -tol <= t2.real < 4:
            return "elliptic"
        if t2.real > 4:
            return "hyperbolic"
    return "loxodromic"


def _to_standard(z) -> Moebius:
    z1, z2, z3 = (complex(x) for x in z)
    return Moebius.from_entries(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


# ---------------------------------------------------------------------------
# Circles


@dataclass(frozen=True)
class Circle:
    """A round circle, or a line (circle through infinity).

    Lines are stored as a base point and a unit direction, with ``radius``
    set to ``inf``.
    """

    center: complex
    radius: float
    direction: complex | None = None

    @classmethod
    def line(cls, point, direction) -> "Circle":
        u = complex(direction)
        return cls(complex(point), math.inf, u / abs(u))

    @classmethod
    def through(cls, z1, z2, z3) -> "Circle":
        """Circle (or line) through three finite points."""
        z1, z2, z3 = complex(z1), complex(z2), complex(z3)
        w = (z3 - z1) / (z2 - z1)
        if abs(w.imag) < 1e-14 * max(1.0, abs(w)):
            return cls.line(z1, z2 - z1)
        c = (z2 - z1) * (w - abs(w) ** 2) / (2j * w.imag) + z1
        return cls(c, abs(z1 - c))

    @property
    def is_line(self) -> bool:
        return self.direction is not None

    def contains_point(self, w, tol: float = DEFAULT_TOL) -> bool:
        if w is INF:
            return self.is_line
        w = complex(w)
        if self.is_line:
            return abs(((w - self.center) * self.direction.conjugate()).imag) <= tol
        return abs(abs(w - self.center) - self.radius) <= tol * max(1.0, self.radius)

    def sample(self, n: int = 128) -> np.ndarray:
        if self.is_line:
            raise ValueError("cannot sample a line uniformly")
        theta = 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)

    def image(self, m: Moebius) -> "Circle":
        """Image of this circle under a Moebius map (finite sample points only)."""
        if self.is_line:
            pts = [self.center + s * self.direction for s in (-1.0, 0.0, 1.0)]
        else:
            pts = [self.center + self.radius * cmath.exp(2j * math.pi * k / 3) for k in range(3)]
        img = [apply(m, p) for p in pts]
        if any(p is INF for p in img):
            finite = [p for p in img if p is not INF]
            return Circle.line(finite[0], finite[1] - finite[0])
        return Circle.through(*img)


def reflect(c: Circle, w) -> SpherePoint:
    """Inversion in a circle, or Euclidean reflection in a line."""
    if c.is_line:
        if w is INF:
            return INF
        u = c.direction
        return c.center + u * u * (complex(w) - c.center).conjugate()
    if w is INF:
        return c.center
    w = complex(w)
    if w == c.center:
        return INF
    return c.center + c.radius ** 2 / (w - c.center).conjugate()


def orthocircle(a, b, allow_lines: bool = True, tol: float = DEFAULT_TOL) -> Circle:
    """The circle through ``a`` and ``b`` (on the unit circle) orthogonal to it.

    For antipodal vertices this is the diameter line, or
    :class:`AntipodalVertices` when ``allow_lines`` is false.
    """
    a, b = complex(a), complex(b)
    if abs(abs(a) - 1) > tol or abs(abs(b) - 1) > tol:
        raise ValueError("orthocircle vertices must lie on the unit circle")
    if abs(a - b) <= tol:
        raise ValueError("orthocircle vertices must be distinct")
    denom = 1 + (a * b.conjugate()).real
    if abs(denom) <= tol:
        if not allow_lines:
            raise AntipodalVertices(f"{a} and {b} are antipodal")
        return Circle.line(0j, a)
    center = (a + b) / denom
    radius = math.sqrt(max(abs(center) ** 2 - 1, 0.0))
    return Circle(center, radius)


# ---------------------------------------------------------------------------
# Vectorised helpers for point clouds and word enumeration


def apply_array(mats: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply 2x2 matrix (or stack of matrices) to finite points elementwise."""
    mats = np.asarray(mats)
    return (mats[..., 0, 0] * z + mats[..., 0, 1]) / (mats[..., 1, 0] * z + mats[..., 1, 1])


def homogeneous_array(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=complex)
    s = np.sqrt(1.0 + np.abs(z) ** 2)
    return z / s, 1 / s


def spherical_distance_h(p1, q1, p2, q2) -> np.ndarray:
    """Spherical distance between homogeneous coordinates (arrays allowed)."""
    return np.arctan2(np.abs(p1 * q2 - p2 * q1), np.abs(p1 * np.conj(p2) + q1 * np.conj(q2)))
