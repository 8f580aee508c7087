"""Contracting semigroups on a disc.

Cantor limit sets with symbolic addresses, ring moduli of nested cylinders,
the Loray-Rebelo renormalization ``g -> f^-N [f, g] f^N`` and the inverse
iteration that produces a limit set with nonempty interior.

Addresses are 1-based; address ``(i1, ..., iN)`` names the cylinder
``h_i1 o ... o h_iN (B)`` where ``B`` is the closed disc of the common
domain radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ContractionFailure,
    CoverageGap,
    DegreeOverflow,
    DomainEscape,
    NotNested,
    SeparationViolated,
)
from .moebius import Circle, Moebius

BOUNDARY_SAMPLES = 128
INJECTIVITY_SAMPLES = 256
CONTRACTION_MARGIN = 1e-9
SEPARATION_GAP = 1e-6


def _circle_points(radius: float, n: int) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(n) / n)


def _is_simple_curve(z: np.ndarray) -> bool:
    """No two non-adjacent edges of the closed polygon through ``z`` cross."""
    a = z
    b = np.roll(z, -1)
    d = b - a

    def cross(u, v):
        return (np.conj(u) * v).imag

    o1 = cross(d[:, None], a[None, :] - a[:, None])
    o2 = cross(d[:, None], b[None, :] - a[:, None])
    o3 = cross(d[None, :], a[:, None] - a[None, :])
    o4 = cross(d[None, :], b[:, None] - a[None, :])
    hit = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    n = z.size
    gap = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    hit &= (gap > 1) & (gap < n - 1)
    return not bool(np.any(hit))


@dataclass(frozen=True, eq=False)
class DiscMap:
    """A holomorphic map on the closed disc ``|z| <= domain_radius``.

    ``kind`` is ``"moebius"`` (data: :class:`Moebius`), ``"affine"``
    (data: ``(scale, offset)``) or ``"polynomial"`` (data: ascending
    coefficients).  With ``identity_plus`` a polynomial stores only its
    deviation from the identity, so maps within 1e-50 of ``id`` keep
    their information.
    """

    kind: str
    data: object
    domain_radius: float = 1.0
    identity_plus: bool = False

    def __post_init__(self):
        if not self.domain_radius > 0:
            raise ValueError("domain_radius must be positive")
        if self.kind == "moebius":
            if not isinstance(self.data, Moebius):
                raise TypeError("moebius kind needs a Moebius")
        elif self.kind == "affine":
            s, o = self.data
            object.__setattr__(self, "data", (complex(s), complex(o)))
        elif self.kind == "polynomial":
            c = np.atleast_1d(np.asarray(self.data, dtype=complex))
            object.__setattr__(self, "data", c)
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.identity_plus and self.kind != "polynomial":
            raise ValueError("identity_plus applies to polynomial maps only")
        if not self.is_injective():
            raise ValueError("map is not injective on its disc")

    @classmethod
    def moebius(cls, m: Moebius, domain_radius: float = 1.0) -> "DiscMap":
        return cls("moebius", m, domain_radius)

    @classmethod
    def affine(cls, scale, offset, domain_radius: float = 1.0) -> "DiscMap":
        return cls("affine", (scale, offset), domain_radius)

    @classmethod
    def polynomial(cls, coeffs, domain_radius: float = 1.0, identity_plus: bool = False) -> "DiscMap":
        return cls("polynomial", coeffs, domain_radius, identity_plus)

    @classmethod
    def disc_automorphism(cls, c, domain_radius: float = 1.0) -> "DiscMap":
        """``(z - c) / (1 - conj(c) z)``."""
        c = complex(c)
        return cls.moebius(Moebius.from_entries(1, -c, -c.conjugate(), 1), domain_radius)

    # -- evaluation --------------------------------------------------------

    def deviation(self, z):
        """``g(z) - z``, exact for identity-plus polynomials."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "polynomial" and self.identity_plus:
            return np.polynomial.polynomial.polyval(z, self.data)
        return self(z) - z

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "moebius":
            m = self.data
            return (m.a * z + m.b) / (m.c * z + m.d)
        if self.kind == "affine":
            s, o = self.data
            return s * z + o
        out = np.polynomial.polynomial.polyval(z, self.data)
        return z + out if self.identity_plus else out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "moebius":
            m = self.data
            return 1 / (m.c * z + m.d) ** 2
        if self.kind == "affine":
            return np.full(z.shape, self.data[0])
        d = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(self.data))
        return 1 + d if self.identity_plus else d

    def inverse(self, w, tol: float = 1e-14, max_iter: int = 60):
        """Preimage of ``w``; Newton from the linearization for polynomials."""
        w = np.asarray(w, dtype=complex)
        if self.kind == "moebius":
            m = self.data
            return (m.d * w - m.b) / (-m.c * w + m.a)
        if self.kind == "affine":
            s, o = self.data
            return (w - o) / s
        c = self.data
        c0 = c[0] if c.size else 0j
        c1 = (c[1] if c.size > 1 else 0j) + (1 if self.identity_plus else 0)
        if c1 == 0:
            raise ValueError("polynomial has a critical point at 0; no linear start")
        z = (w - c0) / c1
        for _ in range(max_iter):
            step = (self(z) - w) / self.derivative(z)
            z = z - step
            if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
                break
        return z

    def inverse_derivative(self, w):
        return 1 / self.derivative(self.inverse(w))

    def as_moebius(self) -> Moebius:
        if self.kind == "moebius":
            return self.data
        if self.kind == "affine":
            s, o = self.data
            return Moebius.from_entries(s, o, 0, 1)
        raise ValueError("polynomial maps are not Moebius")

    @property
    def is_affine(self) -> bool:
        if self.kind == "affine":
            return True
        if self.kind == "moebius":
            return self.data.c == 0
        c = self.data
        return bool(np.all(c[2:] == 0))

    # -- checks ------------------------------------------------------------

    def boundary(self, n: int = BOUNDARY_SAMPLES) -> np.ndarray:
        return _circle_points(self.domain_radius, n)

    def image_boundary(self, n: int = BOUNDARY_SAMPLES) -> np.ndarray:
        return self(self.boundary(n))

    def is_injective(self) -> bool:
        if self.kind == "moebius":
            m = self.data
            return m.c == 0 or abs(m.d / m.c) > self.domain_radius
        if self.kind == "affine":
            return self.data[0] != 0
        # no critical point in the closed disc, and a simple boundary image
        # (a holomorphic map injective on the circle is injective on the disc)
        dc = np.polynomial.polynomial.polyder(self.data)
        if self.identity_plus:
            dc = np.polynomial.polynomial.polyadd(dc, [1.0])
        dc = np.atleast_1d(dc)
        big = np.nonzero(np.abs(dc) > 1e-15 * np.max(np.abs(dc), initial=0.0))[0]
        if big.size == 0:
            return False
        crit = np.roots(dc[: big[-1] + 1][::-1])
        if np.any(np.abs(crit) <= self.domain_radius):
            return False
        return _is_simple_curve(self.image_boundary(INJECTIVITY_SAMPLES))

    def is_contracting(self) -> bool:
        img = self.image_boundary()
        return bool(np.max(np.abs(img)) < self.domain_radius - CONTRACTION_MARGIN)

    def image_circle(self) -> Circle:
        """Boundary of the image disc (Moebius and affine kinds only)."""
        c, r = _image_circles(self.as_moebius().as_array()[None], self.domain_radius)
        return Circle(complex(c[0]), float(r[0]))


def _image_circles(mats: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Centre and radius of the image of ``|z| = radius`` under a stack of matrices.

    The centre is the image of the reflection of the pole in the circle.
    """
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    zstar = -radius ** 2 * np.conj(c) / np.conj(d)
    center = (a * zstar + b) / (c * zstar + d)
    edge = (a * radius + b) / (c * radius + d)
    return center, np.abs(edge - center)


def winding_contains(boundary: np.ndarray, z: complex) -> bool:
    """Point-in-curve test by the winding number of a sampled closed curve."""
    v = np.asarray(boundary) - complex(z)
    if np.any(v == 0):
        return True
    turn = np.sum(np.angle(np.roll(v, -1) / v))
    return abs(turn) > math.pi


# ---------------------------------------------------------------------------
# iterated function systems


@dataclass(frozen=True, eq=False)
class IFSystem:
    maps: tuple
    separation: bool = field(init=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        R = maps[0].domain_radius
        if any(abs(m.domain_radius - R) > 1e-15 for m in maps):
            raise ValueError("all maps must share the domain radius")
        if not all(m.is_contracting() for m in maps):
            raise ValueError("all maps must send the closed disc into the open disc")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "separation", self.min_gap() > SEPARATION_GAP)

    @property
    def domain_radius(self) -> float:
        return self.maps[0].domain_radius

    @property
    def is_moebius(self) -> bool:
        return all(m.kind in ("moebius", "affine") for m in self.maps)

    def min_gap(self) -> float:
        """Smallest boundary-sample distance between two images; 0 if one contains the other."""
        imgs = [m.image_boundary() for m in self.maps]
        gap = math.inf
        for i in range(len(imgs)):
            for j in range(i + 1, len(imgs)):
                if winding_contains(imgs[i], imgs[j][0]) or winding_contains(imgs[j], imgs[i][0]):
                    return 0.0
                gap = min(gap, float(np.min(np.abs(imgs[i][:, None] - imgs[j][None, :]))))
        return gap


@dataclass(frozen=True)
class AddressedPoint:
    address: tuple
    point: complex
    cylinder_diam: float


@dataclass
class Cylinders:
    """All cylinders of one depth, addresses in lexicographic order.

    For Moebius systems ``centers``/``radii`` describe the exact image
    circles; otherwise ``boundaries`` holds sampled image curves.
    """

    addresses: np.ndarray
    points: np.ndarray
    diameters: np.ndarray
    centers: np.ndarray | None = None
    radii: np.ndarray | None = None
    boundaries: np.ndarray | None = None


def _addresses(l: int, depth: int) -> np.ndarray:
    idx = np.arange(l ** depth)
    digits = [(idx // l ** (depth - 1 - k)) % l for k in range(depth)]
    return np.stack(digits, axis=1) + 1 if depth else np.zeros((1, 0), dtype=int)


def word_matrices(ifs: IFSystem, depth: int) -> np.ndarray:
    """Matrices of ``h_i1 o ... o h_iN`` for all words, lexicographic in the address."""
    gens = np.array([m.as_moebius().as_array() for m in ifs.maps])
    mats = np.eye(2, dtype=complex)[None]
    for _ in range(depth):
        mats = np.concatenate([g @ mats for g in gens])
        mats /= np.sqrt(mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0])[:, None, None]
    return mats


def cylinders(ifs: IFSystem, depth: int, samples: int = BOUNDARY_SAMPLES) -> Cylinders:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    R = ifs.domain_radius
    addr = _addresses(len(ifs.maps), depth)
    if ifs.is_moebius:
        mats = word_matrices(ifs, depth)
        c, r = _image_circles(mats, R)
        return Cylinders(addr, c, 2 * r, centers=c, radii=r)
    pts = np.zeros(1, dtype=complex)
    bnd = _circle_points(R, samples)[None]
    for _ in range(depth):
        pts = np.concatenate([m(pts) for m in ifs.maps])
        bnd = np.concatenate([m(bnd) for m in ifs.maps])
    diam = np.array([np.max(np.abs(b[:, None] - b[None, :])) for b in bnd])
    return Cylinders(addr, pts, diam, boundaries=bnd)


def limit_set(ifs: IFSystem, depth: int) -> list[AddressedPoint]:
    """One point per word of length ``depth``: the centre of its cylinder."""
    if not ifs.separation:
        raise SeparationViolated("images of the closed disc are not pairwise disjoint")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cyl = cylinders(ifs, depth)
    return [
        AddressedPoint(tuple(int(i) for i in a), complex(p), float(d))
        for a, p, d in zip(cyl.addresses, cyl.points, cyl.diameters)
    ]


def address_point(ifs: IFSystem, address: Sequence[int]) -> AddressedPoint:
    """Cylinder centre for a single (truncated) address."""
    R = ifs.domain_radius
    word = [ifs.maps[i - 1] for i in address]
    if ifs.is_moebius:
        m = np.eye(2, dtype=complex)
        for h in word:
            m = m @ h.as_moebius().as_array()
        c, r = _image_circles(m[None], R)
        return AddressedPoint(tuple(address), complex(c[0]), float(2 * r[0]))
    z = np.array([0j])
    b = _circle_points(R, BOUNDARY_SAMPLES)
    for h in reversed(word):
        z, b = h(z), h(b)
    return AddressedPoint(tuple(address), complex(z[0]), float(np.max(np.abs(b[:, None] - b[None, :]))))


def min_cylinder_gap(cyl: Cylinders, chunk: int = 512) -> float:
    """Smallest gap between two distinct cylinders (negative when circles overlap)."""
    if cyl.centers is not None:
        c, r = cyl.centers, cyl.radii
        best = math.inf
        for lo in range(0, c.size, chunk):
            d = np.abs(c[lo : lo + chunk, None] - c[None, :]) - r[lo : lo + chunk, None] - r[None, :]
            rows = np.arange(lo, min(lo + chunk, c.size))
            d[rows - lo, rows] = math.inf
            best = min(best, float(d.min()))
        return best
    b = cyl.boundaries
    best = math.inf
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            best = min(best, float(np.min(np.abs(b[i][:, None] - b[j][None, :]))))
    return best


# ---------------------------------------------------------------------------
# ring moduli


def ring_modulus(outer: Circle, inner: Circle) -> float:
    """Modulus ``arccosh(delta)`` of the ring between nested circles (no 1/2pi factor)."""
    if outer.is_line or inner.is_line:
        raise NotNested("ring moduli need two round circles")
    R, r = outer.radius, inner.radius
    d = abs(outer.center - inner.center)
    if not d + r < R:
        raise NotNested(f"inner circle (centre {inner.center}, radius {r}) is not inside the outer one")
    delta = (R * R + r * r - d * d) / (2 * R * r)
    return math.acosh(max(delta, 1.0))


def annulus_modulus(outer_radius: float, inner: Circle) -> float:
    return ring_modulus(Circle(0j, float(outer_radius)), inner)


@dataclass
class ModulusGrowth:
    """``c_estimate``: min of m(I)/N over words of the deepest level.

    ``c_all_depths`` is the same minimum over every level 1..max_depth.
    """

    c_estimate: float
    c_all_depths: float
    min_modulus: list
    violations: list


def modulus_growth_check(ifs: IFSystem, max_depth: int, tol: float = 1e-8) -> ModulusGrowth:
    """``m(B - h_I B)`` for all words up to ``max_depth`` and the superadditivity chain

    ``m(B - h_{iJ} B) >= m(B - h_i B) + m(h_i B - h_{iJ} B)``.
    """
    if not ifs.is_moebius:
        raise ValueError("modulus growth needs Moebius (or affine) maps")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    R = ifs.domain_radius
    outer = Circle(0j, R)
    l = len(ifs.maps)
    first = [m.image_circle() for m in ifs.maps]
    m_first = [annulus_modulus(R, c) for c in first]
    mins, violations = [], []
    c_all = math.inf
    c_last = math.inf
    for N in range(1, max_depth + 1):
        cyl = cylinders(ifs, N)
        ms = np.array([ring_modulus(outer, Circle(complex(c), float(r))) for c, r in zip(cyl.centers, cyl.radii)])
        mins.append(float(ms.min()))
        ratio = float(ms.min() / N)
        c_all = min(c_all, ratio)
        c_last = ratio
        if N >= 2:
            block = l ** (N - 1)
            for k, (c, r, m_I) in enumerate(zip(cyl.centers, cyl.radii, ms)):
                i = k // block
                inner = ring_modulus(first[i], Circle(complex(c), float(r)))
                if m_I < m_first[i] + inner - tol:
                    violations.append((tuple(int(a) for a in cyl.addresses[k]), float(m_I), m_first[i] + inner))
    return ModulusGrowth(c_last, c_all, mins, violations)


# ---------------------------------------------------------------------------
# Loray-Rebelo renormalization

RENORM_RADIUS = 1 / 3


def _disc_grid(radius: float, n: int) -> np.ndarray:
    x = np.linspace(-radius, radius, n)
    z = (x[None, :] + 1j * x[:, None]).ravel()
    z = z[np.abs(z) <= radius * (1 + 1e-12)]
    return np.concatenate([z, _circle_points(radius, BOUNDARY_SAMPLES)])


def select_power(lam: complex, domain_radius: float) -> int:
    """Smallest ``N >= 1`` with ``|lam|^N * domain_radius < 1/3``."""
    a = abs(lam)
    N = 1
    while a ** N * domain_radius >= RENORM_RADIUS:
        N += 1
    return N


@dataclass
class RenormStep:
    map: DiscMap
    sup_deviation: float
    residual: float


@dataclass
class Renormalization:
    lam: complex
    N: int
    steps: list
    affine_degenerate: bool

    @property
    def sups(self) -> list:
        return [s.sup_deviation for s in self.steps]

    def __iter__(self):
        return iter((s.map, s.sup_deviation) for s in self.steps)

    def __len__(self):
        return len(self.steps)


def _solve_preimage(g: DiscMap, w: np.ndarray, max_iter: int = 100) -> np.ndarray:
    """``u`` with ``u + p(u) = w`` by fixed-point iteration (``p`` is small)."""
    u = w.copy()
    for _ in range(max_iter):
        nxt = w - g.deviation(u)
        done = np.all(np.abs(nxt - u) <= 1e-16 * np.maximum(np.abs(w), 1e-300))
        u = nxt
        if done:
            break
    return u


def _fit_deviation(z: np.ndarray, values: np.ndarray, degree: int, radius: float) -> tuple[np.ndarray, float]:
    """Least-squares fit in the scaled variable ``z/radius``; returns (z-coefficients, relative residual)."""
    scale = float(np.max(np.abs(values)))
    if scale == 0:
        return np.zeros(degree + 1, dtype=complex), 0.0
    V = np.polynomial.polynomial.polyvander(z / radius, degree)
    a, *_ = np.linalg.lstsq(V, values / scale, rcond=None)
    resid = float(np.max(np.abs(V @ a - values / scale)))
    coeffs = a * scale / radius ** np.arange(degree + 1)
    return coeffs, resid


def loray_rebelo_renormalize(lam: complex, g: DiscMap, N: int | None = None, iterations: int = 20,
                             grid: int = 64, degree: int = 24,
                             residual_tol: float = 1e-9) -> Renormalization:
    """``g_{k+1} = f^-N o [f, g_k] o f^N`` with ``f(z) = lam z`` and ``[f, g] = f g f^-1 g^-1``.

    In deviation form ``g = id + p``:
    ``[f, g](w) - w = lam p(u / lam) - p(u)`` with ``u = g^-1(w)``.
    Iterates are refit to polynomials on the radius-1/3 disc.
    """
    lam = complex(lam)
    if not abs(lam) < 1 or lam == 0:
        raise ValueError("need 0 < |lambda| < 1")
    if N is None:
        N = select_power(lam, g.domain_radius)
    if N < 1:
        raise ValueError("N must be at least 1")
    rho = RENORM_RADIUS
    lamN = lam ** N
    z = _disc_grid(rho, grid)
    steps = []

    if g.is_affine:
        # [f, g] is the translation by b (lam - 1) for g = s z + b
        b = complex(g(0j))
        for _ in range(iterations):
            b = b * (lam - 1) / lamN
            gk = DiscMap.polynomial([b], rho, identity_plus=True)
            steps.append(RenormStep(gk, abs(b), 0.0))
        return Renormalization(lam, N, steps, True)

    current = g
    for _ in range(iterations):
        w = lamN * z
        u = _solve_preimage(current, w)
        back = u / lam
        if np.max(np.abs(back)) > current.domain_radius:
            raise DomainEscape(f"f^-1 g^-1 left the disc of radius {current.domain_radius}")
        dev = (lam * current.deviation(back) - current.deviation(u)) / lamN
        coeffs, resid = _fit_deviation(z, dev, degree, rho)
        if resid > residual_tol:
            raise DegreeOverflow(f"refit residual {resid:.2e} exceeds {residual_tol:.0e} at degree {degree}")
        current = DiscMap.polynomial(coeffs, rho, identity_plus=True)
        steps.append(RenormStep(current, float(np.max(np.abs(current.deviation(z)))), resid))
    return Renormalization(lam, N, steps, False)


# ---------------------------------------------------------------------------
# inverse iteration with nonempty interior


@dataclass(frozen=True, eq=False)
class InverseBranch:
    """``h = g^-1 o f^k``; its inverse is ``p -> g(p) / lam^k``."""

    g: DiscMap
    scale: complex

    def __call__(self, z):
        return self.g.inverse(self.scale * np.asarray(z, dtype=complex))

    def inverse(self, p):
        return self.g(p) / self.scale


@dataclass
class CoverageReport:
    points: np.ndarray
    chains: np.ndarray  # (n_points, steps) 0-based map indices
    max_modulus: float
    complete: bool


@dataclass
class DenseLimit:
    h_list: list
    M_bound: float
    contraction: float
    coverage: CoverageReport


def _quarter_disc_samples() -> np.ndarray:
    rings = [_circle_points(0.25 * s, 64) for s in np.linspace(1 / 16, 1, 16)]
    return np.concatenate([[0j]] + rings)


def dense_limit_construction(lam: complex, k: int, g_list: Sequence[DiscMap], r: float,
                             grid: int = 41, steps: int = 30) -> DenseLimit:
    """Maps ``h_i = g_i^-1 o f^k`` whose inverse orbits never leave the r-disc.

    ``M`` bounds ``|(g_i^-1)'|`` on the 1/4-disc, so each ``h_i`` contracts by
    ``M |lam|^k``; the construction asks for ``2 M |lam|^k < 1``.  Coverage:
    from every grid point, repeatedly apply ``h_i^-1(p) = g_i(p) / lam^k``
    with the ``i`` minimising ``|g_i(p)|``; it is admissible when
    ``|g_i(p)| <= |lam|^k r``.
    """
    lam = complex(lam)
    if abs(lam.imag) <= 1e-12 or not abs(lam) < 1:
        raise ValueError("lambda must be non-real with |lambda| < 1")
    if not 0 <= r < 1 / 8:
        raise ValueError("r must lie in [0, 1/8)")
    if not g_list:
        raise ValueError("g_list is empty")
    eighth = _circle_points(1 / 8, 64)
    for g in g_list:
        back = g.inverse(eighth)
        if not np.all(np.isfinite(back)) or np.max(np.abs(g(back) - eighth)) > 1e-10:
            raise ValueError("each g_i needs an inverse on the 1/8-disc")
    lk = lam ** k
    w = _quarter_disc_samples()
    M = max(float(np.max(np.abs(g.inverse_derivative(w)))) for g in g_list)
    contraction = 2 * M * abs(lk)
    if contraction >= 1:
        raise ContractionFailure(f"2 M |lambda|^k = {contraction:.4f} >= 1")
    h_list = [InverseBranch(g, lk) for g in g_list]

    x = np.linspace(-r, r, grid)
    P = (x[None, :] + 1j * x[:, None]).ravel()
    P = P[np.abs(P) <= r * (1 + 1e-12)]
    rho = abs(lk) * r
    p = P.copy()
    chains = np.empty((P.size, steps), dtype=np.int64)
    worst = float(np.max(np.abs(P))) if P.size else 0.0
    for s in range(steps):
        vals = np.array([g(p) for g in g_list])
        i = np.argmin(np.abs(vals), axis=0)
        best = vals[i, np.arange(p.size)]
        bad = np.abs(best) > rho * (1 + 1e-12)
        if np.any(bad):
            j = int(np.argmax(bad))
            raise CoverageGap(f"step {s}: no admissible map at p = {p[j]:.6g} (from grid point {P[j]:.6g})")
        chains[:, s] = i
        p = best / lk
        worst = max(worst, float(np.max(np.abs(p))) if p.size else 0.0)
    return DenseLimit(h_list, M, contraction, CoverageReport(P, chains, worst, True))


def hex_cover_maps(lam: complex, k: int, r: float, safety: float = 0.95) -> list[DiscMap]:
    """Disc automorphisms ``(z - c)/(1 - conj(c) z)`` centred on a hexagonal lattice.

    Spacing ``sqrt(3) * safety * (1 - (r + s)^2) * |lam|^k r`` keeps every point of
    the r-disc within ``|lam|^k r`` (after the automorphism) of some centre.
    """
    rho = abs(complex(lam)) ** k * r
    s = math.sqrt(3) * safety * rho
    for _ in range(20):
        s = math.sqrt(3) * safety * rho * (1 - (r + s) ** 2)
    reach = r + s
    n = int(math.ceil(reach / s)) + 1
    w = complex(0.5, math.sqrt(3) / 2)
    centres = [s * (a + b * w) for a in range(-2 * n, 2 * n + 1) for b in range(-2 * n, 2 * n + 1)]
    centres = sorted((c for c in centres if abs(c) <= reach), key=lambda c: (abs(c), math.atan2(c.imag, c.real)))
    return [DiscMap.disc_automorphism(c) for c in centres]
