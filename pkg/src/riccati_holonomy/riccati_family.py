"""The explicit degree-four family, its Schwarzian, and compactification arithmetic."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleOrderTooHigh, ZeroAlpha0
from .rational import RationalMap1D
from .transport import RiccatiSystem

FOURTH_ROOTS = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass(frozen=True)
class ExplicitFamilyParam:
    lam: complex = 0j

    def __post_init__(self):
        lam = complex(self.lam)
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise ValueError("lambda must be finite")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True, eq=False)
class QuadDifferential:
    """``q(t) dt^2`` with a list of punctures (and optionally extra allowed poles)."""

    q: RationalMap1D
    punctures: tuple
    extra_poles: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "punctures", tuple(complex(p) for p in self.punctures))
        allowed = self.punctures + tuple(complex(p) for p in self.extra_poles)
        for r in self.q.poles:
            if all(abs(r - p) > 1e-8 for p in allowed):
                raise ValueError(f"pole {r} of q is not a declared puncture")


@dataclass(frozen=True)
class CuspData:
    punctures: tuple
    n: tuple

    def __post_init__(self):
        if len(self.punctures) != len(self.n):
            raise ValueError("punctures and n must have equal length")
        if any(int(k) != k or k < 0 for k in self.n):
            raise ValueError("n_p must be nonnegative integers")

    @classmethod
    def from_counts(cls, n) -> "CuspData":
        n = tuple(int(k) for k in n)
        pts = tuple(cmath.exp(2j * math.pi * k / max(len(n), 1)) for k in range(len(n)))
        return cls(pts, n)


def _as_lambda(p) -> complex:
    return p.lam if isinstance(p, ExplicitFamilyParam) else complex(p)


def _t4_minus_1() -> tuple:
    return FOURTH_ROOTS


def explicit_riccati(p) -> RiccatiSystem:
    """``dy/dt = [1 + 2t(lam - t^2) y + (t^2 + t^2 lam^2 - 2 lam) y^2] / (t^4 - 1)``."""
    lam = _as_lambda(p)
    den = [(r, 1) for r in FOURTH_ROOTS]
    a0 = RationalMap1D.build([1], 1, den)
    a1 = RationalMap1D.build([0, 2 * lam, 0, -2], 1, den)
    a2 = RationalMap1D.build([-2 * lam, 0, 1 + lam * lam], 1, den)
    return RiccatiSystem(a0, a1, a2)


def explicit_schwarzian(p) -> RationalMap1D:
    """``2 (4t^2 + lam (t^4 - 1)) / (t^4 - 1)^2``."""
    lam = _as_lambda(p)
    return RationalMap1D.build([-2 * lam, 0, 8, 0, 2 * lam], 1, [(r, 2) for r in FOURTH_ROOTS])


def explicit_schwarzian_value(lam, t):
    """Closed form evaluated directly (no rational-function machinery)."""
    t = np.asarray(t, dtype=complex)
    u = t ** 4 - 1
    return 2 * (4 * t * t + lam * u) / (u * u)


def explicit_quadratic(p) -> QuadDifferential:
    return QuadDifferential(explicit_schwarzian(p), FOURTH_ROOTS)


def schwarzian_of_riccati(sys: RiccatiSystem) -> RationalMap1D:
    """Schwarzian of the holonomy ``phi = -b/a`` of a Riccati system.

    ``2 a0 a2 - a1^2/2 + a1 (a0'/a0) - a1' - 3/2 (a0'/a0)^2 + a0''/a0``
    """
    a0, a1, a2 = sys.alpha0, sys.alpha1, sys.alpha2
    if a0.is_zero():
        raise ZeroAlpha0("alpha0 vanishes identically")
    d0 = a0.derivative()
    dd0 = d0.derivative()
    g = d0 / a0
    return (
        2 * a0 * a2
        - 0.5 * (a1 * a1)
        + a1 * g
        - a1.derivative()
        - 1.5 * (g * g)
        + dd0 / a0
    )


@dataclass(frozen=True)
class PunctureReport:
    puncture: complex
    order: int
    coefficient: complex
    passes: bool


def parabolic_type_check(qd: QuadDifferential, tol: float = 1e-8) -> tuple[bool, list[PunctureReport]]:
    """Coefficient of ``(z-p)^-2`` at each puncture; parabolic iff all equal 1/2."""
    q = qd.q
    reports = []
    for p in qd.punctures:
        m = q.pole_order(p)
        if m > 2:
            raise PoleOrderTooHigh(f"pole of order {m} at {p}")
        if m < 2:
            coef = 0j
        else:
            others = RationalMap1D.build(q.numerator, q.lead,
                                         [(r, k) for r, k in q.roots if abs(r - p) > 1e-8], reduce=False)
            coef = complex(others(p))
        reports.append(PunctureReport(p, m, coef, abs(coef - 0.5) <= tol))
    return all(r.passes for r in reports), reports


def local_model_solution(n: int, c, x):
    """``t(x) = (c - x) e^{n x}``, solving ``dt/dx = -e^{n x} + n t``."""
    return (complex(c) - x) * np.exp(n * x)


def tangency_count(cd: CuspData) -> int:
    return int(sum(cd.n))


def diagonal_self_intersection(cd: CuspData) -> int:
    return 2 + sum(k - 1 for k in cd.n)


def hirzebruch_note(self_intersection: int) -> str:
    """Informational reading of a non-positive self-intersection."""
    if self_intersection <= 0:
        return f"section of self-intersection {self_intersection}: Hirzebruch surface F_{-self_intersection}"
    if self_intersection == 1:
        return "section of self-intersection +1: F_1, blows down to P^2"
    return f"section of self-intersection {self_intersection}"


def original_form_residual(p, x, y, reading: str = "consistent") -> tuple[complex, complex]:
    """Coefficients ``(A, B)`` of the degree-four form ``A dx + B dy``.

    ``reading="consistent"`` uses ``-x y^2 (2 lam x + 1)`` in ``B``, the only
    version whose blow-up ``x = t y`` gives the explicit Riccati equation.
    ``reading="printed"`` uses the literal ``-2 x y^2 (lam x - 1)``.
    """
    lam = _as_lambda(p)
    x, y = complex(x), complex(y)
    L = (1 + lam * lam) * y * y * x * x - 2 * lam * y ** 4
    A = (y * y * (2 * lam * x + 1) - 2 * x ** 3 + L) * y
    if reading == "consistent":
        B = x ** 4 - x * y * y * (2 * lam * x + 1) + y ** 4 - L * x
    elif reading == "printed":
        B = x ** 4 - 2 * x * y * y * (lam * x - 1) + y ** 4 - L * x
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return A, B


def blowup_consistency(p, sample_count: int = 100, reading: str = "consistent", seed: int = 0) -> float:
    """Largest normalised cross term between the blown-up form and the Riccati form.

    With ``x = t y``, ``A dx + B dy = A y dt + (A t + B) dy``; this must be
    proportional to ``P dt - (t^4 - 1) dy``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    lam = _as_lambda(p)
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < sample_count:
        t = complex(*rng.uniform(-1.5, 1.5, 2))
        y = complex(*rng.uniform(-1.5, 1.5, 2))
        if abs(y) < 1e-3:
            continue
        A, B = original_form_residual(lam, t * y, y, reading)
        cdt, cdy = A * y, A * t + B
        P = 1 + 2 * t * (lam - t * t) * y + (t * t + t * t * lam * lam - 2 * lam) * y * y
        Q = -(t ** 4 - 1)
        cross = cdt * Q - cdy * P
        scale = abs(cdt * Q) + abs(cdy * P)
        if scale == 0:
            continue
        worst = max(worst, abs(cross) / scale)
        done += 1
    return worst


def schwarzian_residuals(p, samples: int = 100, seed: int = 0, box: float = 1.5,
                         min_gap: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Relative gap between the Schwarzian of the Riccati system and the closed form.

    Sample points are drawn uniformly from ``[-box, box]^2`` and kept when
    ``|t^4 - 1| > min_gap``.
    """
    lam = _as_lambda(p)
    S = schwarzian_of_riccati(explicit_riccati(lam))
    rng = np.random.default_rng(seed)
    pts: list[complex] = []
    while len(pts) < samples:
        t = complex(*rng.uniform(-box, box, 2))
        if abs(t ** 4 - 1) > min_gap:
            pts.append(t)
    t = np.array(pts)
    exact = explicit_schwarzian_value(lam, t)
    got = np.array([S(x) for x in t])
    return t, np.abs(got - exact) / np.maximum(np.abs(exact), 1e-300)
