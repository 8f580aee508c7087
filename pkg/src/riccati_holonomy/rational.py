"""Rational functions of one complex variable.

A :class:`RationalMap1D` keeps its numerator as dense ascending coefficients
and its denominator in factored form ``lead * prod (t - r)^m``.  Keeping the
pole list explicit makes least-common-denominator sums, derivatives and the
cancellation of common factors exact up to rounding, which is all the small
objects of this package need (no symbolic algebra).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DegreeCapExceeded, PoleError

DEGREE_CAP = 64
ROOT_MERGE_TOL = 1e-8
CANCEL_TOL = 1e-10


def _trim(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(np.abs(c) > 1e-15 * scale)[0]
    return c[: nz[-1] + 1].copy()


def _polish_root(coeffs: np.ndarray, r: complex, mult: int) -> complex:
    # Newton on the (mult-1)-th derivative, where r is a simple root.
    d = coeffs
    for _ in range(mult - 1):
        d = P.polyder(d)
    dd = P.polyder(d)
    for _ in range(4):
        fv = P.polyval(r, d)
        fp = P.polyval(r, dd)
        if fp == 0:
            break
        step = fv / fp
        r = r - step
        if abs(step) < 1e-16 * max(1.0, abs(r)):
            break
    return complex(r)


def factor_polynomial(coeffs) -> tuple[complex, tuple[tuple[complex, int], ...]]:
    """Leading coefficient and clustered roots with multiplicities."""
    c = _trim(coeffs)
    lead = complex(c[-1])
    if c.size == 1:
        return lead, ()
    roots = np.roots(c[::-1])
    # multiple roots come out of the eigenvalue solver spread by ~eps**(1/m)
    unused = list(roots)
    clusters = []
    while unused:
        r0 = unused.pop(0)
        group = [r0]
        rad = 1e-4 * max(1.0, abs(r0))
        keep = []
        for r in unused:
            (group if abs(r - r0) <= rad else keep).append(r)
        unused = keep
        m = len(group)
        clusters.append((_polish_root(c, complex(np.mean(group)), m), m))
    return lead, tuple(clusters)


def _merge_roots(roots) -> tuple[tuple[complex, int], ...]:
    out: list[list] = []
    for r, m in roots:
        if m == 0:
            continue
        for item in out:
            if abs(item[0] - r) <= ROOT_MERGE_TOL * max(1.0, abs(r)):
                item[1] += m
                break
        else:
            out.append([complex(r), m])
    return tuple((r, m) for r, m in out if m > 0)


def _poly_from_roots(roots) -> np.ndarray:
    c = np.ones(1, dtype=complex)
    for r, m in roots:
        for _ in range(m):
            c = P.polymul(c, np.array([-r, 1], dtype=complex))
    return c


def _deflate(coeffs: np.ndarray, r: complex) -> np.ndarray:
    # synthetic division by (t - r), remainder dropped
    n = coeffs.size - 1
    if n == 0:
        return np.zeros(1, dtype=complex)
    q = np.zeros(n, dtype=complex)
    acc = 0j
    for k in range(n, 0, -1):
        acc = coeffs[k] + acc * r
        q[k - 1] = acc
    return q


@dataclass(frozen=True, eq=False)
class RationalMap1D:
    num: tuple
    lead: complex
    roots: tuple  # ((root, multiplicity), ...)

    # -- construction ---------------------------------------------------------

    @classmethod
    def build(cls, num, lead=1.0, roots=(), reduce=True) -> "RationalMap1D":
        num = _trim(num)
        roots = _merge_roots(roots)
        lead = complex(lead)
        if lead == 0:
            raise ZeroDivisionError("denominator identically zero")
        deg_den = sum(m for _, m in roots)
        if num.size - 1 > DEGREE_CAP or deg_den > DEGREE_CAP:
            raise DegreeCapExceeded(f"degree ({num.size - 1}, {deg_den}) above cap {DEGREE_CAP}")
        out = cls(tuple(complex(x) for x in num), lead, roots)
        return out.reduced() if reduce else out

    @classmethod
    def polynomial(cls, coeffs) -> "RationalMap1D":
        return cls.build(coeffs)

    @classmethod
    def constant(cls, value) -> "RationalMap1D":
        return cls.build([complex(value)])

    @classmethod
    def from_coefficients(cls, numerator, denominator) -> "RationalMap1D":
        """Build from ascending coefficient lists of numerator and denominator."""
        d = _trim(denominator)
        if np.all(d == 0):
            raise ZeroDivisionError("denominator identically zero")
        lead, roots = factor_polynomial(d)
        return cls.build(numerator, lead, roots)

    @classmethod
    def variable(cls) -> "RationalMap1D":
        return cls.build([0, 1])

    # -- basic views ------------------------------------------------------------

    @property
    def numerator(self) -> np.ndarray:
        return np.array(self.num, dtype=complex)

    @property
    def denominator(self) -> np.ndarray:
        return self.lead * _poly_from_roots(self.roots)

    @property
    def poles(self) -> list[complex]:
        return [r for r, _ in self.roots]

    def pole_order(self, p, tol: float = 1e-8) -> int:
        for r, m in self.roots:
            if abs(r - p) <= tol * max(1.0, abs(p)):
                return m
        return 0

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.num)

    def is_polynomial(self) -> bool:
        return not self.roots

    # -- evaluation -------------------------------------------------------------

    @cached_property
    def _scalar_data(self):
        tol = [1e-14 * max(1.0, abs(r)) for r, _ in self.roots]
        return tuple(reversed(self.num)), tuple(zip(self.roots, tol))

    def __call__(self, t):
        if isinstance(t, np.ndarray):
            return self._eval_array(t)
        t = complex(t)
        rev, roots = self._scalar_data
        den = self.lead
        for (r, m), eps in roots:
            dt = t - r
            if abs(dt) <= eps:
                raise PoleError(f"evaluation at pole {r}")
            den *= dt ** m
        acc = 0j
        for c in rev:
            acc = acc * t + c
        return acc / den

    def _eval_array(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        den = np.full(t.shape, self.lead, dtype=complex)
        for r, m in self.roots:
            dt = t - r
            if np.any(np.abs(dt) <= 1e-14 * max(1.0, abs(r))):
                raise PoleError(f"evaluation at pole {r}")
            den = den * dt ** m
        return P.polyval(t, np.array(self.num)) / den

    # -- reduction --------------------------------------------------------------

    def reduced(self) -> "RationalMap1D":
        num = np.array(self.num, dtype=complex)
        roots = [list(x) for x in self.roots]
        if np.all(num == 0):
            return RationalMap1D((0j,), 1 + 0j, ())
        changed = True
        while changed:
            changed = False
            for item in roots:
                r, m = item
                if m == 0 or num.size == 1:
                    continue
                scale = np.sum(np.abs(num) * max(1.0, abs(r)) ** np.arange(num.size))
                if abs(P.polyval(r, num)) <= CANCEL_TOL * scale:
                    num = _trim(_deflate(num, r))
                    item[1] -= 1
                    changed = True
        roots = tuple((r, m) for r, m in roots if m > 0)
        return RationalMap1D(tuple(complex(x) for x in num), self.lead, roots)

    # -- arithmetic -------------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "RationalMap1D":
        if isinstance(x, RationalMap1D):
            return x
        return RationalMap1D.constant(x)

    def __neg__(self):
        return RationalMap1D.build(-self.numerator, self.lead, self.roots, reduce=False)

    def __add__(self, other):
        other = self._coerce(other)
        common = _lcm_roots(self.roots, other.roots)
        n1 = P.polymul(self.numerator, _poly_from_roots(_roots_minus(common, self.roots))) / self.lead
        n2 = P.polymul(other.numerator, _poly_from_roots(_roots_minus(common, other.roots))) / other.lead
        return RationalMap1D.build(P.polyadd(n1, n2), 1.0, common)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalMap1D.build(
            P.polymul(self.numerator, other.numerator),
            self.lead * other.lead,
            self.roots + other.roots,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        lead, zeros = factor_polynomial(other.numerator)
        num = P.polymul(self.numerator, _poly_from_roots(other.roots)) * other.lead
        return RationalMap1D.build(num, self.lead * lead, self.roots + zeros)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalMap1D.constant(1) / (self ** (-k))
        out = RationalMap1D.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "RationalMap1D":
        """Exact derivative; the denominator gains one order at each pole."""
        if not self.roots:
            return RationalMap1D.build(P.polyder(self.numerator), self.lead, ())
        n = self.numerator
        sqfree = _poly_from_roots([(r, 1) for r, _ in self.roots])
        # D'/D = sum m_j/(t - r_j)  ->  times the square-free part
        dlog = np.zeros(1, dtype=complex)
        for j, (r, m) in enumerate(self.roots):
            others = [(s, 1) for k, (s, _) in enumerate(self.roots) if k != j]
            dlog = P.polyadd(dlog, m * _poly_from_roots(others))
        num = P.polysub(P.polymul(P.polyder(n), sqfree), P.polymul(n, dlog))
        new_roots = tuple((r, m + 1) for r, m in self.roots)
        return RationalMap1D.build(num, self.lead, new_roots)

    def __repr__(self):
        return f"RationalMap1D(num={list(self.num)}, lead={self.lead}, roots={list(self.roots)})"


def _lcm_roots(r1, r2):
    out = [list(x) for x in r1]
    for r, m in r2:
        for item in out:
            if abs(item[0] - r) <= ROOT_MERGE_TOL * max(1.0, abs(r)):
                item[1] = max(item[1], m)
                break
        else:
            out.append([r, m])
    return tuple((r, m) for r, m in out)


def _roots_minus(big, small):
    out = []
    for r, m in big:
        k = 0
        for s, n in small:
            if abs(s - r) <= ROOT_MERGE_TOL * max(1.0, abs(r)):
                k = n
                break
        if m - k > 0:
            out.append((r, m - k))
    return tuple(out)
