"""Compiled inner loop for lifting fiber paths through a developing map.

Same Dormand-Prince 5(4) tables and step-size control as
:func:`riccati_holonomy.integrate.integrate`; only the loop is compiled,
since radial probes near a natural boundary need tens of thousands of steps.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .integrate import _AM, _BV, _EV

COMPLETED, PUNCTURE, PHI_FLOOR, ESCAPE, COLLAPSE, BUDGET = range(6)


def pack_rational(f):
    roots = np.array([r for r, _ in f.roots], dtype=np.complex128)
    mults = np.array([m for _, m in f.roots], dtype=np.int64)
    return np.array(f.num, dtype=np.complex128), complex(f.lead), roots, mults


@njit(cache=True)
def _rat(num, lead, roots, mults, t):
    den = lead
    for k in range(roots.size):
        dt = t - roots[k]
        if abs(dt) <= 1e-14 * max(1.0, abs(roots[k])):
            return 0j, False
        den *= dt ** mults[k]
    acc = 0j
    for k in range(num.size - 1, -1, -1):
        acc = acc * t + num[k]
    return acc / den, True


@njit(cache=True)
def _rhs(y, u, n0, l0, r0, m0, n1, l1, r1, m1, n2, l2, r2, m2, out):
    t = y[0]
    x0, ok0 = _rat(n0, l0, r0, m0, t)
    x1, ok1 = _rat(n1, l1, r1, m1, t)
    x2, ok2 = _rat(n2, l2, r2, m2, t)
    if not (ok0 and ok1 and ok2) or x0 == 0:
        return False
    dt = -u * y[1] * y[1] / x0
    p = 0.5 * x1 * dt
    q = x0 * dt
    r = -x2 * dt
    out[0] = dt
    out[1] = p * y[1] + q * y[3]
    out[2] = p * y[2] + q * y[4]
    out[3] = r * y[1] - p * y[3]
    out[4] = r * y[2] - p * y[4]
    return True


@njit(cache=True)
def lift_segment(y0, u, length, err_tol, min_step, max_steps, poles, margin, budget, tlen0,
                 phi_floor, n0, l0, r0, m0, n1, l1, r1, m1, n2, l2, r2, m2, AM, BV, EV):
    """Returns (y, s, code, t_length, det_drift, track, steps)."""
    y = y0.copy()
    K = np.empty((7, 5), dtype=np.complex128)
    yi = np.empty(5, dtype=np.complex128)
    track = np.empty(1024, dtype=np.complex128)
    nt = 0
    tlen = tlen0
    drift = 0.0
    s = 0.0
    h = min(length, 1e-2)
    steps = 0
    rejected = 0
    while s < length:
        if steps + rejected >= max_steps:
            return y, s, BUDGET, tlen, drift, track[:nt], steps
        last = False
        if s + h >= length:
            h = length - s
            last = True
        ok = _rhs(y, u, n0, l0, r0, m0, n1, l1, r1, m1, n2, l2, r2, m2, K[0])
        for i in range(1, 7):
            if not ok:
                break
            for c in range(5):
                acc = y[c]
                for j in range(i):
                    acc += h * AM[i, j] * K[j, c]
                yi[c] = acc
            ok = _rhs(yi, u, n0, l0, r0, m0, n1, l1, r1, m1, n2, l2, r2, m2, K[i])
        e = np.inf
        ynew = np.empty(5, dtype=np.complex128)
        if ok:
            scale = 1.0
            emax = 0.0
            for c in range(5):
                acc = y[c]
                err = 0j
                for j in range(7):
                    acc += h * BV[j] * K[j, c]
                    err += h * EV[j] * K[j, c]
                ynew[c] = acc
                scale = max(scale, abs(y[c]), abs(acc))
                emax = max(emax, abs(err))
            e = emax / scale
            if not np.isfinite(e):
                e = np.inf
        allowed = err_tol * h
        if e <= allowed:
            s = length if last else s + h
            steps += 1
            det = ynew[1] * ynew[4] - ynew[2] * ynew[3]
            drift += abs(det - 1)
            sq = np.sqrt(det)
            for c in range(1, 5):
                ynew[c] /= sq
            t = ynew[0]
            tlen += abs(t - y[0])
            y = ynew
            if nt == track.size:
                bigger = np.empty(2 * nt, dtype=np.complex128)
                bigger[:nt] = track
                track = bigger
            track[nt] = t
            nt += 1
            for k in range(poles.size):
                if abs(t - poles[k]) < margin:
                    return y, s, PUNCTURE, tlen, drift, track[:nt], steps
            a0, _ = _rat(n0, l0, r0, m0, t)
            if abs(a0) / abs(y[1]) ** 2 < phi_floor:
                return y, s, PHI_FLOOR, tlen, drift, track[:nt], steps
            if tlen > budget:
                return y, s, ESCAPE, tlen, drift, track[:nt], steps
            if e == 0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * (allowed / e) ** 0.2))
            h = min(h * fac, length)
        else:
            rejected += 1
            if not np.isfinite(e):
                fac = 0.2
            else:
                fac = min(0.9, max(0.1, 0.9 * (allowed / e) ** 0.2))
            h = h * fac
            if h < min_step and length - s > min_step:
                return y, s, COLLAPSE, tlen, drift, track[:nt], steps
    return y, s, COMPLETED, tlen, drift, track[:nt], steps


def tables():
    return _AM, _BV, _EV
