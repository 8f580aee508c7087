"""Embedded Dormand-Prince 5(4) integrator for complex ODE systems.

The integrator runs over a real parameter ``s in [0, length]`` and controls
the local error per unit length in the max-norm (relative to the state size
once it exceeds one).  It exposes a per-step hook so callers can renormalise
the state or stop on their own criteria; scipy's ``solve_ivp`` offers
neither without re-entering the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PoleError, StepCollapse


@dataclass(frozen=True)
class Tolerances:
    """Shared numeric settings for transport and continuation."""

    err_tol: float = 1e-10
    min_step: float = 1e-12
    pole_margin: float = 1e-3
    max_steps: int = 1_000_000

    def replace(self, **kw) -> "Tolerances":
        vals = {**self.__dict__, **{k: v for k, v in kw.items() if v is not None}}
        return Tolerances(**vals)


DEFAULT_TOLERANCES = Tolerances()

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6] + (0.0,)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@dataclass
class StepResult:
    y: np.ndarray
    s: float
    steps: int
    rejected: int
    stopped: bool = False


class _Rejected(Exception):
    pass


_AM = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _AM[_i, : len(_row)] = _row
_BV = np.array(_B)
_EV = np.array(_E)


def dopri_step(rhs, s: float, y: np.ndarray, h: float):
    """One DP5(4) step; returns (y_new, error estimate vector)."""
    K = np.empty((7, y.size), dtype=complex)
    K[0] = rhs(s, y)
    for i in range(1, 7):
        K[i] = rhs(s + _C[i] * h, y + h * (_AM[i, :i] @ K[:i]))
    # the seventh stage is evaluated at the 5th-order solution (FSAL)
    y_new = y + h * (_BV @ K)
    return y_new, h * (_EV @ K)


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    length: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
    on_accept: Callable[[float, np.ndarray], tuple[np.ndarray, bool]] | None = None,
    h0: float | None = None,
    max_step: float | None = None,
) -> StepResult:
    """Integrate ``dy/ds = rhs(s, y)`` from ``s = 0`` to ``s = length``.

    ``on_accept(s, y)`` may return a modified state and a stop flag.
    ``rhs`` may raise :class:`PoleError`; the step is then rejected and
    shrunk.  Raises :class:`StepCollapse` when the step falls below
    ``tol.min_step``.
    """
    y = np.array(y0, dtype=complex)
    if length <= 0:
        return StepResult(y, 0.0, 0, 0)
    s = 0.0
    h = min(length, h0 if h0 is not None else 1e-2)
    hmax = max_step if max_step is not None else length
    steps = rejected = 0
    while s < length:
        if steps + rejected >= tol.max_steps:
            exc = StepCollapse(f"step budget {tol.max_steps} exhausted at s={s}")
            exc.s, exc.y, exc.budget = s, y, True
            raise exc
        last = False
        if s + h >= length:
            h = length - s
            last = True
        try:
            y_new, err = dopri_step(rhs, s, y, h)
            scale = max(1.0, float(np.max(np.abs(y))), float(np.max(np.abs(y_new))))
            e = float(np.max(np.abs(err))) / scale
            if not np.isfinite(e):
                raise _Rejected
        except (PoleError, _Rejected, ZeroDivisionError, FloatingPointError, OverflowError):
            e = np.inf
        allowed = tol.err_tol * h
        if e <= allowed:
            s = length if last else s + h
            y = y_new
            steps += 1
            if on_accept is not None:
                y, stop = on_accept(s, y)
                if stop:
                    return StepResult(y, s, steps, rejected, stopped=True)
            fac = 5.0 if e == 0 else min(5.0, max(0.2, 0.9 * (allowed / e) ** 0.2))
            h = min(h * fac, hmax)
        else:
            rejected += 1
            fac = 0.2 if not np.isfinite(e) else min(0.9, max(0.1, 0.9 * (allowed / e) ** 0.2))
            h = h * fac
            if h < tol.min_step and length - s > tol.min_step:
                exc = StepCollapse(f"step {h:.3e} below minimum at s={s:.6g}")
                exc.s, exc.y = s, y
                raise exc
    return StepResult(y, s, steps, rejected)
