"""Analytic continuation of holonomy germs and singularity detection.

The germ continued here is the inverse of a developing map.  Along a fiber
path ``w(s)`` we solve ``dt/ds = w'(s) / phi'(t)`` with ``phi' = -alpha0/a^2``
and re-transport the frame along ``dt`` in the same ODE, so the frame is the
sheet datum of the universal cover at every point of the track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    InconsistentStart,
    NewtonDiverged,
    NoCandidateWord,
    StepCollapse,
    TangencyNearby,
)
from ._kernels import BUDGET, COLLAPSE, COMPLETED, ESCAPE, PHI_FLOOR, PUNCTURE, lift_segment, pack_rational, tables
from .integrate import DEFAULT_TOLERANCES, Tolerances, integrate
from .moebius import (
    INF,
    Moebius,
    SpherePoint,
    antipode,
    apply,
    chordal_distance,
    derivative_norm,
    homogeneous,
    spherical_distance,
)
from .projective import (
    ProjectiveStructure,
    developing_from_frame,
    from_quadratic,
    iter_orbit_frontier,
    peripheral_monodromy,
)
from .rational import RationalMap1D
from .riccati_family import explicit_quadratic
from .transport import BasePath, Frame, RiccatiSystem, check_pole_margin, transport

PHI_PRIME_FLOOR = 1e-12
ESCAPE_FACTOR = 50.0


@dataclass(frozen=True)
class GermState:
    t: complex
    frame: Frame
    z: SpherePoint
    arclength: float = 0.0


@dataclass
class ContinuationOutcome:
    status: str  # completed | singular | budget_exceeded
    final: GermState
    singular_kind: str  # puncture_approach | escape_to_infinity | step_collapse | none
    parameter_reached: float
    track: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if (self.status == "singular") != (self.singular_kind != "none"):
            raise ValueError("status and singular_kind disagree")


def start_state(ps: ProjectiveStructure) -> GermState:
    """The germ at the basepoint: identity frame, ``z = 0``."""
    return GermState(ps.basepoint, ps.base_frame, 0j, 0.0)


def _frame_value(H: Moebius) -> SpherePoint:
    return INF if H.a == 0 else -H.b / H.a


def check_consistent(state: GermState, tol: float = 1e-7) -> None:
    z = _frame_value(state.frame.H)
    if spherical_distance(z, state.z) > tol:
        raise InconsistentStart(f"germ value {state.z} differs from frame value {z}")


def continue_inverse_developing(ps: ProjectiveStructure, start: GermState, fiber_path: BasePath,
                                budget: float | None = None,
                                tol: Tolerances = DEFAULT_TOLERANCES) -> ContinuationOutcome:
    """Lift ``fiber_path`` through the developing map, starting from ``start``."""
    check_consistent(start)
    if start.z is INF or abs(fiber_path.start - start.z) > 1e-7:
        raise InconsistentStart("fiber path does not start at the germ value")
    total = fiber_path.length
    if budget is None:
        budget = ESCAPE_FACTOR * total
    sys = ps.system
    poles = np.array(tuple(ps.punctures) + tuple(sys.poles), dtype=complex)
    coefs = [x for f in (sys.alpha0, sys.alpha1, sys.alpha2) for x in pack_rational(f)]

    H = start.frame.H
    y = np.array([start.t, H.a, H.b, H.c, H.d], dtype=complex)
    t_len = 0.0
    drift = start.frame.accumulated_error
    track = [complex(start.t)]
    done = 0.0

    def outcome(status, kind, y, s_abs):
        M = Moebius(*(complex(v) for v in y[1:]))
        t = complex(y[0])
        state = GermState(t, Frame(M, t, drift), _frame_value(M), start.arclength + s_abs)
        param = 1.0 if total == 0 else min(1.0, s_abs / total)
        return ContinuationOutcome(status, state, kind, param, track)

    for a, b in fiber_path.segments():
        L = abs(b - a)
        if L == 0:
            continue
        y, s, code, t_len, dd, tr, _ = lift_segment(
            y, (b - a) / L, L, tol.err_tol, tol.min_step, tol.max_steps, poles, tol.pole_margin,
            budget, t_len, PHI_PRIME_FLOOR, *coefs, *tables())
        drift += dd
        track.extend(complex(v) for v in tr)
        if code != COMPLETED:
            return outcome(*_CODES[code], y, done + s)
        done += L
    return outcome("completed", "none", y, total)


_CODES = {
    PUNCTURE: ("singular", "puncture_approach"),
    PHI_FLOOR: ("singular", "step_collapse"),
    ESCAPE: ("singular", "escape_to_infinity"),
    COLLAPSE: ("singular", "step_collapse"),
    BUDGET: ("budget_exceeded", "none"),
}


def redevelop(ps: ProjectiveStructure, start: GermState, out: ContinuationOutcome,
              tol: Tolerances = DEFAULT_TOLERANCES):
    """Develop along the recorded t-track from ``start``; returns the developing value."""
    track = out.track if len(out.track) >= 2 else [start.t, start.t]
    frame = transport(ps.system, BasePath(tuple(track)), start.frame, tol)
    return developing_from_frame(ps, frame)


# ---------------------------------------------------------------------------
# radial probes


@dataclass
class ProbeReport:
    angle: float
    outcome: ContinuationOutcome
    singular_radius: float | None  # fiber distance from the centre where lifting stopped
    radii: tuple
    singular_at: tuple  # per radius: True if the prefix of that radius is singular

    @property
    def endpoint(self) -> SpherePoint:
        return self.outcome.final.z


def natural_boundary_probe(ps: ProjectiveStructure, directions: int, radius_schedule: Sequence[float],
                           start: GermState | None = None, refinement: float = 0.1,
                           tol: Tolerances = DEFAULT_TOLERANCES) -> list[ProbeReport]:
    """Continue the inverse developing map along evenly spaced rays.

    Each ray is run once to the largest radius; a prefix of radius ``r`` is
    singular exactly when the ray stopped before ``r``.
    """
    if directions <= 0 or not radius_schedule:
        return []
    start = start or start_state(ps)
    c = complex(start.z)
    radii = tuple(sorted(float(r) for r in radius_schedule))
    rmax = radii[-1]
    out = []
    for k in range(directions):
        ang = 2 * math.pi * k / directions
        end = c + rmax * complex(math.cos(ang), math.sin(ang))
        res = continue_inverse_developing(ps, start, BasePath((c, end), refinement), tol=tol)
        srad = None if res.status == "completed" else res.parameter_reached * rmax
        flags = tuple(srad is not None and srad < r - 1e-12 for r in radii)
        out.append(ProbeReport(ang, res, srad, radii, flags))
    return out


def first_crossing(cloud: np.ndarray, center: complex, angle: float, width: float = 0.02):
    """Nearest point along a ray within ``width`` of some cloud point, or ``None``."""
    d = complex(math.cos(angle), math.sin(angle))
    rel = (np.asarray(cloud) - center) / d
    hit = (np.abs(rel.imag) <= width) & (rel.real > 0)
    if not np.any(hit):
        return None
    return center + d * float(rel.real[hit].min())


def cloud_crossings(generators: Sequence[Moebius], depth: int, center: complex, angles: Sequence[float],
                    width: float = 0.02, seed=0j) -> list:
    """:func:`first_crossing` of every ray with the depth-``depth`` orbit frontier, streamed."""
    dirs = np.exp(1j * np.asarray(angles, dtype=float))
    best = np.full(dirs.size, np.inf)
    for chunk in iter_orbit_frontier(generators, depth, seed):
        for k, d in enumerate(dirs):
            rel = (chunk - center) / d
            hit = (np.abs(rel.imag) <= width) & (rel.real > 0)
            if np.any(hit):
                best[k] = min(best[k], float(rel.real[hit].min()))
    return [None if not np.isfinite(b) else center + d * b for b, d in zip(best, dirs)]


@dataclass
class BoundaryRay:
    angle: float
    status: str
    singular_kind: str
    singular_radius: float | None
    endpoint: SpherePoint
    crossing: complex | None
    gap: float | None  # chordal distance endpoint-crossing
    passes: bool
    core_complete: bool


@dataclass
class BoundaryExperiment:
    lam: complex
    rays: list
    core_radius: float
    threshold: float

    @property
    def fraction(self) -> float:
        return sum(r.passes for r in self.rays) / len(self.rays) if self.rays else 0.0

    @property
    def fraction_with_crossing(self) -> float:
        rays = [r for r in self.rays if r.crossing is not None]
        return sum(r.passes for r in rays) / len(rays) if rays else 0.0

    @property
    def core_complete(self) -> bool:
        return all(r.core_complete for r in self.rays)


def natural_boundary_experiment(lam=0j, directions: int = 36,
                                radii: Sequence[float] = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0),
                                cloud_depth: int = 10, width: float = 0.02, threshold: float = 0.05,
                                core_radius: float = 1.0,
                                tol: Tolerances = DEFAULT_TOLERANCES) -> BoundaryExperiment:
    """Radial probes of the inverse developing map against the monodromy orbit cloud.

    A ray passes when it stops singular within chordal ``threshold`` of its
    first crossing of the cloud.  The cloud is the orbit of the germ value
    under reduced words of exactly ``cloud_depth`` letters in the first
    three peripheral generators (the fourth is their product).
    """
    ps = from_quadratic(explicit_quadratic(lam), tol=tol)
    start = start_state(ps)
    sched = sorted(set(float(r) for r in radii) | {float(core_radius)})
    probes = natural_boundary_probe(ps, directions, sched, start, tol=tol)
    gens = peripheral_monodromy(ps, tol)[:3]
    center = complex(start.z)
    crossings = cloud_crossings(gens, cloud_depth, center, [p.angle for p in probes], width)
    k_core = sched.index(float(core_radius))
    rays = []
    for p, c in zip(probes, crossings):
        end = p.endpoint
        gap = None if (c is None or end is INF) else chordal_distance(end, c)
        singular = p.outcome.status == "singular"
        rays.append(BoundaryRay(p.angle, p.outcome.status, p.outcome.singular_kind, p.singular_radius,
                                end, c, gap, singular and gap is not None and gap <= threshold,
                                not p.singular_at[k_core]))
    return BoundaryExperiment(complex(lam), rays, float(core_radius), threshold)


# ---------------------------------------------------------------------------
# shadowing words


@dataclass
class ShadowingResult:
    words: list  # letter sequences of beta_1..beta_n (letter j < k is gens[j], else inverse)
    betas: list
    A: list  # A_n = (beta_n ... beta_1)^{-1}
    distances: list
    log_derivatives: list
    slope: float
    log_c: float
    delta: float
    candidates: list  # number of admissible words at each step


def _letters(gens: Sequence[Moebius]) -> tuple[np.ndarray, np.ndarray]:
    mats = [g.as_array() for g in gens] + [g.inverse().as_array() for g in gens]
    k = len(gens)
    return np.array(mats), np.array([(i + k) % (2 * k) for i in range(2 * k)])


def _decode(code: int, base: int) -> tuple:
    out = []
    while code:
        code, r = divmod(code, base)
        out.append(r - 1)
    return tuple(out[::-1])


def _word_matrix(word: Sequence[int], mats: np.ndarray) -> Moebius:
    # word[0] is the outermost letter
    M = Moebius.identity()
    for j in word:
        M = M @ Moebius.from_array(mats[j])
    return M


def admissible_words(gens: Sequence[Moebius], u: SpherePoint, v: SpherePoint, z0: SpherePoint,
                     delta: float, max_word_len: int, chunk: int = 200_000) -> list[tuple]:
    """All reduced words ``beta`` of length at most ``max_word_len`` with

    ``d(beta u, z0) < delta/2``, ``d(beta v, z0') < delta/2``,
    ``|D beta|(u) >= 4`` and ``|D beta|(v) <= 1/4``.
    """
    mats, inv = _letters(gens)
    base = len(mats) + 1
    up, uq = homogeneous(u)
    vp, vq = homogeneous(v)
    zp, zq = homogeneous(z0)
    wp, wq = homogeneous(antipode(z0))
    half = delta / 2
    found = []

    def check(U, V, code):
        nu = np.abs(U[:, 0]) ** 2 + np.abs(U[:, 1]) ** 2
        nv = np.abs(V[:, 0]) ** 2 + np.abs(V[:, 1]) ** 2
        ok = (nu <= 0.25) & (nv >= 4.0)
        if not np.any(ok):
            return
        du = np.arctan2(np.abs(U[:, 0] * zq - U[:, 1] * zp), np.abs(U[:, 0] * np.conj(zp) + U[:, 1] * np.conj(zq)))
        dv = np.arctan2(np.abs(V[:, 0] * wq - V[:, 1] * wp), np.abs(V[:, 0] * np.conj(wp) + V[:, 1] * np.conj(wq)))
        ok &= (du < half) & (dv < half)
        for c in code[ok]:
            found.append(_decode(int(c), base))

    def expand(U, V, last, code, depth):
        if depth == 0:
            return
        for lo in range(0, len(code), chunk):
            sl = slice(lo, lo + chunk)
            Us, Vs, ls, cs = U[sl], V[sl], last[sl], code[sl]
            nu, nv, nl, nc = [], [], [], []
            for j, m in enumerate(mats):
                keep = ls != inv[j]
                if not np.any(keep):
                    continue
                nu.append(Us[keep] @ m.T)
                nv.append(Vs[keep] @ m.T)
                nl.append(np.full(int(keep.sum()), j))
                nc.append(cs[keep] * base + (j + 1))
            U2, V2 = np.concatenate(nu), np.concatenate(nv)
            L2, C2 = np.concatenate(nl), np.concatenate(nc)
            check(U2, V2, C2)
            expand(U2, V2, L2, C2, depth - 1)

    U0 = np.array([[up, uq]])
    V0 = np.array([[vp, vq]])
    expand(U0, V0, np.array([-1]), np.array([0], dtype=np.int64), max_word_len)
    # words are encoded innermost-first; the matrix built above is letter_n ... letter_1
    return [w[::-1] for w in found]


def shadowing_word_sequence(gens: Sequence[Moebius], target: SpherePoint, z0: SpherePoint = 0j,
                            delta: float = 0.05, max_word_len: int = 8, steps: int = 5) -> ShadowingResult:
    """Greedy sequence ``beta_n`` pulling ``(z, z')`` towards ``(z0, z0')`` with expansion 4.

    Among admissible words the one minimising ``d(A_n z0, target)`` is kept
    (ties broken by word length, then lexicographically).
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 0.5)")
    mats, _ = _letters(gens)
    u, v = target, antipode(target)
    B = Moebius.identity()
    res = ShadowingResult([], [], [], [], [], float("nan"), float("nan"), delta, [])
    for n in range(1, steps + 1):
        cands = admissible_words(gens, u, v, z0, delta, max_word_len)
        res.candidates.append(len(cands))
        if not cands:
            raise NoCandidateWord(n, f"no admissible word of length <= {max_word_len} at step {n}")
        best = None
        for w in cands:
            beta = _word_matrix(w, mats)
            A = (beta @ B).inverse()
            key = (spherical_distance(apply(A, z0), target), len(w), w)
            if best is None or key < best[0]:
                best = (key, w, beta, A)
        _, w, beta, A = best
        B = beta @ B
        u, v = apply(beta, u), apply(beta, v)
        res.words.append(w)
        res.betas.append(beta)
        res.A.append(A)
        res.distances.append(spherical_distance(apply(A, z0), target))
        res.log_derivatives.append(math.log(derivative_norm(A, z0)))
    if len(res.A) >= 2:
        n = np.arange(1, len(res.A) + 1)
        res.slope, res.log_c = (float(x) for x in np.polyfit(n, res.log_derivatives, 1))
    return res


# ---------------------------------------------------------------------------
# holonomy onto a curve


def holonomy_to_curve(sys: RiccatiSystem, start, base_path: BasePath, curve: RationalMap1D,
                      newton_tol: float = 1e-12, max_iter: int = 25,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[complex, complex]:
    """Follow the leaf through ``start`` along ``base_path``, then Newton onto ``y = curve(t)``."""
    t0, y0 = complex(start[0]), complex(start[1])
    if abs(base_path.start - t0) > 1e-12:
        raise ValueError("base path must start at t0")
    frame = transport(sys, base_path, None, tol)
    t = base_path.end
    y = complex(apply(frame.H, y0))
    dcurve = curve.derivative()
    for _ in range(max_iter):
        g = y - curve(t)
        gp = sys.vector_field(t, y) - dcurve(t)
        if abs(g) <= newton_tol:
            if abs(gp) < 1e-10:
                raise TangencyNearby(f"|g'| = {abs(gp):.2e} at the intersection")
            return t, y
        if gp == 0:
            raise TangencyNearby("g' vanishes during Newton")
        step = -g / gp
        if abs(step) > 0.5:
            raise NewtonDiverged(f"Newton step {abs(step):.3f} exceeds 0.5")
        seg = BasePath((t, t + step))
        check_pole_margin(seg, sys.poles, tol.pole_margin)
        y = complex(apply(transport(sys, seg, None, tol).H, y))
        t = t + step
    raise NewtonDiverged(f"no convergence in {max_iter} iterations")


# ---------------------------------------------------------------------------
# closed 1-form continuation


@dataclass
class PainleveOutcome:
    status: str
    singular_kind: str
    parameter_reached: float
    x: complex
    y: complex
    drift: float  # |F(x, y) - F(x0, y0)| for F = int R dx - int S dy
    path_length: float
    track: list = field(default_factory=list, repr=False)

    @property
    def drift_per_length(self) -> float:
        return self.drift / self.path_length if self.path_length > 0 else self.drift


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _chord_integral(f: RationalMap1D, a: complex, b: complex) -> complex:
    t = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X
    return complex(0.5 * (b - a) * np.sum(_GL_W * f(t)))


def _primitive(f: RationalMap1D):
    if not f.is_polynomial():
        return None
    c = np.polynomial.polynomial.polyint(f.numerator / f.lead)
    return lambda x: complex(np.polynomial.polynomial.polyval(x, c))


def painleve_continue(R: RationalMap1D, S: RationalMap1D, start, x_path: BasePath,
                      branch_tol: float = 1e-4,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> PainleveOutcome:
    """Integrate ``dy/dx = R(x)/S(y)`` along ``x_path``, reporting the drift of ``int R dx - int S dy``."""
    x0, y0 = complex(start[0]), complex(start[1])
    if abs(x_path.start - x0) > 1e-12:
        raise ValueError("x path must start at x0")
    if abs(S(y0)) <= branch_tol:
        raise ValueError("S(y0) must be nonzero")
    check_pole_margin(x_path, R.poles, tol.pole_margin)
    PR, PS = _primitive(R), _primitive(S)
    total = x_path.length
    y = np.array([y0])
    iR = [0j]
    iS = [0j]
    track = [(x0, y0)]
    done = 0.0
    x_end = x0

    def result(status, kind, x, yv, s_abs):
        if PR is not None and PS is not None:
            drift = abs((PR(x) - PR(x0)) - (PS(yv) - PS(y0)))
        else:
            rx = PR(x) - PR(x0) if PR is not None else iR[0]
            sy = PS(yv) - PS(y0) if PS is not None else iS[0]
            drift = abs(rx - sy)
        param = 1.0 if total == 0 else min(1.0, s_abs / total)
        return PainleveOutcome(status, kind, param, complex(x), complex(yv), drift, total, track)

    for a, b in x_path.segments():
        L = abs(b - a)
        if L == 0:
            continue
        u = (b - a) / L
        flag = [False]
        prev = [a, complex(y[0])]

        def rhs(s, yy, a=a, u=u):
            return np.array([R(a + s * u) * u / S(yy[0])])

        def on_accept(s, yy, a=a, u=u):
            x = a + s * u
            yv = complex(yy[0])
            if PR is None:
                iR[0] += _chord_integral(R, prev[0], x)
            if PS is None:
                iS[0] += _chord_integral(S, prev[1], yv)
            prev[0], prev[1] = x, yv
            track.append((x, yv))
            if abs(S(yv)) <= branch_tol:
                flag[0] = True
            return yy, flag[0]

        try:
            res = integrate(rhs, y, L, tol, on_accept)
        except StepCollapse as exc:
            kind = ("budget_exceeded", "none") if getattr(exc, "budget", False) else ("singular", "step_collapse")
            return result(*kind, a + exc.s * u, complex(exc.y[0]), done + exc.s)
        y = res.y
        if res.stopped:
            return result("singular", "step_collapse", a + res.s * u, complex(y[0]), done + res.s)
        done += L
        x_end = b
    return result("completed", "none", x_end, complex(y[0]), total)
