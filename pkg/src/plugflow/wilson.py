"""The rotationally symmetric base plug.

The domain is the annular cylinder [1,3] x S^1 x [-2,2] carrying the field

    (r', theta', z') = (0, f(r,z), g(r,z)).

g >= 0 vanishes exactly at the two rest circles (r,z) = (2,-1) and (2,1),
so every orbit drifts upward except on those circles; f is odd in z, equal
to +1 on a large box below the midplane and -1 on its mirror, and vanishes
near the whole boundary, which makes entry and exit footprints of every
crossing orbit equal (the angular advance integrates to zero).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import smoothstep
from .report import VerifyReport

R_MIN, R_MAX = 1.0, 3.0
Z_MIN, Z_MAX = -2.0, 2.0
THETA0 = math.pi                      # angle of the section half-plane
REST_POINTS = ((2.0, -1.0), (2.0, 1.0))
TRAPPED_RADIUS_TOL = 1e-3
SECTION_SPEED_TOL = 1e-8


@dataclasses.dataclass(frozen=True)
class WilsonParams:
    g0: float = 0.1
    eps0: float = 0.2


DEFAULT_WILSON = WilsonParams()


# ---------------------------------------------------------------------------
# speed profiles

def _h(s):
    """Radial profile of the vertical speed: s^2 core, plateau 1.

    The blend keeps _h(s) >= s^2, so the quadratic lower bound with
    constant g0/eps0^2 is tight exactly on the core.
    """
    s = np.asarray(s, dtype=float)
    core = s * s
    val = core + (1.0 - core) * smoothstep(2.0 * s - 1.0)
    out = np.where(s >= 1.0, 1.0, val)
    return out


def g_eval(r, z, params: WilsonParams = DEFAULT_WILSON):
    """Vertical speed; zero exactly at the two rest circles."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    d = np.minimum(np.hypot(r - 2.0, z + 1.0), np.hypot(r - 2.0, z - 1.0))
    out = params.g0 * _h(d / params.eps0)
    return out if out.ndim else float(out)


def _b(r):
    r = np.asarray(r, dtype=float)
    up = smoothstep((r - 1.125) * 8.0)
    down = smoothstep((r - 2.75) * 8.0)
    return up * (1.0 - down)


def _c_lower(u):
    # u = -z >= 0
    up = smoothstep((u - 0.125) * 8.0)
    down = smoothstep((u - 1.75) * 8.0)
    return up * (1.0 - down)


def f_eval(r, z):
    """Angular speed; odd in z, +1 on the lower box, -1 on the upper."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    mag = _c_lower(np.abs(z)) * _b(r)
    out = np.where(z <= 0.0, mag, -mag)
    return out if out.ndim else float(out)


def field_eval(p, params: WilsonParams = DEFAULT_WILSON):
    """Velocity triple (r', theta', z') at a cylinder point (r, theta, z)."""
    r, _, z = p
    return np.array([0.0, float(f_eval(r, z)), float(g_eval(r, z, params))])


# ---------------------------------------------------------------------------
# flow with event-located stops

@dataclasses.dataclass(frozen=True)
class StopCondition:
    kind: str                       # "time" | "surface" | "exit" | "budget"
    T: float | None = None
    name: str | None = None         # "top" | "bottom" | "section" | "annulus"
    count: int = 1

    @staticmethod
    def time(T: float) -> "StopCondition":
        return StopCondition("time", T=float(T))

    @staticmethod
    def exit() -> "StopCondition":
        return StopCondition("exit")

    @staticmethod
    def surface(name: str, count: int = 1) -> "StopCondition":
        if name not in ("top", "bottom", "section", "annulus"):
            raise ValueError(f"unknown surface {name!r}")
        return StopCondition("surface", name=name, count=count)

    @staticmethod
    def budget() -> "StopCondition":
        return StopCondition("budget")


@dataclasses.dataclass
class FlowResult:
    outcome: str                    # time | hit-* | trapped | budget
    final: tuple                    # (t, r, theta, z)
    arclength: float
    points: np.ndarray | None = None   # rows (t, r, theta, z) when recorded


def _section_event(theta: float) -> float:
    # vanishes exactly at theta = THETA0 + 2 pi k
    return math.sin(0.5 * (theta - THETA0))


def wilson_flow(p, stop: StopCondition, params: WilsonParams = DEFAULT_WILSON,
                direction: int = 1, record: bool = False,
                max_time: float = 1e5, max_arclength: float = 1e6,
                rtol: float = 1e-10, atol: float = 1e-10) -> FlowResult:
    """Integrate the field from p until the stop condition fires.

    The third state component accumulates arc length. Integration always
    terminates at the horizontal caps z = +-2 (the orbit leaves the plug),
    whatever the requested stop; callers see that as outcome "hit-top" or
    "hit-bottom".
    """
    r0, th0, z0 = float(p[0]), float(p[1]), float(p[2])
    sgn = 1.0 if direction >= 0 else -1.0

    def rhs(t, y):
        fv = float(f_eval(r0, y[1]))
        gv = float(g_eval(r0, y[1], params))
        return (sgn * fv, sgn * gv, math.hypot(fv, gv))

    def ev_top(t, y):
        return y[1] - Z_MAX

    def ev_bottom(t, y):
        return y[1] - Z_MIN

    def ev_annulus(t, y):
        return y[1]

    def ev_section(t, y):
        return _section_event(y[0])

    events = [ev_top, ev_bottom]
    want_idx = None
    if stop.kind == "surface":
        if stop.name == "annulus":
            events.append(ev_annulus)
            want_idx = 2
        elif stop.name == "section":
            events.append(ev_section)
            want_idx = 2

    time_cap = stop.T if stop.kind == "time" else max_time
    t_now, y_now = 0.0, np.array([th0, z0, 0.0])
    seen = 0
    recorded = [np.array([[0.0, r0, th0, z0]])] if record else None
    horizon = min(20.0, time_cap) if stop.kind != "time" else time_cap

    while True:
        t_end = min(t_now + horizon, time_cap)
        sol = solve_ivp(rhs, (t_now, t_end), y_now, method="RK45",
                        dense_output=True, events=events,
                        rtol=rtol, atol=atol)
        if record:
            ys = sol.y
            recorded.append(np.column_stack(
                [sol.t[1:], np.full(len(sol.t) - 1, r0),
                 ys[0, 1:], ys[1, 1:]]))

        def finish(t_star, outcome):
            yst = sol.sol(t_star)
            final = (t_star, r0, float(yst[0]), float(yst[1]))
            pts = np.vstack(recorded) if record else None
            if pts is not None:
                pts = pts[pts[:, 0] <= t_star + 1e-15]
                pts = np.vstack([pts, [final[0], r0, final[2], final[3]]])
            return FlowResult(outcome, final, float(yst[2]), pts)

        # earliest relevant stop inside this segment; events in the opening
        # instant are the start point sitting on a face, not a crossing
        cap_hits = []
        for idx, outcome in ((0, "hit-top"), (1, "hit-bottom")):
            for te in sol.t_events[idx]:
                if te > 1e-13:
                    cap_hits.append((float(te), outcome))
                    break
        cap_t = min(cap_hits)[0] if cap_hits else math.inf

        if want_idx is not None:
            for te in sol.t_events[want_idx]:
                if te <= 1e-13 or te > cap_t + 1e-14:
                    continue
                if stop.name == "section":
                    yst = sol.sol(te)
                    if abs(float(f_eval(r0, yst[1]))) <= SECTION_SPEED_TOL:
                        continue
                seen += 1
                if seen >= stop.count:
                    return finish(float(te), "hit-section"
                                  if stop.name == "section" else "hit-annulus")

        if cap_hits:
            return finish(*min(cap_hits))

        t_now = sol.t[-1]
        y_now = sol.y[:, -1]
        if stop.kind == "time" and t_now >= stop.T - 1e-14:
            final = (t_now, r0, float(y_now[0]), float(y_now[1]))
            pts = np.vstack(recorded) if record else None
            return FlowResult("time", final, float(y_now[2]), pts)
        if t_now >= time_cap - 1e-14 or y_now[2] >= max_arclength:
            outcome = ("trapped"
                       if abs(r0 - 2.0) <= TRAPPED_RADIUS_TOL else "budget")
            final = (t_now, r0, float(y_now[0]), float(y_now[1]))
            pts = np.vstack(recorded) if record else None
            return FlowResult(outcome, final, float(y_now[2]), pts)
        horizon = min(horizon * 4.0, 2e4)


# ---------------------------------------------------------------------------
# hypothesis verification

def verify_wilson_hypotheses(params: WilsonParams = DEFAULT_WILSON,
                             grid_resolution: int = 128) -> VerifyReport:
    """Grid checks of the defining field conditions; reports, never throws."""
    rep = VerifyReport("base plug field")
    n = int(grid_resolution)
    rep.add("params-vertical-speed-positive", params.g0 > 0.0,
            f"g0={params.g0}")
    rep.add("params-rest-disk-radius", 0.0 < params.eps0 < 0.25,
            f"eps0={params.eps0}")

    rs = np.linspace(R_MIN, R_MAX, n)
    zs = np.linspace(Z_MIN, Z_MAX, n)
    R, Z = np.meshgrid(rs, zs, indexing="ij")
    F = f_eval(R, Z)
    G = g_eval(R, Z, params)

    rep.add("W1-angular-speed-odd-in-z",
            bool(np.allclose(F, -f_eval(R, -Z), atol=1e-14)))
    collar = ((R <= 9 / 8) | (R >= 23 / 8) | (Z <= -15 / 8) | (Z >= 15 / 8))
    rep.add("W2-vertical-near-boundary",
            bool(np.all(np.abs(F[collar]) == 0.0)))
    rep.add("W3-angular-nonneg-below-midplane",
            bool(np.all(F[Z <= 0] >= 0.0)))
    rep.add("W4-angular-nonpos-above-midplane",
            bool(np.all(F[Z >= 0] <= 0.0)))
    box = ((R >= 1.25) & (R <= 2.75) & (Z >= -1.75) & (Z <= -0.25))
    rep.add("W5-unit-plateau-lower-box", bool(np.all(F[box] == 1.0)))
    mirror = ((R >= 1.25) & (R <= 2.75) & (Z >= 0.25) & (Z <= 1.75))
    rep.add("W6-mirror-plateau-upper-box", bool(np.all(F[mirror] == -1.0)))
    rep.add("angular-speed-bounded", bool(np.all(np.abs(F) <= 1.0 + 1e-15)))
    rep.add("midplane-angular-zero",
            bool(np.all(f_eval(rs, np.zeros_like(rs)) == 0.0)))

    rep.add("g-range", bool(np.all(G >= 0.0))
            and bool(np.all(G <= params.g0 + 1e-15)))
    rep.add("g-even-in-z", bool(np.allclose(G, g_eval(R, -Z, params),
                                            atol=1e-15)))
    plateau_ok = True
    if params.eps0 > 0:
        d = np.minimum(np.hypot(R - 2, Z + 1), np.hypot(R - 2, Z - 1))
        far = d >= params.eps0
        plateau_ok = bool(np.allclose(G[far], params.g0, atol=1e-15))
    rep.add("g-plateau-outside-rest-disks", plateau_ok)

    zero_vals = [g_eval(rp, zp, params) for rp, zp in REST_POINTS]
    d = np.minimum(np.hypot(R - 2, Z + 1), np.hypot(R - 2, Z - 1))
    off = d > 1e-12
    rep.add("g-zeros-exactly-two",
            max(zero_vals) == 0.0 and bool(np.all(G[off] > 0.0)),
            f"min off-zero g={G[off].min() if off.any() else 'n/a'}")

    mono = True
    ds = np.linspace(0.0, 2.0 * max(params.eps0, 1e-6), 160)
    for ang in np.linspace(0.0, 2 * math.pi, 25):
        vals = g_eval(2.0 + ds * math.cos(ang), -1.0 + ds * math.sin(ang),
                      params)
        mono = mono and bool(np.all(np.diff(vals) >= -1e-14))
    rep.add("g-monotone-in-rest-distance", mono)

    step = 1e-4
    gxx = (g_eval(2 + step, -1, params) - 2 * g_eval(2, -1, params)
           + g_eval(2 - step, -1, params)) / step**2
    gzz = (g_eval(2, -1 + step, params) - 2 * g_eval(2, -1, params)
           + g_eval(2, -1 - step, params)) / step**2
    gxz = (g_eval(2 + step, -1 + step, params)
           - g_eval(2 + step, -1 - step, params)
           - g_eval(2 - step, -1 + step, params)
           + g_eval(2 - step, -1 - step, params)) / (4 * step**2)
    tr, det = gxx + gzz, gxx * gzz - gxz * gxz
    rep.add("hessian-positive-at-rest-point", tr > 0 and det > 0,
            f"H=[[{gxx:.6g},{gxz:.6g}],[{gxz:.6g},{gzz:.6g}]]")
    return rep
