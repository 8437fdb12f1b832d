"""Orbit integration for the assembled plug.

An orbit of the assembled flow is a chain of base-field arcs, each at a
fixed radius, stitched together by instantaneous jumps across the two
insertion regions: hitting an entry face restarts the arc at the face's
blade footprint on the bottom cap, and reaching the top cap inside a
blade restarts it on the matching exit face. The integrator walks that
chain, keeping the transition list, the per-arc radius record, and the
nesting level (entries minus exits) that the global results are stated
in.

Event location is done on dense output rather than with solver event
functions: every crossing function used here is strictly monotone along
the flow inside its angular window (checked analytically against the
face slopes), so a sign change between two close samples brackets
exactly one root and bisection is safe.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .config import PlugConfig
from .errors import DomainError, GeometryError, InvariantViolation, \
    NotInDomain
from .geometry import TWO_PI, ang_diff, cyl_dist
from .insertion import BLADE_OUTER, RIM_RADIUS, InsertionGeometry, \
    build_geometry
from .wilson import THETA0, f_eval, g_eval

CAP_BOTTOM = -2.0
CAP_TOP = 2.0

# dense-scan resolution: at the top speed |f| = 10 this walks the angle in
# steps of 0.02, a sixth of the narrowest face window
SAMPLE_DT = 0.002
CHUNK_T = 2.0
STORE_STRIDE = 10

CLOSURE_TOL = 1e-8
RADIUS_GATE = 1e-7
GRAZE_TOL = 1e-8


def facing(p):
    """Same-footprint point on the opposite horizontal cap."""
    r, th, z = float(p[0]), float(p[1]), float(p[2])
    if not (RIM_RADIUS - 1e-9 <= r <= BLADE_OUTER + 1e-9):
        raise DomainError(f"radius {r} outside the annulus")
    if abs(z - CAP_BOTTOM) <= 1e-9:
        return (r, th, CAP_TOP)
    if abs(z - CAP_TOP) <= 1e-9:
        return (r, th, CAP_BOTTOM)
    raise DomainError(f"point with z={z} is not on a horizontal cap")


# ---------------------------------------------------------------------------
# record types


@dataclasses.dataclass(frozen=True)
class TransitionPoint:
    """One stitch point of the arc chain.

    `arrival` is where the inbound arc ends and `departure` where the
    outbound arc starts, both in annulus coordinates; the two differ
    exactly at the secondary jumps. `location` follows the outbound side.
    """
    kind: str                      # primary-entry|primary-exit|secondary-...
    insertion: Optional[int]       # 1 | 2 | None for primary
    arrival: tuple
    departure: tuple
    footprint: Optional[tuple]     # (r', theta') for secondary transitions
    time: float

    @property
    def location(self) -> tuple:
        return self.departure

    def label(self) -> str:
        if self.insertion is None:
            return self.kind
        return f"{self.kind}({self.insertion})"


@dataclasses.dataclass
class WArc:
    """A maximal fixed-radius flow segment between two transitions."""
    radius: float
    t0: float
    t1: float
    start: tuple
    end: tuple
    samples: np.ndarray            # rows (t, r, theta, z), theta unwrapped
    length: float
    start_transition: Optional[TransitionPoint]
    end_transition: Optional[TransitionPoint]
    direction: str = "forward"


@dataclasses.dataclass
class KOrbit:
    """A finite piece of one orbit of the assembled flow."""
    eps: float
    direction: str
    arcs: list
    transitions: list
    levels: list                   # nesting level after each transition
    arc_levels: list               # level in force during each arc
    rho: list                      # radius of each arc
    outcome: str
    section_hits: list             # (t, r, theta, z) on the half-plane cut
    period: Optional[float] = None
    closure_gap: Optional[float] = None

    def to_rows(self) -> np.ndarray:
        """Sample table with columns (t, r, theta, z, arc_index, level)."""
        blocks = []
        for k, arc in enumerate(self.arcs):
            s = arc.samples
            idx = np.full((len(s), 1), float(k))
            lv = np.full((len(s), 1), float(self.arc_levels[k]))
            blocks.append(np.hstack([s, idx, lv]))
        if not blocks:
            return np.empty((0, 6))
        return np.vstack(blocks)


@dataclasses.dataclass(frozen=True)
class ShortcutResult:
    ok: bool
    time: float
    gap: float


# ---------------------------------------------------------------------------
# classification

_CASE_TABLE = {
    ("primary-entry", "secondary-entry"): 1,
    ("primary-entry", "primary-exit"): 2,
    ("secondary-entry", "secondary-entry"): 3,
    ("secondary-entry", "secondary-exit"): 4,
    ("secondary-exit", "secondary-entry"): 5,
    ("secondary-exit", "primary-exit"): 6,
    ("secondary-exit", "secondary-exit"): 6,
}


def classify_transition_pair(arc: WArc) -> int:
    """Which of the six admissible endpoint patterns the arc realizes."""
    a, b = arc.start_transition, arc.end_transition
    if a is None or b is None:
        raise NotInDomain("arc endpoints are not both transition points")
    if arc.direction == "backward":
        a, b = b, a
    case = _CASE_TABLE.get((a.kind, b.kind))
    if case is None:
        raise InvariantViolation(
            f"no admissible case for {a.kind} -> {b.kind}")
    if case == 2:
        pa, pb = a.location, b.location
        if (abs(pa[0] - pb[0]) > 1e-6
                or abs(ang_diff(pa[1], pb[1])) > 1e-6):
            raise InvariantViolation(
                "full transit must end at the facing cap point")
    if case == 4:
        if a.insertion != b.insertion:
            raise InvariantViolation(
                "entry and exit of one transit arc name different insertions")
        fa, fb = a.footprint, b.footprint
        if abs(fa[0] - fb[0]) > 1e-6 or abs(ang_diff(fa[1], fb[1])) > 1e-6:
            raise InvariantViolation(
                "transit arc endpoints are not facing footprints")
    if case == 5 and a.insertion == 2 and b.insertion != 2:
        raise InvariantViolation(
            "an exit from the second insertion re-entered the first")
    return case


# ---------------------------------------------------------------------------
# the integrator


class _Budget:
    def __init__(self, cfg: PlugConfig, override):
        ip = cfg.integrator
        over = dict(override or {})
        self.max_transitions = int(over.pop("max_transitions",
                                            ip.max_transitions))
        self.max_arclength = float(over.pop("max_arclength",
                                            ip.max_arclength))
        if over:
            raise DomainError(f"unknown budget keys {sorted(over)}")
        if self.max_transitions <= 0 or self.max_arclength <= 0:
            raise DomainError("budget must be positive")


class _OrbitRun:
    def __init__(self, cfg: PlugConfig, geo: InsertionGeometry,
                 direction: str, budget: _Budget):
        self.cfg = cfg
        self.geo = geo
        self.wp = cfg.wilson
        self.sgn = 1.0 if direction == "forward" else -1.0
        self.direction = direction
        self.budget = budget
        self.rtol = cfg.integrator.rtol
        self.atol = cfg.integrator.atol
        self.event_tol = cfg.integrator.event_tol

        self.arcs: list[WArc] = []
        self.transitions: list[TransitionPoint] = []
        self.levels: list[int] = []
        self.arc_levels: list[int] = []
        self.section_hits: list[tuple] = []
        self.level = 0
        self.t = 0.0
        self.arclength = 0.0
        self.outcome: Optional[str] = None
        self.period: Optional[float] = None
        self.closure_gap: Optional[float] = None
        self.close_point: Optional[tuple] = None

    # -- bookkeeping -----------------------------------------------------

    def push_transition(self, tp: TransitionPoint):
        self.transitions.append(tp)
        if tp.kind == "secondary-entry":
            self.level += int(self.sgn)
        elif tp.kind == "secondary-exit":
            self.level -= int(self.sgn)
        self.levels.append(self.level)

    # -- curtain bookkeeping for one radius --------------------------------

    def active_curtains(self, r: float):
        """(insertion, center, lo, hi) rows for the crossable faces at r."""
        side = "entry" if self.sgn > 0 else "exit"
        rows = []
        for i in (1, 2):
            win = self.geo.curtain_window(i, r, side=side)
            if win is None:
                continue
            lo, hi = float(win[0]), float(win[1])
            if hi - lo <= 1e-12:
                continue
            rows.append((i, self.geo.curtain_center(i), lo, hi, side))
        return rows

    def curtain_gap(self, i, side, r, psi, z):
        h = self.geo.curtain_height(i, r, psi, side=side)
        return z - np.asarray(h, dtype=float)

    # -- one arc -----------------------------------------------------------

    def run_arc(self, p0: tuple, start_tp: Optional[TransitionPoint]):
        """Integrate one fixed-radius arc to its next transition."""
        r = float(p0[0])
        th0 = float(p0[1])
        z0 = float(p0[2])
        curtains = self.active_curtains(r)
        cap = CAP_TOP if self.sgn > 0 else CAP_BOTTOM

        def rhs(t, y):
            return (self.sgn * float(f_eval(r, y[1])),
                    self.sgn * float(g_eval(r, y[1], self.wp)),
                    math.hypot(r * float(f_eval(r, y[1])),
                               float(g_eval(r, y[1], self.wp))))

        stored = [(self.t, r, th0, z0)]
        t_arc = 0.0
        th, z, s_len = th0, z0, 0.0
        event = None          # (t_local, kind, payload)

        check_close = (self.close_point is not None
                       and abs(r - self.close_point[0]) <= RADIUS_GATE
                       and any(t.kind.startswith("secondary")
                               for t in self.transitions))

        while event is None:
            t_hi = t_arc + CHUNK_T
            sol = solve_ivp(rhs, (t_arc, t_hi), (th, z, s_len),
                            method="RK45", dense_output=True,
                            rtol=self.rtol, atol=self.atol)
            n = max(int(round((t_hi - t_arc) / SAMPLE_DT)), 8)
            ts = np.linspace(t_arc, t_hi, n + 1)
            ys = sol.sol(ts)
            ths, zs, ss = ys[0], ys[1], ys[2]

            cands = []

            # horizontal cap
            fcap = self.sgn * (zs - cap)
            hit = np.nonzero((fcap[:-1] < 0) & (fcap[1:] >= 0))[0]
            if len(hit):
                k = int(hit[0])
                t_star = brentq(lambda q: float(sol.sol(q)[1]) - cap,
                                ts[k], ts[k + 1], xtol=1e-13)
                cands.append((t_star, "cap", None))

            # insertion faces
            for (i, center, lo, hi, side) in curtains:
                psi = np.arctan2(np.sin(ths - center), np.cos(ths - center))
                inside = (psi > lo) & (psi < hi)
                if not inside.any():
                    continue
                t_star = self._curtain_root(sol, ts, psi, zs, inside,
                                            i, side, r, center, lo, hi)
                if t_star is not None:
                    cands.append((t_star, "curtain", (i, side, center,
                                                      lo, hi)))

            # closure with the start point
            if check_close:
                t_star, gap = self._closure_root(sol, ts, ths, zs, r)
                if t_star is not None:
                    cands.append((t_star, "closed", gap))

            # length budget
            if ss[-1] + self.arclength >= self.budget.max_arclength:
                lim = self.budget.max_arclength - self.arclength
                t_star = brentq(lambda q: float(sol.sol(q)[2]) - lim,
                                ts[0], ts[-1], xtol=1e-12)
                cands.append((t_star, "length-budget", None))

            if cands:
                cands.sort(key=lambda c: c[0])
                if (len(cands) > 1 and cands[1][0] - cands[0][0] <
                        self.event_tol and cands[1][1] != cands[0][1]):
                    raise GeometryError(
                        "two transition surfaces fired within the event "
                        f"tolerance at t={cands[0][0]:.12f}")
                event = cands[0]
                t_hi = event[0]

            self._record_sections(sol, ts, ths, zs, r, t_hi)

            upto = ts[ts < t_hi - 1e-15][1:]
            keep = upto[::STORE_STRIDE] if len(upto) else upto
            for tq in keep:
                yq = sol.sol(tq)
                stored.append((self.t + tq, r, float(yq[0]), float(yq[1])))
            y_end = sol.sol(t_hi)
            th, z, s_len = float(y_end[0]), float(y_end[1]), float(y_end[2])
            t_arc = t_hi
            if event is None and s_len + self.arclength >= \
                    self.budget.max_arclength:
                event = (t_arc, "length-budget", None)

        stored.append((self.t + t_arc, r, th, z))
        samples = np.asarray(stored)
        self.t += t_arc
        self.arclength += s_len
        arc = WArc(radius=r, t0=float(samples[0, 0]), t1=self.t,
                   start=(r, th0, z0), end=(r, th, z), samples=samples,
                   length=s_len, start_transition=start_tp,
                   end_transition=None, direction=self.direction)
        self.arcs.append(arc)
        self.arc_levels.append(self.level)
        self.rho = [a.radius for a in self.arcs]
        return arc, event[1], event[2], (r, th, z)

    # -- root helpers -------------------------------------------------------

    def _curtain_root(self, sol, ts, psi, zs, inside, i, side, r,
                      center, lo, hi):
        """Earliest genuine face crossing in this chunk, if any."""
        pad = 1e-12
        gap = np.full_like(zs, np.nan)
        gap[inside] = self.curtain_gap(i, side, r,
                                       np.clip(psi[inside], lo + pad,
                                               hi - pad), zs[inside])
        sgn_gap = self.sgn * gap

        def gap_at(tq):
            yq = sol.sol(tq)
            pq = math.atan2(math.sin(yq[0] - center),
                            math.cos(yq[0] - center))
            pq = min(max(pq, lo + pad), hi - pad)
            return self.sgn * float(self.curtain_gap(i, side, r, pq, yq[1]))

        def psi_of(tq):
            yq = sol.sol(tq)
            return math.atan2(math.sin(yq[0] - center),
                              math.cos(yq[0] - center))

        idx = np.nonzero(inside)[0]
        runs = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
        for run in runs:
            if len(run) == 0:
                continue
            # bracket from the exact window edge when the run is clipped
            t_lo, g_lo = ts[run[0]], sgn_gap[run[0]]
            if run[0] > 0:
                e = lo if psi_of(ts[run[0] - 1]) <= lo else hi
                try:
                    t_edge = brentq(lambda q: psi_of(q) - e,
                                    ts[run[0] - 1], ts[run[0]], xtol=1e-13)
                    if math.copysign(1, gap_at(t_edge)) != \
                            math.copysign(1, g_lo):
                        t_lo, g_lo = t_edge, gap_at(t_edge)
                except ValueError:
                    pass
            prev_t, prev_g = t_lo, g_lo
            for k in run:
                tk, gk = ts[k], sgn_gap[k]
                if prev_g < 0 <= gk:
                    t_star = brentq(gap_at, prev_t, tk, xtol=1e-13)
                    p_star = psi_of(t_star)
                    if lo + pad < p_star < hi - pad:
                        return float(t_star)
                prev_t, prev_g = tk, gk
            if run[-1] + 1 < len(ts):
                e = lo if psi_of(ts[run[-1] + 1]) <= lo else hi
                try:
                    t_edge = brentq(lambda q: psi_of(q) - e,
                                    ts[run[-1]], ts[run[-1] + 1], xtol=1e-13)
                    if prev_g < 0 <= gap_at(t_edge):
                        t_star = brentq(gap_at, prev_t, t_edge, xtol=1e-13)
                        p_star = psi_of(t_star)
                        if lo + pad < p_star < hi - pad:
                            return float(t_star)
                except ValueError:
                    pass
        return None

    def _closure_root(self, sol, ts, ths, zs, r):
        """First angular return that also closes in height."""
        th_c = self.close_point[1]
        d = np.arctan2(np.sin(ths - th_c), np.cos(ths - th_c))
        flips = np.nonzero((d[:-1] * d[1:] < 0)
                           & (np.abs(d[:-1]) + np.abs(d[1:]) < 1.0))[0]
        for k in flips:
            t_star = brentq(
                lambda q: math.atan2(math.sin(float(sol.sol(q)[0]) - th_c),
                                     math.cos(float(sol.sol(q)[0]) - th_c)),
                ts[k], ts[k + 1], xtol=1e-13)
            if self.t + t_star <= 1e-9:
                continue
            yq = sol.sol(t_star)
            gap = cyl_dist((r, float(yq[0]), float(yq[1])), self.close_point)
            if gap < CLOSURE_TOL:
                return float(t_star), float(gap)
        return None, None

    def _record_sections(self, sol, ts, ths, zs, r, t_hi):
        v = np.sin(0.5 * (ths - THETA0))
        flips = np.nonzero(v[:-1] * v[1:] < 0)[0]
        for k in flips:
            if ts[k] >= t_hi:
                break
            t_star = brentq(
                lambda q: math.sin(0.5 * (float(sol.sol(q)[0]) - THETA0)),
                ts[k], ts[k + 1], xtol=1e-13)
            if t_star >= t_hi:
                continue
            yq = sol.sol(t_star)
            zq = float(yq[1])
            if abs(float(f_eval(r, zq))) <= GRAZE_TOL:
                continue           # grazing pass along the cut: skip
            self.section_hits.append((self.t + t_star, r,
                                      float(yq[0]) % TWO_PI, zq))


def _blade_of(geo: InsertionGeometry, rp: float, thp: float):
    for i in (1, 2):
        if geo.blade_contains(i, rp, thp):
            return i
    return None


def _normalize_start(run: _OrbitRun, start):
    """Resolve the start into (first point, optional t=0 transition)."""
    geo = run.geo
    if isinstance(start, TransitionPoint):
        p = tuple(map(float, start.departure))
        tp = dataclasses.replace(start, time=0.0)
        return p, tp

    r, th, z = (float(start[0]), float(start[1]) % TWO_PI, float(start[2]))
    if not (RIM_RADIUS - 1e-9 <= r <= BLADE_OUTER + 1e-9) or abs(z) > 2.0:
        raise DomainError(f"start {start} outside the plug")

    if abs(z - CAP_BOTTOM) <= 1e-12:
        i = _blade_of(geo, r, th)
        if run.sgn > 0:
            if i is None:
                tp = TransitionPoint("primary-entry", None, (r, th, z),
                                     (r, th, z), None, 0.0)
                return (r, th, z), tp
            hit = geo.entry_face_map(i, r, th)
            tp = TransitionPoint("secondary-entry", i,
                                 tuple(map(float, hit)), (r, th, z),
                                 (r, th), 0.0)
            return (r, th, z), tp
        if i is None:
            raise DomainError("backward start on the entry cap")
        hit = geo.entry_face_map(i, r, th)
        tp = TransitionPoint("secondary-entry", i, (r, th, z),
                             tuple(map(float, hit)), (r, th), 0.0)
        return tuple(map(float, hit)), tp

    if abs(z - CAP_TOP) <= 1e-12:
        i = _blade_of(geo, r, th)
        if run.sgn < 0:
            if i is None:
                tp = TransitionPoint("primary-exit", None, (r, th, z),
                                     (r, th, z), None, 0.0)
                return (r, th, z), tp
            hit = geo.exit_face_map(i, r, th)
            tp = TransitionPoint("secondary-exit", i, (r, th, z),
                                 (r, th), 0.0) if False else \
                TransitionPoint("secondary-exit", i, (r, th, z),
                                tuple(map(float, hit)), (r, th), 0.0)
            return (r, th, z), tp
        if i is None:
            raise DomainError("forward start on the exit cap")
        hit = geo.exit_face_map(i, r, th)
        tp = TransitionPoint("secondary-exit", i, (r, th, z),
                             tuple(map(float, hit)), (r, th), 0.0)
        return tuple(map(float, hit)), tp

    membership = geo.region_membership((r, th, z))
    if membership.startswith("inside"):
        raise DomainError("start lies inside an excised insertion region")
    if membership == "on-face":
        side = "entry" if run.sgn > 0 else "exit"
        for i in (1, 2):
            try:
                rp, thp = geo.face_inverse(i, (r, th, z), side=side)
            except (GeometryError, DomainError):
                continue
            if side == "entry":
                tp = TransitionPoint("secondary-entry", i, (r, th, z),
                                     (rp, thp % TWO_PI, CAP_BOTTOM),
                                     (rp, thp % TWO_PI), 0.0)
                return (rp, thp % TWO_PI, CAP_BOTTOM), tp
            tp = TransitionPoint("secondary-exit", i,
                                 (rp, thp % TWO_PI, CAP_TOP), (r, th, z),
                                 (rp, thp % TWO_PI), 0.0)
            return (r, th, z), tp
    return (r, th, z), None


def integrate_korbit(cfg: PlugConfig, start, direction: str = "forward",
                     budget=None) -> KOrbit:
    """Follow one orbit of the assembled flow until it leaves, closes,
    or exhausts its budget."""
    if direction not in ("forward", "backward"):
        raise DomainError(f"unknown direction {direction!r}")
    geo = build_geometry(cfg)
    run = _OrbitRun(cfg, geo, direction, _Budget(cfg, budget))

    p, tp0 = _normalize_start(run, start)
    if tp0 is not None:
        run.push_transition(tp0)
    run.close_point = tuple(map(float, p))

    outcome = None
    current_tp = tp0
    while outcome is None:
        if len(run.transitions) >= run.budget.max_transitions:
            outcome = "trapped-budget"
            break
        arc, kind, payload, end_pt = run.run_arc(p, current_tp)
        r, th_end, z_end = end_pt
        th_w = th_end % TWO_PI

        if kind == "length-budget":
            outcome = "trapped-budget"
        elif kind == "closed":
            outcome = "periodic-detected"
            run.period = run.t
            run.closure_gap = payload
        elif kind == "cap":
            cap = CAP_TOP if run.sgn > 0 else CAP_BOTTOM
            i = _blade_of(geo, r, th_w)
            if run.sgn > 0:
                if i is None:
                    tp = TransitionPoint("primary-exit", None,
                                         (r, th_w, cap), (r, th_w, cap),
                                         None, run.t)
                    arc.end_transition = tp
                    run.push_transition(tp)
                    outcome = "exited-at-primary-exit"
                else:
                    fh = geo.exit_jump(i, r, th_w)
                    tp = TransitionPoint("secondary-exit", i,
                                         (r, th_w, cap), fh.point,
                                         fh.footprint, run.t)
                    arc.end_transition = tp
                    run.push_transition(tp)
                    p, current_tp = fh.point, tp
            else:
                if i is None:
                    tp = TransitionPoint("primary-entry", None,
                                         (r, th_w, cap), (r, th_w, cap),
                                         None, run.t)
                    arc.end_transition = tp
                    run.push_transition(tp)
                    outcome = "exited-at-primary-entry"
                else:
                    hit = geo.entry_face_map(i, r, th_w)
                    tp = TransitionPoint("secondary-entry", i,
                                         (r, th_w, cap),
                                         tuple(map(float, hit)),
                                         (r, th_w), run.t)
                    arc.end_transition = tp
                    run.push_transition(tp)
                    p, current_tp = tuple(map(float, hit)), tp
        elif kind == "curtain":
            i, side, center, lo, hi = payload
            psi = math.atan2(math.sin(th_end - center),
                             math.cos(th_end - center))
            z_face = float(geo.curtain_height(i, r, psi, side=side))
            p_hit = (r, (center + psi) % TWO_PI, z_face)
            if side == "entry":
                fh = geo.entry_jump(i, p_hit)
                dep = (fh.footprint[0], fh.footprint[1], CAP_BOTTOM)
                tp = TransitionPoint("secondary-entry", i, p_hit, dep,
                                     fh.footprint, run.t)
            else:
                rp, thp = geo.face_inverse(i, p_hit, side="exit")
                dep = (float(rp), float(thp) % TWO_PI, CAP_TOP)
                tp = TransitionPoint("secondary-exit", i, p_hit, dep,
                                     (dep[0], dep[1]), run.t)
            arc.end_transition = tp
            run.push_transition(tp)
            p, current_tp = dep, tp
        else:
            raise GeometryError(f"unknown event kind {kind!r}")

    return KOrbit(eps=geo.eps, direction=direction, arcs=run.arcs,
                  transitions=run.transitions, levels=run.levels,
                  arc_levels=run.arc_levels,
                  rho=[a.radius for a in run.arcs], outcome=outcome,
                  section_hits=run.section_hits, period=run.period,
                  closure_gap=run.closure_gap)


# ---------------------------------------------------------------------------
# the detour shortcut


def check_shortcut(cfg: PlugConfig, orbit: KOrbit, i0: int,
                   i1: int) -> ShortcutResult:
    """Verify that a balanced detour block collapses to one base-field hop.

    The block from the entry at index i0 to its matching exit at i1 must
    be properly nested (level never dips below the entry's level in
    between). The base field then carries the entry's arrival point to
    the exit's departure point in exactly the face transit time.
    """
    if orbit.direction != "forward":
        raise NotInDomain("shortcut check applies to forward orbits")
    n = len(orbit.transitions)
    if not (0 <= i0 < i1 < n):
        raise NotInDomain(f"indices ({i0}, {i1}) out of range")
    t_in, t_out = orbit.transitions[i0], orbit.transitions[i1]
    if t_in.kind != "secondary-entry":
        raise NotInDomain("block must start at a secondary entry")
    if t_out.kind != "secondary-exit":
        raise NotInDomain("block must end at a secondary exit")
    if t_in.insertion != t_out.insertion:
        raise NotInDomain("block endpoints name different insertions")
    base = orbit.levels[i0]
    if orbit.levels[i1] != base - 1:
        raise NotInDomain("exit does not match the entry's nesting level")
    if min(orbit.levels[i0:i1]) < base:
        raise NotInDomain("level dips below the entry inside the block")

    geo = build_geometry(cfg)
    x0 = t_in.arrival
    target = t_out.departure
    r = float(x0[0])
    hop = geo._advance(r, float(x0[1]), float(x0[2]), precise=True)
    gap = cyl_dist(hop, target)
    return ShortcutResult(ok=bool(gap < 1e-6),
                          time=float(geo.transit_time(r)), gap=float(gap))
