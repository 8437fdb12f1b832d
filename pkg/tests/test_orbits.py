"""Tests for the concatenated-arc orbit integrator.

Expected values come from three independent sources: the bare RK4 oracle
for mid-arc states, a hand-built Hermite inverse for the footprint radius
of the negative-parameter excursions, and structural facts (bracket
matching, level counts, facing endpoints) that the integrator must
reproduce exactly.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

import oracles
from plugflow.config import PlugConfig
from plugflow.errors import DomainError, NotInDomain, InvariantViolation
from plugflow.geometry import TWO_PI, ang_diff, cyl_dist
from plugflow.insertion import build_geometry
from plugflow.orbits import (KOrbit, TransitionPoint, WArc,
                             classify_transition_pair, check_shortcut,
                             facing, integrate_korbit)

ZETA1 = math.pi / 4.0
PHI_C1 = ZETA1 + math.pi


@pytest.fixture(scope="module")
def cfg_neg() -> PlugConfig:
    return PlugConfig.default().with_eps(-0.1)


def q_oracle_tail(r_img: float, eps: float, beta: float) -> float:
    """Footprint radius over an image radius, outer branch, rebuilt by hand."""
    w = 0.5 * (math.sqrt(max(eps, 0.0) / beta) + 1.0 / (2.0 * beta))
    x0 = 2.0 + w
    y0 = x0 + eps - beta * w * w
    m0 = 1.0 - 2.0 * beta * w

    def gap(x):
        return oracles.cubic_hermite(x, x0, 3.0, y0, 2.5, m0, 0.5) - r_img

    return brentq(gap, x0, 3.0, xtol=1e-13)


# ---------------------------------------------------------------------------
# facing


def test_facing_involution_and_domain():
    p = facing((2.5, 1.0, -2.0))
    assert p == pytest.approx((2.5, 1.0, 2.0), abs=0.0)
    back = facing(p)
    assert back == pytest.approx((2.5, 1.0, -2.0), abs=0.0)
    with pytest.raises(DomainError):
        facing((2.5, 1.0, 0.0))          # interior point
    with pytest.raises(DomainError):
        facing((3.0, 1.0, 0.5))          # side wall is not a face
    with pytest.raises(DomainError):
        facing((0.5, 1.0, -2.0))         # outside the annulus


# ---------------------------------------------------------------------------
# plain transit at a radius past the outer face edge: no secondary events


def test_transit_orbit_exits_at_facing_point(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0))
    assert orbit.outcome == "exited-at-primary-exit"
    kinds = [t.kind for t in orbit.transitions]
    assert kinds == ["primary-entry", "primary-exit"]
    assert orbit.levels == [0, 0]
    assert len(orbit.arcs) == 1

    end = orbit.transitions[-1].location
    assert abs(end[0] - 2.5) < 1e-6
    assert abs(ang_diff(end[1], 1.3)) < 1e-6
    assert abs(end[2] - 2.0) < 1e-9

    arc = orbit.arcs[0]
    assert arc.radius == pytest.approx(2.5, abs=0.0)
    assert np.max(np.abs(arc.samples[:, 1] - 2.5)) < 1e-8
    assert arc.length > 4.0


def test_transit_orbit_against_oracle(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0))
    arc = orbit.arcs[0]
    k = len(arc.samples) // 2
    t_mid, r_mid, th_mid, z_mid = arc.samples[k, :4]
    got = oracles.rk4_flow((2.5, 1.3, -2.0), float(t_mid), 20_000)
    assert abs(r_mid - got[0]) < 1e-12
    assert abs(ang_diff(th_mid, got[1])) < 1e-6
    assert abs(z_mid - got[2]) < 1e-6


def test_section_crossings_recorded(cfg_neg):
    from plugflow.wilson import f_eval

    orbit = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0))
    hits = orbit.section_hits
    assert len(hits) >= 2
    times = [h[0] for h in hits]
    assert all(b > a for a, b in zip(times, times[1:]))
    for t, r, th, z in hits:
        assert abs(math.sin(0.5 * (th - math.pi))) < 1e-9
        assert abs(f_eval(r, z)) > 1e-8


def test_deterministic_replay(cfg_neg):
    a = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0)).to_rows()
    b = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0)).to_rows()
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# balanced excursions: entry/exit pairs restore the section radius


def matched_pairs(orbit: KOrbit):
    """LIFO matching of secondary entries with their exits."""
    stack, pairs = [], []
    for k, tp in enumerate(orbit.transitions):
        if tp.kind == "secondary-entry":
            stack.append(k)
        elif tp.kind == "secondary-exit":
            assert stack, "unmatched secondary exit"
            pairs.append((stack.pop(), k))
    return stack, pairs


def test_balanced_excursions_restore_radius(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.02, 0.7, -2.0),
                             budget={"max_transitions": 400})
    assert orbit.outcome == "exited-at-primary-exit"
    assert len(orbit.transitions) >= 6

    end = orbit.transitions[-1].location
    assert abs(end[0] - 2.02) < 1e-6
    assert abs(ang_diff(end[1], 0.7)) < 1e-6

    assert min(orbit.levels) >= 0
    assert orbit.levels[-1] == 0

    # level replay from the kinds alone
    level, replay = 0, []
    for tp in orbit.transitions:
        level += {"secondary-entry": 1, "secondary-exit": -1}.get(tp.kind, 0)
        replay.append(level)
    assert replay == orbit.levels

    # the radius record follows the arcs and only moves at secondary events
    assert len(orbit.rho) == len(orbit.arcs)
    for k, arc in enumerate(orbit.arcs):
        assert orbit.rho[k] == arc.radius

    open_stack, pairs = matched_pairs(orbit)
    assert not open_stack
    assert pairs
    for k_in, k_out in pairs:
        before = orbit.arcs[k_in - 1].radius
        after = orbit.arcs[k_out].radius
        assert abs(after - before) < 1e-9
        assert orbit.transitions[k_in].insertion == \
            orbit.transitions[k_out].insertion

    # each insertion fires at least once on this start
    used = {t.insertion for t in orbit.transitions if t.insertion}
    assert used == {1, 2}

    # negative parameter pushes every excursion strictly outward
    for k_in, _ in pairs:
        gain = orbit.arcs[k_in].radius - orbit.arcs[k_in - 1].radius
        assert gain > 0.05


def test_arc_bookkeeping(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.02, 0.7, -2.0),
                             budget={"max_transitions": 400})
    geo = build_geometry(cfg_neg)
    for k, tp in enumerate(orbit.transitions):
        if tp.kind == "secondary-entry":
            rp, thp = tp.footprint
            assert orbit.arcs[k].radius == pytest.approx(rp, abs=0.0)
            # the footprint sits on the blade over the arrival angle
            psi = ang_diff(tp.arrival[1], geo.phi_c[tp.insertion - 1])
            assert abs(ang_diff(thp, geo.zeta[tp.insertion - 1] + psi)) < 1e-9
    for arc in orbit.arcs:
        assert np.max(np.abs(arc.samples[:, 1] - arc.radius)) < 1e-8
        assert arc.length > 0.5
        assert arc.t1 > arc.t0


# ---------------------------------------------------------------------------
# the two trapped regimes from the acceptance examples


def test_trapped_orbit_budget(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.0, 1.0, -2.0),
                             budget={"max_transitions": 40})
    assert orbit.outcome == "trapped-budget"
    assert min(orbit.levels) >= 0
    assert len(orbit.transitions) >= 40

    q2 = q_oracle_tail(2.0, -0.1, 4.0)
    for tp in orbit.transitions:
        if tp.kind == "secondary-entry":
            assert tp.insertion == 1
            assert tp.footprint[0] > q2 - 1e-6
    _, pairs = matched_pairs(orbit)
    for k_in, k_out in pairs:
        if k_out < len(orbit.arcs):
            assert abs(orbit.arcs[k_out].radius - 2.0) < 1e-9

    # never escapes the lower slow zone
    zmax = max(float(np.max(a.samples[:, 3])) for a in orbit.arcs
               if a.radius == 2.0)
    assert zmax < -0.9


def test_periodic_orbit_detected(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.0, 0.0, -1.0),
                             budget={"max_transitions": 40})
    assert orbit.outcome == "periodic-detected"
    assert orbit.closure_gap is not None and orbit.closure_gap < 1e-8
    assert orbit.period is not None and 40.0 < orbit.period < 60.0

    kinds = [(t.kind, t.insertion) for t in orbit.transitions]
    assert kinds == [("secondary-entry", 1), ("secondary-exit", 1)]

    # the slow-circle crawl meets the face curve exactly at the blade center
    tp = orbit.transitions[0]
    q2 = q_oracle_tail(2.0, -0.1, 4.0)
    assert abs(tp.footprint[0] - q2) < 1e-9
    assert abs(ang_diff(tp.footprint[1], ZETA1)) < 1e-9
    # re-emergence on the slow circle itself: no vertical drift there
    dep = orbit.transitions[1].location
    assert abs(dep[2] + 1.0) < 1e-9
    assert abs(dep[0] - 2.0) < 1e-9


def test_periodic_orbit_upper_twin(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.0, 0.0, 1.0),
                             budget={"max_transitions": 40})
    assert orbit.outcome == "periodic-detected"
    kinds = [(t.kind, t.insertion) for t in orbit.transitions]
    assert kinds == [("secondary-entry", 2), ("secondary-exit", 2)]
    assert abs(orbit.transitions[1].location[2] - 1.0) < 1e-9


# ---------------------------------------------------------------------------
# transition-pair classification, all six shapes


def test_classification_cases(cfg_neg):
    transit = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0))
    assert classify_transition_pair(transit.arcs[0]) == 2

    trapped = integrate_korbit(cfg_neg, (2.0, 1.0, -2.0),
                               budget={"max_transitions": 6})
    assert classify_transition_pair(trapped.arcs[0]) == 1

    blade = integrate_korbit(cfg_neg, (2.03, ZETA1 + 0.01, -2.0),
                             budget={"max_transitions": 600,
                                     "max_arclength": 2e5})
    first = blade.transitions[0]
    assert first.kind == "secondary-entry" and first.insertion == 1
    assert first.time == 0.0
    assert blade.outcome == "exited-at-primary-exit"
    assert min(blade.levels) >= 0 and blade.levels[-1] == 0

    seen = set()
    for arc in blade.arcs:
        seen.add(classify_transition_pair(arc))
    assert {3, 4, 5, 6} <= seen

    # exits from the second insertion re-enter only the second insertion
    for arc in blade.arcs:
        a, b = arc.start_transition, arc.end_transition
        if (a.kind, b.kind) == ("secondary-exit", "secondary-entry"):
            if a.insertion == 2:
                assert b.insertion == 2


def test_classification_rejects_foreign_pairs(cfg_neg):
    transit = integrate_korbit(cfg_neg, (2.5, 1.3, -2.0))
    trapped = integrate_korbit(cfg_neg, (2.0, 1.0, -2.0),
                               budget={"max_transitions": 6})
    arc = transit.arcs[0]
    bogus = WArc(radius=arc.radius, t0=arc.t0, t1=arc.t1, start=arc.start,
                 end=arc.end, samples=arc.samples, length=arc.length,
                 start_transition=trapped.transitions[1],
                 end_transition=transit.transitions[0])
    with pytest.raises(InvariantViolation):
        classify_transition_pair(bogus)

    headless = WArc(radius=arc.radius, t0=arc.t0, t1=arc.t1, start=arc.start,
                    end=arc.end, samples=arc.samples, length=arc.length,
                    start_transition=None, end_transition=None)
    with pytest.raises(NotInDomain):
        classify_transition_pair(headless)


# ---------------------------------------------------------------------------
# backward integration


def test_backward_orbit_retraces(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.5, 1.3, 2.0), direction="backward")
    assert orbit.outcome == "exited-at-primary-entry"
    end = orbit.transitions[-1].location
    assert abs(end[0] - 2.5) < 1e-6
    assert abs(ang_diff(end[1], 1.3)) < 1e-6
    assert abs(end[2] + 2.0) < 1e-9


# ---------------------------------------------------------------------------
# the detour shortcut: a balanced block collapses to one base-field hop


def test_check_shortcut(cfg_neg):
    geo = build_geometry(cfg_neg)
    orbit = integrate_korbit(cfg_neg, (2.02, 0.7, -2.0),
                             budget={"max_transitions": 400})
    _, pairs = matched_pairs(orbit)
    i0, i1 = pairs[0] if pairs[0][0] < pairs[-1][0] else pairs[-1]
    res = check_shortcut(cfg_neg, orbit, i0, i1)
    assert res.ok
    r = orbit.transitions[i0].arrival[0]
    assert abs(res.time - float(geo.transit_time(r))) < 1e-6
    assert res.gap < 1e-6


def test_check_shortcut_preconditions(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.0, 1.0, -2.0),
                             budget={"max_transitions": 8})
    entries = [k for k, t in enumerate(orbit.transitions)
               if t.kind == "secondary-entry"]
    with pytest.raises(NotInDomain):
        check_shortcut(cfg_neg, orbit, 0, entries[1])   # not an entry index
    with pytest.raises(NotInDomain):
        check_shortcut(cfg_neg, orbit, entries[0], entries[1])  # no exit


# ---------------------------------------------------------------------------
# serialization


def test_csv_rows_shape(cfg_neg):
    orbit = integrate_korbit(cfg_neg, (2.0, 1.0, -2.0),
                             budget={"max_transitions": 10})
    rows = orbit.to_rows()
    assert rows.shape[1] == 6
    t, arc_idx, level = rows[:, 0], rows[:, 4], rows[:, 5]
    assert np.all(np.diff(t) >= 0)
    assert np.all(np.diff(arc_idx) >= 0)
    assert np.all(arc_idx == np.round(arc_idx))
    # the level column replays the transition count arc by arc
    for k, arc in enumerate(orbit.arcs):
        lv = level[arc_idx == k]
        assert np.all(lv == lv[0])
