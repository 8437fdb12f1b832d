"""Insertion face geometry against closed forms and the RK4 oracle."""

import math

import numpy as np
import pytest

import oracles
from plugflow import PlugConfig
from plugflow.errors import ConstructionInvalid, DomainError, PlugError
from plugflow.geometry import TWO_PI, ang_diff
from plugflow.insertion import (InsertionGeometry, build_geometry,
                                compute_r_eps_closed, swap_chart,
                                verify_insertion_hypotheses)

ZETA1 = math.pi / 4
ZETA2 = -math.pi / 4
PHI_C1 = ZETA1 + math.pi


@pytest.fixture(scope="module")
def geo(default_config):
    return build_geometry(default_config)


@pytest.fixture(scope="module")
def geo_neg(default_config):
    return build_geometry(default_config.with_eps(-0.1))


# ---------------------------------------------------------------------------
# frozen closed-form values (default eps=0.01, beta=4)

def test_fixed_radius_closed_form_default(geo):
    assert compute_r_eps_closed(0.01, 4.0) == 2.0 + math.sqrt(0.0025)
    assert abs(geo.compute_r_eps() - 2.05) < 1e-12


def test_fixed_radius_bisection_matches_other_betas(default_config):
    g16 = build_geometry(default_config.with_updates(beta=16.0))
    assert abs(g16.compute_r_eps() - 2.025) < 1e-12


def test_fixed_radius_negative_eps_rejected(geo_neg):
    with pytest.raises(PlugError):
        geo_neg.compute_r_eps()


def test_center_inverse_frozen_value(geo):
    # v(x) = 2 solved on the rising branch
    expect = oracles.q_center(2.0, 0.01, 4.0)
    assert abs(expect - 1.9903708798216374) < 1e-15
    assert abs(geo.q_center(2.0) - expect) < 1e-12


def test_center_profile_endpoints(geo):
    assert abs(geo.rho_center(1.5) - 1.0) < 1e-15
    assert abs(geo.rho_center(3.0) - 2.5) < 1e-15
    assert abs(geo.rho_center(2.0) - 2.01) < 1e-15


def test_center_profile_monotone_and_contracting(geo):
    xs = np.linspace(1.5, 3.0, 3001)
    rho = geo.rho_center(xs)
    assert np.all(np.diff(rho) > 0)
    off = np.abs(xs - 2.0) > 1e-3
    assert np.all(rho[off] < xs[off] + 0.01)


def test_q_center_negative_eps_exceeds_two(geo_neg):
    # with eps < 0 the footprint tracking image radius 2 sits outside radius 2
    q2 = geo_neg.q_center(2.0)
    assert q2 > 2.05
    assert abs(geo_neg.rho_center(q2) - 2.0) < 1e-9


# ---------------------------------------------------------------------------
# entry face chart

def test_entry_map_center_point(geo):
    p = geo.entry_face_map(1, 2.0, ZETA1)
    assert abs(p[0] - 2.01) < 1e-15
    assert abs(ang_diff(p[1], PHI_C1)) < 1e-15
    assert abs(p[2] - (-1.0 + 0.05)) < 1e-15


def test_entry_map_parabola_edge_hits_rim(geo):
    for psi in (-0.1, -0.04, 0.0, 0.07, 0.1):
        rp = 1.5 + 150.0 * psi * psi
        p = geo.entry_face_map(1, rp, ZETA1 + psi)
        assert abs(p[0] - 1.0) < 1e-12
        assert abs(p[2] + 2.0) < 1e-12
        assert abs(ang_diff(p[1], PHI_C1 + psi)) < 1e-12


def test_entry_map_fixed_radius_level(geo):
    # footprint radius r_eps on the center line and at the matching angle
    psi_v = math.sqrt((2.05 - geo.q_center(2.0)) / 150.0)
    assert abs(psi_v - 0.019938090877908803) < 1e-12
    p0 = geo.entry_face_map(1, 2.05, ZETA1)
    assert abs(p0[0] - geo.rho_center(2.05)) < 1e-15
    p1 = geo.entry_face_map(1, 2.05, ZETA1 + psi_v)
    assert abs(p1[0] - 2.0) < 1e-10


def test_entry_map_rejects_outside_blade(geo):
    with pytest.raises(DomainError):
        geo.entry_face_map(1, 1.49, ZETA1)
    with pytest.raises(DomainError):
        geo.entry_face_map(1, 2.0, ZETA1 + 0.2)
    with pytest.raises(DomainError):
        geo.entry_face_map(1, 1.6, ZETA1 + 0.05)  # below the parabola


def test_entry_height_matches_oracle(geo, rng):
    for _ in range(200):
        r = rng.uniform(1.0, 2.5)
        psi = rng.uniform(-0.1, 0.1)
        assert geo.entry_height(r, psi) == pytest.approx(
            oracles.oracle_entry_z(r, psi, 0.05), abs=1e-14)


def test_entry_round_trip(geo, rng):
    for _ in range(100):
        psi = rng.uniform(-0.099, 0.099)
        rp = rng.uniform(1.5 + 150.0 * psi * psi + 1e-9, 3.0)
        p = geo.entry_face_map(1, rp, ZETA1 + psi)
        rp2, thp2 = geo.face_inverse(1, p, side="entry")
        assert abs(rp2 - rp) < 1e-9
        assert abs(ang_diff(thp2, ZETA1 + psi)) < 1e-12


def test_shadow_half_width(geo):
    assert abs(geo.psi_out(1.0) - 0.1) < 1e-12
    assert geo.psi_out(2.5) < 1e-6
    assert abs(geo.psi_out(2.0) - math.sqrt((3.0 - geo.q_center(2.0)) / 150.0)) \
        < 1e-12


# ---------------------------------------------------------------------------
# transit and exit face

def test_transit_time_profile(geo):
    assert geo.transit_time(1.0) == 40.0
    assert abs(geo.transit_time(1.12) - 0.08) < 1e-13
    assert abs(geo.transit_time(2.3) - 0.08) < 1e-15
    assert oracles.oracle_transit(1.06) == pytest.approx(
        geo.transit_time(1.06), rel=1e-13)


def test_exit_map_against_rk4_oracle(geo):
    for (rp, dpsi) in ((2.2, 0.01), (2.0, 0.0), (2.6, -0.05), (1.7, 0.03)):
        entry = geo.entry_face_map(1, rp, ZETA1 + dpsi)
        lam = geo.transit_time(entry[0])
        ref = oracles.rk4_flow(tuple(entry), lam, 4000)
        out = geo.exit_face_map(1, rp, ZETA1 + dpsi)
        assert abs(out[0] - rp if False else out[0] - ref[0]) < 1e-12
        assert abs(ang_diff(out[1], ref[1] % TWO_PI)) < 1e-8
        assert abs(out[2] - ref[2]) < 1e-8


def test_exit_rim_reaches_top_cap(geo):
    out = geo.exit_face_map(1, 1.5, ZETA1)
    assert abs(out[0] - 1.0) < 1e-12
    assert abs(out[2] - 2.0) < 1e-9
    assert abs(ang_diff(out[1], PHI_C1)) < 1e-12


def test_exit_graph_consistent_with_exit_map(geo, rng):
    for _ in range(40):
        psi = rng.uniform(-0.09, 0.09)
        rp = rng.uniform(1.5 + 150.0 * psi * psi + 1e-6, 3.0)
        out = geo.exit_face_map(1, rp, ZETA1 + psi)
        zt = geo.exit_height(out[0], ang_diff(out[1], PHI_C1))
        assert np.isfinite(zt)
        assert abs(float(zt) - out[2]) < 5e-7


def test_exit_round_trip(geo, rng):
    for _ in range(40):
        psi = rng.uniform(-0.09, 0.09)
        rp = rng.uniform(1.5 + 150.0 * psi * psi + 1e-6, 3.0)
        out = geo.exit_face_map(1, rp, ZETA1 + psi)
        rp2, thp2 = geo.face_inverse(1, out, side="exit")
        assert abs(rp2 - rp) < 1e-5
        assert abs(ang_diff(thp2, ZETA1 + psi)) < 1e-6


def test_entry_exit_radius_agreement(geo, rng):
    for _ in range(50):
        psi = rng.uniform(-0.099, 0.099)
        rp = rng.uniform(1.5 + 150.0 * psi * psi + 1e-9, 3.0)
        a = geo.entry_face_map(1, rp, ZETA1 + psi)
        b = geo.exit_face_map(1, rp, ZETA1 + psi)
        assert abs(a[0] - b[0]) < 1e-12


# ---------------------------------------------------------------------------
# the second insertion (quarter-turn height flip of the first)

def test_second_insertion_is_transported_image(geo):
    rp, u = 2.1, 0.02
    e2 = geo.entry_face_map(2, rp, ZETA2 + u)
    x1 = geo.exit_face_map(1, rp, ZETA1 + u)
    assert np.allclose(e2, swap_chart(x1, -math.pi / 2), atol=1e-12)
    x2 = geo.exit_face_map(2, rp, ZETA2 + u)
    e1 = geo.entry_face_map(1, rp, ZETA1 + u)
    assert np.allclose(x2, swap_chart(e1, -math.pi / 2), atol=1e-12)


def test_second_insertion_transit_follows_flow(geo):
    # the transported exit face must sit on the forward flow of the
    # transported entry face; a plain reflection would put it upstream
    for rp, u in [(2.1, 0.02), (2.6, -0.05), (1.8, 0.0)]:
        p_in = geo.entry_face_map(2, rp, ZETA2 + u)
        p_out = geo.exit_face_map(2, rp, ZETA2 + u)
        lam = float(geo.transit_time(float(p_in[0])))
        got = oracles.rk4_flow(tuple(map(float, p_in)), lam, 4000)
        assert abs(ang_diff(got[1], p_out[1])) < 1e-8
        assert abs(got[2] - p_out[2]) < 1e-8


def test_second_insertion_face_inverse(geo):
    rp, thp = 2.3, ZETA2 - 0.03
    e2 = geo.entry_face_map(2, rp, thp)
    rp2, thp2 = geo.face_inverse(2, e2, side="entry")
    assert abs(rp2 - rp) < 1e-5
    assert abs(ang_diff(thp2, thp)) < 1e-6
    x2 = geo.exit_face_map(2, rp, thp)
    rp3, thp3 = geo.face_inverse(2, x2, side="exit")
    assert abs(rp3 - rp) < 1e-9
    assert abs(ang_diff(thp3, thp)) < 1e-12


def test_curtain_heights_transported(geo):
    z2 = geo.curtain_height(2, 2.1, 0.01, side="entry")
    z1 = geo.curtain_height(1, 2.1, 0.01, side="exit")
    assert abs(float(z2) + float(z1)) < 1e-12
    w2 = geo.curtain_window(2, 2.1, side="entry")
    w1 = geo.curtain_window(1, 2.1, side="exit")
    assert abs(w2[0] - w1[0]) < 1e-12 and abs(w2[1] - w1[1]) < 1e-12
    z2x = geo.curtain_height(2, 2.1, -0.03, side="exit")
    z1e = geo.curtain_height(1, 2.1, -0.03, side="entry")
    assert abs(float(z2x) + float(z1e)) < 1e-12


# ---------------------------------------------------------------------------
# membership

def test_membership_examples(geo):
    assert geo.region_membership((2.0, math.pi, 0.0)) == "outside"
    face_pt = geo.entry_face_map(1, 2.2, ZETA1)
    assert geo.region_membership(face_pt) == "on-face"
    entry = geo.entry_face_map(1, 2.2, ZETA1 + 0.01)
    lam = geo.transit_time(entry[0])
    mid = oracles.rk4_flow(tuple(entry), lam / 2.0, 400)
    assert geo.region_membership(mid) == "inside-1"
    assert geo.region_membership(swap_chart(mid, -math.pi / 2)) == "inside-2"


def test_membership_outside_cases(geo):
    assert geo.region_membership((2.7, PHI_C1, -1.0)) == "outside"
    assert geo.region_membership((2.0, PHI_C1, 1.5)) == "outside"
    assert geo.region_membership((2.0, PHI_C1 + 0.5, -1.0)) == "outside"


# ---------------------------------------------------------------------------
# hypothesis battery

@pytest.mark.parametrize("eps", [-0.1, -0.05, 0.005, 0.01, 0.02])
def test_verify_hypotheses_at_acceptance_parameters(default_config, eps):
    rep = verify_insertion_hypotheses(default_config.with_eps(eps),
                                      grid_resolution=48)
    assert rep.ok, "\n".join(rep.lines())


def test_verify_item_names_are_condition_codes(default_config):
    rep = verify_insertion_hypotheses(default_config, grid_resolution=24)
    names = [it.name for it in rep.items]
    assert any(n.startswith("K1-") for n in names)
    assert any(n.startswith("K8-") for n in names)
    assert any("fixed-radius" in n for n in names)


def test_construction_rejects_incompatible_window():
    cfg = PlugConfig.default().with_updates(eps=0.04, beta=16.0)
    with pytest.raises(PlugError):
        InsertionGeometry(cfg)
    rep = verify_insertion_hypotheses(cfg)
    assert not rep.ok
    # the closed form itself is still available
    assert abs(compute_r_eps_closed(0.04, 16.0) - 2.05) < 1e-15


def test_construction_rejects_asymmetric_angles():
    cfg = PlugConfig.default().with_updates(zeta2=-math.pi / 3)
    with pytest.raises(ConstructionInvalid):
        InsertionGeometry(cfg)
