import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interaural.stimulus import (GRID_SENTINEL, DegenerateStimulusError, ParameterError,
                                 PdfGrid, StimulusParams, iar_from_ild, ild_from_iar,
                                 in_pow_support, joint_grid, joint_pow_ipd_pdf,
                                 joint_r_ipd_pdf, pow_ipd_regular_part, support_p_hat,
                                 support_phi_hat)

UNIT_PI = StimulusParams(1.0, math.pi)

snr_db = st.floats(-30.0, 30.0)
psi = st.floats(-math.pi, math.pi).filter(lambda x: abs(x) > 1e-3)
phi = st.floats(-math.pi, math.pi)


def expanded_r_ipd(r, dphi, c, psi, var):
    # textbook form with h(a) = r^2 - 2 r cos(dphi - a) + 1
    h = lambda a: r * r - 2 * r * math.cos(dphi - a) + 1
    return (2 * c * c * r * math.sin(psi / 2) ** 2 / (var * math.pi * h(0) ** 2)
            * math.exp(-c * c * h(psi) / (2 * var * h(0))))


# ---- parameters

def test_snr_conversion():
    p = StimulusParams.from_snr_db(0.0, math.pi)
    assert p.c2 == pytest.approx(2.0)
    assert p.snr_db == pytest.approx(0.0, abs=1e-12)
    assert StimulusParams.from_snr_db(-10.0, 1.0).snr == pytest.approx(0.1)


def test_psi_normalized_into_half_open_circle():
    assert StimulusParams(1.0, 3 * math.pi).tone_ipd_psi == pytest.approx(math.pi)
    assert StimulusParams(1.0, -math.pi).tone_ipd_psi == pytest.approx(math.pi)
    assert StimulusParams(1.0, 2 * math.pi - 0.5).tone_ipd_psi == pytest.approx(-0.5)


@pytest.mark.parametrize("c,psi_,var", [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 2 * math.pi, 1.0)])
def test_degenerate_stimuli_rejected(c, psi_, var):
    with pytest.raises(DegenerateStimulusError):
        StimulusParams(c, psi_, var)


@pytest.mark.parametrize("c,var", [(-1.0, 1.0), (1.0, 0.0), (1.0, -2.0), (math.inf, 1.0),
                                   (math.nan, 1.0)])
def test_invalid_parameters_rejected(c, var):
    with pytest.raises(ParameterError):
        StimulusParams(c, 1.0, var)


# ---- (r, dphi) joint

def test_r_ipd_hand_values():
    assert joint_r_ipd_pdf(UNIT_PI, 1.0, math.pi / 2) == pytest.approx(
        math.exp(-0.5) / (2 * math.pi), rel=1e-14)
    assert joint_r_ipd_pdf(UNIT_PI, 1.0, math.pi / 2) == pytest.approx(0.0965324, abs=5e-8)
    half = StimulusParams(1.0, math.pi / 2)
    assert joint_r_ipd_pdf(half, 2.0, 0.3) == pytest.approx(0.0907235, abs=5e-8)
    assert joint_r_ipd_pdf(half, 0.5, 0.3) == pytest.approx(0.3628940, abs=5e-8)


def test_r_ipd_singular_point_is_zero():
    for p in (UNIT_PI, StimulusParams(0.1, 0.4, 3.0), StimulusParams(5.0, -2.0)):
        assert joint_r_ipd_pdf(p, 1.0, 0.0) == 0.0
    # the approach is smooth, never NaN
    eps = np.geomspace(1e-300, 1e-3, 50)
    vals = joint_r_ipd_pdf(UNIT_PI, 1.0 + eps, eps)
    assert np.all(np.isfinite(vals)) and np.all(vals >= 0)


def test_r_ipd_positive_at_zero_ipd_away_from_r_one():
    # the literal formula is positive at dphi = 0 for r != 1: (4/pi) e^-4.5 here
    assert joint_r_ipd_pdf(UNIT_PI, 2.0, 0.0) == pytest.approx(4 / math.pi * math.exp(-4.5),
                                                                rel=1e-14)


def test_r_ipd_zero_at_r_zero():
    assert joint_r_ipd_pdf(UNIT_PI, 0.0, 1.0) == 0.0


def test_r_ipd_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        joint_r_ipd_pdf(UNIT_PI, -0.1, 0.0)
    with pytest.raises(ParameterError):
        joint_r_ipd_pdf(UNIT_PI, 1.0, 3.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 50.0), phi, snr_db, psi, st.floats(0.1, 10.0))
def test_r_ipd_matches_expanded_form(r, dphi, snr, psi_, var):
    p = StimulusParams.from_snr_db(snr, psi_, var)
    want = expanded_r_ipd(r, dphi, p.tone_amplitude_c, p.tone_ipd_psi, var)
    got = joint_r_ipd_pdf(p, r, dphi)
    if want > 1e-250:
        assert got == pytest.approx(want, rel=1e-8)
    else:
        assert got < 1e-240


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 100.0), phi, snr_db, psi)
def test_r_ipd_reciprocity(r, dphi, snr, psi_):
    p = StimulusParams.from_snr_db(snr, psi_)
    a = joint_r_ipd_pdf(p, 1.0 / r, dphi)
    b = r * r * joint_r_ipd_pdf(p, r, dphi)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 100.0), phi, snr_db, psi)
def test_r_ipd_reflection(r, dphi, snr, psi_):
    p = StimulusParams.from_snr_db(snr, psi_)
    assert joint_r_ipd_pdf(p, r, dphi) == pytest.approx(
        joint_r_ipd_pdf(p.reflected(), r, -dphi), rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100.0), phi, snr_db, psi, st.floats(0.01, 100.0))
def test_r_ipd_depends_only_on_snr(r, dphi, snr, psi_, k):
    p = StimulusParams.from_snr_db(snr, psi_)
    q = StimulusParams(math.sqrt(k) * p.tone_amplitude_c, psi_, k)
    assert joint_r_ipd_pdf(p, r, dphi) == pytest.approx(joint_r_ipd_pdf(q, r, dphi),
                                                         rel=1e-10, abs=1e-300)


# ---- (p', dphi) joint

def test_pow_ipd_hand_value():
    v = joint_pow_ipd_pdf(UNIT_PI, 1.0, math.pi / 2)
    assert v == pytest.approx(math.exp(-0.5) / (2 * math.pi * math.sqrt(3)), rel=1e-14)
    assert v == pytest.approx(0.0557330, abs=5e-8)


def test_pow_ipd_outside_support_is_distinct():
    assert math.isnan(joint_pow_ipd_pdf(UNIT_PI, 2.5, math.pi / 2))
    assert joint_pow_ipd_pdf(UNIT_PI, 2.5, math.pi / 2, outside=-1.0) == -1.0
    assert not in_pow_support(UNIT_PI, 2.5, math.pi / 2)
    assert in_pow_support(UNIT_PI, 1.9, math.pi / 2)
    assert math.isnan(joint_pow_ipd_pdf(UNIT_PI, 2.0 * (1 + 1e-12), math.pi / 2))


def test_pow_ipd_g_matches_boundary_polynomial():
    # at psi = pi, dphi = pi/2 the support polynomial is g = 4 - p^2
    p = np.linspace(0.1, 1.99, 25)
    f = joint_pow_ipd_pdf(UNIT_PI, p, math.pi / 2)
    want = p * np.exp(-0.5) / (2 * math.pi * np.sqrt(4 - p * p))
    np.testing.assert_allclose(f, want, rtol=1e-13)


def test_pow_ipd_diverges_toward_boundary():
    p_hat = 2.0
    vals = joint_pow_ipd_pdf(UNIT_PI, p_hat * (1 - np.geomspace(1e-2, 1e-12, 6)), math.pi / 2)
    assert np.all(np.diff(vals) > 0) and vals[-1] > 1e4


def test_regular_part_is_density_times_root_distance():
    p = StimulusParams(1.3, 2.0)
    dphi = np.array([-2.5, -0.7, 0.4, 1.9, 3.0])
    for frac in (0.1, 0.5, 0.999):
        pv = frac * support_p_hat(p, dphi)
        want = joint_pow_ipd_pdf(p, pv, dphi) * np.sqrt(support_p_hat(p, dphi) - pv)
        np.testing.assert_allclose(pow_ipd_regular_part(p, pv, dphi), want, rtol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 0.999), phi, snr_db, psi, st.floats(0.01, 100.0))
def test_pow_ipd_scaling(frac, dphi, snr, psi_, k):
    p = StimulusParams.from_snr_db(snr, psi_)
    pv = frac * min(support_p_hat(p, dphi), 50 * p.c2)
    q = StimulusParams(math.sqrt(k) * p.tone_amplitude_c, psi_, k)
    a = joint_pow_ipd_pdf(p, pv, dphi, outside=0.0)
    b = k * joint_pow_ipd_pdf(q, k * pv, dphi, outside=0.0)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-300)


# ---- support

def test_support_p_hat_values():
    assert support_p_hat(UNIT_PI, math.pi / 2) == pytest.approx(2.0, rel=1e-15)
    assert support_p_hat(UNIT_PI, 0.0) == math.inf
    for psi_ in (0.3, math.pi / 4, math.pi / 2, 2.5, math.pi, -1.2):
        p = StimulusParams(1.7, psi_)
        for s in (1, -1):
            assert support_p_hat(p, s * p.tone_ipd_psi) == pytest.approx(p.c2, rel=1e-15)
            assert support_p_hat(p, s * math.pi) == pytest.approx(
                p.c2 * math.sin(p.tone_ipd_psi / 2) ** 2, rel=1e-15)


def test_support_phi_hat_values():
    assert support_phi_hat(UNIT_PI, 2.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert support_phi_hat(UNIT_PI, 4.0) == pytest.approx(math.pi / 3, rel=1e-15)
    assert support_phi_hat(UNIT_PI, 1.0) == pytest.approx(math.pi)
    p = StimulusParams(2.0, 1.1)
    assert support_phi_hat(p, p.s2) == math.pi
    with pytest.raises(ParameterError):
        support_phi_hat(p, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, math.pi), snr_db, psi)
def test_support_inverse_pair(dphi, snr, psi_):
    p = StimulusParams.from_snr_db(snr, psi_)
    assert support_phi_hat(p, support_p_hat(p, dphi)) == pytest.approx(dphi, rel=1e-7)


def test_support_phi_hat_nonincreasing():
    p = StimulusParams(1.0, 2.0)
    h = support_phi_hat(p, np.geomspace(1e-3, 1e3, 500))
    assert np.all(np.diff(h) <= 0)


@settings(max_examples=200, deadline=None)
@given(phi, snr_db, psi)
def test_g_vanishes_on_boundary(dphi, snr, psi_):
    # g = 2C^2 s^2 [2p cos dphi - C^2 (cos psi - 1)] - p^2 sin^2 dphi in its literal form
    p = StimulusParams.from_snr_db(snr, psi_)
    ph = support_p_hat(p, dphi)
    if not math.isfinite(ph) or abs(math.sin(dphi / 2)) < 1e-3:
        return
    c2, ps = p.c2, p.tone_ipd_psi
    s2 = math.sin(ps / 2) ** 2
    g = 2 * c2 * s2 * (2 * ph * math.cos(dphi) - c2 * (math.cos(ps) - 1)) - ph ** 2 * math.sin(dphi) ** 2
    scale = (2 * c2 * s2) * (2 * ph + 2 * c2) + ph ** 2
    assert abs(g) <= 1e-10 * scale
    inside = 0.5 * ph
    assert in_pow_support(p, inside, dphi)


# ---- ILD / IAR

def test_ild_iar_values():
    assert ild_from_iar(1.0) == 0.0
    assert ild_from_iar(2.0) == pytest.approx(6.0206, abs=5e-5)
    assert iar_from_ild(-20.0) == pytest.approx(0.1, rel=1e-15)
    with pytest.raises(ParameterError):
        ild_from_iar(0.0)


@given(st.floats(-200, 200))
def test_ild_iar_inverse(dl):
    assert ild_from_iar(iar_from_ild(dl)) == pytest.approx(dl, abs=1e-12)


# ---- grids

def test_pow_grid_marks_undefined_cells():
    p = StimulusParams.from_snr_db(0.0, math.pi)
    q = np.linspace(0, 4, 161)
    g = joint_grid("pow-ipd", p, p.c2 * q, np.linspace(-math.pi, math.pi, 181))
    i, j = np.searchsorted(q, 2.5), 135          # dphi = pi/2
    assert g.axis2[j] == pytest.approx(math.pi / 2)
    assert g.values[i, j] == GRID_SENTINEL
    assert not g.defined[i, j]
    assert g.values[g.defined].min() >= 0


def test_r_grid_full_support():
    g = joint_grid("r-ipd", StimulusParams(1.0, 2.0), np.linspace(0, 10, 51),
                   np.linspace(-math.pi, math.pi, 37))
    assert g.defined.all() and g.values.min() >= 0


def test_pdf_grid_validation():
    with pytest.raises(ValueError):
        PdfGrid("a", "b", [0, 1], [0, 1], [[0, np.nan], [0, 0]])
    with pytest.raises(ValueError):
        PdfGrid("a", "b", [0, 1], [0, 1], [[0, -0.5], [0, 0]])
    with pytest.raises(ValueError):
        PdfGrid("a", "b", [1, 0], [0, 1], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        joint_grid("nope", UNIT_PI, [1.0], [0.0])
