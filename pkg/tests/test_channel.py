import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metaprism import channel
from metaprism.channel import (
    PropagationMode,
    array_factor,
    composite_channel,
    equivalent_rcs,
    incident_gain,
    path_loss_db,
    path_loss_ideal_db,
    radar_equation_loss_db,
    reflected_gain,
)
from metaprism.core import Angle2D, OfdmPlan, SurfaceGrid, angle_of, position_of
from metaprism.surface import BeamsteerProfile, IdealProfile, Metaprism, SpecularProfile

EXACT, FAR = PropagationMode.EXACT, PropagationMode.FAR_FIELD
PLAN = OfdmPlan(28e9, 100e6, 256)
LAM = PLAN.wavelength
HALF = SurfaceGrid.square(0.5, LAM / 2)


def test_mode_parsing():
    assert PropagationMode.parse("far-field") is FAR
    assert PropagationMode.parse("EXACT") is EXACT
    with pytest.raises(ValueError):
        PropagationMode.parse("ray")


@pytest.mark.parametrize("mode", [EXACT, FAR])
def test_friis_amplitude_at_boresight(mode):
    g = incident_gain((0, 0, 7.0), np.zeros((1, 3)), 28e9, 1.0, LAM, mode)
    assert abs(g[0]) == pytest.approx(LAM / (4 * math.pi * 7.0))


def test_exact_and_far_field_amplitudes_agree_at_20m():
    p_bs = position_of(Angle2D.from_degrees(45), 20.0)
    exact = np.abs(incident_gain(p_bs, HALF.positions, 28e9, 1.0, LAM, EXACT))
    far = np.abs(incident_gain(p_bs, HALF.positions, 28e9, 1.0, LAM, FAR))
    assert np.max(np.abs(exact / far - 1)) < 0.013


def test_far_field_reference_phase():
    p_bs = np.array([3.0, 0.0, 4.0])
    g = incident_gain(p_bs, np.zeros((1, 3)), PLAN.f0, 1.0, LAM, FAR)[0]
    expected = -2 * math.pi * 5.0 / LAM
    assert np.angle(g * np.exp(-1j * expected)) == pytest.approx(0.0, abs=1e-9)


def test_reflected_gain_example_and_reciprocity():
    g = reflected_gain(np.zeros((1, 3)), (0, 0, 5.0), 28e9, 1.585, LAM)
    assert abs(g[0]) == pytest.approx(math.sqrt(1.585) * LAM / (20 * math.pi))
    cells = HALF.positions[:10]
    p = np.array([-1.0, 0.3, 4.0])
    assert np.allclose(incident_gain(p, cells, 28e9, 2.0, LAM), reflected_gain(cells, p, 28e9, 2.0, LAM))


def test_coincident_endpoint_raises():
    with pytest.raises(ValueError):
        incident_gain(HALF.positions[0], HALF.positions, 28e9, 1.0, LAM, EXACT)


def single_cell(profile):
    return Metaprism.build(SurfaceGrid(1, 1, LAM / 2, LAM / 2), LAM, profile)


@pytest.mark.parametrize("bs_mode, rx_mode", [(EXACT, EXACT), (FAR, EXACT), (FAR, FAR)])
def test_single_cell_is_closed_product(bs_mode, rx_mode):
    p_bs, p = np.array([5.0, 0.0, 5.0]), np.array([-2.0, 1.0, 3.0])
    mp = single_cell(BeamsteerProfile.design(angle_of(p_bs), math.radians(30), PLAN))
    freqs = PLAN.frequencies
    c = composite_channel(mp, p_bs, p, freqs, LAM, 10.0, 1.5, bs_mode, rx_mode)
    cell = mp.grid.positions
    h = incident_gain(p_bs, cell, freqs, 10.0, LAM, bs_mode)[:, 0]
    g = reflected_gain(cell, p, freqs, 1.5, LAM, rx_mode)[:, 0]
    r = mp.cell.amplitude(angle_of(p_bs), angle_of(p)) * np.exp(1j * mp.profile.phase(cell, freqs)[:, 0])
    # ~4000 rad of accumulated phase: 1e-10 relative is machine precision here
    assert np.allclose(c, h * r * g, rtol=1e-10, atol=0)


def test_single_cell_profiles_give_equal_magnitude():
    p_bs, p = np.array([5.0, 0.0, 5.0]), np.array([-2.0, 0.0, 3.0])
    mags = [
        abs(composite_channel(single_cell(prof), p_bs, p, 28e9, LAM, bs_mode=EXACT))
        for prof in (SpecularProfile(), IdealProfile(p_bs, p), BeamsteerProfile(1e-6, 0, 28e9, LAM))
    ]
    assert np.allclose(mags, mags[0])


def test_ideal_profile_aligns_all_phasors():
    grid = SurfaceGrid(12, 9, LAM / 2, LAM / 2)
    p_bs, p = np.array([4.0, 1.0, 6.0]), np.array([-1.5, -0.5, 2.0])
    mp = Metaprism.build(grid, LAM, IdealProfile(p_bs, p))
    f = PLAN.frequencies[[0, 100, 255]]
    c = composite_channel(mp, p_bs, p, f, LAM, bs_mode=EXACT, rx_mode=EXACT)
    amp = np.abs(incident_gain(p_bs, grid.positions, 28e9, 1.0, LAM)) * np.abs(
        reflected_gain(grid.positions, p, 28e9, 1.0, LAM)
    ) * mp.cell.amplitude(angle_of(p_bs), angle_of(p))
    assert np.allclose(np.abs(c), amp.sum(), rtol=1e-12)


def test_recursion_matches_dense_sum(monkeypatch):
    p_bs, p = position_of(Angle2D.from_degrees(45), 20), np.array([-4.0, 0.0, 6.0])
    mp = Metaprism.build(HALF, LAM, BeamsteerProfile.design(angle_of(p_bs), math.radians(40), PLAN))
    dense = composite_channel(mp, p_bs, p, PLAN.frequencies, LAM)
    monkeypatch.setattr(channel, "_DENSE_LIMIT", 0)
    fast = composite_channel(mp, p_bs, p, PLAN.frequencies, LAM)
    assert np.allclose(fast, dense, rtol=1e-9, atol=0)


@given(st.floats(0.5, 30.0), st.floats(0.5, 30.0), st.floats(-70, 70), st.floats(-70, 70))
@settings(max_examples=30, deadline=None)
def test_reciprocity(d1, d2, t1, t2):
    grid = SurfaceGrid(5, 4, LAM / 2, LAM / 2)
    a = position_of(Angle2D.from_degrees(t1), d1)
    b = position_of(Angle2D.from_degrees(t2), d2)
    for fwd, rev in ((SpecularProfile(), SpecularProfile()), (IdealProfile(a, b), IdealProfile(b, a))):
        c_ab = composite_channel(Metaprism.build(grid, LAM, fwd), a, b, 28e9, LAM, 10.0, 1.6, EXACT, EXACT)
        c_ba = composite_channel(Metaprism.build(grid, LAM, rev), b, a, 28e9, LAM, 1.6, 10.0, EXACT, EXACT)
        assert abs(c_ab) == pytest.approx(abs(c_ba), rel=1e-9)


# -- array factor ---------------------------------------------------------------


def test_array_factor_peak_and_null():
    grid = SurfaceGrid(50, 50, LAM / 2, LAM / 2)
    assert abs(array_factor(grid, Angle2D(0.0), 0.0, LAM)) == pytest.approx(2500.0)
    null = math.asin(2 / 50)  # first zero of the Dirichlet kernel for half-wave pitch
    assert abs(array_factor(grid, Angle2D(0.0), null, LAM)) < 0.01 * 2500
    thetas = np.radians(np.linspace(-80, 80, 1601))
    af = np.abs(array_factor(grid, Angle2D.from_degrees(-30), thetas, LAM))
    assert np.all(af <= 2500 + 1e-9)
    assert math.degrees(thetas[np.argmax(af)]) == pytest.approx(-30.0, abs=0.1)


def test_array_factor_accepts_direction_cosines():
    grid = SurfaceGrid(10, 10, LAM / 2, LAM / 2)
    a = array_factor(grid, (0.3, 0.0), np.radians([10, 20]), LAM)
    b = array_factor(grid, Angle2D(math.asin(0.3)), np.radians([10, 20]), LAM)
    assert np.allclose(a, b)


# -- path loss ------------------------------------------------------------------


def test_path_loss_db():
    assert path_loss_db(1e-5) == pytest.approx(100.0)
    assert path_loss_db(0.0) == math.inf
    assert np.allclose(path_loss_db(np.array([1e-3, 1e-4])), [60.0, 80.0])


def test_equivalent_rcs():
    assert equivalent_rcs(0.25, 0.010707, 0.57) == pytest.approx(6849, rel=1e-3)
    assert equivalent_rcs(0.25, LAM, 0.57, Angle2D(0.0), Angle2D.from_degrees(90)) == 0.0
    with pytest.raises(ValueError):
        equivalent_rcs(0.0, LAM, 0.57)


@pytest.mark.parametrize("d1, d2", [(20.0, 2.0), (20.0, 200.0), (5.0, 13.0)])
def test_closed_form_equals_radar_equation(d1, d2):
    mp = Metaprism.build(HALF, LAM, SpecularProfile())
    closed = path_loss_ideal_db((0, 0, d1), (0, 0, d2), LAM, mp.cell, HALF.n_cells, 10.0, 1.585)
    rcs = equivalent_rcs(HALF.area, LAM, mp.cell.q)
    radar = radar_equation_loss_db(d1, d2, LAM, rcs, 10.0, 1.585)
    assert closed == pytest.approx(radar, abs=1e-9)


@pytest.mark.parametrize("d", [5.0, 20.0, 100.0])
def test_ideal_double_sum_matches_closed_form(d):
    # 50 x 50 half-wave surface, boresight transmitter at 20 m
    grid = SurfaceGrid(50, 50, LAM / 2, LAM / 2)
    p_bs, p = np.array([0, 0, 20.0]), np.array([0, 0, d])
    mp = Metaprism.build(grid, LAM, IdealProfile(p_bs, p))
    c = composite_channel(mp, p_bs, p, PLAN.f0, LAM, bs_mode=EXACT)
    closed = path_loss_ideal_db(p_bs, p, LAM, mp.cell, grid.n_cells)
    assert path_loss_db(c) == pytest.approx(closed, abs=0.5)


def test_exact_and_far_field_receiver_agree_beyond_20m():
    p_bs = position_of(Angle2D.from_degrees(45), 20.0)
    mp = Metaprism.build(HALF, LAM, SpecularProfile())
    for d in (20.0, 50.0, 150.0):
        p = position_of(Angle2D.from_degrees(-30), d)
        exact = mp.with_profile(IdealProfile(p_bs, p, bs_far_field=True))
        far = mp.with_profile(IdealProfile(p_bs, p, bs_far_field=True, rx_far_field=True))
        l_exact = path_loss_db(composite_channel(exact, p_bs, p, PLAN.f0, LAM, rx_mode=EXACT))
        l_far = path_loss_db(composite_channel(far, p_bs, p, PLAN.f0, LAM, rx_mode=FAR))
        assert abs(l_exact - l_far) <= 0.5


def test_steered_beam_matches_closed_form_far_away():
    plan = OfdmPlan(28e9, 1e6 / LAM, 256)
    grid = SurfaceGrid(50, 50, LAM / 2, LAM / 2)
    incidence = Angle2D.from_degrees(45)
    p_bs = position_of(incidence, 20.0)
    prof = BeamsteerProfile.design(incidence, math.radians(40), plan)
    mp = Metaprism.build(grid, LAM, prof)
    for k in (1, 64, 128, 200):
        f = plan.frequency(k)
        p = position_of(prof.direction(f), 100.0)
        c = composite_channel(mp, p_bs, p, f, LAM)
        closed = path_loss_ideal_db(p_bs, p, LAM, mp.cell, grid.n_cells)
        assert path_loss_db(c) == pytest.approx(closed, abs=1.0)
