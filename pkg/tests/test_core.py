import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metaprism.core import (
    SPEED_OF_LIGHT,
    Angle2D,
    OfdmPlan,
    SurfaceGrid,
    angle_from_direction_cosines,
    angle_of,
    direction_cosines,
    fraunhofer_distance,
    fresnel_distance,
    position_of,
    subcarrier_frequency,
)

PLAN = OfdmPlan(28e9, 100e6, 256)
LAM = SPEED_OF_LIGHT / 28e9


@pytest.mark.parametrize(
    "k, expected",
    [(128, 28.0e9), (256, 28.05e9), (1, 27.950390625e9)],
)
def test_subcarrier_frequency(k, expected):
    assert subcarrier_frequency(PLAN, k) == pytest.approx(expected, rel=1e-15)
    assert PLAN.frequencies[k - 1] == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("k", [0, 257, -3])
def test_subcarrier_frequency_out_of_range(k):
    with pytest.raises(IndexError):
        subcarrier_frequency(PLAN, k)


def test_frequency_grid_is_increasing_and_sums_to_series():
    f = PLAN.frequencies
    assert np.all(np.diff(f) > 0)
    k = np.arange(1, PLAN.n_subcarriers + 1)
    # sum_k (f_k - f0) = sum_k (k df - W/2) = df K(K+1)/2 - K W/2 = K df / 2
    expected = PLAN.spacing * k.sum() - PLAN.n_subcarriers * PLAN.bandwidth / 2
    assert np.sum(f - PLAN.f0) == pytest.approx(expected, rel=1e-9)
    assert expected == pytest.approx(PLAN.n_subcarriers * PLAN.spacing / 2)


def test_wide_band_warns():
    with pytest.warns(UserWarning, match="relative bandwidth"):
        OfdmPlan(1e9, 100e6, 8)


@pytest.mark.parametrize("kwargs", [dict(f0=0, bandwidth=1, n_subcarriers=1), dict(f0=1, bandwidth=0, n_subcarriers=1),
                                    dict(f0=1e9, bandwidth=1e6, n_subcarriers=0)])
def test_plan_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        OfdmPlan(**kwargs)


@pytest.mark.parametrize(
    "theta_deg, phi_deg, expected",
    [(0, 0, (0.0, 0.0)), (90, 0, (1.0, 0.0)), (45, 0, (0.70711, 0.0)), (30, 90, (0.0, 0.5))],
)
def test_direction_cosines(theta_deg, phi_deg, expected):
    ux, uy = direction_cosines(*Angle2D.from_degrees(theta_deg, phi_deg))
    assert (ux, uy) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize(
    "position, expected_deg",
    [((0, 0, 5), (0, 0)), ((5, 0, 5), (45, 0)), ((-14.21, 0, 14.21), (-45, 0)), ((0, 3, 3), (45, 90))],
)
def test_angle_of(position, expected_deg):
    assert angle_of(position).degrees() == pytest.approx(expected_deg, abs=1e-12)


@pytest.mark.parametrize("position", [(0, 0, 0), (1, 0, -1)])
def test_angle_of_rejects(position):
    with pytest.raises(ValueError):
        angle_of(position)


front_angles = st.tuples(
    st.floats(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6),
    st.floats(0.0, math.pi - 1e-6),
)


@given(front_angles, st.floats(0.01, 1e4))
def test_angle_position_round_trip(angle, distance):
    theta, phi = angle
    if abs(theta) < 1e-9:
        theta, phi = 0.0, 0.0
    a = Angle2D(theta, phi)
    b = angle_of(position_of(a, distance))
    # compare through direction cosines; phi is arbitrary at boresight
    assert np.allclose(direction_cosines(*b), direction_cosines(*a), atol=1e-12)
    assert b.theta == pytest.approx(theta, abs=1e-9)


@given(st.tuples(st.floats(-100, 100), st.floats(-100, 100), st.floats(1e-3, 100)))
def test_angle_of_reproduces_direction_cosines(p):
    x, y, z = p
    r = math.sqrt(x * x + y * y + z * z)
    ux, uy = direction_cosines(*angle_of(p))
    assert ux == pytest.approx(x / r, abs=1e-12)
    assert uy == pytest.approx(y / r, abs=1e-12)


@given(front_angles)
def test_angle_from_direction_cosines_inverts(angle):
    theta, phi = angle
    ux, uy = direction_cosines(theta, phi)
    back = angle_from_direction_cosines(float(ux), float(uy))
    assert np.allclose(direction_cosines(*back), (ux, uy), atol=1e-12)
    assert -math.pi / 2 <= back.theta < math.pi / 2
    assert 0 <= back.phi < math.pi


def test_angle_from_direction_cosines_rejects_evanescent():
    with pytest.raises(ValueError):
        angle_from_direction_cosines(0.9, 0.9)


def test_surface_grid_layout():
    g = SurfaceGrid(4, 2, 0.1, 0.2)
    assert g.length_x == pytest.approx(0.4)
    assert g.diameter == pytest.approx(0.4)
    assert g.area == pytest.approx(0.16)
    assert g.positions.shape == (8, 3)
    assert tuple(g.positions[0]) == pytest.approx((-0.2, -0.2, 0.0))
    n, m = g.indices
    assert np.allclose(g.positions[:, 0], n * g.dx - g.length_x / 2)
    assert np.allclose(g.positions[:, 1], m * g.dy - g.length_y / 2)


def test_surface_grid_square_and_validation():
    g = SurfaceGrid.square(0.5, LAM / 2)
    assert g.n_x == g.n_y == 93
    with pytest.raises(ValueError):
        SurfaceGrid(0, 1, 0.1, 0.1)
    with pytest.raises(ValueError):
        SurfaceGrid(1, 1, 0.0, 0.1)


@pytest.mark.parametrize(
    "fn, d, expected",
    [(fraunhofer_distance, 0.0, 0.0), (fraunhofer_distance, 0.5, 46.70), (fresnel_distance, 0.5, 0.900)],
)
def test_field_distances(fn, d, expected):
    assert fn(d, 0.010707) == pytest.approx(expected, abs=5e-3)


@pytest.mark.parametrize("fn", [fraunhofer_distance, fresnel_distance])
def test_field_distances_reject_bad_wavelength(fn):
    with pytest.raises(ValueError):
        fn(0.5, 0.0)


def test_field_distance_monotonicity_and_ordering():
    ds = np.linspace(LAM / 2 * 1.001, 5.0, 200)
    dfr = np.array([fraunhofer_distance(d, LAM) for d in ds])
    dfs = np.array([fresnel_distance(d, LAM) for d in ds])
    assert np.all(np.diff(dfr) > 0)
    assert np.all(dfs < dfr)
    assert fraunhofer_distance(1.0, 0.01) < fraunhofer_distance(1.0, 0.005)
