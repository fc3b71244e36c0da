import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcgmub import (
    EnvelopeClipped,
    GridSpec,
    NonPositiveWidth,
    WaveFunction,
    gaussian_state,
    quadrature_variance,
)


def test_grid_points_follow_definition():
    g = GridSpec(half_extent=4.0, n_points=16, center=1.0)
    assert g.spacing == pytest.approx(0.5)
    assert g.points[0] == pytest.approx(-3.0)
    assert g.points[-1] == pytest.approx(1.0 - 4.0 + 15 * 0.5)
    assert len(g.points) == 16


@pytest.mark.parametrize("kwargs", [dict(half_extent=0, n_points=32), dict(half_extent=1, n_points=8)])
def test_grid_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_balanced_grid_matches_momentum_window():
    g = GridSpec.balanced(1024)
    assert math.pi / g.spacing == pytest.approx(g.half_extent)


def test_aligned_grid_puts_bin_edges_between_samples():
    s = 0.731
    g = GridSpec.aligned(2048, s)
    ratio = (g.points / s) % 1.0
    per_bin = round(s / g.spacing)
    assert s / g.spacing == pytest.approx(per_bin)
    # every sample sits at a half-integer offset inside its bin cell
    assert np.allclose((ratio * per_bin) % 1.0, 0.5)
    assert g.is_symmetric


def test_reflection_index_maps_q_to_minus_q():
    g = GridSpec.aligned(64, 0.9)
    q = g.points
    idx = g.reflection_index()
    # wrap to the periodic window before comparing
    wrapped = (-q - g.start) % (2 * g.half_extent) + g.start
    assert np.allclose(q[idx], wrapped)


def test_asymmetric_grid_refuses_reflection():
    g = GridSpec(5.0, 64, center=0.013)
    assert not g.is_symmetric
    with pytest.raises(ValueError):
        g.reflection_index()


def test_wavefunction_is_read_only_copy():
    g = GridSpec.balanced(64)
    raw = np.ones(64)
    psi = WaveFunction(g, raw)
    raw[0] = 5
    assert psi.amplitudes[0] == 1
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 2


def test_wavefunction_shape_checked():
    with pytest.raises(ValueError):
        WaveFunction(GridSpec.balanced(64), np.ones(10))


def test_gaussian_normalized(grid4096):
    psi = gaussian_state(grid4096, center=0.0, width=1.0)
    assert psi.norm() == pytest.approx(1.0, abs=1e-9)


def test_gaussian_variance_equals_width_squared(grid4096):
    for sigma in (0.5, 1.0, 3.0):
        psi = gaussian_state(grid4096, width=sigma)
        assert quadrature_variance(psi, 0.0) == pytest.approx(sigma**2, abs=1e-6)


def test_gaussian_errors():
    g = GridSpec(5.0, 256)
    with pytest.raises(NonPositiveWidth):
        gaussian_state(g, width=0.0)
    with pytest.raises(EnvelopeClipped):
        gaussian_state(g, width=2.0)
    with pytest.raises(EnvelopeClipped):
        gaussian_state(g, center=4.5, width=0.1)


def test_physical_beam_width_in_grid_units():
    from pcgmub.scenarios import default_sigma

    assert default_sigma() == pytest.approx(875 / 187.1, abs=2e-3)


def test_vacuum_variance_is_one_half_in_every_direction(vacuum4096):
    for theta in (0.0, 0.4, math.pi / 2, 2.0, 4.0):
        assert quadrature_variance(vacuum4096, theta) == pytest.approx(0.5, abs=1e-4)


def test_inner_and_distance(grid4096):
    a = gaussian_state(grid4096, width=1.0)
    b = gaussian_state(grid4096, center=0.5, width=1.0)
    assert a.inner(a) == pytest.approx(1.0)
    # overlap of two equal-width Gaussians
    assert abs(a.inner(b)) == pytest.approx(math.exp(-(0.5**2) / 8), rel=1e-9)
    assert a.distance(a) == 0.0
    with pytest.raises(ValueError):
        a.inner(gaussian_state(GridSpec.balanced(1024), width=1.0))


@settings(max_examples=30, deadline=None)
@given(
    center=st.floats(-3, 3),
    width=st.floats(0.4, 3.0),
    tilt=st.floats(-2, 2),
)
def test_gaussian_always_normalized(center, width, tilt):
    g = GridSpec.balanced(2048)
    psi = gaussian_state(g, center=center, width=width, tilt=tilt)
    assert psi.norm() == pytest.approx(1.0, abs=1e-9)
    assert psi.mean() == pytest.approx(center, abs=1e-6)
