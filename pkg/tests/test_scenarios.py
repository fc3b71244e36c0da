import math

import numpy as np
import pytest

from pcgmub import GridSpec, InvalidM, gaussian_state
from pcgmub.scenarios import (
    alpha23_sweep,
    commensurate_grid,
    hermite_basis,
    kl_analysis,
    modular_counterexample,
    operator_identity,
    simulate_pair,
    simulate_triple,
    variance_triple,
)


def test_pair_defaults_cover_enough_periods():
    res = simulate_pair(4, 2 * math.pi / 3)
    assert res.periods_covered >= 8
    assert res.probabilities.shape == (4, 4)
    assert res.max_deviation < 1e-2


def test_pair_rejects_excluded_m():
    with pytest.raises(InvalidM):
        simulate_pair(4, 1.0, m=2)


def test_pair_single_bin_and_extent():
    res = simulate_pair(3, 1.0, k0=1, extent=90.0)
    assert res.probabilities.shape == (1, 3)
    assert res.grid.half_extent == pytest.approx(90.0, rel=0.05)


def test_same_direction_control():
    t = math.sqrt(2 * math.pi * 2)
    res = simulate_pair(2, 0.0, 0.0, periods=(t, t))
    assert np.allclose(res.probabilities, np.eye(2), atol=1e-3)


def test_triple_structure():
    res = simulate_triple(3, 1)
    assert res.probabilities.shape == (3, 3, 3)
    assert res.control_max < 1e-3
    assert res.cross_max < 1e-2


def test_counterexample_breaks_uniformity():
    res = modular_counterexample()
    assert max(r.max_deviation for r in res.values()) >= 0.1
    # every d=3 preparation is far from uniform
    assert np.all(res[3].deviations >= 0.1)


def test_alpha23_sweep_reliability_flags():
    points = alpha23_sweep(2, widths=(1, 8))
    assert not points[0].reliable
    assert points[1].reliable and points[1].max_kl < 0.05


def test_commensurate_grid_shift_is_whole_samples():
    for d, delta in ((2, math.pi / 2), (3, math.radians(23))):
        g = commensurate_grid(d, delta)
        period = d * 16 * g.spacing
        tau = 2 * math.pi * abs(math.sin(delta)) / period
        assert tau / g.spacing == pytest.approx(round(tau / g.spacing), abs=1e-9)


def test_hermite_basis_orthonormal():
    g = GridSpec.balanced(512)
    v = hermite_basis(g, 6)
    gram = v.conj().T @ v * g.spacing
    assert np.allclose(gram, np.eye(6), atol=1e-10)


def test_operator_identity_reports_both_errors():
    res = operator_identity(2, math.pi / 2)
    assert res.compressed_error < 1e-3
    assert res.full_error > res.compressed_error
    assert 0 <= res.dropped_weight < 1


def test_kl_analysis_small():
    r = kl_analysis(3, samples=2000, seed=1)
    assert r.max_simulated < 0.01
    assert r.simulated_kl.shape == (3 * 6,)
    assert r.meets_reference
    again = kl_analysis(3, samples=2000, seed=1)
    assert np.array_equal(r.random_kl, again.random_kl)


def test_variance_triple_bound():
    g = GridSpec.balanced(4096)
    for psi in (
        gaussian_state(g, width=1 / math.sqrt(2)),
        gaussian_state(g, width=0.4),
        gaussian_state(g, center=1.0, width=1.3, tilt=0.5),
    ):
        assert variance_triple(psi) >= 1 / 8 - 1e-4
