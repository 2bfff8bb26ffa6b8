import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrbath import scans
from corrbath.dynamics import BlochState
from corrbath.errors import CapacityError, ValidationError
from corrbath.measures import binary_entropy
from corrbath.model import ModelSpec

GEOMETRY = ModelSpec(n_spins=2, omega0=1.0, beta=1.0, uniform_separation=1.0)


def test_geometric_grid():
    np.testing.assert_allclose(scans.geometric_temperatures(2.0, 3), [2.0, 1.0, 0.5, 0.25])
    assert len(scans.geometric_temperatures(1.0)) == 13


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_central_differences_exact_for_quadratics(a, b, c):
    x = np.linspace(-1, 2, 9)
    d = scans.central_differences(x, a * x**2 + b * x + c)
    assert math.isnan(d[0]) and math.isnan(d[-1])
    np.testing.assert_allclose(d[1:-1], 2 * a * x[1:-1] + b, atol=1e-9)


def test_coarse_sweep_magnetization():
    res = scans.temperature_sweep(GEOMETRY, [2.0, 1.0, 0.5])
    positive = res.columns["T"] > 0
    np.testing.assert_allclose(res.columns["mz"][positive], np.tanh(1.0 / (2 * np.array([2.0, 1.0, 0.5]))), atol=1e-14)
    np.testing.assert_array_equal(res.columns["mc"][positive], 0.0)
    assert np.all(res.columns["full_mismatch"] <= 1e-9)
    assert res.column_names[-3:] == ["dmz_dT", "dmzz_dT", "dmc_dT"]
    assert len(res.rows()) == 4


def test_zero_temperature_row():
    x0 = BlochState(0.1, 0.05, 0.2)
    res = scans.temperature_sweep(GEOMETRY, [1.0, 0.5], initial=x0)
    zero = res.columns["T"] == 0
    assert res.columns["mc"][zero][0] == pytest.approx((4 * x0.conserved - 1) / 8, abs=1e-15)
    assert res.columns["alpha"][zero][0] == 1.0
    assert math.isinf(res.columns["beta"][zero][0])
    assert res.metadata["conserved_sum"] == pytest.approx(x0.conserved)
    assert math.isnan(res.derivatives["mc"][zero][0])


def test_zero_row_position_follows_grid_direction():
    up = scans.temperature_sweep(GEOMETRY, [0.5, 1.0])
    down = scans.temperature_sweep(GEOMETRY, [1.0, 0.5])
    assert up.columns["T"][0] == 0.0
    assert down.columns["T"][-1] == 0.0
    assert "boundary_slopes" in up.metadata


def test_sweep_without_zero_row():
    res = scans.temperature_sweep(GEOMETRY, [1.0, 0.5, 0.25], include_zero=False)
    assert np.all(res.columns["T"] > 0)
    assert "jumps" not in res.metadata


def test_sweep_input_checks():
    with pytest.raises(ValidationError):
        scans.temperature_sweep(GEOMETRY, [1.0, 0.0])
    with pytest.raises(ValidationError):
        scans.temperature_sweep(GEOMETRY, [1.0, 0.25, 0.5])


def test_sweep_is_deterministic():
    a = scans.temperature_sweep(GEOMETRY, scans.geometric_temperatures(1.0, 6), initial="singlet-pairs")
    b = scans.temperature_sweep(GEOMETRY, scans.geometric_temperatures(1.0, 6), initial="singlet-pairs")
    assert a.rows() == b.rows() or np.array_equal(np.array(a.rows()), np.array(b.rows()), equal_nan=True)


def test_sweep_accepts_density_matrix():
    rho = np.eye(4) / 4
    res = scans.temperature_sweep(GEOMETRY, [1.0], initial=rho)
    assert res.metadata["initial_state"] == "explicit-density-matrix"


def dicke_entropy(n, m0):
    """Entropy of the symmetric-manifold thermal state reached from all-up at full correlation."""
    q = (1 - m0) / (1 + m0)
    w = q ** np.arange(n + 1)
    p = w / w.sum()
    return float(-np.sum(p * np.log(p)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("m0", [0.3, 0.8])
def test_full_correlation_entropy_matches_dicke_ladder(n, m0):
    s, info = scans.steady_state_entropy(n, 1.0, m0)
    assert s == pytest.approx(dicke_entropy(n, m0), abs=1e-9)
    assert info["method"] == "rk4-relaxation"


@pytest.mark.parametrize("n", [1, 3])
def test_auto_and_evolve_agree_below_full_correlation(n):
    a, info_a = scans.steady_state_entropy(n, 0.5, 0.6)
    b, info_b = scans.steady_state_entropy(n, 0.5, 0.6, method="evolve")
    assert info_a["method"] == "gibbs"
    assert a == pytest.approx(b, abs=1e-9)
    assert a == pytest.approx(n * binary_entropy(0.8), abs=1e-12)


def test_negative_magnetization_entropy():
    s, _ = scans.steady_state_entropy(2, 0.5, -0.6)
    assert s == pytest.approx(2 * binary_entropy(0.8), abs=1e-12)


def test_entropy_table():
    spec = ModelSpec(n_spins=2, beta=2 * math.atanh(0.6), alpha_override=0.5)
    res = scans.entropy_vs_n(spec, [1, 2, 3], threads=2)
    assert res.column_names[:3] == ["n", "alpha", "entropy"]
    rows = res.rows()
    assert [(r[0], r[1]) for r in rows] == [(1, 1.0), (1, 0.5), (2, 1.0), (2, 0.5), (3, 1.0), (3, 0.5)]
    assert rows[0][2] == pytest.approx(rows[1][2], abs=1e-10)
    assert rows[5][2] == pytest.approx(3 * binary_entropy(0.8), abs=1e-10)
    assert res.metadata["m0"] == pytest.approx(0.6)
    with pytest.raises(CapacityError):
        scans.entropy_vs_n(spec, [8])


def test_spectrum_cloud():
    rows, reports = scans.spectrum_cloud(ModelSpec(beta=1.0, alpha_override=0.5), [0.3, 1.0], threads=2)
    assert len(rows) == 32
    zero = {a: sum(1 for r in rows if r[0] == a and r[3]) for a in (0.3, 1.0)}
    assert zero[0.3] == 1 and zero[1.0] >= 2
    assert all(r[1] <= reports[0].tol_used for r in rows)


def test_bloch_time_traces():
    x0 = BlochState(0.0, -0.25, -0.5)
    out = scans.bloch_time_traces(np.linspace(0, 1, 5), x0)
    assert [p for p, _ in out] == scans.fig2_parameter_sets()
    for (_, _, alpha), traj in out:
        np.testing.assert_allclose(traj.observables()[0], x0.as_array())
    # the singlet is dark for the alpha = 1 triple
    np.testing.assert_allclose(out[0][1].observables()[-1], x0.as_array(), atol=1e-12)
