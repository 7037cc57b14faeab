"""Smoke tests for the Python bindings: a few golden values per operation.

The C++ test suite carries the exhaustive coverage; these only prove the
bindings wire through correctly.
"""

import pytest

import delayopt as d

FAST = d.ScalarLoopGains(A=-6.0, B=6.0, k=32.0)
FAST_SAMPLES = [(0.001, 26.0), (0.002, 23.0), (0.003, 20.0), (0.004, 18.0), (0.005, 16.0)]


def test_build_profile_golden_values():
    table = d.build_profile(FAST, FAST_SAMPLES)
    taus = table.taus()
    assert len(table) == 5
    assert taus[0] == pytest.approx(0.117932239791, abs=1e-9)
    assert taus[4] == pytest.approx(0.106496992517, abs=1e-9)
    assert table.rows[0].source == "computed"
    assert table.rows[0].ratio == 26.0


def test_detect_and_correct():
    table = d.measured_profile(
        [(0.001, 0.109), (0.002, 0.059), (0.003, 0.019), (0.004, 0.085), (0.005, 0.108)]
    )
    flags = d.detect_irregular(table)
    assert flags == [3]
    fixed = d.correct_piecewise(table, flags)
    assert fixed.rows[3].tau == pytest.approx(0.0635, abs=1e-12)
    assert fixed.rows[3].source == "interpolated"
    assert fixed.rows[3].corrected is True
    assert fixed.rows[2].tau == table.rows[2].tau  # untouched row


def test_override_correction():
    table = d.measured_profile(
        [(0.001, 0.118), (0.002, 0.034), (0.003, 0.078), (0.004, 0.050), (0.005, 0.107)]
    )
    flags = d.detect_irregular(table)
    assert flags == [2]
    fixed = d.correct_piecewise(table, flags, {0.003: 0.026})
    assert fixed.rows[2].tau == 0.026
    assert fixed.rows[2].source == "manual_override"
    assert d.neighbor_interpolation(table, 2, flags) == pytest.approx(0.042, abs=1e-12)


def test_fit_vertex_and_evaluate():
    points = [(0.001, 0.118), (0.002, 0.034), (0.003, 0.026), (0.004, 0.050), (0.005, 0.108)]
    model = d.fit_quadratic(points)
    assert model.b == pytest.approx(-135.82857142857143, abs=1e-6)
    assert model.c == pytest.approx(22571.428571428572, rel=1e-9)
    opt = d.vertex(model)
    assert opt.h_star == pytest.approx(0.0030088607594936662, abs=1e-9)
    assert d.evaluate_model(model, 0.003) == pytest.approx(0.022057142857, abs=1e-9)
    full = d.optimize_sampling(d.measured_profile(points))
    assert full.optimum.h_star == pytest.approx(opt.h_star, abs=1e-15)
    assert len(full.evaluated) == 5


def test_inversion_round_trip_and_error():
    rho = d.ratio_from_delay(FAST, 0.001, 0.01)
    assert d.delay_from_ratio(FAST, 0.001, rho) == pytest.approx(0.01, abs=1e-12)
    assert d.exact_domain_ratio(FAST, 0.001) >= d.max_admissible_ratio(FAST, 0.001)
    with pytest.raises(d.ToolkitError):
        d.delay_from_ratio(FAST, 0.001, 1e9)
    with pytest.raises(d.ToolkitError):
        d.ScalarLoopGains(A=6.0, B=6.0, k=32.0)  # unstable feedback rejected


def test_discretize_and_step():
    disc = d.discretize_scalar(FAST, 0.005, 0.002)
    assert disc.phi == pytest.approx(0.970446, abs=1e-6)
    assert disc.phi + disc.gamma0 + disc.gamma1 == pytest.approx(1.0, abs=1e-12)
    x1 = d.step(disc, 1.0, 1.0, 1.0)
    assert x1 == pytest.approx(1.0, abs=1e-12)  # unit fixed point


def test_simulate_benchmark_dc_gain():
    steps = 2000
    trajectory = d.simulate_benchmark(h=0.01, tau=0.002, inputs=[1.0] * steps, steps=steps)
    assert len(trajectory) == steps + 1
    t_final, y_final, _ = trajectory[-1]
    assert t_final == pytest.approx(20.0)
    assert y_final == pytest.approx(1.0, abs=1e-3)


def test_profile_csv_round_trip(tmp_path):
    table = d.build_profile(FAST, FAST_SAMPLES)
    path = str(tmp_path / "profile.csv")
    d.save_profile_csv(table, path)
    back = d.load_profile_csv(path)
    assert back.taus() == table.taus()
    with pytest.raises(d.ToolkitError):
        d.load_profile_csv(str(tmp_path / "missing.csv"))
