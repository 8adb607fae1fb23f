import math

import numpy as np
import pytest

from qclass.ensemble import (
    MAX_HS_RADIUS,
    ClassifyConfig,
    classify,
    estimate_ball_radius,
    estimate_fractions,
    figure_grids,
    moduli_row,
    random_direction,
    sample_hs_state,
    sample_x_state,
    wilson_interval,
)
from qclass.hermitian import eigvalsh, hs_distance
from qclass.kernel import PairModuli, QuatritModuli, build_pair_kernel, build_quatrit_kernel, pair_moduli_grid
from qclass.separability import angle_grid_scan
from qclass.xstate import XParams, werner_params, x_from_params

K0 = build_pair_kernel(PairModuli(0, 0))


def test_hs_state_valid_and_reproducible():
    for seed in range(50):
        rho = sample_hs_state(seed)
        assert abs(np.trace(rho) - 1) <= 1e-12
        assert eigvalsh(rho)[-1] >= -1e-12
    assert np.array_equal(sample_hs_state(42), sample_hs_state(42))


def test_hs_mean_is_maximally_mixed():
    rng = np.random.default_rng(0)
    mean = sum(sample_hs_state(rng) for _ in range(10_000)) / 10_000
    assert np.abs(mean - np.eye(4) / 4).max() < 0.02


def test_x_state_sampler():
    rng = np.random.default_rng(1)
    rs = []
    for _ in range(10_000):
        p = sample_x_state(rng)
        p.validate()
        rs.append(p.r)
    rs = np.array(rs)
    # flat Dirichlet: each block carries 1/2 on average, split 3:1 after sorting
    assert np.abs(rs.reshape(-1, 2, 2).sum(axis=2).mean(axis=0) / 2 - 0.25).max() < 0.01
    assert np.abs(rs.mean(axis=0) - [0.375, 0.125, 0.375, 0.125]).max() < 0.01
    assert sample_x_state(5) == sample_x_state(5)


def test_classify_examples(bell):
    c = classify(np.eye(4) / 4, K0)
    assert c.separable and c.absolutely_separable and c.polytope_positive and c.doubly_classical
    c = classify(bell, K0)
    assert not c.separable and not c.polytope_positive and not c.doubly_classical
    c = classify(werner_params(0.2), K0)
    assert c.separable and not c.polytope_positive and not c.doubly_classical
    assert c.wigner_lower == pytest.approx(-0.0732050807568877, abs=1e-12)
    assert c.ppt_margin == pytest.approx(0.1, abs=1e-14)


def test_classify_orbit_check():
    cfg = ClassifyConfig(orbit_check=True, orbit_restarts=4)
    c = classify(np.eye(4) / 4, K0, cfg)
    assert c.lu_orbit_positive and c.lu_orbit_min == pytest.approx(0.25)
    cfg = ClassifyConfig(c_plus="lu_orbit", orbit_restarts=4)
    c = classify(np.diag([1.0, 0, 0, 0]), K0, cfg)
    assert c.lu_orbit_positive is False and not c.doubly_classical
    with pytest.raises(ValueError):
        classify(np.eye(4) / 4, build_quatrit_kernel(QuatritModuli(1, 1)), cfg)


def test_polytope_positive_implies_lu_positive():
    rng = np.random.default_rng(2)
    cfg = ClassifyConfig(orbit_check=True, orbit_restarts=4)
    for _ in range(15):
        t = rng.uniform(0, 0.2)
        rho = np.eye(4) / 4 + t * random_direction(rng)
        if eigvalsh(rho)[-1] < 0:
            continue
        c = classify(rho, K0, cfg)
        if c.polytope_positive:
            assert c.lu_orbit_positive


def test_inclusions_on_samples():
    rng = np.random.default_rng(3)
    for i in range(400):
        state = sample_hs_state(rng) if i % 2 else sample_x_state(rng)
        c = classify(state, K0)
        if c.doubly_classical:
            assert c.separable and c.polytope_positive
        if isinstance(state, XParams) and c.absolutely_separable:
            assert c.separable
            # every angle choice with the same block spectrum stays separable
            assert angle_grid_scan(state.r, n=20).size == 0


def test_ball_nesting():
    rng = np.random.default_rng(4)
    kernels = [build_pair_kernel(PairModuli(a, b)) for a, b in pair_moduli_grid(6)]
    for _ in range(100):
        rho = np.eye(4) / 4 + rng.uniform(0, 0.12) * random_direction(rng)
        assert hs_distance(rho, np.eye(4) / 4) <= 0.12 + 1e-12
        assert all(classify(rho, k).doubly_classical for k in kernels)


def test_wilson_interval():
    lo, hi, half = wilson_interval(0, 1)
    assert lo == 0.0 and 0 < hi <= 1
    lo, hi, half = wilson_interval(50, 100)
    assert lo == pytest.approx(0.5 - half) and hi == pytest.approx(0.5 + half)
    assert half == pytest.approx(0.09617, abs=1e-4)


def test_single_sample_fractions():
    rep = estimate_fractions(1, "hs", K0, seed=3)
    assert all(f in (0.0, 1.0) for f in rep.fractions.values())
    for k, (lo, hi) in rep.intervals.items():
        assert 0.0 <= lo <= rep.fractions[k] <= hi <= 1.0


def test_hs_separable_fraction():
    rep = estimate_fractions(10_000, "hs", K0, seed=2024, workers=4)
    assert abs(rep.fractions["separable"] - 0.24) <= 0.01
    f = rep.fractions
    assert f["doubly_classical"] <= f["separable"] and f["doubly_classical"] <= f["polytope_positive"]


def test_x_ensemble_inclusions():
    rep = estimate_fractions(2000, "xstate", K0, seed=1)
    f = rep.fractions
    assert f["doubly_classical"] <= min(f["separable"], f["polytope_positive"])
    assert f["absolutely_separable"] <= f["separable"]


def test_wilson_width_halves_with_double_n():
    ratios = []
    for seed in range(3):
        a = estimate_fractions(500, "xstate", K0, seed=seed)
        b = estimate_fractions(1000, "xstate", K0, seed=seed)
        ratios.append(b.wilson_halfwidth / a.wilson_halfwidth)
    assert all(0.6 <= r <= 0.85 for r in ratios)


def test_report_independent_of_workers():
    a = estimate_fractions(600, "xstate", K0, seed=7, workers=1)
    b = estimate_fractions(600, "xstate", K0, seed=7, workers=3)
    assert a == b


def test_bad_ensemble_arguments():
    with pytest.raises(ValueError):
        estimate_fractions(0, "hs", K0, 1)
    with pytest.raises(ValueError):
        estimate_fractions(5, "bures", K0, 1)


def test_radius_small_run():
    sep = estimate_ball_radius("separability", n_directions=30, seed=1)
    ac = estimate_ball_radius("absolute_classicality", n_directions=30, kernel_scan_resolution=32, seed=1)
    assert 0 <= ac.radius_hs < sep.radius_hs <= MAX_HS_RADIUS
    assert sep.radius_hs >= 1 / (2 * math.sqrt(3)) - 1e-5
    assert ac.radius_hs >= 1 / (2 * math.sqrt(15)) - 1e-5
    conv = sep.quoted_convention
    assert conv["quoted_value"] == pytest.approx(1 / 3)
    assert conv["hs_closed_form"] == pytest.approx(1 / (2 * math.sqrt(3)))
    assert estimate_ball_radius("absolute_classicality", 10, kernel_family="pair", kernel_scan_resolution=16).radius_hs > 0
    with pytest.raises(ValueError):
        estimate_ball_radius("entanglement")


def test_figure_examples():
    header, rows = figure_grids("fig1_right", 8)
    assert header[-1] == "absolutely_separable"
    quarter = [r for r in rows if np.allclose(r[:4], 0.25)]
    assert quarter and quarter[0][4] is True
    assert moduli_row(2.0, 0.0)[2] == pytest.approx(-1.0)
    assert moduli_row(2.0, 0.0)[3] is False
    assert moduli_row(1.0, 1.0)[3:] == [True, True]
    header, rows = figure_grids("fig2_right", 2)
    assert header == ["r1", "r2", "r3", "r4"] and rows
    header, rows = figure_grids("moduli_scan", 16)
    assert header == ["d14", "d23", "pi1", "pi2", "disc", "in_P4"]
    assert all(r[5] for r in rows)
    with pytest.raises(ValueError):
        figure_grids("fig3", 8)
    with pytest.raises(ValueError):
        figure_grids("fig1_right", 1)
