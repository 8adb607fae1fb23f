import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import werner_matrix
from qclass.separability import (
    absolute_separability_margin,
    absolutely_separable,
    absolutely_separable_sorted,
    angle_grid_scan,
    inequality_slacks,
    ppt_separable,
    worst_angles,
    x_separable_inequalities,
)
from qclass.xstate import XParams, werner_params, x_from_params
from test_xstate import xparams


def test_ppt_examples(bell):
    v = ppt_separable(bell)
    assert not v.separable and v.margin == pytest.approx(-0.5)
    assert ppt_separable(np.eye(4) / 4).margin == pytest.approx(0.25)
    for p in (0.5, 0.3):
        v = ppt_separable(werner_matrix(p))
        assert v.margin == pytest.approx((1 - 3 * p) / 4, abs=1e-14)
    assert not ppt_separable(werner_matrix(0.5)).separable
    assert ppt_separable(werner_matrix(0.3)).separable


def test_inequalities_werner_half():
    p = werner_params(0.5)
    outer, inner = inequality_slacks(p)
    # inner: 0.25 <= 0.0625 fails
    assert inner == pytest.approx(0.0625 - 0.25)
    assert not x_separable_inequalities(p).separable


def test_inequalities_pure_product():
    p = XParams((1, 0, 0, 0), 0.0, 0.0, 0.0, 0.0)
    assert inequality_slacks(p) == pytest.approx((0.0, 0.0))
    assert x_separable_inequalities(p).separable


def test_inequalities_werner_boundary():
    p = werner_params(1 / 3)
    assert min(inequality_slacks(p)) == pytest.approx(0.0, abs=1e-15)
    assert x_separable_inequalities(p).separable


def test_slacks_match_block_determinants():
    rng = np.random.default_rng(1)
    for _ in range(500):
        e = rng.exponential(size=4)
        r = e / e.sum()
        p = XParams(
            (*sorted(r[:2], reverse=True), *sorted(r[2:], reverse=True)),
            *rng.uniform(0, math.pi, 2),
            *rng.uniform(0, 2 * math.pi, 2),
        )
        s = x_from_params(p)
        outer, inner = inequality_slacks(p)
        assert outer == pytest.approx(4 * (s.rho11 * s.rho44 - abs(s.rho23) ** 2), abs=1e-12)
        assert inner == pytest.approx(4 * (s.rho22 * s.rho33 - abs(s.rho14) ** 2), abs=1e-12)


@given(xparams())
def test_criterion_equivalence(p):
    assert x_separable_inequalities(p).separable == ppt_separable(x_from_params(p).matrix()).separable


@given(xparams(), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_phase_invariance(p, a, b):
    q = XParams(p.r, p.phi1, p.phi2, a % (2 * math.pi), b % (2 * math.pi))
    assert x_separable_inequalities(p) == x_separable_inequalities(q)
    assert ppt_separable(x_from_params(p).matrix()).separable == ppt_separable(x_from_params(q).matrix()).separable


def test_absolute_examples():
    assert absolutely_separable(0.3, 0.3, 0.2, 0.2)
    assert not absolutely_separable(0.7, 0.1, 0.1, 0.1)
    assert absolutely_separable(0.5, 1 / 6, 1 / 6, 1 / 6)
    assert worst_angles(0.7, 0.1, 0.1, 0.1) == (math.pi / 2, 0.0)
    bad = XParams((0.7, 0.1, 0.1, 0.1), math.pi / 2, 0.0, 0.0, 0.0)
    assert not x_separable_inequalities(bad).separable


def test_block_pairing_differs_from_sorted():
    # sorted view: (0.45, 0.45, 0.05, 0.05) passes; paired (0.45, 0.05 | 0.45, 0.05) fails
    assert absolutely_separable_sorted([0.45, 0.05, 0.45, 0.05])
    assert not absolutely_separable(0.45, 0.05, 0.45, 0.05)
    assert angle_grid_scan((0.45, 0.05, 0.45, 0.05)).size > 0


def _paired(rng):
    e = rng.exponential(size=4)
    r = e / e.sum()
    return (*sorted(r[:2], reverse=True), *sorted(r[2:], reverse=True))


def test_angle_scan_soundness():
    rng = np.random.default_rng(9)
    for _ in range(300):
        r = _paired(rng)
        hits = angle_grid_scan(r, n=50)
        assert (hits.size == 0) == absolutely_separable(*r)


def test_margin_sign_matches_flag():
    rng = np.random.default_rng(12)
    for _ in range(300):
        r = _paired(rng)
        assert (absolute_separability_margin(*r) >= -1e-12) == absolutely_separable(*r)


def test_absolute_set_is_convex():
    rng = np.random.default_rng(21)
    members = []
    while len(members) < 200:
        r = rng.dirichlet(np.ones(4))
        r = -np.sort(-r)
        if absolutely_separable_sorted(r):
            members.append(r)
    for _ in range(2000):
        i, j = rng.integers(0, len(members), 2)
        assert absolutely_separable_sorted(0.5 * (members[i] + members[j]))
