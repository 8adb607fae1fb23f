import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from qclass.ensemble import CAPTION_KERNEL, sample_hs_state
from qclass.hermitian import ascending, descending, eigvalsh
from qclass.kernel import PairModuli, QuatritModuli, build_pair_kernel, build_quatrit_kernel, pair_moduli_grid
from qclass.wigner import (
    ORDERED_SIMPLEX,
    PhasePointFull,
    PhasePointLU,
    hull_contains,
    polytope_contains,
    polytope_vertices,
    su2,
    su2_angles,
    wf_bounds,
    wigner_value,
)

PI0 = descending([1, 1, (math.sqrt(3) - 1) / 2, -(1 + math.sqrt(3)) / 2])
K0 = build_pair_kernel(PairModuli(0, 0))


def _random_point(rng, full):
    x = rng.random(15 if full else 6)
    return PhasePointFull.from_unit_cube(x) if full else PhasePointLU.from_unit_cube(x)


def test_maximally_mixed_is_quarter_everywhere():
    rng = np.random.default_rng(0)
    kernels = [build_pair_kernel(PairModuli(a, b)) for a, b in pair_moduli_grid(6)]
    kernels.append(build_quatrit_kernel(QuatritModuli(1, 1)))
    for k in kernels:
        for _ in range(20):
            full = k.kind != "pair" or rng.random() < 0.5
            assert abs(wigner_value(np.eye(4) / 4, k, _random_point(rng, full)) - 0.25) <= 1e-12


def test_bell_at_identity(bell):
    assert wigner_value(bell, K0, PhasePointLU()) == pytest.approx(1.0)
    assert wigner_value(bell, K0, PhasePointFull()) == pytest.approx(np.trace(bell @ K0.matrix).real)


def test_lu_point_rejected_for_quatrit():
    with pytest.raises(ValueError):
        wigner_value(np.eye(4) / 4, build_quatrit_kernel(QuatritModuli(1, 1)), PhasePointLU())


def test_values_within_bounds():
    rng = np.random.default_rng(1)
    for trial in range(5):
        rho = sample_hs_state(rng)
        d14, d23 = pair_moduli_grid(8)[rng.integers(0, len(pair_moduli_grid(8)))]
        k = build_pair_kernel(PairModuli(d14, d23))
        b = wf_bounds(eigvalsh(rho), k.spectrum)
        for _ in range(1000 if trial == 0 else 200):
            w = wigner_value(rho, k, _random_point(rng, rng.random() < 0.5))
            assert b.lower - 1e-9 <= w <= b.upper + 1e-9


def test_bounds_examples():
    assert wf_bounds([0.25] * 4, PI0).lower == pytest.approx(0.25)
    assert wf_bounds([0.25] * 4, PI0).upper == pytest.approx(0.25)
    b = wf_bounds([1, 0, 0, 0], PI0)
    assert (b.lower, b.upper) == pytest.approx((-1.3660254037844386, 1.0))
    b = wf_bounds([0.5, 0.5, 0, 0], PI0)
    assert (b.lower, b.upper) == pytest.approx((-0.5, 1.0))


def test_polytope_contains_examples():
    assert polytope_contains([0.25] * 4, PI0)
    assert not polytope_contains([1, 0, 0, 0], PI0)
    assert polytope_contains([1 / 3, 1 / 3, 1 / 3, 0], PI0)


def test_vertices_zero_kernel():
    poly = polytope_vertices(PI0)
    v = poly.vertices
    assert any(np.allclose(x, [0.25] * 4) for x in v)
    assert any(np.allclose(x, [1 / 3, 1 / 3, 1 / 3, 0]) for x in v)
    assert not any(np.allclose(x, [1, 0, 0, 0]) for x in v)
    t = 1.3660254037844386 / (1.3660254037844386 + 0.25)
    # exact crossing; the hand-rounded value 0.84524 agrees to 1e-4
    assert t == pytest.approx(0.8452994616207484, abs=1e-12)
    assert t == pytest.approx(0.84524, abs=1e-4)
    cross = (1 - t) * ORDERED_SIMPLEX[0] + t * ORDERED_SIMPLEX[3]
    assert any(np.allclose(x, cross) for x in v)


def test_caption_kernel_polytope():
    pi = np.array(CAPTION_KERNEL)
    assert abs((pi**2).sum() - 4) < 0.1
    assert len(polytope_vertices(pi).vertices) > 0


def _vertex_checks(pi):
    pa = ascending(pi)
    for v in polytope_vertices(pi).vertices:
        assert abs(v.sum() - 1) <= 1e-10
        assert np.all(np.diff(v) <= 1e-10) and v[-1] >= -1e-10
        assert v @ pa >= -1e-10


@given(st.floats(0, 1), st.floats(0, 1))
def test_vertex_constraints_pair_family(a, b):
    m = PairModuli(a * 3 / (2 * math.sqrt(2)), 0.0)
    m = PairModuli(m.d14, b * m.d23_limit())
    _vertex_checks(descending(build_pair_kernel(m).spectrum))


def test_whole_simplex_never_kept():
    # a nonnegative spectrum cannot have sum of squares 4, so (1,0,0,0) is always clipped
    for d14, d23 in pair_moduli_grid(20):
        pi = build_pair_kernel(PairModuli(d14, d23)).spectrum
        assert ascending(pi)[0] < 0
        assert not any(np.allclose(v, ORDERED_SIMPLEX[0]) for v in polytope_vertices(pi).vertices)


def test_hull_agrees_with_contains():
    rng = np.random.default_rng(2)
    for pi in (PI0, np.array(CAPTION_KERNEL), build_pair_kernel(PairModuli(0.7, 0.3)).spectrum):
        poly = polytope_vertices(pi)
        pts = rng.dirichlet(np.ones(4), size=1000)
        pts = -np.sort(-pts, axis=1)
        inside = poly.contains_hull(pts)
        direct = np.array([polytope_contains(p, pi) for p in pts])
        assert np.array_equal(inside, direct)


def test_hull_flat_vertex_set_uses_lp():
    v = np.array([[1, 0, 0, 0], [0.5, 0.5, 0, 0], [1 / 3, 1 / 3, 1 / 3, 0.0]])
    assert hull_contains(v, [[0.6, 0.3, 0.1, 0.0]]).tolist() == [True]
    assert hull_contains(v, [[0.25] * 4]).tolist() == [False]


def test_su2_angle_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b, g = rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        u = su2(a, b, g)
        v = su2(*su2_angles(u))
        assert min(np.abs(u - v).max(), np.abs(u + v).max()) < 1e-12


def test_full_chart_round_trip():
    rng = np.random.default_rng(4)
    for _ in range(200):
        u = unitary_group.rvs(4, random_state=rng)
        w = PhasePointFull.from_unitary(u).unitary()
        phase = np.vdot(w.ravel(), u.ravel())
        assert np.abs(u - w * phase / abs(phase)).max() < 1e-10
        assert abs(np.linalg.det(w) - 1) < 1e-10


def test_point_ranges():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = PhasePointFull.from_unit_cube(rng.random(15)).params
        assert all(0 <= t <= math.pi / 2 for t in p[0:12:2])
        assert all(0 <= t < 2 * math.pi for t in p[1:12:2] + p[12:])


def test_lu_haar_average_is_quarter():
    rng = np.random.default_rng(6)
    rho = sample_hs_state(7)
    pts = rng.random((100_000, 6))
    # Haar average of U Delta U^H over local unitaries is tr(Delta) I/4
    acc = sum(wigner_value(rho, K0, PhasePointLU.from_unit_cube(x)) for x in pts)
    assert abs(acc / len(pts) - 0.25) < 0.05
