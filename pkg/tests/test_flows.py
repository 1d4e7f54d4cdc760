import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from horolab import automorphic as am
from horolab import flows, periods, sl2
from horolab.automorphic import CuspFormSeries
from horolab.flows import CapabilityError, OrbitSpec, TestFunction
from horolab.sl2 import InvalidInput


@pytest.fixture(scope="module")
def suite():
    return flows.default_suite()


def test_suite_reference(suite):
    assert suite.n >= 10**6 and suite.seed == flows.REFERENCE_SEED
    assert len(suite.functions) == 9
    # the eight boxes cover the domain below y = 4 up to the smoothing
    assert suite.reference_means[:8].sum() == pytest.approx(1 - 3 / (math.pi * 4), abs=0.02)
    assert suite.reference_means[-1] == pytest.approx(1.0)


def test_orbit_spec_validation():
    for bad in (
        dict(kind="continuous", T=0, nodes=10),
        dict(kind="continuous", T=1, nodes=1),
        dict(kind="sparse", gamma=-0.1, N=5),
        dict(kind="sparse", gamma=0, N=0),
        dict(kind="rational", q=0, y=1),
        dict(kind="rational", q=3, y=0),
        dict(kind="spiral"),
    ):
        with pytest.raises(InvalidInput):
            OrbitSpec(**bad)
    assert OrbitSpec.continuous(100).nodes == 800
    assert OrbitSpec.continuous(2).nodes == 64


def test_horocycle_examples():
    pts = flows.horocycle_points(OrbitSpec.continuous(1, nodes=2))
    assert pts == pytest.approx(np.array([1j, 1j]))
    n = 7
    pts = flows.horocycle_points(OrbitSpec.continuous(n, nodes=57, basepoint=sl2.a(1 / n)))
    t = np.linspace(0, n, 57)
    ref = sl2.reduce_array(t / n + 1j / n)
    # compare on the surface: x = -1/2 and x = 1/2 are identified
    assert np.exp(2j * np.pi * pts.real) == pytest.approx(np.exp(2j * np.pi * ref.real))
    assert pts.imag == pytest.approx(ref.imag)
    assert np.all(sl2.in_fundamental_domain(pts))


def test_sparse_examples():
    pts = flows.sparse_horocycle_points(OrbitSpec.sparse(1, 3, basepoint=sl2.a(4.0)))
    # a(4) n(t) i = 4 (t + i)
    assert pts == pytest.approx(sl2.reduce_array(4 * (np.array([1, 4, 9]) + 1j)))
    pts0 = flows.sparse_horocycle_points(OrbitSpec.sparse(0, 5, basepoint=flows.GENERIC_BASEPOINT))
    ref = sl2.reduce_array(flows.GENERIC_BASEPOINT.act(np.arange(1, 6) + 1j))
    assert pts0 == pytest.approx(ref)


def test_rational_examples(suite):
    assert flows.rational_horocycle_points(1, 2.0) == pytest.approx(np.array([2j]))
    pts = flows.rational_horocycle_points(5, 0.2)
    assert pts.size == 5 and np.all(sl2.in_fundamental_domain(pts))
    d97 = flows.discrepancy(flows.rational_horocycle_points(97, 1 / 97), suite)
    d997 = flows.discrepancy(flows.rational_horocycle_points(997, 1 / 997), suite)
    assert d997.max_deviation < d97.max_deviation


def test_weyl_xi_zero_is_orbit_average(suite):
    f = suite.functions[2]
    x0, T, nodes = flows.GENERIC_BASEPOINT, 40.0, 401
    w = flows.weyl_integral(f, x0, T, 0.0, nodes)
    vals = f.func(flows.horocycle_points(OrbitSpec.continuous(T, nodes, x0)))
    trap = (vals.sum() - 0.5 * (vals[0] + vals[-1])) / (nodes - 1)
    assert w == pytest.approx(trap, abs=1e-14)
    assert abs(w - vals.mean()) < 2 / nodes


def test_weyl_orthogonality():
    one = TestFunction("one", lambda z: np.ones(z.shape))
    for T in (1, 3, 10):
        assert abs(flows.weyl_integral(one, flows.GENERIC_BASEPOINT, T, 1.0, 64 * T)) < 1e-13
    with pytest.raises(InvalidInput):
        flows.weyl_integral(one, sl2.IDENTITY, 1.0, 0.0, 7)
    with pytest.raises(InvalidInput):
        flows.weyl_integral(one, sl2.IDENTITY, 0.0, 0.0, 64)


@given(st.floats(-20, 20), st.floats(0.5, 30), st.floats(0, 6.2))
def test_weyl_bounded_by_sup(xi, T, theta):
    f = flows.smooth_box("b", "centre", 1.2, 1.6)
    w = flows.weyl_integral(f, sl2.k(theta), T, xi, 200)
    assert abs(w) <= f.sup + 1e-12


@pytest.mark.parametrize("n", [1, 2, 5, 11])
def test_weyl_recovers_tau(n):
    # cross-module: the closed horocycle at height 1/n picks out the n-th coefficient
    delta = CuspFormSeries.delta()
    w = flows.weyl_integral(delta, sl2.a(1 / n), float(n), -1.0, max(64, 8 * n))
    scaled = math.exp(2 * math.pi) * n**6 * w
    assert abs(scaled - am.tau(n)) < 1e-8 * abs(am.tau(n))
    assert scaled == pytest.approx(periods.fourier_coeff_via_horocycle(delta, n), rel=1e-14)


def test_discrepancy_of_haar_sample(suite):
    z = sl2.sample_invariant_measure(100_000, seed=99).z
    r = flows.discrepancy(z, suite)
    assert np.all(r.deviations >= 0)
    assert np.all(r.deviations < 3 * r.combined_errors())
    assert r.orbit_size == 100_000


def test_discrepancy_single_point(suite):
    p = 0.17 + 1.9j
    r = flows.discrepancy(np.array([p, p, p]), suite)
    exact = np.abs(suite.evaluate(np.array([p]))[:, 0] - suite.reference_means)
    assert np.array_equal(r.deviations, exact)
    with pytest.raises(InvalidInput):
        flows.discrepancy(np.array([]), suite)


def test_long_horocycle_generic(suite):
    x0 = flows.GENERIC_BASEPOINT
    short = flows.discrepancy(flows.horocycle_points(OrbitSpec.continuous(100, basepoint=x0)), suite)
    long = flows.discrepancy(flows.horocycle_points(OrbitSpec.continuous(10_000, basepoint=x0)), suite)
    assert np.all(long.deviations < short.deviations)


def test_sparse_generic(suite):
    x0 = flows.GENERIC_BASEPOINT
    small = flows.discrepancy(flows.sparse_horocycle_points(OrbitSpec.sparse(0.01, 100, x0)), suite)
    big = flows.discrepancy(flows.sparse_horocycle_points(OrbitSpec.sparse(0.01, 10_000, x0)), suite)
    assert big.max_deviation < small.max_deviation


def test_closed_horocycle_is_periodic(suite):
    # the identity horocycle closes up at height 1: its discrepancy does not decay
    a = flows.discrepancy(flows.sparse_horocycle_points(OrbitSpec.sparse(0, 1000)), suite)
    b = flows.discrepancy(flows.sparse_horocycle_points(OrbitSpec.sparse(0, 100_000)), suite)
    assert np.allclose(a.deviations, b.deviations, rtol=1e-9, atol=1e-12)


def test_matrix_coefficient():
    f = flows.bump(2j, 0.2)
    c0 = flows.matrix_coefficient(f, f, 0.0, 50_000, seed=3, normalize=True)
    assert abs(c0.estimate - 1) <= 3 * c0.stderr + 1e-12
    const = TestFunction("c", lambda z: np.full(z.shape, 2.5))
    assert flows.matrix_coefficient(const, f, 1.0, 10_000, seed=3).estimate == pytest.approx(0, abs=1e-15)
    raw0 = flows.matrix_coefficient(f, f, 0.0, 200_000, seed=4)
    raw4 = flows.matrix_coefficient(f, f, 4.0, 200_000, seed=4)
    assert abs(raw4.estimate) + 3 * raw4.stderr < 0.2 * (raw0.estimate - 3 * raw0.stderr)
    with pytest.raises(InvalidInput):
        flows.matrix_coefficient(f, f, 0.0, 100, seed=1)


def test_matrix_coefficient_workers():
    f = flows.bump(2j, 0.3)
    a = flows.matrix_coefficient(f, f, 1.0, 20_000, seed=8)
    b = flows.matrix_coefficient(f, f, 1.0, 20_000, seed=8, workers=2)
    assert a == b


def test_gamma_max():
    assert flows.gamma_max(Fraction(1, 2)) == 0
    assert flows.gamma_max(0) == Fraction(1, 48)
    assert flows.gamma_max(Fraction(3, 26)) == Fraction(25, 1872)
    assert isinstance(flows.gamma_max(Fraction(1, 7)), Fraction)
    grid = [Fraction(k, 200) for k in range(101)]
    vals = [flows.gamma_max(a) for a in grid]
    assert all(u > v for u, v in zip(vals, vals[1:]))
    assert flows.gamma_max(0.5 - 1e-9) < 1e-18
    for bad in (-0.1, Fraction(51, 100)):
        with pytest.raises(InvalidInput):
            flows.gamma_max(bad)


def test_sobolev_constant_and_order_zero():
    one = TestFunction("one", lambda z: np.ones(z.shape))
    for d in range(4):
        assert flows.sobolev_estimate(one, math.inf, d, n=500).value == pytest.approx(1.0, abs=1e-9)
    f = flows.bump(2j, 0.3)
    est = flows.sobolev_estimate(f, 2, 0, n=4000, seed=5)
    z, th = sl2.sample_group_measure(4000, 5)
    ref = math.sqrt(np.mean(f(z) ** 2))
    assert est.value == pytest.approx(ref, rel=1e-12)
    with pytest.raises(CapabilityError):
        flows.sobolev_estimate(f, 2, 4)


def test_sobolev_monotone_and_width():
    f = flows.bump(2j, 0.3)
    vals = [flows.sobolev_estimate(f, 2, d, n=3000, seed=2).value for d in range(3)]
    assert vals[0] <= vals[1] <= vals[2]
    wide = flows.sobolev_estimate(flows.bump(2j, 0.1), math.inf, 1, n=20_000, seed=2).value
    narrow = flows.sobolev_estimate(flows.bump(2j, 0.05), math.inf, 1, n=20_000, seed=2).value
    assert narrow > wide
