"""Mesh, Gauss-Legendre quadrature and the Legendre test basis."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg

from dhnn.basis import TestBasis, eval_basis, gram_matrix, legendre_table, project
from dhnn.errors import InvalidArgumentError, NumericalFailure
from dhnn.mesh import Mesh, build_uniform_mesh, map_to_reference
from dhnn.quadrature import gauss_legendre, integrate

# ---- mesh -------------------------------------------------------------------


def test_uniform_mesh_nodes_and_sizes():
    mesh = build_uniform_mesh((0.0, 1.0), 4)
    np.testing.assert_allclose(mesh.nodes, [0, 0.25, 0.5, 0.75, 1.0], atol=0)
    np.testing.assert_allclose(mesh.h, 0.25)
    assert mesh.n_elements == 4
    np.testing.assert_allclose(mesh.interior, [0.25, 0.5, 0.75])
    np.testing.assert_allclose(mesh.midpoints(), [0.125, 0.375, 0.625, 0.875])


@pytest.mark.parametrize("nodes", [[0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.5], [0.0, np.nan]])
def test_mesh_rejects_bad_nodes(nodes):
    with pytest.raises(InvalidArgumentError):
        Mesh(np.array(nodes))


@pytest.mark.parametrize("args", [((0, 1), 0), ((1, 0), 3), ((0, 1), 2.5)])
def test_uniform_mesh_rejects_bad_args(args):
    with pytest.raises(InvalidArgumentError):
        build_uniform_mesh(*args)


def test_element_index_out_of_range():
    mesh = build_uniform_mesh((0, 1), 3)
    with pytest.raises(InvalidArgumentError):
        mesh.element(3)


def test_locate_sends_interior_nodes_left():
    mesh = build_uniform_mesh((0, 1), 4)
    idx = mesh.locate([0.0, 0.1, 0.25, 0.2500001, 0.5, 0.75, 1.0])
    assert idx.tolist() == [0, 0, 0, 1, 1, 2, 3]


@given(st.integers(1, 30), st.floats(-1, 1), st.data())
def test_reference_map_round_trip(N, t, data):
    mesh = build_uniform_mesh((0.0, 1.0), N)
    k = data.draw(st.integers(0, N - 1))
    x = mesh.from_reference(k, t)
    assert mesh.element(k)[0] - 1e-15 <= x <= mesh.element(k)[1] + 1e-15
    assert abs(map_to_reference(mesh, k, x) - t) <= 1e-14


def test_reference_map_endpoints():
    mesh = build_uniform_mesh((0.0, 1.0), 5)
    assert mesh.to_reference(2, 0.4) == pytest.approx(-1.0, abs=1e-14)
    assert mesh.to_reference(2, 0.6) == pytest.approx(1.0, abs=1e-14)


# ---- quadrature ---------------------------------------------------------------


@pytest.mark.parametrize("order", [1, 2, 5, 10, 30, 45])
def test_gauss_nodes_match_numpy_oracle(order):
    rule = gauss_legendre(order)
    x_ref, w_ref = npleg.leggauss(order)
    np.testing.assert_allclose(rule.nodes, x_ref, atol=1e-15)
    # leggauss weights themselves carry ~1e-12 relative error at order 30+
    np.testing.assert_allclose(rule.weights, w_ref, rtol=2e-12)


@pytest.mark.parametrize("order", [7, 30])
def test_gauss_rule_against_high_precision(order):
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    rule = gauss_legendre(order)
    for x, w in zip(rule.nodes, rule.weights):
        xm = mpmath.findroot(lambda t: mpmath.legendre(order, t), mpmath.mpf(float(x)))
        dp = order * (xm * mpmath.legendre(order, xm) - mpmath.legendre(order - 1, xm)) / (xm**2 - 1)
        wm = 2 / ((1 - xm**2) * dp**2)
        assert abs(x - float(xm)) <= 2e-16
        assert abs(w - float(wm)) <= 1e-14 * float(wm)


def test_gauss_rule_symmetry_and_weight_sum(rule30):
    np.testing.assert_array_equal(rule30.nodes, -rule30.nodes[::-1])
    np.testing.assert_array_equal(rule30.weights, rule30.weights[::-1])
    assert np.sum(rule30.weights) == pytest.approx(2.0, abs=1e-14)
    assert np.all(np.diff(rule30.nodes) > 0)


def test_degree_59_exactness(rule30):
    # integral of t^d over [-1, 1]: 2/(d+1) for even d, 0 for odd
    for d in range(60):
        approx = float(np.sum(rule30.weights * rule30.nodes**d))
        exact = 2.0 / (d + 1) if d % 2 == 0 else 0.0
        assert abs(approx - exact) <= 1e-13 * max(abs(exact), 2.0 / 60), d


@given(st.lists(st.floats(-10, 10), min_size=60, max_size=60))
def test_random_degree_59_polynomial_exact(coefs):
    rule = gauss_legendre(30)
    c = np.array(coefs)
    antideriv = np.polynomial.polynomial.polyint(c)
    exact = np.polynomial.polynomial.polyval(1.0, antideriv) - np.polynomial.polynomial.polyval(
        -1.0, antideriv)
    approx = float(np.sum(rule.weights * np.polynomial.polynomial.polyval(rule.nodes, c)))
    scale = np.sum(np.abs(c) * 2.0 / (np.arange(60) + 1))
    assert abs(approx - exact) <= 1e-13 * max(scale, 1e-300)


def test_degree_60_not_exact(rule30):
    # P_30^2 vanishes at every node, but its integral is 2/61
    p30 = legendre_table(30, rule30.nodes)[30]
    assert np.max(np.abs(p30)) < 1e-13
    assert abs(float(np.sum(rule30.weights * p30**2)) - 2.0 / 61) > 0.03


def test_integrate_on_element():
    mesh = build_uniform_mesh((0.0, 1.0), 4)
    rule = gauss_legendre(30)
    # integral of x^2 over [0.5, 0.75]
    assert integrate(rule, mesh, 2, lambda x: x**2).real == pytest.approx(
        (0.75**3 - 0.5**3) / 3, rel=1e-14)
    assert integrate(rule, mesh, 0, lambda x: 3.0) == pytest.approx(0.75, rel=1e-14)


@given(st.lists(st.floats(-5, 5), min_size=8, max_size=8),
       st.lists(st.floats(-5, 5), min_size=8, max_size=8),
       st.floats(-3, 3), st.floats(-3, 3))
def test_integrate_linearity(p, q, a, b):
    mesh = build_uniform_mesh((0.0, 1.0), 3)
    rule = gauss_legendre(30)
    f = lambda x: np.polynomial.polynomial.polyval(x, p)
    g = lambda x: np.polynomial.polynomial.polyval(x, q)
    lhs = integrate(rule, mesh, 1, lambda x: a * f(x) + b * g(x))
    rhs = a * integrate(rule, mesh, 1, f) + b * integrate(rule, mesh, 1, g)
    assert abs(lhs - rhs) <= 1e-13 * (1 + abs(lhs))


def test_integrate_rejects_nonfinite(rule30):
    mesh = build_uniform_mesh((0.0, 1.0), 2)
    with pytest.raises(NumericalFailure):
        integrate(rule30, mesh, 0, lambda x: np.where(x > 0.25, np.inf, x))


@pytest.mark.parametrize("order", [0, -2, 2.5])
def test_bad_quadrature_order(order):
    with pytest.raises(InvalidArgumentError):
        gauss_legendre(order)


# ---- test basis ---------------------------------------------------------------


def test_legendre_table_matches_numpy():
    t = np.linspace(-1, 1, 17)
    table = legendre_table(12, t)
    for j in range(13):
        e = np.zeros(j + 1)
        e[j] = 1.0
        np.testing.assert_allclose(table[j], npleg.legval(t, e), atol=1e-13)


@pytest.mark.parametrize("N", [1, 4, 30])
@pytest.mark.parametrize("M", [1, 5, 10, 15])
def test_gram_deviation(N, M, rule30):
    mesh = build_uniform_mesh((0.0, 1.0), N)
    basis = TestBasis(mesh, M)
    for k in range(N):
        G = gram_matrix(basis, rule30, k)
        assert np.max(np.abs(G - np.eye(M))) <= 1e-12


def test_projection_of_x_on_unit_element(rule30):
    mesh = build_uniform_mesh((0.0, 1.0), 1)
    coef = project(TestBasis(mesh, 2), rule30, 0, lambda x: x)
    np.testing.assert_allclose(coef.real, [0.5, 1 / (2 * np.sqrt(3))], atol=1e-13)


def test_basis_values_and_scaling():
    mesh = build_uniform_mesh((0.0, 1.0), 4)
    basis = TestBasis(mesh, 3)
    # phi_0 is the constant 1/sqrt(h); phi_1 at the right end is sqrt(3/h)
    assert eval_basis(basis, 1, 0, 0.3) == pytest.approx(2.0)
    assert eval_basis(basis, 1, 1, 0.5) == pytest.approx(np.sqrt(12.0))
    assert basis.values(2, np.array([0.6, 0.7])).shape == (3, 2)


def test_basis_validation():
    mesh = build_uniform_mesh((0.0, 1.0), 3)
    with pytest.raises(InvalidArgumentError):
        TestBasis(mesh, 0)
    with pytest.raises(InvalidArgumentError):
        TestBasis(mesh, (3, 3))
    basis = TestBasis(mesh, (2, 3, 4))
    assert basis.max_M == 4
    with pytest.raises(InvalidArgumentError):
        eval_basis(basis, 0, 2, 0.1)


# ---- worked examples (element and basis indices are 0-based) ------------------


def test_mesh_examples():
    one = build_uniform_mesh((0.0, 1.0), 1)
    np.testing.assert_array_equal(one.nodes, [0.0, 1.0])
    assert one.interior.size == 0
    forty = build_uniform_mesh((0.0, 1.0), 40)
    assert forty.nodes.size == 41
    np.testing.assert_allclose(forty.h, 0.025, rtol=1e-13)


def test_reference_map_examples():
    mesh = build_uniform_mesh((0.0, 1.0), 4)
    assert map_to_reference(mesh, 0, 0.125) == pytest.approx(0.0, abs=1e-15)
    assert map_to_reference(mesh, 1, 0.25) == pytest.approx(-1.0, abs=1e-15)
    assert map_to_reference(mesh, 3, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_low_order_rules():
    r1 = gauss_legendre(1)
    np.testing.assert_allclose(r1.nodes, [0.0], atol=1e-16)
    np.testing.assert_allclose(r1.weights, [2.0])
    r2 = gauss_legendre(2)
    np.testing.assert_allclose(r2.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)], rtol=1e-15)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], rtol=1e-15)


def test_degree_58_example(rule30):
    assert abs(np.sum(rule30.weights * rule30.nodes**58) - 2.0 / 59) <= 1e-13


def test_integrate_examples(rule30):
    one = build_uniform_mesh((0.0, 1.0), 1)
    assert integrate(rule30, one, 0, lambda x: np.ones_like(x)) == pytest.approx(1.0, abs=1e-15)
    assert abs(integrate(rule30, one, 0, lambda x: x**2) - 1 / 3) <= 1e-15
    four = build_uniform_mesh((0.0, 1.0), 4)
    assert abs(integrate(rule30, four, 0, lambda x: x) - 1 / 32) <= 1e-15


def test_basis_examples(rule30):
    four = build_uniform_mesh((0.0, 1.0), 4)
    b4 = TestBasis(four, 3)
    assert eval_basis(b4, 2, 0, 0.6) == pytest.approx(1 / np.sqrt(0.25))
    assert eval_basis(b4, 0, 1, 0.125) == pytest.approx(0.0, abs=1e-14)
    one = build_uniform_mesh((0.0, 1.0), 1)
    assert eval_basis(TestBasis(one, 2), 0, 1, 1.0) == pytest.approx(np.sqrt(3))
    b = TestBasis(four, 5)
    coef = project(b, rule30, 1, lambda x: b.values(1, x)[2])
    np.testing.assert_allclose(coef, np.eye(5)[2], atol=1e-12)
    np.testing.assert_array_equal(project(b, rule30, 1, lambda x: np.zeros_like(x)), np.zeros(5))


def test_gram_examples(rule30):
    mesh = build_uniform_mesh((0.0, 1.0), 4)
    assert abs(gram_matrix(TestBasis(mesh, 1), rule30, 0)[0, 0] - 1.0) <= 1e-14
    G = gram_matrix(TestBasis(mesh, 10), gauss_legendre(3), 0)
    off = G - np.diag(G.diagonal())
    assert np.max(np.abs(off)) > 1e-3
