"""Activations, element networks, parameter Jacobians and CSV storage."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dhnn.errors import InvalidArgumentError
from dhnn.mesh import build_uniform_mesh
from dhnn.network import (
    ACTIVATIONS,
    Activation,
    NetworkParams,
    activation_derivatives,
    load_params_csv,
    network_eval,
    param_jacobian,
    param_norm,
    save_params_csv,
)


def _random_params(rng, N=3, n=5, act="sigmoid", scale=4.0):
    return NetworkParams(rng.uniform(-scale, scale, (N, n)), rng.uniform(-1, 1, (N, n)),
                         rng.normal(size=(N, n)) + 1j * rng.normal(size=(N, n)), act)


def test_activation_examples():
    sig, tanh, sin = Activation("sigmoid"), Activation("tanh"), Activation("sin")
    assert sig(0.0) == pytest.approx(0.5)
    assert sig(0.0, 1) == pytest.approx(0.25)
    assert sig(0.0, 2) == pytest.approx(0.0, abs=1e-16)
    assert sig(0.0, 3) == pytest.approx(-0.125)
    assert tanh(0.0, 1) == pytest.approx(1.0)
    assert tanh(0.0, 2) == 0.0
    assert tanh(0.0, 3) == pytest.approx(-2.0)
    assert sin(np.pi / 2, 3) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("kind", ACTIVATIONS)
def test_activation_derivatives_match_finite_differences(kind):
    z = np.linspace(-6, 6, 41)
    h = 1e-5
    for order in range(3):
        hi = activation_derivatives(kind, z + h, order)[order]
        lo = activation_derivatives(kind, z - h, order)[order]
        fd = (hi - lo) / (2 * h)
        exact = activation_derivatives(kind, z, order + 1)[order + 1]
        np.testing.assert_allclose(exact, fd, atol=1e-8)


def test_sigmoid_stable_in_tails():
    vals = activation_derivatives("sigmoid", np.array([-800.0, 800.0]), 3)
    for v in vals:
        assert np.all(np.isfinite(v))
    assert vals[0][0] == 0.0 and vals[0][1] == 1.0
    t = activation_derivatives("tanh", np.array([-400.0, 400.0]), 3)
    assert all(np.all(np.isfinite(v)) for v in t)


def test_activation_validation():
    with pytest.raises(InvalidArgumentError):
        Activation("relu")
    with pytest.raises(InvalidArgumentError):
        Activation("tanh")(0.0, 4)


def test_params_shape_validation():
    with pytest.raises(InvalidArgumentError):
        NetworkParams(np.zeros((2, 3)), np.zeros((2, 4)), np.zeros((2, 3)), "sigmoid")
    with pytest.raises(InvalidArgumentError):
        NetworkParams(np.zeros(3), np.zeros(3), np.zeros(3), "sigmoid")


def test_vector_round_trips(rng):
    p = _random_params(rng)
    q = p.with_full(p.full_vector())
    np.testing.assert_array_equal(q.W, p.W)
    np.testing.assert_array_equal(q.c, p.c)
    r = p.with_nonlinear(p.nonlinear_vector())
    np.testing.assert_array_equal(r.b, p.b)
    # layout: W before b per neuron, element-major
    assert p.nonlinear_vector()[1] == p.b[0, 0]
    assert p.full_vector()[4 * 5 + 2] == p.c[1, 0].real


def test_network_eval_single_neuron():
    mesh = build_uniform_mesh((0.0, 1.0), 2)
    p = NetworkParams([[2.0], [1.0]], [[-1.0], [0.0]], [[3.0 + 1j], [1.0]], "tanh")
    x = 0.25
    assert network_eval(p, mesh, 0, x) == pytest.approx((3 + 1j) * np.tanh(-0.5))
    d1 = (3 + 1j) * 2.0 / np.cosh(-0.5) ** 2
    assert network_eval(p, mesh, 0, x, 1) == pytest.approx(d1)
    d2 = (3 + 1j) * 4.0 * (-2 * np.tanh(-0.5) / np.cosh(-0.5) ** 2)
    assert network_eval(p, mesh, 0, x, 2) == pytest.approx(d2)
    with pytest.raises(InvalidArgumentError):
        network_eval(p, mesh, 0, x, 3)
    with pytest.raises(InvalidArgumentError):
        network_eval(p, mesh, 2, x)


@pytest.mark.parametrize("kind", ACTIVATIONS)
def test_spatial_derivatives_match_fd(kind, rng):
    mesh = build_uniform_mesh((0.0, 1.0), 3)
    p = _random_params(rng, act=kind)
    x = np.linspace(0.35, 0.65, 7)
    h = 1e-5
    for d in (0, 1):
        fd = (network_eval(p, mesh, 1, x + h, d) - network_eval(p, mesh, 1, x - h, d)) / (2 * h)
        np.testing.assert_allclose(network_eval(p, mesh, 1, x, d + 1), fd, rtol=1e-6, atol=1e-6)


@given(st.sampled_from(ACTIVATIONS), st.integers(0, 2), st.floats(0.0, 1.0),
       st.integers(0, 2**31))
def test_param_jacobian_matches_fd(kind, d, x, seed):
    rng = np.random.default_rng(seed)
    mesh = build_uniform_mesh((0.0, 1.0), 2)
    p = _random_params(rng, N=2, n=4, act=kind)
    dW, db = param_jacobian(p, mesh, 1, x, d)
    h = 1e-6
    for j in range(4):
        for arr, analytic in ((p.W, dW), (p.b, db)):
            old = arr[1, j]
            arr[1, j] = old + h
            up = network_eval(p, mesh, 1, x, d)
            arr[1, j] = old - h
            down = network_eval(p, mesh, 1, x, d)
            arr[1, j] = old
            fd = (up - down) / (2 * h)
            assert abs(analytic[j] - fd) <= 1e-5 * (1 + abs(fd))


def test_param_norm_example():
    p = NetworkParams([[1.0, -3.0], [0.5, 0.5]], [[2.0, 0.0], [0.0, -4.0]],
                      [[3 + 4j, 0.0], [1.0, 1.0]], "sigmoid")
    # element 0: 3 + 2 + 5, element 1: 0.5 + 4 + 1
    assert param_norm(p) == pytest.approx(10.0)


def test_params_csv_round_trip_exact(tmp_path, rng):
    p = _random_params(rng, N=4, n=3, act="sin")
    path = tmp_path / "params.csv"
    save_params_csv(p, path)
    q = load_params_csv(path)
    assert q.activation.kind == "sin"
    np.testing.assert_array_equal(q.W, p.W)
    np.testing.assert_array_equal(q.b, p.b)
    np.testing.assert_array_equal(q.c, p.c)


def test_is_finite():
    p = NetworkParams.zeros(2, 2)
    assert p.is_finite()
    p.c[0, 0] = np.nan
    assert not p.is_finite()


# ---- worked examples ----------------------------------------------------------


def test_network_eval_examples():
    mesh = build_uniform_mesh((0.0, 1.0), 1)
    n = 6
    p = NetworkParams(np.zeros((1, n)), np.zeros((1, n)), np.ones((1, n)), "sigmoid")
    assert network_eval(p, mesh, 0, 0.7) == pytest.approx(0.5 * n)
    assert network_eval(p, mesh, 0, 0.7, 1) == 0
    t = NetworkParams([[2.0]], [[0.0]], [[1.0]], "tanh")
    assert network_eval(t, mesh, 0, 0.0, 2) == pytest.approx(0.0, abs=1e-15)
    h = 1e-4
    fd = (network_eval(t, mesh, 0, 0.3 + h) - 2 * network_eval(t, mesh, 0, 0.3)
          + network_eval(t, mesh, 0, 0.3 - h)) / h**2
    assert network_eval(t, mesh, 0, 0.3, 2) == pytest.approx(4 * Activation("tanh")(0.6, 2))
    assert network_eval(t, mesh, 0, 0.3, 2) == pytest.approx(fd, rel=1e-6)


def test_param_jacobian_at_zero():
    mesh = build_uniform_mesh((0.0, 1.0), 1)
    c = np.array([[1.0, 2.0 - 1j, -3.0]])
    p = NetworkParams(np.zeros((1, 3)), np.zeros((1, 3)), c, "sigmoid")
    dW, db = param_jacobian(p, mesh, 0, 0.4, 0)
    np.testing.assert_allclose(dW, 0.25 * c[0] * 0.4)
    np.testing.assert_allclose(db, 0.25 * c[0])
    dW, db = param_jacobian(p, mesh, 0, 0.4, 2)
    assert np.all(dW == 0) and np.all(db == 0)


def test_param_norm_examples():
    assert param_norm(NetworkParams.zeros(3, 4)) == 0.0
    p = NetworkParams([[1.0, -3.0]], [[0.0, 2.0]], [[1j, 1.0]], "sigmoid")
    assert param_norm(p) == pytest.approx(6.0)
    q = NetworkParams([[4.0], [7.0]], [[0.0], [0.0]], [[0.0], [0.0]], "sigmoid")
    assert param_norm(q) == 7.0


def test_sigmoid_third_derivative_fd_oracle():
    # fourth-order central differences of sigma'' at 0
    h = 1e-3
    s2 = lambda z: activation_derivatives("sigmoid", z, 2)[2]
    fd = (-s2(2 * h) + 8 * s2(h) - 8 * s2(-h) + s2(-2 * h)) / (12 * h)
    assert fd == pytest.approx(-0.125, abs=1e-10)
