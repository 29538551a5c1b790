"""Gauss-Legendre rules on [-1, 1] and element-wise integration."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalFailure


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self):
        return self.nodes.size

    def physical(self, mesh, k):
        """Nodes and Jacobian-scaled weights on element ``k``."""
        a, b = mesh.element(k)
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights


def gauss_legendre(order):
    """Nodes and weights of the ``order``-point Gauss-Legendre rule.

    Roots of P_order are found by Newton's method from Chebyshev-type initial
    guesses; the three-term recurrence supplies P_order and its derivative.
    Nodes are returned in ascending order.
    """
    if int(order) != order or order < 1:
        raise InvalidArgumentError(f"quadrature order must be >= 1, got {order}")
    n = int(order)
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p, dp = _legendre_and_derivative(n, x)
    weights = 2.0 / ((1.0 - x**2) * dp**2)
    order_idx = np.argsort(x)
    x, weights = x[order_idx], weights[order_idx]
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if n % 2:
        x[n // 2] = 0.0
    x.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(x, weights)


def _legendre_and_derivative(n, x):
    p0 = np.ones_like(x)
    p1 = x.copy()
    if n == 0:
        return p0, np.zeros_like(x)
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x**2 - 1.0)
    return p1, dp


def integrate(rule, mesh, k, f):
    """Integral of ``f`` over element ``k``; ``f`` must accept numpy arrays."""
    x, w = rule.physical(mesh, k)
    values = np.asarray(f(x))
    if values.shape == ():
        values = np.full(x.shape, values)
    if not np.all(np.isfinite(values)):
        raise NumericalFailure(f"integrand is not finite on element {k}")
    total = 0.0
    for wq, fq in zip(w, values):
        total = total + wq * fq
    return complex(total)
