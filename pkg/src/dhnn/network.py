"""Element-wise single-hidden-layer networks and their derivatives.

On element k the network is u(x) = sum_j c_j sigma(W_j x + b_j) with real
W, b and complex c.  Nothing couples neighbouring elements.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

ACTIVATIONS = ("sigmoid", "tanh", "sin")


def _sigmoid_pair(z):
    """(sigma(z), sigma(-z)) without cancellation for large |z|."""
    e = np.exp(-np.abs(z))
    big = 1.0 / (1.0 + e)
    small = e * big
    pos = z >= 0
    return np.where(pos, big, small), np.where(pos, small, big)


def activation_derivatives(kind, z, max_order=3):
    """List ``[sigma(z), sigma'(z), ..., sigma^(max_order)(z)]``."""
    z = np.asarray(z, dtype=float)
    if kind == "sigmoid":
        s, sm = _sigmoid_pair(z)
        d1 = s * sm
        out = [s, d1, d1 * (sm - s), d1 * (1.0 - 6.0 * s * sm)]
    elif kind == "tanh":
        t = np.tanh(z)
        e = np.exp(-2.0 * np.abs(z))
        d1 = 4.0 * e / (1.0 + e) ** 2  # sech^2 without cancellation
        out = [t, d1, -2.0 * t * d1, d1 * (4.0 * t * t - 2.0 * d1)]
    elif kind == "sin":
        s, c = np.sin(z), np.cos(z)
        out = [s, c, -s, -c]
    else:
        raise InvalidArgumentError(f"unknown activation {kind!r}")
    return out[: max_order + 1]


@dataclass(frozen=True)
class Activation:
    kind: str = "sigmoid"

    def __post_init__(self):
        if self.kind not in ACTIVATIONS:
            raise InvalidArgumentError(
                f"activation must be one of {ACTIVATIONS}, got {self.kind!r}"
            )

    @property
    def code(self):
        return ACTIVATIONS.index(self.kind)

    def __call__(self, z, order=0):
        return activation_eval(self, z, order)


def activation_eval(act, z, order=0):
    if not 0 <= order <= 3:
        raise InvalidArgumentError(f"derivative order must be in 0..3, got {order}")
    return activation_derivatives(act.kind, z, order)[order]


@dataclass
class NetworkParams:
    """Per-element parameters; every array has shape ``(N, n)``."""

    W: np.ndarray
    b: np.ndarray
    c: np.ndarray
    activation: Activation

    def __post_init__(self):
        self.W = np.array(self.W, dtype=float)
        self.b = np.array(self.b, dtype=float)
        self.c = np.array(self.c, dtype=complex)
        if isinstance(self.activation, str):
            self.activation = Activation(self.activation)
        if not (self.W.ndim == 2 and self.W.shape == self.b.shape == self.c.shape):
            raise InvalidArgumentError("W, b and c must share a 2-D shape (N, n)")

    @classmethod
    def zeros(cls, n_elements, width, activation="sigmoid"):
        shape = (n_elements, width)
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape, complex), activation)

    @property
    def n_elements(self):
        return self.W.shape[0]

    @property
    def width(self):
        return self.W.shape[1]

    def copy(self):
        return NetworkParams(self.W.copy(), self.b.copy(), self.c.copy(), self.activation)

    def nonlinear_vector(self):
        """Flat (W, b) in element-major, neuron-minor order, W before b."""
        return np.stack([self.W, self.b], axis=-1).ravel()

    def with_nonlinear(self, vec):
        vec = np.asarray(vec, dtype=float).reshape(self.W.shape + (2,))
        return NetworkParams(vec[..., 0].copy(), vec[..., 1].copy(), self.c.copy(), self.activation)

    def full_vector(self):
        """Flat (W, b, Re c, Im c) per neuron, element-major."""
        return np.stack([self.W, self.b, self.c.real, self.c.imag], axis=-1).ravel()

    def with_full(self, vec):
        vec = np.asarray(vec, dtype=float).reshape(self.W.shape + (4,))
        return NetworkParams(
            vec[..., 0].copy(), vec[..., 1].copy(), vec[..., 2] + 1j * vec[..., 3], self.activation
        )

    def is_finite(self):
        return bool(np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))
                    and np.all(np.isfinite(self.c)))


def network_eval(params, mesh, k, x, d=0):
    """d-th spatial derivative of the element-k network at ``x``."""
    mesh._check(k)
    if not 0 <= d <= 2:
        raise InvalidArgumentError(f"spatial derivative order must be 0..2, got {d}")
    x = np.asarray(x, dtype=float)
    W, b, c = params.W[k], params.b[k], params.c[k]
    z = np.multiply.outer(x, W) + b
    s = activation_derivatives(params.activation.kind, z, d)[d]
    return (s * (c * W**d)).sum(axis=-1)


def param_jacobian(params, mesh, k, x, d=0):
    """Derivatives of u^(d)(x) on element k with respect to W_j and b_j.

    Returns two complex arrays of length n: d/dW_j and d/db_j.
    """
    mesh._check(k)
    if not 0 <= d <= 2:
        raise InvalidArgumentError(f"spatial derivative order must be 0..2, got {d}")
    W, b, c = params.W[k], params.b[k], params.c[k]
    z = W * float(x) + b
    s = activation_derivatives(params.activation.kind, z, d + 1)
    dW = c * W**d * float(x) * s[d + 1]
    if d:
        dW = dW + c * d * W ** (d - 1) * s[d]
    db = c * W**d * s[d + 1]
    return dW, db


def param_norm(params):
    per_element = (
        np.max(np.abs(params.W), axis=1)
        + np.max(np.abs(params.b), axis=1)
        + np.max(np.abs(params.c), axis=1)
    )
    return float(np.max(per_element))


CSV_FIELDS = ("element", "neuron", "W", "b", "re_c", "im_c")


def save_params_csv(params, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("#activation", params.activation.kind))
        writer.writerow(CSV_FIELDS)
        for k in range(params.n_elements):
            for j in range(params.width):
                c = params.c[k, j]
                writer.writerow((k, j, *(repr(float(v)) for v in
                                         (params.W[k, j], params.b[k, j], c.real, c.imag))))


def load_params_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        _, kind = next(reader)
        header = tuple(next(reader))
        if header != CSV_FIELDS:
            raise InvalidArgumentError(f"unexpected parameter header {header}")
        rows = [(int(r[0]), int(r[1]), *map(float, r[2:])) for r in reader]
    N = max(r[0] for r in rows) + 1
    n = max(r[1] for r in rows) + 1
    params = NetworkParams.zeros(N, n, kind)
    for k, j, w, bb, re, im in rows:
        params.W[k, j], params.b[k, j], params.c[k, j] = w, bb, complex(re, im)
    return params
