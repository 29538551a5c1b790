"""Model boundary-value problems on [0, 1].

Poisson:    -u''          = f,  du/dn + u       = g  on {0, 1}
Helmholtz:  -u'' - w^2 u  = f,  du/dn + i w u   = g  on {0, 1}

``omega`` doubles as the jump-relaxation parameter of the C1 interface term
for both kinds (2*pi for Poisson).
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError
from .network import activation_derivatives, network_eval

KINDS = ("poisson", "helmholtz")
EXPERIMENTS = ("poisson_hom", "poisson_inhom", "helmholtz_hom", "helmholtz_inhom")


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    omega: float
    source: Callable
    g: tuple
    exact: Optional[Callable] = None
    exact_dx: Optional[Callable] = None
    name: str = ""
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"problem kind must be one of {KINDS}")
        if not self.omega > 0:
            raise InvalidArgumentError("omega must be positive (it scales the C1 jump)")
        if len(self.g) != 2:
            raise InvalidArgumentError("boundary data needs exactly two endpoint values")
        object.__setattr__(self, "g", tuple(complex(v) for v in self.g))

    @property
    def kappa(self):
        """Zeroth-order coefficient folded into A: A u = -u'' - kappa u."""
        return self.omega**2 if self.kind == "helmholtz" else 0.0

    @property
    def impedance(self):
        """Coefficient of u in the boundary operator B u = du/dn + beta u."""
        return 1j * self.omega if self.kind == "helmholtz" else 1.0 + 0j

    @property
    def is_complex(self):
        return self.kind == "helmholtz"


def boundary_operator(prob, side, u, du):
    """B applied to a trace value ``u`` and slope ``du`` at one endpoint."""
    if side == "left":
        return -du + prob.impedance * u
    if side == "right":
        return du + prob.impedance * u
    raise InvalidArgumentError(f"side must be 'left' or 'right', got {side!r}")


def jump_operator(prob, u_left, du_left, u_right, du_right):
    """([[C1 u]], [[C2 u]]) from the traces of the two neighbours."""
    return prob.omega**2 * (u_left - u_right), du_left - du_right


def apply_A(prob, params, mesh, k, x):
    u2 = network_eval(params, mesh, k, x, 2)
    if prob.kind == "poisson":
        return -u2
    return -u2 - prob.kappa * network_eval(params, mesh, k, x, 0)


def apply_B(prob, params, mesh, side):
    if side == "left":
        k, x = 0, mesh.nodes[0]
    elif side == "right":
        k, x = mesh.n_elements - 1, mesh.nodes[-1]
    else:
        raise InvalidArgumentError(f"side must be 'left' or 'right', got {side!r}")
    u = network_eval(params, mesh, k, x, 0)
    du = network_eval(params, mesh, k, x, 1)
    return complex(boundary_operator(prob, side, u, du))


def interface_jumps(prob, params, mesh, i):
    """Jumps at interior node ``mesh.nodes[i]``, 1 <= i <= N-1."""
    if not 1 <= i <= mesh.n_elements - 1:
        raise InvalidArgumentError(
            f"interior node index must be in 1..{mesh.n_elements - 1}, got {i}"
        )
    x = mesh.nodes[i]
    traces = [
        (network_eval(params, mesh, k, x, 0), network_eval(params, mesh, k, x, 1))
        for k in (i - 1, i)
    ]
    j1, j2 = jump_operator(prob, *traces[0], *traces[1])
    return complex(j1), complex(j2)


def _with_boundary_data(kind, omega, source, exact, exact_dx, name):
    probe = ProblemSpec(kind, omega, source, (0, 0))
    g = (
        boundary_operator(probe, "left", exact(0.0), exact_dx(0.0)),
        boundary_operator(probe, "right", exact(1.0), exact_dx(1.0)),
    )
    return ProblemSpec(kind, omega, source, g, exact, exact_dx, name)


def make_experiment(name, omega=None):
    """Manufactured-solution problems with f and g derived from u."""
    if name == "poisson_hom":
        omega = 2 * np.pi if omega is None else omega
        return _with_boundary_data(
            "poisson", omega,
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda x: 2.0 * np.asarray(x) + 1.0,
            lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
            name,
        )
    if name == "poisson_inhom":
        omega = 2 * np.pi if omega is None else omega

        def exact(x):
            return 0.1 * np.sin(4 * np.pi * x) + np.tanh(5 * x)

        def exact_dx(x):
            return 0.4 * np.pi * np.cos(4 * np.pi * x) + 5.0 / np.cosh(5 * x) ** 2

        def source(x):
            x = np.asarray(x, dtype=float)
            return (1.6 * np.pi**2 * np.sin(4 * np.pi * x)
                    + 50.0 * np.tanh(5 * x) / np.cosh(5 * x) ** 2)

        return _with_boundary_data("poisson", omega, source, exact, exact_dx, name)
    if name in ("helmholtz_hom", "helmholtz_inhom"):
        if omega is None:
            raise InvalidArgumentError(f"{name} needs an explicit omega")
        w = float(omega)
        k = w if name == "helmholtz_hom" else np.sqrt(w)
        amp = 0.0 if name == "helmholtz_hom" else w - w * w

        def source(x):
            return amp * np.sin(k * np.asarray(x, dtype=float))

        return _with_boundary_data(
            "helmholtz", w, source,
            lambda x: np.sin(k * np.asarray(x, dtype=float)),
            lambda x: k * np.cos(k * np.asarray(x, dtype=float)),
            name,
        )
    raise InvalidArgumentError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")


def network_function(params, mesh, d=0):
    """Vectorized u^(d) over arbitrary points, interior nodes from the left."""

    def u(x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty(flat.shape, dtype=complex)
        idx = mesh.locate(flat)
        for k in np.unique(idx):
            sel = idx == k
            out[sel] = network_eval(params, mesh, int(k), flat[sel], d)
        return out.reshape(x.shape)

    return u


def continuous_coefficients(W, b, mesh, activation, rng):
    """Random complex c making the element networks C^1 across interior nodes.

    The jump conditions u_{k-1}(x_k) = u_k(x_k), u'_{k-1}(x_k) = u'_k(x_k)
    are linear in c; a random vector is projected onto their null space so
    the hybrid loss of the resulting network can be exactly zero.
    """
    N, n = W.shape
    rows = []
    for i in range(1, N):
        x = mesh.nodes[i]
        for d in (0, 1):
            row = np.zeros(N * n)
            for k, sign in ((i - 1, 1.0), (i, -1.0)):
                z = W[k] * x + b[k]
                row[k * n:(k + 1) * n] = sign * W[k] ** d * activation_derivatives(activation, z, d)[d]
            rows.append(row)
    c = rng.normal(size=N * n) + 1j * rng.normal(size=N * n)
    if rows:
        basis = scipy.linalg.null_space(np.array(rows))
        c = basis @ (basis.T @ c)
    return c.reshape(N, n)


def manufactured_problem(params, mesh, kind="poisson", omega=2 * np.pi):
    """Problem whose data come from ``params`` itself, so zero loss is attainable.

    The network is its own exact solution; f = A u and g = B u are evaluated
    element-wise.
    """
    kappa = omega**2 if kind == "helmholtz" else 0.0
    u0 = network_function(params, mesh, 0)
    u2 = network_function(params, mesh, 2)

    def source(x):
        return -u2(x) - kappa * u0(x)

    probe = ProblemSpec(kind, omega, source, (0, 0))
    g = (apply_B(probe, params, mesh, "left"), apply_B(probe, params, mesh, "right"))
    return ProblemSpec(kind, omega, source, g, u0, network_function(params, mesh, 1),
                       name=f"manufactured_{kind}", domain=mesh.domain)
