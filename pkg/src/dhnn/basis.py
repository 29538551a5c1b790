"""L2-orthonormal Legendre test functions on each element."""

import numpy as np

from .errors import InvalidArgumentError, NumericalFailure


def legendre_table(degree, t):
    """Rows P_0(t) .. P_degree(t), shape ``(degree + 1,) + t.shape``."""
    t = np.asarray(t, dtype=float)
    out = np.empty((degree + 1,) + t.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = t
    for j in range(2, degree + 1):
        out[j] = ((2 * j - 1) * t * out[j - 1] - (j - 1) * out[j - 2]) / j
    return out


class TestBasis:
    """Truncated orthonormal bases phi_{k,i} = sqrt((2i+1)/h_k) P_i(t(x)).

    Indices are 0-based: ``i`` is the Legendre degree, ``0 <= i < M[k]``.
    """

    __test__ = False  # keep pytest from collecting this class

    family = "legendre"

    def __init__(self, mesh, M=10):
        self.mesh = mesh
        if np.isscalar(M):
            M = (int(M),) * mesh.n_elements
        M = tuple(int(m) for m in M)
        if len(M) != mesh.n_elements:
            raise InvalidArgumentError(
                f"need one truncation count per element, got {len(M)} for {mesh.n_elements}"
            )
        if min(M) < 1:
            raise InvalidArgumentError("every truncation count must be >= 1")
        self.M = M

    @property
    def max_M(self):
        return max(self.M)

    def _check(self, k, i=None):
        self.mesh._check(k)
        if i is not None and not 0 <= i < self.M[k]:
            raise InvalidArgumentError(
                f"basis index {i} out of range for M[{k}] = {self.M[k]}"
            )

    def values(self, k, x):
        """All M[k] test functions at points ``x`` of element ``k``."""
        self._check(k)
        t = self.mesh.to_reference(k, x)
        scale = np.sqrt((2 * np.arange(self.M[k]) + 1) / self.mesh.h[k])
        table = legendre_table(self.M[k] - 1, t)
        return scale.reshape((-1,) + (1,) * np.ndim(t)) * table


def eval_basis(basis, k, i, x):
    basis._check(k, i)
    return basis.values(k, x)[i]


def project(basis, rule, k, f):
    """Coefficients (f, phi_{k,i}) for i < M[k], by quadrature."""
    x, w = rule.physical(basis.mesh, k)
    values = np.asarray(f(x), dtype=complex)
    if values.shape == ():
        values = np.full(x.shape, values)
    if not np.all(np.isfinite(values)):
        raise NumericalFailure(f"projected function is not finite on element {k}")
    return basis.values(k, x) @ (w * values)


def gram_matrix(basis, rule, k):
    x, w = rule.physical(basis.mesh, k)
    phi = basis.values(k, x)
    return (phi * w) @ phi.T
