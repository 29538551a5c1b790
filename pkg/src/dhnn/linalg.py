"""Dense Hermitian solves backed by LAPACK (via numpy/scipy)."""

import numpy as np
import scipy.linalg

from .errors import FactorizationError, InvalidArgumentError, NumericalFailure, SolverFailure


class HermitianMatrix:
    """Dense Hermitian matrix stored through its lower triangle.

    The strict upper triangle of the input is ignored and re-created from the
    lower one, so ``dense()`` is Hermitian exactly.
    """

    def __init__(self, a):
        a = np.array(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidArgumentError(f"expected a non-empty square matrix, got {a.shape}")
        lower = np.tril(a, -1)
        self._data = lower + lower.conj().T + np.diag(a.diagonal().real)

    @property
    def order(self):
        return self._data.shape[0]

    def dense(self):
        return self._data.copy()

    def __matmul__(self, other):
        return self._data @ other


def _as_hermitian(a):
    return a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)


def _check(a, b):
    if b.shape[0] != a.order:
        raise InvalidArgumentError(f"rhs length {b.shape[0]} does not match order {a.order}")
    if not (np.all(np.isfinite(a._data)) and np.all(np.isfinite(b))):
        raise NumericalFailure("linear system contains non-finite entries")


def cholesky_solve(a, b, shift=0.0):
    """Solve (A + shift I) x = b; raises FactorizationError if not positive definite."""
    a = _as_hermitian(a)
    b = np.asarray(b, dtype=complex)
    _check(a, b)
    if shift < 0:
        raise InvalidArgumentError("shift must be non-negative")
    mat = a._data + shift * np.eye(a.order)
    try:
        factor = scipy.linalg.cho_factor(mat, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def eigh(a):
    a = _as_hermitian(a)
    if not np.all(np.isfinite(a._data)):
        raise NumericalFailure("matrix contains non-finite entries")
    try:
        return np.linalg.eigh(a._data)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure("Hermitian eigensolver did not converge") from exc


def eig_solve(a, b, rel_cutoff=1e-12):
    """Minimum-norm least-squares solution through a truncated eigen-expansion."""
    if not 0 < rel_cutoff < 1:
        raise InvalidArgumentError("rel_cutoff must lie in (0, 1)")
    a = _as_hermitian(a)
    b = np.asarray(b, dtype=complex)
    _check(a, b)
    lam, vec = eigh(a)
    lam_max = np.max(np.abs(lam))
    keep = lam > rel_cutoff * lam_max if lam_max > 0 else np.zeros(lam.shape, bool)
    coeff = np.zeros(lam.shape, dtype=complex)
    coeff[keep] = (vec[:, keep].conj().T @ b) / lam[keep]
    return vec @ coeff
