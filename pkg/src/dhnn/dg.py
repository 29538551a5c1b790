"""Linear-coefficient update: normal equations of the hybrid loss in c.

With W and b frozen, psi_{k,j}(x) = sigma(W_j^(k) x + b_j^(k)) on element k
spans the trial space.  Unknowns are flattened element-major, neuron-minor:
index ``k * n + j``.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import FactorizationError, InvalidArgumentError, NumericalFailure, SolverFailure
from .linalg import HermitianMatrix, cholesky_solve, eig_solve

log = logging.getLogger(__name__)


@dataclass
class LinearSystem:
    """Normal equations ``matrix @ c = rhs``.

    When built by :func:`assemble` the weighted least-squares rows that
    generate them are kept too (``design``, ``target``, ``weights``), so the
    same minimization can be solved without squaring the condition number.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    n_elements: int
    width: int
    design: np.ndarray = None
    target: np.ndarray = None
    weights: np.ndarray = None


@dataclass
class SolveResult:
    c: np.ndarray  # (N, n)
    residual_norm: float
    method: str


def design_rows(loss, params, tau):
    """Weighted least-squares form: rows A, targets y, weights d."""
    N, n = params.W.shape
    Mmax = loss.basis.max_M
    mom = loss.moment_matrix(params)  # (N, Mmax, n)
    rows = loss.point_rows(params)
    n_rows = N * Mmax + 2 + 2 * (N - 1)
    A = np.zeros((n_rows, N * n), dtype=complex)
    y = np.zeros(n_rows, dtype=complex)
    d = np.full(n_rows, float(tau))
    for k in range(N):
        A[k * Mmax:(k + 1) * Mmax, k * n:(k + 1) * n] = mom[k]
        y[k * Mmax:(k + 1) * Mmax] = loss.fmom[k]
    d[: N * Mmax] = 1.0
    r = N * Mmax
    A[r, :n] = rows["bnd_coef"][0]
    A[r + 1, (N - 1) * n:] = rows["bnd_coef"][1]
    y[r:r + 2] = loss.g
    r += 2
    for i in range(N - 1):
        for t in range(2):
            A[r, i * n:(i + 1) * n] = rows["jmp_left"][t, i]
            A[r, (i + 1) * n:(i + 2) * n] = rows["jmp_right"][t, i]
            r += 1
    return A, y, d


def assemble(loss, params, tau):
    """Matrix entry ((k,j),(k',j')) = a(psi_{k',j'}, psi_{k,j}); rhs_(k,j) = L(psi_{k,j})."""
    A, y, d = design_rows(loss, params, tau)
    Ah = A.conj().T
    matrix = (Ah * d) @ A
    rhs = (Ah * d) @ y
    return LinearSystem(matrix, rhs, *params.W.shape, A, y, d)


SOLVERS = ("lstsq", "qr", "normal")


def assemble_system(prob, params, mesh, basis, rule, tau):
    """One-shot :func:`assemble` without a prebuilt :class:`HybridLoss`."""
    from .loss import HybridLoss

    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    return assemble(HybridLoss(prob, mesh, basis, rule), params, tau)


def solve_linear(system, regularization=0.0, method="qr", cond=1e-14, eig_cutoff=1e-12,
                 c0=None):
    """Minimize the hybrid loss over c; returns coefficients shaped (N, n).

    ``method="normal"`` factors ``matrix + lam I`` (Cholesky, then an
    eigen pseudo-inverse if that fails).  ``method="lstsq"`` solves the
    weighted rows directly by SVD, discarding singular values below
    ``cond * s_max``; a positive ``regularization`` appends ``sqrt(lam) I``
    rows so both methods minimize the same functional.  In both cases
    ``lam = regularization * max(diag(matrix))``.

    ``method="qr"`` returns the basic solution of a column-pivoted QR
    factorization: columns past the numerical rank (``|R_ii| <= cond |R_00|``)
    keep their starting value.  Unlike the minimum-norm SVD answer this
    breaks the symmetry between identical neurons, which the nonlinear
    updates need in order to separate them.  ``c0`` is the starting point;
    only a correction from it is solved for.
    """
    mat, rhs = system.matrix, system.rhs
    if not (np.all(np.isfinite(mat)) and np.all(np.isfinite(rhs))):
        raise NumericalFailure("assembled system contains non-finite entries")
    if regularization < 0:
        raise InvalidArgumentError("regularization must be non-negative")
    if method not in SOLVERS:
        raise InvalidArgumentError(f"method must be one of {SOLVERS}, got {method!r}")
    diag_max = float(np.max(mat.diagonal().real))
    shift = regularization * diag_max
    base = np.zeros(rhs.shape, complex) if c0 is None else np.asarray(c0, complex).ravel()
    if method in ("lstsq", "qr") and system.design is not None:
        B, r = _weighted(system, shift)
        r = r - B @ base
        x = base + (_lstsq(B, r, cond) if method == "lstsq" else _basic_qr(B, r, cond))
    else:
        x, method = _normal(mat, rhs - mat @ base - shift * base, shift, eig_cutoff)
        x = base + x
    if not np.all(np.isfinite(x)):
        lam = np.linalg.eigvalsh(HermitianMatrix(mat).dense())
        raise SolverFailure(
            f"{method} solve produced non-finite coefficients",
            {"lambda_min": float(lam[0]), "lambda_max": float(lam[-1]), "diag_max": diag_max},
        )
    residual = float(np.linalg.norm(mat @ x - rhs))
    return SolveResult(x.reshape(system.n_elements, system.width), residual, method)


def _lstsq(B, r, cond):
    try:
        x, *_ = scipy.linalg.lstsq(B, r, cond=cond, lapack_driver="gelsd", check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure("SVD least-squares solve did not converge") from exc
    return x


def _weighted(system, shift):
    sd = np.sqrt(system.weights)
    B = sd[:, None] * system.design
    r = sd * system.target
    if shift > 0:
        m = B.shape[1]
        B = np.vstack([B, np.sqrt(shift) * np.eye(m)])
        r = np.concatenate([r, np.zeros(m)])
    return B, r


def _basic_qr(B, r, cond):
    Q, R, perm = scipy.linalg.qr(B, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(R.diagonal())
    rank = int(np.sum(diag > cond * diag[0])) if diag.size and diag[0] > 0 else 0
    x = np.zeros(B.shape[1], dtype=complex)
    if rank:
        z = scipy.linalg.solve_triangular(R[:rank, :rank], Q[:, :rank].conj().T @ r)
        x[perm[:rank]] = z
    return x


def _normal(mat, rhs, shift, eig_cutoff):
    herm = HermitianMatrix(mat)
    if shift > 0:
        try:
            x = cholesky_solve(herm, rhs, shift)
            if np.all(np.isfinite(x)):
                return x, "cholesky"
        except FactorizationError:
            log.debug("cholesky failed with shift %.3e, falling back to eig", shift)
    return eig_solve(herm, rhs, eig_cutoff), "eig"


def write_system(system, path):
    """Matrix-Market style coordinate dump (complex general) of a system."""
    mat = system.matrix
    nz = np.argwhere(mat != 0)
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate complex general\n")
        fh.write(f"% rhs follows the matrix block; ordering k*n + j, n = {system.width}\n")
        fh.write(f"{mat.shape[0]} {mat.shape[1]} {len(nz)}\n")
        for i, j in nz:
            v = mat[i, j]
            fh.write(f"{i + 1} {j + 1} {v.real:.17g} {v.imag:.17g}\n")
        fh.write(f"% rhs {len(system.rhs)}\n")
        for v in system.rhs:
            fh.write(f"{v.real:.17g} {v.imag:.17g}\n")
