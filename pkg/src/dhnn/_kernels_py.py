"""Numpy implementation of the element residual kernels.

Shapes: ``W, b, c`` are ``(N, n)``, quadrature points ``xq`` are ``(N, Q)``,
``phiw`` holds weighted test functions ``phi_i(x_q) * w_q`` as ``(N, M, Q)``
and ``fmom`` the source moments ``(N, M)``.
"""

import numpy as np

from .network import ACTIVATIONS, activation_derivatives


def _features(act_code, kappa, W, b, xq, with_grad):
    z = W[:, None, :] * xq[:, :, None] + b[:, None, :]
    s = activation_derivatives(ACTIVATIONS[act_code], z, 3 if with_grad else 2)
    W2 = (W * W)[:, None, :]
    G = -W2 * s[2] - kappa * s[0]
    if not with_grad:
        return G, None, None
    x = xq[:, :, None]
    dG_dW = -2.0 * W[:, None, :] * s[2] - W2 * x * s[3] - kappa * x * s[1]
    dG_db = -W2 * s[3] - kappa * s[1]
    return G, dG_dW, dG_db


def moment_matrix(act_code, kappa, W, b, xq, phiw):
    """(A psi_j, phi_i) for every element, shape ``(N, M, n)``."""
    G, _, _ = _features(act_code, kappa, W, b, xq, False)
    return np.matmul(phiw, G)


def residual_moments(act_code, kappa, W, b, c, xq, phiw, fmom, want_grad=True):
    """Moments m_{k,i} = (A u - f, phi_{k,i}) and, optionally, dL_r/dW, dL_r/db."""
    G, dG_dW, dG_db = _features(act_code, kappa, W, b, xq, want_grad)
    Au = np.einsum("kqj,kj->kq", G, c)
    m = np.einsum("kiq,kq->ki", phiw, Au) - fmom
    if not want_grad:
        return m, None, None
    rho = np.einsum("kiq,ki->kq", phiw, m.conj())
    gW = 2.0 * (c * np.einsum("kq,kqj->kj", rho, dG_dW)).real
    gb = 2.0 * (c * np.einsum("kq,kqj->kj", rho, dG_db)).real
    return m, gW, gb
