"""Hybrid loss: truncated residual moments + tau * (boundary + interface).

Every term is linear in the coefficients c, so the loss is a weighted
least-squares residual ``sum_r d_r |(A c - y)_r|^2`` whose rows are the
residual moments (weight 1), the two boundary residuals and the two jump
components per interface (weight tau).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericalFailure
from .network import activation_derivatives


@dataclass(frozen=True)
class LossBreakdown:
    residual: float
    boundary: float
    interface: float
    tau: float
    total: float

    @classmethod
    def combine(cls, residual, boundary, interface, tau):
        return cls(residual, boundary, interface, tau, residual + tau * (boundary + interface))


def _require_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NumericalFailure(f"{what} contains non-finite values")


class HybridLoss:
    """Loss and gradients for one (problem, mesh, basis, quadrature) setup.

    Everything depending only on the discretization (quadrature points,
    weighted test functions, source moments) is computed once here.
    """

    def __init__(self, problem, mesh, basis, rule):
        self.problem = problem
        self.mesh = mesh
        self.basis = basis
        self.rule = rule
        N, Q, M = mesh.n_elements, rule.order, basis.max_M
        h = mesh.h
        self.xq = np.ascontiguousarray(mesh.nodes[:-1, None] + 0.5 * h[:, None] * (rule.nodes + 1.0))
        self.wq = np.ascontiguousarray(0.5 * h[:, None] * rule.weights)
        phiw = np.zeros((N, M, Q))
        for k in range(N):
            phiw[k, : basis.M[k]] = basis.values(k, self.xq[k]) * self.wq[k]
        self.phiw = phiw
        fvals = np.asarray(problem.source(self.xq), dtype=complex) * np.ones_like(self.xq)
        _require_finite(fvals, "source")
        self.fvals = fvals
        self.fmom = np.ascontiguousarray(np.einsum("kiq,kq->ki", phiw, fvals))
        self.kappa = float(problem.kappa)
        self.beta = complex(problem.impedance)
        self.omega2 = float(problem.omega) ** 2
        self.g = np.array(problem.g, dtype=complex)

    # ---- element residual -------------------------------------------------
    def moments(self, params, want_grad=False):
        return kernels.residual_moments(
            params.activation.code, self.kappa,
            np.ascontiguousarray(params.W), np.ascontiguousarray(params.b),
            np.ascontiguousarray(params.c), self.xq, self.phiw, self.fmom, want_grad,
        )

    def moment_matrix(self, params):
        return kernels.moment_matrix(
            params.activation.code, self.kappa,
            np.ascontiguousarray(params.W), np.ascontiguousarray(params.b), self.xq, self.phiw,
        )

    # ---- point terms --------------------------------------------------------
    def _ends(self, params, x, with_grad):
        """Trace features of every element at points ``x`` (one per element)."""
        W, b = params.W, params.b
        xc = x[:, None]
        s = activation_derivatives(params.activation.kind, W * xc + b, 2 if with_grad else 1)
        feats = {"val": s[0], "slope": W * s[1]}
        if with_grad:
            feats.update(
                val_W=xc * s[1], val_b=s[1],
                slope_W=s[1] + W * xc * s[2], slope_b=W * s[2],
            )
        return feats

    def point_rows(self, params, with_grad=False):
        """Coefficient rows, residuals and (optionally) parameter derivatives.

        Returns a dict with
          ``bnd_coef`` (2, n): rows acting on c of the first / last element,
          ``bnd_res`` (2,): B u - g at the two endpoints,
          ``jmp_left`` / ``jmp_right`` (2, N-1, n): C1, C2 rows acting on the
          left / right neighbour of every interface,
          ``jmp_res`` (2, N-1): the jump values.
        """
        nodes = self.mesh.nodes
        a = self._ends(params, nodes[:-1], with_grad)
        e = self._ends(params, nodes[1:], with_grad)
        beta, w2, c = self.beta, self.omega2, params.c
        out = {}
        out["bnd_coef"] = np.stack([
            -a["slope"][0] + beta * a["val"][0],
            e["slope"][-1] + beta * e["val"][-1],
        ])
        out["bnd_res"] = np.array([
            out["bnd_coef"][0] @ c[0] - self.g[0],
            out["bnd_coef"][1] @ c[-1] - self.g[1],
        ])
        out["jmp_left"] = np.stack([w2 * e["val"][:-1], e["slope"][:-1]])
        out["jmp_right"] = np.stack([-w2 * a["val"][1:], -a["slope"][1:]])
        out["jmp_res"] = (np.einsum("tij,ij->ti", out["jmp_left"], c[:-1])
                          + np.einsum("tij,ij->ti", out["jmp_right"], c[1:]))
        if with_grad:
            for p in ("W", "b"):
                out[f"bnd_{p}"] = np.stack([
                    -a[f"slope_{p}"][0] + beta * a[f"val_{p}"][0],
                    e[f"slope_{p}"][-1] + beta * e[f"val_{p}"][-1],
                ])
                out[f"jmp_left_{p}"] = np.stack([w2 * e[f"val_{p}"][:-1], e[f"slope_{p}"][:-1]])
                out[f"jmp_right_{p}"] = np.stack([-w2 * a[f"val_{p}"][1:], -a[f"slope_{p}"][1:]])
        return out

    # ---- loss values --------------------------------------------------------
    def breakdown(self, params, tau, moments=None, rows=None):
        m = self.moments(params)[0] if moments is None else moments
        rows = self.point_rows(params) if rows is None else rows
        _require_finite(m, "residual moments")
        residual = float(np.sum(m.real**2 + m.imag**2))
        boundary = float(np.sum(np.abs(rows["bnd_res"]) ** 2))
        interface = float(np.sum(np.abs(rows["jmp_res"]) ** 2))
        if not np.isfinite(boundary + interface):
            raise NumericalFailure("boundary or interface residual is not finite")
        return LossBreakdown.combine(residual, boundary, interface, float(tau))

    def full_residual(self, params):
        """Element-wise ||A u - f||^2 summed over elements (untruncated)."""
        W, b = params.W[:, None, :], params.b[:, None, :]
        s = activation_derivatives(params.activation.kind, W * self.xq[:, :, None] + b, 2)
        G = -(W * W) * s[2] - self.kappa * s[0]
        r = np.einsum("kqj,kj->kq", G, params.c) - self.fvals
        _require_finite(r, "residual")
        return float(np.sum(self.wq * (r.real**2 + r.imag**2)))

    # ---- gradients ----------------------------------------------------------
    def _point_grad_nonlinear(self, params, rows):
        """d(L_b + L_int)/dW and /db, each (N, n)."""
        c = params.c
        out = []
        for p in ("W", "b"):
            g = np.zeros(c.shape)
            r = rows["bnd_res"]
            g[0] += 2.0 * (r[0].conjugate() * rows[f"bnd_{p}"][0] * c[0]).real
            g[-1] += 2.0 * (r[1].conjugate() * rows[f"bnd_{p}"][1] * c[-1]).real
            rj = rows["jmp_res"].conjugate()[:, :, None]
            g[:-1] += 2.0 * (rj * rows[f"jmp_left_{p}"] * c[:-1]).real.sum(axis=0)
            g[1:] += 2.0 * (rj * rows[f"jmp_right_{p}"] * c[1:]).real.sum(axis=0)
            out.append(g)
        return out

    def _point_grad_linear(self, rows, shape):
        """d(L_b + L_int)/dc as a complex array: Re part -> d/dRe c, Im -> d/dIm c."""
        g = np.zeros(shape, dtype=complex)
        r = rows["bnd_res"]
        g[0] += 2.0 * rows["bnd_coef"][0].conjugate() * r[0]
        g[-1] += 2.0 * rows["bnd_coef"][1].conjugate() * r[1]
        rj = rows["jmp_res"][:, :, None]
        g[:-1] += 2.0 * (rows["jmp_left"].conjugate() * rj).sum(axis=0)
        g[1:] += 2.0 * (rows["jmp_right"].conjugate() * rj).sum(axis=0)
        return g

    def value_and_grad_nonlinear(self, params, tau):
        """(LossBreakdown, dJ/d(W, b) flattened element-major, neuron-minor, W before b)."""
        m, gW_r, gb_r = self.moments(params, want_grad=True)
        rows = self.point_rows(params, with_grad=True)
        loss = self.breakdown(params, tau, m, rows)
        gW_p, gb_p = self._point_grad_nonlinear(params, rows)
        grad = np.stack([gW_r + tau * gW_p, gb_r + tau * gb_p], axis=-1).ravel()
        return loss, grad

    def grad_nonlinear(self, params, tau):
        return self.value_and_grad_nonlinear(params, tau)[1]

    def grad_all(self, params):
        """Gradients of L_r and of (L_b + L_int) over (W, b, Re c, Im c).

        Both are flattened per neuron, element-major, in that order.
        """
        m, gW_r, gb_r = self.moments(params, want_grad=True)
        rows = self.point_rows(params, with_grad=True)
        gW_p, gb_p = self._point_grad_nonlinear(params, rows)
        gc_r = 2.0 * np.einsum("kij,ki->kj", self.moment_matrix(params), m)
        gc_p = self._point_grad_linear(rows, params.c.shape)
        grad_r = np.stack([gW_r, gb_r, gc_r.real, gc_r.imag], axis=-1).ravel()
        grad_p = np.stack([gW_p, gb_p, gc_p.real, gc_p.imag], axis=-1).ravel()
        return grad_r, grad_p


# ---- functional wrappers ----------------------------------------------------
def residual_moments(prob, params, basis, rule, k):
    loss = HybridLoss(prob, basis.mesh, basis, rule)
    return loss.moments(params)[0][k, : basis.M[k]]


def loss_breakdown(prob, params, mesh, basis, rule, tau):
    return HybridLoss(prob, mesh, basis, rule).breakdown(params, tau)


def full_residual_loss(prob, params, mesh, rule):
    from .basis import TestBasis

    return HybridLoss(prob, mesh, TestBasis(mesh, 1), rule).full_residual(params)


def grad_nonlinear(prob, params, mesh, basis, rule, tau):
    return HybridLoss(prob, mesh, basis, rule).grad_nonlinear(params, tau)


def grad_all(prob, params, mesh, basis, rule, tau=None):
    """``tau`` is accepted for signature symmetry; the two parts are unweighted."""
    return HybridLoss(prob, mesh, basis, rule).grad_all(params)
