"""Finite-difference audit of the analytic loss gradients.

For each random parameter draw the analytic gradient of J_tau over
(W, b, Re c, Im c) is compared with central differences.  The (W, b)
entries are checked separately through ``value_and_grad_nonlinear`` (the
inner-loop route), the full vector through ``grad_all``.  Deviation is
max|g_analytic - g_fd| / max|g_fd| over the checked coordinates.
"""

from dataclasses import dataclass

import numpy as np

from .experiment import build_setup, random_network
from .loss import HybridLoss


@dataclass
class GradCheckResult:
    name: str
    draws: int
    checked: int  # coordinates compared per draw
    n_params: int
    max_dev_nonlinear: float
    max_dev_all: float

    @property
    def worst(self):
        return max(self.max_dev_nonlinear, self.max_dev_all)


def _coordinates(rng, n_neurons, cap):
    """All coordinates when small, else a subset hitting every parameter kind."""
    total = 4 * n_neurons
    if total <= cap:
        return np.arange(total)
    per_kind = cap // 4
    neurons = rng.choice(n_neurons, size=(4, per_kind), replace=True)
    idx = (4 * neurons + np.arange(4)[:, None]).ravel()
    return np.unique(idx)


def _rel_dev(analytic, fd):
    scale = np.max(np.abs(fd))
    if scale == 0.0:
        return float(np.max(np.abs(analytic)))
    return float(np.max(np.abs(analytic - fd)) / scale)


def check_config(cfg, draws=20, step=1e-6, seed=0, cap=160, w_scale=4.0):
    setup = build_setup(cfg)
    loss = HybridLoss(setup.problem, setup.mesh, setup.basis, setup.rule)
    rng = np.random.default_rng(seed)
    N, n = cfg.n_elements, cfg.width
    dev_nl = dev_all = 0.0
    checked = 0
    for _ in range(draws):
        params = random_network(rng, N, n, cfg.activation, w_scale)
        tau = float(rng.uniform(0.5, 2.0))
        grad_r, grad_p = loss.grad_all(params)
        g_all = grad_r + tau * grad_p
        _, g_nl = loss.value_and_grad_nonlinear(params, tau)

        theta = params.full_vector()
        idx = _coordinates(rng, N * n, cap)
        checked = max(checked, idx.size)
        fd = np.empty(idx.size)
        for m, i in enumerate(idx):
            e = np.zeros_like(theta)
            e[i] = step
            fp = loss.breakdown(params.with_full(theta + e), tau).total
            fm = loss.breakdown(params.with_full(theta - e), tau).total
            fd[m] = (fp - fm) / (2 * step)
        dev_all = max(dev_all, _rel_dev(g_all[idx], fd))
        # nonlinear layout is (W, b) per neuron; full layout (W, b, Re c, Im c)
        nl = idx % 4 < 2
        if np.any(nl):
            sub = idx[nl]
            nl_index = 2 * (sub // 4) + sub % 4
            dev_nl = max(dev_nl, _rel_dev(g_nl[nl_index], fd[nl]))
    return GradCheckResult(cfg.name or cfg.problem, draws, checked, 4 * N * n, dev_nl, dev_all)
