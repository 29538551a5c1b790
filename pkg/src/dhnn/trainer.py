"""Alternating training loop.

Each outer round: solve for c with W, b frozen; update tau from gradient
magnitudes; run ``inner_iters`` RMSprop steps on (W, b) with c frozen; stop
once (W, b) moves by less than ``rho`` in max-norm over a round.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .dg import SOLVERS, assemble, solve_linear
from .errors import DHNNError, InvalidArgumentError, NumericalFailure
from .loss import HybridLoss
from .network import NetworkParams

log = logging.getLogger(__name__)

INIT_SCHEMES = ("zeros", "midpoint_first_weight")
TAU_PARAMS = ("all", "nonlinear")
TAU_UPDATES = ("anneal", "fixed")



@dataclass
class TrainConfig:
    alpha: float = 0.04
    inner_iters: int = 50
    rho: float = 1e-6
    beta: float = 0.1
    tau0: float = 1.0
    max_outer: int = 20
    rms_decay: float = 0.9
    rms_eps: float = 1e-8
    regularization: float = 0.0
    solver: str = "qr"
    lstsq_cond: float = 1e-14
    init_scheme: str = "zeros"
    tau_params: str = "all"
    tau_update: str = "anneal"
    warm_start: bool = True
    c_init: float = 1.0

    def __post_init__(self):
        checks = [
            (self.alpha > 0, "alpha must be > 0"),
            (int(self.inner_iters) == self.inner_iters and self.inner_iters >= 1,
             "inner_iters must be a positive integer"),
            (self.rho > 0, "rho must be > 0"),
            (0 < self.beta <= 1, "beta must lie in (0, 1]"),
            (self.tau0 > 0, "tau0 must be > 0"),
            (int(self.max_outer) == self.max_outer and self.max_outer >= 1,
             "max_outer must be a positive integer"),
            (0 < self.rms_decay < 1, "rms_decay must lie in (0, 1)"),
            (self.rms_eps > 0, "rms_eps must be > 0"),
            (self.regularization >= 0, "regularization must be >= 0"),
            (self.init_scheme in INIT_SCHEMES, f"init_scheme must be one of {INIT_SCHEMES}"),
            (self.tau_params in TAU_PARAMS, f"tau_params must be one of {TAU_PARAMS}"),
            (self.tau_update in TAU_UPDATES, f"tau_update must be one of {TAU_UPDATES}"),
            (self.solver in SOLVERS, f"solver must be one of {SOLVERS}"),
            (0 < self.lstsq_cond < 1, "lstsq_cond must lie in (0, 1)"),
            (self.c_init == self.c_init, "c_init must be a number"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidArgumentError(msg)


@dataclass
class HistoryRow:
    outer_index: int
    inner_index: int
    global_step: int
    phase: str
    loss: object  # LossBreakdown


@dataclass
class TrainState:
    params: NetworkParams
    tau: float
    sq_avg: np.ndarray  # RMSprop accumulators, same layout as the nonlinear vector
    outer_count: int = 0
    inner_count: int = 0
    history: list = field(default_factory=list)


@dataclass
class TrainReport:
    params: NetworkParams
    history: list
    termination: str
    outer_iterations: int
    last_phi_change: float
    solve_checks: list  # (outer, loss before solve, loss after solve) at fixed tau
    tau: float
    final_loss: object = None  # LossBreakdown after the closing linear solve


class TrainingError(DHNNError):
    def __init__(self, message, outer, inner, cause=None):
        super().__init__(f"{message} (outer {outer}, inner {inner})")
        self.outer, self.inner, self.cause = outer, inner, cause


def initialize(config, mesh, width, activation="sigmoid"):
    params = NetworkParams.zeros(mesh.n_elements, width, activation)
    params.c[:] = config.c_init
    if config.init_scheme == "midpoint_first_weight":
        params.W[:, 0] = mesh.midpoints()
    return TrainState(params, float(config.tau0), np.zeros(2 * params.W.size))


def update_tau(tau, grad_residual, grad_penalty, beta):
    """Blend tau with max|grad L_r| / mean|grad (L_b + L_int)|."""
    denom = float(np.mean(np.abs(grad_penalty)))
    if not denom > 1e-300:
        return tau
    tau_hat = float(np.max(np.abs(grad_residual))) / denom
    return (1.0 - beta) * tau + beta * tau_hat


def rmsprop_step(params, sq_avg, grad, alpha, decay=0.9, eps=1e-8):
    """One RMSprop update of (W, b) in place; ``sq_avg`` is updated in place."""
    grad = np.asarray(grad, dtype=float)
    if grad.shape != sq_avg.shape:
        raise InvalidArgumentError(f"gradient has shape {grad.shape}, expected {sq_avg.shape}")
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        idx = int(bad[0])
        k, rem = divmod(idx, 2 * params.width)
        name = "Wb"[rem % 2]
        raise NumericalFailure(f"non-finite gradient for {name}[{k}, {rem // 2}]")
    sq_avg *= decay
    sq_avg += (1.0 - decay) * grad * grad
    step = (alpha * grad / (np.sqrt(sq_avg) + eps)).reshape(params.W.shape + (2,))
    params.W -= step[..., 0]
    params.b -= step[..., 1]
    return params


def train(config, problem, mesh, basis, rule, width, activation="sigmoid", sink=None,
          state=None, on_solve=None):
    """Run the alternating loop.

    ``sink(row)`` receives each history row as it is recorded and
    ``on_solve(outer, system)`` each assembled linear system.
    """
    loss = HybridLoss(problem, mesh, basis, rule)
    state = initialize(config, mesh, width, activation) if state is None else state
    params = state.params
    solve_checks = []
    termination = "max_outer"
    change = float("inf")

    def record(phase, inner_index, value):
        row = HistoryRow(state.outer_count, inner_index, state.inner_count, phase, value)
        state.history.append(row)
        if sink is not None:
            sink(row)

    for outer in range(1, int(config.max_outer) + 1):
        state.outer_count = outer
        inner = 0
        try:
            before = loss.breakdown(params, state.tau)
            system = assemble(loss, params, state.tau)
            if on_solve is not None:
                on_solve(outer, system)
            params.c = solve_linear(system, config.regularization, config.solver,
                                    config.lstsq_cond, c0=params.c if config.warm_start else None).c
            after = loss.breakdown(params, state.tau)
            solve_checks.append((outer, before.total, after.total))
            record("outer", 0, after)

            if config.tau_update == "anneal":
                grad_r, grad_p = loss.grad_all(params)
                if config.tau_params == "nonlinear":
                    grad_r = grad_r.reshape(-1, 4)[:, :2]
                    grad_p = grad_p.reshape(-1, 4)[:, :2]
                state.tau = update_tau(state.tau, grad_r, grad_p, config.beta)

            phi_prev = params.nonlinear_vector()
            _, grad = loss.value_and_grad_nonlinear(params, state.tau)
            for inner in range(1, int(config.inner_iters) + 1):
                rmsprop_step(params, state.sq_avg, grad, config.alpha,
                             config.rms_decay, config.rms_eps)
                state.inner_count += 1
                value, grad = loss.value_and_grad_nonlinear(params, state.tau)
                record("inner", inner, value)
        except DHNNError as exc:
            raise TrainingError(str(exc), outer, inner, exc) from exc
        change = float(np.max(np.abs(params.nonlinear_vector() - phi_prev)))
        log.info("outer %d: total %.3e tau %.3e |dPhi| %.3e",
                 outer, state.history[-1].loss.total, state.tau, change)
        if change < config.rho:
            termination = "tolerance"
            break
    # the inner loop leaves c stale; re-solve so the returned network is consistent
    try:
        params.c = solve_linear(assemble(loss, params, state.tau), config.regularization,
                                config.solver, config.lstsq_cond,
                                c0=params.c if config.warm_start else None).c
        final = loss.breakdown(params, state.tau)
    except DHNNError as exc:
        raise TrainingError(str(exc), state.outer_count, "final", exc) from exc
    return TrainReport(params, state.history, termination, state.outer_count, change,
                       solve_checks, state.tau, final)
