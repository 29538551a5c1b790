"""Run one configured experiment end to end and write its artifacts.

Files written to the output directory:

    loss_history.csv   one row per outer solve and per inner step
    solution.csv       u_NN and the exact solution on a uniform grid
    summary.txt        final losses, errors, termination, timing
    plot_results.py    matplotlib script over the two CSVs
    params.csv         trained parameters (optional)
    system.mtx         final assembled linear system (optional)
"""

import dataclasses
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .basis import TestBasis
from .dg import assemble, write_system
from .errors import DHNNError, UnsupportedOperation
from .loss import HybridLoss
from .mesh import build_uniform_mesh
from .network import NetworkParams, network_eval, save_params_csv
from .problems import continuous_coefficients, make_experiment, manufactured_problem, network_function
from .quadrature import gauss_legendre
from .trainer import initialize, train

log = logging.getLogger(__name__)

HISTORY_COLUMNS = ("outer_index", "inner_index", "global_step", "phase",
                   "L_r", "L_b", "L_int", "tau", "total")
SOLUTION_COLUMNS = ("x", "re_u", "im_u", "re_exact", "im_exact", "abs_error")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


@dataclass
class ErrorReport:
    max_error: float
    rel_l2: float
    x: np.ndarray
    errors: np.ndarray


@dataclass
class Setup:
    problem: object
    mesh: object
    basis: object
    rule: object
    state: object = None  # pre-built TrainState (manufactured problems)


@dataclass
class RunResult:
    status: int
    report: object
    errors: object
    wall_time: float
    output_dir: Path
    message: str = ""


def random_network(rng, n_elements, width, activation, w_scale=4.0):
    """Network drawn for manufactured problems; W spans a few element scales."""
    return NetworkParams(
        rng.uniform(-w_scale, w_scale, (n_elements, width)),
        rng.uniform(-1.0, 1.0, (n_elements, width)),
        rng.normal(size=(n_elements, width)) + 1j * rng.normal(size=(n_elements, width)),
        activation,
    )


def build_setup(cfg):
    mesh = build_uniform_mesh((0.0, 1.0), cfg.n_elements)
    rule = gauss_legendre(cfg.quadrature_order)
    basis = TestBasis(mesh, cfg.test_functions)
    if cfg.problem == "manufactured":
        rng = np.random.default_rng(cfg.seed)
        truth = random_network(rng, cfg.n_elements, cfg.width, cfg.activation)
        truth.c[...] = continuous_coefficients(truth.W, truth.b, mesh, cfg.activation, rng)
        prob = manufactured_problem(truth, mesh, cfg.kind, cfg.omega)
        # start from the generating (W, b) so the solution lies in the trial space
        state = initialize(cfg.train, mesh, cfg.width, cfg.activation)
        state.params.W[...] = truth.W
        state.params.b[...] = truth.b
        return Setup(prob, mesh, basis, rule, state)
    prob = make_experiment(cfg.problem, cfg.omega)
    return Setup(prob, mesh, basis, rule)


def evaluate_error(params, prob, mesh, grid_size=1001):
    """Pointwise |u_NN - u| on a uniform grid; interior nodes use the left element."""
    if prob.exact is None:
        raise UnsupportedOperation("problem has no exact solution to compare against")
    if grid_size < 2:
        raise UnsupportedOperation("grid needs at least two points")
    a, b = mesh.domain
    x = np.linspace(a, b, int(grid_size))
    u = network_function(params, mesh)(x)
    err = np.abs(u - np.asarray(prob.exact(x)))
    norm = np.linalg.norm(np.asarray(prob.exact(x)))
    rel = float(np.linalg.norm(err) / norm) if norm > 0 else float("nan")
    return ErrorReport(float(np.max(err)), rel, x, err)


def _fmt(v):
    return format(float(v), ".17g")


def history_line(row):
    loss = row.loss
    return ",".join([str(row.outer_index), str(row.inner_index), str(row.global_step), row.phase,
                     _fmt(loss.residual), _fmt(loss.boundary), _fmt(loss.interface),
                     _fmt(loss.tau), _fmt(loss.total)])


def write_history(history, path):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(HISTORY_COLUMNS) + "\n")
        for row in history:
            fh.write(history_line(row) + "\n")


def read_history(path):
    """Parse loss_history.csv back into plain dicts (floats exact via repr)."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            vals = line.strip().split(",")
            rec = dict(zip(header, vals))
            for k in ("outer_index", "inner_index", "global_step"):
                rec[k] = int(rec[k])
            for k in ("L_r", "L_b", "L_int", "tau", "total"):
                rec[k] = float(rec[k])
            rows.append(rec)
    return rows


def write_solution(params, prob, mesh, grid_size, path):
    a, b = mesh.domain
    x = np.linspace(a, b, int(grid_size))
    u = network_function(params, mesh)(x)
    exact = (np.asarray(prob.exact(x), dtype=complex) if prob.exact is not None
             else np.full(x.shape, np.nan + 0j))
    err = np.abs(u - exact)
    with open(path, "w") as fh:
        fh.write(",".join(SOLUTION_COLUMNS) + "\n")
        for row in zip(x, u.real, u.imag, exact.real, exact.imag, err):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def node_jumps(params, mesh):
    """|[[u]]| and |[[u']]| at each interior node (the method is discontinuous)."""
    out = []
    for i in range(1, mesh.n_elements):
        x = mesh.nodes[i]
        ju = network_eval(params, mesh, i - 1, x, 0) - network_eval(params, mesh, i, x, 0)
        jd = network_eval(params, mesh, i - 1, x, 1) - network_eval(params, mesh, i, x, 1)
        out.append((i, float(x), float(abs(ju)), float(abs(jd))))
    return out


PLOT_SCRIPT = '''"""Plot loss curves and pointwise errors from a run directory.

    python plot_results.py [run_dir]
"""
import csv
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

run = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent


def read(name):
    with open(run / name) as fh:
        return list(csv.DictReader(fh))


hist = read("loss_history.csv")
sol = read("solution.csv")
inner = [r for r in hist if r["phase"] == "inner"]
outer = [r for r in hist if r["phase"] == "outer"]

fig, ax = plt.subplots(1, 3, figsize=(14, 4))
ax[0].semilogy([int(r["global_step"]) for r in inner], [float(r["total"]) for r in inner])
ax[0].set_xlabel("inner iteration")
ax[0].set_ylabel("loss")
ax[1].semilogy([int(r["outer_index"]) for r in outer], [float(r["total"]) for r in outer], "o-")
ax[1].set_xlabel("outer iteration")
x = [float(r["x"]) for r in sol]
ax[2].semilogy(x, [max(float(r["abs_error"]), 1e-300) for r in sol])
ax[2].set_xlabel("x")
ax[2].set_ylabel("|u - u_exact|")
fig.tight_layout()
fig.savefig(run / "results.png", dpi=150)
print("wrote", run / "results.png")
'''


def _summary(cfg, setup, report, errors, wall, message, jumps):
    lines = [f"experiment: {cfg.name or cfg.problem}",
             f"problem: {cfg.problem} ({setup.problem.kind}), omega = {cfg.omega:.17g}",
             f"mesh: N = {cfg.n_elements}, width n = {cfg.width}, activation = {cfg.activation}",
             f"test functions M = {cfg.test_functions}, quadrature order = {cfg.quadrature_order}",
             f"kernel backend: {kernels.BACKEND}",
             f"wall time [s]: {wall:.3f}"]
    if message:
        lines.append(f"status: FAILED - {message}")
    if report is not None:
        hist = report.history
        first = hist[0].loss.total if hist else float("nan")
        best = min((r.loss.total for r in hist), default=float("nan"))
        lines += [f"termination: {report.termination}",
                  f"outer iterations: {report.outer_iterations}",
                  f"inner iterations: {sum(r.phase == 'inner' for r in hist)}",
                  f"last max|dPhi|: {report.last_phi_change:.17g}",
                  f"first recorded loss: {first:.17g}",
                  f"min recorded loss: {best:.17g}"]
        if report.final_loss is not None:
            fl = report.final_loss
            lines += [f"final L_r: {fl.residual:.17g}", f"final L_b: {fl.boundary:.17g}",
                      f"final L_int: {fl.interface:.17g}", f"final tau: {fl.tau:.17g}",
                      f"final total: {fl.total:.17g}"]
    if errors is not None:
        lines += [f"max pointwise error: {errors.max_error:.17g}",
                  f"relative L2 error: {errors.rel_l2:.17g}"]
    if jumps:
        lines.append("node jumps (i, x, |[[u]]|, |[[u']]|):")
        lines += [f"  {i} {x:.6g} {ju:.3e} {jd:.3e}" for i, x, ju, jd in jumps]
    return "\n".join(lines) + "\n"


def run_experiment(cfg, output_dir=None, max_outer=None, on_solve=None):
    """Train, evaluate and write artifacts; returns a :class:`RunResult`.

    ``on_solve`` is handed to :func:`train` (called with each assembled system).
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if max_outer is not None:
        cfg = dataclasses.replace(cfg, train=dataclasses.replace(cfg.train, max_outer=max_outer))
    setup = build_setup(cfg)
    history_path = out / "loss_history.csv"
    t0 = time.perf_counter()
    report, errors, message, status = None, None, "", EXIT_OK
    state = setup.state
    if state is None:
        state = initialize(cfg.train, setup.mesh, cfg.width, cfg.activation)
    try:
        report = train(cfg.train, setup.problem, setup.mesh, setup.basis, setup.rule,
                       cfg.width, cfg.activation, state=state, on_solve=on_solve)
    except DHNNError as exc:
        message, status = str(exc), EXIT_NUMERICAL
        log.error("training failed: %s", exc)
    wall = time.perf_counter() - t0
    params = report.params if report is not None else state.params
    write_history(report.history if report is not None else state.history, history_path)
    jumps = []
    if status == EXIT_OK:
        if setup.problem.exact is not None:
            errors = evaluate_error(params, setup.problem, setup.mesh, cfg.grid_size)
        write_solution(params, setup.problem, setup.mesh, cfg.grid_size, out / "solution.csv")
        jumps = node_jumps(params, setup.mesh)
        if cfg.save_params:
            save_params_csv(params, out / "params.csv")
        if cfg.dump_system:
            loss = HybridLoss(setup.problem, setup.mesh, setup.basis, setup.rule)
            write_system(assemble(loss, params, report.tau), out / "system.mtx")
    (out / "plot_results.py").write_text(PLOT_SCRIPT)
    (out / "summary.txt").write_text(_summary(cfg, setup, report, errors, wall, message, jumps))
    return RunResult(status, report, errors, wall, out, message)
