"""Command-line front end.

    dhnn run --config poisson_hom_sigmoid [--output-dir DIR] [--max-outer K]
    dhnn check-gradients --config helmholtz_hom_16pi_sigmoid [--draws 20]
    dhnn list-presets

``--config`` takes a file path or the name of a shipped preset.  Exit
status: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import dataclasses
import logging
import sys

from .config import list_presets, preset_path, resolve_config
from .errors import ConfigError, DHNNError
from .experiment import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, run_experiment
from .gradcheck import check_config

GRAD_TOL = 1e-5


def _cmd_run(args):
    cfg = resolve_config(args.config)
    if args.dump_system:
        cfg = dataclasses.replace(cfg, dump_system=True)
    res = run_experiment(cfg, args.output_dir, args.max_outer)
    if res.status != EXIT_OK:
        print(f"run failed: {res.message}", file=sys.stderr)
        return res.status
    rep = res.report
    print(f"{cfg.name}: {rep.termination} after {rep.outer_iterations} outer iterations "
          f"in {res.wall_time:.2f} s")
    print(f"final loss {rep.final_loss.total:.6e}")
    if res.errors is not None:
        print(f"max error {res.errors.max_error:.6e}, relative L2 {res.errors.rel_l2:.6e}")
    print(f"artifacts in {res.output_dir}")
    return EXIT_OK


def _cmd_check(args):
    cfg = resolve_config(args.config)
    r = check_config(cfg, draws=args.draws, step=args.step, seed=args.seed, cap=args.cap)
    ok = r.worst <= args.tol
    print(f"{r.name}: {r.draws} draws, {r.checked}/{r.n_params} coordinates per draw; "
          f"max rel. deviation nonlinear {r.max_dev_nonlinear:.3e}, all {r.max_dev_all:.3e} "
          f"-> {'PASS' if ok else 'FAIL'} (tol {args.tol:g})")
    return EXIT_OK if ok else EXIT_NUMERICAL


def _cmd_list(args):
    for name in list_presets():
        print(f"{name}\t{preset_path(name)}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="dhnn", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log each outer iteration")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="train one configured experiment")
    r.add_argument("--config", required=True, help="config file or preset name")
    r.add_argument("--output-dir", default=None)
    r.add_argument("--max-outer", type=int, default=None, help="override train.max_outer")
    r.add_argument("--dump-system", action="store_true",
                   help="also write the final linear system (system.mtx)")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("check-gradients", help="finite-difference gradient audit")
    c.add_argument("--config", required=True)
    c.add_argument("--draws", type=int, default=20)
    c.add_argument("--step", type=float, default=1e-6)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cap", type=int, default=160,
                   help="max coordinates differenced per draw")
    c.add_argument("--tol", type=float, default=GRAD_TOL)
    c.set_defaults(func=_cmd_check)

    ls = sub.add_parser("list-presets", help="print shipped experiment configs")
    ls.set_defaults(func=_cmd_list)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DHNNError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
