"""Compiled vs numpy element kernels at preset sizes.

    python benchmarks/bench_kernels.py [--repeat 20] [--train]

Times ``moment_matrix`` and ``residual_moments`` (with gradient) for both
backends, checks they agree, and with ``--train`` also times 3 outer
iterations of poisson_hom_sigmoid and helmholtz_hom_16pi_sigmoid under
each backend.
"""

import argparse
import time

import numpy as np

from dhnn import kernels
from dhnn.config import load_preset
from dhnn.experiment import build_setup, random_network
from dhnn.loss import HybridLoss
from dhnn.network import Activation
from dhnn.trainer import initialize, train

SIZES = [("poisson N=4 n=10", "poisson_hom_sigmoid"),
         ("helmholtz N=40 n=14", "helmholtz_hom_16pi_sigmoid"),
         ("helmholtz N=60 n=20", "helmholtz_hom_32pi_tanh")]


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_kernels(repeat):
    if kernels.compiled_backend is None:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    print(f"{'case':<22}{'kernel':<18}{'numpy [ms]':>12}{'compiled [ms]':>15}{'speedup':>9}"
          f"{'max diff':>11}")
    for label, preset in SIZES:
        cfg = load_preset(preset)
        s = build_setup(cfg)
        loss = HybridLoss(s.problem, s.mesh, s.basis, s.rule)
        p = random_network(rng, cfg.n_elements, cfg.width, cfg.activation)
        code = Activation(cfg.activation).code
        args_m = (code, loss.kappa, p.W, p.b, loss.xq, loss.phiw)
        args_r = (code, loss.kappa, p.W, p.b, p.c, loss.xq, loss.phiw, loss.fmom, True)
        for name, args in (("moment_matrix", args_m), ("residual_moments", args_r)):
            fpy = getattr(kernels.python_backend, name)
            t_py = _best(lambda: fpy(*args), repeat)
            if kernels.compiled_backend is None:
                print(f"{label:<22}{name:<18}{t_py * 1e3:12.3f}{'-':>15}{'-':>9}{'-':>11}")
                continue
            fc = getattr(kernels.compiled_backend, name)
            t_c = _best(lambda: fc(*args), repeat)
            a, b = fpy(*args), fc(*args)
            a = a if isinstance(a, tuple) else (a,)
            b = b if isinstance(b, tuple) else (b,)
            diff = max(float(np.max(np.abs(x - y)) / max(1.0, np.max(np.abs(x))))
                       for x, y in zip(a, b))
            print(f"{label:<22}{name:<18}{t_py * 1e3:12.3f}{t_c * 1e3:15.3f}"
                  f"{t_py / t_c:9.1f}{diff:11.1e}")


def bench_training(outer=3):
    print(f"\n{'preset':<30}{'numpy [s]':>11}{'compiled [s]':>14}")
    for preset in ("poisson_hom_sigmoid", "helmholtz_hom_16pi_sigmoid"):
        cfg = load_preset(preset)
        tc = cfg.train.__class__(**{**cfg.train.__dict__, "max_outer": outer})
        row = []
        for backend in (kernels.python_backend, kernels.compiled_backend):
            if backend is None:
                row.append(float("nan"))
                continue
            saved = kernels.moment_matrix, kernels.residual_moments
            kernels.moment_matrix, kernels.residual_moments = (backend.moment_matrix,
                                                               backend.residual_moments)
            try:
                s = build_setup(cfg)
                state = initialize(tc, s.mesh, cfg.width, cfg.activation)
                t = time.perf_counter()
                train(tc, s.problem, s.mesh, s.basis, s.rule, cfg.width, cfg.activation,
                      state=state)
                row.append(time.perf_counter() - t)
            finally:
                kernels.moment_matrix, kernels.residual_moments = saved
        print(f"{preset:<30}{row[0]:11.3f}{row[1]:14.3f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--train", action="store_true")
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    bench_kernels(args.repeat)
    if args.train:
        bench_training()


if __name__ == "__main__":
    main()
