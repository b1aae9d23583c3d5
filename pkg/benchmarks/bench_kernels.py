"""Time the compiled and pure-Python kernels on solver-sized inputs.

    python benchmarks/bench_kernels.py [--nx 512] [--nv 512] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from kinvar import kernels
from kinvar.flux import make_flux
from kinvar.reference import flux_samples


def cases(nx, nv, seed=0):
    rng = np.random.default_rng(seed)
    # transported kinetic columns: monotone plus small upwind perturbations
    Y = np.sort(rng.random((nx, nv)), axis=1)
    Y += 0.05 * rng.normal(size=Y.shape)
    state = np.sort(rng.choice(np.linspace(0, 1, 5), size=(nx, nv)), axis=1)
    g = rng.normal(size=(nx, nv))
    tau = np.full(nx, 1e-12)
    f = make_flux("burgers")
    ul, ur = rng.random(4 * nx), rng.random(4 * nx)
    sv, sf = flux_samples(f)
    return {
        "pava_rows": (Y,),
        "tangent_rows": (state, g, tau),
        "godunov_flux": (ul, ur, f.eval(ul), f.eval(ur), sv, sf),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nx", type=int, default=512)
    p.add_argument("--nv", type=int, default=512)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    inputs = cases(args.nx, args.nv)
    print(f"grid {args.nx} x {args.nv}, best of {args.repeat}; backends: {', '.join(backends)}")
    print(f"{'kernel':<14}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, a in inputs.items():
        best = {}
        for b, mod in backends.items():
            fn = getattr(mod, name)
            best[b] = min(timeit.repeat(lambda: fn(*a), number=1, repeat=args.repeat))
        speed = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{name:<14}" + "".join(f"{best[b] * 1e3:>10.2f}ms" for b in backends)
              + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
