"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from taperbeam import _core
from taperbeam.model import BeamConfig
from taperbeam.pinn import PinnObjective, glorot_init
from taperbeam.solution import CollocationGrid


def cases():
    x = np.linspace(0.0, 1.0, 100)
    sizes = (1, 5, 5, 5, 1)
    theta = glorot_init(sizes, 42)
    cfg = BeamConfig(alpha=0.3, n_holes=4, gamma=1.0, kp=10.0, q0=10.0)
    obj = PinnObjective(cfg, CollocationGrid.uniform(100), sizes)
    loss_args = (theta, sizes, obj.x, obj.c2, obj.c3, obj.c4, obj.rhs, obj.probe_x, obj.probe_order, obj.probe_weight)
    return {
        "cheb_basis(100 pts, order 15)": lambda k: k.cheb_basis(x, 15),
        "mlp_forward_jet(100 pts)": lambda k: k.mlp_forward_jet(theta, sizes, x),
        "pinn_loss_grad(100 pts)": lambda k: k.pinn_loss_grad(*loss_args),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = [_core.fallback] + ([_core.compiled] if _core.compiled is not None else [])
    if _core.compiled is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':34s}" + "".join(f"{k.NAME:>14s}" for k in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases().items():
        times = []
        for k in backends:
            t = timeit.Timer(lambda: fn(k))
            n, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, n)) / n)
        row = f"{name:34s}" + "".join(f"{t * 1e6:11.1f} us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
