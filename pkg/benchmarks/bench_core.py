"""Time the compiled core against the numpy fallback.

    python benchmarks/bench_core.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from airykit import _fallback
from airykit.airyfun import HAVE_CORE, airy
from airykit.simulate import LppEnvironment


def bench(label, fn, repeat):
    t = min(timeit.repeat(fn, number=1, repeat=repeat))
    print("%-34s %10.3f ms" % (label, 1e3 * t))
    return t


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_CORE:
        print("compiled core not built; only the fallback timings are shown")
    else:
        from airykit import _core

    x = np.linspace(-12, 8, 200001)
    xs = np.linspace(-8, 6, 400)
    box = LppEnvironment(400, 0.5, 0)
    line = LppEnvironment(400, 0.5, 0, shape="line")
    np_airy = lambda z: airy(z, backend="numpy")

    rows = [("airy, 2e5 points", lambda: airy(x, backend="core"), lambda: np_airy(x)),
            ("airy kernel matrix 400x400",
             lambda: _core.airy_kernel_matrix(xs, xs),
             lambda: _fallback.airy_kernel_matrix(xs, xs, np_airy)),
            ("LPP point-to-point N=400",
             lambda: _core.lpp_point(box.weights), lambda: _fallback.lpp_point(box.weights)),
            ("LPP point-to-line N=400",
             lambda: _core.lpp_line(line.weights, 400), lambda: _fallback.lpp_line(line.weights, 400))]
    for label, core_fn, fb_fn in rows:
        tf = bench(label + " (numpy)", fb_fn, args.repeat)
        if HAVE_CORE:
            tc = bench(label + " (core)", core_fn, args.repeat)
            print("%-34s %10.1fx" % ("  speed-up", tf / tc))


if __name__ == "__main__":
    main()
