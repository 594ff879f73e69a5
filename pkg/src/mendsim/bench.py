"""Backend benchmark: times the two measurement kernels on identical inputs.

Run as `python -m mendsim.bench`.  Reports wall time per backend and the
largest absolute difference between their outputs, which should sit at the
rounding-noise level.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from . import backend
from .estimation import mub_coefficients
from .phase_space import TwoParamQutrit


def _time_backend(name: str, u: np.ndarray, phis: np.ndarray,
                  coef: tuple[float, float], grid_size: int):
    kern = backend.kernels(name)
    a = 2.0 ** -0.5
    b = a * math.sqrt(1.0 - a * a)
    step = math.pi / 8.0
    warm = u[:2]
    kern.parity_curve(warm, phis[:2], b, 3, step, grid_size)
    kern.mub_curve(warm, phis[:2], coef[0], coef[1], grid_size)
    start = time.perf_counter()
    parity = kern.parity_curve(u, phis, b, 3, step, grid_size)
    mub = kern.mub_curve(u, phis, coef[0], coef[1], grid_size)
    elapsed = time.perf_counter() - start
    return elapsed, parity, mub


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m mendsim.bench")
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--copies", type=int, default=20)
    parser.add_argument("--grid-size", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    u = rng.random((args.trials, args.copies))
    phis = rng.uniform(0.0, 2.0 * math.pi, args.trials)
    params = TwoParamQutrit.from_cos2_alpha(4.0 / 15.0, math.pi / 4.0)
    coef = mub_coefficients(params.amps)

    threads = backend.configure_threads()
    print(f"trials={args.trials} copies={args.copies} grid={args.grid_size} threads={threads}")

    results = {}
    for name in ("numpy", "numba"):
        try:
            elapsed, parity, mub = _time_backend(name, u, phis, coef, args.grid_size)
        except backend.BackendError as exc:
            print(f"{name}: unavailable ({exc})")
            continue
        results[name] = (parity, mub)
        print(f"{name}: {elapsed:.3f} s")
    if len(results) == 2:
        diff = max(
            float(np.max(np.abs(results["numpy"][0] - results["numba"][0]))),
            float(np.max(np.abs(results["numpy"][1] - results["numba"][1]))),
        )
        print(f"max |difference| between backends: {diff:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
