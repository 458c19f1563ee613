"""Throughput comparison of the compiled and pure-Python kernels.

Runs the same workloads through both backends (same seeds, so the outputs
are verified identical along the way) and reports steps per second.

    python3 benchmarks/bench_backends.py [--measurements N] [--series N]
"""

import argparse
import time
from math import pi

import numpy as np

from zenosim import _pykernel

try:
    from zenosim import _ckernel
except ImportError:
    _ckernel = None

# lab-like parameters: lambda_on/off and threshold from the default
# detector, dephasing at the calibrated bench rate
ZENO_ARGS = dict(omega=(pi / 2) / 0.0049, tau=0.0049, delta=0.0, phase=0.0,
                 probe_duration=0.002, lam_on=8.0, lam_off=0.215, k_th=2,
                 gamma_phi=8.384140104524757, eps_z=0.02, f_prep=0.05,
                 sink_zeeman=False, reprepare=False)
FRAC_ARGS = dict(omega=(pi / 9) / 0.0029, tau=0.0029, delta=0.0, phase=0.0,
                 probe_intermediate=True, intermission=0.003,
                 probe_duration=0.003, lam_on=8.0, lam_off=0.215, k_th=2,
                 gamma_phi=8.384140104524757, eps_z=0.02, f_prep=0.05,
                 sink_zeeman=False)


def stream(seed):
    return np.random.PCG64(np.random.SeedSequence(seed))


def bench_zeno(kernel, n):
    start = time.perf_counter()
    counts, bits, manifolds = kernel.zeno_trajectory(
        stream(7), n_measurements=n, **ZENO_ARGS)
    elapsed = time.perf_counter() - start
    return elapsed, n, bits


def bench_fractionated(kernel, n_series):
    start = time.perf_counter()
    tail = None
    for i in range(n_series):
        ok, bits = kernel.fractionated_series(stream(i), n_pulses=9,
                                              **FRAC_ARGS)
        tail = bits
    elapsed = time.perf_counter() - start
    return elapsed, n_series * 9, tail


def report(name, runner, arg):
    rows = []
    for label, kernel in (("pure-python", _pykernel),
                          ("compiled", _ckernel)):
        if kernel is None:
            print(f"{name:>14s}  {label:>12s}  (extension not built)")
            continue
        elapsed, units, sample = runner(kernel, arg)
        rows.append((label, elapsed, units, sample))
        print(f"{name:>14s}  {label:>12s}  {elapsed * 1e3:9.1f} ms  "
              f"{units / elapsed:12.0f} steps/s")
    if len(rows) == 2:
        if not np.array_equal(rows[0][3], rows[1][3]):
            raise SystemExit("backends disagree; benchmark numbers are "
                             "meaningless")
        print(f"{'':>14s}  {'speedup':>12s}  {rows[0][1] / rows[1][1]:9.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--measurements", type=int, default=200000,
                        help="probe steps in the alternating-drive workload")
    parser.add_argument("--series", type=int, default=20000,
                        help="series in the fragmented-pulse workload")
    args = parser.parse_args()
    report("alternating", bench_zeno, args.measurements)
    report("fractionated", bench_fractionated, args.series)


if __name__ == "__main__":
    main()
