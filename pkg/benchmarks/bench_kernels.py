"""Timings for the two counting kernels, pure Python against compiled.

Both backends expose the same flat-array entry points, so each workload is
built once and handed to each in turn; the counts must agree before a
timing is reported.  Workloads mirror real call sites: the two halves of
an exhaustive probability computation (slot evaluation and rank checking
over every point of GF(q)^mu) plus a seeded Monte Carlo run.

Run from a checkout or an installed tree:

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

from nckit._kernel import field_arrays, pure
from nckit.gf import field
from nckit.network import VariableRegistry, load_fixture
from nckit.prob import (
    _net_program,
    _slot_program,
    default_fixing,
    reduced_success_poly,
    success_poly,
)

try:
    from nckit._kernel import _ckernel
except ImportError:
    _ckernel = None


def slot_workload():
    net = load_fixture("example1")
    registry = VariableRegistry(net)
    spec = field(2, 2)
    fixing = default_fixing(net, registry)
    p_hat = reduced_success_poly(
        success_poly(net, registry, fixing, spec), spec.order, fixing.random_vars
    )
    program = _slot_program(p_hat, registry, fixing)
    exp, log, _, _ = field_arrays(spec)
    args = (spec.order, spec.p, spec.k, exp, log, fixing.mu, *program)
    points = spec.order**fixing.mu
    return f"slot sweep    example1 GF(4)  {points} pts", "count_nonzero_slots", args


def rank_workload():
    net = load_fixture("example1")
    registry = VariableRegistry(net)
    spec = field(2, 2)
    fixing = default_fixing(net, registry)
    program = _net_program(net, registry, fixing, spec)
    exp, log, inv, neg = field_arrays(spec)
    args = (
        spec.order, spec.p, spec.k, exp, log, inv, neg,
        fixing.mu, net.h, net.num_edges, *program, 0, 0, 0,
    )
    points = spec.order**fixing.mu
    return f"rank sweep    example1 GF(4)  {points} pts", "count_rank_success", args


def trial_workload(trials: int = 20000):
    net = load_fixture("example2")
    registry = VariableRegistry(net)
    spec = field(2, 4)
    fixing = default_fixing(net, registry)
    program = _net_program(net, registry, fixing, spec)
    exp, log, inv, neg = field_arrays(spec)
    args = (
        spec.order, spec.p, spec.k, exp, log, inv, neg,
        fixing.mu, net.h, net.num_edges, *program, 1, trials, 20240917,
    )
    return f"seeded trials example2 GF(16) {trials} trials", "count_rank_success", args


def best_time(fn, args, repeat: int) -> tuple[float, int]:
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="best-of-N timing")
    opts = parser.parse_args()

    if _ckernel is None:
        print("compiled kernel not built; timing the pure backend only")

    workloads = [slot_workload(), rank_workload(), trial_workload()]
    header = f"{'workload':<44} {'pure':>9} {'compiled':>9} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, entry, args in workloads:
        pure_s, pure_count = best_time(getattr(pure, entry), args, opts.repeat)
        if _ckernel is None:
            print(f"{label:<44} {pure_s:>8.3f}s {'-':>9} {'-':>8}")
            continue
        fast_s, fast_count = best_time(getattr(_ckernel, entry), args, opts.repeat)
        if fast_count != pure_count:
            raise AssertionError(
                f"backend disagreement on {label}: {pure_count} != {fast_count}"
            )
        print(
            f"{label:<44} {pure_s:>8.3f}s {fast_s:>8.3f}s {pure_s / fast_s:>7.1f}x"
        )


if __name__ == "__main__":
    main()
