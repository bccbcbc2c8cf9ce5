#!/usr/bin/env python3
"""Benchmark: compiled kernel vs pure-Python fallback on the hot loops.

Usage: python3 bench/bench_backends.py [limit]

Runs the same orbit-membership sweep and preimage-depth sweep through both
kernels and reports wall times and the speedup.  Results must be identical;
the script asserts that.
"""

import sys
import time

from critorbit import _purekernel
from critorbit.density import _primes_list, orbit_prefix
from critorbit.parsing import parse_poly

try:
    from critorbit import _kernel
except ImportError:
    _kernel = None


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main():
    limit = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    primes = list(_primes_list(limit))
    f = parse_poly("x^2 + 3")
    pre = orbit_prefix(f, None, 1)
    args = (list(f.coeffs), None, pre.pairs, pre.start_index, pre.start_value, primes, False)

    print(f"primes <= {limit}: {len(primes)}")
    pure_members, t_pure = timed(_purekernel.orbit_member_batch, *args)
    print(f"orbit membership  pure    {t_pure:8.3f}s  ({pure_members[0]} members)")
    if _kernel is not None:
        fast_members, t_fast = timed(_kernel.orbit_member_batch, *args)
        assert fast_members[0] == pure_members[0]
        print(f"orbit membership  cython  {t_fast:8.3f}s  (x{t_pure / t_fast:.1f} speedup)")

    odd = [p for p in primes if p > 2][: min(len(primes), 20_000)]
    pure_d, t_pure = timed(_purekernel.preimage_depth_batch, 0, 1, 6, odd)
    print(f"preimage depth 6  pure    {t_pure:8.3f}s")
    if _kernel is not None:
        fast_d, t_fast = timed(_kernel.preimage_depth_batch, 0, 1, 6, odd)
        assert fast_d == pure_d
        print(f"preimage depth 6  cython  {t_fast:8.3f}s  (x{t_pure / t_fast:.1f} speedup)")
    if _kernel is None:
        print("compiled kernel not available; only the fallback was timed")


if __name__ == "__main__":
    main()
