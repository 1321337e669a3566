"""Hardware capability probe.

Core counts lie in shared or virtualized environments: a container can
report N CPUs that deliver one core's worth of cycles.  The scaling
benchmarks gate on measured parallel efficiency, not on os.cpu_count().
"""
from __future__ import annotations

import multiprocessing as mp
import os
import time

_CACHE: dict = {}


def _burn(n: int, out) -> None:
    acc = 0
    for i in range(n):
        acc += i * i
    out.put(acc)


def measured_parallelism(workers: int = 2, work: int = 6_000_000) -> float:
    """Observed speedup of `workers` independent processes vs one.

    ~1.0 means no usable hardware parallelism regardless of cpu_count;
    values near `workers` mean the cores are real.
    """
    key = (workers, work)
    if key in _CACHE:
        return _CACHE[key]
    queue = mp.Queue()
    start = time.perf_counter()
    _burn(work, queue)
    queue.get()
    single = time.perf_counter() - start

    procs = [mp.Process(target=_burn, args=(work, queue)) for _ in range(workers)]
    start = time.perf_counter()
    for p in procs:
        p.start()
    for _ in procs:
        queue.get()
    wall = time.perf_counter() - start
    for p in procs:
        p.join()
    speedup = single * workers / wall
    _CACHE[key] = speedup
    return speedup


def capable_of(threads: int) -> bool:
    """True when the machine exposes `threads` CPUs that actually run in
    parallel (measured, not claimed)."""
    if (os.cpu_count() or 1) < threads:
        return False
    probe = min(threads, 4)
    return measured_parallelism(workers=probe) >= 0.7 * probe
