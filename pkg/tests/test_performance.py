"""Scaling smoke tests backing the complexity contracts (trend checks only)."""

import random
import time

from msetcp.mset import MultisetOrdering, SortedMultisetOrdering
from msetcp.store import Inconsistent, Store


def _instance(n: int, seed: int, num_values: int = 4):
    rng = random.Random(seed)
    s = Store()
    mk = lambda: s.new_var(range(rng.randrange(num_values), num_values))
    xs = [mk() for _ in range(n)]
    ys = [mk() for _ in range(n)]
    return s, xs, ys


def _best_time(n: int, factory, trials: int = 5) -> float:
    import gc

    best = float("inf")
    for t in range(trials):
        s, xs, ys = _instance(n, seed=t)
        p = factory(xs, ys)
        gc.collect()
        gc.disable()  # keep collector pauses out of the trend measurement
        try:
            t0 = time.perf_counter()
            try:
                p.post(s)
            except Inconsistent:
                pass
            best = min(best, time.perf_counter() - t0)
        finally:
            gc.enable()
    return best


def test_occurrence_filter_subquadratic_trend():
    t3 = _best_time(1_000, MultisetOrdering)
    t4 = _best_time(10_000, MultisetOrdering)
    t5 = _best_time(100_000, MultisetOrdering)
    assert t4 / t3 < 20.0, (t3, t4)
    assert t5 / t4 < 20.0, (t4, t5)


def test_sorted_variant_init_scales_like_sorting():
    # the contract is O(n log n) dominated by the sort, so a decade of n may
    # cost at most a small multiple over linear growth
    t4 = _best_time(10_000, SortedMultisetOrdering)
    t5 = _best_time(100_000, SortedMultisetOrdering)
    assert t5 / t4 < 20.0, (t4, t5)


def test_incremental_update_cost_independent_of_value_range():
    # count maintenance is two cell updates regardless of how wide the range is
    s = Store()
    xs = [s.new_var(range(0, 1000, 7)) for _ in range(50)]
    ys = [s.new_var(range(3, 1000, 11)) for _ in range(50)]
    p = MultisetOrdering(xs, ys)
    p.post(s)
    before = list(p.xmin_counts)
    s.set_min(xs[0], s.values(xs[0])[1])
    changed = sum(1 for a, b in zip(before, p.xmin_counts) if a != b)
    assert changed == 2
