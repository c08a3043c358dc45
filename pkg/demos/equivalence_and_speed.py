#!/usr/bin/env python3
# Compare all four ways of answering "does the pattern occur?" and contrast
# the step counts: the naive matcher re-scans after every mismatch, the
# specialized program never does.

from miniscp import (
    Call, eval_call, kmp_search, naive_outcome, residualize,
    specialize_pattern, word,
)

pattern = "aaab"
graph, _ = specialize_pattern(pattern)
rp = residualize(graph)

print(f"pattern {pattern!r}, residual entry {rp.entry}")
print()
print(f"{'string':<16} {'contains':>8} {'oracle':>7} {'naive':>12} "
      f"{'residual':>12}")
for y in ("aaab", "aabaaab", "ab" * 6, "a" * 12, "baaa" * 3):
    brute = pattern in y
    oracle, _ = kmp_search(pattern, y)
    naive = naive_outcome(pattern, y)
    res = eval_call(rp.program, Call(rp.entry, (word(y),)))
    print(f"{y:<16} {str(brute):>8} {str(oracle):>7} "
          f"{str(naive.value):>7} {naive.steps:>4} "
          f"{str(res.value):>7} {res.steps:>4}")

# On the all-'a' family the naive matcher walks the whole failed attempt
# again from the next position: its step count grows with |pattern| * |y|,
# while the residual stays within 2|y| + |pattern| + 2.
print()
print(f"{'|y|':>6} {'naive steps':>12} {'residual steps':>15} {'bound':>7}")
for m in (25, 50, 100, 200, 400):
    y = "a" * m
    naive = naive_outcome(pattern, y)
    res = eval_call(rp.program, Call(rp.entry, (word(y),)))
    bound = 2 * m + len(pattern) + 2
    assert res.steps <= bound
    print(f"{m:>6} {naive.steps:>12} {res.steps:>15} {bound:>7}")
