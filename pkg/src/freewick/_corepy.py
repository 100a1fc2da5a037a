"""Pure-Python twins of the compiled counting kernels.

Same algorithms as ``freewick._core`` (the Cython extension), selected at
import time by :mod:`freewick._kernels` when the extension is unavailable.
Expect roughly two orders of magnitude less throughput on the larger
inputs; see ``benchmarks/bench_kernels.py``.
"""

BACKEND = "python"


def count_set_partitions(n: int) -> tuple[int, int]:
    """Count set partitions of {1..n} and the non-crossing ones among them.

    Enumerates every restricted growth string of length ``n`` (one per set
    partition of an ordered ground set) and applies a stack-based crossing
    test to each.  Returns ``(total, noncrossing)``.

    A partition is crossing exactly when some block label recurs while it is
    not the innermost still-open block of the scan, so the filter below is a
    direct transcription of the x1 < y1 < x2 < y2 condition.
    """
    if n < 1:
        raise ValueError("ground-set size must be positive")
    a = [0] * n        # a[i]: block label of element i+1
    pmax = [0] * n     # prefix maxima of a
    last = [0] * n     # last occurrence of each label in the current string
    stack = [0] * n
    total = 0
    noncrossing = 0
    while True:
        total += 1

        for i in range(n):
            last[a[i]] = i
        depth = 0
        seen_max = -1
        ok = True
        for i in range(n):
            lab = a[i]
            if lab > seen_max:
                seen_max = lab
                stack[depth] = lab
                depth += 1
            elif stack[depth - 1] != lab:
                ok = False
                break
            if last[lab] == i:
                depth -= 1
        if ok:
            noncrossing += 1

        # next restricted growth string (lexicographic successor)
        i = n - 1
        while i > 0 and a[i] > pmax[i - 1]:
            i -= 1
        if i == 0:
            return total, noncrossing
        a[i] += 1
        pmax[i] = a[i] if a[i] > pmax[i - 1] else pmax[i - 1]
        for j in range(i + 1, n):
            a[j] = 0
            pmax[j] = pmax[i]
