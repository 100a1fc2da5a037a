# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels for the brute-force partition oracles.

Keep this module's surface identical to :mod:`freewick._corepy`; the
dispatcher in :mod:`freewick._kernels` treats the two as interchangeable.
"""

from libc.stdlib cimport free, malloc

BACKEND = "compiled"


def count_set_partitions(int n):
    """Count set partitions of {1..n} and the non-crossing ones among them.

    Enumerates every restricted growth string of length ``n`` and applies a
    stack-based crossing test to each.  Returns ``(total, noncrossing)``.
    """
    if n < 1:
        raise ValueError("ground-set size must be positive")

    cdef int *a = <int *> malloc(4 * n * sizeof(int))
    if a == NULL:
        raise MemoryError()
    cdef int *pmax = a + n
    cdef int *last = a + 2 * n
    cdef int *stack = a + 3 * n

    cdef long long total = 0
    cdef long long noncrossing = 0
    cdef int i, j, lab, depth, seen_max
    cdef bint ok

    for i in range(n):
        a[i] = 0
        pmax[i] = 0

    try:
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
    finally:
        free(a)
