"""Non-crossing set partitions and their marked variants.

This module supplies the combinatorial substrate for the moment-cumulant
sums and the normal-ordering (Wick) expansions: plain non-crossing
partitions, marked non-crossing partitions with the singleton rule, the
admissible family in which no +1 block nests inside another block, and
interval partitions.

Every enumerator has an independent brute-force twin (filtering all set
partitions) so the two routes can be cross-checked; the count-only oracle
for large ground sets dispatches to the compiled kernel when available.

All functions are pure and return immutable values; concurrent use is safe.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from ._kernels import count_set_partitions
from .errors import EnumerationBoundError

#: Enumeration bound for plain non-crossing partitions (Catalan growth).
NC_LIMIT = 14
#: Enumeration bound for marked partitions.
MARKED_LIMIT = 12


@dataclass(frozen=True)
class SetPartition:
    """A set partition of {1..n}, blocks sorted internally and by minimum."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground-set size must be positive")
        seen = [False] * (self.n + 1)
        count = 0
        prev_min = 0
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            if block[0] <= prev_min:
                raise ValueError("blocks must be ordered by strictly increasing minima")
            prev_min = block[0]
            last = 0
            for x in block:
                if not 1 <= x <= self.n:
                    raise ValueError(f"element {x} outside 1..{self.n}")
                if x <= last:
                    raise ValueError("block elements must be strictly increasing")
                if seen[x]:
                    raise ValueError(f"element {x} repeated")
                seen[x] = True
                last = x
                count += 1
        if count != self.n:
            raise ValueError("blocks do not cover the ground set")

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "SetPartition":
        """Build from any iterable of iterables, normalizing the ordering."""
        norm = sorted(tuple(sorted(b)) for b in blocks)
        return cls(n, tuple(norm))

    def labels(self) -> list[int]:
        """Block index of each element, as a list indexed by element-1."""
        lab = [0] * self.n
        for j, block in enumerate(self.blocks):
            for x in block:
                lab[x - 1] = j
        return lab


@dataclass(frozen=True)
class MarkedPartition:
    """A non-crossing partition with a +1/-1 mark per block.

    Singleton blocks always carry mark +1; the marks sequence is aligned
    with the block order of ``partition``.
    """

    partition: SetPartition
    marks: tuple[int, ...]

    def __post_init__(self):
        blocks = self.partition.blocks
        if len(self.marks) != len(blocks):
            raise ValueError("one mark per block required")
        for block, mark in zip(blocks, self.marks):
            if mark not in (1, -1):
                raise ValueError("marks must be +1 or -1")
            if len(block) == 1 and mark != 1:
                raise ValueError("singleton blocks must carry mark +1")
        if not is_noncrossing(self.partition):
            raise ValueError("marked partitions must be non-crossing")

    @property
    def n(self) -> int:
        return self.partition.n

    def plus_blocks(self) -> list[tuple[int, ...]]:
        return [b for b, m in zip(self.partition.blocks, self.marks) if m == 1]


def is_noncrossing(p: SetPartition) -> bool:
    """True iff no x1 < y1 < x2 < y2 exists with x's in one block, y's in another."""
    return _labels_noncrossing(p.labels())


def _labels_noncrossing(lab: list[int]) -> bool:
    # A label may recur only while it is the innermost still-open block.
    n = len(lab)
    last = {}
    for i, v in enumerate(lab):
        last[v] = i
    stack = []
    seen = set()
    for i, v in enumerate(lab):
        if v not in seen:
            seen.add(v)
            stack.append(v)
        elif stack[-1] != v:
            return False
        if last[v] == i:
            stack.pop()
    return True


def _check_bound(n: int, limit: int) -> None:
    if not 1 <= n <= limit:
        raise EnumerationBoundError(f"n={n} outside supported range 1..{limit}")


# ---------------------------------------------------------------------------
# direct enumerators
# ---------------------------------------------------------------------------

def enumerate_nc(n: int) -> list[SetPartition]:
    """All non-crossing partitions of {1..n}, lexicographic in the block tuple."""
    _check_bound(n, NC_LIMIT)
    parts = [
        SetPartition(n, tuple(blocks))
        for blocks in _nc_blocks(tuple(range(1, n + 1)))
    ]
    parts.sort(key=lambda p: p.blocks)
    return parts


def _nc_blocks(elems: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    """Yield the non-crossing partitions of an increasing element tuple.

    Recursion on the block of the first element: its other members split the
    remaining elements into independent gaps, which is exactly the
    non-crossing condition.
    """
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for k in range(len(rest) + 1):
        for chosen in itertools.combinations(range(len(rest)), k):
            block = (first,) + tuple(rest[i] for i in chosen)
            gaps = []
            prev = -1
            for i in chosen:
                gaps.append(rest[prev + 1:i])
                prev = i
            gaps.append(rest[prev + 1:])
            for combo in itertools.product(*map(_nc_gap, gaps)):
                out = [block]
                for sub in combo:
                    out.extend(sub)
                out.sort()
                yield out


def _nc_gap(elems: tuple[int, ...]) -> list[list[tuple[int, ...]]]:
    return list(_nc_blocks(elems))


def _marks_sort_key(mp: MarkedPartition):
    # +1 before -1 within a fixed block structure
    return (mp.partition.blocks, tuple(0 if m == 1 else 1 for m in mp.marks))


def enumerate_gn(n: int) -> list[MarkedPartition]:
    """Admissible marked non-crossing partitions of {1..n}.

    These are the marked partitions with no +1 block strictly nested inside
    another block; they index the terms of the Wick rule.  Generated by the
    three-way extension that prepends a new smallest element to each
    admissible partition of the remaining ground set:

    * add it as a fresh singleton with mark +1, or
    * absorb it into the first +1 block (mark kept), or
    * absorb it into the first +1 block and flip the mark to -1.

    The filter-based brute force :func:`brute_gn` is the independent oracle
    for this construction.
    """
    _check_bound(n, MARKED_LIMIT)
    current: list[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]] = [
        (((1,),), (1,))
    ]
    for _ in range(n - 1):
        grown = []
        for blocks, marks in current:
            shifted = tuple(tuple(x + 1 for x in b) for b in blocks)
            grown.append((((1,),) + shifted, (1,) + marks))
            first_plus = next((j for j, m in enumerate(marks) if m == 1), None)
            if first_plus is not None:
                j = first_plus
                absorbed = (1,) + shifted[j]
                others = shifted[:j] + shifted[j + 1:]
                other_marks = marks[:j] + marks[j + 1:]
                grown.append(((absorbed,) + others, (1,) + other_marks))
                grown.append(((absorbed,) + others, (-1,) + other_marks))
        current = grown
    out = [
        MarkedPartition(SetPartition(n, blocks), marks) for blocks, marks in current
    ]
    out.sort(key=_marks_sort_key)
    return out


def enumerate_interval(n: int) -> list[MarkedPartition]:
    """Marked partitions whose blocks are consecutive-integer intervals.

    A subset of :func:`enumerate_gn`: an interval block can never nest
    strictly inside another interval.
    """
    _check_bound(n, MARKED_LIMIT)
    out = []
    for comp in _compositions(n):
        blocks = []
        start = 1
        for size in comp:
            blocks.append(tuple(range(start, start + size)))
            start += size
        choices = [(1,) if len(b) == 1 else (1, -1) for b in blocks]
        p = SetPartition(n, tuple(blocks))
        for marks in itertools.product(*choices):
            out.append(MarkedPartition(p, marks))
    out.sort(key=_marks_sort_key)
    return out


def _compositions(n: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in range(1, n + 1):
        for tail in _compositions(n - head):
            yield (head,) + tail


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------

def all_set_partitions(n: int) -> Iterator[SetPartition]:
    """Every set partition of {1..n}, via restricted growth strings."""
    if n < 1:
        raise ValueError("ground-set size must be positive")
    a = [0] * n
    pmax = [0] * n
    while True:
        nblocks = max(a) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for i, lab in enumerate(a):
            blocks[lab].append(i + 1)
        yield SetPartition(n, tuple(tuple(b) for b in blocks))
        i = n - 1
        while i > 0 and a[i] > pmax[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        pmax[i] = max(a[i], pmax[i - 1])
        for j in range(i + 1, n):
            a[j] = 0
            pmax[j] = pmax[i]


def brute_noncrossing(n: int) -> list[SetPartition]:
    """Filter-based oracle for :func:`enumerate_nc` (materializes partitions)."""
    out = [p for p in all_set_partitions(n) if is_noncrossing(p)]
    out.sort(key=lambda p: p.blocks)
    return out


def brute_noncrossing_count(n: int) -> tuple[int, int]:
    """Count-only oracle ``(total set partitions, non-crossing ones)``.

    Dispatches to the compiled kernel when available; the pure fallback is
    the same algorithm and noticeably slower for n around 12.
    """
    return count_set_partitions(n)


def has_nested_plus(blocks: tuple[tuple[int, ...], ...], marks: tuple[int, ...]) -> bool:
    """True if some +1 block lies strictly inside another block's span."""
    for j, (bj, mj) in enumerate(zip(blocks, marks)):
        if mj != 1:
            continue
        for i, bi in enumerate(blocks):
            if i != j and bi[0] < bj[0] and bj[-1] < bi[-1]:
                return True
    return False


def brute_gn(n: int) -> list[MarkedPartition]:
    """Filter-based oracle for :func:`enumerate_gn`.

    Enumerates all set partitions, keeps the non-crossing ones, assigns all
    mark vectors obeying the singleton rule, then rejects nested +1 blocks.
    """
    out = []
    for p in all_set_partitions(n):
        if not is_noncrossing(p):
            continue
        choices = [(1,) if len(b) == 1 else (1, -1) for b in p.blocks]
        for marks in itertools.product(*choices):
            if not has_nested_plus(p.blocks, marks):
                out.append(MarkedPartition(p, marks))
    out.sort(key=_marks_sort_key)
    return out


def gn_count_recursion(n: int) -> int:
    """Size of the admissible family via the prepend-element count recursion.

    Tracks only the distribution of the number of +1 blocks: prepending the
    new smallest element adds a +1 singleton, or absorbs into the first +1
    block keeping the mark, or absorbs and flips it to -1.
    """
    if n < 1:
        raise ValueError("ground-set size must be positive")
    dist = {1: 1}
    for _ in range(n - 1):
        nxt: dict[int, int] = {}
        for j, c in dist.items():
            nxt[j + 1] = nxt.get(j + 1, 0) + c
            if j >= 1:
                nxt[j] = nxt.get(j, 0) + c
                nxt[j - 1] = nxt.get(j - 1, 0) + c
        dist = nxt
    return sum(dist.values())


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def to_json_record(mp: MarkedPartition) -> dict:
    """JSON-friendly form used by the CLI enumeration dump."""
    return {
        "blocks": [list(b) for b in mp.partition.blocks],
        "marks": list(mp.marks),
    }
