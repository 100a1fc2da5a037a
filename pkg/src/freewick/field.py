"""Field operators, monomials, Wick products, and the partition expansions.

The field at a node acts as creation + annihilation + coefficient-weighted
neutral part.  A monomial smears a product of such factors, one per kernel
axis, against the quadrature.  Its Wick (normal) ordering drops every term
in which an annihilation factor immediately precedes a creation factor; the
resulting operator applied to the vacuum reproduces the kernel at its own
level and nothing else, which is what makes it the orthogonal projection of
the monomial.

The expansion of a monomial over admissible marked non-crossing partitions
(:func:`wick_rule_expand`) and the analogous expansion for a product of
Wick products (:func:`wick_product_expand`) are implemented over reduced
kernels: each block collapses to a single integration variable weighted by
a power of the coefficient table, exactly as in quadrature the discrete
delta collapses repeated slots.

Everything here is stateless; the partition sums are plain reductions and
may be parallelized by the caller.

Kernels are plain dense ``numpy`` arrays sampled at grid nodes, one axis
per integration variable (order 0 means a scalar).
"""

from __future__ import annotations

import string

import numpy as np

from . import fock, ncpart
from .errors import CapacityError
from .fock import FockVector

__all__ = [
    "field_apply",
    "monomial_apply",
    "word_apply",
    "wick_apply",
    "reduce_kernel",
    "wick_rule_expand",
    "wick_product_expand",
    "wick_product_sequential",
]


def field_apply(f, v: FockVector, g=None) -> FockVector:
    """Apply the smeared field: creation + annihilation + neutral(lambda * f)."""
    if g is None:
        g = v.base
    f = np.asarray(f, dtype=float)
    out = fock.create(f, v) + fock.annihilate(f, v)
    return out + fock.neutral(g.lambda_values * f, v)


def monomial_apply(f, v: FockVector, g=None) -> FockVector:
    """Apply the monomial with kernel ``f``, one field factor per kernel axis.

    Expands the kernel along its first axis and recurses: the leftmost
    factor is a field operator applied after the remaining factors, which
    is exactly the product rule for elementary tensor kernels extended by
    multilinearity.
    """
    if g is None:
        g = v.base
    f = np.asarray(f, dtype=float)
    if f.ndim == 0:
        return v * float(f)
    w = g.weights
    lam = g.lambda_values
    out = fock.zero(v.base, v.max_level)
    for i in range(g.size):
        sub = monomial_apply(f[i], v, g)
        # accumulate the field factor supported at node i
        for k, arr in enumerate(sub.levels):
            if not np.any(arr):
                continue
            if k + 1 > v.max_level:
                raise CapacityError(
                    f"monomial would push level {k} content past budget {v.max_level}"
                )
            out.levels[k + 1][i, ...] += arr
            if k >= 1:
                first_slot = arr[i, ...]
                out.levels[k - 1] += w[i] * first_slot
                out.levels[k][i, ...] += lam[i] * first_slot
    return out


def word_apply(ops, f, v: FockVector, g=None) -> FockVector:
    """Apply one smeared operator word, one factor per kernel axis.

    ``ops[j]`` picks the factor carried by integration variable ``j``:
    ``'+'`` creation, ``'-'`` annihilation, ``'0'`` the coefficient-weighted
    neutral factor (first-slot multiplication at the variable's node times
    the grid's coefficient table).  Meant for verifying individual terms of
    the monomial expansion; cost grows like ``size ** order``.
    """
    if g is None:
        g = v.base
    ops = tuple(ops)
    f = np.asarray(f, dtype=float)
    if len(ops) != f.ndim:
        raise ValueError("one op per kernel axis required")
    for op in ops:
        if op not in ("+", "-", "0"):
            raise ValueError(f"unknown op {op!r}")
    return _word_rec(ops, f, v, g)


def _word_rec(ops, f, v, g):
    if not ops:
        return v * float(f)
    op = ops[0]
    w = g.weights
    lam = g.lambda_values
    out = fock.zero(v.base, v.max_level)
    for i in range(g.size):
        sub = _word_rec(ops[1:], f[i], v, g)
        for k, arr in enumerate(sub.levels):
            if op == "+":
                if not np.any(arr):
                    continue
                if k + 1 > v.max_level:
                    raise CapacityError(
                        f"word would push level {k} content past budget {v.max_level}"
                    )
                out.levels[k + 1][i, ...] += arr
            elif k >= 1:
                first_slot = arr[i, ...]
                if op == "-":
                    out.levels[k - 1] += w[i] * first_slot
                else:
                    out.levels[k][i, ...] += lam[i] * first_slot
    return out


def _weight_axes(arr: np.ndarray, w: np.ndarray, q: int) -> np.ndarray:
    """Multiply an array by the quadrature weights along its first q axes."""
    for j in range(q):
        arr = arr * w.reshape((1,) * j + (-1,) + (1,) * (arr.ndim - j - 1))
    return arr


def wick_apply(f, v: FockVector, g=None, form: str = "explicit") -> FockVector:
    """Apply the Wick-ordered product of field factors with kernel ``f``.

    ``form="explicit"`` evaluates the closed expansion: the pure creation
    word, plus for each split point one all-annihilation tail and one
    neutral-then-annihilation tail.  ``form="recursive"`` peels the leading
    factor off instead; the two must agree and tests compare them.

    Applied to the vacuum, the result has the kernel itself at its own
    level and zero elsewhere.
    """
    if g is None:
        g = v.base
    f = np.asarray(f, dtype=float)
    n = f.ndim
    if n == 0:
        return v * float(f)
    if form == "recursive":
        return _wick_recursive(f, v, g)
    if form != "explicit":
        raise ValueError(f"unknown form {form!r}")

    w = g.weights
    lam = g.lambda_values
    m = g.size
    out = fock.zero(v.base, v.max_level)
    top = fock.top_level(v)

    for k in range(top + 1):
        arr = v.levels[k]
        if not np.any(arr):
            continue
        if k + n > v.max_level:
            raise CapacityError(
                f"wick product would push level {k} content past budget {v.max_level}"
            )
        out.levels[k + n] += np.multiply.outer(f, arr)

    for i in range(1, n + 1):
        # i-1 creations, then annihilations for variables i..n; the tail
        # factors act first, so kernel axes pair with the leading slots in
        # reversed order.
        q = n - i + 1
        f_axes = list(range(n - 1, i - 2, -1))
        for k in range(q, top + 1):
            arr = v.levels[k]
            if not np.any(arr):
                continue
            target = (i - 1) + (k - q)
            if target > v.max_level:
                raise CapacityError(
                    f"wick product would push level {k} content past budget {v.max_level}"
                )
            vw = _weight_axes(arr, w, q)
            out.levels[target] += np.tensordot(f, vw, axes=(f_axes, list(range(q))))

        # i-1 creations, neutral factor at variable i, annihilations after it
        q2 = n - i
        f_axes2 = list(range(n - 1, i - 1, -1))
        for k in range(q2 + 1, top + 1):
            arr = v.levels[k]
            if not np.any(arr):
                continue
            target = i + (k - q2 - 1)
            if target > v.max_level:
                raise CapacityError(
                    f"wick product would push level {k} content past budget {v.max_level}"
                )
            if q2:
                vw = _weight_axes(arr, w, q2)
                b = np.tensordot(f, vw, axes=(f_axes2, list(range(q2))))
            else:
                b = np.multiply.outer(f, arr)
            # diagonal couples the kernel's neutral axis with the surviving
            # first slot; the coefficient table rides on that slot
            c = np.moveaxis(np.diagonal(b, axis1=i - 1, axis2=i), -1, i - 1)
            shape = (1,) * (i - 1) + (m,) + (1,) * (k - q2 - 1)
            out.levels[target] += c * lam.reshape(shape)
    return out


def _wick_recursive(f, v, g):
    n = f.ndim
    if n == 0:
        return v * float(f)
    if n == 1:
        return field_apply(f, v, g)
    out = word_apply("0" + "-" * (n - 1), f, v, g) + word_apply("-" * n, f, v, g)
    for i in range(g.size):
        sub = _wick_recursive(f[i], v, g)
        for k, arr in enumerate(sub.levels):
            if not np.any(arr):
                continue
            if k + 1 > v.max_level:
                raise CapacityError(
                    f"wick product would push level {k} content past budget {v.max_level}"
                )
            out.levels[k + 1][i, ...] += arr
    return out


def reduce_kernel(kappa: ncpart.MarkedPartition, f, g) -> np.ndarray:
    """Collapse a kernel along the blocks of an admissible marked partition.

    Each -1 block of size l becomes a single quadrature variable weighted
    by ``lambda**(l-2)``; each +1 block keeps its minimum as the surviving
    variable (axes ordered by block minima) and contributes a factor
    ``lambda**(l-1)`` at it.  The returned kernel has one axis per +1 block.
    """
    f = np.asarray(f, dtype=float)
    n = kappa.n
    if f.ndim != n:
        raise ValueError("kernel order must match the partition's ground-set size")
    blocks = kappa.partition.blocks
    marks = kappa.marks
    if ncpart.has_nested_plus(blocks, marks):
        raise ValueError("partition has a +1 block nested inside another block")
    letters = string.ascii_lowercase
    if len(blocks) > len(letters):
        raise ValueError("too many blocks for the einsum reduction")

    pos_label = [""] * n
    out_labels: list[str] = []
    plus_sizes: list[int] = []
    operands: list[np.ndarray] = []
    operand_labels: list[str] = []
    lam = g.lambda_values
    for j, (block, mark) in enumerate(zip(blocks, marks)):
        lab = letters[j]
        for p in block:
            pos_label[p - 1] = lab
        if mark == 1:
            out_labels.append(lab)
            plus_sizes.append(len(block))
        else:
            operands.append(g.weights * lam ** (len(block) - 2))
            operand_labels.append(lab)

    sub = "".join(pos_label)
    if operand_labels:
        sub += "," + ",".join(operand_labels)
    sub += "->" + "".join(out_labels)
    red = np.einsum(sub, f, *operands)

    for axis, size in enumerate(plus_sizes):
        if size >= 2:
            shape = (1,) * axis + (-1,) + (1,) * (len(plus_sizes) - axis - 1)
            red = red * (lam ** (size - 1)).reshape(shape)
    return red


def wick_rule_expand(f, g, v: FockVector | None = None) -> FockVector:
    """Expand a monomial as the sum of Wick products over admissible partitions.

    Must reproduce :func:`monomial_apply` exactly (to roundoff); applied to
    the vacuum by default.
    """
    f = np.asarray(f, dtype=float)
    n = f.ndim
    if n < 1:
        raise ValueError("kernel order must be at least 1")
    if v is None:
        v = fock.vacuum(g, n)
    out = fock.zero(v.base, v.max_level)
    for kappa in ncpart.enumerate_gn(n):
        out = out + wick_apply(reduce_kernel(kappa, f, g), v, g)
    return out


def wick_product_expand(orders, f, g, v: FockVector | None = None) -> FockVector:
    """Expand a product of Wick products over the constrained partition family.

    ``orders`` splits the kernel axes into consecutive groups, one per Wick
    factor; only partitions whose blocks meet each group at most once
    contribute.  Must match sequentially applying the factors.
    """
    orders = tuple(int(k) for k in orders)
    if any(k < 1 for k in orders):
        raise ValueError("factor orders must be positive")
    n = sum(orders)
    f = np.asarray(f, dtype=float)
    if f.ndim != n:
        raise ValueError("kernel order must equal the sum of the factor orders")
    group = np.repeat(np.arange(len(orders)), orders)
    if v is None:
        v = fock.vacuum(g, n)
    out = fock.zero(v.base, v.max_level)
    for kappa in ncpart.enumerate_gn(n):
        admissible = all(
            len({group[p - 1] for p in block}) == len(block)
            for block in kappa.partition.blocks
        )
        if admissible:
            out = out + wick_apply(reduce_kernel(kappa, f, g), v, g)
    return out


def wick_product_sequential(kernels, g, v: FockVector | None = None) -> FockVector:
    """Apply Wick products one after another (rightmost first); the oracle
    side of :func:`wick_product_expand` for kernels that factor across
    groups."""
    kernels = [np.asarray(f, dtype=float) for f in kernels]
    if v is None:
        v = fock.vacuum(g, sum(f.ndim for f in kernels))
    out = v
    for f in reversed(kernels):
        out = wick_apply(f, out, g)
    return out
