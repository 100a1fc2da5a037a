import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freewick import field, fock, grid, ncpart
from freewick.errors import CapacityError
from freewick.ncpart import MarkedPartition, SetPartition


def rel(u, v):
    return fock.norm(u - v) / max(fock.norm(u), fock.norm(v), 1e-300)


def random_grid(m, rng):
    return grid.make_grid(m, lam=rng.standard_normal(m))


def marked(blocks, marks):
    n = max(x for b in blocks for x in b)
    return MarkedPartition(SetPartition.from_blocks(n, blocks), tuple(marks))


class TestFieldApply:
    def test_on_vacuum_creates(self, rng):
        g = random_grid(5, rng)
        f = rng.standard_normal(5)
        v = field.field_apply(f, fock.vacuum(g, 1), g)
        assert np.allclose(v.levels[1], f)
        assert float(v.levels[0]) == 0.0

    def test_gaussian_second_moment(self, rng):
        g = grid.make_grid(6, lam=0.0)
        f = np.ones(6)
        v = field.field_apply(f, field.field_apply(f, fock.vacuum(g, 2), g), g)
        assert abs(float(v.levels[0]) - 1.0) < 1e-12

    def test_poisson_third_moment(self):
        g = grid.make_grid(6, lam=1.0)
        f = np.ones(6)
        v = fock.vacuum(g, 3)
        for _ in range(3):
            v = field.field_apply(f, v, g)
        assert abs(float(v.levels[0]) - 1.0) < 1e-12


class TestMonomialApply:
    def test_order_one_reduces(self, rng):
        g = random_grid(5, rng)
        f = rng.standard_normal(5)
        v = fock.random_vector(g, 3, rng)
        v.levels[3][:] = 0
        assert rel(field.monomial_apply(f, v, g), field.field_apply(f, v, g)) < 1e-14

    def test_product_kernel_iterates(self, rng):
        g = random_grid(5, rng)
        f1, f2 = rng.standard_normal(5), rng.standard_normal(5)
        v = fock.vacuum(g, 2)
        lhs = field.monomial_apply(np.multiply.outer(f1, f2), v, g)
        rhs = field.field_apply(f1, field.field_apply(f2, v, g), g)
        assert rel(lhs, rhs) < 1e-13

    def test_worked_word_example(self, rng):
        # creation, annihilation, coefficient-weighted neutral, creation on a
        # level-2 vector: one integration variable survives on the diagonal
        g = random_grid(3, rng)
        f4 = rng.standard_normal((3, 3, 3, 3))
        g2 = rng.standard_normal((3, 3))
        v = fock.zero(g, 3)
        v.levels[2] = g2
        out = field.word_apply("+-0+", f4, v, g)
        contracted = np.einsum("sttt,t->s", f4, g.weights * g.lambda_values)
        expect = np.multiply.outer(contracted, g2)
        assert np.abs(out.levels[3] - expect).max() < 1e-12
        for k in range(3):
            assert not np.any(out.levels[k])

    def test_word_validation(self, rng):
        g = random_grid(3, rng)
        v = fock.vacuum(g, 2)
        with pytest.raises(ValueError):
            field.word_apply("+x", rng.standard_normal((3, 3)), v, g)
        with pytest.raises(ValueError):
            field.word_apply("+", rng.standard_normal((3, 3)), v, g)

    def test_monomial_equals_word_sum(self, rng):
        # the monomial is the sum of all 3^n operator words
        g = random_grid(3, rng)
        n = 2
        f = rng.standard_normal((3, 3))
        v = fock.random_vector(g, 4, rng)
        v.levels[4][:] = 0
        v.levels[3][:] = 0
        total = fock.zero(g, 4)
        for ops in itertools.product("+-0", repeat=n):
            total = total + field.word_apply(ops, f, v, g)
        assert rel(total, field.monomial_apply(f, v, g)) < 1e-13


class TestWickApply:
    def test_projection_property(self, rng):
        for n in range(1, 5):
            g = random_grid(4, rng)
            f = rng.standard_normal((4,) * n)
            v = field.wick_apply(f, fock.vacuum(g, n), g)
            assert np.abs(v.levels[n] - f).max() < 1e-12
            for k in range(n):
                assert not np.any(v.levels[k])

    def test_order_one_is_field(self, rng):
        g = random_grid(5, rng)
        f = rng.standard_normal(5)
        v = fock.random_vector(g, 3, rng)
        v.levels[3][:] = 0
        assert rel(field.wick_apply(f, v, g), field.field_apply(f, v, g)) < 1e-14

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_forms_agree(self, n, rng):
        g = random_grid(4, rng)
        f = rng.standard_normal((4,) * n)
        v = fock.random_vector(g, n + 2, rng)
        for k in range(3, n + 3):
            v.levels[k][:] = 0
        explicit = field.wick_apply(f, v, g, form="explicit")
        recursive = field.wick_apply(f, v, g, form="recursive")
        assert rel(explicit, recursive) < 1e-12

    def test_left_multiplication_recursion(self, rng):
        # applying one field factor to a Wick product splits into the longer
        # Wick product, the coefficient-merged one, and the contraction term
        g = random_grid(5, rng)
        fs = [rng.standard_normal(5) for _ in range(4)]
        v = fock.random_vector(g, 6, rng)
        for k in range(3, 7):
            v.levels[k][:] = 0
        tail = _outer(fs[1:])
        lhs = field.field_apply(fs[0], field.wick_apply(tail, v, g), g)
        merged = np.multiply.outer(g.lambda_values * fs[0] * fs[1], _outer(fs[2:]))
        rhs = (
            field.wick_apply(np.multiply.outer(fs[0], tail), v, g)
            + field.wick_apply(merged, v, g)
            + g.inner(fs[0], fs[1]) * field.wick_apply(_outer(fs[2:]), v, g)
        )
        assert rel(lhs, rhs) < 1e-12

    def test_two_singleton_merge_identity(self, rng):
        # one field factor times another: plain normal pair + contraction +
        # coefficient-weighted contraction keeping the boundary variable
        g = random_grid(4, rng)
        fa = rng.standard_normal(4)
        fb = rng.standard_normal(4)
        v = fock.random_vector(g, 5, rng)
        for k in range(3, 6):
            v.levels[k][:] = 0
        lhs = field.wick_apply(fa, field.wick_apply(fb, v, g), g)
        rhs = (
            field.wick_apply(np.multiply.outer(fa, fb), v, g)
            + g.inner(fa, fb) * v
            + field.wick_apply(g.lambda_values * fa * fb, v, g)
        )
        assert rel(lhs, rhs) < 1e-12

    def test_constrained_sum_operator_level(self, rng):
        # the product of two order-2 Wick products equals the constrained
        # partition sum on general vectors, not only on the vacuum
        g = random_grid(4, rng)
        fa = rng.standard_normal((4, 4))
        fb = rng.standard_normal((4, 4))
        v = fock.random_vector(g, 6, rng)
        for k in range(2, 7):
            v.levels[k][:] = 0
        lhs = field.wick_apply(fa, field.wick_apply(fb, v, g), g)
        rhs = field.wick_product_expand((2, 2), np.multiply.outer(fa, fb), g, v)
        assert rel(lhs, rhs) < 1e-12

    def test_capacity_error(self, rng):
        g = random_grid(4, rng)
        f = rng.standard_normal((4, 4))
        v = fock.random_vector(g, 2, rng)
        with pytest.raises(CapacityError):
            field.wick_apply(f, v, g)


class TestReduceKernel:
    def test_pair_contraction(self, rng):
        g = grid.make_grid(6, lam=rng.standard_normal(6))
        chi = np.ones(6)
        kappa = marked([(1, 2)], [-1])
        red = field.reduce_kernel(kappa, np.multiply.outer(chi, chi), g)
        assert red.shape == ()
        assert abs(float(red) - 1.0) < 1e-12  # the window has unit mass

    def test_identity_reduction(self, rng):
        g = random_grid(4, rng)
        f = rng.standard_normal((4, 4, 4))
        kappa = marked([(1,), (2,), (3,)], [1, 1, 1])
        assert np.allclose(field.reduce_kernel(kappa, f, g), f)

    def test_eight_point_example(self, rng):
        # blocks {1,2}+, {3,4,8}+, {5,6,7}-: two surviving variables with
        # coefficient powers 1 and 2, one contracted with power 1
        g = random_grid(3, rng)
        f = rng.standard_normal((3,) * 8)
        kappa = marked([(1, 2), (3, 4, 8), (5, 6, 7)], [1, 1, -1])
        red = field.reduce_kernel(kappa, f, g)
        lam, w = g.lambda_values, g.weights
        expect = np.einsum(
            "aabbcccb,c->ab", f, w * lam
        ) * np.multiply.outer(lam, lam**2)
        assert np.abs(red - expect).max() < 1e-12

    def test_matches_naive_loop_reduction(self, rng):
        g = random_grid(3, rng)
        n = 5
        f = rng.standard_normal((3,) * n)
        for kappa in ncpart.enumerate_gn(n)[::7]:
            fast = field.reduce_kernel(kappa, f, g)
            slow = naive_reduce(kappa, f, g)
            assert np.abs(np.asarray(fast) - slow).max() < 1e-12

    def test_rejects_inadmissible(self, rng):
        g = random_grid(4, rng)
        f = rng.standard_normal((4,) * 3)
        bad = marked([(1, 3), (2,)], [1, 1])  # nested +1 singleton
        with pytest.raises(ValueError):
            field.reduce_kernel(bad, f, g)


def naive_reduce(kappa, f, g):
    """Loop-based reduction oracle: one index per block, explicit weights."""
    blocks = kappa.partition.blocks
    marks = kappa.marks
    m = g.size
    plus = [j for j, mk in enumerate(marks) if mk == 1]
    out = np.zeros((m,) * len(plus))
    for assign in itertools.product(range(m), repeat=len(blocks)):
        idx = [0] * kappa.n
        weight = 1.0
        for j, (block, mk) in enumerate(zip(blocks, marks)):
            for p in block:
                idx[p - 1] = assign[j]
            if mk == -1:
                weight *= g.weights[assign[j]] * g.lambda_values[assign[j]] ** (len(block) - 2)
            elif len(block) >= 2:
                weight *= g.lambda_values[assign[j]] ** (len(block) - 1)
        out[tuple(assign[j] for j in plus)] += weight * f[tuple(idx)]
    return out


def _outer(kernels):
    out = np.asarray(kernels[0], dtype=float)
    for k in kernels[1:]:
        out = np.multiply.outer(out, np.asarray(k, dtype=float))
    return out


class TestWickRuleExpand:
    def test_order_one_single_term(self, rng):
        g = random_grid(5, rng)
        f = rng.standard_normal(5)
        lhs = field.wick_rule_expand(f, g)
        rhs = field.field_apply(f, fock.vacuum(g, 1), g)
        assert rel(lhs, rhs) < 1e-14

    def test_three_term_structure_n2(self, rng):
        g = random_grid(5, rng)
        f1, f2 = rng.standard_normal(5), rng.standard_normal(5)
        out = field.wick_rule_expand(np.multiply.outer(f1, f2), g)
        assert abs(float(out.levels[0]) - g.inner(f1, f2)) < 1e-12
        assert np.allclose(out.levels[1], g.lambda_values * f1 * f2)
        assert np.allclose(out.levels[2], np.multiply.outer(f1, f2))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_monomial(self, n, rng):
        g = random_grid(6, rng)
        f = rng.standard_normal((6,) * n)
        mono = field.monomial_apply(f, fock.vacuum(g, n), g)
        assert rel(mono, field.wick_rule_expand(f, g)) < 1e-10

    @given(st.integers(0, 2**32 - 1))
    def test_matches_monomial_randomized(self, seed):
        hr = np.random.default_rng(seed)
        g = grid.make_grid(3, lam=hr.standard_normal(3))
        n = int(hr.integers(1, 4))
        f = hr.standard_normal((3,) * n)
        mono = field.monomial_apply(f, fock.vacuum(g, n), g)
        assert rel(mono, field.wick_rule_expand(f, g)) < 1e-10

    def test_operator_level_against_monomial(self, rng):
        # the expansion holds as operators, not only on the vacuum
        g = random_grid(4, rng)
        f = rng.standard_normal((4, 4))
        v = fock.random_vector(g, 5, rng)
        for k in range(3, 6):
            v.levels[k][:] = 0
        lhs = field.monomial_apply(f, v, g)
        rhs = field.wick_rule_expand(f, g, v)
        assert rel(lhs, rhs) < 1e-12


class TestWickProductExpand:
    def test_single_factor_collapses(self, rng):
        g = random_grid(4, rng)
        f = rng.standard_normal((4, 4))
        lhs = field.wick_product_expand((2,), f, g)
        rhs = field.wick_apply(f, fock.vacuum(g, 2), g)
        assert rel(lhs, rhs) < 1e-14

    def test_two_singletons(self, rng):
        g = random_grid(5, rng)
        f1, f2 = rng.standard_normal(5), rng.standard_normal(5)
        joint = np.multiply.outer(f1, f2)
        lhs = field.wick_product_expand((1, 1), joint, g)
        rhs = field.wick_product_sequential([f1, f2], g)
        assert rel(lhs, rhs) < 1e-12

    @pytest.mark.parametrize("comp", [(2, 1), (1, 2), (2, 2), (3, 1), (2, 2, 1)])
    def test_matches_sequential(self, comp, rng):
        g = random_grid(4, rng)
        kernels = [rng.standard_normal((4,) * k) for k in comp]
        joint = _outer(kernels)
        lhs = field.wick_product_expand(comp, joint, g)
        rhs = field.wick_product_sequential(kernels, g)
        assert rel(lhs, rhs) < 1e-10
