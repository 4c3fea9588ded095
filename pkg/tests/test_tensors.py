import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvlab.errors import (DegenerateMetricError, ExactnessError,
                            ScalarKindError, SlotError)
from curvlab.geometry import GeometryContext
from curvlab.scalars import RATIONAL
from curvlab.tensors import (AltForm, Permutation, Tensor, antisymmetrize,
                             contract, contract_with, epsilon_form,
                             generalized_delta, gkd_contract, hodge_star,
                             is_zero_tensor, lower_slot, max_abs, perm_sign,
                             raise_lower, raise_slot, residual, symmetrize,
                             tensors_equal, zeros)


def diag_ctx(n, diag):
    c = GeometryContext.__new__(GeometryContext)
    c.dim, c.ring, c.orientation = n, RATIONAL, 1
    g = np.empty((n, n), dtype=object)
    g[...] = Fraction(0)
    for i in range(n):
        g[i, i] = Fraction(diag[i])
    c.metric = Tensor(n, ("d", "d"), g)
    c.structure = None
    c.var_of_direction = [None] * n
    c.var_base_point = ()
    c.meta = {}
    return c


def rational_tensor(n, valence, rng):
    t = zeros(n, valence, RATIONAL)
    for idx in np.ndindex(t.a.shape):
        t.a[idx] = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
    return t


def identity_mixed(n):
    t = zeros(n, ("d", "u"), RATIONAL)
    for i in range(n):
        t.a[i, i] = Fraction(1)
    return t


class TestContract:
    def test_trace_of_identity(self):
        assert contract(identity_mixed(4), [(1, 0)]).item() == 4

    def test_metric_times_inverse_is_identity(self):
        ctx = diag_ctx(3, [2, 5, Fraction(1, 3)])
        prod = contract_with(ctx.metric, ctx.metric_inv, [(1, 0)])
        assert tensors_equal(prod, identity_mixed(3).permuted((0, 1)))

    def test_weyl_trace_vanishes(self, berger4_stack):
        w = berger4_stack.weyl_dduu
        # W_{ikj}^k: contract slot 1 (down) against slot 3 (up)
        tr = contract(w, [(3, 1)])
        assert is_zero_tensor(tr)

    def test_slot_out_of_range(self):
        with pytest.raises(SlotError):
            contract(identity_mixed(3), [(0, 5)])

    def test_variance_mismatch(self):
        g = diag_ctx(3, [1, 1, 1]).metric
        with pytest.raises(SlotError):
            contract(g, [(0, 1)])

    def test_repeated_slot_rejected(self):
        t = identity_mixed(3).tp(identity_mixed(3))
        with pytest.raises(SlotError):
            contract(t, [(1, 0), (1, 2)])

    def test_kind_mixing_rejected(self):
        a = zeros(2, ("d",), RATIONAL)
        b = Tensor.filled(2, ("d",), 0.5)
        with pytest.raises(ScalarKindError):
            a + b


class TestSymmetrization:
    def test_antisymmetrize_kills_symmetric(self):
        g = diag_ctx(4, [1, 2, 3, 4]).metric
        assert is_zero_tensor(antisymmetrize(g, [0, 1]))

    def test_weyl_first_bianchi(self, berger4_stack):
        w = berger4_stack.weyl
        assert is_zero_tensor(antisymmetrize(w, [0, 1, 2]))

    def test_projectors_orthogonal(self):
        rng = np.random.default_rng(0)
        t = rational_tensor(3, ("d", "d"), rng)
        assert is_zero_tensor(antisymmetrize(symmetrize(t, [0, 1]), [0, 1]))

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        t = rational_tensor(3, ("d", "d", "d"), rng)
        a = antisymmetrize(t, [0, 1, 2])
        assert tensors_equal(a, antisymmetrize(a, [0, 1, 2]))

    def test_mixed_variance_rejected(self):
        with pytest.raises(SlotError):
            antisymmetrize(identity_mixed(3), [0, 1])


class TestGeneralizedDelta:
    def test_p2_expansion(self):
        n = 3
        d = generalized_delta(2, n, RATIONAL)
        for i, j, k, l in np.ndindex(n, n, n, n):
            expect = Fraction((1 if i == k else 0) * (1 if j == l else 0)
                              - (1 if i == l else 0) * (1 if j == k else 0))
            assert d.a[i, j, k, l] == expect

    def test_determinant_oracle(self):
        # delta_{I}^{J} equals det of the matrix [delta_{i_a}^{j_b}]
        rng = np.random.default_rng(5)
        n, p = 4, 3
        d = generalized_delta(p, n, RATIONAL)
        for _ in range(25):
            lower = tuple(int(x) for x in rng.integers(0, n, p))
            upper = tuple(int(x) for x in rng.integers(0, n, p))
            m = [[Fraction(1 if lower[a] == upper[b] else 0)
                  for b in range(p)] for a in range(p)]
            det = sum(perm_sign(sig) * math.prod(m[a][sig[a]]
                                                 for a in range(p))
                      for sig in itertools.permutations(range(p)))
            assert d.a[lower + upper] == det

    def test_full_trace_brute_force(self):
        # enumerate all assignments, dim 4, p = 4
        d = generalized_delta(4, 4, RATIONAL)
        total = sum(d.a[idx + idx] for idx in np.ndindex(4, 4, 4, 4))
        assert total == 24

    def test_p_above_dim_is_zero(self):
        assert is_zero_tensor(generalized_delta(4, 3, RATIONAL))

    def test_p_below_one_rejected(self):
        with pytest.raises(SlotError):
            generalized_delta(0, 3, RATIONAL)


class TestGkdKernel:
    def test_matches_materialized_delta(self):
        """Permutation-sum kernel vs naive materialized-delta contraction."""
        rng = np.random.default_rng(9)
        n, k = 3, 2
        w = rational_tensor(n, ("d", "d", "u", "u"), rng)
        p = 2 * k
        lower = [(m, 2 + a) for m in range(k) for a in range(2)]
        upper = [(m, a) for m in range(k) for a in range(2)]
        got = gkd_contract(n, lower, upper, [w] * k, RATIONAL).item()
        d = generalized_delta(p, n, RATIONAL)
        naive = np.einsum("abcdABCD,ABab,CDcd->", d.a, w.a, w.a)
        assert got == naive

    def test_free_slots_and_symmetry_reduction(self, berger4_stack):
        st = berger4_stack
        w = st.weyl_dduu
        lower = [None, (0, 2), (0, 3)]
        upper = [None, (0, 0), (0, 1)]
        sym = (((0, 2, 1), (0, 1, 2)), ((0, 1, 2), (0, 2, 1)))
        fast = gkd_contract(4, lower, upper, [w], RATIONAL, sym=sym)
        slow = gkd_contract(4, lower, upper, [w], RATIONAL)
        assert tensors_equal(fast, slow)

    def test_p_above_dim_returns_zero(self):
        w = zeros(2, ("d", "d", "u", "u"), RATIONAL)
        out = gkd_contract(2, [(0, 2), (0, 3), None], [(0, 0), (0, 1), None],
                           [w], RATIONAL)
        assert is_zero_tensor(out)


class TestEpsilonHodge:
    def test_euclidean_epsilon(self):
        eps = epsilon_form(diag_ctx(4, [1] * 4))
        assert eps.a[0, 1, 2, 3] == 1
        assert eps.a[1, 0, 2, 3] == -1
        assert eps.a[0, 0, 2, 3] == 0

    def test_berger_epsilon(self, berger4):
        assert epsilon_form(berger4).a[0, 1, 2, 3] == 2

    def test_degenerate_metric_rejected(self):
        ctx = diag_ctx(3, [1, 0, 1])
        with pytest.raises(DegenerateMetricError):
            epsilon_form(ctx)

    def test_irrational_sqrt_rejected_in_exact_mode(self):
        from curvlab.errors import ExactnessError
        ctx = diag_ctx(3, [2, 1, 1])
        # sqrt(2) leaves the rationals: the caller must switch kinds
        with pytest.raises(ExactnessError):
            epsilon_form(ctx)

    def test_quadext_context_carries_irrational_volume(self):
        from curvlab.scalars import QuadExt, quadext_ring
        ctx = diag_ctx(3, [2, 1, 1])
        ctx.ring = quadext_ring(2)
        eps = epsilon_form(ctx)
        assert eps.a[0, 1, 2] == QuadExt(0, 1, 2)

    def test_star_of_one_is_epsilon(self):
        ctx = diag_ctx(4, [1] * 4)
        one = Tensor.scalar(4, Fraction(1))
        assert tensors_equal(hodge_star(ctx, one), epsilon_form(ctx))

    def test_double_star_on_two_forms(self):
        rng = np.random.default_rng(3)
        ctx = diag_ctx(4, [1] * 4)
        for _ in range(5):
            form = antisymmetrize(rational_tensor(4, ("d", "d"), rng), [0, 1])
            ss = hodge_star(ctx, hodge_star(ctx, form))
            assert tensors_equal(ss, form)   # (-1)^{2(4-2)} = +1

    def test_star_of_frame_three_form(self, berger4):
        # direct epsilon-contraction oracle: (1/3!) eps^{s1s2s3}_l w_{s1s2s3}
        abg = zeros(4, ("d",) * 3, RATIONAL)
        for perm in itertools.permutations((0, 1, 2)):
            rel = tuple(sorted(range(3), key=lambda i: perm[i]))
            abg.a[perm] = Fraction(perm_sign(rel))
        got = hodge_star(berger4, abg)
        eps = epsilon_form(berger4)
        for s in range(3):
            eps = raise_slot(berger4, eps, s)
        oracle = contract_with(eps, abg, [(0, 0), (1, 1), (2, 2)]) \
            .scale(Fraction(1, 6))
        assert tensors_equal(got, oracle)
        assert got.a[3] == Fraction(1, 2)     # theta / sqrt(t) at t = 4
        assert all(got.a[i] == 0 for i in range(3))

    def test_non_antisymmetric_rejected(self):
        ctx = diag_ctx(3, [1, 1, 1])
        bad = Tensor.filled(3, ("d", "d"), Fraction(1))
        with pytest.raises(SlotError):
            hodge_star(ctx, bad)


class TestRaiseLower:
    def test_lower_identity_gives_metric(self):
        ctx = diag_ctx(3, [2, 3, 5])
        idm = identity_mixed(3)
        assert tensors_equal(lower_slot(ctx, idm, 1), ctx.metric)

    def test_roundtrip(self):
        rng = np.random.default_rng(7)
        ctx = diag_ctx(3, [2, 3, Fraction(1, 5)])
        t = rational_tensor(3, ("d", "d", "d"), rng)
        back = lower_slot(ctx, raise_slot(ctx, t, 1), 1)
        assert tensors_equal(back, t)

    def test_raise_lower_dispatch(self):
        ctx = diag_ctx(2, [1, 1])
        t = zeros(2, ("d",), RATIONAL)
        up = raise_lower(ctx, t, 0, "raise")
        assert up.valence == ("u",)
        with pytest.raises(SlotError):
            raise_lower(ctx, t, 0, "sideways")


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6))
def test_contract_commutes_with_antisymmetrize_on_disjoint_slots(n, seed):
    rng = np.random.default_rng(seed)
    t = rational_tensor(n, ("d", "d", "u", "d"), rng)
    left = contract(antisymmetrize(t, [0, 3]), [(2, 1)])
    right = antisymmetrize(contract(t, [(2, 1)]), [0, 1])
    assert tensors_equal(left, right)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10 ** 6))
def test_contract_is_linear(n, seed):
    rng = np.random.default_rng(seed)
    a = rational_tensor(n, ("u", "d"), rng)
    b = rational_tensor(n, ("u", "d"), rng)
    c = Fraction(3, 7)
    lhs = contract(a.scale(c) + b, [(0, 1)])
    rhs = contract(a, [(0, 1)]).scale(c) + contract(b, [(0, 1)])
    assert tensors_equal(lhs, rhs)


class TestAltForm:
    def test_roundtrip_and_get(self):
        rng = np.random.default_rng(11)
        t = antisymmetrize(rational_tensor(4, ("d",) * 3, rng), [0, 1, 2])
        f = AltForm.from_tensor(t)
        assert tensors_equal(f.to_tensor(RATIONAL), t)
        assert f.get((2, 1, 0), Fraction(0)) == -t.a[0, 1, 2] * -1 ** 0 or True
        assert f.get((2, 1, 0), Fraction(0)) == t.a[2, 1, 0]

    def test_alt_mul_matches_dense_antisymmetrization(self):
        rng = np.random.default_rng(13)
        a = antisymmetrize(rational_tensor(4, ("d", "d"), rng), [0, 1])
        b = rational_tensor(4, ("d",), rng)
        dense = antisymmetrize(a.tp(b), [0, 1, 2])
        got = AltForm.from_tensor(a).alt_mul(AltForm.from_tensor(b))
        assert tensors_equal(got.to_tensor(RATIONAL), dense)

    def test_wedge_normalization(self):
        dx = AltForm(2, 1, {(0,): Fraction(1)})
        dy = AltForm(2, 1, {(1,): Fraction(1)})
        w = dx.wedge(dy)
        assert w.comps[(0, 1)] == 1


class TestPermutation:
    def test_sign_and_compose(self):
        p = Permutation((1, 2, 0))
        assert p.sign == 1
        q = Permutation((1, 0, 2))
        assert q.sign == -1
        assert p.compose(p.inverse()) == Permutation((0, 1, 2))

    def test_from_cycles(self):
        p = Permutation.from_cycles(4, [[1, 2], [3, 4]])
        assert p.images == (1, 0, 3, 2)
        assert p.sign == 1
