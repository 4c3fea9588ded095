from fractions import Fraction

import numpy as np
import pytest

from curvlab.config import context_from_config
from curvlab.errors import (ConfigError, DimensionError, JetOrderError,
                            ScalarKindError)
from curvlab.geometry import (ChartContext, FrameContext, build_stack,
                              covariant_derivative, cotton, bach,
                              kulkarni_nomizu_pg, product)
from curvlab.models import (berger_frame, berger_product, circle_frame,
                            flat_chart, fs_cp2_chart, random_chart,
                            round_sphere_chart)
from curvlab.polys import Poly
from curvlab.scalars import RATIONAL
from curvlab.tensors import (Tensor, antisymmetrize, is_zero_tensor, max_abs,
                             residual, tensors_equal, zeros)


class TestFlatAndSphere:
    def test_flat_stack_vanishes(self):
        st = build_stack(flat_chart(4, jet_order=2, exact=True))
        assert is_zero_tensor(st.rm)
        assert is_zero_tensor(st.ric)
        assert st.scalar_curv == 0

    def test_round_sphere_closed_form(self):
        for pt in (None, (Fraction(-2, 7), Fraction(1, 2), Fraction(0),
                          Fraction(3, 5))):
            ctx = round_sphere_chart(4, jet_order=3, exact=True,
                                     base_point=pt)
            st = ctx.stack
            g = ctx.metric
            expect = Tensor(4, ("d",) * 4, np.asarray(
                np.einsum("ik,jl->ijkl", g.a, g.a)
                - np.einsum("il,jk->ijkl", g.a, g.a), dtype=object))
            assert tensors_equal(st.rm, expect)
            assert is_zero_tensor(st.weyl)
            assert tensors_equal(st.schouten, g.scale(Fraction(1, 2)))
            assert is_zero_tensor(st.cotton)


class TestBergerFrame:
    def test_connection_displays(self, berger4, berger4_stack):
        st = berger4_stack
        t = Fraction(4)
        alpha = zeros(4, ("d",), RATIONAL)
        alpha.a[0] = Fraction(1)
        na = st.nabla(alpha)
        assert na.a[1, 2] == -1 and na.a[2, 1] == 1
        assert sum(1 for x in na.a.flat if x) == 2
        beta = zeros(4, ("d",), RATIONAL)
        beta.a[1] = Fraction(1)
        nb = st.nabla(beta)
        assert nb.a[0, 2] == -(t - 2) and nb.a[2, 0] == -t

    def test_ricci_display(self, berger4_stack):
        ric = berger4_stack.ric
        assert [ric.a[i, i] for i in range(4)] == [32, -4, -4, 0]

    def test_torsion_free_with_structure_constants(self, berger4,
                                                   berger4_stack):
        gam = berger4_stack.gamma
        c = berger4.structure
        for k in range(4):
            for a in range(4):
                for b in range(4):
                    assert gam.a[k, a, b] - gam.a[k, b, a] == c[k, a, b]

    def test_frame_validation(self):
        with pytest.raises(ValueError):
            FrameContext(2, {(0, 0, 1): Fraction(1)},
                         [[Fraction(1), 0], [0, Fraction(1)]])
        bad_jacobi = {(0, 0, 1): Fraction(1), (0, 1, 0): Fraction(-1),
                      (1, 1, 2): Fraction(1), (1, 2, 1): Fraction(-1),
                      (0, 1, 2): Fraction(1), (0, 2, 1): Fraction(-1)}
        with pytest.raises(ValueError):
            FrameContext(3, bad_jacobi,
                         [[Fraction(1), 0, 0], [0, Fraction(1), 0],
                          [0, 0, Fraction(1)]])


class TestStackInvariants:
    def test_chart_invariants(self, chart4, chart4_stack):
        st = chart4_stack
        rm = st.rm.at_point()
        scale = max(1.0, max_abs(rm))
        # pair antisymmetry and pair exchange
        assert residual(rm, rm.permuted((1, 0, 2, 3)).scale(-1)) < 1e-12
        assert residual(rm, rm.permuted((0, 1, 3, 2)).scale(-1)) < 1e-12
        assert residual(rm, rm.permuted((2, 3, 0, 1))) < 1e-12
        # first Bianchi
        assert max_abs(antisymmetrize(rm, [0, 1, 2])) / scale < 1e-12
        # Weyl: all traces vanish
        w = st.weyl_dduu.at_point()
        for up, down in (((2, 0)), ((2, 1)), ((3, 0)), ((3, 1))):
            from curvlab.tensors import contract
            assert max_abs(contract(w, [(up, down)])) / scale < 1e-10
        assert max_abs(antisymmetrize(st.weyl.at_point(), [0, 1, 2])) \
            / scale < 1e-12
        # decomposition R = W + P (kn) g
        rec = st.weyl + kulkarni_nomizu_pg(st.schouten, chart4.metric)
        assert residual(rec.at_point(), st.rm.at_point()) < 1e-10
        # Cotton: C_[ijk] = 0 and trace-free
        c = st.cotton.at_point()
        assert max_abs(antisymmetrize(c, [0, 1, 2])) / scale < 1e-12
        from curvlab.tensors import raise_slot, contract
        cu = raise_slot(chart4, st.cotton, 2).at_point()
        assert max_abs(contract(cu, [(2, 1)])) / scale < 1e-10
        # divergence relation
        assert residual(st.div(st.weyl, 2).at_point(),
                        st.cotton.at_point()) < 1e-10

    def test_metric_compatibility(self, chart4, chart4_stack, berger4,
                                  berger4_stack):
        ng = chart4_stack.nabla(chart4.metric)
        assert max_abs(ng.at_point()) < 1e-13
        assert is_zero_tensor(berger4_stack.nabla(berger4.metric))

    def test_frame_invariants_exact(self, berger4, berger4_stack):
        st = berger4_stack
        rm = st.rm
        assert tensors_equal(rm, rm.permuted((2, 3, 0, 1)))
        assert is_zero_tensor(antisymmetrize(rm, [0, 1, 2]))
        rec = st.weyl + kulkarni_nomizu_pg(st.schouten, berger4.metric)
        assert tensors_equal(rec, rm)
        assert tensors_equal(st.div(st.weyl, 2), st.cotton)


class TestCottonBach:
    def test_einstein_chart_has_zero_cotton(self):
        ctx = fs_cp2_chart(jet_order=3, exact=True)
        assert is_zero_tensor(cotton(ctx))

    def test_bach_requires_enough_jets(self):
        ctx = random_chart(4, seed=1, jet_order=3)
        with pytest.raises(JetOrderError):
            bach(ctx)

    def test_schouten_needs_dim3(self):
        ctx = flat_chart(2, jet_order=2, exact=True)
        with pytest.raises(DimensionError):
            ctx.stack.schouten
        with pytest.raises(DimensionError):
            cotton(ctx)

    def test_bach_on_chart(self):
        ctx = random_chart(4, seed=2, jet_order=4)
        b = bach(ctx)
        assert residual(b.at_point(), b.permuted((1, 0)).at_point()) < 1e-12


class TestProducts:
    def test_flat_times_flat_is_flat(self):
        f2 = flat_chart(2, jet_order=2, exact=True)
        prod = product([f2, flat_chart(2, jet_order=2, exact=True)])
        assert prod.dim == 4
        assert is_zero_tensor(prod.stack.rm)

    def test_mixed_scalar_kinds_rejected(self):
        with pytest.raises(ScalarKindError):
            product([berger_frame(Fraction(4)),
                     fs_cp2_chart(jet_order=2, exact=False)])

    def test_cross_block_curvature_vanishes(self):
        prod = product([berger_frame(Fraction(4)).to_float(),
                        circle_frame(exact=False),
                        fs_cp2_chart(jet_order=2, exact=False)])
        rm = prod.stack.rm.at_point()
        worst = 0.0
        for idx in np.ndindex(rm.a.shape):
            blocks = {0 if q < 4 else 1 for q in idx}
            if len(blocks) > 1:
                worst = max(worst, abs(rm.a[idx]))
        assert worst < 1e-12

    def test_product_blocks_match_factors(self):
        s3 = berger_frame(Fraction(4))
        prod = product([s3, circle_frame()])
        sub = prod.stack.ric
        solo = s3.stack.ric
        for i in range(3):
            for j in range(3):
                assert sub.a[i, j] == solo.a[i, j]


class TestCovariantDerivative:
    def test_second_bianchi_consequence(self, chart4, chart4_stack):
        st = chart4_stack
        from curvlab.tensors import raise_slot
        wup = raise_slot(chart4, raise_slot(chart4, st.weyl, 2), 3)
        lhs = antisymmetrize(st.nabla(wup), [0, 1, 2])
        idm = zeros(4, ("d", "u"), chart4.ring)
        for i in range(4):
            idm.a[i, i] = chart4.ring.one()
        big = st.cotton_ddu.tp(idm).permuted((0, 1, 3, 2, 4))
        rhs = antisymmetrize(antisymmetrize(big, [0, 1, 2]),
                             [3, 4]).scale(-2)
        assert residual(lhs.at_point(), rhs.at_point()) < 1e-8

    def test_op_wrapper(self, chart4):
        ng = covariant_derivative(chart4, chart4.metric)
        assert ng.valence == ("d", "d", "d")


class TestConfig:
    def test_chart_roundtrip(self):
        cfg = {
            "kind": "chart", "dim": 2, "base_point": ["0", "0"],
            "jet_order": 2, "exact": True,
            "metric": [
                [{"num": {"0,0": "1"}}, {"num": {"0,0": "0"}}],
                [{"num": {"0,0": "0"}}, {"num": {"0,0": "1"}}],
            ],
        }
        ctx = context_from_config(cfg)
        assert ctx.dim == 2 and is_zero_tensor(ctx.stack.rm)

    def test_frame_roundtrip(self):
        cfg = {
            "kind": "frame", "dim": 3,
            "metric": [["4", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
            "structure": [{"e": 2, "a": 0, "b": 1, "c": "2"},
                          {"e": 0, "a": 1, "b": 2, "c": "2"},
                          {"e": 1, "a": 2, "b": 0, "c": "2"}],
        }
        ctx = context_from_config(cfg)
        assert ctx.stack.ric.a[0, 0] == 32

    def test_product_config(self):
        frame = {
            "kind": "frame", "dim": 1, "metric": [["1"]], "structure": [],
        }
        cfg = {"kind": "product", "factors": [frame, frame]}
        ctx = context_from_config(cfg)
        assert ctx.dim == 2

    def test_bad_config_raises(self):
        with pytest.raises(ConfigError):
            context_from_config({"kind": "nonsense"})
        with pytest.raises(ConfigError):
            context_from_config({"kind": "chart", "dim": 2,
                                 "base_point": ["0"], "metric": []})
        bad_frame = {
            "kind": "frame", "dim": 2,
            "metric": [["1", "0"], ["0", "1"]],
            "structure": [{"e": 0, "a": 0, "b": 1, "c": "x"}],
        }
        with pytest.raises(ConfigError):
            context_from_config(bad_frame)


class TestStackInvariantChecker:
    def test_exact_on_frame(self, berger4_stack):
        for name, res in berger4_stack.check_invariants():
            assert res == 0.0, name

    def test_tight_on_chart(self, chart4_stack):
        for name, res in chart4_stack.check_invariants():
            assert res <= 1e-10, (name, res)


def test_insufficient_jet_order_signals_rebuild():
    ctx = random_chart(4, seed=0, jet_order=1)
    with pytest.raises(JetOrderError):
        build_stack(ctx)


def test_lorentzian_signature_smoke():
    """Pseudo-Riemannian metrics work through |det g| in the volume form."""
    from curvlab.tensors import epsilon_form
    entries = [[Fraction(-1 if i == 0 and j == 0 else (1 if i == j else 0))
                for j in range(4)] for i in range(4)]
    ctx = ChartContext.from_polys(entries, base_point=(Fraction(0),) * 4,
                                  jet_order=2, exact=True)
    st = ctx.stack
    assert is_zero_tensor(st.rm)
    eps = epsilon_form(ctx)
    assert eps.a[0, 1, 2, 3] == 1          # sqrt|det g| = 1


class TestShippedConfigs:
    configs = __import__("pathlib").Path(__file__).parent.parent / "configs"

    def test_berger_config_round_trips(self):
        from curvlab.config import load_model_file
        ctx = load_model_file(str(self.configs / "berger_frame.json"))
        assert ctx.dim == 4
        assert ctx.stack.ric.a[0, 0] == 32

    def test_round_sphere_config(self):
        from curvlab.config import load_model_file
        ctx = load_model_file(str(self.configs / "round_s4_chart.json"))
        st = ctx.stack
        assert max_abs(st.weyl.at_point()) < 1e-12

    def test_phi_config(self):
        from curvlab.config import load_phi_file
        phi = load_phi_file(str(self.configs / "phi_pair_swap.json"))
        assert phi.degree == 2
