"""Geometry contexts and the pointwise curvature stack.

A context supplies, at a single base point, the metric as a tensor of field
scalars (plain constants on homogeneous frames, truncated jets on charts),
directional derivatives of field scalars, and commutation coefficients of the
underlying basis.  Charts use coordinate bases (commutators vanish, metric
varies); homogeneous frames use invariant bases (metric constant, commutators
given by structure constants); finite products mix both, block by block.

One code path covers all three: with D_a the basis derivative and c^e_{ab}
the commutation coefficients,

    Gamma_{ab,c} = (D_a g_{bc} + D_b g_{ac} - D_c g_{ab}
                    + c^e_{ab} g_{ec} - c^e_{bc} g_{ea} + c^e_{ca} g_{eb}) / 2
    R_ab^c_d = D_a Gamma^c_bd - D_b Gamma^c_ad
               + Gamma^c_ae Gamma^e_bd - Gamma^c_be Gamma^e_ad
               - c^e_ab Gamma^c_ed

with the curvature sign convention R_ij^k_l X^l = (grad_i grad_j - grad_j
grad_i) X^k and Ricci R_ij = R_ki^k_j.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .errors import (DegenerateMetricError, DimensionError, ExactnessError,
                     JetOrderError, ScalarKindError)
from .jets import Dual, Jet, JetAlgebra, field_partial, field_value, scalar_float
from .polys import Poly, RationalFunc
from .scalars import FLOAT, RATIONAL, QuadExt, Ring, exact_sqrt
from .tensors import _LETTERS, Tensor, contract, lower_slot, raise_slot


def jet_ring(alg: JetAlgebra, exact: bool) -> Ring:
    zero = Jet.const(alg, Fraction(0) if exact else 0.0, exact)
    one = Jet.const(alg, Fraction(1) if exact else 1.0, exact)
    return Ring(f"jet({alg.nvars},{alg.order},{'exact' if exact else 'float'})",
                zero, one, exact)


def dual_ring(base: Ring) -> Ring:
    return Ring("dual:" + base.name, Dual(base.zero(), base.zero()),
                Dual(base.one(), base.zero()), base.exact)


def _invert_with_det(mat: np.ndarray, ring: Ring):
    """Gauss-Jordan inverse and determinant of an object matrix.

    Pivots are chosen by largest base-point magnitude so jet entries always
    divide by units.
    """
    n = mat.shape[0]
    aug = np.empty((n, 2 * n), dtype=object)
    aug[:, :n] = mat
    aug[:, n:] = ring.zero()
    for i in range(n):
        aug[i, n + i] = ring.one()
    det = ring.one()
    sign = 1
    for col in range(n):
        piv, best = None, 0.0
        for r in range(col, n):
            m = abs(scalar_float(aug[r, col]))
            if m > best:
                piv, best = r, m
        if piv is None:
            raise DegenerateMetricError("metric is singular at the base point")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
            sign = -sign
        p = aug[col, col]
        det = det * p
        pinv = p.inverse() if hasattr(p, "inverse") else 1 / p
        aug[col] = aug[col] * pinv
        for r in range(n):
            if r != col:
                f = aug[r, col]
                if f:
                    aug[r] = aug[r] - aug[col] * f
    if sign < 0:
        det = -det
    return aug[:, n:], det


class GeometryContext:
    """Base class; subclasses set dim, ring, metric, orientation, wiring."""

    dim: int
    ring: Ring
    orientation: int | None
    metric: Tensor
    structure: np.ndarray | None        # c^e_{ab}, indexed [e][a][b]
    var_of_direction: list
    meta: dict

    def partial(self, s, direction: int):
        v = self.var_of_direction[direction]
        if v is None:
            return s * 0
        return field_partial(s, v)

    def point_value(self, s):
        return field_value(s)

    @property
    def nvars(self) -> int:
        return sum(1 for v in self.var_of_direction if v is not None)

    @property
    def is_homogeneous(self) -> bool:
        return all(v is None for v in self.var_of_direction)

    @property
    def jet_algebra(self):
        s = self.metric.a.flat[0]
        while isinstance(s, Dual):
            s = s.re
        return s.alg if isinstance(s, Jet) else None

    @cached_property
    def _inv_det(self):
        inv, det = _invert_with_det(self.metric.a, self.ring)
        if scalar_float(det) == 0.0:
            raise DegenerateMetricError("metric is singular at the base point")
        return inv, det

    @cached_property
    def metric_inv(self) -> Tensor:
        return Tensor(self.dim, ("u", "u"), self._inv_det[0])

    @cached_property
    def det_metric(self):
        return self._inv_det[1]

    @cached_property
    def sqrt_abs_det(self):
        det = self.det_metric
        if scalar_float(det) < 0.0:
            det = -det
        if isinstance(det, (Jet, Dual)):
            return det.sqrt()
        if isinstance(det, float):
            return math.sqrt(det)
        root = exact_sqrt(det)
        if isinstance(root, QuadExt) and "quadext" not in self.ring.name:
            raise ExactnessError(
                f"sqrt|det g| = sqrt({det}) is not rational; switch the "
                "context to a QuadExt or float scalar kind")
        return root

    @cached_property
    def stack(self) -> "CurvatureStack":
        return CurvatureStack(self)


class FrameContext(GeometryContext):
    """Homogeneous frame: constant metric, constant structure coefficients."""

    def __init__(self, dim, structure_constants, metric_entries, *,
                 ring=RATIONAL, orientation=1, name="frame"):
        self.dim = dim
        self.ring = ring
        self.orientation = orientation
        self.var_of_direction = [None] * dim
        self.var_base_point = ()
        self.meta = {"name": name}
        c = np.empty((dim, dim, dim), dtype=object)
        c[...] = ring.zero()
        for (e, a, b), val in structure_constants.items():
            c[e, a, b] = val
        self.structure = c
        g = np.empty((dim, dim), dtype=object)
        for i in range(dim):
            for j in range(dim):
                g[i, j] = metric_entries[i][j]
        self.metric = Tensor(dim, ("d", "d"), g)
        self._validate()

    def _validate(self):
        c, g, n = self.structure, self.metric.a, self.dim
        for e in range(n):
            for a in range(n):
                for b in range(n):
                    if c[e, a, b] != -c[e, b, a]:
                        raise ValueError("structure constants not antisymmetric")
        for e in range(n):
            for a in range(n):
                for b in range(n):
                    for f in range(n):
                        s = sum((c[e, a, d] * c[d, b, f] + c[e, b, d] * c[d, f, a]
                                 + c[e, f, d] * c[d, a, b]) for d in range(n))
                        if s:
                            raise ValueError("Jacobi identity fails")
        for i in range(n):
            for j in range(n):
                if g[i, j] != g[j, i]:
                    raise ValueError("frame metric not symmetric")

    def to_float(self) -> "FrameContext":
        sc = {}
        n = self.dim
        for e in range(n):
            for a in range(n):
                for b in range(n):
                    v = self.structure[e, a, b]
                    if v:
                        sc[(e, a, b)] = float(v)
        g = [[float(self.metric.a[i, j]) for j in range(n)] for i in range(n)]
        return FrameContext(n, sc, g, ring=FLOAT, orientation=self.orientation,
                            name=self.meta["name"])


class ChartContext(GeometryContext):
    """Coordinate chart: metric entries are jets at the base point."""

    def __init__(self, dim, metric_tensor: Tensor, *, ring, base_point,
                 jet_order, orientation=1, name="chart", metric_polys=None):
        self.dim = dim
        self.ring = ring
        self.orientation = orientation
        self.metric = metric_tensor
        self.base_point = tuple(base_point)
        self.var_base_point = tuple(base_point)
        self.jet_order = jet_order
        self.var_of_direction = list(range(dim))
        self.structure = None
        self.metric_polys = metric_polys
        self.meta = {"name": name}

    @classmethod
    def from_polys(cls, entries, base_point, jet_order=5, *, exact=False,
                   orientation=1, name="chart"):
        """entries: dim x dim nested list of Poly / RationalFunc / Fraction."""
        dim = len(entries)
        alg = JetAlgebra.get(dim, jet_order)
        g = np.empty((dim, dim), dtype=object)
        for i in range(dim):
            for j in range(dim):
                e = entries[i][j]
                if isinstance(e, (int, Fraction)):
                    e = Poly.const(dim, e)
                g[i, j] = e.jet(alg, base_point, exact)
        for i in range(dim):
            for j in range(dim):
                if not g[i, j] == g[j, i]:
                    raise ValueError("chart metric not symmetric")
        t = Tensor(dim, ("d", "d"), g)
        return cls(dim, t, ring=jet_ring(alg, exact), base_point=base_point,
                   jet_order=jet_order, orientation=orientation, name=name,
                   metric_polys=entries)


class ProductContext(GeometryContext):
    """Finite Riemannian product assembled block by block."""

    def __init__(self, factors, *, name="product"):
        kinds = {f.ring.exact for f in factors}
        if len(kinds) > 1:
            raise ScalarKindError("product factors mix exact and float scalars")
        exact = kinds.pop()
        self.factors = list(factors)
        self.dim = sum(f.dim for f in factors)
        offsets, off = [], 0
        for f in factors:
            offsets.append(off)
            off += f.dim
        self.offsets = offsets
        chart_orders = [f.jet_order for f in factors if f.nvars > 0]
        nvars = sum(f.nvars for f in factors)
        self.jet_order = min(chart_orders) if chart_orders else None
        self.meta = {"name": name}
        self.orientation = 1
        for f in factors:
            self.orientation *= (f.orientation or 1)
        self.var_of_direction = []
        self.var_base_point = ()
        var_off = 0
        for f in factors:
            for v in f.var_of_direction:
                self.var_of_direction.append(None if v is None else var_off + v)
            var_off += f.nvars
            self.var_base_point = self.var_base_point + \
                tuple(getattr(f, "var_base_point", ()))
        if nvars == 0:
            self.ring = factors[0].ring
            lift = lambda s, f: s
        else:
            order = min(chart_orders)
            alg = JetAlgebra.get(nvars, order)
            self.ring = jet_ring(alg, exact)
            fvar_off = {}
            acc = 0
            for f in factors:
                fvar_off[id(f)] = acc
                acc += f.nvars

            def lift(s, f):
                if isinstance(s, Jet):
                    return _embed_jet(s, alg, fvar_off[id(f)], exact)
                return Jet.const(alg, s, exact)
        g = np.empty((self.dim, self.dim), dtype=object)
        g[...] = self.ring.zero()
        c = np.empty((self.dim, self.dim, self.dim), dtype=object)
        c[...] = self.ring.zero()
        for f, off in zip(factors, offsets):
            for i in range(f.dim):
                for j in range(f.dim):
                    g[off + i, off + j] = lift(f.metric.a[i, j], f)
            if f.structure is not None:
                for e in range(f.dim):
                    for a in range(f.dim):
                        for b in range(f.dim):
                            v = f.structure[e, a, b]
                            if v:
                                c[off + e, off + a, off + b] = lift(v, f)
        self.metric = Tensor(self.dim, ("d", "d"), g)
        self.structure = c


@lru_cache(maxsize=None)
def _embed_table(src_key, dst_key, offset):
    src = JetAlgebra.get(*src_key)
    dst = JetAlgebra.get(*dst_key)
    src_idx, dst_idx = [], []
    for i, m in enumerate(src.mons):
        if sum(m) > dst.order:
            continue
        e = [0] * dst.nvars
        for v, k in enumerate(m):
            e[offset + v] = k
        src_idx.append(i)
        dst_idx.append(dst.index[tuple(e)])
    return np.array(src_idx), np.array(dst_idx)


def _embed_jet(j: Jet, alg: JetAlgebra, offset: int, exact: bool) -> Jet:
    src_idx, dst_idx = _embed_table((j.alg.nvars, j.alg.order),
                                    (alg.nvars, alg.order), offset)
    if exact:
        c = np.empty(alg.N, dtype=object)
        c[...] = Fraction(0)
        c[dst_idx] = j.c[src_idx]
    else:
        c = np.zeros(alg.N)
        c[dst_idx] = j.c[src_idx]
    valid = min(j.valid, alg.order)
    return Jet(alg, c, valid, exact)


def product(contexts, *, name="product") -> ProductContext:
    return ProductContext(contexts, name=name)


class CurvatureStack:
    """Connection, curvature, and conformal curvature at the base point."""

    def __init__(self, ctx: GeometryContext):
        self.ctx = ctx
        if ctx.dim < 2:
            raise DimensionError("curvature stack needs dim >= 2")

    @property
    def dim(self) -> int:
        return self.ctx.dim

    @property
    def ring(self):
        return self.ctx.ring

    @property
    def metric(self) -> Tensor:
        return self.ctx.metric

    @property
    def metric_inv(self) -> Tensor:
        return self.ctx.metric_inv

    # -- derivative machinery -------------------------------------------------

    def _dirderiv(self, t: Tensor) -> Tensor:
        """D_a applied componentwise; derivative slot prepended."""
        ctx = self.ctx
        n = ctx.dim
        out = np.empty((n,) + t.a.shape, dtype=object)
        for a in range(n):
            for idx in np.ndindex(t.a.shape):
                out[(a,) + idx] = ctx.partial(t.a[idx], a)
        return Tensor(n, ("d",) + t.valence, out)

    def nabla(self, t: Tensor) -> Tensor:
        """Covariant derivative; new down slot in position 0."""
        out = self._dirderiv(t)
        if t.rank == 0:
            return out
        gam = self.gamma.a
        letters = _LETTERS[:t.rank]
        der, dum = "Y", "Z"
        for s in range(t.rank):
            if t.valence[s] == "u":
                sub = letters[s] + der + dum       # Gamma^{j_s}_{Y e}
            else:
                sub = dum + der + letters[s]       # Gamma^{e}_{Y j_s}
            src = letters[:s] + dum + letters[s + 1:]
            spec = f"{sub},{src}->{der}{letters}"
            corr = np.einsum(spec, gam, t.a, optimize=True)
            out = Tensor(out.dim, out.valence,
                         out.a + corr if t.valence[s] == "u" else out.a - corr)
        return out

    def div(self, t: Tensor, slot: int) -> Tensor:
        """Covariant divergence grad^a T_{...a...} over a down slot."""
        nt = self.nabla(t)
        nt = raise_slot(self.ctx, nt, 0)
        return contract(nt, [(0, slot + 1)])

    def laplacian(self, t: Tensor) -> Tensor:
        n2 = self.nabla(self.nabla(t))
        n2 = raise_slot(self.ctx, n2, 0)
        return contract(n2, [(0, 1)])

    def at_point(self, t: Tensor) -> Tensor:
        return t.map(self.ctx.point_value)

    # -- connection and curvature ---------------------------------------------

    @cached_property
    def gamma(self) -> Tensor:
        ctx = self.ctx
        n = ctx.dim
        g = ctx.metric
        dg = self._dirderiv(g).a                      # [a][b][c] = D_a g_bc
        low = np.einsum("abc->abc", dg, optimize=True) * Fraction(1, 2) \
            + np.einsum("bac->abc", dg, optimize=True) * Fraction(1, 2) \
            - np.einsum("cab->abc", dg, optimize=True) * Fraction(1, 2)
        if ctx.structure is not None:
            c = ctx.structure
            gl = g.a
            low = low + Fraction(1, 2) * (
                np.einsum("eab,ec->abc", c, gl, optimize=True)
                - np.einsum("ebc,ea->abc", c, gl, optimize=True)
                + np.einsum("eca,eb->abc", c, gl, optimize=True))
        gam = np.einsum("dc,abc->dab", ctx.metric_inv.a, low, optimize=True)
        return Tensor(n, ("u", "d", "d"), np.asarray(gam, dtype=object))

    @cached_property
    def rm_mixed(self) -> Tensor:
        """R_ab^c_d with valence (d, d, u, d)."""
        ctx = self.ctx
        gam = self.gamma
        dgam = self._dirderiv(gam).a                  # [a][c][b][d] = D_a G^c_bd
        r = np.einsum("acbd->abcd", dgam, optimize=True) \
            - np.einsum("bcad->abcd", dgam, optimize=True) \
            + np.einsum("cae,ebd->abcd", gam.a, gam.a, optimize=True) \
            - np.einsum("cbe,ead->abcd", gam.a, gam.a, optimize=True)
        if ctx.structure is not None:
            r = r - np.einsum("eab,ced->abcd", ctx.structure, gam.a,
                              optimize=True)
        return Tensor(ctx.dim, ("d", "d", "u", "d"), np.asarray(r, dtype=object))

    @cached_property
    def rm(self) -> Tensor:
        """All-down Riemann tensor R_abcd = g_ce R_ab^e_d."""
        return lower_slot(self.ctx, self.rm_mixed, 2)

    @cached_property
    def ric(self) -> Tensor:
        return contract(self.rm_mixed, [(2, 0)])

    @cached_property
    def scalar_curv(self):
        up = raise_slot(self.ctx, self.ric, 0)
        return contract(up, [(0, 1)]).item()

    @cached_property
    def j_scalar(self):
        return self.scalar_curv * Fraction(1, 2 * (self.ctx.dim - 1))

    @cached_property
    def schouten(self) -> Tensor:
        n = self.ctx.dim
        if n < 3:
            raise DimensionError("Schouten tensor needs dim >= 3")
        jg = self.ctx.metric.scale(self.j_scalar)
        return (self.ric - jg).scale(Fraction(1, n - 2))

    @cached_property
    def schouten_mixed(self) -> Tensor:
        """P_a^b with valence (d, u)."""
        return raise_slot(self.ctx, self.schouten, 1)

    @cached_property
    def weyl(self) -> Tensor:
        """All-down Weyl via R = W + P (kn) g."""
        return self.rm - kulkarni_nomizu_pg(self.schouten, self.ctx.metric)

    @cached_property
    def weyl_dduu(self) -> Tensor:
        w = raise_slot(self.ctx, self.weyl, 2)
        return raise_slot(self.ctx, w, 3)

    @cached_property
    def rm_dduu(self) -> Tensor:
        r = raise_slot(self.ctx, self.rm, 2)
        return raise_slot(self.ctx, r, 3)

    @cached_property
    def cotton(self) -> Tensor:
        """C_ijk = grad_i P_jk - grad_j P_ik."""
        np_ = self.nabla(self.schouten)
        return Tensor(np_.dim, np_.valence, np_.a - np.einsum(
            "jik->ijk", np_.a, optimize=True))

    @cached_property
    def cotton_ddu(self) -> Tensor:
        """C_ij^k (third slot raised)."""
        return raise_slot(self.ctx, self.cotton, 2)

    @cached_property
    def bach(self) -> Tensor:
        """B_ij = grad^s C_sij + W_isjt P^st."""
        n = self.ctx.dim
        if n < 3:
            raise DimensionError("Bach tensor needs dim >= 3")
        divC = self.div(self.cotton, 0)
        p_uu = raise_slot(self.ctx, self.schouten_mixed, 0)
        wp = np.einsum("isjt,st->ij", self.weyl.a, p_uu.a, optimize=True)
        return Tensor(n, ("d", "d"), divC.a + np.asarray(wp, dtype=object))

    # -- small conveniences -----------------------------------------------------

    def trace(self, t: Tensor):
        """g-trace of a (d,d) tensor."""
        return contract(raise_slot(self.ctx, t, 0), [(0, 1)]).item()

    def trace_free(self, t: Tensor) -> Tensor:
        tr = self.trace(t)
        return t - self.ctx.metric.scale(tr * Fraction(1, self.ctx.dim))

    def grad_scalar(self, s) -> Tensor:
        """grad_i f for a scalar field."""
        n = self.ctx.dim
        out = np.empty((n,), dtype=object)
        for a in range(n):
            out[a] = self.ctx.partial(s, a)
        return Tensor(n, ("d",), out)

    def check_invariants(self, tol: float = 1e-10) -> list:
        """Residuals of the structural curvature identities at the base point.

        Exact modes should see zeros; chart (float) modes stay below `tol`
        on well-conditioned metrics.  Returns (name, residual) pairs.
        """
        from .tensors import antisymmetrize, max_abs
        from .tensors import residual as tres
        n = self.ctx.dim
        rm = self.at_point(self.rm)
        scale = max(1.0, max_abs(rm))
        out = [
            ("Rm antisymmetric in the first pair",
             tres(rm, rm.permuted((1, 0, 2, 3)).scale(-1), scale)),
            ("Rm antisymmetric in the second pair",
             tres(rm, rm.permuted((0, 1, 3, 2)).scale(-1), scale)),
            ("Rm symmetric under pair exchange",
             tres(rm, rm.permuted((2, 3, 0, 1)), scale)),
            ("first Bianchi identity",
             max_abs(antisymmetrize(rm, [0, 1, 2])) / scale),
            ("metric compatibility grad g = 0",
             max_abs(self.at_point(self.nabla(self.ctx.metric))) / scale),
        ]
        if n >= 4:
            w = self.at_point(self.weyl)
            wm = self.at_point(self.weyl_dduu)
            traces = max(max_abs(contract(wm, [(2, 0)])),
                         max_abs(contract(wm, [(3, 1)])))
            rec = self.weyl + kulkarni_nomizu_pg(self.schouten,
                                                 self.ctx.metric)
            out += [
                ("Weyl totally trace-free", traces / scale),
                ("Weyl first Bianchi",
                 max_abs(antisymmetrize(w, [0, 1, 2])) / scale),
                ("Rm = W + Schouten (kn) g",
                 tres(self.at_point(rec), rm, scale)),
            ]
        if n >= 4:
            c = self.at_point(self.cotton)
            np_ = self.nabla(self.schouten)
            out += [
                ("Cotton = 2 grad_[i P_j]k",
                 tres(self.at_point(np_ - np_.permuted((1, 0, 2))), c,
                      scale)),
                ("Cotton totally antisymmetric part vanishes",
                 max_abs(antisymmetrize(c, [0, 1, 2])) / scale),
                ("div W = (n-3) Cotton",
                 tres(self.at_point(self.div(self.weyl, 2)),
                      self.at_point(self.cotton.scale(n - 3)), scale)),
            ]
        return out


def kulkarni_nomizu_pg(p: Tensor, g: Tensor) -> Tensor:
    """P_ik g_jl - P_il g_jk + P_jl g_ik - P_jk g_il."""
    a = np.einsum("ik,jl->ijkl", p.a, g.a, optimize=True) \
        - np.einsum("il,jk->ijkl", p.a, g.a, optimize=True) \
        + np.einsum("jl,ik->ijkl", p.a, g.a, optimize=True) \
        - np.einsum("jk,il->ijkl", p.a, g.a, optimize=True)
    return Tensor(p.dim, ("d",) * 4, np.asarray(a, dtype=object))


def build_stack(ctx: GeometryContext) -> CurvatureStack:
    """Assemble the curvature stack; core fields are computed eagerly."""
    st = ctx.stack
    st.gamma, st.rm_mixed, st.ric  # noqa: B018  - force evaluation
    if ctx.dim >= 3:
        st.schouten
    if ctx.dim >= 4:
        st.weyl
    return st


def covariant_derivative(ctx: GeometryContext, t: Tensor) -> Tensor:
    return ctx.stack.nabla(t)


def cotton(ctx: GeometryContext) -> Tensor:
    if ctx.dim < 3:
        raise DimensionError("Cotton tensor needs dim >= 3")
    return ctx.stack.cotton


def bach(ctx: GeometryContext) -> Tensor:
    try:
        return ctx.stack.bach
    except JetOrderError as exc:
        raise JetOrderError(
            "Bach tensor needs jet order >= 4 on charts") from exc
