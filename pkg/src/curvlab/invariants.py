"""Curvature invariants built from generalized-delta and trace-polynomial
contractions: the Pfaffian-type scalars, the distinguished one-forms of
weight -2k, their Pontrjagin-flavoured relatives, the generalized Einstein
tensors, and the conformal Killing operator pair.

Index conventions follow the curvature stack: W all-down, C_ijk
antisymmetric in (i, j), and every delta contraction is evaluated as a
signed permutation sum wired straight into the factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError, SlotError
from .tensors import (AltForm, Permutation, Tensor, contract, gkd_contract,
                      lower_slot, perm_sign, raise_slot,
                      signed_permutations, zeros)


@dataclass(frozen=True)
class WeightedOneForm:
    """One-form components at a point, tagged with a claimed conformal weight."""

    components: Tensor
    weight: int


class InvariantPolynomial:
    """Homogeneous invariant polynomial of degree k as a cycle-trace sum.

    Each term (c, sigma) contributes c * prod_{cycles (a1..am) of sigma}
    tr(A_{a1} A_{a2} .. A_{am}) when evaluated on matrices A_1..A_k.  The
    constructor symmetrizes over relabelings so the index form is
    S_k-invariant.
    """

    def __init__(self, degree: int, terms, *, symmetrize: bool = True):
        self.degree = degree
        terms = [(Fraction(c), sigma if isinstance(sigma, Permutation)
                  else Permutation(sigma)) for c, sigma in terms]
        if symmetrize:
            acc: dict = {}
            fact = math.factorial(degree)
            for c, sigma in terms:
                for tau, _ in signed_permutations(degree):
                    tau = Permutation(tau)
                    conj = tau.compose(sigma).compose(tau.inverse())
                    acc[conj.images] = acc.get(conj.images, Fraction(0)) + \
                        Fraction(c, fact)
            terms = [(c, Permutation(images)) for images, c in acc.items() if c]
        self.terms = terms

    @classmethod
    def pair_swap(cls) -> "InvariantPolynomial":
        """Degree 2, Phi_ij^rs = (1/2) delta_i^s delta_j^r; Phi(w,w) = tr(w^2)/2."""
        return cls(2, [(Fraction(1, 2), Permutation((1, 0)))])

    @classmethod
    def trace_power(cls, k: int) -> "InvariantPolynomial":
        """Degree 2k with Phi(w,..,w) = (tr w^2)^k."""
        images = list(range(2 * k))
        for m in range(k):
            images[2 * m], images[2 * m + 1] = 2 * m + 1, 2 * m
        return cls(2 * k, [(Fraction(1), Permutation(images))])

    def eval_matrices(self, mats) -> object:
        """Phi(A_1..A_k) for a list of (d,u)-valence matrix tensors."""
        if len(mats) != self.degree:
            raise SlotError("wrong number of matrix arguments")
        total = None
        for c, sigma in self.terms:
            term = None
            for cyc in _cycles(sigma):
                prod = mats[cyc[0]].a
                for a in cyc[1:]:
                    prod = np.dot(prod, mats[a].a)
                tr = np.einsum("ii->", prod)
                term = tr if term is None else term * tr
            term = c * term
            total = term if total is None else total + term
        return total

    def index_tensor(self, dim: int, ring) -> Tensor:
        """Materialized Phi_{s_1..s_k}^{t_1..t_k} (tests only)."""
        k = self.degree
        t = zeros(dim, ("d",) * k + ("u",) * k, ring)
        one = ring.one()
        for c, sigma in self.terms:
            for s_idx in np.ndindex((dim,) * k):
                t_idx = tuple(s_idx[_sigma_inv(sigma)[b]] for b in range(k))
                t.a[s_idx + t_idx] = t.a[s_idx + t_idx] + c * one
        return t

    def __repr__(self):
        return f"InvariantPolynomial(deg={self.degree}, {len(self.terms)} terms)"


def _sigma_inv(sigma: Permutation):
    return sigma.inverse().images


def _cycles(sigma: Permutation):
    seen, cycles = set(), []
    for start in range(len(sigma.images)):
        if start in seen:
            continue
        cyc, a = [], start
        while a not in seen:
            seen.add(a)
            cyc.append(a)
            a = sigma.images[a]
        cycles.append(tuple(cyc))
    return cycles


def load_phi(config: dict) -> InvariantPolynomial:
    """Build a polynomial from config: {"degree": k, "terms": [{"coeff": "1/2",
    "cycles": [[1,2]]}, ...]} with 1-based cycle notation."""
    k = int(config["degree"])
    terms = []
    for term in config["terms"]:
        sigma = Permutation.from_cycles(k, term.get("cycles", []))
        terms.append((Fraction(term["coeff"]), sigma))
    return InvariantPolynomial(k, terms)


# -- symmetry generators for delta contractions --------------------------------


def _chain_sym(p: int, factor_positions):
    """Orbit generators for delta contractions against curvature chains.

    factor_positions: list of dicts with keys 'low' (tuple of lower delta
    positions bound to the factor), 'up' (upper positions), 'pairs' (True if
    the factor is antisymmetric in each of its binding pairs), 'tag'
    (factors with equal tags may be exchanged wholesale).
    """
    gens = []
    ident = tuple(range(p))

    def swapped(i, j):
        s = list(ident)
        s[i], s[j] = s[j], s[i]
        return tuple(s)

    for spec in factor_positions:
        if spec.get("pairs"):
            lo, up = spec["low"], spec["up"]
            if len(lo) == 2:
                gens.append((swapped(*lo), ident))
            if len(up) == 2:
                gens.append((ident, swapped(*up)))
    by_tag: dict = {}
    for spec in factor_positions:
        by_tag.setdefault(spec.get("tag"), []).append(spec)
    for tag, group in by_tag.items():
        if tag is None:
            continue
        for a, b in zip(group, group[1:]):
            lo = list(ident)
            for i, j in zip(a["low"], b["low"]):
                lo[i], lo[j] = lo[j], lo[i]
            up = list(ident)
            for i, j in zip(a["up"], b["up"]):
                up[i], up[j] = up[j], up[i]
            gens.append((tuple(lo), tuple(up)))
    return tuple(gens)


def _curvature_dduu(stack, which: str) -> Tensor:
    if which == "weyl":
        return stack.weyl_dduu
    if which == "riemann":
        return stack.rm_dduu
    raise SlotError(f"unknown curvature choice {which!r}")


# -- Pfaffian-type scalars ------------------------------------------------------


def pfaffian_k(A: Tensor, k: int, ring) -> object:
    """(1/k!) delta^(2k)-contraction of k copies of a curvature-type tensor.

    A must have valence (d, d, u, u) with the antisymmetric-pair structure of
    a Weyl-type tensor.
    """
    if A.valence != ("d", "d", "u", "u"):
        raise SlotError("pfaffian expects valence (d,d,u,u)")
    p = 2 * k
    lower = [None] * p
    upper = [None] * p
    specs = []
    for m in range(k):
        lower[2 * m] = (m, 2)
        lower[2 * m + 1] = (m, 3)
        upper[2 * m] = (m, 0)
        upper[2 * m + 1] = (m, 1)
        specs.append({"low": (2 * m, 2 * m + 1), "up": (2 * m, 2 * m + 1),
                      "pairs": True, "tag": "W"})
    out = gkd_contract(A.dim, lower, upper, [A] * k, ring,
                       coeff=Fraction(1, math.factorial(k)),
                       sym=_chain_sym(p, specs))
    return out.item()


def pfaffian_of(stack, k: int, which: str = "weyl") -> object:
    return pfaffian_k(_curvature_dduu(stack, which), k, stack.ring)


# -- the distinguished one-form and its building blocks -------------------------


def _xi_first_term(stack, k: int) -> Tensor:
    """(1/k!) delta_{i i2..}^{j j2..} C_{j j2}^{i2} W_..^.. ; free lower slot."""
    n = stack.dim
    p = 2 * k
    C = stack.cotton_ddu
    W = stack.weyl_dduu
    lower = [None] * p
    upper = [None] * p
    lower[1] = (0, 2)
    upper[0] = (0, 0)
    upper[1] = (0, 1)
    specs = [{"low": (1,), "up": (0, 1), "pairs": True, "tag": "C"}]
    for m in range(k - 1):
        lower[2 + 2 * m] = (1 + m, 2)
        lower[3 + 2 * m] = (1 + m, 3)
        upper[2 + 2 * m] = (1 + m, 0)
        upper[3 + 2 * m] = (1 + m, 1)
        specs.append({"low": (2 + 2 * m, 3 + 2 * m),
                      "up": (2 + 2 * m, 3 + 2 * m), "pairs": True, "tag": "W"})
    return gkd_contract(n, lower, upper, [C] + [W] * (k - 1), stack.ring,
                        coeff=Fraction(1, math.factorial(k)),
                        sym=_chain_sym(p, specs))


def xi_formula(stack, k: int) -> Tensor:
    """The defining contraction evaluated in the ambient dimension n."""
    n = stack.dim
    first = _xi_first_term(stack, k)
    pf_w = pfaffian_of(stack, k, "weyl")
    grad = stack.grad_scalar(pf_w)
    return first + grad.scale(Fraction(1, 2 * n * k))


def xi_k(stack, k: int) -> WeightedOneForm:
    """The weight -2k one-form; defined in its home dimension n = 2k."""
    if stack.dim != 2 * k:
        raise DimensionError(f"xi^({k}) lives in dimension {2 * k}, "
                             f"context has {stack.dim}")
    return WeightedOneForm(xi_formula(stack, k), -2 * k)


def cotton_weyl_divergence_rhs(stack, k: int) -> Tensor:
    """(2k/k!) delta-contraction of C with (k-1) W's (divergence identity RHS)."""
    return _xi_first_term(stack, k).scale(2 * k)


# -- T^(k), Omega^(k), E^(k) ----------------------------------------------------


def _chain_with_free_pair(stack, k: int, ell: int, which: str) -> Tensor:
    """delta^{(1+k_top)} contraction with ell curvature factors and the rest
    Schouten factors; free first lower and upper slots."""
    n = stack.dim
    p = 1 + k + ell
    W = _curvature_dduu(stack, which)
    P = stack.schouten_mixed
    lower = [None] * p
    upper = [None] * p
    specs = []
    factors = []
    for m in range(ell):
        factors.append(W)
        lower[1 + 2 * m] = (m, 2)
        lower[2 + 2 * m] = (m, 3)
        upper[1 + 2 * m] = (m, 0)
        upper[2 + 2 * m] = (m, 1)
        specs.append({"low": (1 + 2 * m, 2 + 2 * m),
                      "up": (1 + 2 * m, 2 + 2 * m), "pairs": True, "tag": "W"})
    for q in range(k - ell):
        factors.append(P)
        pos = 1 + 2 * ell + q
        lower[pos] = (ell + q, 1)
        upper[pos] = (ell + q, 0)
        specs.append({"low": (pos,), "up": (pos,), "pairs": False, "tag": "P"})
    return gkd_contract(n, lower, upper, factors, stack.ring,
                        sym=_chain_sym(p, specs))


def T_k_W(stack, k: int) -> Tensor:
    """T^(k)(W)_i^j = (1/k!) delta-contraction of k Weyl factors; valence (d,u)."""
    p = 1 + 2 * k
    n = stack.dim
    W = stack.weyl_dduu
    lower = [None] * p
    upper = [None] * p
    specs = []
    for m in range(k):
        lower[1 + 2 * m] = (m, 2)
        lower[2 + 2 * m] = (m, 3)
        upper[1 + 2 * m] = (m, 0)
        upper[2 + 2 * m] = (m, 1)
        specs.append({"low": (1 + 2 * m, 2 + 2 * m),
                      "up": (1 + 2 * m, 2 + 2 * m), "pairs": True, "tag": "W"})
    return gkd_contract(n, lower, upper, [W] * k, stack.ring,
                        coeff=Fraction(1, math.factorial(k)),
                        sym=_chain_sym(p, specs))


def lovelock_E(stack, k: int) -> Tensor:
    """Generalized Einstein tensor E^(k)_i^j (Riemann factors); valence (d,u)."""
    p = 1 + 2 * k
    n = stack.dim
    R = stack.rm_dduu
    lower = [None] * p
    upper = [None] * p
    specs = []
    for m in range(k):
        lower[1 + 2 * m] = (m, 2)
        lower[2 + 2 * m] = (m, 3)
        upper[1 + 2 * m] = (m, 0)
        upper[2 + 2 * m] = (m, 1)
        specs.append({"low": (1 + 2 * m, 2 + 2 * m),
                      "up": (1 + 2 * m, 2 + 2 * m), "pairs": True, "tag": "R"})
    return gkd_contract(n, lower, upper, [R] * k, stack.ring,
                        coeff=Fraction(1, math.factorial(k)),
                        sym=_chain_sym(p, specs))


def omega_k(stack, k: int, mode: str = "dim2k") -> Tensor:
    """Omega^(k)_i^j as a weighted sum of W^ell P^(k-ell) chains.

    mode 'dim2k' uses the coefficients 4^{k-l}/(l!(k-l)) valid in dimension
    n = 2k; mode 'general_n' uses the binomial/factorial coefficients that
    make E = T + (n-2k) Omega hold for n > 2k.
    """
    n = stack.dim
    if mode == "dim2k":
        if n != 2 * k:
            raise DimensionError("dim2k mode requires n == 2k")
        coeffs = [Fraction(4 ** (k - ell), math.factorial(ell) * (k - ell))
                  for ell in range(k)]
    elif mode == "general_n":
        if n <= 2 * k:
            raise DimensionError("general_n mode requires n > 2k")
        coeffs = [Fraction(4 ** (k - ell) * math.comb(k, ell)
                           * math.factorial(n - k - ell - 1),
                           math.factorial(k) * math.factorial(n - 2 * k))
                  for ell in range(k)]
    else:
        raise SlotError(f"unknown omega mode {mode!r}")
    total = None
    for ell in range(k):
        term = _chain_with_free_pair(stack, k, ell, "weyl").scale(coeffs[ell])
        total = term if total is None else total + term
    return total


def mixed_to_down(stack, t: Tensor) -> Tensor:
    """Lower the up slot of a (d,u) tensor to (d,d)."""
    return lower_slot(stack.ctx, t, 1)


def trace_mixed(t: Tensor):
    """Trace of a (d,u) tensor."""
    return contract(t, [(1, 0)]).item()


# -- Phi-chains: p_Phi, rho^Phi and relatives ------------------------------------


def _matrix_two_form(stack, which: str = "weyl") -> Tensor:
    """W_t^s_{ij}: all-down curvature with the second slot raised."""
    W = stack.weyl if which == "weyl" else stack.rm
    return raise_slot(stack.ctx, W, 1)


def _assignments(values, degs):
    """Split a sorted tuple into per-factor index groups, pair groups kept
    increasing; yields (groups, parity) for each admissible arrangement."""
    import itertools as it

    def rec(remaining, q):
        if q == len(degs):
            if not remaining:
                yield []
            return
        d = degs[q]
        for pick in it.combinations(remaining, d):
            rest = tuple(v for v in remaining if v not in pick)
            for tail in rec(rest, q + 1):
                yield [pick] + tail

    for groups in rec(tuple(values), 0):
        flat = tuple(v for g in groups for v in g)
        order = tuple(sorted(range(len(flat)), key=lambda i: flat[i]))
        yield groups, perm_sign(order)


def _cycle_alt_form(factors, cycle, dim, ring) -> AltForm:
    """Compressed Alt of the matrix-trace chain over one Phi-cycle.

    Each factor is a matrix-valued form with valence (d, u, form-slots...);
    the trace closes over the matrix slots, the form slots are skewed.  The
    per-factor antisymmetry halves the permutation count per 2-form.
    """
    mats = [factors[a] for a in cycle]
    degs = [f.rank - 2 for f in mats]
    total = sum(degs)
    m2 = sum(1 for d in degs if d == 2)
    weight = Fraction(2 ** m2, math.factorial(total))
    letters = "ABCDEFGH"
    subs = ",".join(letters[q] + letters[(q + 1) % len(mats)]
                    for q in range(len(mats))) + "->"
    comps = {}
    import itertools as it
    for key in it.combinations(range(dim), total):
        acc = None
        for groups, sign in _assignments(key, degs):
            slices = [m.a[(slice(None), slice(None)) + g]
                      for m, g in zip(mats, groups)]
            val = np.einsum(subs, *slices, optimize=True)
            term = val if sign > 0 else -val
            acc = term if acc is None else acc + term
        if acc is not None:
            val = weight * acc
            nonzero = (not val.is_zero()) if hasattr(val, "is_zero") \
                else bool(val)
            if nonzero:
                comps[key] = val
    return AltForm(dim, total, comps)


def _phi_chain_form(stack, phi: InvariantPolynomial, factors) -> AltForm:
    """Alt over all form indices of the Phi-contracted factor chain.

    factors: one matrix-valued form per polynomial slot, valence
    (d, u, form...).  Returns the compressed alternating form of degree equal
    to the total form degree.
    """
    dim = stack.dim
    total_deg = sum(f.rank - 2 for f in factors)
    result = AltForm.zero(dim, total_deg)
    cache: dict = {}
    for c, sigma in phi.terms:
        chain_form = None
        for cyc in _cycles(sigma):
            key = _canonical_cycle_key(cyc, factors)
            if key not in cache:
                cache[key] = _cycle_alt_form(factors, cyc, dim, stack.ring)
            part = cache[key]
            chain_form = part if chain_form is None else chain_form.alt_mul(part)
        result = result.add(chain_form.scale(c))
    return result


def _canonical_cycle_key(cycle, factors):
    ids = tuple(id(factors[a]) for a in cycle)
    rots = [ids[i:] + ids[:i] for i in range(len(ids))]
    return min(rots)


def star_p_phi_form(stack, phi: InvariantPolynomial,
                    which: str = "weyl") -> AltForm:
    """The 2k-form Phi_{s..}^{t..} W_{[i1 i2 |t1|}^{s1} ... (skew over all)."""
    k = phi.degree
    if 2 * k > stack.dim:
        raise DimensionError("form degree exceeds dimension")
    M = _matrix_two_form(stack, which)
    return _phi_chain_form(stack, phi, [M] * k)


def phi_w_c_form(stack, phi: InvariantPolynomial) -> AltForm:
    """(Phi W^{k-1} C)_{i2..i_{2k}}: the (2k-1)-form with one Cotton factor.

    The Cotton factor enters as C_t^s_i (second slot raised), the curvature
    factors as W_t^s_{ij}; everything is skew-symmetrized over the form
    indices.
    """
    k = phi.degree
    C = raise_slot(stack.ctx, stack.cotton, 1)
    W = _matrix_two_form(stack, "weyl")
    return _phi_chain_form(stack, phi, [C] + [W] * (k - 1))


def _top_form_scalar(stack, form: AltForm):
    """Contract a top-degree form with the raised volume form."""
    ctx = stack.ctx
    n = ctx.dim
    idx = tuple(range(n))
    comp = form.comps.get(idx)
    if comp is None:
        comp = stack.ring.zero()
    s = ctx.sqrt_abs_det
    from .jets import scalar_float
    det = ctx.det_metric
    sign = -1 if scalar_float(det) < 0 else 1
    orient = ctx.orientation or 1
    # eps^{0..n-1} = orientation * sign(det) / sqrt|det g|
    return comp * orient * sign * s.inverse() if hasattr(s, "inverse") \
        else comp * orient * sign / s


def p_phi_scalar(stack, phi: InvariantPolynomial, which: str = "weyl"):
    """p_Phi via full volume-form contraction; requires dim n = 2k."""
    k = phi.degree
    n = stack.dim
    if n != 2 * k:
        raise DimensionError("the scalar p_Phi lives in dimension 2k")
    form = star_p_phi_form(stack, phi, which)
    return _top_form_scalar(stack, form)


def rho_phi(stack, phi: InvariantPolynomial) -> WeightedOneForm:
    """rho^Phi_i in dimension 2k: volume-contracted Cotton chain plus the
    gradient of p_Phi."""
    from .tensors import epsilon_form
    k = phi.degree
    n = stack.dim
    if n != 2 * k:
        raise DimensionError("rho^Phi lives in dimension 2k")
    if stack.ctx.orientation not in (1, -1):
        raise DimensionError("rho^Phi needs an oriented context")
    G = phi_w_c_form(stack, phi)
    eps = epsilon_form(stack.ctx)
    for s in range(1, n):
        eps = raise_slot(stack.ctx, eps, s)
    comp = np.empty((n,), dtype=object)
    zero = stack.ring.zero()
    for i in range(n):
        acc = zero
        for idx, val in G.comps.items():
            for perm, sign in signed_permutations(n - 1):
                tup = tuple(idx[q] for q in perm)
                term = eps.a[(i,) + tup] * val
                acc = acc + (term if sign > 0 else -term)
        comp[i] = acc
    first = Tensor(n, ("d",), comp).scale(
        Fraction(1, math.factorial(2 * k - 1)))
    p = p_phi_scalar(stack, phi, "weyl")
    grad = stack.grad_scalar(p)
    return WeightedOneForm(first + grad.scale(Fraction(1, 2 * k)), -2 * k)


def star_rho_general(stack, phi: InvariantPolynomial) -> Tensor:
    """(star rho^Phi)_{i2..i2k} = Phi W^{k-1} C - grad^i(star p_Phi)/(n-4k).

    Defined in every dimension n != 4k; a dense (2k-1)-form tensor.
    """
    k = phi.degree
    n = stack.dim
    if n == 4 * k:
        raise DimensionError("star rho^Phi has a pole at n = 4k")
    G = phi_w_c_form(stack, phi).to_tensor(stack.ring)
    starp = star_p_phi_form(stack, phi, "weyl").to_tensor(stack.ring)
    div = stack.div(starp, 0)
    return G - div.scale(Fraction(1, n - 4 * k))


# -- conformal Killing operator pair --------------------------------------------


def conformal_killing_K(stack, alpha: Tensor) -> Tensor:
    """K(alpha)_ij = 2 grad_(i alpha_j) - (2/n) grad^k alpha_k g_ij; trace-free."""
    n = stack.dim
    na = stack.nabla(alpha)
    sym = Tensor(n, ("d", "d"),
                 na.a + np.einsum("ij->ji", na.a, optimize=True))
    divv = contract(raise_slot(stack.ctx, na, 0), [(0, 1)]).item()
    return sym - stack.ctx.metric.scale(divv * Fraction(2, n))


def K_star(stack, A: Tensor) -> Tensor:
    """K*(A)_i = -2 grad^k A_ki."""
    return stack.div(A, 0).scale(-2)


def functional_density(ctx, omega: WeightedOneForm, X: Tensor):
    """Pointwise integrand omega_i X^i on a homogeneous context.

    The global functional is this constant times the total volume (supplied
    externally); only homogeneous contexts make the pointwise value equal to
    the integrand everywhere.
    """
    if not ctx.is_homogeneous:
        raise DimensionError(
            "functional density needs a homogeneous (frame) context")
    if X.valence != ("u",):
        raise SlotError("X must be a vector (valence 'u')")
    val = contract(omega.components.tp(X), [(1, 0)]).item()
    return ctx.point_value(val)


def functional_value(ctx, omega: WeightedOneForm, X: Tensor, volume):
    """Global functional = constant density times an externally supplied
    total volume (no integration machinery lives here)."""
    return functional_density(ctx, omega, X) * volume
