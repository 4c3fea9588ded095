"""Dense tensor arithmetic with abstract-index semantics.

Components are numpy object arrays over one scalar kind (Fraction, QuadExt,
float, Jet, or Dual).  Slot order is storage order; valence is a tuple of
'u'/'d' flags.  Contractions go through ``np.einsum`` (which dispatches to the
scalars' Python arithmetic), so the same code path serves exact and float
modes.

Generalized Kronecker deltas are evaluated as signed permutation sums and are
never materialized inside a larger contraction: ``gkd_contract`` wires delta
slots straight into factor tensors, one einsum per permutation, with an
orbit reduction over declared factor symmetries to cut the factorial count.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionError, ScalarKindError, SlotError
from .jets import Dual, Jet, field_value, scalar_float
from .scalars import QuadExt

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def kind_of(x) -> str:
    if isinstance(x, Jet):
        return "jet-exact" if x.exact else "jet-float"
    if isinstance(x, Dual):
        return "dual:" + kind_of(x.re)
    if isinstance(x, bool):
        raise ScalarKindError("bool is not a scalar")
    if isinstance(x, (int, Fraction)):
        return "rational"
    if isinstance(x, QuadExt):
        return "quadext"
    if isinstance(x, float):
        return "float"
    raise ScalarKindError(f"unsupported scalar type {type(x).__name__}")


def _check_same_kind(a: "Tensor", b: "Tensor"):
    ka, kb = a.kind(), b.kind()
    if ka == kb:
        return
    if {ka, kb} == {"rational", "quadext"}:
        return              # the rationals sit inside the extension
    raise ScalarKindError(f"mixed scalar kinds {ka} and {kb}; "
                          "promote explicitly first")


class Tensor:
    """Dense tensor at a point (or jet-valued field) with fixed slot valence."""

    __slots__ = ("dim", "valence", "a")

    def __init__(self, dim: int, valence, a: np.ndarray):
        valence = tuple(valence)
        if any(v not in ("u", "d") for v in valence):
            raise SlotError(f"bad valence {valence}")
        if a.shape != (dim,) * len(valence):
            raise SlotError(f"component shape {a.shape} does not match "
                            f"dim {dim}, rank {len(valence)}")
        self.dim, self.valence, self.a = dim, valence, a

    # -- construction --------------------------------------------------------

    @classmethod
    def filled(cls, dim, valence, value) -> "Tensor":
        a = np.empty((dim,) * len(valence), dtype=object)
        a[...] = value
        return cls(dim, valence, a)

    @classmethod
    def from_function(cls, dim, valence, fn) -> "Tensor":
        a = np.empty((dim,) * len(valence), dtype=object)
        for idx in np.ndindex(a.shape):
            a[idx] = fn(*idx)
        return cls(dim, valence, a)

    @classmethod
    def scalar(cls, dim, value) -> "Tensor":
        a = np.empty((), dtype=object)
        a[()] = value
        return cls(dim, (), a)

    # -- basics ---------------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.valence)

    def kind(self) -> str:
        return kind_of(self.a.flat[0] if self.rank else self.a[()])

    def item(self):
        if self.rank:
            raise SlotError("item() on a tensor of positive rank")
        return self.a[()]

    def copy(self) -> "Tensor":
        return Tensor(self.dim, self.valence, self.a.copy())

    def map(self, fn) -> "Tensor":
        out = np.empty(self.a.shape, dtype=object)
        for idx in np.ndindex(self.a.shape):
            out[idx] = fn(self.a[idx])
        return Tensor(self.dim, self.valence, out)

    def __add__(self, other: "Tensor") -> "Tensor":
        if not isinstance(other, Tensor):
            return NotImplemented
        if self.valence != other.valence or self.dim != other.dim:
            raise SlotError("tensor shape/valence mismatch in addition")
        _check_same_kind(self, other)
        return Tensor(self.dim, self.valence,
                      np.asarray(self.a + other.a, dtype=object))

    def __sub__(self, other: "Tensor") -> "Tensor":
        if not isinstance(other, Tensor):
            return NotImplemented
        if self.valence != other.valence or self.dim != other.dim:
            raise SlotError("tensor shape/valence mismatch in subtraction")
        _check_same_kind(self, other)
        return Tensor(self.dim, self.valence,
                      np.asarray(self.a - other.a, dtype=object))

    def __neg__(self) -> "Tensor":
        return Tensor(self.dim, self.valence, np.asarray(-self.a, dtype=object))

    def scale(self, s) -> "Tensor":
        if isinstance(s, Tensor):
            raise SlotError("use tp/contract for tensor-tensor products")
        return Tensor(self.dim, self.valence,
                      np.asarray(self.a * s, dtype=object))

    __rmul__ = scale
    __mul__ = scale

    def tp(self, other: "Tensor") -> "Tensor":
        """Tensor product, slots of self first."""
        _check_same_kind(self, other)
        sub_a = _LETTERS[:self.rank]
        sub_b = _LETTERS[self.rank:self.rank + other.rank]
        a = np.einsum(f"{sub_a},{sub_b}->{sub_a}{sub_b}", self.a, other.a)
        return Tensor(self.dim, self.valence + other.valence, np.asarray(a, dtype=object))

    def permuted(self, perm) -> "Tensor":
        """Reorder slots: new slot i holds old slot perm[i]."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.rank)):
            raise SlotError(f"bad slot permutation {perm}")
        return Tensor(self.dim, tuple(self.valence[p] for p in perm),
                      np.transpose(self.a, perm))

    def swap(self, i, j) -> "Tensor":
        perm = list(range(self.rank))
        perm[i], perm[j] = perm[j], perm[i]
        return self.permuted(perm)

    def at_point(self) -> "Tensor":
        """Collapse jet-valued components to their base-point values."""
        return self.map(field_value)

    def __repr__(self):
        return f"Tensor(dim={self.dim}, valence={''.join(self.valence)})"


def zeros(dim, valence, ring) -> Tensor:
    return Tensor.filled(dim, valence, ring.zero())


def ein(subscripts: str, *tensors: Tensor) -> np.ndarray:
    """einsum over component arrays (object dtype, optimized path)."""
    return np.einsum(subscripts, *[t.a for t in tensors], optimize=True)


# -- permutations -------------------------------------------------------------


def perm_sign(perm) -> int:
    """Parity of a permutation given as a tuple of images on 0..p-1."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def signed_permutations(p: int):
    """All permutations of range(p) with their signs, in lexicographic order."""
    return tuple((s, perm_sign(s)) for s in itertools.permutations(range(p)))


class Permutation:
    """Permutation of {0..p-1} with its sign; supports cycle-notation input."""

    __slots__ = ("images", "sign")

    def __init__(self, images):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        self.images = images
        self.sign = perm_sign(images)

    @classmethod
    def from_cycles(cls, p: int, cycles) -> "Permutation":
        """Build from 1-based disjoint cycles, e.g. [[1,2],[3,4]]."""
        images = list(range(p))
        for cyc in cycles:
            cyc0 = [c - 1 for c in cyc]
            if any(not 0 <= c < p for c in cyc0):
                raise ValueError(f"cycle entry out of range in {cyc}")
            for i, c in enumerate(cyc0):
                images[c] = cyc0[(i + 1) % len(cyc0)]
        return cls(images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self*other)(i) = self(other(i))."""
        return Permutation(tuple(self.images[other.images[i]]
                                 for i in range(len(self.images))))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation{self.images}"


# -- contraction and (anti)symmetrization -------------------------------------


def contract(t: Tensor, slot_pairs) -> Tensor:
    """Contract the listed (up, down) slot pairs of a single tensor."""
    pairs = [tuple(p) for p in slot_pairs]
    used = [s for p in pairs for s in p]
    if len(set(used)) != len(used):
        raise SlotError("repeated slot in contraction list")
    for i, j in pairs:
        for s in (i, j):
            if not 0 <= s < t.rank:
                raise SlotError(f"slot {s} out of range for rank {t.rank}")
        if {t.valence[i], t.valence[j]} != {"u", "d"}:
            raise SlotError(f"slots {i},{j} do not have opposite variance")
    letters = list(_LETTERS[:t.rank])
    for i, j in pairs:
        letters[j] = letters[i]
    out = [letters[s] for s in range(t.rank) if s not in set(used)]
    a = np.einsum(f"{''.join(letters)}->{''.join(out)}", t.a, optimize=True)
    valence = tuple(t.valence[s] for s in range(t.rank) if s not in set(used))
    return Tensor(t.dim, valence, np.asarray(a, dtype=object))


def contract_with(a: Tensor, b: Tensor, pairs) -> Tensor:
    """Contract slots of `a` (first element of each pair) against slots of `b`.

    Never materializes the tensor product; einsum contracts directly.
    """
    pairs = [tuple(p) for p in pairs]
    for i, j in pairs:
        if {a.valence[i], b.valence[j]} != {"u", "d"}:
            raise SlotError(f"slots {i},{j} do not have opposite variance")
    la = list(_LETTERS[:a.rank])
    lb = list(_LETTERS[a.rank:a.rank + b.rank])
    for i, j in pairs:
        lb[j] = la[i]
    ia = {i for i, _ in pairs}
    jb = {j for _, j in pairs}
    out = [la[s] for s in range(a.rank) if s not in ia] + \
        [lb[s] for s in range(b.rank) if s not in jb]
    arr = np.einsum(f"{''.join(la)},{''.join(lb)}->{''.join(out)}",
                    a.a, b.a, optimize=True)
    valence = tuple(a.valence[s] for s in range(a.rank) if s not in ia) + \
        tuple(b.valence[s] for s in range(b.rank) if s not in jb)
    return Tensor(a.dim, valence, np.asarray(arr, dtype=object))


def _permutation_average(t: Tensor, slots, signed: bool) -> Tensor:
    slots = list(slots)
    if len(set(slots)) != len(slots):
        raise SlotError("repeated slot in (anti)symmetrization list")
    if len({t.valence[s] for s in slots}) > 1:
        raise SlotError("(anti)symmetrization over mixed-variance slots")
    acc = None
    for perm, sign in signed_permutations(len(slots)):
        axes = list(range(t.rank))
        for pos, s in enumerate(slots):
            axes[s] = slots[perm[pos]]
        arr = np.transpose(t.a, axes)
        if signed and sign < 0:
            arr = -arr
        acc = arr if acc is None else acc + arr
    return Tensor(t.dim, t.valence, acc * Fraction(1, math.factorial(len(slots))))


def antisymmetrize(t: Tensor, slots) -> Tensor:
    """Projection onto the antisymmetric part over the listed slots."""
    return _permutation_average(t, slots, signed=True)


def symmetrize(t: Tensor, slots) -> Tensor:
    """Projection onto the symmetric part over the listed slots."""
    return _permutation_average(t, slots, signed=False)


def generalized_delta(p: int, dim: int, ring) -> Tensor:
    """Materialized generalized Kronecker delta, lower slots then upper slots."""
    if p < 1:
        raise SlotError("generalized delta needs p >= 1")
    valence = ("d",) * p + ("u",) * p
    t = zeros(dim, valence, ring)
    if p > dim:
        return t
    one = ring.one()
    for subset in itertools.combinations(range(dim), p):
        for lower in itertools.permutations(subset):
            pos = {v: i for i, v in enumerate(lower)}
            for upper, sign in signed_permutations(p):
                target = tuple(lower[u] for u in upper)
                rel = tuple(pos[v] for v in target)
                t.a[lower + target] = perm_sign(rel) * one
    return t


def _identity_matrix(dim, ring) -> np.ndarray:
    a = np.empty((dim, dim), dtype=object)
    a[...] = ring.zero()
    for i in range(dim):
        a[i, i] = ring.one()
    return a


def gkd_contract(dim, lower, upper, factors, ring, *, coeff=Fraction(1),
                 sym=()) -> Tensor:
    """Contract delta^(p) against a product of tensors without materializing it.

    lower/upper: length-p wiring lists for the delta's subscript/superscript
    groups.  Each entry is None (index stays free on the result) or a pair
    (factor_index, slot) naming the factor slot it contracts with; lower
    entries must hit 'u' slots, upper entries 'd' slots.  Result slots are the
    free lower indices (valence 'd') followed by free upper ones ('u'), in
    wiring order.

    sym: optional generators (perm_lower, perm_upper) of simultaneous index
    relabelings that leave the factor product invariant (including sign); the
    permutation sum is then evaluated once per orbit.
    """
    p = len(lower)
    if len(upper) != p:
        raise SlotError("lower/upper wiring length mismatch")
    for a, tgt in enumerate(lower):
        if tgt is not None and factors[tgt[0]].valence[tgt[1]] != "u":
            raise SlotError(f"lower delta index {a} must bind an up slot")
    for b, tgt in enumerate(upper):
        if tgt is not None and factors[tgt[0]].valence[tgt[1]] != "d":
            raise SlotError(f"upper delta index {b} must bind a down slot")
    out_valence = tuple("d" for t in lower if t is None) + \
        tuple("u" for t in upper if t is None)
    if p > dim:
        return zeros(dim, out_valence, ring)

    orbits = _orbit_representatives(p, tuple(tuple(s) for s in sym))
    idm = _identity_matrix(dim, ring)
    acc = None
    for sigma, sign, size in orbits:
        arrays = [f.a for f in factors]
        subs = [["?"] * f.rank for f in factors]
        extra_arrays, extra_subs, out_sub = [], [], []
        letters = iter(_LETTERS)
        free_low, free_up = {}, {}
        chain_letter = {}
        for a in range(p):
            chain_letter[a] = next(letters)
        for a in range(p):
            lo = lower[a]
            if lo is not None:
                subs[lo[0]][lo[1]] = chain_letter[a]
            else:
                free_low[a] = chain_letter[a]
        for a in range(p):
            b = sigma[a]
            up = upper[b]
            if up is not None:
                subs[up[0]][up[1]] = chain_letter[a]
            else:
                free_up[b] = chain_letter[a]
        # a free lower index tied to a free upper index leaves an explicit
        # Kronecker factor in the result
        for b, let in free_up.items():
            if let in free_low.values():
                fresh = next(letters)
                extra_arrays.append(idm)
                extra_subs.append(let + fresh)
                free_up[b] = fresh
        out_sub = [free_low[a] for a in sorted(free_low)] + \
            [free_up[b] for b in sorted(free_up)]
        spec = ",".join("".join(s) for s in subs + extra_subs) + \
            "->" + "".join(out_sub)
        term = np.einsum(spec, *(arrays + extra_arrays), optimize=True)
        term = np.asarray(term, dtype=object)
        if sign * size != 1:
            term = term * (sign * size)
        acc = term if acc is None else acc + term
    if acc is None:
        return zeros(dim, out_valence, ring)
    return Tensor(dim, out_valence, np.asarray(acc * coeff, dtype=object))


@lru_cache(maxsize=None)
def _orbit_representatives(p: int, sym):
    """Group S_p permutations into orbits under the symmetry generators."""
    perms = signed_permutations(p)
    if not sym:
        return tuple((s, sign, 1) for s, sign in perms)
    gens = []
    for pi_l, pi_u in sym:
        inv_l = [0] * p
        for i, j in enumerate(pi_l):
            inv_l[j] = i
        gens.append((tuple(inv_l), tuple(pi_u)))
    sign_of = dict(perms)
    seen = set()
    reps = []
    for s, sign in perms:
        if s in seen:
            continue
        orbit = {s}
        frontier = [s]
        while frontier:
            cur = frontier.pop()
            for inv_l, pi_u in gens:
                nxt = tuple(pi_u[cur[inv_l[i]]] for i in range(p))
                if nxt not in orbit:
                    orbit.add(nxt)
                    frontier.append(nxt)
        seen |= orbit
        reps.append((s, sign, len(orbit)))
    return tuple(reps)


# -- metric-dependent operations ----------------------------------------------


def raise_slot(ctx, t: Tensor, slot: int) -> Tensor:
    if t.valence[slot] != "d":
        raise SlotError(f"slot {slot} is already up")
    ginv = ctx.metric_inv
    letters = list(_LETTERS[:t.rank])
    fresh = _LETTERS[t.rank]
    spec = f"{''.join(letters)},{letters[slot]}{fresh}->" + \
        "".join(fresh if i == slot else letters[i] for i in range(t.rank))
    a = np.einsum(spec, t.a, ginv.a, optimize=True)
    valence = list(t.valence)
    valence[slot] = "u"
    return Tensor(t.dim, tuple(valence), np.asarray(a, dtype=object))


def lower_slot(ctx, t: Tensor, slot: int) -> Tensor:
    if t.valence[slot] != "u":
        raise SlotError(f"slot {slot} is already down")
    g = ctx.metric
    letters = list(_LETTERS[:t.rank])
    fresh = _LETTERS[t.rank]
    spec = f"{''.join(letters)},{letters[slot]}{fresh}->" + \
        "".join(fresh if i == slot else letters[i] for i in range(t.rank))
    a = np.einsum(spec, t.a, g.a, optimize=True)
    valence = list(t.valence)
    valence[slot] = "d"
    return Tensor(t.dim, tuple(valence), np.asarray(a, dtype=object))


def raise_lower(ctx, t: Tensor, slot: int, direction: str) -> Tensor:
    if direction == "raise":
        return raise_slot(ctx, t, slot)
    if direction == "lower":
        return lower_slot(ctx, t, slot)
    raise SlotError(f"direction must be 'raise' or 'lower', got {direction!r}")


def epsilon_form(ctx, orientation: int | None = None) -> Tensor:
    """Volume form eps_{i_1..i_n} = orientation * sqrt|det g| * sign(perm)."""
    n = ctx.dim
    if n > 7:
        raise DimensionError("dense volume form is limited to dim <= 7")
    if orientation is None:
        orientation = ctx.orientation
    if orientation not in (1, -1):
        raise DimensionError("context has no orientation")
    s = ctx.sqrt_abs_det
    if orientation < 0:
        s = -s
    t = zeros(n, ("d",) * n, ctx.ring)
    for perm, sign in signed_permutations(n):
        t.a[perm] = s if sign > 0 else -s
    return t


def is_antisymmetric(t: Tensor, tol: float = 1e-10) -> bool:
    """Check antisymmetry via adjacent-slot swaps (they generate S_rank)."""
    m = max(max_abs(t), 1.0)
    for s in range(t.rank - 1):
        sw = np.swapaxes(t.a, s, s + 1)
        for idx in np.ndindex(t.a.shape):
            if abs(scalar_float(t.a[idx] + sw[idx])) > tol * m:
                return False
    return True


def hodge_star(ctx, alpha: Tensor) -> Tensor:
    """Hodge star of a fully antisymmetric all-down k-form."""
    n, k = ctx.dim, alpha.rank
    if any(v != "d" for v in alpha.valence):
        raise SlotError("hodge star expects an all-down form")
    if k > n:
        raise SlotError("form degree exceeds dimension")
    if k >= 2 and not is_antisymmetric(alpha):
        raise SlotError("hodge star input is not antisymmetric")
    eps = epsilon_form(ctx)
    for s in range(k):
        eps = raise_slot(ctx, eps, s)
    if k == 0:
        return eps.scale(alpha.item())
    sub_e = _LETTERS[:n]
    spec = f"{sub_e},{sub_e[:k]}->{sub_e[k:]}"
    a = np.einsum(spec, eps.a, alpha.a, optimize=True)
    out = Tensor(n, ("d",) * (n - k), np.asarray(a, dtype=object))
    return out.scale(Fraction(1, math.factorial(k)))


# -- trace / residual helpers ---------------------------------------------------


def trace_metric(ctx, t: Tensor, slot1: int, slot2: int):
    """g-trace of two down slots (or plain trace of an up/down pair)."""
    if {t.valence[slot1], t.valence[slot2]} == {"u", "d"}:
        up, down = (slot1, slot2) if t.valence[slot1] == "u" else (slot2, slot1)
        return contract(t, [(up, down)])
    if t.valence[slot1] == "d":
        return contract(raise_slot(ctx, t, slot1), [(slot1, slot2)])
    return contract(lower_slot(ctx, t, slot1), [(slot2, slot1)])


def max_abs(t: Tensor) -> float:
    """Largest |component| at the base point."""
    if t.rank == 0:
        return abs(scalar_float(t.item()))
    return max(abs(scalar_float(x)) for x in t.a.flat)


def residual(a: Tensor, b: Tensor, scale: float = 1.0) -> float:
    """Relative deviation of two tensors at the base point."""
    diff = max_abs(a - b)
    denom = max(scale, max_abs(a), max_abs(b), 1e-12)
    return diff / denom


def tensors_equal(a: Tensor, b: Tensor) -> bool:
    """Exact componentwise equality (use in exact modes only)."""
    if a.valence != b.valence or a.dim != b.dim:
        return False
    if a.rank == 0:
        return a.item() == b.item()
    return bool(np.all(a.a == b.a))


def is_zero_tensor(t: Tensor) -> bool:
    def zero(x):
        if isinstance(x, Jet):
            return x.is_zero()
        return not x
    if t.rank == 0:
        return zero(t.item())
    return all(zero(x) for x in t.a.flat)


# -- compressed alternating forms ----------------------------------------------


class AltForm:
    """Antisymmetric all-down form stored on strictly increasing index tuples."""

    __slots__ = ("dim", "degree", "comps")

    def __init__(self, dim: int, degree: int, comps: dict):
        self.dim, self.degree, self.comps = dim, degree, comps

    @classmethod
    def zero(cls, dim, degree) -> "AltForm":
        return cls(dim, degree, {})

    @classmethod
    def from_tensor(cls, t: Tensor) -> "AltForm":
        comps = {}
        for idx in itertools.combinations(range(t.dim), t.rank):
            x = t.a[idx]
            if not (x.is_zero() if isinstance(x, Jet) else not x):
                comps[idx] = x
        return cls(t.dim, t.rank, comps)

    def to_tensor(self, ring) -> Tensor:
        t = zeros(self.dim, ("d",) * self.degree, ring)
        for idx, x in self.comps.items():
            for perm, sign in signed_permutations(self.degree):
                t.a[tuple(idx[q] for q in perm)] = x if sign > 0 else -x
        return t

    def get(self, idx, zero):
        """Component at an arbitrary index tuple (with sign)."""
        order = tuple(sorted(idx))
        if len(set(idx)) != len(idx) or order not in self.comps:
            return zero
        rel = tuple(order.index(i) for i in idx)
        return self.comps[order] if perm_sign(rel) > 0 else -self.comps[order]

    def add(self, other: "AltForm") -> "AltForm":
        comps = dict(self.comps)
        for idx, x in other.comps.items():
            comps[idx] = comps[idx] + x if idx in comps else x
        return AltForm(self.dim, self.degree, comps)

    def scale(self, s) -> "AltForm":
        return AltForm(self.dim, self.degree,
                       {i: s * x for i, x in self.comps.items()})

    def alt_mul(self, other: "AltForm") -> "AltForm":
        """Plain antisymmetrization Alt(self (x) other); associative."""
        p, q = self.degree, other.degree
        w = Fraction(math.factorial(p) * math.factorial(q),
                     math.factorial(p + q))
        comps = {}
        for idx in itertools.combinations(range(self.dim), p + q):
            acc = None
            for spos in itertools.combinations(range(p + q), p):
                sset = tuple(idx[i] for i in spos)
                tset = tuple(idx[i] for i in range(p + q) if i not in spos)
                if sset not in self.comps or tset not in other.comps:
                    continue
                rel = sset + tset
                sign = perm_sign(tuple(sorted(range(len(rel)),
                                              key=lambda i: rel[i])))
                term = self.comps[sset] * other.comps[tset]
                if sign < 0:
                    term = -term
                acc = term if acc is None else acc + term
            if acc is not None:
                comps[idx] = w * acc
        return AltForm(self.dim, p + q, comps)

    def wedge(self, other: "AltForm") -> "AltForm":
        """Classical wedge: (p+q)!/(p!q!) times alt_mul."""
        w = Fraction(math.factorial(self.degree + other.degree),
                     math.factorial(self.degree) * math.factorial(other.degree))
        return self.alt_mul(other).scale(w)

    def max_abs(self) -> float:
        if not self.comps:
            return 0.0
        return max(abs(scalar_float(x)) for x in self.comps.values())
