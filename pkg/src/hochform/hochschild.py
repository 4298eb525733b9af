"""Normalized cochains of Q[x1..xn] realized as polydifferential operators.

A cochain of arity k is a finite sum of terms

    (coefficient polynomial; slot_1 | ... | slot_k),

one nonzero derivative multi-index per argument slot; the operator acts by

    P(a_1, ..., a_k) = sum over terms  coef * prod_i  D^{slot_i}(a_i).

Nonzero slots are exactly the normalization condition: every operator kills
the unit in each argument.  Equality is equality of canonical normal forms
(slot tuples sorted, coefficients merged); `evaluate` is the extensional
oracle the identity tests compare against.

The coboundary is computed symbolically: the simplicial formula

    (dP)(a_0..a_k) = a_0 P(a_1..a_k)
                     + sum_i (-1)^{i+1} P(.., a_i a_{i+1}, ..)
                     + (-1)^{k+1} P(a_0..a_{k-1}) a_k

is expanded through the generalized Leibniz rule; the intermediate terms
with a zero slot cancel pairwise, which the constructor asserts.

Degree bookkeeping: operators are graded by arity; brace and bracket
formulas use the shifted degree |P| = arity(P) - 1.  The coboundary, cup
and braces all preserve the internal weight deg(coef) - sum |slots|
(additively for the binary operations), which keeps every (arity, weight,
coefficient-degree) piece finite dimensional and exactly computable.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial

from .exactlin import SparseMat, rank_kernel, rank
from .polyalg import Poly, Polyvector, monomials_of_degree

Multi = tuple


def _is_zero_multi(m):
    return not any(m)


def _add_multi(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_multi(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _binom_multi(s, t):
    c = 1
    for a, b in zip(s, t):
        if b > a:
            return 0
        c *= comb(a, b)
    return c


class Cochain:
    """Polydifferential operator; terms maps slot tuples -> Poly coefficients."""

    __slots__ = ("nvars", "arity", "terms")

    def __init__(self, nvars: int, arity: int, terms=None, _allow_zero_slots=False):
        assert arity >= 0
        clean = {}
        for slots, p in (terms or {}).items():
            slots = tuple(tuple(int(c) for c in s) for s in slots)
            assert len(slots) == arity
            assert all(len(s) == nvars and min(s) >= 0 for s in slots)
            if not _allow_zero_slots:
                assert all(not _is_zero_multi(s) for s in slots), \
                    "normalization violated: zero slot in %r" % (slots,)
            if isinstance(p, (int, Fraction)):
                p = Poly.const(nvars, p)
            if not p.is_zero():
                clean[slots] = p
        self.nvars = nvars
        self.arity = arity
        self.terms = clean

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p.nvars, 0, {(): p})

    @classmethod
    def single(cls, nvars, coef, slots):
        return cls(nvars, len(slots), {tuple(tuple(s) for s in slots): coef})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Cochain) or self.nvars != other.nvars:
            return False
        if not self.terms and not other.terms:
            return True
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.arity,
                     frozenset((s, hash(p)) for s, p in self.terms.items())))

    def __add__(self, other):
        assert self.nvars == other.nvars
        if not self.terms:
            return other
        if not other.terms:
            return self
        assert self.arity == other.arity
        t = dict(self.terms)
        for s, p in other.terms.items():
            q = t.get(s)
            q = p if q is None else q + p
            if q.is_zero():
                t.pop(s, None)
            else:
                t[s] = q
        return Cochain(self.nvars, self.arity, t)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Cochain(self.nvars, self.arity, {s: p * c for s, p in self.terms.items()})

    def weight_parts(self) -> dict:
        """Split into internal-weight homogeneous pieces: weight -> Cochain."""
        out = {}
        for slots, p in self.terms.items():
            t = sum(sum(s) for s in slots)
            for e, c in p.terms.items():
                w = sum(e) - t
                out.setdefault(w, {}).setdefault(slots, {})[e] = c
        return {w: Cochain(self.nvars, self.arity,
                           {s: Poly(self.nvars, d) for s, d in njw.items()})
                for w, njw in out.items()}

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for slots, p in self.sorted_terms():
            coef = str(p)
            if len(p.terms) > 1:
                coef = "(%s)" % coef
            if slots:
                parts.append(coef + " ; " + " | ".join(",".join(str(c) for c in s) for s in slots))
            else:
                parts.append(coef)
        return "  ++  ".join(parts)

    __repr__ = __str__


def parse_cochain(s: str, nvars: int, arity: int) -> Cochain:
    """Inverse of str for the canonical cochain format."""
    from .polyalg import parse_poly
    s = s.strip()
    if s == "0":
        return Cochain(nvars, arity)
    total = Cochain(nvars, arity)
    for chunk in s.split("  ++  "):
        if ";" in chunk:
            coef_s, slots_s = chunk.split(";", 1)
            slots = tuple(tuple(int(c) for c in blk.split(","))
                          for blk in slots_s.strip().split("|"))
        else:
            coef_s, slots = chunk, ()
        coef_s = coef_s.strip()
        if coef_s.startswith("(") and coef_s.endswith(")"):
            coef_s = coef_s[1:-1]
        total = total + Cochain.single(nvars, parse_poly(coef_s, nvars), slots)
    return total


def evaluate(P: Cochain, args) -> Poly:
    """Apply the operator to polynomial arguments (the semantic oracle)."""
    if len(args) != P.arity:
        raise ValueError("arity mismatch: %d args for arity %d" % (len(args), P.arity))
    out = Poly.zero(P.nvars)
    for slots, coef in P.terms.items():
        prod = coef
        for s, a in zip(slots, args):
            if prod.is_zero():
                break
            prod = prod * a.diff_multi(s)
        out = out + prod
    return out


def hochschild_d(P: Cochain) -> Cochain:
    """Simplicial coboundary, arity k -> k+1, expanded through Leibniz.

    The zero-slot boundary terms cancel pairwise; the result is again a
    normalized operator (asserted).
    """
    n, k = P.nvars, P.arity
    acc = {}

    def put(slots, p):
        q = acc.get(slots)
        q = p if q is None else q + p
        if q.is_zero():
            acc.pop(slots, None)
        else:
            acc[slots] = q

    zero = (0,) * n
    for slots, c in P.terms.items():
        put((zero,) + slots, c)
        for i in range(k):
            s = slots[i]
            sign = (-1) ** (i + 1)
            for t in _splits(s):
                coefmul = _binom_multi(s, t)
                newslots = slots[:i] + (t, _sub_multi(s, t)) + slots[i + 1:]
                put(newslots, c * (sign * coefmul))
        put(slots + (zero,), c * ((-1) ** (k + 1)))
    for slots in acc:
        assert all(not _is_zero_multi(s) for s in slots), "zero slots failed to cancel"
    return Cochain(n, k + 1, acc)


def _splits(s):
    """All multi-indices t <= s coordinatewise (the Leibniz split set)."""
    out = [()]
    for a in s:
        out = [t + (b,) for t in out for b in range(a + 1)]
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _leibniz_distribute(s, m):
    """Distribute multi-index s over m+1 factors: yields (tuple of multis, coef).

    coef is the product over coordinates of the multinomial counts; this is
    the generalized Leibniz rule for D^s applied to a product of m+1 terms.
    """
    n = len(s)
    states = [(((0,) * n,) * (m + 1), 1)]
    for d in range(n):
        new = []
        for tup, c in states:
            for comp in _compositions(s[d], m + 1):
                mult = factorial(s[d])
                for q in comp:
                    mult //= factorial(q)
                upd = tuple(t[:d] + (q,) + t[d + 1:] for t, q in zip(tup, comp))
                new.append((upd, c * mult))
        states = new
    return states


def cup(P: Cochain, Q: Cochain) -> Cochain:
    """Concatenation product: (P cup Q)(a_1..a_{k+l}) = P(a_1..a_k) Q(rest)."""
    assert P.nvars == Q.nvars
    acc = {}
    for s1, c1 in P.terms.items():
        for s2, c2 in Q.terms.items():
            slots = s1 + s2
            p = c1 * c2
            q = acc.get(slots)
            p = p if q is None else q + p
            if p.is_zero():
                acc.pop(slots, None)
            else:
                acc[slots] = p
    return Cochain(P.nvars, P.arity + Q.arity, acc)


def brace(P: Cochain, Qs) -> Cochain:
    """Insertion operations P{Q_1,...,Q_m}, composed symbolically.

    Sum over order-preserving insertions of the Q's into distinct argument
    slots of P; an outer slot derivative distributes over the inserted
    operator by the Leibniz rule.  Koszul sign in shifted degrees:
    each insertion at slot j contributes |Q_p| * (j - 1 + sum of earlier
    |Q_q|), and the whole brace carries the prefactor
    (-1)^(sum_{p<q} |Q_p||Q_q| + |P| sum_p |Q_p|) that normalizes the
    coboundary interplay to its classical shape (frozen by the sign audit
    in the tests).  Arity-0 insertions substitute the value into the slot.
    More insertions than slots gives zero.
    """
    Qs = list(Qs)
    n, k, m = P.nvars, P.arity, len(Qs)
    for Q in Qs:
        assert Q.nvars == n
    if m == 0:
        return P
    if m > k:
        arity = k - m + sum(q.arity for q in Qs)
        return Cochain(n, max(arity, 0))
    arity = k - m + sum(q.arity for q in Qs)
    acc = {}

    def put(slots, p):
        q = acc.get(slots)
        p = p if q is None else q + p
        if p.is_zero():
            acc.pop(slots, None)
        else:
            acc[slots] = p

    shifted = [Q.arity - 1 for Q in Qs]
    prefactor = (k - 1) * sum(shifted)
    for p in range(m):
        for q in range(p + 1, m):
            prefactor += shifted[p] * shifted[q]
    for positions in combinations(range(1, k + 1), m):
        eps = prefactor
        before = 0
        for p, j in enumerate(positions):
            eps += shifted[p] * ((j - 1) + before)
            before += shifted[p]
        sign = (-1) ** (eps % 2)
        for pslots, pcoef in P.terms.items():
            _insert_terms(n, pslots, pcoef * sign, positions, Qs, 0, [], put)
    return Cochain(n, arity, acc)


def _insert_terms(n, pslots, coef, positions, Qs, p, built_slots_prefix, put):
    """Recursive expansion of one insertion pattern.

    built_slots_prefix collects the final slot list as we sweep P's slots
    left to right, splicing in each composed Q block.
    """
    # advance over P slots until the next insertion point
    start = positions[p - 1] if p > 0 else 0
    if p == len(positions):
        slots = tuple(built_slots_prefix) + pslots[start:]
        put(slots, coef)
        return
    j = positions[p]
    prefix = list(built_slots_prefix) + list(pslots[start:j - 1])
    s = pslots[j - 1]
    Q = Qs[p]
    for qslots, qcoef in Q.terms.items():
        l = Q.arity
        for dist, mult in _leibniz_distribute(s, l):
            u0, rest = dist[0], dist[1:]
            dcoef = qcoef.diff_multi(u0)
            if dcoef.is_zero():
                continue
            block = tuple(_add_multi(t, u) for t, u in zip(qslots, rest))
            _insert_terms(n, pslots, coef * dcoef * mult, positions, Qs,
                          p + 1, prefix + list(block), put)


def gerst_bracket(P: Cochain, Q: Cochain) -> Cochain:
    """P{Q} - (-1)^{|P||Q|} Q{P} in shifted degrees |.| = arity - 1.

    Restricts on functions and derivations to the action/commutator and
    vanishes on two functions.
    """
    sp, sq = P.arity - 1, Q.arity - 1
    return brace(P, [Q]) - brace(Q, [P]).scale((-1) ** ((sp * sq) % 2))


def hkr(u: Polyvector) -> Cochain:
    """Antisymmetrization embedding of polyvectors into cochains.

    p d_{i1}^...^d_{ik} goes to (1/k!) sum over permutations of the slot
    directions with the permutation sign; in degrees 0 and 1 this is the
    evident inclusion on the nose.
    """
    n, k = u.nvars, u.degree
    acc = {}
    inv = Fraction(1, factorial(k)) if k else Fraction(1)
    for idx, p in u.terms.items():
        for perm in permutations(range(k)):
            sign = _perm_sign(perm)
            slots = tuple(_unit_multi(n, idx[j]) for j in perm)
            c = p * (inv * sign)
            q = acc.get(slots)
            c = c if q is None else q + c
            if c.is_zero():
                acc.pop(slots, None)
            else:
                acc[slots] = c
    return Cochain(n, k, acc)


def _unit_multi(n, i):
    e = [0] * n
    e[i] = 1
    return tuple(e)


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# weight-graded pieces and cohomology dimensions


class WeightPiece:
    """Ordered basis of the (arity, weight, coefficient-degree) piece.

    Basis elements are single-term cochains (monomial coefficient of degree
    coef_deg; slot tuple with total order coef_deg - weight, every slot
    nonzero).  The coboundary preserves all three labels, so these pieces
    assemble the weight-graded complex exactly.
    """

    def __init__(self, nvars: int, arity: int, weight: int, coef_deg: int):
        self.nvars = nvars
        self.arity = arity
        self.weight = weight
        self.coef_deg = coef_deg
        self.basis = piece_basis(nvars, arity, weight, coef_deg)
        self.index = {b: i for i, b in enumerate(self.basis)}

    def __len__(self):
        return len(self.basis)


def _slot_multis(nvars, order):
    return [e for e in monomials_of_degree(nvars, order)]


def _slot_tuples(nvars, arity, total):
    if arity == 0:
        return [()] if total == 0 else []
    out = []

    def rec(prefix, rem, slots_left):
        if slots_left == 0:
            if rem == 0:
                out.append(tuple(prefix))
            return
        mino = 1
        maxo = rem - (slots_left - 1)
        for o in range(mino, maxo + 1):
            for m in _slot_multis(nvars, o):
                rec(prefix + [m], rem - o, slots_left - 1)

    rec([], total, arity)
    return out


def piece_basis(nvars, arity, weight, coef_deg):
    """Basis (monomial exponent, slots) of one homogeneous piece."""
    t = coef_deg - weight
    if coef_deg < 0:
        return []
    if arity == 0:
        if t != 0:
            return []
        return [(e, ()) for e in monomials_of_degree(nvars, coef_deg)]
    if t < arity:
        return []
    return [(e, slots) for e in monomials_of_degree(nvars, coef_deg)
            for slots in _slot_tuples(nvars, arity, t)]


def cochain_coords(P: Cochain, basis_index) -> dict:
    """Coordinates of a cochain in a piece basis; raises if it sticks out."""
    coords = {}
    for slots, p in P.terms.items():
        for e, c in p.terms.items():
            key = (e, slots)
            if key not in basis_index:
                raise ValueError("cochain leaves the homogeneous piece: %r" % (key,))
            coords[basis_index[key]] = coords.get(basis_index[key], Fraction(0)) + c
    return {i: c for i, c in coords.items() if c}


def basis_cochain(nvars, elem) -> Cochain:
    e, slots = elem
    return Cochain.single(nvars, Poly.monomial(nvars, e), slots)


def d_matrix(nvars, arity, weight, coef_deg):
    """Matrix of the coboundary from the (arity, ...) piece to arity+1."""
    src = piece_basis(nvars, arity, weight, coef_deg)
    dst = piece_basis(nvars, arity + 1, weight, coef_deg)
    dst_index = {b: i for i, b in enumerate(dst)}
    entries = {}
    for j, elem in enumerate(src):
        dP = hochschild_d(basis_cochain(nvars, elem))
        for i, c in cochain_coords(dP, dst_index).items():
            entries[(i, j)] = c
    return SparseMat(len(dst), len(src), entries), src, dst


def hh_dims(nvars, arity, weight, degree_budget):
    """(dim cocycles, dim coboundaries, dim cohomology) of a weight piece.

    Sums the exact piece-wise computations over coefficient degrees up to
    the budget.  The budget must reach weight + arity (the degree carrying
    the polyvector classes), otherwise the piece is truncated and the call
    is rejected.
    """
    dmin = weight + arity if arity else weight
    if degree_budget < dmin:
        raise ValueError("degree budget %d truncates the (%d, %d) piece (needs >= %d)"
                         % (degree_budget, arity, weight, dmin))
    zk = zb = zh = 0
    for d in range(max(dmin, 0), degree_budget + 1):
        mid = piece_basis(nvars, arity, weight, d)
        if not mid:
            continue
        m_out, _, _ = d_matrix(nvars, arity, weight, d)
        r_out, ker = rank_kernel(m_out)
        if arity == 0:
            r_in = 0
        else:
            m_in, _, _ = d_matrix(nvars, arity - 1, weight, d)
            if not m_out.matmul(m_in).is_zero():
                raise ValueError("coboundary fails to square to zero")
            r_in = rank(m_in)
        zk += ker.dim
        zb += r_in
        zh += ker.dim - r_in
    return zk, zb, zh


def polyvector_weight_dim(nvars, degree, weight):
    """dim of the weight-w part of the degree-k polyvectors (the target)."""
    d = weight + degree
    if d < 0:
        return 0
    return comb(nvars, degree) * len(monomials_of_degree(nvars, d))
