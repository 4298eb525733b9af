"""Signed word calculus for the cofree coalgebra layers.

Letters are basis elements of A (+) Der(A) for A = Q[x1..xn]: monomials
(including the unit: the bracket of a constant-coefficient derivation with
a linear monomial produces it, and the differential identities need its
merge residues) and monomial-coefficient derivations.  Words are tensors
of letters; the Lie-coalgebra layer is the quotient of the tensor
coalgebra by signed shuffles.  Enumerations that must stay finite per
weight (basis generation, the commutative-window homology) simply never
list unit letters; the calculus itself handles them uniformly.

Parity conventions, fixed once and audited by the test suite
(d^2 = 0, co-Jacobi, window homology):

* every letter carries one desuspension, so its shuffle parity is
  sigma = internal degree + 1:  monomial letters are ODD, derivation
  letters are EVEN; all shuffle and flip Koszul signs use sigma,
* the bar differential merges adjacent letters by the product/module
  action with the bar sign (-1)^(number of odd letters to the left),
* a word w has sigma(w) = sum of letter parities; the factor parity of the
  symmetric-product layer is p(w) = sigma(w) + 1 (one more desuspension).

Normal forms per multidegree use the Lyndon-word basis of the quotient,
extended by the squares v.v of odd Lyndon words (the odd letters make the
calculus genuinely a super one: one odd letter squared survives the
quotient).  The candidate basis is asserted against the exact rank of the
shuffle span every time a multidegree cache is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .exactlin import SparseMat, solve_linear
from .polyalg import Poly, Polyvector

ZERO = Fraction(0)
ONE = Fraction(1)


class Letter:
    """Alphabet element: kind 'a' = monomial of A, 'd' = derivation.

    Immutable, interned (one object per value), with precomputed parity,
    weight and alphabet key; the word calculus hashes letters constantly.
    """

    __slots__ = ("kind", "expo", "direction", "sigma", "weight", "_key", "_hash")
    _interned = {}

    def __new__(cls, kind, expo, direction=-1):
        expo = tuple(expo)
        cached = cls._interned.get((kind, expo, direction))
        if cached is not None:
            return cached
        assert kind in ("a", "d")
        assert direction == -1 if kind == "a" else direction >= 0
        self = object.__new__(cls)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "expo", expo)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "sigma", 1 if kind == "a" else 0)
        object.__setattr__(self, "weight",
                           sum(expo) - (1 if kind == "d" else 0))
        if kind == "a":
            key = (0, sum(expo), tuple(-c for c in expo))
        else:
            key = (1, direction, sum(expo), tuple(-c for c in expo))
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash((kind, expo, direction)))
        cls._interned[(kind, expo, direction)] = self
        return self

    def __setattr__(self, *a):
        raise AttributeError("letters are immutable")

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    @property
    def is_unit(self) -> bool:
        return self.kind == "a" and not any(self.expo)

    @property
    def internal_degree(self) -> int:
        return 0 if self.kind == "a" else 1

    def sort_key(self):
        return self._key

    def polyvector(self, nvars) -> Polyvector:
        p = Poly.monomial(nvars, self.expo)
        if self.kind == "a":
            return Polyvector.from_poly(p)
        return Polyvector(nvars, 1, {(self.direction,): p})

    def __str__(self):
        mono = "*".join("x%d^%d" % (i + 1, k) if k > 1 else "x%d" % (i + 1)
                        for i, k in enumerate(self.expo) if k)
        if self.kind == "a":
            return mono if mono else "1"
        return (mono + "*" if mono else "") + "D%d" % (self.direction + 1)

    __repr__ = __str__


def a_letter(expo) -> Letter:
    return Letter("a", tuple(expo))

def d_letter(expo, i) -> Letter:
    return Letter("d", tuple(expo), i)


def polyvector_letters(v: Polyvector) -> dict:
    """Decompose a degree<=1 polyvector into letters."""
    out = {}
    if v.degree == 0:
        for e, c in v.as_poly().terms.items():
            out[a_letter(e)] = out.get(a_letter(e), ZERO) + c
    elif v.degree == 1:
        for (i,), p in v.terms.items():
            for e, c in p.terms.items():
                L = d_letter(e, i)
                out[L] = out.get(L, ZERO) + c
    else:
        raise ValueError("letters live in degrees 0 and 1 only")
    return {k: c for k, c in out.items() if c}


def word_key(w):
    return tuple(L.sort_key() for L in w)


def sigma_word(w) -> int:
    return sum(L.sigma for L in w) % 2


def factor_parity(w) -> int:
    """Parity of a word as a factor of the symmetric layer."""
    return (sigma_word(w) + 1) % 2


def word_weight(w) -> int:
    return sum(L.weight for L in w)


def der_count(w) -> int:
    return sum(1 for L in w if L.kind == "d")


def multideg(w):
    """Multiset key of a word: its letters sorted by the alphabet order."""
    return tuple(sorted(w, key=Letter.sort_key))


def add_to(acc: dict, key, c):
    s = acc.get(key, ZERO) + c
    if s:
        acc[key] = s
    elif key in acc:
        del acc[key]


def scale(ws: dict, c) -> dict:
    if not c:
        return {}
    return {k: v * c for k, v in ws.items()}


def add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        add_to(out, k, c)
    return out


# ---------------------------------------------------------------------------
# shuffles


def shuffle(u, v, cu=ONE, cv=ONE) -> dict:
    """Signed shuffle of two words: sum over interleavings, Koszul signs
    from the sigma parities of the crossed letter pairs."""
    out = {}
    lu, lv = len(u), len(v)

    def rec(i, j, word, sign):
        if i == lu and j == lv:
            add_to(out, tuple(word), sign * cu * cv)
            return
        if i < lu:
            rec(i + 1, j, word + [u[i]], sign)
        if j < lv:
            # v[j] jumps over the remaining letters of u
            cross = sum(u[k].sigma for k in range(i, lu)) * v[j].sigma
            rec(i, j + 1, word + [v[j]], sign * (-1) ** (cross % 2))

    rec(0, 0, [], ONE)
    return out


def shuffle_sums(a: dict, b: dict) -> dict:
    out = {}
    for u, cu in a.items():
        for v, cv in b.items():
            for w, c in shuffle(u, v, cu, cv).items():
                add_to(out, w, c)
    return out


# ---------------------------------------------------------------------------
# Lyndon machinery


def is_lyndon(w, key=word_key) -> bool:
    """Strictly smallest among its proper rotations (hence aperiodic)."""
    n = len(w)
    if n == 0:
        return False
    kw = key(w)
    for r in range(1, n):
        if key(w[r:] + w[:r]) <= kw:
            return False
    return True


def super_lyndon_words(alpha) -> list:
    """Candidate basis of the multidegree-alpha quotient component:
    Lyndon words plus doubled odd Lyndon words."""
    words = words_of_multideg(alpha)
    out = [w for w in words if is_lyndon(w)]
    half = _half_multiset(alpha)
    if half is not None:
        for v in words_of_multideg(half):
            if is_lyndon(v) and sigma_word(v) == 1:
                out.append(v + v)
    return sorted(out, key=word_key)


def _half_multiset(alpha):
    counts = {}
    for L in alpha:
        counts[L] = counts.get(L, 0) + 1
    if any(c % 2 for c in counts.values()):
        return None
    half = []
    for L, c in counts.items():
        half.extend([L] * (c // 2))
    return tuple(sorted(half, key=Letter.sort_key))


def words_of_multideg(alpha) -> list:
    """All distinct orderings of the letter multiset, sorted."""
    seen = set()
    out = []
    for p in permutations(alpha):
        if p not in seen:
            seen.add(p)
            out.append(p)
    return sorted(out, key=word_key)


def _sub_multisets(alpha):
    """Unordered splits of the multiset into two nonempty halves, once each."""
    distinct = []
    for L in alpha:
        if not distinct or distinct[-1][0] != L:
            distinct.append([L, 0])
        distinct[-1][1] += 1
    keys = [d[0] for d in distinct]
    mults = [d[1] for d in distinct]
    total = len(alpha)
    splits = []

    def rec(i, left):
        if i == len(keys):
            ln = sum(left)
            if 0 < ln < total:
                lw = tuple(sorted([k for k, m in zip(keys, left) for _ in range(m)],
                                  key=Letter.sort_key))
                rw = tuple(sorted([k for k, m, l in zip(keys, mults, left)
                                   for _ in range(m - l)], key=Letter.sort_key))
                splits.append((lw, rw))
            return
        for m in range(mults[i] + 1):
            rec(i + 1, left + [m])

    rec(0, [])
    seen = set()
    out = []
    for lw, rw in splits:
        key = tuple(sorted((word_key(lw), word_key(rw))))
        if key not in seen:
            seen.add(key)
            out.append((lw, rw))
    return out


class _MultidegCache:
    """Echelonized shuffle span and candidate basis for one multidegree."""

    def __init__(self, alpha):
        self.alpha = alpha
        self.words = words_of_multideg(alpha)
        self.index = {w: i for i, w in enumerate(self.words)}
        n = len(self.words)
        rows = []
        for beta, gamma in _sub_multisets(alpha):
            for u in words_of_multideg(beta):
                for v in words_of_multideg(gamma):
                    sh = shuffle(u, v)
                    rows.append({self.index[w]: c for w, c in sh.items()})
        from .exactlin import _rref
        pivots, rrows = _rref(rows, n)
        self.pivots = pivots
        self.rref_rows = rrows
        self.candidates = super_lyndon_words(alpha)
        self.candidate_set = set(self.candidates)
        self.delta_solver = None     # built lazily by reconstruct
        dim = n - len(pivots)
        if len(self.candidates) != dim:
            raise ValueError("candidate basis mismatch at %r: %d candidates, dim %d"
                             % (alpha, len(self.candidates), dim))
        # reduced coordinates of the candidates, then invert
        free = [j for j in range(n) if j not in set(pivots)]
        self.free = free
        free_pos = {j: t for t, j in enumerate(free)}
        cols = []
        for w in self.candidates:
            vec = self._reduce({self.index[w]: ONE})
            cols.append([vec.get(j, ZERO) for j in free])
        m = SparseMat(len(free), len(self.candidates),
                      {(i, j): cols[j][i] for j in range(len(cols))
                       for i in range(len(free)) if cols[j][i]})
        self.inv_cols = []
        for t in range(len(free)):
            rhs = [ONE if i == t else ZERO for i in range(len(free))]
            sol = solve_linear(m, rhs)
            assert sol is not None, "candidate words fail to span %r" % (alpha,)
            self.inv_cols.append(sol)

    def _reduce(self, vec: dict) -> dict:
        v = dict(vec)
        for pc, row in zip(self.pivots, self.rref_rows):
            c = v.get(pc)
            if c:
                for j, w in row.items():
                    add_to(v, j, -c * w)
        return v

    def normalize(self, ws: dict) -> dict:
        vec = {}
        for w, c in ws.items():
            add_to(vec, self.index[w], c)
        red = self._reduce(vec)
        out = {}
        for t, j in enumerate(self.free):
            c = red.get(j)
            if not c:
                continue
            for k, coef in enumerate(self.inv_cols[t]):
                if coef:
                    add_to(out, self.candidates[k], c * coef)
        return out


_caches = {}


def _cache(alpha) -> _MultidegCache:
    c = _caches.get(alpha)
    if c is None:
        c = _MultidegCache(alpha)
        _caches[alpha] = c
    return c


def lie_normalize(ws: dict) -> dict:
    """Class modulo the shuffle span, in the Lyndon coordinate basis.

    Accepts arbitrary mixed-multidegree sums; normalizes componentwise.
    """
    by_deg = {}
    out = {}
    for w, c in ws.items():
        alpha = multideg(w)
        cache = _cache(alpha)
        if w in cache.candidate_set:
            add_to(out, w, c)       # already in normal form
        else:
            part = by_deg.setdefault(alpha, {})
            add_to(part, w, c)
    for alpha, part in by_deg.items():
        for w, c in _cache(alpha).normalize(part).items():
            add_to(out, w, c)
    return out


def quotient_dim(alpha) -> int:
    return len(_cache(alpha).candidates)


def mobius(n: int) -> int:
    out, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    if m > 1:
        out = -out
    return out


def witt_dim(q: int, length: int) -> int:
    """Necklace count: dimension of the length-l piece on q even letters."""
    assert q >= 1 and length >= 1
    total = 0
    for d in range(1, length + 1):
        if length % d == 0:
            total += mobius(d) * q ** (length // d)
    assert total % length == 0
    return total // length


# ---------------------------------------------------------------------------
# cobracket and reconstruction


def word_splits(w):
    """Plain deconcatenations (prefix, suffix), both nonempty."""
    return [(w[:i], w[i:]) for i in range(1, len(w))]


_cobracket_memo = {}


def cobracket_word(w) -> dict:
    """Antisymmetrized deconcatenation of one word, sides normalized.

    Output maps (basis word, basis word) -> coefficient.
    """
    got = _cobracket_memo.get(w)
    if got is not None:
        return got
    out = {}
    for pre, post in word_splits(w):
        sgn = (-1) ** (sigma_word(pre) * sigma_word(post))
        left = lie_normalize({pre: ONE})
        right = lie_normalize({post: ONE})
        for w1, c1 in left.items():
            for w2, c2 in right.items():
                add_to(out, (w1, w2), c1 * c2)
                add_to(out, (w2, w1), -sgn * c1 * c2)
    _cobracket_memo[w] = out
    return out


def cobracket(ws: dict) -> dict:
    out = {}
    for w, c in ws.items():
        for pair, v in cobracket_word(w).items():
            add_to(out, pair, c * v)
    return out


def _delta_solver(cache):
    """Prefactored left inverse of the cobracket on one multidegree.

    Stored as pivot rows (candidate index, row of the inverse) plus
    consistency rows that must annihilate any admissible right-hand side.
    """
    if cache.delta_solver is not None:
        return cache.delta_solver
    basis = cache.candidates
    nb = len(basis)
    pair_index = {}
    rows = {}
    for j, w in enumerate(basis):
        for pair, c in cobracket_word(w).items():
            i = pair_index.setdefault(pair, len(pair_index))
            rows.setdefault(i, {})[j] = c
    npairs = len(pair_index)
    aug = []
    for i in range(npairs):
        r = dict(rows.get(i, {}))
        r[nb + i] = ONE
        aug.append(r)
    from .exactlin import _rref
    pivots, rref = _rref(aug, nb + npairs)
    pivot_rows = []
    constraints = []
    for pc, row in zip(pivots, rref):
        rhs_part = {k - nb: v for k, v in row.items() if k >= nb}
        if pc < nb:
            pivot_rows.append((pc, rhs_part))
        else:
            constraints.append(rhs_part)
    cache.delta_solver = (pair_index, pivot_rows, constraints, nb)
    return cache.delta_solver


def reconstruct(head: dict, cob: dict) -> dict:
    """Inverse of z -> (corestriction z, cobracket z) on the quotient.

    head maps Letter -> coefficient (the length-1 component); cob maps
    (basis word, basis word) -> coefficient.  Raises ValueError when no
    preimage exists (co-Jacobi-inconsistent input).
    """
    out = {}
    for L, c in head.items():
        if c:
            add_to(out, (L,), c)
    by_deg = {}
    for (w1, w2), c in cob.items():
        if c:
            alpha = multideg(w1 + w2)
            by_deg.setdefault(alpha, {})[(w1, w2)] = c
    for alpha, target in by_deg.items():
        pair_index, pivot_rows, constraints, nb = _delta_solver(_cache(alpha))
        if len(pivot_rows) < nb:
            raise ValueError("cobracket not injective at %r" % (alpha,))
        rhs = {}
        for pair, c in target.items():
            if pair not in pair_index:
                raise ValueError("no preimage: unreachable pair %r" % (pair,))
            rhs[pair_index[pair]] = c
        for con in constraints:
            s = ZERO
            for r, v in con.items():
                c = rhs.get(r)
                if c:
                    s += v * c
            if s:
                raise ValueError("no preimage: inconsistent cobracket data at %r" % (alpha,))
        basis = _cache(alpha).candidates
        for p, inv_row in pivot_rows:
            s = ZERO
            for r, v in inv_row.items():
                c = rhs.get(r)
                if c:
                    s += v * c
            if s:
                add_to(out, basis[p], s)
    return out


# ---------------------------------------------------------------------------
# the bar differential (product/module merges)


def _merge_letters(a: Letter, b: Letter):
    """Product/module-action merge of adjacent letters, with its sign.

    The mixed merge is order sensitive: derivation-then-monomial carries a
    minus (the unique choice making the differential kill shuffles, i.e.
    descend to the quotient; see test_harrison_shuffle_derivation).
    """
    if a.kind == "d" and b.kind == "d":
        raise ValueError("two derivation letters cannot merge")
    expo = tuple(x + y for x, y in zip(a.expo, b.expo))
    if a.kind == "d":
        return d_letter(expo, a.direction), -1
    if b.kind == "d":
        return d_letter(expo, b.direction), 1
    return a_letter(expo), 1


_harrison_memo = {}


def harrison_d_word(w) -> dict:
    """Bar differential of one word: merge adjacent letters, bar signs."""
    got = _harrison_memo.get(w)
    if got is not None:
        return got
    if der_count(w) >= 2:
        raise ValueError("at most one derivation letter per word")
    out = {}
    for i in range(len(w) - 1):
        sgn = (-1) ** (sum(L.sigma for L in w[:i]) % 2)
        letter, msign = _merge_letters(w[i], w[i + 1])
        merged = w[:i] + (letter,) + w[i + 2:]
        add_to(out, merged, Fraction(sgn * msign))
    _harrison_memo[w] = out
    return out


def harrison_d(ws: dict) -> dict:
    """Bar differential on normalized sums; output renormalized."""
    acc = {}
    for w, c in ws.items():
        for w2, v in harrison_d_word(w).items():
            add_to(acc, w2, c * v)
    return lie_normalize(acc)


# ---------------------------------------------------------------------------
# the bracket extension (heads plus cobracket compatibility)


_bracket_memo = {}


def bialgebra_bracket_words(X, Y, nvars: int) -> dict:
    """Bracket of two basis words, determined by its corestriction
    (the polyvector bracket of the heads) and the cocycle rule
        delta[X,Y] = ad_X(delta Y) - (-1)^(sigma X sigma Y) ad_Y(delta X),
    assembled by reconstruct.  Memoized per word pair."""
    from .polyalg import schouten
    key = (X, Y, nvars)
    got = _bracket_memo.get(key)
    if got is not None:
        return got
    head = {}
    if len(X) == 1 and len(Y) == 1:
        hv = schouten(X[0].polyvector(nvars), Y[0].polyvector(nvars))
        head = polyvector_letters(hv)
    sX, sY = sigma_word(X), sigma_word(Y)
    cob = {}
    for (y1, y2), c in cobracket_word(Y).items():
        # ad_X(y1 (x) y2) = [X,y1] (x) y2 + (-1)^(sigma X sigma y1) y1 (x) [X,y2]
        for w, v in bialgebra_bracket_words(X, y1, nvars).items():
            for pair, cc in _tensor_left(w, y2).items():
                add_to(cob, pair, c * v * cc)
        s = (-1) ** (sX * sigma_word(y1))
        for w, v in bialgebra_bracket_words(X, y2, nvars).items():
            for pair, cc in _tensor_right(y1, w).items():
                add_to(cob, pair, s * c * v * cc)
    flip = -((-1) ** (sX * sY))
    for (x1, x2), c in cobracket_word(X).items():
        for w, v in bialgebra_bracket_words(Y, x1, nvars).items():
            for pair, cc in _tensor_left(w, x2).items():
                add_to(cob, pair, flip * c * v * cc)
        s = (-1) ** (sY * sigma_word(x1))
        for w, v in bialgebra_bracket_words(Y, x2, nvars).items():
            for pair, cc in _tensor_right(x1, w).items():
                add_to(cob, pair, flip * s * c * v * cc)
    out = reconstruct(head, cob)
    _bracket_memo[key] = out
    return out


def _tensor_left(w, fixed):
    return {(w, fixed): ONE}


def _tensor_right(fixed, w):
    return {(fixed, w): ONE}


def bialgebra_bracket(xs: dict, ys: dict, nvars: int) -> dict:
    """Bilinear extension of the word-pair bracket to normalized sums."""
    out = {}
    for X, cx in xs.items():
        for Y, cy in ys.items():
            for w, c in bialgebra_bracket_words(X, Y, nvars).items():
                add_to(out, w, cx * cy * c)
    return out


# ---------------------------------------------------------------------------
# the symmetric (cocommutative) layer


def sort_factors(words) -> tuple:
    """Canonical factor order with the Koszul sign of the sort.

    Returns (sorted tuple of words, sign); (None, 0) when an odd factor
    repeats (its square is zero).
    """
    items = list(words)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and word_key(items[j - 1]) > word_key(items[j]):
            sign *= (-1) ** (factor_parity(items[j - 1]) * factor_parity(items[j]))
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b and factor_parity(a) == 1:
            return None, 0
    return tuple(items), sign


def sym_coproduct(factors) -> dict:
    """Splits of a factor multiset into ordered complementary pairs.

    Single factors map to zero (reduced coalgebra).  Koszul signs come
    from extracting the chosen factors to the front; multiplicities arise
    from merging equal splits.
    """
    k = len(factors)
    out = {}
    parities = [factor_parity(w) for w in factors]
    for mask in range(1, 2 ** k - 1):
        chosen = [i for i in range(k) if mask >> i & 1]
        rest = [i for i in range(k) if not mask >> i & 1]
        eps = 0
        for i in chosen:
            eps += parities[i] * sum(parities[j] for j in rest if j < i)
        left = tuple(factors[i] for i in chosen)
        right = tuple(factors[i] for i in rest)
        add_to(out, (left, right), Fraction((-1) ** (eps % 2)))
    return out
