"""Free bracket/product envelope of the bridge coalgebra.

The envelope on a set of coalgebra basis monomials (the generators) is the
free graded-commutative algebra on the free odd-bracket algebra they
generate: basis elements are products of bracket trees, trees are indexed
by Lyndon words over the generator alphabet (plus squares of odd-parity
trees), and tree arithmetic is done inside the tensor algebra on the
desuspended generators, where the odd bracket becomes the plain graded
commutator

    [A, B] = A (x) B - (-1)^(q(A) q(B)) B (x) A,   q(g) = rho(g) + 1,

with rho(g) the parity of the generator inside the envelope.  Coordinates
in the tree basis are obtained exactly by solving against the cached
tensor expansions, so no tree identity is ever assumed, only verified.

The differential acts on a generator by three parts: the coalgebra
codifferential (one leaf), word splitting into a product of two
generators, and factor splitting into a bracket of two generators; it
extends as a derivation for both the product and the bracket.  The
evaluation map to polyvector fields sends a generator to its single
letter (zero otherwise), trees through the odd bracket and products
through the wedge; the chain property, multiplicativity and bracket
compatibility are checked by the verification suites, not assumed.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .exactlin import _rref
from .polyalg import Polyvector, schouten, wedge
from .cooperadic import (add_to, factor_parity, sigma_word, word_key, word_splits,
                         lie_normalize, sort_factors, bialgebra_bracket)
from .formality import xi_d

ZERO = Fraction(0)
ONE = Fraction(1)


def gen_sort_key(g):
    return tuple(word_key(w) for w in g)


def gen_parity(g) -> int:
    """Parity of a coalgebra monomial inside the envelope."""
    return sum(factor_parity(w) for w in g) % 2


def q_parity(g) -> int:
    """Desuspended parity used by the tensor-algebra commutator."""
    return (gen_parity(g) + 1) % 2


def tree_parity(tree) -> int:
    """Envelope parity of a bracket tree: leaf parities plus one per bracket."""
    return (sum(gen_parity(g) for g in tree) + len(tree) - 1) % 2


class Envelope:
    """Exact arithmetic in the free envelope over one variable count."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self._tree_cache = {}
        self._dgen_cache = {}
        self._dtree_cache = {}
        self._value_cache = {}

    # -- free odd-bracket layer (tensor algebra arithmetic) ----------------

    def _tensor_bracket(self, a: dict, b: dict) -> dict:
        out = {}
        for u, cu in a.items():
            qu = sum(q_parity(g) for g in u) % 2
            for v, cv in b.items():
                qv = sum(q_parity(g) for g in v) % 2
                add_to(out, u + v, cu * cv)
                add_to(out, v + u, -cu * cv * (-1) ** (qu * qv))
        return out

    def _is_gen_lyndon(self, word) -> bool:
        n = len(word)
        kw = tuple(gen_sort_key(g) for g in word)
        for r in range(1, n):
            rot = kw[r:] + kw[:r]
            if rot <= kw:
                return False
        return True

    def tree_words(self, gens_multiset):
        """Tree index words for one generator multiset: Lyndon words plus
        doubled odd-parity Lyndon words."""
        words = _distinct_perms(gens_multiset)
        out = [w for w in words if self._is_gen_lyndon(w)]
        counts = {}
        for g in gens_multiset:
            counts[g] = counts.get(g, 0) + 1
        if all(c % 2 == 0 for c in counts.values()):
            half = tuple(sorted([g for g, c in counts.items() for _ in range(c // 2)],
                                key=gen_sort_key))
            for v in _distinct_perms(half):
                if self._is_gen_lyndon(v) and sum(q_parity(g) for g in v) % 2 == 1:
                    out.append(v + v)
        return sorted(out, key=lambda w: tuple(gen_sort_key(g) for g in w))

    def tree_expand(self, tree) -> dict:
        """Tensor expansion of the standard bracketing of a tree word."""
        got = self._tree_cache.get(tree)
        if got is not None:
            return got
        if len(tree) == 1:
            out = {tree: ONE}
        else:
            half = len(tree) // 2
            if len(tree) % 2 == 0 and tree[:half] == tree[half:] \
                    and self._is_gen_lyndon(tree[:half]):
                u = v = tree[:half]
            else:
                u, v = _standard_factorization(tree, self._is_gen_lyndon)
            out = self._tensor_bracket(self.tree_expand(u), self.tree_expand(v))
        self._tree_cache[tree] = out
        return out

    def _coord_solver(self, key_multiset):
        """Prefactored coordinates-in-tree-basis for one generator multiset."""
        attr = getattr(self, "_coord_cache", None)
        if attr is None:
            self._coord_cache = {}
        solver = self._coord_cache.get(key_multiset)
        if solver is not None:
            return solver
        trees = self.tree_words(key_multiset)
        word_index = {}
        rows = {}
        for j, t in enumerate(trees):
            for w, c in self.tree_expand(t).items():
                i = word_index.setdefault(w, len(word_index))
                rows.setdefault(i, {})[j] = c
        nb = len(trees)
        aug = []
        for i in range(len(word_index)):
            r = dict(rows.get(i, {}))
            r[nb + i] = ONE
            aug.append(r)
        pivots, rref = _rref(aug, nb + len(word_index))
        pivot_rows, constraints = [], []
        for pc, row in zip(pivots, rref):
            rhs_part = {k - nb: v for k, v in row.items() if k >= nb}
            if pc < nb:
                pivot_rows.append((pc, rhs_part))
            else:
                constraints.append(rhs_part)
        if len(pivot_rows) < nb:
            raise ValueError("tree words dependent at %r" % (key_multiset,))
        solver = (trees, word_index, pivot_rows, constraints)
        self._coord_cache[key_multiset] = solver
        return solver

    def lie_coords(self, tensor: dict) -> dict:
        """Coordinates of a bracket-algebra tensor in the tree basis.

        Raises if the tensor is not a bracket element (consistency rows)."""
        by_ms = {}
        for w, c in tensor.items():
            ms = tuple(sorted(w, key=gen_sort_key))
            add_to(by_ms.setdefault(ms, {}), w, c)
        out = {}
        for ms, part in by_ms.items():
            trees, word_index, pivot_rows, constraints = self._coord_solver(ms)
            rhs = {}
            for w, c in part.items():
                if w not in word_index:
                    raise ValueError("not a bracket element: stray word %r" % (w,))
                rhs[word_index[w]] = c
            for con in constraints:
                s = ZERO
                for r, v in con.items():
                    c = rhs.get(r)
                    if c:
                        s += v * c
                if s:
                    raise ValueError("not a bracket element at %r" % (ms,))
            for p, inv_row in pivot_rows:
                s = ZERO
                for r, v in inv_row.items():
                    c = rhs.get(r)
                    if c:
                        s += v * c
                if s:
                    add_to(out, trees[p], s)
        return out

    # -- monomial (commutative) layer ---------------------------------------

    def sort_trees(self, trees):
        items = list(trees)
        sign = 1
        for i in range(1, len(items)):
            j = i
            while j > 0 and self._tree_key(items[j - 1]) > self._tree_key(items[j]):
                sign *= (-1) ** (tree_parity(items[j - 1]) * tree_parity(items[j]))
                items[j - 1], items[j] = items[j], items[j - 1]
                j -= 1
        for a, b in zip(items, items[1:]):
            if a == b and tree_parity(a) == 1:
                return None, 0
        return tuple(items), sign

    @staticmethod
    def _tree_key(tree):
        return (len(tree),) + tuple(gen_sort_key(g) for g in tree)

    def product(self, a: dict, b: dict) -> dict:
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                key, sgn = self.sort_trees(m1 + m2)
                if key is None:
                    continue
                add_to(out, key, c1 * c2 * sgn)
        return out

    def bracket(self, a: dict, b: dict) -> dict:
        """Odd bracket on the envelope, extended by the same frozen Leibniz
        rule the polyvector bracket satisfies:

            [a, s.r] = [a,s].r + (-1)^((rho(a)+1) rho(s)) s.[a,r],
            [x, y]   = -(-1)^((rho(x)+1)(rho(y)+1)) [y, x].
        """
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                for mk, mc in self._br_mono(m1, m2).items():
                    add_to(out, mk, c1 * c2 * mc)
        return out

    def _br_mono(self, m1, m2) -> dict:
        if len(m2) > 1:
            s, rest2 = (m2[0],), m2[1:]
            rho1 = sum(tree_parity(t) for t in m1) % 2
            rho_s = tree_parity(m2[0])
            first = self.product(self._br_mono(m1, s), {rest2: ONE})
            second = self.product({s: ONE}, self._br_mono(m1, rest2))
            sgn = (-1) ** (((rho1 + 1) * rho_s) % 2)
            out = dict(first)
            for mk, mc in second.items():
                add_to(out, mk, mc * sgn)
            return out
        if len(m1) > 1:
            rho1 = sum(tree_parity(t) for t in m1) % 2
            rho2 = tree_parity(m2[0])
            flip = -((-1) ** (((rho1 + 1) * (rho2 + 1)) % 2))
            return {mk: mc * flip for mk, mc in self._br_mono(m2, m1).items()}
        br = self._tensor_bracket(self.tree_expand(m1[0]), self.tree_expand(m2[0]))
        out = {}
        for t, c in self.lie_coords(br).items():
            key, sgn = self.sort_trees((t,))
            if key is not None:
                add_to(out, key, c * sgn)
        return out

    # -- the differential ----------------------------------------------------

    def d_generator(self, g) -> dict:
        """Differential of a generator: one-leaf coalgebra part, word-split
        product part, factor-split bracket part."""
        got = self._dgen_cache.get(g)
        if got is not None:
            return got
        out = {}
        for key, c in xi_d(g, self.nvars).items():
            add_to(out, ((key,),), c * S_INT)
        from .formality import split_distributions
        factors = list(g)
        parities = [factor_parity(w) for w in factors]
        for i, w in enumerate(factors):
            lead = (-1) ** (sum(parities[:i]) % 2)
            for pre, post in word_splits(w):
                split_sign = SPLIT_GLOBAL * (-1) ** sigma_word(pre)
                left_n = lie_normalize({pre: ONE})
                right_n = lie_normalize({post: ONE})
                for left, right, sgn in split_distributions(factors, parities, i, pre, post):
                    for w1, c1 in left_n.items():
                        for w2, c2 in right_n.items():
                            k1, s1 = sort_factors([w1 if x is pre else x for x in left])
                            k2, s2 = sort_factors([w2 if x is post else x for x in right])
                            if k1 is None or k2 is None:
                                continue
                            term = self.product({((k1,),): ONE}, {((k2,),): ONE})
                            c = lead * split_sign * c1 * c2 * s1 * s2 * sgn
                            for mk, mc in term.items():
                                add_to(out, mk, mc * c)
        if len(factors) > 1:
            for mask in range(1 << (len(factors) - 1)):
                sel = [0] + [t + 1 for t in range(len(factors) - 1) if mask >> t & 1]
                unsel = [t for t in range(len(factors)) if t not in sel]
                if not unsel:
                    continue
                eps = 0
                for t in sel:
                    eps += parities[t] * sum(parities[u] for u in unsel if u < t)
                k1, s1 = sort_factors([factors[t] for t in sel])
                k2, s2 = sort_factors([factors[t] for t in unsel])
                if k1 is None or k2 is None:
                    continue
                br = self.bracket({((k1,),): ONE}, {((k2,),): ONE})
                c = _br_sign(k1, k2) * s1 * s2 * (-1) ** (eps % 2)
                for mk, mc in br.items():
                    add_to(out, mk, mc * c)
        self._dgen_cache[g] = out
        return out

    def d(self, elem: dict) -> dict:
        """Derivation extension of d_generator over products and brackets."""
        out = {}
        for mono, coef in elem.items():
            pref = 0
            for i, tree in enumerate(mono):
                dtree = self._d_tree(tree)
                sign = (-1) ** (pref % 2)
                for mk, mc in dtree.items():
                    # act in place: the replacement trees take slot i
                    key, sgn = self.sort_trees(mono[:i] + mk + mono[i + 1:])
                    if key is None:
                        continue
                    add_to(out, key, coef * mc * sign * sgn)
                pref += tree_parity(tree)
        return out

    def _d_tree(self, tree) -> dict:
        if len(tree) == 1:
            return self.d_generator(tree[0])
        got = self._dtree_cache.get(tree)
        if got is not None:
            return got
        half = len(tree) // 2
        if len(tree) % 2 == 0 and tree[:half] == tree[half:] \
                and self._is_gen_lyndon(tree[:half]):
            u = v = tree[:half]
        else:
            u, v = _standard_factorization(tree, self._is_gen_lyndon)
        du = self._d_tree(u)
        dv = self._d_tree(v)
        a = self.bracket(du, {(v,): ONE})
        b = self.bracket({(u,): ONE}, dv)
        sgn = (-1) ** ((tree_parity(u) + DTREE_SHIFT) % 2)
        out = dict(a)
        for mk, mc in b.items():
            add_to(out, mk, mc * sgn)
        self._dtree_cache[tree] = out
        return out

    # -- evaluation onto polyvectors ------------------------------------------

    def value_gen(self, g) -> Polyvector:
        """Corestriction: the single letter of a one-factor one-letter
        generator, zero otherwise."""
        if len(g) == 1 and len(g[0]) == 1:
            return g[0][0].polyvector(self.nvars)
        return Polyvector(self.nvars, 0)

    def value_tree(self, tree) -> Polyvector:
        got = self._value_cache.get(tree)
        if got is not None:
            return got
        if len(tree) == 1:
            out = self.value_gen(tree[0])
            self._value_cache[tree] = out
            return out
        half = len(tree) // 2
        if len(tree) % 2 == 0 and tree[:half] == tree[half:] \
                and self._is_gen_lyndon(tree[:half]):
            u = v = tree[:half]
        else:
            u, v = _standard_factorization(tree, self._is_gen_lyndon)
        out = schouten(self.value_tree(u), self.value_tree(v))
        self._value_cache[tree] = out
        return out

    def value(self, elem: dict) -> Polyvector:
        total = Polyvector(self.nvars, 0)
        for mono, coef in elem.items():
            acc = None
            for tree in mono:
                v = self.value_tree(tree)
                acc = v if acc is None else wedge(acc, v)
                if acc.is_zero():
                    break
            if acc is not None and not acc.is_zero():
                total = total + acc.scale(coef)
        return total


_BR_EXP = (0, 1, 0)     # exponents (a, b, c) of the factor-split sign
S_INT = 1               # sign of the one-leaf coalgebra part
SPLIT_GLOBAL = 1        # global sign of the word-split product part
DTREE_SHIFT = 1         # Leibniz twist of d through a bracket tree


def _br_sign(k1, k2):
    """Sign of the factor-split bracket part, frozen by the audits:
    -(-1)^(a rho1 rho2 + b rho1 + c rho2)."""
    a, b, c = _BR_EXP
    r1, r2 = gen_parity(k1), gen_parity(k2)
    return -((-1) ** ((a * r1 * r2 + b * r1 + c * r2) % 2))


def _distinct_perms(ms):
    from itertools import permutations
    seen = set()
    out = []
    for p in permutations(ms):
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _standard_factorization(word, is_lyndon):
    """Chen-Fox-Lyndon right factorization: the longest proper Lyndon
    suffix and its (necessarily Lyndon) prefix."""
    n = len(word)
    for i in range(1, n):
        if is_lyndon(word[i:]) and is_lyndon(word[:i]):
            return word[:i], word[i:]
    raise ValueError("no standard factorization: %r" % (word,))


def cobar_build(generators, budget: int, nvars: int):
    """Basis of the envelope on the given generators up to the leaf budget:
    products of bracket trees, total leaf count bounded."""
    env = Envelope(nvars)
    trees = []
    for leaves in range(1, budget + 1):
        for combo in combinations_with_replacement(sorted(generators, key=gen_sort_key),
                                                   leaves):
            trees.extend(env.tree_words(tuple(combo)))
    monos = []
    trees = sorted(set(trees), key=Envelope._tree_key)
    seen = set()

    def rec(start, current, leaves):
        if current:
            key, sgn = env.sort_trees(current)
            if key is not None and key == tuple(current) and key not in seen:
                seen.add(key)
                monos.append(key)
        for t in range(start, len(trees)):
            nl = leaves + len(trees[t])
            if nl > budget:
                continue
            rec(t, current + [trees[t]], nl)

    rec(0, [], 0)
    return env, sorted(monos, key=lambda m: tuple(Envelope._tree_key(t) for t in m))


# ---------------------------------------------------------------------------
# the two-step evaluation through the commutative envelope


def collapse_to_words(env: Envelope, elem: dict) -> dict:
    """First comparison step: collapse the bracket layer onto the word
    level (one-factor generators keep their word, others die; trees fold
    through the word bracket; products multiply in the commutative
    envelope of words)."""
    out = {}
    for mono, coef in elem.items():
        parts = []
        for tree in mono:
            val = _collapse_tree(env, tree)
            parts.append(val)
        acc = {(): ONE}
        for val in parts:
            nxt = {}
            for fk, fc in acc.items():
                for w, wc in val.items():
                    key, sgn = sort_factors(list(fk) + [w])
                    if key is None:
                        continue
                    add_to(nxt, key, fc * wc * sgn)
            acc = nxt
            if not acc:
                break
        for fk, fc in acc.items():
            add_to(out, fk, coef * fc)
    return out


def _collapse_tree(env: Envelope, tree) -> dict:
    if len(tree) == 1:
        g = tree[0]
        return {g[0]: ONE} if len(g) == 1 else {}
    half = len(tree) // 2
    if len(tree) % 2 == 0 and tree[:half] == tree[half:] \
            and env._is_gen_lyndon(tree[:half]):
        u = v = tree[:half]
    else:
        u, v = _standard_factorization(tree, env._is_gen_lyndon)
    return bialgebra_bracket(_collapse_tree(env, u), _collapse_tree(env, v), env.nvars)


def words_value(nvars: int, word_mono: dict) -> Polyvector:
    """Second comparison step: single-letter word factors to letters,
    wedged together; longer factors vanish."""
    total = Polyvector(nvars, 0)
    for fk, coef in word_mono.items():
        acc = None
        dead = False
        for w in fk:
            if len(w) != 1:
                dead = True
                break
            v = w[0].polyvector(nvars)
            acc = v if acc is None else wedge(acc, v)
        if dead or acc is None:
            continue
        total = total + acc.scale(coef)
    return total
