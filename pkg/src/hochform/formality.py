"""The bridge coalgebra between the operator and polyvector worlds.

Basis monomials are symmetric products of Lyndon-normal-form words whose
letters come from A (+) Der(A), with at most one derivation letter per
word.  The codifferential has two parts:

* a bar part acting inside each word factor (adjacent merges through the
  product and module action),
* a pairing part replacing two factors by their bialgebra bracket.

Sign table (frozen by the d^2 = 0 and corestriction-commutation audits):
the bar part acts in place, crossing earlier factors with the factor
parities p(w); the pairing part extracts the two factors to the front
with p-Koszul signs, carries the desuspension factor (-1)^(sigma of the
first factor), and a global minus; word splits (in the commutative window
and the cogenerator splitting) carry (-1)^(sigma of the prefix).

The filtration degree of a monomial is its total letter count minus one;
both parts of the codifferential lower it by exactly one.

The corestricted coderivation values (the m-values) vanish on monomials
with three or more letters; on two-letter monomials they are the cup
product or operator bracket of the letters, matching the polyvector-side
wedge/action and odd bracket; the obstruction solver assembles the linear
systems that force the two quadratic ansatz families to vanish on generic
data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .exactlin import SparseMat, rank_kernel
from .polyalg import Poly, Polyvector, monomials_of_degree, apply_derivation, schouten, wedge
from .hochschild import Cochain, cup, gerst_bracket, hochschild_d, hkr
from .cooperadic import (Letter, a_letter, d_letter, word_key, sigma_word, factor_parity,
                         word_weight, der_count, multideg, super_lyndon_words, add_to,
                         lie_normalize, harrison_d_word, bialgebra_bracket_words,
                         word_splits, sort_factors)

ZERO = Fraction(0)
ONE = Fraction(1)

# frozen global signs (see the audits in tests/test_formality.py)
CE_GLOBAL = -1          # pairing part of the codifferential
BAR_GLOBAL = 1          # bar part


@dataclass(frozen=True)
class XiBudget:
    max_factors: int
    max_word_len: int
    max_coef_deg: int
    max_weight: int | None = None


def letter_cochain(L: Letter, nvars: int) -> Cochain:
    p = Poly.monomial(nvars, L.expo)
    if L.kind == "a":
        return Cochain.from_poly(p)
    e = [0] * nvars
    e[L.direction] = 1
    return Cochain.single(nvars, p, (tuple(e),))


def monomial_weight(key) -> int:
    return sum(word_weight(w) for w in key)


def filtration_degree(key) -> int:
    """Total letter count minus one; the codifferential drops it by one."""
    return sum(len(w) for w in key) - 1


def xi_letters(nvars: int, max_coef_deg: int):
    """Alphabet for basis enumeration: non-unit monomials and derivations."""
    letters = []
    for d in range(1, max_coef_deg + 1):
        for e in monomials_of_degree(nvars, d):
            letters.append(a_letter(e))
    for d in range(0, max_coef_deg + 1):
        for e in monomials_of_degree(nvars, d):
            for i in range(nvars):
                letters.append(d_letter(e, i))
    return sorted(letters, key=Letter.sort_key)


def xi_words(nvars: int, budget: XiBudget):
    """Lyndon basis words over the alphabet: at most one derivation letter."""
    letters = xi_letters(nvars, budget.max_coef_deg)
    a_side = [L for L in letters if L.kind == "a"]
    d_side = [L for L in letters if L.kind == "d"]
    words = []
    seen = set()
    for length in range(1, budget.max_word_len + 1):
        for n_der in (0, 1):
            if n_der > length:
                continue
            for amono in combinations_with_replacement(a_side, length - n_der):
                ders = [()] if n_der == 0 else [(L,) for L in d_side]
                for dd in ders:
                    alpha = multideg(amono + dd)
                    if alpha in seen:
                        continue
                    seen.add(alpha)
                    if budget.max_weight is not None and word_weight(alpha) > budget.max_weight:
                        continue
                    words.extend(super_lyndon_words(alpha))
    return sorted(words, key=word_key)


def xi_basis(nvars: int, budget: XiBudget):
    """All basis monomials within the budget, deterministically ordered."""
    words = xi_words(nvars, budget)
    out = []
    for k in range(1, budget.max_factors + 1):
        for combo in combinations_with_replacement(words, k):
            key, sgn = sort_factors(combo)
            if key is None or key != combo:
                continue    # repeated odd factor, or not canonically sorted
            if budget.max_weight is not None and monomial_weight(key) > budget.max_weight:
                continue
            out.append(key)
    return out


def _splice(acc, words_out, coef, factors, idx_removed, nvars, at=0):
    """Replace the removed factors by each output word (inserted at
    position `at` of the remaining sequence) and canonical-sort."""
    rest = [w for t, w in enumerate(factors) if t not in idx_removed]
    for wnew, c in words_out.items():
        if der_count(wnew) > 1:
            raise AssertionError("bracket/merge left the one-derivation constraint")
        key, sgn = sort_factors(rest[:at] + [wnew] + rest[at:])
        if key is None:
            continue
        add_to(acc, key, coef * c * sgn)


def xi_d(key, nvars: int) -> dict:
    """Codifferential of a basis monomial; returns a monomial sum."""
    factors = list(key)
    parities = [factor_parity(w) for w in factors]
    acc = {}
    for i, w in enumerate(factors):
        if len(w) > 1:
            sign = BAR_GLOBAL * (-1) ** (sum(parities[:i]) % 2)
            merged = lie_normalize(dict(harrison_d_word(w)))
            _splice(acc, merged, Fraction(sign), factors, {i}, nvars, at=i)
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            e1 = parities[i] * sum(parities[:i])
            e2 = parities[j] * (sum(parities[:j]) - parities[i])
            sign = CE_GLOBAL * (-1) ** ((e1 + e2 + sigma_word(factors[i])) % 2)
            br = bialgebra_bracket_words(factors[i], factors[j], nvars)
            _splice(acc, br, Fraction(sign), factors, {i, j}, nvars)
    return acc


def xi_d_sum(ms: dict, nvars: int) -> dict:
    out = {}
    for key, c in ms.items():
        for k2, v in xi_d(key, nvars).items():
            add_to(out, k2, c * v)
    return out


def split_distributions(factors, parities, i, pre, post):
    """Canonical unshuffles for splitting factor i into (pre, post).

    The original sequence with the factor split in place is unshuffled
    into a left part (containing pre) and a right part (containing post);
    the Koszul sign counts crossings of right-part entries over later
    left-part entries, in the factor parities.  Yields
    (left sequence, right sequence, sign)."""
    seq = []
    for t, w in enumerate(factors):
        if t == i:
            seq.append((pre, factor_parity(pre), "L"))
            seq.append((post, factor_parity(post), "R"))
        else:
            seq.append((w, parities[t], None))
    frees = [t for t, entry in enumerate(seq) if entry[2] is None]
    for mask in range(1 << len(frees)):
        side = {}
        for b, t in enumerate(frees):
            side[t] = "L" if mask >> b & 1 else "R"
        eps = 0
        left, right = [], []
        for t, (w, p, forced) in enumerate(seq):
            s = forced or side[t]
            if s == "L":
                left.append(w)
            else:
                # a right-bound entry crosses every later left-bound entry
                later_left = sum(seq[u][1] for u in range(t + 1, len(seq))
                                 if (seq[u][2] or side[u]) == "L")
                eps += p * later_left
                right.append(w)
        yield left, right, (-1) ** (eps % 2)


def xi_cobracket(key, nvars: int) -> dict:
    """Word-splitting part of the coalgebra structure on monomials.

    Splits one factor and distributes the remaining factors both ways by
    canonical unshuffles; output maps ordered (monomial, monomial) pairs
    to coefficients.  Each unordered split shape appears once (the prefix
    side stays left).
    """
    factors = list(key)
    parities = [factor_parity(w) for w in factors]
    out = {}
    for i, w in enumerate(factors):
        for pre, post in word_splits(w):
            left_n = lie_normalize({pre: ONE})
            right_n = lie_normalize({post: ONE})
            if not left_n or not right_n:
                continue
            for left, right, sgn in split_distributions(factors, parities, i, pre, post):
                for w1, c1 in left_n.items():
                    for w2, c2 in right_n.items():
                        k1, s1 = sort_factors([w1 if x is pre else x for x in left])
                        k2, s2 = sort_factors([w2 if x is post else x for x in right])
                        if k1 is None or k2 is None:
                            continue
                        add_to(out, (k1, k2), c1 * c2 * s1 * s2 * sgn)
    return out


# ---------------------------------------------------------------------------
# corestricted coderivation values and the embedding comparison


def sigma_m_value(key, nvars: int) -> Cochain:
    """Corestricted coderivation value on a basis monomial.

    Zero beyond two letters; the two-letter values are the operator
    bracket (two single-letter factors) and the cup product (one
    two-letter factor), each with the sign (-1)^(degree of the first
    entry).  A single letter maps to its coboundary, which vanishes.
    """
    total_letters = sum(len(w) for w in key)
    if len(key) == 1 and total_letters == 1:
        return hochschild_d(letter_cochain(key[0][0], nvars))
    if len(key) == 2 and total_letters == 2:
        a, b = key[0][0], key[1][0]
        sign = (-1) ** a.internal_degree
        return gerst_bracket(letter_cochain(a, nvars), letter_cochain(b, nvars)).scale(sign)
    if len(key) == 1 and total_letters == 2:
        a, b = key[0][0], key[0][1]
        sign = (-1) ** a.internal_degree
        return cup(letter_cochain(a, nvars), letter_cochain(b, nvars)).scale(sign)
    return Cochain(nvars, 0)


def corestriction_cochain(ms: dict, nvars: int) -> Cochain:
    """Single-letter component of a monomial sum, as a cochain."""
    out = Cochain(nvars, 0)
    for key, c in ms.items():
        if len(key) == 1 and len(key[0]) == 1:
            out = out + letter_cochain(key[0][0], nvars).scale(c)
    return out


def verify_sigma_chain_map(nvars: int, budget: XiBudget) -> dict:
    """Structure constants against the polyvector side, and commutation of
    the coderivation with the corestricted values on the whole basis."""
    letters = xi_letters(nvars, budget.max_coef_deg)
    mismatches = []
    checked = 0
    for a in letters:
        for b in letters:
            checked += 1
            lhs = gerst_bracket(letter_cochain(a, nvars), letter_cochain(b, nvars))
            rhs = hkr(schouten(a.polyvector(nvars), b.polyvector(nvars)))
            if lhs != rhs:
                mismatches.append({"kind": "bracket", "pair": [str(a), str(b)]})
            if a.kind == "d" and b.kind == "d":
                continue    # two-derivation words are outside the coalgebra
            checked += 1
            # cup against wedge/module action: exact in degrees (0,0) and
            # mixed (0,1), where no antisymmetrization correction enters
            lhs = cup(letter_cochain(a, nvars), letter_cochain(b, nvars))
            rhs = hkr(wedge(a.polyvector(nvars), b.polyvector(nvars)))
            if lhs != rhs:
                mismatches.append({"kind": "cup", "pair": [str(a), str(b)]})
    basis = xi_basis(nvars, budget)
    for key in basis:
        checked += 1
        want = sigma_m_value(key, nvars)
        got = corestriction_cochain(xi_d(key, nvars), nvars)
        if want != got:
            mismatches.append({"kind": "coderivation", "monomial": _key_str(key),
                               "want": str(want), "got": str(got)})
    return {"checked": checked, "failures": mismatches, "basis_size": len(basis)}


def _key_str(key):
    return " . ".join("<" + ",".join(str(L) for L in w) + ">" for w in key)


# ---------------------------------------------------------------------------
# obstruction systems


def _random_poly(rng, nvars, max_deg):
    t = {}
    for d in range(0, max_deg + 1):
        for e in monomials_of_degree(nvars, d):
            c = rng.randrange(-3, 4)
            if c:
                t[e] = Fraction(c)
    return Poly(nvars, t)


def _random_derivation(rng, nvars, max_coef_deg):
    terms = {}
    for i in range(nvars):
        p = _random_poly(rng, nvars, max_coef_deg)
        if not p.is_zero():
            terms[(i,)] = p
    return Polyvector(nvars, 1, terms)


def obstruction_solve(which: str, nvars: int = 3, seed: int = 7, instances: int = 6,
                      der_coef_deg: int = 1) -> dict:
    """Assemble and solve the quadratic-ansatz linear system on generic data.

    which = "vff": value(v, f1, f2) = alpha f1 v(f2) + beta f2 v(f1); the
    corestricted square-zero identity on a derivation and three functions
    forces (alpha, beta) = (0, 0).

    which = "vfv": value(v1, f, v2) = mu v2(v1(f)) + nu v1(v2(f)); the
    identity on one two-letter factor and two derivation factors forces
    (mu, nu) = (0, 0).

    Returns the kernel of the assembled system with a full-rank
    certificate; degenerate data yields a larger kernel, which is
    reported, not hidden.
    """
    import random as _random
    rng = _random.Random(seed)
    rows = []
    for _ in range(instances):
        if which == "vff":
            v = _random_derivation(rng, nvars, der_coef_deg)
            f1, f2, f3 = (_random_poly(rng, nvars, 2) for _ in range(3))
            # coefficient polynomials of alpha and beta in the identity
            def m_vff(vv, g1, g2):
                return (g1 * apply_derivation(vv, g2), g2 * apply_derivation(vv, g1))
            t1 = tuple(f3 * q for q in m_vff(v, f1, f2))
            f1v = Polyvector(nvars, 1, {i: f1 * p for i, p in v.terms.items()})
            t2 = m_vff(f1v, f2, f3)
            t3 = m_vff(v, f1 * f2, f3)
            t4 = m_vff(v, f1, f2 * f3)
            alpha_p = t1[0] - t2[0] + t3[0] - t4[0]
            beta_p = t1[1] - t2[1] + t3[1] - t4[1]
        elif which == "vfv":
            v1 = _random_derivation(rng, nvars, der_coef_deg)
            v2 = _random_derivation(rng, nvars, der_coef_deg)
            v3 = _random_derivation(rng, nvars, der_coef_deg)
            f = _random_poly(rng, nvars, 2)

            def m_vfv(a, g, b):
                return (apply_derivation(b, apply_derivation(a, g)),
                        apply_derivation(a, apply_derivation(b, g)))

            def half(b, c):
                # v_b applied to value(v1, f, v_c), bracket term, action term
                w1 = tuple(apply_derivation(b, q) for q in m_vfv(v1, f, c))
                vbc = schouten(v1, b)
                w2 = m_vfv(vbc, f, c)
                w3 = m_vfv(v1, apply_derivation(c, f), b)
                return tuple(w1[i] + w2[i] + w3[i] for i in (0, 1))

            plus = half(v2, v3)
            minus = half(v3, v2)
            alpha_p = plus[0] - minus[0]
            beta_p = plus[1] - minus[1]
        else:
            raise ValueError("unknown obstruction system %r" % which)
        mono_keys = set(alpha_p.terms) | set(beta_p.terms)
        for e in sorted(mono_keys):
            rows.append([alpha_p.terms.get(e, ZERO), beta_p.terms.get(e, ZERO)])
    m = SparseMat.from_rows(rows, cols=2)
    rank, kernel = rank_kernel(m)
    return {
        "system": which,
        "unknowns": 2,
        "rows": len(rows),
        "rank": rank,
        "kernel_dim": kernel.dim,
        "unique_zero": kernel.dim == 0,
        "solution": [0, 0] if kernel.dim == 0 else None,
    }


# ---------------------------------------------------------------------------
# the commutative window (bar-of-algebra homology in a weight window)


def window_words(nvars: int, weight: int, length_cap: int):
    """Basis words of the pure-monomial layer at exact total weight."""
    out = []
    seen = set()
    letters = [a_letter(e) for d in range(1, weight + 1)
               for e in monomials_of_degree(nvars, d)]
    for length in range(1, min(weight, length_cap) + 1):
        for combo in combinations_with_replacement(letters, length):
            if sum(L.weight for L in combo) != weight:
                continue
            alpha = multideg(combo)
            if alpha in seen:
                continue
            seen.add(alpha)
            out.extend(super_lyndon_words(alpha))
    return sorted(out, key=word_key)


def window_basis(nvars: int, weight: int, length_cap: int):
    """Monomials of the commutative envelope per homological degree.

    Degree of a generator word is len - 1; products add degrees and
    weights.  Returns a dict degree -> ordered monomial list.
    """
    gens = []
    for w in range(1, weight + 1):
        gens.extend(window_words(nvars, w, length_cap))
    by_degree = {}

    def rec(start, current, cur_weight):
        if current:
            key, sgn = sort_factors(current)
            if key == tuple(current) and sgn == 1:
                deg = sum(len(w) - 1 for w in current)
                if cur_weight == weight:
                    by_degree.setdefault(deg, []).append(tuple(current))
        for t in range(start, len(gens)):
            wgt = word_weight(gens[t])
            if cur_weight + wgt > weight:
                continue
            nxt = current + [gens[t]]
            key, sgn = sort_factors(nxt)
            if key is None or key != tuple(nxt):
                continue
            rec(t, nxt, cur_weight + wgt)

    rec(0, [], 0)
    for deg in by_degree:
        by_degree[deg].sort(key=lambda m: tuple(word_key(w) for w in m))
    return by_degree


def window_d(key, nvars: int) -> dict:
    """Differential of the commutative envelope: bar part plus the
    word-splitting-to-product part, extended as a derivation."""
    factors = list(key)
    parities = [factor_parity(w) for w in factors]
    acc = {}
    for i, w in enumerate(factors):
        sign = (-1) ** (sum(parities[:i]) % 2)
        if len(w) > 1:
            merged = lie_normalize(dict(harrison_d_word(w)))
            _splice(acc, merged, Fraction(BAR_GLOBAL * sign), factors, {i}, nvars, at=i)
        for pre, post in word_splits(w):
            split_sign = (-1) ** sigma_word(pre)
            left_n = lie_normalize({pre: ONE})
            right_n = lie_normalize({post: ONE})
            rest = [x for t, x in enumerate(factors) if t != i]
            for w1, c1 in left_n.items():
                for w2, c2 in right_n.items():
                    key2, sgn2 = sort_factors(rest[:i] + [w1, w2] + rest[i:])
                    if key2 is None:
                        continue
                    add_to(acc, key2, Fraction(split_sign * sign) * c1 * c2 * sgn2)
    return acc


def harrison_window(nvars: int, weight_cap: int, length_cap: int) -> dict:
    """Homology table of the commutative envelope per (weight, degree).

    Windows with length_cap < weight are truncated and flagged incomplete;
    complete windows must be concentrated in degree 0 with the dimension
    of the weight piece of the algebra.
    """
    table = {}
    for w in range(1, weight_cap + 1):
        complete = length_cap >= w
        basis = window_basis(nvars, w, length_cap)
        degs = sorted(basis)
        index = {d: {m: i for i, m in enumerate(basis[d])} for d in degs}
        mats = {}
        for d in degs:
            if d - 1 not in basis:
                tgt = {}
            else:
                tgt = index[d - 1]
            entries = {}
            for j, mono in enumerate(basis[d]):
                img = window_d(mono, nvars)
                for k2, c in img.items():
                    if k2 not in tgt:
                        raise AssertionError("window differential leaves the window")
                    entries[(tgt[k2], j)] = c
            mats[d] = SparseMat(len(basis.get(d - 1, [])), len(basis[d]), entries)
        dims = {}
        for d in degs:
            below = mats.get(d + 1, SparseMat(len(basis[d]), 0))
            r_out, ker = rank_kernel(mats[d])
            from .exactlin import rank as _rank
            r_in = _rank(below)
            dims[d] = ker.dim - r_in
        expected0 = len(monomials_of_degree(nvars, w))
        table[w] = {
            "complete": complete,
            "dims": dims,
            "expected_degree0": expected0,
            "ok": (not complete) or (dims.get(0, 0) == expected0
                                     and all(v == 0 for d, v in dims.items() if d != 0)),
        }
    return table
