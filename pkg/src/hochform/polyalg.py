"""Polynomials over Q, derivations, and polyvector fields.

The base algebra is Q[x1..xn].  Polyvector fields of degree k are stored in
the free-module basis d_{i1}^...^d_{ik} (strictly increasing index tuples)
with polynomial coefficients; degree 0 is the algebra itself, degree 1 the
derivations.  The product is the graded-commutative wedge, the bracket the
odd (degree -1) bracket extending the Lie bracket of vector fields and the
action of vector fields on functions.

Sign convention for the bracket, fixed once by an audit over the sixteen
candidate sign tables (the unique one satisfying graded antisymmetry,
Leibniz and Jacobi on the exhaustive test grid): with odd symbols s_i dual
to the derivation slots and left odd derivatives,

    [u, v] = (-1)^(|u|+1) sum_i (du/ds_i)^(dv/dx_i) - sum_i (du/dx_i)^(dv/ds_i).

Textual round-trip format, canonical on output:
``3/2*x1^2*x2 d1^d3`` (polynomial factor, then wedge of slot symbols).
All values are immutable in practice; functions are pure.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations

Rat = Fraction
ZERO = Fraction(0)


def _grlex(e):
    return (sum(e), tuple(-c for c in e))


class Poly:
    """Sparse multivariate polynomial: terms maps exponent tuple -> Fraction."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            assert len(e) == nvars and all(k >= 0 for k in e), e
            c = Fraction(c)
            if c:
                clean[e] = c
        self.nvars = nvars
        self.terms = clean

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def monomial(cls, nvars, expo, c=1):
        return cls(nvars, {tuple(expo): Fraction(c)})

    @classmethod
    def gen(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(nvars, e)

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        assert self.nvars == other.nvars
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, ZERO) + c
            if s:
                t[e] = s
            elif e in t:
                del t[e]
        return Poly(self.nvars, t)

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            assert self.nvars == other.nvars
            t = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    s = t.get(e, ZERO) + c1 * c2
                    if s:
                        t[e] = s
                    elif e in t:
                        del t[e]
            return Poly(self.nvars, t)
        c = Fraction(other)
        return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})

    __rmul__ = __mul__

    def diff(self, i: int) -> "Poly":
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = t.get(tuple(e2), ZERO) + c * e[i]
        return Poly(self.nvars, t)

    def diff_multi(self, mi) -> "Poly":
        """Iterated partial derivative by a multi-index."""
        p = self
        for i, k in enumerate(mi):
            for _ in range(k):
                p = p.diff(i)
                if p.is_zero():
                    return p
        return p

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, ZERO)

    def drop_constant(self) -> "Poly":
        """Image in A/Q1: the same polynomial with its constant term removed."""
        z = (0,) * self.nvars
        if z not in self.terms:
            return self
        t = dict(self.terms)
        del t[z]
        return Poly(self.nvars, t)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex(t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            if c != 1 or not any(e):
                factors.append(str(c))
            for i, k in enumerate(e):
                if k == 1:
                    factors.append("x%d" % (i + 1))
                elif k > 1:
                    factors.append("x%d^%d" % (i + 1, k))
            parts.append("*".join(factors))
        return " + ".join(parts)

    __repr__ = __str__


_TERM_RE = re.compile(r"^\s*([+-]?\s*\d+(?:/\d+)?)?\s*((?:\*?\s*x\d+(?:\^\d+)?\s*)*)$")
_VAR_RE = re.compile(r"x(\d+)(?:\^(\d+))?")


def parse_poly(s: str, nvars: int) -> Poly:
    """Parse the canonical textual polynomial format (inverse of str)."""
    s = s.strip()
    if s == "0":
        return Poly.zero(nvars)
    total = Poly.zero(nvars)
    for chunk in re.split(r"\+(?=[^+]*)", s.replace("- ", "+ -").replace("-", "+-")):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError("bad polynomial term: %r" % chunk)
        coef = Fraction(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
        if m.group(1) and m.group(1).strip() == "-":
            coef = Fraction(-1)
        e = [0] * nvars
        for vm in _VAR_RE.finditer(m.group(2) or ""):
            i = int(vm.group(1)) - 1
            assert 0 <= i < nvars, "variable index out of range"
            e[i] += int(vm.group(2) or 1)
        total = total + Poly.monomial(nvars, e, coef)
    return total


class Polyvector:
    """Polyvector field: terms maps strictly increasing index tuples -> Poly.

    Degree k is the common length of the index tuples; the degree-0 part of
    the theory is a bare Poly wrapped with the empty tuple.
    """

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars: int, degree: int, terms=None):
        assert 0 <= degree
        clean = {}
        for idx, p in (terms or {}).items():
            idx = tuple(idx)
            assert len(idx) == degree and all(0 <= i < nvars for i in idx)
            assert all(a < b for a, b in zip(idx, idx[1:])), "indices must increase"
            if isinstance(p, (int, Fraction)):
                p = Poly.const(nvars, p)
            assert p.nvars == nvars
            if not p.is_zero():
                clean[idx] = p
        self.nvars = nvars
        self.degree = degree
        self.terms = clean

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p.nvars, 0, {(): p})

    @classmethod
    def basis_der(cls, nvars, i, coef=None):
        """The derivation coef * d_i (coef defaults to 1)."""
        c = coef if coef is not None else Poly.const(nvars, 1)
        return cls(nvars, 1, {(i,): c})

    def is_zero(self):
        return not self.terms

    def as_poly(self) -> Poly:
        assert self.degree == 0
        return self.terms.get((), Poly.zero(self.nvars))

    def __eq__(self, other):
        if not isinstance(other, Polyvector) or self.nvars != other.nvars:
            return False
        if not self.terms and not other.terms:
            return True     # zero is zero in every degree
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        if not self.terms:
            return hash((self.nvars, "zero"))
        return hash((self.nvars, self.degree, frozenset((i, hash(p)) for i, p in self.terms.items())))

    def __add__(self, other):
        assert self.nvars == other.nvars
        if not self.terms:
            return other
        if not other.terms:
            return self
        assert self.degree == other.degree
        t = dict(self.terms)
        for idx, p in other.terms.items():
            s = t.get(idx, Poly.zero(self.nvars)) + p
            if s.is_zero():
                t.pop(idx, None)
            else:
                t[idx] = s
        return Polyvector(self.nvars, self.degree, t)

    def __neg__(self):
        return Polyvector(self.nvars, self.degree, {i: -p for i, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Polyvector(self.nvars, self.degree, {i: p * c for i, p in self.terms.items()})

    def weight_part(self, w: int) -> "Polyvector":
        """Part of Euler weight w: coefficient degree minus polyvector degree."""
        t = {}
        for idx, p in self.terms.items():
            sel = {e: c for e, c in p.terms.items() if sum(e) - self.degree == w}
            if sel:
                t[idx] = Poly(self.nvars, sel)
        return Polyvector(self.nvars, self.degree, t)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for idx in sorted(self.terms):
            p = self.terms[idx]
            coef = str(p)
            if len(p.terms) > 1:
                coef = "(%s)" % coef
            slot = "^".join("d%d" % (i + 1) for i in idx)
            parts.append((coef + " " + slot).strip())
        return " + ".join(parts)

    __repr__ = __str__


def parse_polyvector(s: str, nvars: int) -> Polyvector:
    """Parse the canonical polyvector format, e.g. ``3/2*x1^2*x2 d1^d3``."""
    s = s.strip()
    if s == "0":
        raise ValueError("degree of the zero polyvector is ambiguous; parse per degree")
    chunks, depth, cur = [], 0, []
    i = 0
    while i < len(s):
        if s[i] == "(":
            depth += 1
        elif s[i] == ")":
            depth -= 1
        if depth == 0 and s.startswith(" + ", i):
            chunks.append("".join(cur))
            cur = []
            i += 3
            continue
        cur.append(s[i])
        i += 1
    chunks.append("".join(cur))
    terms = {}
    degree = None
    for chunk in chunks:
        chunk = chunk.strip()
        m = re.match(r"^(?:\((.*)\)|([^d()]*?))\s*((?:d\d+(?:\^d\d+)*)?)$", chunk)
        if not m:
            raise ValueError("bad polyvector term: %r" % chunk)
        coef_s = m.group(1) if m.group(1) is not None else (m.group(2) or "").strip()
        p = parse_poly(coef_s, nvars) if coef_s else Poly.const(nvars, 1)
        idx = tuple(int(d[1:]) - 1 for d in m.group(3).split("^")) if m.group(3) else ()
        if degree is None:
            degree = len(idx)
        assert degree == len(idx), "mixed degrees in polyvector literal"
        if idx in terms:
            terms[idx] = terms[idx] + p
        else:
            terms[idx] = p
    return Polyvector(nvars, degree or 0, terms)


def _merge_sign(idx) -> tuple:
    """Sort an index tuple; return (sorted tuple, sign) or (None, 0) on repeats."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, 0
    return tuple(idx), sign


def apply_derivation(v: Polyvector, f: Poly) -> Poly:
    """v(f) for a degree-1 polyvector: sum_i p_i df/dx_i."""
    if v.degree != 1:
        raise ValueError("apply_derivation needs a degree-1 polyvector")
    assert v.nvars == f.nvars
    out = Poly.zero(f.nvars)
    for (i,), p in v.terms.items():
        out = out + p * f.diff(i)
    return out


def wedge(u: Polyvector, v: Polyvector) -> Polyvector:
    """Graded-commutative product; Koszul sign from reordering slot indices."""
    assert u.nvars == v.nvars
    n = u.nvars
    out = {}
    for iu, pu in u.terms.items():
        for iv, pv in v.terms.items():
            idx, sign = _merge_sign(iu + iv)
            if not sign:
                continue
            p = pu * pv * sign
            s = out.get(idx)
            p = p if s is None else s + p
            if p.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = p
    return Polyvector(n, u.degree + v.degree, out)


def _odd_derivative(v: Polyvector, i: int) -> Polyvector:
    """Left derivative by the odd slot symbol s_i (degree drops by one)."""
    out = {}
    for idx, p in v.terms.items():
        if i in idx:
            pos = idx.index(i)
            rest = idx[:pos] + idx[pos + 1:]
            q = p * ((-1) ** pos)
            s = out.get(rest)
            q = q if s is None else s + q
            if q.is_zero():
                out.pop(rest, None)
            else:
                out[rest] = q
    return Polyvector(v.nvars, v.degree - 1, out)


def _coef_diff(v: Polyvector, i: int) -> Polyvector:
    out = {idx: p.diff(i) for idx, p in v.terms.items()}
    return Polyvector(v.nvars, v.degree, {k: p for k, p in out.items() if not p.is_zero()})


def schouten(u: Polyvector, v: Polyvector) -> Polyvector:
    """Odd bracket on polyvectors (degree k+l-1).

    Restricts to the vector-field bracket in degree (1,1), to the action on
    functions in degree (1,0), and to zero in degree (0,0); graded
    antisymmetry, Leibniz and Jacobi hold for the shifted degrees and are
    asserted exhaustively by the test grid.
    """
    assert u.nvars == v.nvars
    n = u.nvars
    k, l = u.degree, v.degree
    if k + l == 0:
        return Polyvector(n, 0)
    out = Polyvector(n, k + l - 1)
    sgn = (-1) ** (k + 1)
    for i in range(n):
        if k >= 1:
            t = wedge(_odd_derivative(u, i), _coef_diff(v, i))
            out = out + t.scale(sgn)
        if l >= 1:
            out = out - wedge(_coef_diff(u, i), _odd_derivative(v, i))
    return out


def monomials_of_degree(nvars: int, d: int):
    """All exponent tuples of total degree exactly d, grlex order."""
    if d < 0:
        return []
    if nvars == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix, rem, slots):
        if slots == 1:
            out.append(prefix + (rem,))
            return
        for k in range(rem, -1, -1):
            rec(prefix + (k,), rem - k, slots - 1)

    rec((), d, nvars)
    return sorted(out, key=_grlex)


def polyvector_basis(nvars: int, degree: int, coef_deg: int):
    """Basis polyvectors monomial x index-tuple with exact coefficient degree."""
    out = []
    for idx in combinations(range(nvars), degree):
        for e in monomials_of_degree(nvars, coef_deg):
            out.append(Polyvector(nvars, degree, {idx: Poly.monomial(nvars, e)}))
    return out
