"""The abstract symmetry algebra on generators L_ij, A_i, H and the group W:
word parsing, arc-diagram crossing detection, rewriting onto the non-crossing
PBW basis, the realization homomorphism into the operator algebra, basis
enumeration, exact independence certificates, and the central-quotient
isomorphism check against the (N+1)-dimensional angular algebra.

Defining relations used by the rewriter (S_ab are the exchange elements):
  antisymmetry      L_ij = -L_ji
  equivariance      w X = X^w w                 (X in {L_ij, A_i}, H central)
  A-A               [A_i, A_j] = H L_ij
  A-L               [A_i, L_kl] = A_l S_ki - A_k S_li
  L-L               [L_ij, L_kl] = L_il S_kj + L_jk S_li - L_ik S_lj - L_jl S_ki
  L-L crossing      L_ab L_cd = -L_bc L_ad - L_ca L_bd + L_bc S_ad + L_ca S_bd + L_ab S_cd
  L-A crossing      L_ik A_j = L_ij A_k + L_jk A_i          (i < j < k)
  A_N reduction     A_N^2 = -sum_{i<N} A_i^2 + H (sum_{i<j} L_ij^2 - S(S-N+1)
                     - (N-1)^2/4) + gamma^2

A monomial is drawn as arcs on the points 1..N+1: L_ij gives (i, j), A_t gives
(t, N+1).  Two arcs (a,b), (c,d) cross iff a < c < b < d.  Normal monomials
are the non-crossing ones with index-sorted factors and at most one A_N.

Termination: every rule application strictly decreases the lexicographic
measure (arc count, P, crossings, inversions) where P counts arcs ending at N
or N+1 with (N, N+1) arcs counted twice.  The measure decrease is asserted at
runtime; a step budget guards against regressions.
"""

from __future__ import annotations

import itertools
import re as _re
from dataclasses import dataclass
from fractions import Fraction

from . import opalg
from .coxeter import GroupAlgebraElement, System, exchange_element, generate_group, s_element
from .errors import (BadCentralValue, BadSpec, DimensionMismatch, IndexOutOfRange,
                     ParseError, PoleAtSamplePoint, StepBudgetExceeded)
from .exactnum import Poly, RatFunc, RExt
from .linalg import rank as exact_rank

_F = Fraction

DEFAULT_STEP_BUDGET = 10 ** 6


# ---------------------------------------------------------------------------
# generators and monomials
# ---------------------------------------------------------------------------
# generator encodings: ("L", i, j) with i < j, ("A", i), ("H",), ("w", k)

def gen_L(i: int, j: int, N: int):
    if not (1 <= i <= N and 1 <= j <= N) or i == j:
        raise IndexOutOfRange(f"L({i},{j}) needs distinct indices in 1..{N}")
    if i < j:
        return ("L", i, j), 1
    return ("L", j, i), -1


def gen_A(i: int, N: int):
    if not 1 <= i <= N:
        raise IndexOutOfRange(f"A({i}) index out of 1..{N}")
    return ("A", i)


def _arc(gen, N: int):
    if gen[0] == "L":
        return (gen[1], gen[2])
    if gen[0] == "A":
        return (gen[1], N + 1)
    return None


def _arcs_cross(e, f) -> bool:
    (a, b), (c, d) = (e, f) if e <= f else (f, e)
    return a < c < b < d


@dataclass(frozen=True)
class NormalMonomial:
    """PBW basis monomial: sorted non-crossing L part, sorted A part with at
    most one A_N, a power of the central H, and a group element."""

    arcs: tuple        # ((i,j), ...) sorted, with multiplicity
    avec: tuple        # (t1 <= t2 <= ...), at most one equal to N
    hpow: int
    w: int

    def degree(self) -> int:
        """L and A count 1 each, H counts 2 (matches operator order under rho)."""
        return len(self.arcs) + len(self.avec) + 2 * self.hpow

    def all_arcs(self, N: int):
        return self.arcs + tuple((t, N + 1) for t in self.avec)

    def word(self):
        return tuple(("L", i, j) for (i, j) in self.arcs) + \
            tuple(("A", t) for t in self.avec) + \
            (("H",),) * self.hpow + ((("w", self.w),) if self.w else ())

    def sort_key(self):
        return (self.degree(), self.arcs, self.avec, self.hpow, self.w)

    def render(self) -> str:
        bits = [f"L({i},{j})" for (i, j) in self.arcs]
        bits += [f"A({t})" for t in self.avec]
        bits += ["H"] * self.hpow
        if self.w:
            bits.append(f"w#{self.w}")
        return "*".join(bits) if bits else "1"

    def exponent_vector(self, N: int):
        """(L exponents in index order, A exponents, hpow, w)."""
        l_exp = []
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                l_exp.append(sum(1 for a in self.arcs if a == (i, j)))
        a_exp = [sum(1 for t in self.avec if t == i) for i in range(1, N + 1)]
        return l_exp, a_exp, self.hpow, self.w


IDENTITY_MONOMIAL = NormalMonomial((), (), 0, 0)


def has_crossing(m) -> bool:
    """True iff the arc diagram of a monomial (or explicit arc list) crosses."""
    if isinstance(m, NormalMonomial):
        n = max([j for (_, j) in m.arcs] + [t for t in m.avec] + [1])
        arcs = m.all_arcs(n)
    else:
        arcs = list(m)
    for e, f in itertools.combinations(arcs, 2):
        if _arcs_cross(e, f):
            return True
    return False


def arc_diagram(m: NormalMonomial, N: int):
    """The multiset of arcs on points 1..N+1 encoding the monomial."""
    return m.all_arcs(N)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class Element:
    """Formal linear combination of generator words with x-free coefficients."""

    __slots__ = ("sys", "words")

    def __init__(self, sys: System, words: dict | None = None):
        self.sys = sys
        clean = {}
        for word, c in (words or {}).items():
            c = _as_coeff(sys, c)
            if not c.is_zero():
                clean[word] = c
        self.words = clean

    @classmethod
    def from_gen(cls, sys: System, gen, coeff=1) -> "Element":
        return cls(sys, {(gen,): coeff})

    @classmethod
    def one(cls, sys: System) -> "Element":
        return cls(sys, {(): 1})

    def is_zero(self) -> bool:
        return not self.words

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element(self.sys, {(): other})
        out = dict(self.words)
        for word, c in other.words.items():
            s = out.get(word)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(word, None)
            else:
                out[word] = s
        return Element(self.sys, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.sys, {w: -c for w, c in self.words.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element(self.sys, {(): other})
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly, RatFunc)):
            return Element(self.sys, {w: _as_coeff(self.sys, other) * c
                                      for w, c in self.words.items()})
        out: dict = {}
        for w1, c1 in self.words.items():
            for w2, c2 in other.words.items():
                w = w1 + w2
                p = c1 * c2
                s = out.get(w)
                out[w] = p if s is None else s + p
        return Element(self.sys, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Element.one(self.sys)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Element) and self.words == other.words

    def render(self) -> str:
        if not self.words:
            return "0"
        bits = []
        for word in sorted(self.words, key=lambda w: (len(w), w)):
            coeff = self.words[word]
            body = "*".join(_gen_str(g) for g in word) if word else "1"
            bits.append(f"({coeff})*{body}")
        return " + ".join(bits)

    __repr__ = render


def _gen_str(g):
    if g[0] == "L":
        return f"L({g[1]},{g[2]})"
    if g[0] == "A":
        return f"A({g[1]})"
    if g[0] == "H":
        return "H"
    return f"w#{g[1]}"


def _as_coeff(sys: System, c) -> RatFunc:
    if isinstance(c, RatFunc):
        return c
    if isinstance(c, Poly):
        return RatFunc.from_poly(c)
    return RatFunc.const(sys.ring, c)


# ---------------------------------------------------------------------------
# parser (CLI expression grammar)
# ---------------------------------------------------------------------------

_TOKEN = _re.compile(r"\s*(?:(\d+)|([A-Za-z]+)|([()+\-*/^,]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.group(1):
            out.append(("int", int(m.group(1)), pos))
        elif m.group(2):
            out.append(("name", m.group(2), pos))
        else:
            out.append(("sym", m.group(3), pos))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, sys: System, text: str):
        self.sys = sys
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None, value=None):
        tok = self.toks[self.k]
        if kind and tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or kind}, found {tok[1]!r}", tok[2])
        self.k += 1
        return tok

    def parse(self) -> Element:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Element:
        sign = 1
        if self.peek()[:2] == ("sym", "+"):
            self.take()
        elif self.peek()[:2] == ("sym", "-"):
            self.take()
            sign = -1
        total = self.term() * sign
        while self.peek()[0] == "sym" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            total = total + (t if op == "+" else -t)
        return total

    def term(self) -> Element:
        total = self.factor()
        while self.peek()[:2] == ("sym", "*"):
            self.take()
            total = total * self.factor()
        return total

    def factor(self) -> Element:
        base = self.atom()
        while self.peek()[:2] == ("sym", "^"):
            self.take()
            exp = self.take("int")[1]
            base = base ** exp
        return base

    def atom(self) -> Element:
        tok = self.peek()
        sys = self.sys
        if tok[0] == "int":
            self.take()
            num = tok[1]
            if self.peek()[:2] == ("sym", "/"):
                self.take()
                den = self.take("int")[1]
                return Element(sys, {(): _F(num, den)})
            return Element(sys, {(): _F(num)})
        if tok[:2] == ("sym", "("):
            self.take()
            e = self.expr()
            self.take("sym", ")")
            return e
        if tok[0] == "name":
            name = self.take()[1]
            N = sys.dim
            if name == "H":
                return Element.from_gen(sys, ("H",))
            if name == "L":
                self.take("sym", "(")
                i = self.take("int")[1]
                self.take("sym", ",")
                j = self.take("int")[1]
                self.take("sym", ")")
                gen, sign = gen_L(i, j, N)
                return Element.from_gen(sys, gen, sign)
            if name == "A":
                self.take("sym", "(")
                i = self.take("int")[1]
                self.take("sym", ")")
                return Element.from_gen(sys, gen_A(i, N))
            if name == "w":
                self.take("sym", "(")
                roots = [self.take("int")[1]]
                while self.peek()[:2] == ("sym", ","):
                    self.take()
                    roots.append(self.take("int")[1])
                self.take("sym", ")")
                nroots = len(sys.rs.positive_roots)
                for r in roots:
                    if not 1 <= r <= nroots:
                        raise IndexOutOfRange(
                            f"root index {r} out of 1..{nroots}")
                widx = sys.table.word([r - 1 for r in roots])
                return Element.from_gen(sys, ("w", widx)) if widx else Element.one(sys)
            raise ParseError(f"unknown generator {name!r}", tok[2])
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])


def parse_word(sys: System, text: str) -> Element:
    """Parse the expression grammar into a canonical Element."""
    return _Parser(sys, text).parse()


# ---------------------------------------------------------------------------
# rewriting to the PBW basis
# ---------------------------------------------------------------------------

class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self, n: int = 1):
        self.left -= n
        if self.left < 0:
            raise StepBudgetExceeded("rewrite step budget exhausted")


def _measure(sys: System, core) -> tuple:
    """(arc count, P, crossings, inversions); strictly decreases per rule."""
    N = sys.dim
    arcs = [_arc(g, N) for g in core]
    p_stat = 0
    for (a, b) in arcs:
        if (a, b) == (N, N + 1):
            p_stat += 2
        else:
            p_stat += (a in (N, N + 1)) + (b in (N, N + 1))
    crossings = sum(_arcs_cross(e, f) for e, f in itertools.combinations(arcs, 2))
    keys = [(0, g[1], g[2]) if g[0] == "L" else (1, g[1]) for g in core]
    inversions = sum(1 for a, b in itertools.combinations(keys, 2) if a > b)
    return (len(core), p_stat, crossings, inversions)


def _conj_gen(sys: System, w: int, gen):
    """w g w^{-1} as [(gen', coeff)], using the matrix of w."""
    key = ("rgw_conj", w, gen)
    out = sys._cache.get(key)
    if out is not None:
        return out
    m = sys.table.matrix(w)
    N = sys.dim
    res = []
    if gen[0] == "A":
        i = gen[1]
        for a in range(1, N + 1):
            c = m[a - 1][i - 1]
            if c:
                res.append((("A", a), c))
    elif gen[0] == "L":
        i, j = gen[1], gen[2]
        for a in range(1, N + 1):
            for b in range(a + 1, N + 1):
                c = m[a - 1][i - 1] * m[b - 1][j - 1] - m[b - 1][i - 1] * m[a - 1][j - 1]
                if c:
                    res.append((("L", a, b), c))
    else:
        res = [(gen, _F(1))]
    out = tuple(res)
    sys._cache[key] = out
    return out


def _conj_word(sys: System, w: int, word):
    """w * word = sum coeff * word' * w; returns [(word', coeff)]."""
    if w == 0 or not word:
        return ((tuple(word), _F(1)),)
    key = ("rgw_conjword", w, tuple(word))
    out = sys._cache.get(key)
    if out is not None:
        return out
    items = [((), _F(1))]
    for gen in word:
        expand = _conj_gen(sys, w, gen)
        items = [(wd + (g2,), c * c2) for wd, c in items for g2, c2 in expand]
    out = tuple(items)
    sys._cache[key] = out
    return out


def _canon_L(i, j):
    """Canonical (gen, sign) for L_ij allowing i > j; None when i == j."""
    if i == j:
        return None, 0
    if i < j:
        return ("L", i, j), 1
    return ("L", j, i), -1


def _galg_items(sys: System, galg: GroupAlgebraElement):
    return tuple(sorted(galg.coeffs.items()))


def _exchange_galg(sys: System, i: int, j: int) -> GroupAlgebraElement:
    key = ("rgw_Sgalg", i, j)
    g = sys._cache.get(key)
    if g is None:
        g = exchange_element(sys, i, j)
        sys._cache[key] = g
    return g


def _casimir_group_part(sys: System) -> GroupAlgebraElement:
    """S(S - N + 1) as a group algebra element."""
    key = ("rgw_SSN1",)
    g = sys._cache.get(key)
    if g is None:
        s = s_element(sys)
        g = s * s - s * (sys.dim - 1)
        sys._cache[key] = g
    return g


class _Rewriter:
    """Queue machine normalizing (core word, hpow, w, coeff) items."""

    def __init__(self, sys: System, budget: _Budget):
        self.sys = sys
        self.budget = budget
        self.N = sys.dim

    # each rule returns items (core, dh, w_left, coeff_factor); w_left is a
    # group element multiplying from the LEFT of the monomial tail (it still
    # has to be merged into the monomial's w through the suffix conjugation,
    # which _emit has already performed)

    def normalize(self, core, hpow, w, coeff, out: dict):
        queue = [(tuple(core), hpow, w, coeff)]
        while queue:
            core, h, w, c = queue.pop()
            self.budget.spend()
            defect = self._find_defect(core)
            if defect is None:
                arcs = tuple(g[1:] for g in core if g[0] == "L")
                avec = tuple(g[1] for g in core if g[0] == "A")
                mono = NormalMonomial(arcs, avec, h, w)
                prev = out.get(mono)
                s = c if prev is None else prev + c
                if s.is_zero():
                    out.pop(mono, None)
                else:
                    out[mono] = s
                continue
            before = _measure(self.sys, core)
            for core2, dh, w2, c2 in self._apply(core, defect):
                after = _measure(self.sys, core2)
                assert after < before, (
                    f"termination measure did not decrease: {before} -> {after}")
                queue.append((core2, h + dh, self.sys.table.product(w2, w) if w2 else w,
                              c * c2))

    # -- defect scan ---------------------------------------------------------

    def _find_defect(self, core):
        N = self.N
        for p in range(len(core) - 1):
            g1, g2 = core[p], core[p + 1]
            t1, t2 = g1[0], g2[0]
            if t1 == "L" and t2 == "L":
                if (g1[1], g1[2]) > (g2[1], g2[2]):
                    return ("LLswap", p)
                if _arcs_cross((g1[1], g1[2]), (g2[1], g2[2])):
                    return ("LLuncross", p)
            elif t1 == "A" and t2 == "L":
                return ("ALswap", p)
            elif t1 == "L" and t2 == "A":
                if g1[1] < g2[1] < g1[2]:
                    return ("LAuncross", p)
            elif t1 == "A" and t2 == "A":
                if g1[1] > g2[1]:
                    return ("AAswap", p)
                if g1[1] == g2[1] == N:
                    return ("relA", p)
        arcs = [_arc(g, N) for g in core]
        for p in range(len(core)):
            for q in range(p + 1, len(core)):
                if _arcs_cross(arcs[p], arcs[q]):
                    return ("far", p, q)
        return None

    # -- rule application ------------------------------------------------------

    def _apply(self, core, defect):
        kind = defect[0]
        p = defect[1]
        if kind == "LLswap":
            return self._ll_swap(core, p)
        if kind == "LLuncross":
            return self._ll_uncross_pair(core[p], core[p + 1],
                                         core[:p], core[p + 2:])
        if kind == "ALswap":
            return self._al_swap(core, p)
        if kind == "LAuncross":
            return self._la_uncross_pair(core[p], core[p + 1], core[:p], core[p + 2:])
        if kind == "AAswap":
            return self._aa_swap(core, p)
        if kind == "relA":
            return self._relA(core, p)
        if kind == "far":
            return self._far_uncross(core, defect[1], defect[2])
        raise AssertionError(kind)

    def _emit(self, prefix, mid_gens, galg, suffix, dh, base_coeff):
        """Items for  prefix * mid * (group algebra element) * suffix  * H^dh."""
        items = []
        for gidx, cg in _galg_items(self.sys, galg):
            c = base_coeff * cg
            if gidx == 0:
                items.append((prefix + mid_gens + suffix, dh, 0, c))
            else:
                for suf2, fac in _conj_word(self.sys, gidx, suffix):
                    items.append((prefix + mid_gens + suf2, dh, gidx,
                                  c * fac if fac != 1 else c))
        return items

    def _commutator_items(self, g1, g2, prefix, suffix, base_coeff=_F(1)):
        """[g1, g2] expansion items (for L/A pairs), placed between prefix/suffix."""
        t1, t2 = g1[0], g2[0]
        items = []
        if t1 == "A" and t2 == "A":
            # [A_s, A_t] = H L_st
            gen, sign = _canon_L(g1[1], g2[1])
            if gen:
                items.append((prefix + (gen,) + suffix, 1, 0, base_coeff * sign))
            return items
        if t1 == "A" and t2 == "L":
            i, (k, l) = g1[1], (g2[1], g2[2])
            for (idx, kk) in ((l, k), (k, l)):     # A_l S_ki  -  A_k S_li
                sign = _F(1) if idx == l else _F(-1)
                galg = _exchange_galg(self.sys, kk, i)
                items += self._emit(prefix, (("A", idx),), galg, suffix, 0,
                                    base_coeff * sign)
            return items
        if t1 == "L" and t2 == "A":
            sub = self._commutator_items(g2, g1, prefix, suffix, -base_coeff)
            return sub
        # [L_ab, L_cd] = L_ad S_cb + L_bc S_da - L_ac S_db - L_bd S_ca
        a, b = g1[1], g1[2]
        c, d = g2[1], g2[2]
        for (x, y, u, v, sgn) in ((a, d, c, b, 1), (b, c, d, a, 1),
                                  (a, c, d, b, -1), (b, d, c, a, -1)):
            gen, sign = _canon_L(x, y)
            if not gen:
                continue
            galg = _exchange_galg(self.sys, u, v)
            items += self._emit(prefix, (gen,), galg, suffix, 0,
                                base_coeff * sign * sgn)
        return items

    def _ll_swap(self, core, p):
        g1, g2 = core[p], core[p + 1]
        prefix, suffix = core[:p], core[p + 2:]
        items = [(prefix + (g2, g1) + suffix, 0, 0, _F(1))]
        items += self._commutator_items(g1, g2, prefix, suffix)
        return items

    def _aa_swap(self, core, p):
        g1, g2 = core[p], core[p + 1]
        prefix, suffix = core[:p], core[p + 2:]
        items = [(prefix + (g2, g1) + suffix, 0, 0, _F(1))]
        items += self._commutator_items(g1, g2, prefix, suffix)
        return items

    def _al_swap(self, core, p):
        g1, g2 = core[p], core[p + 1]
        prefix, suffix = core[:p], core[p + 2:]
        items = [(prefix + (g2, g1) + suffix, 0, 0, _F(1))]
        items += self._commutator_items(g1, g2, prefix, suffix)
        return items

    def _ll_uncross_pair(self, g1, g2, prefix, suffix):
        # L_ab L_cd = -L_bc L_ad - L_ca L_bd + L_bc S_ad + L_ca S_bd + L_ab S_cd
        a, b = g1[1], g1[2]
        c, d = g2[1], g2[2]
        items = []
        for (x1, y1, x2, y2, sgn) in ((b, c, a, d, -1), (c, a, b, d, -1)):
            e1, s1 = _canon_L(x1, y1)
            e2, s2 = _canon_L(x2, y2)
            if not e1 or not e2:
                continue
            items.append((prefix + (e1, e2) + suffix, 0, 0, _F(sgn * s1 * s2)))
        for (x, y, u, v, sgn) in ((b, c, a, d, 1), (c, a, b, d, 1), (a, b, c, d, 1)):
            gen, s1 = _canon_L(x, y)
            if not gen:
                continue
            galg = _exchange_galg(self.sys, u, v)
            items += self._emit(prefix, (gen,), galg, suffix, 0, _F(sgn * s1))
        return items

    def _la_uncross_pair(self, g1, g2, prefix, suffix):
        # i < j < k:  L_ik A_j = L_ij A_k + L_jk A_i
        i, k = g1[1], g1[2]
        j = g2[1]
        return [
            (prefix + (("L", i, j), ("A", k)) + suffix, 0, 0, _F(1)),
            (prefix + (("L", j, k), ("A", i)) + suffix, 0, 0, _F(1)),
        ]

    def _relA(self, core, p):
        # A_N^2 = -sum_{i<N} A_i^2 + H(sum L_ij^2 - S(S-N+1) - (N-1)^2/4) + gam^2
        N = self.N
        prefix, suffix = core[:p], core[p + 2:]
        items = []
        for i in range(1, N):
            items.append((prefix + (("A", i), ("A", i)) + suffix, 0, 0, _F(-1)))
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                items.append((prefix + (("L", i, j), ("L", i, j)) + suffix, 1, 0, _F(1)))
        galg = _casimir_group_part(self.sys)
        items += self._emit(prefix, (), galg, suffix, 1, _F(-1))
        items.append((prefix + suffix, 1, 0, _F(-(N - 1) ** 2, 4)))
        gam2 = RatFunc.from_poly(self.sys.gamma * self.sys.gamma)
        items.append((prefix + suffix, 0, 0, gam2))
        return items

    def _far_uncross(self, core, p, q):
        # f M g -> f g M + f [M, g]; then uncross the now-adjacent pair
        f, g = core[p], core[q]
        prefix, suffix = core[:p], core[q + 1:]
        mid = core[p + 1:q]
        items = []
        if g[0] == "L":
            items += self._ll_uncross_pair(f, g, prefix, mid + suffix)
        else:
            items += self._la_uncross_pair(f, g, prefix, mid + suffix)
        for s in range(len(mid)):
            items += self._commutator_items(
                mid[s], g, prefix + (f,) + mid[:s], mid[s + 1:] + suffix)
        return items


def _ingest_word(sys: System, word, coeff):
    """Split a raw word into (core, hpow, w, coeff) items, sweeping group
    elements rightward (with conjugation) and collecting central H factors."""
    items = [((), 0, 0, coeff)]
    for gen in reversed(word):
        t = gen[0]
        if t == "H":
            items = [(core, h + 1, w, c) for core, h, w, c in items]
        elif t == "w":
            k = gen[1]
            new = []
            for core, h, w, c in items:
                for core2, fac in _conj_word(sys, k, core):
                    new.append((core2, h, sys.table.product(k, w),
                                c * fac if fac != 1 else c))
            items = new
        else:
            items = [((gen,) + core, h, w, c) for core, h, w, c in items]
    return items


def rewrite(e: Element, budget: int = DEFAULT_STEP_BUDGET):
    """Normal form of an Element on the PBW basis.

    Returns a list of (NormalMonomial, coefficient) pairs in deterministic
    basis order.  Raises StepBudgetExceeded if the safeguard trips.
    """
    sys = e.sys
    b = _Budget(budget)
    rw = _Rewriter(sys, b)
    out: dict = {}
    for word, coeff in e.words.items():
        for core, h, w, c in _ingest_word(sys, word, coeff):
            rw.normalize(core, h, w, c, out)
    return sorted(((m, c) for m, c in out.items() if not c.is_zero()),
                  key=lambda t: t[0].sort_key())


def rewrite_element(e: Element, budget: int = DEFAULT_STEP_BUDGET) -> Element:
    """rewrite() repackaged as an Element (for idempotence checks)."""
    return Element(e.sys, {m.word(): c for m, c in rewrite(e, budget)})


# ---------------------------------------------------------------------------
# realization homomorphism
# ---------------------------------------------------------------------------

def _gen_operator(sys: System, gen):
    if gen[0] == "L":
        return opalg.angmom_op(sys, gen[1], gen[2])
    if gen[0] == "A":
        return opalg.lrl_op(sys, gen[1])
    if gen[0] == "H":
        return opalg.hamiltonian_op(sys)
    return opalg.w_op(sys, gen[1])


def rho(e: Element | NormalMonomial, sys: System | None = None) -> opalg.Operator:
    """Realize an element as an operator (L, A, H, w to their named operators)."""
    if isinstance(e, NormalMonomial):
        base = sys
        if base is None:
            raise DimensionMismatch("rho of a monomial needs a System")
        e = Element(base, {e.word(): 1})
    base = e.sys
    if sys is not None and sys is not base:
        raise DimensionMismatch("element belongs to a different system")
    total = opalg.Operator.zero(base)
    for word, coeff in e.words.items():
        op = opalg.Operator.constant(base, 1)
        for gen in word:
            op = opalg.compose(op, _gen_operator(base, gen))
        total = total + op * coeff
    return total


# ---------------------------------------------------------------------------
# basis enumeration and independence certificates
# ---------------------------------------------------------------------------

def enumerate_basis(sys: System, degree_bound: int, group=None,
                    include_h: bool = True, l_only: bool = False):
    """All NormalMonomials of degree <= degree_bound, in deterministic order.

    ``group``: iterable of group element indices to attach (default: identity
    only; pass ``sys.table`` indices or ``"all"`` for the whole group).
    ``l_only`` restricts to monomials built from L factors alone.
    """
    N = sys.dim
    if group is None:
        group_ids = (0,)
    elif group == "all":
        group_ids = tuple(range(sys.table.order))
    else:
        group_ids = tuple(group)
    l_arcs = [(i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
    monos = []

    def extend_avec(arcs, arc_list, rem):
        avec_choices = [[]]
        if not l_only:
            def rec_a(t, cur, rem):
                avec_choices.append(list(cur))
                if rem == 0:
                    return
                for tt in range(t, N + 1):
                    new_arc = (tt, N + 1)
                    if any(_arcs_cross(new_arc, a) for a in arc_list):
                        continue
                    if tt == N and cur.count(N):
                        continue
                    cur.append(tt)
                    rec_a(tt, cur, rem - 1)
                    cur.pop()
            rec_a(1, [], rem)
            # rec_a appends duplicates of the empty choice; dedupe below
        seen = set()
        for avec in avec_choices:
            tav = tuple(avec)
            if tav in seen:
                continue
            seen.add(tav)
            used = len(arcs) + len(tav)
            hmax = (degree_bound - used) // 2 if include_h else 0
            for l in range(hmax + 1):
                for wid in group_ids:
                    monos.append(NormalMonomial(tuple(arcs), tav, l, wid))

    def rec_l(idx, arcs, arc_list, rem):
        extend_avec(arcs, arc_list, rem)
        if rem == 0 or idx == len(l_arcs):
            return
        for k in range(idx, len(l_arcs)):
            arc = l_arcs[k]
            if any(_arcs_cross(arc, a) for a in arc_list):
                continue
            for mult in range(1, rem + 1):
                rec_l(k + 1, arcs + [arc] * mult, arc_list + [arc], rem - mult)

    rec_l(0, [], [], degree_bound)
    uniq = {m for m in monos if m.degree() <= degree_bound}
    return sorted(uniq, key=lambda m: m.sort_key())


def _random_fraction(rnd, bound=999):
    num = rnd.randint(-bound, bound)
    den = rnd.randint(1, bound)
    return _F(num, den)


def independence_rank(monomials, sys: System, test_degree: int = 4,
                      seed: int = 0, npoints: int | None = None,
                      max_retries: int = 40) -> int:
    """Exact lower bound on the rank of {rho(m)} as linear maps.

    Each operator is applied to the test functions x^beta * r^eps
    (|beta| <= test_degree, eps in {0,1}); the resulting functions are
    evaluated at seeded random rational points (poles trigger a bounded
    resample) and an exact fraction-free rank is taken.
    """
    import random

    monomials = list(monomials)
    if not monomials:
        return 0
    rnd = random.Random(seed)
    M = sys.dim
    ring = sys.ring
    if npoints is None:
        npoints = 2 + (len(monomials) > 12)

    betas = []
    for total in range(test_degree + 1):
        for beta in itertools.product(range(total + 1), repeat=M):
            if sum(beta) == total:
                betas.append(beta + (0,) * (ring.nvars - M))
    betas.sort(key=lambda b: (sum(b), b))
    test_funcs = []
    for beta in betas:
        mono = Poly(ring, {tuple(beta): _F(1)})
        base = RExt.from_rat(RatFunc.from_poly(mono))
        test_funcs.append(base)
        test_funcs.append(base * RExt.r_element(ring))

    ops = [rho(m, sys) if isinstance(m, NormalMonomial) else rho(m)
           for m in monomials]

    def fresh_point():
        for _ in range(max_retries):
            vals = [_random_fraction(rnd) for _ in range(M)]
            vals += [_random_fraction(rnd, 99) for _ in range(ring.nvars - M)]
            if not ring.q.evaluate(vals):
                continue
            if any(not sys.root_form(ri).evaluate(vals)
                   for ri in range(len(sys.rs.positive_roots))):
                continue
            return vals
        raise PoleAtSamplePoint("could not find pole-free sample points")

    points = [fresh_point() for _ in range(npoints)]
    target = len(monomials)
    rows = [[] for _ in monomials]
    best = 0
    # stream test functions (cheapest first) and stop once the rank certifies
    # full independence; a pole at a sample point swaps in a fresh point for
    # the whole run so the matrix columns stay consistent
    for batch_start in range(0, len(test_funcs), 4):
        batch = test_funcs[batch_start:batch_start + 4]
        for f in batch:
            images = [opalg.apply_op(op, f) for op in ops]
            for vals in points:
                try:
                    cols = [img.evaluate_pair(vals) for img in images]
                except PoleAtSamplePoint:
                    # restart the whole run on a fresh seed; keeps columns
                    # consistent across rows (bounded by max_retries)
                    return independence_rank(monomials, sys, test_degree,
                                             seed + 1, npoints, max_retries - 1)
                for ri, (va, vb) in enumerate(cols):
                    rows[ri].append(va)
                    rows[ri].append(vb)
        best = exact_rank(rows)
        if best >= target:
            return best
    return best


# ---------------------------------------------------------------------------
# central quotient isomorphism
# ---------------------------------------------------------------------------

def _rational_sqrt(x: Fraction):
    from math import isqrt

    if x < 0:
        return None
    pn, pd = isqrt(x.numerator), isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return _F(pn, pd)
    return None


def embed_system(sys: System) -> System:
    """Same reflection group acting on one more coordinate (trivially on it)."""
    rs = sys.rs
    from .coxeter import RootSystem

    roots = tuple(tuple(r) + (_F(0),) for r in rs.positive_roots)
    rs2 = RootSystem(kind=rs.kind + "+1", rank=rs.rank,
                     ambient_dim=rs.ambient_dim + 1, positive_roots=roots,
                     orbits=rs.orbits, orbit_of=rs.orbit_of,
                     multiplicity=rs.multiplicity)
    table2 = generate_group(rs2, cap=sys.table.order + 1)
    gvals = "symbolic" if not all(g.is_constant() for g in sys.gvals) else \
        [g.constant_value() for g in sys.gvals]
    gamma = "symbolic" if not sys.gamma.is_constant() else sys.gamma.constant_value()
    return System(rs2, table2, gvals=gvals, gamma=gamma)


def phi_check(sys: System, a, budget: int = DEFAULT_STEP_BUDGET) -> dict:
    """Verify the central-quotient isomorphism at H = a.

    Maps L_ij to the ambient-(N+1) angular momenta, A_i to c * L_{i,N+1} with
    c^2 = -a (so -a must be a rational square), H to the scalar a, and checks
    that all defining relations map to exact operator identities, with the
    Casimir relation pinning I_{N+1} = (N-1)^2/4 - gamma^2/a.
    """
    a = _F(a)
    if a == 0:
        raise BadCentralValue("central value must be nonzero")
    c = _rational_sqrt(-a)
    if c is None:
        raise BadCentralValue(f"-a = {-a} is not the square of a rational")
    N = sys.dim
    up = embed_system(sys)
    ring = up.ring
    gamma = up.gamma

    def L(i, j):
        return opalg.angmom_op(up, i, j)

    def phiA(i):
        return L(i, N + 1) * c

    checks = []

    # rep2: equivariance under every reflection generator
    for ri in range(len(up.rs.positive_roots)):
        widx = up.table.reflection_of_root[ri]
        wop = opalg.w_op(up, widx)
        m = up.table.matrix(widx)
        for i in range(1, N + 1):
            img = opalg.Operator.zero(up)
            for k in range(1, N + 1):
                if m[k - 1][i - 1]:
                    img = img + phiA(k) * RatFunc.const(ring, m[k - 1][i - 1])
            checks.append((f"rep2 A({i}) s_{ri + 1}",
                           opalg.compose(wop, phiA(i)) - opalg.compose(img, wop)))
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                img = opalg.Operator.zero(up)
                for k in range(1, N + 1):
                    for l in range(k + 1, N + 1):
                        coe = m[k - 1][i - 1] * m[l - 1][j - 1] - m[l - 1][i - 1] * m[k - 1][j - 1]
                        if coe:
                            img = img + L(k, l) * RatFunc.const(ring, coe)
                checks.append((f"rep2 L({i},{j}) s_{ri + 1}",
                               opalg.compose(wop, L(i, j)) - opalg.compose(img, wop)))

    # rep4
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            checks.append((f"rep4 ({i},{j})",
                           opalg.commutator(phiA(i), phiA(j)) - L(i, j) * a))
    # rep5
    for i in range(1, N + 1):
        for k in range(1, N + 1):
            for l in range(k + 1, N + 1):
                rhs = (opalg.compose(phiA(l), opalg.exchange_op(up, k, i))
                       - opalg.compose(phiA(k), opalg.exchange_op(up, l, i)))
                checks.append((f"rep5 ({i};{k},{l})",
                               opalg.commutator(phiA(i), L(k, l)) - rhs))
    # rep6
    for i, j, k, l in itertools.product(range(1, N + 1), repeat=4):
        lhs = opalg.commutator(L(i, j), L(k, l))
        rhs = (opalg.compose(L(i, l), opalg.exchange_op(up, k, j))
               + opalg.compose(L(j, k), opalg.exchange_op(up, l, i))
               - opalg.compose(L(i, k), opalg.exchange_op(up, l, j))
               - opalg.compose(L(j, l), opalg.exchange_op(up, k, i)))
        checks.append((f"rep6 ({i},{j},{k},{l})", lhs - rhs))
    # rep7
    for i, j, k, l in itertools.product(range(1, N + 1), repeat=4):
        total = opalg.Operator.zero(up)
        for (x, y, z) in ((i, j, k), (j, k, i), (k, i, j)):
            total = total + opalg.compose(
                L(x, y), L(z, l) - opalg.exchange_op(up, z, l))
        checks.append((f"rep7 ({i},{j},{k},{l})", total))
    # rep8
    for i, j, k in itertools.product(range(1, N + 1), repeat=3):
        total = (opalg.compose(L(i, j), phiA(k))
                 + opalg.compose(L(j, k), phiA(i))
                 + opalg.compose(L(k, i), phiA(j)))
        checks.append((f"rep8 ({i},{j},{k})", total))

    # rep3 maps to the Casimir pinning I_{N+1} = b
    b_val = RatFunc.from_poly(
        ring.const(_F((N - 1) ** 2, 4)) - gamma * gamma * (1 / a))
    lhs = opalg.Operator.zero(up)
    for i in range(1, N + 1):
        ai = phiA(i)
        lhs = lhs + opalg.compose(ai, ai)
    sums_l = opalg.Operator.zero(up)
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            sums_l = sums_l + opalg.compose(L(i, j), L(i, j))
    sop = opalg.s_op(up)
    rhs = (sums_l - opalg.compose(sop, sop - opalg.Operator.constant(up, N - 1))
           - opalg.Operator.constant(up, _F((N - 1) ** 2, 4))) * a \
        + opalg.Operator.constant(up, gamma * gamma)
    rep3_residual = lhs - rhs
    casimir_shift = (opalg.casimir_op(up)
                     - opalg.Operator.constant(up, b_val)) * a
    checks.append(("rep3 vs Casimir pinning", rep3_residual + casimir_shift))

    failures = []
    for label, residual in checks:
        if not residual.is_zero():
            failures.append(label)
    return {
        "system": sys.rs.kind,
        "central_value": str(a),
        "scale": str(c),
        "b": str(b_val),
        "relations_checked": len(checks),
        "failures": failures,
        "status": "pass" if not failures else "fail",
    }
