"""Exact arithmetic kernel: multivariate polynomials over Q, normalized rational
functions, and the quadratic radial extension by r with r^2 = q = sum of the
squared coordinate variables.

Representation choices
----------------------
* ``Poly``: sparse dict mapping exponent tuples to ``Fraction``.  The zero
  polynomial is the empty dict.  Term order is graded lexicographic with the
  first ring variable largest (coordinates x1 > x2 > ... come first, parameter
  symbols last), so equality is structural.
* ``RatFunc``: numerator ``Poly`` plus a *factored* denominator, a tuple of
  (monic factor, multiplicity) pairs.  Denominators in this domain are almost
  always products of root linear forms (alpha, x) and q, so reduction is trial
  exact division; a general multivariate GCD (primitive PRS) backs the public
  ``normalize`` and the occasional opaque factor produced by ``invert``.
  The reduced pair (num, expanded monic den) is canonical, so equality and
  hashing use it regardless of how the denominator happens to be factored.
* ``RExt``: pair (a, b) representing a + b*r.  The relation r^2 = q is applied
  on every multiplication, so the pair is unique.

All values are immutable; every operation returns a fresh value.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import NotInvertible, NotOrthogonal, PoleAtSamplePoint, ZeroDenominator, ZeroElement

ZERO = Fraction(0)
ONE = Fraction(1)


class PolyRing:
    """Variable context shared by all polynomials of one system.

    The first ``ncoords`` variables are coordinates (they transform under the
    group and enter q); the remaining ones are parameter symbols such as the
    orbit couplings and the Coulomb charge.
    """

    def __init__(self, names: Sequence[str], ncoords: int):
        if not 0 <= ncoords <= len(names):
            raise ValueError("ncoords out of range")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.ncoords = ncoords
        self._zero_exp = (0,) * self.nvars
        self.zero = Poly(self, {})
        self.one = Poly(self, {self._zero_exp: ONE})
        # q = x1^2 + ... + x_M^2; irreducible over Q whenever M >= 2
        qterms = {}
        for i in range(ncoords):
            e = [0] * self.nvars
            e[i] = 2
            qterms[tuple(e)] = ONE
        self.q = Poly(self, qterms)
        # registry of polynomials known to be irreducible (beyond the automatic
        # degree-1 case); systems register their root linear forms here so that
        # denominators split by trial division
        self._irreds: set[Poly] = set()
        self._irred_list: list[Poly] = []
        if ncoords >= 2:
            self.register_irreducible(self.q)

    def var(self, i: int) -> Poly:
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): ONE})

    def var_named(self, name: str) -> Poly:
        return self.var(self.names.index(name))

    def const(self, c) -> Poly:
        c = Fraction(c)
        return Poly(self, {self._zero_exp: c} if c else {})

    def register_irreducible(self, p: Poly) -> None:
        if p not in self._irreds:
            self._irreds.add(p)
            self._irred_list.append(p)
            self._irred_list.sort(key=lambda f: _grlex_key(f.leading()[0]))

    def linear_form(self, coords: Sequence[Fraction]) -> Poly:
        """Polynomial sum coords[i] * x_{i+1} over the coordinate variables."""
        terms = {}
        for i, c in enumerate(coords):
            if c:
                e = [0] * self.nvars
                e[i] = 1
                terms[tuple(e)] = Fraction(c)
        return Poly(self, terms)

    def __repr__(self):
        return f"PolyRing({', '.join(self.names)}; ncoords={self.ncoords})"


def _grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """Sparse multivariate polynomial over Q.  Do not mutate ``terms``."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _trim(terms: dict) -> dict:
        return {e: c for e, c in terms.items() if c}

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero_exp in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get(self.ring._zero_exp, ZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    def leading(self):
        """Leading (exponent, coefficient) under grlex."""
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def is_monic(self) -> bool:
        return bool(self.terms) and self.leading()[1] == 1

    def uses_var(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def coord_free(self) -> bool:
        nc = self.ring.ncoords
        return all(not any(e[:nc]) for e in self.terms)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return self.ring.zero
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        if not a:
            return self.ring.zero
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e)
                if s is None:
                    out[e] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def monic(self):
        if not self.terms:
            return self
        _, lc = self.leading()
        if lc == 1:
            return self
        inv = 1 / lc
        return Poly(self.ring, {e: c * inv for e, c in self.terms.items()})

    def diff(self, i: int):
        """Partial derivative with respect to variable position i (0-based)."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                e2 = tuple(e2)
                s = out.get(e2)
                out[e2] = (s + c * k) if s is not None else c * k
        return Poly(self.ring, self._trim(out))

    def exact_div(self, other: "Poly"):
        """Return self / other if the division is exact, else None."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            return self * (1 / other.constant_value())
        if self.is_zero():
            return self
        ge, gc = other.leading()
        rem = dict(self.terms)
        quo: dict = {}
        while rem:
            e = max(rem, key=_grlex_key)
            de = tuple(a - b for a, b in zip(e, ge))
            if any(x < 0 for x in de):
                return None
            c = rem[e] / gc
            quo[de] = c
            for e2, c2 in other.terms.items():
                et = tuple(a + b for a, b in zip(de, e2))
                s = rem.get(et)
                s = (s if s is not None else ZERO) - c * c2
                if s:
                    rem[et] = s
                else:
                    rem.pop(et, None)
        return Poly(self.ring, quo)

    # -- substitution and evaluation ------------------------------------------

    def subs_coords(self, rows: Sequence[Sequence[Fraction]]):
        """Substitute x_i -> sum_j rows[i][j] * x_j (coordinate variables only)."""
        ring = self.ring
        nc = ring.ncoords
        forms = [ring.linear_form(rows[i]) for i in range(nc)]
        powcache: dict = {}

        def fpow(i, k):
            key = (i, k)
            p = powcache.get(key)
            if p is None:
                p = forms[i] ** k
                powcache[key] = p
            return p

        out = ring.zero
        for e, c in self.terms.items():
            mono = ring.const(c)
            for i in range(nc):
                if e[i]:
                    mono = mono * fpow(i, e[i])
            if any(e[nc:]):
                tail = list(ring._zero_exp)
                tail[nc:] = e[nc:]
                mono = mono * Poly(ring, {tuple(tail): ONE})
            out = out + mono
        return out

    def subs_vars(self, images: Sequence["Poly"]):
        """Substitute every variable by the given polynomial (same ring)."""
        ring = self.ring
        powcache: dict = {}

        def fpow(i, k):
            key = (i, k)
            p = powcache.get(key)
            if p is None:
                p = images[i] ** k
                powcache[key] = p
            return p

        out = ring.zero
        for e, c in self.terms.items():
            mono = ring.const(c)
            for i, k in enumerate(e):
                if k:
                    mono = mono * fpow(i, k)
            out = out + mono
        return out

    def evaluate(self, vals: Sequence):
        """Evaluate at a full assignment (any field with +,*; e.g. Fraction, QQi)."""
        total = None
        powcache: dict = {}
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    p = powcache.get(key)
                    if p is None:
                        p = vals[i] ** k
                        powcache[key] = p
                    v = v * p if p != 1 else v
            total = v if total is None else total + v
        return total if total is not None else ZERO

    # -- structure -----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms and self.ring is other.ring

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(frozenset(self.terms.items()))
        return h

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(self.ring.names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    __repr__ = __str__


# ---------------------------------------------------------------------------
# multivariate GCD (primitive polynomial remainder sequences)
# ---------------------------------------------------------------------------

def _monomial_content(p: Poly):
    """Largest monomial dividing every term, as an exponent tuple."""
    it = iter(p.terms)
    first = next(it)
    mins = list(first)
    for e in it:
        for i, k in enumerate(e):
            if k < mins[i]:
                mins[i] = k
    return tuple(mins)


def _divide_monomial(p: Poly, mono):
    if not any(mono):
        return p
    return Poly(p.ring, {tuple(a - b for a, b in zip(e, mono)): c for e, c in p.terms.items()})


def _coeffs_in_var(p: Poly, i: int) -> dict:
    """Split p as a univariate polynomial in variable i with Poly coefficients."""
    out: dict = {}
    for e, c in p.terms.items():
        k = e[i]
        e2 = list(e)
        e2[i] = 0
        key = tuple(e2)
        d = out.setdefault(k, {})
        d[key] = d.get(key, ZERO) + c
    return {k: Poly(p.ring, Poly._trim(d)) for k, d in out.items()}


def _shift_var(p: Poly, i: int, k: int) -> Poly:
    out = {}
    for e, c in p.terms.items():
        e2 = list(e)
        e2[i] += k
        out[tuple(e2)] = c
    return Poly(p.ring, out)


def _prem(a: Poly, b: Poly, i: int) -> Poly:
    """Pseudo-remainder of a by b with respect to variable i."""
    db = b.degree_in(i)
    lb = _coeffs_in_var(b, i)[db]
    r = a
    while not r.is_zero():
        dr = r.degree_in(i)
        if dr < db:
            break
        lr = _coeffs_in_var(r, i)[dr]
        r = lb * r - _shift_var(lr * b, i, dr - db)
    return r


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic GCD over Q.  gcd(0, g) = monic g; gcd of constants is 1.

    Strategy: strip monomial content, then the evaluation-reconstruction
    heuristic (validated by trial division), with a primitive remainder
    sequence as the fallback.
    """
    if f.is_zero():
        return g.monic() if not g.is_zero() else g
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return f.ring.one
    # monomial part first: cheap and very common here
    mf, mg = _monomial_content(f), _monomial_content(g)
    mono = tuple(min(a, b) for a, b in zip(mf, mg))
    f = _divide_monomial(f, mf)
    g = _divide_monomial(g, mg)
    if f == g:
        core = f
    else:
        core = _heu_gcd_entry(f, g)
        if core is None:
            core = _gcd_inner(f, g)
    if any(mono):
        core = _shift_all(core, mono)
    return core.monic()


# -- heuristic GCD over the integers ----------------------------------------

def _int_terms(p: Poly):
    """Clear denominators: dict exps -> int, primitive up to sign."""
    from math import gcd as igcd, lcm

    den = 1
    for c in p.terms.values():
        den = lcm(den, c.denominator)
    out = {e: int(c * den) for e, c in p.terms.items()}
    cont = 0
    for v in out.values():
        cont = igcd(cont, v)
    if cont > 1:
        out = {e: v // cont for e, v in out.items()}
    return out


def _iterms_eval(terms: dict, var: int, xi: int) -> dict:
    out: dict = {}
    for e, c in terms.items():
        k = e[var]
        e2 = list(e)
        e2[var] = 0
        key = tuple(e2)
        out[key] = out.get(key, 0) + c * xi ** k
    return {e: c for e, c in out.items() if c}


def _iterms_content(terms: dict) -> int:
    from math import gcd as igcd

    cont = 0
    for v in terms.values():
        cont = igcd(cont, v)
    return cont or 1


def _iterms_divide_exact(f: dict, g: dict, nvars: int):
    """Exact division of integer term dicts; None when not divisible."""
    if not g:
        raise ZeroDivisionError
    if not f:
        return {}
    ge = max(g, key=_grlex_key)
    gc = g[ge]
    rem = dict(f)
    quo: dict = {}
    while rem:
        e = max(rem, key=_grlex_key)
        de = tuple(a - b for a, b in zip(e, ge))
        if any(x < 0 for x in de):
            return None
        q, r = divmod(rem[e], gc)
        if r:
            return None
        quo[de] = q
        for e2, c2 in g.items():
            et = tuple(a + b for a, b in zip(de, e2))
            s = rem.get(et, 0) - q * c2
            if s:
                rem[et] = s
            else:
                rem.pop(et, None)
    return quo


def _heu_gcd_entry(f: Poly, g: Poly):
    fi, gi = _int_terms(f), _int_terms(g)
    nv = f.ring.nvars
    used = [i for i in range(nv)
            if any(e[i] for e in fi) or any(e[i] for e in gi)]
    try:
        h = _heu_gcd(fi, gi, used, nv, depth=0)
    except _HeuFailed:
        return None
    if h is None:
        return None
    return Poly(f.ring, {e: Fraction(c) for e, c in h.items()})


class _HeuFailed(Exception):
    pass


def _heu_gcd(f: dict, g: dict, used: list, nv: int, depth: int):
    from math import gcd as igcd

    if not f or not g:
        return f or g
    live = [v for v in used if any(e[v] for e in f) or any(e[v] for e in g)]
    if not live:
        c = igcd(_iterms_content(f), _iterms_content(g))
        return {(0,) * nv: c}
    var = live[0]
    maxnorm = max(max(abs(c) for c in f.values()), max(abs(c) for c in g.values()))
    xi = 2 * maxnorm + 29
    for _ in range(6):
        fe = _iterms_eval(f, var, xi)
        ge = _iterms_eval(g, var, xi)
        if fe and ge:
            gamma = _heu_gcd(fe, ge, live[1:], nv, depth + 1)
            if gamma is not None:
                h = _heu_reconstruct(gamma, var, xi, nv)
                if h:
                    cont = _iterms_content(h)
                    if cont > 1:
                        h = {e: c // cont for e, c in h.items()}
                    if _iterms_divide_exact(f, h, nv) is not None and \
                            _iterms_divide_exact(g, h, nv) is not None:
                        return h
        xi = xi * 73794 // 27011 + 17
    raise _HeuFailed


def _heu_reconstruct(gamma: dict, var: int, xi: int, nv: int) -> dict:
    out: dict = {}
    cur = dict(gamma)
    power = 0
    half = xi // 2
    while cur:
        digit = {}
        nxt = {}
        for e, c in cur.items():
            d = c % xi
            if d > half:
                d -= xi
            if d:
                e2 = list(e)
                e2[var] += power
                digit[tuple(e2)] = d
            rest = (c - d) // xi
            if rest:
                nxt[e] = rest
        out.update(digit)
        cur = nxt
        power += 1
        if power > 200:
            raise _HeuFailed
    return out


def _shift_all(p: Poly, mono) -> Poly:
    return Poly(p.ring, {tuple(a + b for a, b in zip(e, mono)): c for e, c in p.terms.items()})


def _gcd_inner(f: Poly, g: Poly) -> Poly:
    if f == g:
        return f
    if f.is_constant() or g.is_constant():
        return f.ring.one
    ring = f.ring
    # main variable: first one appearing in either operand
    var = next(i for i in range(ring.nvars) if f.uses_var(i) or g.uses_var(i))
    if not f.uses_var(var) or not g.uses_var(var):
        # gcd cannot involve var; recurse on coefficients of the one that uses it
        user, other = (f, g) if f.uses_var(var) else (g, f)
        acc = other
        for coeff in _coeffs_in_var(user, var).values():
            acc = _gcd_inner(acc, coeff)
            if acc.is_constant():
                return ring.one
        return acc

    def content(p):
        acc = None
        for coeff in _coeffs_in_var(p, var).values():
            acc = coeff if acc is None else _gcd_inner(acc, coeff)
            if acc.is_constant():
                return ring.one
        return acc.monic()

    cf, cg = content(f), content(g)
    fp = f.exact_div(cf)
    gp = g.exact_div(cg)
    if fp.degree_in(var) < gp.degree_in(var):
        fp, gp = gp, fp
    while True:
        if gp.is_zero():
            prim = fp
            break
        if not gp.uses_var(var):
            return _gcd_inner(cf, cg)
        r = _prem(fp, gp, var)
        if not r.is_zero():
            r = r.exact_div(content(r))
        fp, gp = gp, r
    prim = prim.exact_div(content(prim))
    return prim * _gcd_inner(cf, cg)


# ---------------------------------------------------------------------------
# rational functions with factored denominators
# ---------------------------------------------------------------------------

def _known_irreducible(p: Poly) -> bool:
    if p.total_degree() == 1:
        return True
    return p in p.ring._irreds


def _factor_den(den: Poly):
    """Split a denominator polynomial into (scalar, [(monic factor, mult), ...]).

    Pulls out the rational content, variable powers, q and registered
    irreducibles; whatever remains is kept whole (an opaque factor).
    """
    ring = den.ring
    if den.is_zero():
        raise ZeroDenominator("denominator is zero")
    if den.is_constant():
        return den.constant_value(), []
    factors: list = []
    _, lc = den.leading()
    scalar = lc
    p = den.monic()
    mono = _monomial_content(p)
    if any(mono):
        for i, k in enumerate(mono):
            if k:
                factors.append((ring.var(i), k))
        p = _divide_monomial(p, mono)
    for cand in ring._irred_list:
        if p.is_constant():
            break
        if cand.total_degree() > p.total_degree():
            continue
        mult = 0
        while True:
            quo = p.exact_div(cand)
            if quo is None:
                break
            p = quo
            mult += 1
        if mult:
            factors.append((cand, mult))
            _, lc2 = p.leading()
            if lc2 != 1:
                scalar *= lc2
                p = p.monic()
    if not p.is_constant():
        factors.append((p, 1))
    else:
        scalar *= p.constant_value()
    return scalar, factors


def _cancel(num: Poly, factors: Iterable):
    """Reduce num against denominator factors until coprime to each of them."""
    work = list(factors)
    out: list = []
    while work:
        f, m = work.pop()
        if m == 0 or num.is_zero():
            continue  # denominator of 0 normalizes to 1
        if _known_irreducible(f):
            while m:
                quo = num.exact_div(f)
                if quo is None:
                    break
                num = quo
                m -= 1
            if m:
                out.append((f, m))
        else:
            g = poly_gcd(num, f)
            if g.is_constant():
                out.append((f, m))
            else:
                # split f = g*h (both monic) and retry; degrees shrink
                h = f.exact_div(g)
                num = num.exact_div(g)
                work.append((g, m - 1))
                if not h.is_constant():
                    work.append((h, m))
    if num.is_zero():
        return num, ()
    out.sort(key=lambda fm: _grlex_key(fm[0].leading()[0]))
    return num, tuple(out)


class RatFunc:
    """Normalized rational function num / prod(factor^mult).

    Invariants: numerator coprime to every denominator factor, every factor is
    monic and non-constant, the expanded denominator is monic, and a zero value
    is stored as 0/1.
    """

    __slots__ = ("ring", "num", "fac", "_den", "_hash")

    def __init__(self, ring: PolyRing, num: Poly, fac=()):
        self.ring = ring
        self.num = num
        self.fac = fac if not num.is_zero() else ()
        self._den = None
        self._hash = None

    @classmethod
    def from_polys(cls, num: Poly, den: Poly) -> "RatFunc":
        """Public normalization entry point (the spec's ``normalize``)."""
        scalar, factors = _factor_den(den)
        num = num * (1 / scalar)
        # full GCD guarantees the invariant even for opaque factors
        num, fac = _cancel(num, factors)
        return cls(num.ring, num, fac)

    @classmethod
    def from_poly(cls, num: Poly) -> "RatFunc":
        return cls(num.ring, num, ())

    @classmethod
    def const(cls, ring: PolyRing, c) -> "RatFunc":
        return cls(ring, ring.const(c), ())

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return not self.fac and self.num.is_constant()

    def den(self) -> Poly:
        d = self._den
        if d is None:
            d = self.ring.one
            for f, m in self.fac:
                d = d * f ** m
            self._den = d
        return d

    def x_free(self) -> bool:
        return self.num.coord_free() and all(f.coord_free() for f, _ in self.fac)

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(self.ring, other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if not self.fac and not other.fac:
            return RatFunc(self.ring, self.num + other.num, ())
        lcm: dict = dict(self.fac)
        for f, m in other.fac:
            if lcm.get(f, 0) < m:
                lcm[f] = m
        def cofactor(own):
            own = dict(own)
            co = self.ring.one
            for f, m in lcm.items():
                d = m - own.get(f, 0)
                if d:
                    co = co * f ** d
            return co
        num = self.num * cofactor(self.fac) + other.num * cofactor(other.fac)
        num, fac = _cancel(num, lcm.items())
        return RatFunc(self.ring, num, fac)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.ring, -self.num, self.fac)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RatFunc(self.ring, self.ring.zero, ())
            return RatFunc(self.ring, self.num * other, self.fac)
        if isinstance(other, Poly):
            other = RatFunc.from_poly(other)
        if self.is_zero() or other.is_zero():
            return RatFunc(self.ring, self.ring.zero, ())
        merged: dict = dict(self.fac)
        for f, m in other.fac:
            merged[f] = merged.get(f, 0) + m
        num, fac = _cancel(self.num * other.num, merged.items())
        return RatFunc(self.ring, num, fac)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDenominator("inverse of zero")
        return RatFunc.from_polys(self.den(), self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (ONE / Fraction(other))
        return self * other.inverse()

    def diff(self, i: int) -> "RatFunc":
        """d/dx_i using the factored quotient rule."""
        distinct = [f for f, _ in self.fac]
        F = self.ring.one
        for f in distinct:
            F = F * f
        top = self.num.diff(i) * F
        for j, (f, m) in enumerate(self.fac):
            co = self.ring.one
            for k, g in enumerate(distinct):
                if k != j:
                    co = co * g
            top = top - self.num * (m * f.diff(i)) * co
        fac = tuple((f, m + 1) for f, m in self.fac)
        num, fac = _cancel(top, fac)
        return RatFunc(self.ring, num, fac)

    def subs_coords(self, rows) -> "RatFunc":
        num = self.num.subs_coords(rows)
        scalar = ONE
        fac: list = []
        for f, m in self.fac:
            g = f.subs_coords(rows)
            _, lc = g.leading()
            if lc != 1:
                scalar *= lc ** m
                g = g.monic()
            fac.append((g, m))
        num, fac = _cancel(num * (1 / scalar), fac)
        return RatFunc(self.ring, num, fac)

    def evaluate(self, vals):
        bottom = None
        for f, m in self.fac:
            v = f.evaluate(vals)
            if not v:
                raise PoleAtSamplePoint(f"denominator factor vanishes: {f}")
            p = v ** m
            bottom = p if bottom is None else bottom * p
        top = self.num.evaluate(vals)
        return top if bottom is None else top / bottom

    # -- structure -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den() == other.den()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((self.num, self.den()))
        return h

    def __str__(self):
        if not self.fac:
            return str(self.num)
        if len(self.num.terms) > 1:
            top = f"({self.num})"
        else:
            top = str(self.num)
        bits = []
        for f, m in self.fac:
            s = f"({f})" if len(f.terms) > 1 else str(f)
            bits.append(s if m == 1 else f"{s}^{m}")
        return f"{top}/" + ("*".join(bits) if len(bits) == 1 else f"({'*'.join(bits)})")

    __repr__ = __str__


def normalize(num: Poly, den: Poly) -> RatFunc:
    """Reduce num/den to the canonical RatFunc form."""
    return RatFunc.from_polys(num, den)


class RExt:
    """Element a + b*r of the radial extension, with r^2 = q."""

    __slots__ = ("ring", "a", "b", "_hash")

    def __init__(self, ring: PolyRing, a: RatFunc, b: RatFunc | None = None):
        self.ring = ring
        self.a = a
        self.b = b if b is not None else RatFunc(ring, ring.zero, ())
        self._hash = None

    @classmethod
    def from_rat(cls, a: RatFunc) -> "RExt":
        return cls(a.ring, a)

    @classmethod
    def const(cls, ring: PolyRing, c) -> "RExt":
        return cls(ring, RatFunc.const(ring, c))

    @classmethod
    def r_element(cls, ring: PolyRing) -> "RExt":
        return cls(ring, RatFunc(ring, ring.zero), RatFunc.const(ring, 1))

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RExt.const(self.ring, other)
        return RExt(self.ring, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return RExt(self.ring, -self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RExt.const(self.ring, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            return RExt(self.ring, self.a * other, self.b * other)
        q = self.ring.q
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        # (a1 + b1 r)(a2 + b2 r) with r^2 = q
        a = a1 * a2
        if not (b1.is_zero() or b2.is_zero()):
            a = a + b1 * b2 * q
        b = a1 * b2 + b1 * a2
        return RExt(self.ring, a, b)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = RExt.const(self.ring, 1)
        base = self
        for _ in range(n):
            result = result * base
        return result

    def partial(self, i: int) -> "RExt":
        """d/dx_i with 1-based axis index; uses dr/dx_i = x_i * r / q."""
        k = i - 1
        xi_over_q = RatFunc.from_polys(self.ring.var(k), self.ring.q)
        return RExt(self.ring, self.a.diff(k), self.b.diff(k) + self.b * xi_over_q)

    def act_linear(self, mat) -> "RExt":
        """Substitute x -> M^{-1} x in both components; requires M orthogonal."""
        rows = _inverse_rows_checked(mat)
        return RExt(self.ring, self.a.subs_coords(rows), self.b.subs_coords(rows))

    def invert(self) -> "RExt":
        if self.is_zero():
            raise ZeroElement("cannot invert zero")
        d = self.a * self.a - self.b * self.b * self.ring.q
        if d.is_zero():
            raise NotInvertible("a^2 - b^2 q vanishes; element is a zero divisor")
        dinv = d.inverse()
        return RExt(self.ring, self.a * dinv, -self.b * dinv)

    def evaluate_pair(self, vals):
        """Evaluate both components; the value is pair[0] + pair[1]*r at the point."""
        return self.a.evaluate(vals), self.b.evaluate(vals)

    def __eq__(self, other):
        if not isinstance(other, RExt):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((self.a, self.b))
        return h

    def __str__(self):
        if self.b.is_zero():
            return str(self.a)
        rpart = f"({self.b})*r"
        if self.a.is_zero():
            return rpart
        return f"{self.a} + {rpart}"

    __repr__ = __str__


def _inverse_rows_checked(mat):
    """Rows of M^T (= M^{-1} for orthogonal M), validating orthogonality."""
    n = len(mat)
    for i in range(n):
        for j in range(n):
            s = sum(mat[k][i] * mat[k][j] for k in range(n))
            if s != (1 if i == j else 0):
                raise NotOrthogonal("matrix is not orthogonal")
    return [[mat[j][i] for j in range(n)] for i in range(n)]


def partial(f: RExt, i: int) -> RExt:
    """Spec-level wrapper: d/dx_i, 1-based axis index."""
    return f.partial(i)


def act_linear(f: RExt, mat) -> RExt:
    return f.act_linear(mat)


def invert(f: RExt) -> RExt:
    return f.invert()
