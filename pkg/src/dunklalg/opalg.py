"""Normal-ordered operator algebra: finite sums  c(x,r) * D^beta * w  over group
elements w, with exact composition, action on functions, formal adjoints, and
constructors for the whole operator catalog (Dunkl operators, exchange
elements, angular momenta, the Coulomb-deformed Hamiltonian in both forms, the
conserved vector in its three forms, the angular Casimir, radial operators and
the local restricted Hamiltonian).

Normal form: derivative symbols commute with each other, so each term is
  coefficient (RExt)  x  monomial in D_1..D_M (multi-index beta)  x  w.
Coefficients are uniquely determined, hence structural equality of the term
dictionaries is exact operator equality and `is_zero` needs no sampling.

Composition rules (operators act as (w psi)(x) = psi(w^{-1} x)):
  D^beta o c  = sum over gamma <= beta of binom(beta, gamma) (d^gamma c) D^(beta-gamma)
  w o c       = (c o w-substitution) o w
  w o D_xi    = D_{w(xi)} o w
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb

from .coxeter import GroupAlgebraElement, System, exchange_element, s_element
from .errors import BadSpec, DimensionMismatch
from .exactnum import Poly, RatFunc, RExt

_F = Fraction


# -- multi-index helpers ------------------------------------------------------

@lru_cache(maxsize=None)
def _subindices(beta):
    """All gamma <= beta with multinomial binom(beta, gamma), ascending degree.

    gamma = 0 comes first so incremental derivative caches can walk upward.
    """
    ranges = [range(b + 1) for b in beta]
    out = []
    def rec(i, cur, coeff):
        if i == len(beta):
            out.append((tuple(cur), coeff))
            return
        for g in ranges[i]:
            cur.append(g)
            rec(i + 1, cur, coeff * comb(beta[i], g))
            cur.pop()
    rec(0, [], 1)
    out.sort(key=lambda t: sum(t[0]))
    return tuple(out)


def _exp_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _exp_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dconv(d1: dict, d2: dict) -> dict:
    out: dict = {}
    for e1, c1 in d1.items():
        for e2, c2 in d2.items():
            e = _exp_add(e1, e2)
            s = out.get(e)
            s = c1 * c2 if s is None else s + c1 * c2
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _act_cached(sys: System, w: int, c: RExt) -> RExt:
    """Coefficient substitution x -> w^{-1}x, cached across compositions."""
    key = ("actl", w, c)
    out = sys._cache.get(key)
    if out is None:
        out = c.act_linear(sys.table.matrix(w))
        sys._cache[key] = out
    return out


def _diff_cached(sys: System, c: RExt, k: int) -> RExt:
    """d/dx_{k+1} of a coefficient, cached (coefficients recur across ops)."""
    key = ("dcoef", c, k)
    out = sys._cache.get(key)
    if out is None:
        out = c.partial(k + 1)
        sys._cache[key] = out
    return out


def _conj_deriv(sys: System, w: int, beta) -> dict:
    """Expansion of  w D^beta w^{-1}  as a polynomial in D_1..D_M (w orthogonal)."""
    key = ("conj_deriv", w, beta)
    cached = sys._cache.get(key)
    if cached is not None:
        return cached
    M = sys.dim
    m = sys.table.matrix(w)
    zero = (0,) * M
    result = {zero: _F(1)}
    for i, k in enumerate(beta):
        if not k:
            continue
        form = {}
        for row in range(M):
            c = m[row][i]
            if c:
                e = [0] * M
                e[row] = 1
                form[tuple(e)] = c
        p = {zero: _F(1)}
        for _ in range(k):
            p = _dconv(p, form)
        result = _dconv(result, p)
    sys._cache[key] = result
    return result


class Operator:
    """Immutable normal-ordered operator over a System."""

    __slots__ = ("sys", "terms")

    def __init__(self, sys: System, terms: dict, trim: bool = True):
        self.sys = sys
        if trim:
            clean = {}
            for w, d in terms.items():
                dd = {b: c for b, c in d.items() if not c.is_zero()}
                if dd:
                    clean[w] = dd
            terms = clean
        self.terms = terms

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, sys: System) -> "Operator":
        return cls(sys, {}, trim=False)

    @classmethod
    def constant(cls, sys: System, c) -> "Operator":
        if isinstance(c, (int, Fraction)):
            c = RExt.const(sys.ring, c)
        elif isinstance(c, Poly):
            c = RExt.from_rat(RatFunc.from_poly(c))
        elif isinstance(c, RatFunc):
            c = RExt.from_rat(c)
        if c.is_zero():
            return cls.zero(sys)
        return cls(sys, {0: {(0,) * sys.dim: c}}, trim=False)

    @classmethod
    def from_group_algebra(cls, g: GroupAlgebraElement) -> "Operator":
        sys = g.sys
        zero = (0,) * sys.dim
        return cls(sys, {w: {zero: RExt.from_rat(c)} for w, c in g.coeffs.items()})

    # -- linear structure --------------------------------------------------------

    def _check(self, other: "Operator"):
        if self.sys is not other.sys:
            raise DimensionMismatch("operators live over different systems")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Operator.constant(self.sys, other)
        self._check(other)
        out = {w: dict(d) for w, d in self.terms.items()}
        for w, d in other.terms.items():
            bucket = out.setdefault(w, {})
            for b, c in d.items():
                s = bucket.get(b)
                bucket[b] = c if s is None else s + c
        return Operator(self.sys, out)

    __radd__ = __add__

    def __neg__(self):
        return Operator(self.sys,
                        {w: {b: -c for b, c in d.items()} for w, d in self.terms.items()},
                        trim=False)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Operator.constant(self.sys, other)
        return self + (-other)

    def __mul__(self, scalar):
        """Left multiplication by a function or constant: (c*P) psi = c * (P psi)."""
        if isinstance(scalar, (int, Fraction, Poly, RatFunc)):
            if isinstance(scalar, Poly):
                scalar = RatFunc.from_poly(scalar)
            if isinstance(scalar, (int, Fraction)):
                scalar = RatFunc.const(self.sys.ring, scalar)
            scalar = RExt.from_rat(scalar)
        return Operator(self.sys,
                        {w: {b: scalar * c for b, c in d.items()}
                         for w, d in self.terms.items()})

    __rmul__ = __mul__

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self.sys is other.sys and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((w, b, c) for w, d in self.terms.items() for b, c in d.items()))

    def order(self) -> int:
        return max((sum(b) for d in self.terms.values() for b in d), default=0)

    def support(self):
        return sorted(self.terms)

    def render(self) -> str:
        """Deterministic text form ``coeff * D^beta * w#k``, one term per line."""
        if not self.terms:
            return "0"
        lines = []
        for w in sorted(self.terms):
            for b in sorted(self.terms[w]):
                c = self.terms[w][b]
                dpart = "".join(
                    f"*D{i + 1}" if k == 1 else f"*D{i + 1}^{k}"
                    for i, k in enumerate(b) if k)
                lines.append(f"({c}){dpart} * w#{w}")
        return "\n".join(lines)

    def __repr__(self):
        n = sum(len(d) for d in self.terms.values())
        return f"<Operator {len(self.terms)} group terms, {n} monomials>"

    def first_nonzero_term(self):
        """(w, beta, coeff) of the first term in rendering order, for reports."""
        for w in sorted(self.terms):
            for b in sorted(self.terms[w]):
                return w, b, self.terms[w][b]
        return None


def compose(P: Operator, Q: Operator) -> Operator:
    """Normal form of P o Q."""
    P._check(Q)
    sys = P.sys
    table = sys.table
    M = sys.dim
    zero_beta = (0,) * M
    out: dict = {}
    for w1, d1 in P.terms.items():
        id1 = w1 == 0
        b1_items = list(d1.items())
        for w2, d2 in Q.terms.items():
            w = table.product(w1, w2)
            bucket = out.get(w)
            if bucket is None:
                bucket = out[w] = {}
            for b2, c2 in d2.items():
                c2p = c2 if id1 else _act_cached(sys, w1, c2)
                dp2 = {b2: _F(1)} if id1 else _conj_deriv(sys, w1, b2)
                dcache = {zero_beta: c2p}
                x_const = c2p.a.x_free() and c2p.b.is_zero()
                for b1, c1 in b1_items:
                    if b1 == zero_beta or x_const:
                        coeff = c1 * c2p
                        if not coeff.is_zero():
                            for b3, fr in dp2.items():
                                _acc(bucket, _exp_add(b1, b3), coeff * fr)
                        continue
                    for g, binom in _subindices(b1):
                        dc = dcache.get(g)
                        if dc is None:
                            k = next(i for i, v in enumerate(g) if v)
                            prev = dcache[_exp_sub(g, _unit_exp(M, k))]
                            dc = _diff_cached(sys, prev, k)
                            dcache[g] = dc
                        if dc.is_zero():
                            continue
                        coeff = c1 * dc
                        if binom != 1:
                            coeff = coeff * binom
                        rest = _exp_sub(b1, g)
                        for b3, fr in dp2.items():
                            _acc(bucket, _exp_add(rest, b3), coeff * fr)
    return Operator(sys, out)


@lru_cache(maxsize=None)
def _unit_exp(m, k):
    e = [0] * m
    e[k] = 1
    return tuple(e)


def _acc(bucket: dict, beta, val: RExt):
    s = bucket.get(beta)
    bucket[beta] = val if s is None else s + val


def commutator(P: Operator, Q: Operator) -> Operator:
    return compose(P, Q) - compose(Q, P)


def anticommutator(P: Operator, Q: Operator) -> Operator:
    return compose(P, Q) + compose(Q, P)


def apply_op(P: Operator, f: RExt) -> RExt:
    """Action of P on a function a + b r."""
    sys = P.sys
    M = sys.dim
    zero_beta = (0,) * M
    total = RExt.const(sys.ring, 0)
    for w, d in P.terms.items():
        fw = f if w == 0 else f.act_linear(sys.table.matrix(w))
        dcache = {zero_beta: fw}

        def derive(beta):
            dc = dcache.get(beta)
            if dc is None:
                k = next(i for i, v in enumerate(beta) if v)
                dc = derive(_exp_sub(beta, _unit_exp(M, k))).partial(k + 1)
                dcache[beta] = dc
            return dc

        for b, c in sorted(d.items(), key=lambda t: sum(t[0])):
            total = total + c * derive(b)
    return total


def adjoint(P: Operator) -> Operator:
    """Formal Hermitian conjugate: x+ = x, d+ = -d, w+ = w^{-1}, r+ = r."""
    sys = P.sys
    table = sys.table
    zero_beta = (0,) * sys.dim
    total = Operator.zero(sys)
    for w, d in P.terms.items():
        winv = table.inverse(w)
        op_w = Operator(sys, {winv: {zero_beta: RExt.const(sys.ring, 1)}})
        for b, c in d.items():
            sign = -1 if sum(b) % 2 else 1
            op_d = Operator(sys, {0: {b: RExt.const(sys.ring, sign)}})
            op_c = Operator(sys, {0: {zero_beta: c}})
            total = total + compose(op_w, compose(op_d, op_c))
    return total


def is_zero(P: Operator) -> bool:
    return P.is_zero()


# ---------------------------------------------------------------------------
# operator catalog
# ---------------------------------------------------------------------------

def _cached(sys: System, key, builder):
    op = sys._cache.get(key)
    if op is None:
        op = builder()
        sys._cache[key] = op
    return op


def x_op(sys: System, i: int) -> Operator:
    _check_axis(sys, i)
    return _cached(sys, ("op_x", i), lambda: Operator(
        sys, {0: {(0,) * sys.dim: RExt.from_rat(RatFunc.from_poly(sys.ring.var(i - 1)))}}))


def d_op(sys: System, i: int) -> Operator:
    _check_axis(sys, i)
    return _cached(sys, ("op_d", i), lambda: Operator(
        sys, {0: {_unit_exp(sys.dim, i - 1): RExt.const(sys.ring, 1)}}))


def w_op(sys: System, w_idx: int) -> Operator:
    return Operator(sys, {w_idx: {(0,) * sys.dim: RExt.const(sys.ring, 1)}})


def reflection_op(sys: System, root_idx: int) -> Operator:
    return w_op(sys, sys.table.reflection_of_root[root_idx])


def dunkl_op(sys: System, i: int) -> Operator:
    """Dunkl operator along e_i: d_i minus the reflection terms g a_i/(a,x) s_a."""
    _check_axis(sys, i)

    def build():
        terms: dict = {0: {_unit_exp(sys.dim, i - 1): RExt.const(sys.ring, 1)}}
        zero_beta = (0,) * sys.dim
        for ri, a in enumerate(sys.rs.positive_roots):
            ai = a[i - 1]
            if not ai:
                continue
            w = sys.table.reflection_of_root[ri]
            coeff = RExt.from_rat(
                RatFunc.from_polys(sys.g_of_root(ri) * (-ai), sys.root_form(ri)))
            bucket = terms.setdefault(w, {})
            prev = bucket.get(zero_beta)
            bucket[zero_beta] = coeff if prev is None else prev + coeff
        return Operator(sys, terms)

    return _cached(sys, ("op_dunkl", i), build)


def exchange_op(sys: System, i: int, j: int) -> Operator:
    return _cached(sys, ("op_S", i, j),
                   lambda: Operator.from_group_algebra(exchange_element(sys, i, j)))


def s_op(sys: System) -> Operator:
    return _cached(sys, ("op_Selem",),
                   lambda: Operator.from_group_algebra(s_element(sys)))


def angmom_op(sys: System, i: int, j: int) -> Operator:
    """Dunkl angular momentum L_ij = x_i nabla_j - x_j nabla_i."""
    _check_axis(sys, i)
    _check_axis(sys, j)

    def build():
        return (compose(x_op(sys, i), dunkl_op(sys, j))
                - compose(x_op(sys, j), dunkl_op(sys, i)))

    return _cached(sys, ("op_L", i, j), build)


def laplacian_dunkl_op(sys: System) -> Operator:
    """Square of the Dunkl gradient, sum of dunkl_op(i)^2."""

    def build():
        total = Operator.zero(sys)
        for i in range(1, sys.dim + 1):
            di = dunkl_op(sys, i)
            total = total + compose(di, di)
        return total

    return _cached(sys, ("op_nabla2",), build)


def rinv_op(sys: System) -> Operator:
    """Multiplication by 1/r, stored as r/q."""
    return _cached(sys, ("op_rinv",), lambda: Operator(
        sys, {0: {(0,) * sys.dim: RExt(
            sys.ring,
            RatFunc.const(sys.ring, 0),
            RatFunc.from_polys(sys.ring.one, sys.ring.q))}}))


def rdr_op(sys: System) -> Operator:
    """Euler operator r d/dr = sum x_k d_k."""

    def build():
        terms = {0: {}}
        for k in range(sys.dim):
            terms[0][_unit_exp(sys.dim, k)] = RExt.from_rat(
                RatFunc.from_poly(sys.ring.var(k)))
        return Operator(sys, terms)

    return _cached(sys, ("op_rdr",), build)


def hamiltonian_op(sys: System, form: str = "potential") -> Operator:
    """Coulomb-deformed Hamiltonian.

    form='potential': Laplacian - sum g(g - s_a)(a,a)/(a,x)^2 + 2 gamma / r.
    form='dunkl_square': sum of squared Dunkl operators + 2 gamma / r.
    Both normal forms agree (verified by the identity suite).
    """
    if form == "dunkl_square":
        def build_sq():
            return laplacian_dunkl_op(sys) + compose(
                Operator.constant(sys, 2 * sys.gamma), rinv_op(sys))
        return _cached(sys, ("op_H", "dunkl_square"), build_sq)
    if form != "potential":
        raise BadSpec(f"unknown Hamiltonian form {form!r}")

    def build():
        ring = sys.ring
        zero_beta = (0,) * sys.dim
        terms: dict = {0: {}}
        for k in range(sys.dim):
            e = list(zero_beta)
            e[k] = 2
            terms[0][tuple(e)] = RExt.const(ring, 1)
        ident = RatFunc.const(ring, 0)
        for ri in range(len(sys.rs.positive_roots)):
            g = sys.g_of_root(ri)
            aa = sys.rs.root_norm2(ri)
            lf = sys.root_form(ri)
            ident = ident + RatFunc.from_polys(g * g * (-aa), lf * lf)
            w = sys.table.reflection_of_root[ri]
            bucket = terms.setdefault(w, {})
            c = RExt.from_rat(RatFunc.from_polys(g * aa, lf * lf))
            prev = bucket.get(zero_beta)
            bucket[zero_beta] = c if prev is None else prev + c
        coulomb = RatFunc.from_polys(2 * sys.gamma, ring.q)
        base = terms[0].get(zero_beta)
        extra = RExt(ring, ident, coulomb)
        terms[0][zero_beta] = extra if base is None else base + extra
        return Operator(sys, terms)

    return _cached(sys, ("op_H", "potential"), build)


def casimir_op(sys: System) -> Operator:
    """Angular Casimir: sum_{i<j} L_ij^2 - S(S - N + 2)."""

    def build():
        total = Operator.zero(sys)
        for i in range(1, sys.dim + 1):
            for j in range(i + 1, sys.dim + 1):
                lij = angmom_op(sys, i, j)
                total = total + compose(lij, lij)
        s = s_op(sys)
        total = total - compose(s, s - Operator.constant(sys, sys.dim - 2))
        return total

    return _cached(sys, ("op_I",), build)


def lrl_op(sys: System, i: int, form: str = "anticommutator") -> Operator:
    """Conserved vector component A_i in one of its three equivalent forms.

    'anticommutator':  -1/2 sum_j {L_ij, nabla_j} + 1/2 [nabla_i, S] - gamma x_i / r
    'right':           -x_i (nabla^2 + gamma/r) + nabla_i (r d_r + (N-3)/2)
    'left':            -(nabla^2 + gamma/r) x_i + (r d_r + (N+3)/2) nabla_i
    """
    _check_axis(sys, i)

    def build():
        ring = sys.ring
        N = sys.dim
        ni = dunkl_op(sys, i)
        if form == "anticommutator":
            total = Operator.zero(sys)
            for j in range(1, N + 1):
                if j == i:
                    continue
                lij = angmom_op(sys, i, j)
                total = total + anticommutator(lij, dunkl_op(sys, j))
            total = total * _F(-1, 2)
            total = total + commutator(ni, s_op(sys)) * _F(1, 2)
            coul = RExt(ring, RatFunc.const(ring, 0),
                        RatFunc.from_polys(-sys.gamma * ring.var(i - 1), ring.q))
            return total + Operator(sys, {0: {(0,) * N: coul}})
        gamma_rinv = compose(Operator.constant(sys, sys.gamma), rinv_op(sys))
        core = laplacian_dunkl_op(sys) + gamma_rinv
        if form == "right":
            shift = rdr_op(sys) + Operator.constant(sys, _F(N - 3, 2))
            return -compose(x_op(sys, i), core) + compose(ni, shift)
        if form == "left":
            shift = rdr_op(sys) + Operator.constant(sys, _F(N + 3, 2))
            return -compose(core, x_op(sys, i)) + compose(shift, ni)
        raise BadSpec(f"unknown LRL form {form!r}")

    return _cached(sys, ("op_A", i, form), build)


def local_hamiltonian_op(sys: System) -> Operator:
    """Restricted Hamiltonian: Laplacian - sum g(g-1)(a,a)/(a,x)^2 + 2 gamma / r."""

    def build():
        ring = sys.ring
        zero_beta = (0,) * sys.dim
        terms: dict = {0: {}}
        for k in range(sys.dim):
            e = list(zero_beta)
            e[k] = 2
            terms[0][tuple(e)] = RExt.const(ring, 1)
        ident = RatFunc.const(ring, 0)
        for ri in range(len(sys.rs.positive_roots)):
            g = sys.g_of_root(ri)
            aa = sys.rs.root_norm2(ri)
            lf = sys.root_form(ri)
            ident = ident + RatFunc.from_polys(g * (g - ring.one) * (-aa), lf * lf)
        coulomb = RatFunc.from_polys(2 * sys.gamma, ring.q)
        base = terms[0].get(zero_beta)
        extra = RExt(ring, ident, coulomb)
        terms[0][zero_beta] = extra if base is None else base + extra
        return Operator(sys, terms)

    return _cached(sys, ("op_Hloc",), build)


def _check_axis(sys: System, i: int):
    if not 1 <= i <= sys.dim:
        raise BadSpec(f"axis index {i} out of range 1..{sys.dim}")


_SPEC_RE = re.compile(r"([A-Za-z2+]+)(?:\(([^)]*)\))?$")


def make(sys: System, spec: str) -> Operator:
    """Textual constructor catalog.

    Accepted: x(i), d(i), dunkl(i), S(i,j), L(i,j), H, Hsq, A(i), A2(i),
    A2p(i), I, rdr, rinv, Hloc, w(r1,r2,...) with positive-root indices.
    """
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise BadSpec(f"cannot parse operator spec {spec!r}")
    name, argtext = m.group(1), m.group(2)
    args = []
    if argtext is not None and argtext.strip():
        try:
            args = [int(a) for a in argtext.split(",")]
        except ValueError as exc:
            raise BadSpec(f"bad arguments in {spec!r}") from exc
    try:
        if name == "x":
            return x_op(sys, *args)
        if name == "d":
            return d_op(sys, *args)
        if name == "dunkl":
            return dunkl_op(sys, *args)
        if name == "S":
            return exchange_op(sys, *args)
        if name == "L":
            return angmom_op(sys, *args)
        if name == "H":
            return hamiltonian_op(sys)
        if name == "Hsq":
            return hamiltonian_op(sys, form="dunkl_square")
        if name == "A":
            return lrl_op(sys, *args)
        if name == "A2":
            return lrl_op(sys, args[0], form="right")
        if name == "A2p":
            return lrl_op(sys, args[0], form="left")
        if name == "I":
            return casimir_op(sys)
        if name == "rdr":
            return rdr_op(sys)
        if name == "rinv":
            return rinv_op(sys)
        if name == "Hloc":
            return local_hamiltonian_op(sys)
        if name == "w":
            for r in args:
                if not 1 <= r <= len(sys.rs.positive_roots):
                    raise BadSpec(f"root index {r} out of range")
            return w_op(sys, sys.table.word([r - 1 for r in args]))
    except TypeError as exc:
        raise BadSpec(f"wrong argument count in {spec!r}") from exc
    raise BadSpec(f"unknown operator spec {spec!r}")
