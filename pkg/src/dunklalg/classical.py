"""Commutative phase-space layer: classical angular momenta M_ij = x_i p_j -
x_j p_i, crossing rewriting via the Pluecker relation, the quotient basis
modulo the total angular square, exact null-pair normalization, and highest
symbols of PBW monomials.

Null-variety sampling note: over the real rationals the total angular square
is a sum of squares, so rational points with it zero force every M_ij = 0.
Exact sampling therefore uses Gaussian-rational pairs (real x, complex p)
built directly in normalized form; see ``random_null_pair``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateInput, GroupPartNotIdentity, NotNull
from .exactnum import Poly, PolyRing
from .linalg import QQi

_F = Fraction


def phase_ring(m: int) -> PolyRing:
    """Polynomial ring in commuting x_1..x_m, p_1..p_m."""
    names = [f"x{i + 1}" for i in range(m)] + [f"p{i + 1}" for i in range(m)]
    return PolyRing(names, 0)


def _xvar(ring: PolyRing, m: int, i: int) -> Poly:
    return ring.var(i - 1)


def _pvar(ring: PolyRing, m: int, i: int) -> Poly:
    return ring.var(m + i - 1)


def m_poly(ring: PolyRing, i: int, j: int, m: int | None = None) -> Poly:
    """Classical angular momentum x_i p_j - x_j p_i."""
    m = m if m is not None else ring.nvars // 2
    return _xvar(ring, m, i) * _pvar(ring, m, j) - _xvar(ring, m, j) * _pvar(ring, m, i)


def acl_poly(ring: PolyRing, i: int, n: int | None = None) -> Poly:
    """Classical conserved-vector symbol: sum_j p_j (x_j p_i - x_i p_j)."""
    m = ring.nvars // 2
    n = n if n is not None else m
    total = ring.zero
    for j in range(1, n + 1):
        total = total + _pvar(ring, m, j) * (
            _xvar(ring, m, j) * _pvar(ring, m, i) - _xvar(ring, m, i) * _pvar(ring, m, j))
    return total


def p2_poly(ring: PolyRing, n: int | None = None) -> Poly:
    m = ring.nvars // 2
    n = n if n is not None else m
    total = ring.zero
    for i in range(1, n + 1):
        total = total + _pvar(ring, m, i) * _pvar(ring, m, i)
    return total


def msq_poly(ring: PolyRing, m_points: int) -> Poly:
    """sum_{i<j<=m} M_ij^2 (equals x^2 p^2 - (x.p)^2 on the first m pairs)."""
    total = ring.zero
    for i in range(1, m_points + 1):
        for j in range(i + 1, m_points + 1):
            mij = m_poly(ring, i, j)
            total = total + mij * mij
    return total


def expand_arcs(ring: PolyRing, arcs) -> Poly:
    """Product of M_ij over an arc multiset."""
    total = ring.one
    for (i, j) in arcs:
        total = total * m_poly(ring, i, j)
    return total


# ---------------------------------------------------------------------------
# crossing rewriting (symbol level, coefficients +-1)
# ---------------------------------------------------------------------------

def _cross_pair(arcs):
    for s, e in enumerate(arcs):
        for t in range(s + 1, len(arcs)):
            f = arcs[t]
            (a, b), (c, d) = (e, f) if e <= f else (f, e)
            if a < c < b < d:
                return s, t
    return None


def rewrite_noncrossing(arcs):
    """Rewrite an M-monomial (arc multiset) into non-crossing monomials.

    Returns [(sorted arc tuple, +-1 coefficient), ...]; the expansion equals
    the input as a phase-space polynomial (Pluecker relation each step).
    """
    work = [(tuple(sorted(arcs)), 1)]
    out: dict = {}
    while work:
        arcs_t, coeff = work.pop()
        hit = _cross_pair(arcs_t)
        if hit is None:
            key = tuple(sorted(arcs_t))
            out[key] = out.get(key, 0) + coeff
            if out[key] == 0:
                del out[key]
            continue
        s, t = hit
        e, f = arcs_t[s], arcs_t[t]
        (a, b), (c, d) = (e, f) if e <= f else (f, e)
        rest = tuple(x for k, x in enumerate(arcs_t) if k not in (s, t))
        # Pluecker: M_ab M_cd = M_ac M_bd + M_ad M_cb   (a < c < b < d)
        work.append((rest + ((a, c), (b, d)), coeff))
        work.append((rest + ((a, d), (c, b)), coeff))
    return sorted(out.items())


# ---------------------------------------------------------------------------
# quotient basis modulo the total angular square on m points
# ---------------------------------------------------------------------------

def quotient_basis(m_points: int, degree: int):
    """Non-crossing arc monomials on 1..m with the last arc (m-1, m) of
    multiplicity at most 1, up to the given total degree."""
    all_arcs = [(i, j) for i in range(1, m_points + 1)
                for j in range(i + 1, m_points + 1)]
    last = (m_points - 1, m_points)
    out = []

    def rec(idx, chosen, support, rem):
        out.append(tuple(chosen))
        if rem == 0 or idx == len(all_arcs):
            return
        for k in range(idx, len(all_arcs)):
            arc = all_arcs[k]
            if any(_cross(arc, a) for a in support):
                continue
            cap = min(rem, 1) if arc == last else rem
            for mult in range(1, cap + 1):
                rec(k + 1, chosen + [arc] * mult, support + [arc], rem - mult)

    def _cross(e, f):
        (a, b), (c, d) = (e, f) if e <= f else (f, e)
        return a < c < b < d

    rec(0, [], [], degree)
    return sorted(set(out), key=lambda t: (len(t), t))


# ---------------------------------------------------------------------------
# null pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NullNormalization:
    lmbda: object
    mu: object
    xhat: tuple
    phat: tuple


def _dot(u, v):
    total = None
    for a, b in zip(u, v):
        t = a * b
        total = t if total is None else total + t
    return total


def normalize_null_pair(x, p) -> NullNormalization:
    """Rescale (x, p) with x.p = -lambda mu x.x so that the hatted pair has
    x.p = 0 and p^2 = 0, leaving every M_ij unchanged.

    Works over Fraction or QQi coordinates; lambda is fixed to 1 so mu is
    always solvable in the base field.
    """
    x = tuple(x)
    p = tuple(p)
    xx = _dot(x, x)
    if not xx:
        raise DegenerateInput("x has zero squared length")
    xp = _dot(x, p)
    pp = _dot(p, p)
    if xx * pp - xp * xp:
        raise NotNull("pair does not satisfy the null condition")
    lam = _F(1) if isinstance(xx, Fraction) else QQi(1)
    mu = -xp / xx
    phat = tuple(pi + mu * xi for pi, xi in zip(p, x))
    return NullNormalization(lmbda=lam, mu=mu, xhat=x, phat=phat)


def random_null_pair(m: int, rnd, rotations: int = 2):
    """Seeded Gaussian-rational pair on the null variety, already normalized:
    x real rational, p = u + i v with |u| = |v|, u.v = 0, x orthogonal to both.

    Needs m >= 3 (the real points of the variety are the parallel pairs).
    """
    if m < 3:
        raise DegenerateInput("need at least 3 coordinates for a generic null pair")

    def rat(bound=9):
        while True:
            v = _F(rnd.randint(-bound, bound), rnd.randint(1, bound))
            if v:
                return v

    while True:
        u = [_F(0)] * m
        v = [_F(0)] * m
        idx = list(range(m))
        rnd.shuffle(idx)
        for t in range(m // 2):
            k, l = idx[2 * t], idx[2 * t + 1]
            a, b = rat(), rat()
            u[k], u[l] = a, b
            v[k], v[l] = -b, a
        # x random in the orthogonal complement of u and v
        x0 = [rat() for _ in range(m)]
        uu, vv = _dot(u, u), _dot(v, v)
        cu, cv = _dot(x0, u) / uu, _dot(x0, v) / vv
        x = [xi - cu * ui - cv * vi for xi, ui, vi in zip(x0, u, v)]
        if not any(x):
            continue
        for _ in range(rotations):
            k, l = rnd.sample(range(m), 2)
            pq, qq = rnd.randint(1, 9), rnd.randint(1, 9)
            if pq == qq:
                pq += 1
            c = _F(pq * pq - qq * qq, pq * pq + qq * qq)
            s = _F(2 * pq * qq, pq * pq + qq * qq)
            for vec in (x, u, v):
                vk, vl = vec[k], vec[l]
                vec[k], vec[l] = c * vk - s * vl, s * vk + c * vl
        xq = tuple(QQi(c) for c in x)
        pq_ = tuple(QQi(a, b) for a, b in zip(u, v))
        if _dot(xq, xq):
            return xq, pq_


def evaluate_arcs(arcs, x, p):
    """Value of the M-monomial at a point (any field)."""
    total = None
    for (i, j) in arcs:
        val = x[i - 1] * p[j - 1] - x[j - 1] * p[i - 1]
        total = val if total is None else total * val
    return _F(1) if total is None else total


# ---------------------------------------------------------------------------
# highest symbols
# ---------------------------------------------------------------------------

def highest_symbol(mono, ring: PolyRing, n: int | None = None) -> Poly:
    """Leading classical symbol of a PBW monomial with identity group part:
    L_ij -> M_ij, A_i -> sum_j p_j(x_j p_i - x_i p_j), H -> p^2."""
    if mono.w != 0:
        raise GroupPartNotIdentity("highest symbols need trivial group part")
    m = ring.nvars // 2
    n = n if n is not None else m
    total = ring.one
    for (i, j) in mono.arcs:
        total = total * m_poly(ring, i, j)
    for t in mono.avec:
        total = total * acl_poly(ring, t, n)
    for _ in range(mono.hpow):
        total = total * p2_poly(ring, n)
    return total
