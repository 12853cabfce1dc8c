"""Superintegrability certificates: invariant generation at the symbol level,
exact Jacobian-rank transcendence bounds, Weyl quantization into the abstract
symmetry algebra, and restriction checks against the local Hamiltonian.

The classical symbol algebra is generated by P2 (momentum square), M_ij
(angular momenta, transforming in the exterior square of the standard
representation) and A_i (conserved-vector symbols, standard representation).
Invariants are produced with the Reynolds projector, their algebraic
independence is certified by an exact Jacobian rank at rational points, and
each quantized invariant J is checked three ways: [H, J] = 0 as operators,
J preserves W-invariant test functions, and [H_local, J] annihilates every
W-invariant test function (exactly).
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import classical, opalg, rgw
from .coxeter import System
from .errors import DegeneratePoint, NotInvariant
from .exactnum import Poly, PolyRing, RatFunc, RExt
from .linalg import rank as exact_rank
from .linalg import reduce_to_independent

_F = Fraction


# ---------------------------------------------------------------------------
# symbol ring and W-action
# ---------------------------------------------------------------------------

def symbol_ring(n: int) -> PolyRing:
    """Ring in P2, M_ij (i<j), A_1..A_n."""
    names = ["P2"]
    names += [f"M{i}_{j}" for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    names += [f"A{i}" for i in range(1, n + 1)]
    return PolyRing(names, 0)


def _sym_index(n: int):
    pos = {"P2": 0}
    k = 1
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            pos[(i, j)] = k
            k += 1
    for i in range(1, n + 1):
        pos[f"A{i}"] = k
        k += 1
    return pos


def _action_images(sys: System, ring: PolyRing, w: int):
    """Images of every symbol variable under the group element w."""
    key = ("sym_action", w, ring.nvars)
    cached = sys._cache.get(key)
    if cached is not None:
        return cached
    n = sys.dim
    pos = _sym_index(n)
    m = sys.table.matrix(w)
    images = [ring.zero] * ring.nvars
    images[0] = ring.var(0)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            img = ring.zero
            for k in range(1, n + 1):
                for l in range(k + 1, n + 1):
                    c = m[k - 1][i - 1] * m[l - 1][j - 1] - m[l - 1][i - 1] * m[k - 1][j - 1]
                    if c:
                        img = img + ring.var(pos[(k, l)]) * c
            images[pos[(i, j)]] = img
    for i in range(1, n + 1):
        img = ring.zero
        for k in range(1, n + 1):
            c = m[k - 1][i - 1]
            if c:
                img = img + ring.var(pos[f"A{k}"]) * c
        images[pos[f"A{i}"]] = img
    sys._cache[key] = images
    return images


def apply_group(s: Poly, sys: System, w: int) -> Poly:
    return s.subs_vars(_action_images(sys, s.ring, w))


def reynolds(s: Poly, sys: System) -> Poly:
    """Group-averaging projector onto W-invariant symbol polynomials."""
    total = s.ring.zero
    for w in range(sys.table.order):
        total = total + apply_group(s, sys, w)
    return total * _F(1, sys.table.order)


def invariant_generators(sys: System, degree: int, ring: PolyRing | None = None):
    """Reynolds images of all symbol monomials up to the given symbol degree,
    reduced to a linearly independent spanning set (exact linear algebra)."""
    ring = ring or symbol_ring(sys.dim)
    monos = []
    for total in range(degree + 1):
        for exps in itertools.product(range(total + 1), repeat=ring.nvars):
            if sum(exps) == total:
                monos.append(exps)
    monos.sort(key=lambda e: (sum(e), e))
    images = []
    for exps in monos:
        img = reynolds(Poly(ring, {exps: _F(1)}), sys)
        if not img.is_zero():
            images.append(img)
    keep = reduce_to_independent([img.terms for img in images])
    return [images[k] for k in keep]


# ---------------------------------------------------------------------------
# phase-space expansion and Jacobian ranks
# ---------------------------------------------------------------------------

def expand_symbol(s: Poly, sys: System, pring: PolyRing | None = None) -> Poly:
    """Expand a symbol polynomial into phase-space coordinates."""
    n = sys.dim
    pring = pring or classical.phase_ring(n)
    pos = _sym_index(n)
    images = [None] * s.ring.nvars
    images[0] = classical.p2_poly(pring, n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            images[pos[(i, j)]] = classical.m_poly(pring, i, j)
        images[pos[f"A{i}"]] = classical.acl_poly(pring, i, n)
    out = pring.zero
    powcache: dict = {}
    for exps, c in s.terms.items():
        term = pring.const(c)
        for vi, k in enumerate(exps):
            if k:
                p = powcache.get((vi, k))
                if p is None:
                    p = images[vi] ** k
                    powcache[(vi, k)] = p
                term = term * p
        out = out + term
    return out


def _random_point(sys: System, rnd, bound=99):
    n = sys.dim
    for _ in range(200):
        xs = [_F(rnd.randint(-bound, bound), rnd.randint(1, bound)) for _ in range(n)]
        ps = [_F(rnd.randint(-bound, bound), rnd.randint(1, bound)) for _ in range(n)]
        if any(not x for x in xs) or any(not p for p in ps):
            continue
        if any(not sys.root_form(ri).evaluate(xs + [_F(0)] * (sys.ring.nvars - n))
               for ri in range(len(sys.rs.positive_roots))):
            continue
        return xs + ps
    raise DegeneratePoint("could not sample a point off the mirrors")


def jacobian_rank(gens, sys: System, point=None, seed: int = 0) -> int:
    """Exact rank over Q of the Jacobian of the expanded generators.

    ``gens`` are symbol polynomials; the rank is taken at the given rational
    phase-space point (or a seeded random one avoiding mirrors and coordinate
    hyperplanes).  A rank equal to 2N-1 certifies that many algebraically
    independent elements.
    """
    n = sys.dim
    pring = classical.phase_ring(n)
    rnd = random.Random(seed)
    if point is None:
        point = _random_point(sys, rnd)
    expanded = [expand_symbol(g, sys, pring) for g in gens]
    rows = []
    for g in expanded:
        rows.append([g.diff(v).evaluate(point) for v in range(2 * n)])
    return exact_rank(rows)


def max_jacobian_rank(gens, sys: System, tries: int = 3, seed: int = 0) -> int:
    best = 0
    for t in range(tries):
        best = max(best, jacobian_rank(gens, sys, seed=seed + 1000 * t))
        if best >= 2 * sys.dim - 1:
            break
    return best


# ---------------------------------------------------------------------------
# Weyl quantization
# ---------------------------------------------------------------------------

def weyl_quantize(s: Poly, sys: System) -> rgw.Element:
    """Symmetrize each symbol monomial over all factor orderings.

    P2 -> H, M_ij -> L_ij, A_i -> A_i; a k-factor monomial becomes the average
    of the corresponding words over all k! orderings.
    """
    n = sys.dim
    pos = _sym_index(n)
    gen_of = {}
    gen_of[0] = ("H",)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            gen_of[pos[(i, j)]] = ("L", i, j)
        gen_of[pos[f"A{i}"]] = ("A", i)
    total = rgw.Element(sys, {})
    for exps, c in s.terms.items():
        factors = []
        for vi, k in enumerate(exps):
            factors.extend([gen_of[vi]] * k)
        if not factors:
            total = total + rgw.Element(sys, {(): c})
            continue
        k = len(factors)
        weight = RatFunc.const(sys.ring, c * _F(1, _factorial(k)))
        words: dict = {}
        for perm in itertools.permutations(factors):
            wd = tuple(perm)
            prev = words.get(wd)
            words[wd] = weight if prev is None else prev + weight
        total = total + rgw.Element(sys, words)
    return total


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# restriction checks
# ---------------------------------------------------------------------------

def local_hamiltonian(sys: System) -> opalg.Operator:
    return opalg.local_hamiltonian_op(sys)


def invariant_test_functions(sys: System, degree: int):
    """W-invariant polynomials up to the given degree (a spanning independent
    set of Reynolds images of coordinate monomials), each also paired with r."""
    ring = sys.ring
    n = sys.dim
    order = sys.table.order
    invs = []
    for total in range(degree + 1):
        for beta in itertools.product(range(total + 1), repeat=n):
            if sum(beta) != total:
                continue
            exps = tuple(beta) + (0,) * (ring.nvars - n)
            mono = Poly(ring, {exps: _F(1)})
            avg = ring.zero
            for w in range(order):
                mat = sys.table.matrix(w)
                rows = [[mat[jj][ii] for jj in range(n)] for ii in range(n)]
                avg = avg + mono.subs_coords(rows)
            avg = avg * _F(1, order)
            if not avg.is_zero():
                invs.append(avg)
    keep = reduce_to_independent([p.terms for p in invs])
    polys = [invs[k] for k in keep]
    funcs = []
    for p in polys:
        base = RExt.from_rat(RatFunc.from_poly(p))
        funcs.append(base)
        funcs.append(base * RExt.r_element(ring))
    return funcs


def check_integral(q: Poly, sys: System, test_degree: int = 6, seed: int = 0,
                   budget: int = rgw.DEFAULT_STEP_BUDGET) -> dict:
    """Certificate entry for one W-invariant symbol polynomial q.

    Builds J = rho(weyl_quantize(q)) and verifies (i) [H, J] = 0 exactly,
    (ii) J maps W-invariant test functions (times {1, r}, degree <= D) to
    W-invariant functions, (iii) [H_local, J] annihilates those test
    functions exactly.
    """
    if reynolds(q, sys) != q:
        raise NotInvariant("symbol polynomial is not W-invariant")
    element = weyl_quantize(q, sys)
    J = rgw.rho(element)
    H = opalg.hamiltonian_op(sys)
    commutes_h = opalg.commutator(H, J).is_zero()

    funcs = invariant_test_functions(sys, test_degree)
    hloc = local_hamiltonian(sys)
    maps_invariant = True
    commutes_local = True
    gens_w = [w for _, w in sys.table.reflections]
    for f in funcs:
        jf = opalg.apply_op(J, f)
        for w in gens_w:
            if jf.act_linear(sys.table.matrix(w)) != jf:
                maps_invariant = False
                break
        lhs = opalg.apply_op(hloc, jf)
        rhs = opalg.apply_op(J, opalg.apply_op(hloc, f))
        if not (lhs - rhs).is_zero():
            commutes_local = False
        if not maps_invariant and not commutes_local:
            break
    status = commutes_h and maps_invariant and commutes_local
    return {
        "generator": _render_symbol(q),
        "commutes_with_H": commutes_h,
        "maps_invariants_to_invariants": maps_invariant,
        "commutes_with_local_hamiltonian": commutes_local,
        "status": "pass" if status else "fail",
        "test_degree": test_degree,
    }


def _render_symbol(q: Poly) -> str:
    return str(q)


# ---------------------------------------------------------------------------
# full certificate
# ---------------------------------------------------------------------------

@dataclass
class IntegralCertificate:
    system: str
    dim: int
    target: int
    jacobian_rank: int
    generators: list
    commutation: list
    invariant_count: int
    degree: int
    test_degree: int
    seed: int
    pairwise_commutators: list = field(default_factory=list)

    def ok(self) -> bool:
        return (self.jacobian_rank == self.target
                and all(c["status"] == "pass" for c in self.commutation))

    def as_dict(self) -> dict:
        return {
            "system": self.system,
            "N": self.dim,
            "target": self.target,
            "rank": self.jacobian_rank,
            "generators": self.generators,
            "commutation": self.commutation,
            "invariants_found": self.invariant_count,
            "degree": self.degree,
            "D": self.test_degree,
            "seed": self.seed,
            "pairwise_commutators": self.pairwise_commutators,
            "status": "pass" if self.ok() else "fail",
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def certificate(sys: System, degree: int = 4, test_degree: int = 6,
                seed: int = 0, record_pairwise: bool = False) -> IntegralCertificate:
    """Full pipeline: invariants, greedy rank-achieving subset, and the three
    commutation checks per selected generator.

    Pairwise commutators between quantized integrals are recorded (never
    asserted) when requested; they need not vanish.
    """
    n = sys.dim
    target = 2 * n - 1
    gens = invariant_generators(sys, degree)
    pring = classical.phase_ring(n)
    rnd = random.Random(seed)
    point = _random_point(sys, rnd)

    selected = []
    rows = []
    cur_rank = 0
    for g in gens:
        expanded = expand_symbol(g, sys, pring)
        row = [expanded.diff(v).evaluate(point) for v in range(2 * n)]
        cand = rows + [row]
        r = exact_rank(cand)
        if r > cur_rank:
            rows = cand
            cur_rank = r
            selected.append(g)
        if cur_rank == target:
            break

    commutation = [check_integral(g, sys, test_degree=test_degree, seed=seed)
                   for g in selected]
    pairwise = []
    if record_pairwise and len(selected) > 1:
        ops = [rgw.rho(weyl_quantize(g, sys)) for g in selected]
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                comm = opalg.commutator(ops[i], ops[j])
                pairwise.append({
                    "pair": [i, j],
                    "commutes": comm.is_zero(),
                })
    return IntegralCertificate(
        system=sys.rs.kind, dim=n, target=target, jacobian_rank=cur_rank,
        generators=[_render_symbol(g) for g in selected],
        commutation=commutation, invariant_count=len(gens), degree=degree,
        test_degree=test_degree, seed=seed, pairwise_commutators=pairwise)
