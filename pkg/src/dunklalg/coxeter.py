"""Root systems of finite Coxeter groups with rational realizations, full group
enumeration, multiplicity handling, and the group-algebra elements built from
the reflections (the exchange elements S_ij and the sum S).

Supported kinds are the crystallographic families A, B, D, G2, F4 and the
dihedral aliases I2_3/I2_4/I2_6 (realized as A2/B2/G2), plus direct products.
Non-crystallographic systems (I2_5, I2_7, H3, H4, ...) have no rational
realization and raise UnsupportedField.

Realization models (rational coordinates throughout):
  A_n   : e_i - e_j (i<j) on R^{n+1}
  B_n   : e_i and e_i +/- e_j on R^n   (B1 = {e1} is the rank-1 system on R^1)
  D_n   : e_i +/- e_j on R^n
  G2    : A2 roots plus 2e_i - e_j - e_k inside {sum x = 0} of R^3
  F4    : e_i, e_i +/- e_j, (e1 +/- e2 +/- e3 +/- e4)/2 on R^4

In product specs a rank-1 type-A factor is realized as {±e} on a single
coordinate (the same abstract Coxeter system as B1), so that `A1xA1` lives on
R^2 like the classical two-particle model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BadDimension, BadSpec, CapExceeded, UnsupportedField
from .exactnum import Poly, PolyRing, RatFunc

Vec = tuple
Mat = tuple

_F = Fraction


def _dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), _F(0))


def _matvec(m: Mat, v: Vec) -> Vec:
    return tuple(sum((m[i][j] * v[j] for j in range(len(v))), _F(0)) for i in range(len(m)))


def _matmul(a: Mat, b: Mat) -> Mat:
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), _F(0)) for j in range(n))
        for i in range(n)
    )


def _identity_mat(n: int) -> Mat:
    return tuple(tuple(_F(1) if i == j else _F(0) for j in range(n)) for i in range(n))


def _transpose(m: Mat) -> Mat:
    n = len(m)
    return tuple(tuple(m[j][i] for j in range(n)) for i in range(n))


def reflection_matrix(alpha: Vec) -> Mat:
    """Orthogonal reflection about the hyperplane normal to alpha."""
    n = len(alpha)
    aa = _dot(alpha, alpha)
    return tuple(
        tuple((_F(1) if i == j else _F(0)) - 2 * alpha[i] * alpha[j] / aa for j in range(n))
        for i in range(n)
    )


# ---------------------------------------------------------------------------
# root data
# ---------------------------------------------------------------------------

def _unit(n, i):
    return tuple(_F(1) if k == i else _F(0) for k in range(n))


def _roots_A(rank):
    n = rank + 1
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            roots.append(tuple(_F(1) if k == i else _F(-1) if k == j else _F(0) for k in range(n)))
    return roots, n


def _roots_B(rank):
    n = rank
    roots = [_unit(n, i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            roots.append(tuple(_F(1) if k == i else _F(-1) if k == j else _F(0) for k in range(n)))
            roots.append(tuple(_F(1) if k in (i, j) else _F(0) for k in range(n)))
    return roots, n


def _roots_D(rank):
    if rank < 2:
        raise BadDimension("type D needs rank >= 2")
    n = rank
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            roots.append(tuple(_F(1) if k == i else _F(-1) if k == j else _F(0) for k in range(n)))
            roots.append(tuple(_F(1) if k in (i, j) else _F(0) for k in range(n)))
    return roots, n


def _roots_G2():
    short = [(1, -1, 0), (0, 1, -1), (1, 0, -1)]
    long = [(2, -1, -1), (-1, 2, -1), (-1, -1, 2)]
    roots = [tuple(map(_F, r)) for r in short + long]
    return roots, 3


def _roots_F4():
    roots = [_unit(4, i) for i in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            roots.append(tuple(_F(1) if k == i else _F(-1) if k == j else _F(0) for k in range(4)))
            roots.append(tuple(_F(1) if k in (i, j) else _F(0) for k in range(4)))
    half = _F(1, 2)
    for s2 in (1, -1):
        for s3 in (1, -1):
            for s4 in (1, -1):
                roots.append((half, s2 * half, s3 * half, s4 * half))
    return roots, 4


_KNOWN_ORDERS = {
    ("A", 1): 2, ("A", 2): 6, ("A", 3): 24, ("A", 4): 120,
    ("B", 1): 2, ("B", 2): 8, ("B", 3): 48, ("B", 4): 384,
    ("D", 2): 4, ("D", 3): 24, ("D", 4): 192,
    ("G2", 2): 12, ("F4", 4): 1152,
}


@dataclass(frozen=True)
class RootSystem:
    """Positive roots with rational coordinates plus orbit structure."""

    kind: str
    rank: int
    ambient_dim: int
    positive_roots: tuple
    orbits: tuple           # tuple of tuples of root indices
    orbit_of: tuple         # root index -> orbit index
    multiplicity: tuple     # orbit index -> parameter symbol name

    @property
    def num_orbits(self) -> int:
        return len(self.orbits)

    def root_norm2(self, idx: int) -> Fraction:
        a = self.positive_roots[idx]
        return _dot(a, a)


def _compute_orbits(roots):
    """Partition positive roots into orbits of the reflections (up to sign)."""
    index_of = {}
    for k, a in enumerate(roots):
        index_of[a] = k
        index_of[tuple(-c for c in a)] = k
    mats = [reflection_matrix(a) for a in roots]
    seen = [False] * len(roots)
    orbits = []
    for start in range(len(roots)):
        if seen[start]:
            continue
        orbit = []
        stack = [start]
        seen[start] = True
        while stack:
            k = stack.pop()
            orbit.append(k)
            for m in mats:
                img = _matvec(m, roots[k])
                j = index_of.get(img)
                if j is None:
                    raise BadDimension("root system not closed under its reflections")
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        orbits.append(tuple(sorted(orbit)))
    orbits.sort(key=lambda orb: orb[0])
    orbit_of = [0] * len(roots)
    for oi, orb in enumerate(orbits):
        for k in orb:
            orbit_of[k] = oi
    return tuple(orbits), tuple(orbit_of)


def _embed(roots, dim, ambient_dim):
    if ambient_dim < dim:
        raise BadDimension(
            f"ambient dimension {ambient_dim} below minimal realization dimension {dim}")
    pad = ambient_dim - dim
    if pad == 0:
        return roots
    zeros = (_F(0),) * pad
    return [tuple(r) + zeros for r in roots]


def _component_roots(kind: str, rank: int, in_product: bool):
    if kind == "A":
        if rank < 1:
            raise BadDimension("rank must be positive")
        if in_product and rank == 1:
            # realized as {±e} on one coordinate (same Coxeter system as B1)
            return [_unit(1, 0)], 1
        return _roots_A(rank)
    if kind == "B":
        if rank < 1:
            raise BadDimension("rank must be positive")
        return _roots_B(rank)
    if kind == "D":
        return _roots_D(rank)
    if kind == "G2":
        return _roots_G2()
    if kind == "F4":
        return _roots_F4()
    if kind == "I2":
        if rank == 3:
            return _roots_A(2)
        if rank == 4:
            return _roots_B(2)
        if rank == 6:
            return _roots_G2()
        if rank == 2:
            return _roots_D(2)
        raise UnsupportedField(
            f"I2({rank}) has no rational realization; only m in {{2,3,4,6}} is supported")
    if kind in ("H2", "H3", "H4"):
        raise UnsupportedField(f"type {kind} needs irrational coordinates")
    raise BadSpec(f"unknown root system kind {kind!r}")


def build_root_system(kind, rank: int | None = None, ambient_dim: int | None = None) -> RootSystem:
    """Build a root system.  ``kind`` is a label like 'A', 'B2', 'A1xA1', 'G2@3'.

    When ``kind`` carries rank/ambient markers the explicit arguments must be
    omitted.  Products concatenate the factors on disjoint coordinate blocks.
    """
    if rank is None:
        return parse_system_spec(str(kind), ambient_dim)
    factors = [(str(kind), int(rank))]
    label = str(kind) if str(kind) in ("G2", "F4") else f"{kind}{rank}"
    return _build_from_factors(factors, ambient_dim, label=label)


def parse_system_spec(spec: str, ambient_dim: int | None = None) -> RootSystem:
    """Parse the CLI grammar: A2, B3, A1xA1, G2@3, I2_5, B2xA1@4, ..."""
    text = spec.strip()
    m = re.fullmatch(r"([^@]+)(?:@(\d+))?", text)
    if not m:
        raise BadSpec(f"cannot parse system spec {spec!r}")
    body, at = m.group(1), m.group(2)
    if at is not None:
        if ambient_dim is not None and int(at) != ambient_dim:
            raise BadSpec("conflicting ambient dimensions")
        ambient_dim = int(at)
    factors = []
    for part in body.split("x"):
        fm = re.fullmatch(r"(I2)_(\d+)|([A-Z])(\d*)", part.strip())
        if not fm:
            raise BadSpec(f"cannot parse factor {part!r} in {spec!r}")
        if fm.group(1):
            factors.append(("I2", int(fm.group(2))))
        else:
            letter, digits = fm.group(3), fm.group(4)
            if letter in ("G", "F"):
                if digits not in ("2", "4", ""):
                    raise BadSpec(f"bad factor {part!r}")
                factors.append((letter + (digits or ("2" if letter == "G" else "4")), 0))
            else:
                if not digits:
                    raise BadSpec(f"factor {part!r} needs a rank")
                factors.append((letter, int(digits)))
    return _build_from_factors(factors, ambient_dim, label=body)


def _build_from_factors(factors, ambient_dim, label):
    in_product = len(factors) > 1
    blocks = []
    dims = []
    for kind, rank in factors:
        kind_name = kind
        if kind in ("G2", "F4"):
            rank = 2 if kind == "G2" else 4
        roots, dim = _component_roots(kind_name, rank, in_product)
        blocks.append(roots)
        dims.append(dim)
    total_dim = sum(dims)
    if ambient_dim is None:
        ambient_dim = total_dim
    if ambient_dim < total_dim:
        raise BadDimension(
            f"ambient dimension {ambient_dim} below minimal realization dimension {total_dim}")
    roots = []
    offset = 0
    for block, dim in zip(blocks, dims):
        for r in block:
            v = [_F(0)] * ambient_dim
            v[offset:offset + dim] = list(r)
            roots.append(tuple(v))
        offset += dim
    orbits, orbit_of = _compute_orbits(roots)
    if len(orbits) == 1:
        names = ("g",)
    else:
        names = tuple(f"g{i + 1}" for i in range(len(orbits)))
    def _factor_rank(k, r):
        if k == "G2":
            return 2
        if k == "F4":
            return 4
        if k == "I2":
            return 2
        return r

    rank_total = sum(_factor_rank(k, r) for k, r in factors)
    return RootSystem(
        kind=label,
        rank=rank_total,
        ambient_dim=ambient_dim,
        positive_roots=tuple(roots),
        orbits=orbits,
        orbit_of=orbit_of,
        multiplicity=names,
    )


# ---------------------------------------------------------------------------
# group enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    matrix: Mat
    index: int


class GroupTable:
    """Fully enumerated Coxeter group as orthogonal rational matrices.

    Element 0 is the identity.  Products and inverses are looked up through a
    lazily filled cache; the table is immutable once built.
    """

    def __init__(self, rs: RootSystem, elements, reflections):
        self.rs = rs
        self.elements = tuple(elements)
        self.index = {m: i for i, m in enumerate(self.elements)}
        self.identity_index = 0
        self.reflections = tuple(reflections)  # (root index, element index)
        self.reflection_of_root = {r: e for r, e in reflections}
        self._prod = {}
        self._inv = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    def matrix(self, i: int) -> Mat:
        return self.elements[i]

    def element(self, i: int) -> GroupElement:
        return GroupElement(self.elements[i], i)

    def product(self, i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        key = (i, j)
        k = self._prod.get(key)
        if k is None:
            k = self.index[_matmul(self.elements[i], self.elements[j])]
            self._prod[key] = k
        return k

    def inverse(self, i: int) -> int:
        k = self._inv.get(i)
        if k is None:
            k = self.index[_transpose(self.elements[i])]
            self._inv[i] = k
        return k

    def has_minus_identity(self) -> bool:
        n = self.rs.ambient_dim
        minus = tuple(tuple(-x for x in row) for row in _identity_mat(n))
        return minus in self.index

    def word(self, root_indices: Sequence[int]) -> int:
        """Element index of a product of reflections given by positive-root indices."""
        k = self.identity_index
        for r in root_indices:
            k = self.product(k, self.reflection_of_root[r])
        return k


def generate_group(rs: RootSystem, cap: int = 1200) -> GroupTable:
    """Close the reflections under multiplication (breadth-first)."""
    n = rs.ambient_dim
    ident = _identity_mat(n)
    gens = []
    reflections = []
    seen = {ident: 0}
    elements = [ident]
    for ri, a in enumerate(rs.positive_roots):
        m = reflection_matrix(a)
        if m not in seen:
            seen[m] = len(elements)
            elements.append(m)
        gens.append(m)
        reflections.append((ri, seen[m]))
    frontier = list(elements)
    while frontier:
        new = []
        for w in frontier:
            for g in gens:
                p = _matmul(w, g)
                if p not in seen:
                    if len(elements) >= cap:
                        raise CapExceeded(f"group order exceeds cap {cap}")
                    seen[p] = len(elements)
                    elements.append(p)
                    new.append(p)
        frontier = new
    return GroupTable(rs, elements, reflections)


# ---------------------------------------------------------------------------
# systems: root data + group + coefficient ring
# ---------------------------------------------------------------------------

class System:
    """Bundle of root system, group table, coefficient ring and parameters.

    The ring variables are x1..xM, one coupling symbol per root orbit, then the
    Coulomb charge symbol ``gam``.  Multiplicities and the charge may be fixed
    to rationals; the symbols stay in the ring either way so ring shape depends
    only on the system spec.
    """

    def __init__(self, rs: RootSystem, table: GroupTable,
                 gvals="symbolic", gamma="symbolic"):
        self.rs = rs
        self.table = table
        names = [f"x{i + 1}" for i in range(rs.ambient_dim)]
        names += list(rs.multiplicity) + ["gam"]
        self.ring = PolyRing(names, rs.ambient_dim)
        # register the root linear forms so factored denominators split into
        # them by trial division instead of falling back to generic GCD
        for a in rs.positive_roots:
            self.ring.register_irreducible(self.ring.linear_form(a).monic())
        if gvals == "symbolic":
            self.gvals = tuple(self.ring.var_named(nm) for nm in rs.multiplicity)
        else:
            if len(gvals) != rs.num_orbits:
                raise BadSpec("need one multiplicity value per orbit")
            self.gvals = tuple(self.ring.const(v) for v in gvals)
        if gamma == "symbolic":
            self.gamma = self.ring.var_named("gam")
        else:
            self.gamma = self.ring.const(gamma)
        self._cache = {}

    @classmethod
    def build(cls, spec: str, gvals="symbolic", gamma="symbolic",
              ambient_dim=None, cap: int = 1200) -> "System":
        rs = parse_system_spec(spec, ambient_dim)
        table = generate_group(rs, cap=cap)
        return cls(rs, table, gvals=gvals, gamma=gamma)

    @property
    def dim(self) -> int:
        return self.rs.ambient_dim

    def g_of_root(self, root_idx: int) -> Poly:
        return self.gvals[self.rs.orbit_of[root_idx]]

    def root_form(self, root_idx: int) -> Poly:
        """The linear polynomial (alpha, x)."""
        key = ("root_form", root_idx)
        p = self._cache.get(key)
        if p is None:
            p = self.ring.linear_form(self.rs.positive_roots[root_idx])
            self._cache[key] = p
        return p

    def describe(self) -> dict:
        return {
            "system": self.rs.kind,
            "ambient_dim": self.rs.ambient_dim,
            "positive_roots": len(self.rs.positive_roots),
            "group_order": self.table.order,
            "orbits": [list(o) for o in self.rs.orbits],
            "parameters": list(self.rs.multiplicity) + ["gam"],
        }


# ---------------------------------------------------------------------------
# group algebra elements
# ---------------------------------------------------------------------------

class GroupAlgebraElement:
    """Finitely supported map W -> coefficients (x-free rational functions)."""

    __slots__ = ("sys", "coeffs")

    def __init__(self, sys: System, coeffs: dict | None = None):
        self.sys = sys
        clean = {}
        for w, c in (coeffs or {}).items():
            if isinstance(c, (int, Fraction)):
                c = RatFunc.const(sys.ring, c)
            elif isinstance(c, Poly):
                c = RatFunc.from_poly(c)
            if not c.is_zero():
                if not c.x_free():
                    raise BadSpec("group algebra coefficients must be x-free")
                clean[w] = c
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GroupAlgebraElement(self.sys, {0: other})
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return GroupAlgebraElement(self.sys, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupAlgebraElement(self.sys, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GroupAlgebraElement(self.sys, {0: other})
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly, RatFunc)):
            return GroupAlgebraElement(
                self.sys, {w: c * other for w, c in self.coeffs.items()})
        table = self.sys.table
        out: dict = {}
        for w1, c1 in self.coeffs.items():
            for w2, c2 in other.coeffs.items():
                w = table.product(w1, w2)
                s = out.get(w)
                p = c1 * c2
                out[w] = p if s is None else s + p
        return GroupAlgebraElement(self.sys, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, GroupAlgebraElement) and self.coeffs == other.coeffs

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for w in sorted(self.coeffs):
            bits.append(f"({self.coeffs[w]})*w#{w}")
        return " + ".join(bits)

    __repr__ = __str__


def exchange_element(sys: System, i: int, j: int) -> GroupAlgebraElement:
    """S_ij = delta_ij + sum over positive roots of 2 g a_i a_j / (a,a) s_a."""
    rs = sys.rs
    if not (1 <= i <= rs.ambient_dim and 1 <= j <= rs.ambient_dim):
        raise BadSpec("exchange element index out of range")
    coeffs: dict = {}
    if i == j:
        coeffs[0] = RatFunc.const(sys.ring, 1)
    for ri, a in enumerate(rs.positive_roots):
        num = a[i - 1] * a[j - 1]
        if not num:
            continue
        w = sys.table.reflection_of_root[ri]
        c = RatFunc.from_poly(sys.g_of_root(ri) * (2 * num / rs.root_norm2(ri)))
        s = coeffs.get(w)
        s = c if s is None else s + c
        if s.is_zero():
            coeffs.pop(w, None)
        else:
            coeffs[w] = s
    return GroupAlgebraElement(sys, coeffs)


def s_element(sys: System) -> GroupAlgebraElement:
    """S = -sum over positive roots of g_a s_a."""
    coeffs: dict = {}
    for ri in range(len(sys.rs.positive_roots)):
        w = sys.table.reflection_of_root[ri]
        c = RatFunc.from_poly(-sys.g_of_root(ri))
        s = coeffs.get(w)
        s = c if s is None else s + c
        if s.is_zero():
            coeffs.pop(w, None)
        else:
            coeffs[w] = s
    return GroupAlgebraElement(sys, coeffs)
