"""Catalog and executor for the operator identities of the model.

Every identity is reduced to exact ``is_zero`` checks of normal forms in the
operator algebra, quantified over all free indices 1..N (N = ambient
dimension) and over all roots/group generators where applicable.  Parameters
stay fully symbolic unless the System fixes them, so a pass is an exact
algebraic statement, not a numerical one.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from . import opalg
from .coxeter import System
from .errors import BadSpec
from .opalg import Operator, adjoint, anticommutator, commutator, compose

_F = Fraction


@dataclass(frozen=True)
class IdentityId:
    """A named identity with the statement it asserts."""

    name: str
    statement: str


@dataclass
class Report:
    identity: str
    system: str
    params: dict
    status: str                 # "pass" | "fail"
    residual: str | None = None
    failed_at: str | None = None
    millis: int = 0
    checks: int = 0

    def as_dict(self, include_timing: bool = True) -> dict:
        out = {
            "identity": self.identity,
            "system": self.system,
            "params": self.params,
            "status": self.status,
            "residual": self.residual,
            "checks": self.checks,
        }
        if self.failed_at is not None:
            out["failed_at"] = self.failed_at
        if include_timing:
            out["millis"] = self.millis
        return out


@dataclass
class SuiteReport:
    system: str
    params: dict
    reports: list = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.reports if r.status == "pass")

    @property
    def failed(self) -> int:
        return sum(1 for r in self.reports if r.status != "pass")

    def ok(self) -> bool:
        return self.failed == 0

    def as_dict(self, include_timing: bool = True) -> dict:
        return {
            "system": self.system,
            "params": self.params,
            "passed": self.passed,
            "failed": self.failed,
            "reports": [r.as_dict(include_timing) for r in self.reports],
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.as_dict(include_timing), indent=2, sort_keys=True)


def _param_mode(sys: System) -> dict:
    gs = {}
    for name, val in zip(sys.rs.multiplicity, sys.gvals):
        gs[name] = "symbolic" if not val.is_constant() else str(val.constant_value())
    gs["gam"] = "symbolic" if not sys.gamma.is_constant() else str(sys.gamma.constant_value())
    return gs


# ---------------------------------------------------------------------------
# residual builders: each yields (label, residual Operator)
#
# The index-quantified identities are antisymmetric under the obvious index
# swaps, so residuals are built once per canonical index class (the variants
# differ by an overall sign, which cannot affect a zero check) and pairwise
# operator products are cached on the System across identities.
# ---------------------------------------------------------------------------

def _prod(sys, kind, *idx):
    """Cached composition of catalog operators, keyed structurally."""
    key = ("idprod", kind) + idx
    op = sys._cache.get(key)
    if op is None:
        if kind == "LL":
            a, b, c, d = idx
            op = compose(opalg.angmom_op(sys, a, b), opalg.angmom_op(sys, c, d))
        elif kind == "LS":
            a, b, c, d = idx
            op = compose(opalg.angmom_op(sys, a, b), opalg.exchange_op(sys, c, d))
        elif kind == "Lx":
            a, b, k = idx
            op = compose(opalg.angmom_op(sys, a, b), opalg.x_op(sys, k))
        elif kind == "xL":
            k, a, b = idx
            op = compose(opalg.x_op(sys, k), opalg.angmom_op(sys, a, b))
        elif kind == "LD":
            a, b, k = idx
            op = compose(opalg.angmom_op(sys, a, b), opalg.dunkl_op(sys, k))
        elif kind == "DL":
            k, a, b = idx
            op = compose(opalg.dunkl_op(sys, k), opalg.angmom_op(sys, a, b))
        elif kind == "xS":
            k, a, b = idx
            op = compose(opalg.x_op(sys, k), opalg.exchange_op(sys, a, b))
        elif kind == "DS":
            k, a, b = idx
            op = compose(opalg.dunkl_op(sys, k), opalg.exchange_op(sys, a, b))
        elif kind == "AL":
            i, a, b = idx
            op = compose(opalg.lrl_op(sys, i), opalg.angmom_op(sys, a, b))
        elif kind == "LA":
            a, b, i = idx
            op = compose(opalg.angmom_op(sys, a, b), opalg.lrl_op(sys, i))
        elif kind == "AS":
            i, a, b = idx
            op = compose(opalg.lrl_op(sys, i), opalg.exchange_op(sys, a, b))
        else:
            raise AssertionError(kind)
        sys._cache[key] = op
    return op


def _r_dunkl_commute(sys):
    for i in range(1, sys.dim + 1):
        for j in range(i + 1, sys.dim + 1):
            yield f"[D{i},D{j}]", commutator(opalg.dunkl_op(sys, i), opalg.dunkl_op(sys, j))


def _r_com_nn(sys):
    for i in range(1, sys.dim + 1):
        for j in range(1, sys.dim + 1):
            yield (f"[D{i},x{j}]-S{i}{j}",
                   commutator(opalg.dunkl_op(sys, i), opalg.x_op(sys, j))
                   - opalg.exchange_op(sys, i, j))


def _r_comSx(sys):
    for i in range(1, sys.dim + 1):
        for j in range(1, sys.dim + 1):
            for k in range(1, sys.dim + 1):
                lhs = commutator(opalg.exchange_op(sys, i, j), opalg.x_op(sys, k))
                rhs = commutator(opalg.exchange_op(sys, k, j), opalg.x_op(sys, i))
                yield f"[S{i}{j},x{k}]-[S{k}{j},x{i}]", lhs - rhs


def _r_s_center(sys):
    s = opalg.s_op(sys)
    for ri in range(len(sys.rs.positive_roots)):
        yield f"[S,s_a{ri + 1}]", commutator(s, opalg.reflection_op(sys, ri))
    total = Operator.zero(sys)
    for i in range(1, sys.dim + 1):
        total = total + opalg.exchange_op(sys, i, i)
    yield "sum S_ii - (N - 2S)", total - (Operator.constant(sys, sys.dim) - s * 2)


def _r_x_pi(sys):
    lhs1 = Operator.zero(sys)
    lhs2 = Operator.zero(sys)
    for k in range(1, sys.dim + 1):
        lhs1 = lhs1 + compose(opalg.x_op(sys, k), opalg.dunkl_op(sys, k))
        lhs2 = lhs2 + compose(opalg.dunkl_op(sys, k), opalg.x_op(sys, k))
    s = opalg.s_op(sys)
    rdr = opalg.rdr_op(sys)
    yield "(x,D) - (r dr + S)", lhs1 - (rdr + s)
    yield "(D,x) - (r dr - S + N)", lhs2 - (rdr - s + Operator.constant(sys, sys.dim))


def _r_lem1(sys):
    s = opalg.s_op(sys)
    for i in range(1, sys.dim + 1):
        xi, ni = opalg.x_op(sys, i), opalg.dunkl_op(sys, i)
        sum_x_left = Operator.zero(sys)
        sum_x_right = Operator.zero(sys)
        sum_d_left = Operator.zero(sys)
        sum_d_right = Operator.zero(sys)
        for j in range(1, sys.dim + 1):
            sij = opalg.exchange_op(sys, i, j)
            sum_x_left = sum_x_left + compose(opalg.x_op(sys, j), sij)
            sum_x_right = sum_x_right + compose(sij, opalg.x_op(sys, j))
            sum_d_left = sum_d_left + compose(opalg.dunkl_op(sys, j), sij)
            sum_d_right = sum_d_right + compose(sij, opalg.dunkl_op(sys, j))
        yield f"sum_j x_j S_{i}j", sum_x_left - (xi + commutator(s, xi))
        yield f"sum_j S_{i}j x_j", sum_x_right - (xi - commutator(s, xi))
        yield f"sum_j D_j S_{i}j", sum_d_left - (ni + commutator(s, ni))
        yield f"sum_j S_{i}j D_j", sum_d_right - (ni - commutator(s, ni))


def _r_lem15(sys):
    s = opalg.s_op(sys)
    for i in range(1, sys.dim + 1):
        xi, ni = opalg.x_op(sys, i), opalg.dunkl_op(sys, i)
        anti_x = Operator.zero(sys)
        com_x = Operator.zero(sys)
        anti_d = Operator.zero(sys)
        com_d = Operator.zero(sys)
        for j in range(1, sys.dim + 1):
            sij = opalg.exchange_op(sys, i, j)
            anti_x = anti_x + anticommutator(opalg.x_op(sys, j), sij)
            com_x = com_x + commutator(opalg.x_op(sys, j), sij)
            anti_d = anti_d + anticommutator(opalg.dunkl_op(sys, j), sij)
            com_d = com_d + commutator(opalg.dunkl_op(sys, j), sij)
        yield f"sum_j {{x_j,S_{i}j}} - 2x_{i}", anti_x - xi * 2
        yield f"sum_j [x_j,S_{i}j] - 2[S,x_{i}]", com_x - commutator(s, xi) * 2
        yield f"sum_j {{D_j,S_{i}j}} - 2D_{i}", anti_d - ni * 2
        yield f"sum_j [D_j,S_{i}j] - 2[S,D_{i}]", com_d - commutator(s, ni) * 2


def _r_comLL(sys):
    n = sys.dim
    cache: dict = {}

    def build(i, j, k, l):
        lhs = _prod(sys, "LL", i, j, k, l) - _prod(sys, "LL", k, l, i, j)
        rhs = (_prod(sys, "LS", i, l, k, j) + _prod(sys, "LS", j, k, l, i)
               - _prod(sys, "LS", i, k, l, j) - _prod(sys, "LS", j, l, k, i))
        return lhs - rhs

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    # residual is antisymmetric in (i,j), in (k,l) and under
                    # swapping the pairs: one canonical build per class
                    p1, p2 = tuple(sorted((i, j))), tuple(sorted((k, l)))
                    key = (min(p1, p2), max(p1, p2))
                    res = cache.get(key)
                    if res is None:
                        (a, b), (c, d) = key
                        res = cache[key] = build(a, b, c, d)
                    yield f"[L{i}{j},L{k}{l}]", res


def _r_comLu(sys):
    n = sys.dim
    cache: dict = {}

    def build(i, j, k):
        res_x = (_prod(sys, "Lx", i, j, k) - _prod(sys, "xL", k, i, j)
                 - _prod(sys, "xS", i, j, k) + _prod(sys, "xS", j, i, k))
        res_d = (_prod(sys, "LD", i, j, k) - _prod(sys, "DL", k, i, j)
                 - _prod(sys, "DS", i, j, k) + _prod(sys, "DS", j, i, k))
        return res_x, res_d

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                key = tuple(sorted((i, j))) + (k,)   # antisymmetric in (i,j)
                pair = cache.get(key)
                if pair is None:
                    pair = cache[key] = build(key[0], key[1], k)
                yield f"[L{i}{j},x{k}]", pair[0]
                yield f"[L{i}{j},D{k}]", pair[1]


def _r_H_preserves_L(sys):
    h = opalg.hamiltonian_op(sys)
    for i in range(1, sys.dim + 1):
        for j in range(i + 1, sys.dim + 1):
            yield f"[H,L{i}{j}]", commutator(h, opalg.angmom_op(sys, i, j))


def _r_casimir(sys):
    cas = opalg.casimir_op(sys)
    for i in range(1, sys.dim + 1):
        for j in range(i + 1, sys.dim + 1):
            yield f"[I,L{i}{j}]", commutator(cas, opalg.angmom_op(sys, i, j))


def _r_radial_split(sys):
    h = opalg.hamiltonian_op(sys)
    rinv = opalg.rinv_op(sys)
    dr = compose(rinv, opalg.rdr_op(sys))
    rhs = (compose(dr, dr)
           + compose(Operator.constant(sys, sys.dim - 1), compose(rinv, dr))
           + compose(Operator.constant(sys, 2 * sys.gamma), rinv)
           + compose(opalg.casimir_op(sys), compose(rinv, rinv)))
    yield "H - (dr^2 + (N-1)/r dr + 2 gam/r + I/r^2)", h - rhs


def _r_crossing_L(sys):
    n = sys.dim
    cache: dict = {}

    def build(i, j, k, l):
        total = Operator.zero(sys)
        for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
            total = total + _prod(sys, "LL", a, b, c, l) - _prod(sys, "LS", a, b, c, l)
        return total

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    # cyclic in (i,j,k), sign under transpositions
                    key = tuple(sorted((i, j, k))) + (l,)
                    res = cache.get(key)
                    if res is None:
                        res = cache[key] = build(key[0], key[1], key[2], l)
                    yield f"cross({i},{j},{k},{l})", res


def _r_orthogrel(sys):
    n = sys.dim
    cache: dict = {}

    def build(i, j, k):
        out = []
        for lkind, rkind in (("Lx", "xL"), ("LD", "DL")):
            left = (_prod(sys, lkind, i, j, k) + _prod(sys, lkind, j, k, i)
                    + _prod(sys, lkind, k, i, j))
            right = (_prod(sys, rkind, k, i, j) + _prod(sys, rkind, i, j, k)
                     + _prod(sys, rkind, j, k, i))
            out.append((left, right))
        return out

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                key = tuple(sorted((i, j, k)))   # cyclic sums, sign under swaps
                quad = cache.get(key)
                if quad is None:
                    quad = cache[key] = build(*key)
                yield f"Lx+cyc({i},{j},{k})", quad[0][0]
                yield f"xL+cyc({i},{j},{k})", quad[0][1]
                yield f"LD+cyc({i},{j},{k})", quad[1][0]
                yield f"DL+cyc({i},{j},{k})", quad[1][1]


def _r_A_forms(sys, shift_num=None):
    for i in range(1, sys.dim + 1):
        base = opalg.lrl_op(sys, i, "anticommutator")
        if shift_num is None:
            right = opalg.lrl_op(sys, i, "right")
            left = opalg.lrl_op(sys, i, "left")
        else:
            # perturbed radial shift in the 'right' form, for negative controls
            core = opalg.laplacian_dunkl_op(sys) + compose(
                Operator.constant(sys, sys.gamma), opalg.rinv_op(sys))
            shift = opalg.rdr_op(sys) + Operator.constant(sys, _F(shift_num, 2))
            right = -compose(opalg.x_op(sys, i), core) + compose(opalg.dunkl_op(sys, i), shift)
            left = opalg.lrl_op(sys, i, "left")
        yield f"A{i} anticomm-vs-right", base - right
        yield f"A{i} anticomm-vs-left", base - left


def _r_A_conserved(sys):
    h = opalg.hamiltonian_op(sys)
    for i in range(1, sys.dim + 1):
        yield f"[A{i},H]", commutator(opalg.lrl_op(sys, i), h)


def _r_A_L(sys):
    n = sys.dim
    cache: dict = {}

    def build(i, k, l):
        lhs = _prod(sys, "AL", i, k, l) - _prod(sys, "LA", k, l, i)
        rhs = _prod(sys, "AS", l, k, i) - _prod(sys, "AS", k, l, i)
        return lhs - rhs

    for i in range(1, n + 1):
        for k in range(1, n + 1):
            for l in range(1, n + 1):
                key = (i,) + tuple(sorted((k, l)))   # antisymmetric in (k,l)
                res = cache.get(key)
                if res is None:
                    res = cache[key] = build(i, key[1], key[2])
                yield f"[A{i},L{k}{l}]", res


def _r_A_A(sys, factor=_F(1)):
    h = opalg.hamiltonian_op(sys)
    for i in range(1, sys.dim + 1):
        for j in range(i + 1, sys.dim + 1):
            rhs = compose(h, opalg.angmom_op(sys, i, j)) * factor
            yield f"[A{i},A{j}]-HL{i}{j}", commutator(
                opalg.lrl_op(sys, i), opalg.lrl_op(sys, j)) - rhs


def _r_A_sq(sys, const_shift=None):
    n = sys.dim
    shift = _F((n - 1) ** 2, 4) if const_shift is None else const_shift
    asq = Operator.zero(sys)
    for i in range(1, n + 1):
        ai = opalg.lrl_op(sys, i)
        asq = asq + compose(ai, ai)
    corr = opalg.casimir_op(sys) + opalg.s_op(sys) - Operator.constant(sys, shift)
    rhs = compose(opalg.hamiltonian_op(sys), corr) \
        + Operator.constant(sys, sys.gamma * sys.gamma)
    yield "A^2 - (H(I + S - (N-1)^2/4) + gam^2)", asq - rhs


def _r_orthogA(sys):
    n = sys.dim
    cache: dict = {}

    def build(i, j, k):
        left = (_prod(sys, "LA", i, j, k) + _prod(sys, "LA", j, k, i)
                + _prod(sys, "LA", k, i, j))
        right = (_prod(sys, "AL", k, i, j) + _prod(sys, "AL", i, j, k)
                 + _prod(sys, "AL", j, k, i))
        return left, right

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                key = tuple(sorted((i, j, k)))
                pair = cache.get(key)
                if pair is None:
                    pair = cache[key] = build(*key)
                yield f"LA+cyc({i},{j},{k})", pair[0]
                yield f"AL+cyc({i},{j},{k})", pair[1]


def _r_hermiticity(sys):
    for i in range(1, sys.dim + 1):
        ni = opalg.dunkl_op(sys, i)
        yield f"D{i}+ + D{i}", adjoint(ni) + ni
        xi = opalg.x_op(sys, i)
        yield f"x{i}+ - x{i}", adjoint(xi) - xi
        ai = opalg.lrl_op(sys, i)
        yield f"A{i}+ - A{i}", adjoint(ai) - ai
        for j in range(1, sys.dim + 1):
            sij = opalg.exchange_op(sys, i, j)
            yield f"S{i}{j}+ - S{i}{j}", adjoint(sij) - sij


def _r_H_forms(sys):
    yield "H potential - H dunkl-square", (
        opalg.hamiltonian_op(sys, "potential") - opalg.hamiltonian_op(sys, "dunkl_square"))


_CATALOG: list[tuple[IdentityId, Callable]] = [
    (IdentityId("dunkl_commute", "[D_i, D_j] = 0"), _r_dunkl_commute),
    (IdentityId("com_nn", "[D_i, x_j] = S_ij"), _r_com_nn),
    (IdentityId("comSx", "[S_ij, x_k] = [S_kj, x_i]"), _r_comSx),
    (IdentityId("s_center", "[S, s_a] = 0 and sum_i S_ii = N - 2S"), _r_s_center),
    (IdentityId("x_pi", "(x,D) = r dr + S and (D,x) = r dr - S + N"), _r_x_pi),
    (IdentityId("lem1", "sum_j x_j S_ij = x_i + [S, x_i] and companions"), _r_lem1),
    (IdentityId("lem15", "sum_j {x_j, S_ij} = 2 x_i and companions"), _r_lem15),
    (IdentityId("comLL",
                "[L_ij, L_kl] = L_il S_kj + L_jk S_li - L_ik S_lj - L_jl S_ki"), _r_comLL),
    (IdentityId("comLu", "[L_ij, x_k] and [L_ij, D_k] exchange formulas"), _r_comLu),
    (IdentityId("H_preserves_L", "[H, L_ij] = 0"), _r_H_preserves_L),
    (IdentityId("casimir", "[I, L_ij] = 0"), _r_casimir),
    (IdentityId("radial_split",
                "H = dr^2 + (N-1)/r dr + 2 gam/r + I/r^2"), _r_radial_split),
    (IdentityId("crossing_L",
                "L_ij(L_kl - S_kl) + L_jk(L_il - S_il) + L_ki(L_jl - S_jl) = 0"), _r_crossing_L),
    (IdentityId("orthogrel",
                "L_ij x_k + L_jk x_i + L_ki x_j = 0 (both orders, x and D)"), _r_orthogrel),
    (IdentityId("A_forms", "the three closed forms of A_i agree"), _r_A_forms),
    (IdentityId("A_conserved", "[A_i, H] = 0"), _r_A_conserved),
    (IdentityId("A_L", "[A_i, L_kl] = A_l S_ki - A_k S_li"), _r_A_L),
    (IdentityId("A_A", "[A_i, A_j] = H L_ij"), _r_A_A),
    (IdentityId("A_sq", "A^2 = H(I + S - (N-1)^2/4) + gam^2"), _r_A_sq),
    (IdentityId("orthogA", "L_ij A_k + L_jk A_i + L_ki A_j = 0 (both orders)"), _r_orthogA),
    (IdentityId("hermiticity", "D+ = -D, x+ = x, S+ = S, A+ = A"), _r_hermiticity),
    (IdentityId("H_forms", "potential form = Dunkl-square form"), _r_H_forms),
]

_BY_NAME = {ident.name: (ident, fn) for ident, fn in _CATALOG}

# default perturbations used as negative controls (vacuous-pass guards)
_PERTURBED: dict[str, Callable] = {
    "A_forms": lambda sys: _r_A_forms(sys, shift_num=sys.dim - 2),
    "A_A": lambda sys: _r_A_A(sys, factor=_F(1, 2)),
    "A_sq": lambda sys: _r_A_sq(sys, const_shift=_F(sys.dim ** 2, 4)),
}


def catalog() -> list[IdentityId]:
    """The fixed list of verified identities, in suite order."""
    return [ident for ident, _ in _CATALOG]


def check(name: str | IdentityId, sys: System, perturbation: str | None = None) -> Report:
    """Run one identity; status is 'pass' iff every residual is structurally zero."""
    if isinstance(name, IdentityId):
        name = name.name
    if name not in _BY_NAME:
        raise BadSpec(f"unknown identity {name!r}")
    ident, builder = _BY_NAME[name]
    if perturbation is not None:
        if name not in _PERTURBED:
            raise BadSpec(f"identity {name!r} has no perturbed variant")
        builder = _PERTURBED[name]
    t0 = time.perf_counter()
    checks = 0
    for label, residual in builder(sys):
        checks += 1
        if not residual.is_zero():
            term = residual.first_nonzero_term()
            w, beta, coeff = term
            rendered = f"{label}: ({coeff}) * D^{list(beta)} * w#{w}"
            return Report(
                identity=name, system=sys.rs.kind, params=_param_mode(sys),
                status="fail", residual=rendered, failed_at=label,
                millis=int(1000 * (time.perf_counter() - t0)), checks=checks)
    return Report(
        identity=name, system=sys.rs.kind, params=_param_mode(sys),
        status="pass", residual=None,
        millis=int(1000 * (time.perf_counter() - t0)), checks=checks)


def check_all(sys: System, names: list[str] | None = None) -> SuiteReport:
    """Run the catalog (or a filtered subset) in deterministic order."""
    selected = catalog() if names is None else [
        _BY_NAME[n][0] if n in _BY_NAME else _raise_unknown(n) for n in names]
    suite = SuiteReport(system=sys.rs.kind, params=_param_mode(sys))
    for ident in selected:
        suite.reports.append(check(ident.name, sys))
    return suite


def _raise_unknown(n):
    raise BadSpec(f"unknown identity {n!r}")
