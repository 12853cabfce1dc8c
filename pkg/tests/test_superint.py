"""Superintegrability pipeline: Reynolds, invariants, Jacobians, quantization,
and restriction checks."""

from fractions import Fraction as F

import pytest

from dunklalg import classical, opalg, rgw, superint
from dunklalg.coxeter import System
from dunklalg.errors import NotInvariant
from dunklalg.exactnum import Poly, RatFunc, RExt


def _sym(sys):
    return superint.symbol_ring(sys.dim)


def test_reynolds_basics(sys_a1):
    ring = _sym(sys_a1)
    m12 = ring.var_named("M1_2")
    p2 = ring.var_named("P2")
    # the transposition flips M12, so the average vanishes
    assert superint.reynolds(m12, sys_a1).is_zero()
    assert superint.reynolds(p2, sys_a1) == p2
    assert superint.reynolds(m12 * m12, sys_a1) == m12 * m12


def test_invariant_generators_b2(sys_b2):
    ring = _sym(sys_b2)
    gens = superint.invariant_generators(sys_b2, 2, ring)
    assert any(g == ring.var_named("P2") for g in gens)
    m12sq = ring.var_named("M1_2") ** 2
    assert any(g == m12sq for g in gens)
    a_sq = ring.var_named("A1") ** 2 + ring.var_named("A2") ** 2
    assert any(set(g.terms) == set(a_sq.terms) for g in gens)
    assert superint.invariant_generators(sys_b2, 0, ring) == [ring.one]


def test_invariants_are_pointwise_invariant(sys_b2):
    ring = _sym(sys_b2)
    pring = classical.phase_ring(2)
    for g in superint.invariant_generators(sys_b2, 3, ring):
        expanded = superint.expand_symbol(g, sys_b2, pring)
        for w in range(sys_b2.table.order):
            m = sys_b2.table.matrix(w)
            rows = [[m[j][i] for j in range(2)] for i in range(2)]
            images = [None] * 4
            for i in range(2):
                images[i] = sum((pring.var(j) * rows[i][j] for j in range(2)),
                                pring.zero)
                images[2 + i] = sum((pring.var(2 + j) * rows[i][j] for j in range(2)),
                                    pring.zero)
            assert expanded.subs_vars(images) == expanded


def test_jacobian_rank_explicit(sys_b2):
    ring = _sym(sys_b2)
    gens = [ring.var_named("P2"), ring.var_named("M1_2"), ring.var_named("A1")]
    point = [F(1), F(2), F(3), F(5)]
    assert superint.jacobian_rank(gens, sys_b2, point=point) == 3
    assert superint.jacobian_rank([ring.var_named("P2")], sys_b2, point=point) == 1


def test_weyl_quantize(sys_b2):
    ring = _sym(sys_b2)
    e = superint.weyl_quantize(ring.var_named("P2"), sys_b2)
    assert e.words == {(("H",),): RatFunc.const(sys_b2.ring, 1)}
    e2 = superint.weyl_quantize(ring.var_named("M1_2") * ring.var_named("A1"), sys_b2)
    half = RatFunc.const(sys_b2.ring, F(1, 2))
    assert e2.words == {(("L", 1, 2), ("A", 1)): half,
                        (("A", 1), ("L", 1, 2)): half}
    e3 = superint.weyl_quantize(ring.var_named("M1_2") ** 2, sys_b2)
    assert e3.words == {(("L", 1, 2), ("L", 1, 2)): RatFunc.const(sys_b2.ring, 1)}


def test_local_hamiltonian_rank1(sys_b1):
    ring = sys_b1.ring
    h = superint.local_hamiltonian(sys_b1)
    g = ring.var_named("g")
    x = ring.var(0)
    ident = RExt(ring,
                 RatFunc.from_polys(-(g * (g - ring.one)), x * x),
                 RatFunc.from_polys(2 * ring.var_named("gam"), ring.q))
    expect = opalg.Operator(sys_b1, {0: {(2,): RExt.const(ring, 1), (0,): ident}})
    assert (h - expect).is_zero()


def test_local_hamiltonian_coulomb_limit():
    sys = System.build("B2", gvals=[0, 0])
    h = superint.local_hamiltonian(sys)
    lap = opalg.Operator(sys, {0: {(2, 0): RExt.const(sys.ring, 1),
                                   (0, 2): RExt.const(sys.ring, 1)}})
    coul = opalg.compose(opalg.Operator.constant(sys, 2 * sys.gamma),
                         opalg.rinv_op(sys))
    assert (h - (lap + coul)).is_zero()


def test_restriction_agrees_on_invariants(sys_b2):
    # (H - H_local) annihilates W-invariant test functions
    h = opalg.hamiltonian_op(sys_b2)
    hloc = superint.local_hamiltonian(sys_b2)
    for f in superint.invariant_test_functions(sys_b2, 4):
        lhs = opalg.apply_op(h, f)
        rhs = opalg.apply_op(hloc, f)
        assert (lhs - rhs).is_zero()


def test_check_integral_b2(sys_b2):
    ring = _sym(sys_b2)
    entry = superint.check_integral(ring.var_named("M1_2") ** 2, sys_b2,
                                    test_degree=4)
    assert entry["status"] == "pass"
    with pytest.raises(NotInvariant):
        superint.check_integral(ring.var_named("M1_2"), sys_b2)


def test_check_integral_coulomb():
    sys = System.build("B2", gvals=[0, 0], gamma=0)
    ring = superint.symbol_ring(2)
    entry = superint.check_integral(ring.var_named("P2"), sys, test_degree=4)
    assert entry["status"] == "pass"


def test_certificate_a1xa1(sys_a1a1):
    cert = superint.certificate(sys_a1a1, degree=4, test_degree=4, seed=5)
    assert cert.target == 3
    assert cert.jacobian_rank == 3
    assert all(c["status"] == "pass" for c in cert.commutation)
    assert cert.ok()
    data = cert.as_dict()
    assert data["status"] == "pass" and data["N"] == 2
