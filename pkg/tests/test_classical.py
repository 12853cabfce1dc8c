"""Classical phase-space layer."""

import random
from fractions import Fraction as F

import pytest

from dunklalg import classical, rgw
from dunklalg.classical import (NullNormalization, acl_poly, evaluate_arcs,
                                expand_arcs, highest_symbol, m_poly, msq_poly,
                                normalize_null_pair, p2_poly, phase_ring,
                                quotient_basis, random_null_pair,
                                rewrite_noncrossing)
from dunklalg.errors import DegenerateInput, GroupPartNotIdentity, NotNull
from dunklalg.linalg import QQi, rank


def test_m_poly_and_lagrange():
    r = phase_ring(2)
    x1, x2, p1, p2 = (r.var(i) for i in range(4))
    assert m_poly(r, 1, 2) == x1 * p2 - x2 * p1
    m12 = m_poly(r, 1, 2)
    assert msq_poly(r, 2) == m12 * m12
    # acl on two points: only the j=2 term survives for i=1
    assert acl_poly(r, 1, 2) == p2 * (x2 * p1 - x1 * p2) + p1 * (x1 * p1 - x1 * p1)


def test_msq_is_gram_identity():
    r = phase_ring(3)
    xs = [r.var(i) for i in range(3)]
    ps = [r.var(3 + i) for i in range(3)]
    x2 = sum((x * x for x in xs), r.zero)
    psq = sum((p * p for p in ps), r.zero)
    xp = sum((x * p for x, p in zip(xs, ps)), r.zero)
    assert msq_poly(r, 3) == x2 * psq - xp * xp


def test_plucker():
    r = phase_ring(4)
    lhs = m_poly(r, 1, 2) * m_poly(r, 3, 4) - m_poly(r, 1, 3) * m_poly(r, 2, 4) \
        + m_poly(r, 1, 4) * m_poly(r, 2, 3)
    assert lhs.is_zero()


def test_rewrite_noncrossing_examples():
    out = rewrite_noncrossing([(1, 3), (2, 4)])
    assert out == [(((1, 2), (3, 4)), 1), (((1, 4), (2, 3)), 1)]
    assert rewrite_noncrossing([(1, 4), (2, 3)]) == [(((1, 4), (2, 3)), 1)]
    assert rewrite_noncrossing([(1, 2), (1, 3), (2, 3)]) == \
        [(((1, 2), (1, 3), (2, 3)), 1)]


def test_rewrite_noncrossing_expansion_oracle():
    rnd = random.Random(31)
    for _ in range(40):
        npts = rnd.randint(4, 5)
        r = phase_ring(npts)
        arcs = []
        for _ in range(rnd.randint(2, 6)):
            i = rnd.randint(1, npts - 1)
            j = rnd.randint(i + 1, npts)
            arcs.append((i, j))
        out = rewrite_noncrossing(arcs)
        total = r.zero
        for mono, coeff in out:
            assert not rgw.has_crossing(list(mono))
            total = total + expand_arcs(r, mono) * coeff
        assert total == expand_arcs(r, arcs)


def test_quotient_basis_m2():
    assert quotient_basis(2, 2) == [(), ((1, 2),)]


def test_quotient_basis_m3():
    basis = quotient_basis(3, 2)
    assert len(basis) == 9
    assert ((2, 3), (2, 3)) not in basis
    for mono in basis:
        assert not rgw.has_crossing(list(mono))


def test_normalize_null_pair_examples():
    x = (F(1), F(2))
    p = (F(2), F(4))
    n = normalize_null_pair(x, p)
    assert n.lmbda == 1 and n.mu == -2
    assert n.phat == (F(0), F(0))
    fixed = normalize_null_pair((F(1), F(0)), (F(0), F(0)))
    assert fixed.mu == 0
    with pytest.raises(DegenerateInput):
        normalize_null_pair((F(0), F(0)), (F(1), F(1)))
    with pytest.raises(NotNull):
        normalize_null_pair((F(1), F(0)), (F(0), F(1)))


def test_random_null_pairs_normalized():
    rnd = random.Random(3)
    for _ in range(20):
        x, p = random_null_pair(4, rnd)
        assert not sum((xi * pi for xi, pi in zip(x, p)), QQi(0))
        assert not sum((pi * pi for pi in p), QQi(0))
        n = normalize_null_pair(x, p)
        assert n.mu == QQi(0)
        for i in range(4):
            for j in range(i + 1, 4):
                assert x[i] * p[j] - x[j] * p[i] == n.xhat[i] * n.phat[j] - n.xhat[j] * n.phat[i]


def test_normalization_preserves_m_on_denormalized_pairs():
    rnd = random.Random(8)
    for _ in range(25):
        xh, ph = random_null_pair(4, rnd)
        lam = QQi(F(rnd.randint(1, 5)), F(rnd.randint(0, 3)))
        mu = QQi(F(rnd.randint(-3, 3), rnd.randint(1, 3)))
        x = tuple(xi / lam for xi in xh)
        p = tuple(lam * pi - lam * mu * xi for pi, xi in zip(ph, x))
        n = normalize_null_pair(x, p)
        for i in range(4):
            for j in range(i + 1, 4):
                before = x[i] * p[j] - x[j] * p[i]
                after = n.xhat[i] * n.phat[j] - n.xhat[j] * n.phat[i]
                assert before == after


def test_quotient_basis_rank_on_null_variety():
    rnd = random.Random(12)
    basis = quotient_basis(3, 3)
    assert len(basis) == 16
    pts = [random_null_pair(3, rnd) for _ in range(24)]
    rows = [[evaluate_arcs(mono, x, p) for (x, p) in pts] for mono in basis]
    assert rank(rows) == len(basis)


def test_highest_symbol():
    r = phase_ring(2)
    m = rgw.NormalMonomial(((1, 2),), (), 0, 0)
    assert highest_symbol(m, r) == m_poly(r, 1, 2)
    h = rgw.NormalMonomial((), (), 1, 0)
    assert highest_symbol(h, r) == p2_poly(r, 2)
    prod = rgw.NormalMonomial(((1, 2),), (1,), 0, 0)
    assert highest_symbol(prod, r) == m_poly(r, 1, 2) * acl_poly(r, 1, 2)
    bad = rgw.NormalMonomial((), (), 0, 1)
    with pytest.raises(GroupPartNotIdentity):
        highest_symbol(bad, r)
