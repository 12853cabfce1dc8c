"""Exact linear algebra helpers: fraction-free rank over Q and the Gaussian
rationals QQi used for sampling the complex null variety with exact arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm


class QQi:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _coerce(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        other = _coerce(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero in QQi")
        return QQi((self.re * other.re + self.im * other.im) / n,
                   (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, k: int):
        out = QQi(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re or self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QQi(other)
        if not isinstance(other, QQi):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def _coerce(v):
    return v if isinstance(v, QQi) else QQi(v)


def rank(rows) -> int:
    """Exact rank of a matrix given as a list of rows.

    Fraction entries go through integer fraction-free (Bareiss) elimination
    after row-wise denominator clearing; QQi entries use exact field
    elimination.
    """
    rows = [list(r) for r in rows if r]
    if not rows:
        return 0
    if all(isinstance(v, (int, Fraction)) for r in rows for v in r):
        return _rank_bareiss(rows)
    return _rank_field(rows)


def _rank_bareiss(rows) -> int:
    m = []
    for r in rows:
        den = lcm(*[Fraction(v).denominator for v in r]) if r else 1
        m.append([int(Fraction(v) * den) for v in r])
    nr, nc = len(m), len(m[0])
    rank_ = 0
    prev = 1
    row = 0
    for col in range(nc):
        piv = None
        for i in range(row, nr):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for i in range(row + 1, nr):
            for j in range(col + 1, nc):
                num = m[row][col] * m[i][j] - m[i][col] * m[row][j]
                q, rem = divmod(num, prev)
                if rem:
                    # exactness can degrade on rank-deficient column skips;
                    # fall back to plain rational elimination
                    return _rank_field(rows)
                m[i][j] = q
            m[i][col] = 0
        prev = m[row][col]
        row += 1
        rank_ += 1
        if row == nr:
            break
    return rank_


def _rank_field(rows) -> int:
    m = [[_coerce(v) if not isinstance(v, QQi) else v for v in r] for r in rows]
    nr, nc = len(m), len(m[0])
    rank_ = 0
    row = 0
    for col in range(nc):
        piv = None
        for i in range(row, nr):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = QQi(1) / m[row][col]
        for i in range(row + 1, nr):
            if m[i][col]:
                f = m[i][col] * inv
                for j in range(col, nc):
                    m[i][j] = m[i][j] - f * m[row][j]
        row += 1
        rank_ += 1
        if row == nr:
            break
    return rank_


def reduce_to_independent(vectors) -> list[int]:
    """Indices of a maximal linearly independent subset (greedy, exact).

    Vectors are dicts (sparse) or sequences over Fraction.
    """
    basis = []   # list of (pivot key, normalized dict)
    chosen = []
    for idx, vec in enumerate(vectors):
        if not isinstance(vec, dict):
            vec = {i: Fraction(v) for i, v in enumerate(vec) if v}
        cur = dict(vec)
        for pivot, bvec in basis:
            c = cur.get(pivot)
            if c:
                for k, v in bvec.items():
                    s = cur.get(k, Fraction(0)) - c * v
                    if s:
                        cur[k] = s
                    else:
                        cur.pop(k, None)
        if cur:
            pivot = min(cur)
            inv = 1 / cur[pivot]
            basis.append((pivot, {k: v * inv for k, v in cur.items()}))
            chosen.append(idx)
    return chosen
