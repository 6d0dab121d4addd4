"""Exact rational linear algebra.

Matrices are sequences of rows whose entries are ``int`` or ``Fraction``.
Everything is reduced to integer matrices by row scaling and then handled
with fraction-free (Bareiss) elimination, which keeps the intermediate
numbers small and avoids the gcd cost of ``Fraction`` arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Rational = Fraction | int


def _integer_rows(rows: Sequence[Sequence[Rational]]) -> tuple[list[list[int]], list[int]]:
    """Scale each row by the lcm of its denominators.

    Returns the integer matrix and the list of row multipliers.
    """
    out, scales = [], []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
        scales.append(den)
    return out, scales


def _check_square(rows: Sequence[Sequence[Rational]]) -> int:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    return n


def det(rows: Sequence[Sequence[Rational]]) -> Fraction:
    """Exact determinant by Bareiss elimination."""
    n = _check_square(rows)
    if n == 0:
        return Fraction(1)
    a, scales = _integer_rows(rows)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    scale = 1
    for s in scales:
        scale *= s
    return Fraction(sign * a[n - 1][n - 1], scale)


def inverse(rows: Sequence[Sequence[Rational]]) -> list[list[Fraction]]:
    """Exact inverse by fraction-free Gauss-Jordan elimination.

    Raises ``ZeroDivisionError`` when the matrix is singular.
    """
    n = _check_square(rows)
    a, scales = _integer_rows(rows)
    for i in range(n):
        a[i].extend(1 if j == i else 0 for j in range(n))
    width = 2 * n
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    break
            else:
                raise ZeroDivisionError("matrix is singular")
        akk = a[k][k]
        rk = a[k]
        for i in range(n):
            if i == k:
                continue
            ri = a[i]
            aik = ri[k]
            for j in range(width):
                if j != k:
                    ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    d = a[0][0]
    # left block is d*I; right block is d*(DA)^{-1}, and A^{-1} = (DA)^{-1} D
    return [[Fraction(a[i][n + j] * scales[j], d) for j in range(n)] for i in range(n)]


def rank(rows: Sequence[Sequence[Rational]]) -> int:
    """Exact rank of a rectangular matrix (fraction-free row echelon)."""
    if not rows:
        return 0
    a, _ = _integer_rows(rows)
    m, ncols = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        rr = a[r]
        for i in range(r + 1, m):
            ri = a[i]
            aic = ri[c]
            if aic == 0:
                for j in range(c + 1, ncols):
                    ri[j] = (p * ri[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    ri[j] = (p * ri[j] - aic * rr[j]) // prev
            ri[c] = 0
        prev = p
        r += 1
    return r


def matmul(a: Sequence[Sequence[Rational]], b: Sequence[Sequence[Rational]]) -> list[list[Fraction]]:
    if len(a[0]) != len(b):
        raise ValueError("inner dimensions differ")
    bt = list(zip(*b))
    return [[Fraction(sum(x * y for x, y in zip(row, col))) for col in bt] for row in a]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


MERSENNE_61 = (1 << 61) - 1


def rank_mod_p(rows: Sequence[Sequence[Rational]], p: int = MERSENNE_61) -> int:
    """Rank of the reduction modulo the prime ``p``.

    Never exceeds the rational rank.  Raises ``ZeroDivisionError`` if some
    denominator is divisible by ``p`` (the reduction is then undefined).
    """
    if not rows:
        return 0
    a = []
    for row in rows:
        out = []
        for x in row:
            if isinstance(x, Fraction):
                den = x.denominator % p
                if den == 0:
                    raise ZeroDivisionError("denominator divisible by the modulus")
                out.append(x.numerator * pow(den, -1, p) % p)
            else:
                out.append(int(x) % p)
        a.append(out)
    m, ncols = len(a), len(a[0])
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        rr = a[r]
        inv = pow(rr[c], -1, p)
        for i in range(r + 1, m):
            ri = a[i]
            f = ri[c] * inv % p
            if f:
                for j in range(c, ncols):
                    ri[j] = (ri[j] - f * rr[j]) % p
        r += 1
    return r
