"""Multivariate polynomials with exact rational coefficients.

A :class:`MultiPoly` is a map from exponent tuples to nonzero ``Fraction``
coefficients over an ordered tuple of variable names.  All arithmetic is
exact.  Two polynomials can only be combined when their variable tuples are
identical; use :meth:`MultiPoly.extend_vars` or :func:`ring` to put them in
a common ring first.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .errors import CostGuard

MAX_DET_SIZE = 8


def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


class MultiPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple[int, ...], object] | None = None):
        self.vars = tuple(vars)
        nv = len(self.vars)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nv:
                raise ValueError(f"exponent {exp} does not match {nv} variables")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = Fraction(coef)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms = clean

    # construction --------------------------------------------------------
    @classmethod
    def constant(cls, vars: Sequence[str], c) -> "MultiPoly":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def variable(cls, vars: Sequence[str], name: str) -> "MultiPoly":
        vars = tuple(vars)
        i = vars.index(name)
        exp = tuple(int(k == i) for k in range(len(vars)))
        return cls(vars, {exp: 1})

    @classmethod
    def _raw(cls, vars: tuple[str, ...], terms: dict) -> "MultiPoly":
        p = cls.__new__(cls)
        p.vars = vars
        p.terms = terms
        return p

    # basic queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        exp = tuple(exp)
        if len(exp) != len(self.vars):
            raise ValueError("exponent length does not match the number of variables")
        return self.terms.get(exp, Fraction(0))

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return d is None or degs.pop() == d

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly._raw(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # arithmetic ----------------------------------------------------------
    def _check(self, other: "MultiPoly") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable tuples differ: {self.vars} vs {other.vars}")

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.vars, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(self.vars, out)

    def __rmul__(self, other) -> "MultiPoly":
        return self.scale(other)

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, s) -> "MultiPoly":
        s = Fraction(s)
        if not s:
            return MultiPoly._raw(self.vars, {})
        return MultiPoly._raw(self.vars, {e: c * s for e, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.vars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def derivative(self, var: str) -> "MultiPoly":
        """Formal partial derivative; zero if ``var`` is not a variable."""
        if var not in self.vars:
            return MultiPoly._raw(self.vars, {})
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return MultiPoly._raw(self.vars, out)

    def evaluate(self, point: Sequence):
        """Value at ``point``; exact for rational input, float otherwise."""
        if len(point) != len(self.vars):
            raise ValueError(f"point has {len(point)} coordinates, expected {len(self.vars)}")
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        if isinstance(total, int):
            total = Fraction(total)
        return total

    def substitute(self, images: Mapping[str, object] | Sequence, vars: Sequence[str] | None = None) -> "MultiPoly":
        """Replace variables by polynomials (or scalars) in a new ring.

        ``images`` is either a sequence aligned with ``self.vars`` or a
        mapping by name; unmapped variables become variables of the target
        ring, which must then contain them.
        """
        if vars is None:
            probe = next((v for v in (images.values() if isinstance(images, Mapping) else images)
                          if isinstance(v, MultiPoly)), None)
            vars = probe.vars if probe is not None else self.vars
        vars = tuple(vars)
        if isinstance(images, Mapping):
            seq = [images.get(name, MultiPoly.variable(vars, name) if name in vars else None)
                   for name in self.vars]
            if any(s is None for s in seq):
                raise ValueError("unmapped variable not present in the target ring")
        else:
            seq = list(images)
            if len(seq) != len(self.vars):
                raise ValueError("wrong number of images")
        seq = [s if isinstance(s, MultiPoly) else MultiPoly.constant(vars, s) for s in seq]
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.constant(vars, 1)} for _ in seq]

        def power(i: int, k: int) -> MultiPoly:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * seq[i]
            return cache[k]

        result = MultiPoly._raw(vars, {})
        for e, c in self.terms.items():
            term = MultiPoly.constant(vars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def extend_vars(self, vars: Sequence[str]) -> "MultiPoly":
        """Embed into a ring whose variables include ours."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for i, k in zip(idx, e):
                ne[i] = k
            out[tuple(ne)] = c
        return MultiPoly._raw(vars, out)

    # display / serialization ---------------------------------------------
    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_dict(self) -> dict:
        return {"vars": list(self.vars),
                "terms": [{"exp": list(e), "coef": str(c)} for e, c in self.sorted_terms()]}

    @classmethod
    def from_dict(cls, d: dict) -> "MultiPoly":
        return cls(d["vars"], {tuple(t["exp"]): Fraction(t["coef"]) for t in d["terms"]})


def ring(*names: str) -> tuple[MultiPoly, ...]:
    """Generators of the polynomial ring in ``names``."""
    return tuple(MultiPoly.variable(names, n) for n in names)


def divide_exact(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Quotient ``p / q``; raises ``ValueError`` if the division leaves a remainder."""
    p._check(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_e, lead_c = q.sorted_terms()[0]
    rem = dict(p.terms)
    quot: dict[tuple[int, ...], Fraction] = {}
    while rem:
        e, c = max(rem.items(), key=lambda t: _grlex_key(t[0]))
        if any(a < b for a, b in zip(e, lead_e)):
            raise ValueError("polynomial division is not exact")
        qe = tuple(a - b for a, b in zip(e, lead_e))
        qc = c / lead_c
        quot[qe] = qc
        for e2, c2 in q.terms.items():
            te = tuple(a + b for a, b in zip(qe, e2))
            v = rem.get(te, 0) - qc * c2
            if v:
                rem[te] = v
            else:
                rem.pop(te, None)
    return MultiPoly._raw(p.vars, quot)


# ---------------------------------------------------------------------------
# determinants of polynomial matrices
# ---------------------------------------------------------------------------

def _check_matrix(M: Sequence[Sequence[MultiPoly]]) -> tuple[int, tuple[str, ...]]:
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise ValueError("determinant needs a nonempty square matrix")
    if n > MAX_DET_SIZE:
        raise CostGuard(f"polynomial determinant limited to {MAX_DET_SIZE}x{MAX_DET_SIZE}, got {n}x{n}")
    vars = M[0][0].vars
    for row in M:
        for x in row:
            if x.vars != vars:
                raise ValueError("matrix entries live in different rings")
    return n, vars


def det_poly_matrix(M: Sequence[Sequence[MultiPoly]], method: str = "laplace") -> MultiPoly:
    """Exact determinant of a square matrix of polynomials.

    ``method="laplace"`` expands along rows with memoized minors (each column
    subset is expanded once); ``method="bareiss"`` runs fraction-free
    elimination with exact polynomial division.
    """
    n, vars = _check_matrix(M)
    if method == "laplace":
        return _det_laplace(M, n, vars)
    if method == "bareiss":
        return _det_bareiss(M, n, vars)
    raise ValueError(f"unknown method {method!r}")


def _det_laplace(M, n, vars) -> MultiPoly:
    # minor[cols] = det of the last len(cols) rows restricted to cols
    zero = MultiPoly._raw(vars, {})
    minors: dict[tuple[int, ...], MultiPoly] = {(): MultiPoly.constant(vars, 1)}
    for size in range(1, n + 1):
        row = M[n - size]
        new = {}
        for cols in itertools.combinations(range(n), size):
            acc = zero
            for pos, c in enumerate(cols):
                entry = row[c]
                if entry.is_zero():
                    continue
                sub = minors[cols[:pos] + cols[pos + 1:]]
                if sub.is_zero():
                    continue
                term = entry * sub
                acc = acc - term if pos % 2 else acc + term
            new[cols] = acc
        minors = new
    return minors[tuple(range(n))]


def _det_bareiss(M, n, vars) -> MultiPoly:
    a = [list(row) for row in M]
    sign = 1
    prev = MultiPoly.constant(vars, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return MultiPoly._raw(vars, {})
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = divide_exact(num, prev)
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def pencil(mats: Sequence, vars: Sequence[str] | None = None) -> list[list[MultiPoly]]:
    """The matrix ``sum_k x_k Z_k - x_last * E`` with exact entries.

    ``mats`` are the ``Z_k`` (numpy arrays or nested lists, converted with
    ``Fraction``).  The default variables are ``x1 .. x_{len(mats)+1}``.
    """
    mats = [[[Fraction(v) for v in row] for row in (m.tolist() if hasattr(m, "tolist") else m)]
            for m in mats]
    n = len(mats[0])
    if vars is None:
        vars = tuple(f"x{k + 1}" for k in range(len(mats) + 1))
    vars = tuple(vars)
    if len(vars) != len(mats) + 1:
        raise ValueError("need one variable per matrix plus one for the identity")
    nv = len(vars)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            terms = {}
            for k, Z in enumerate(mats):
                if Z[i][j]:
                    terms[tuple(int(t == k) for t in range(nv))] = Z[i][j]
            if i == j:
                terms[tuple(int(t == nv - 1) for t in range(nv))] = Fraction(-1)
            row.append(MultiPoly._raw(vars, terms))
        out.append(row)
    return out


def pencil_determinant(mats: Sequence, vars: Sequence[str] | None = None) -> MultiPoly:
    """``det(sum_k x_k Z_k - x_last E_n)``; homogeneous of degree n."""
    return det_poly_matrix(pencil(mats, vars))


def restrict_to_plane(p: MultiPoly, a: Sequence, b: Sequence, c: Sequence,
                      names: tuple[str, str] = ("s", "t")) -> MultiPoly:
    """Substitute ``x_i -> a_i s + b_i t + c_i``; result is bivariate."""
    n = len(p.vars)
    if not (len(a) == len(b) == len(c) == n):
        raise ValueError("plane coefficients must match the number of variables")
    images = [MultiPoly(names, {(1, 0): a[i], (0, 1): b[i], (0, 0): c[i]}) for i in range(n)]
    return p.substitute(images, names)


def product(polys: Iterable[MultiPoly]) -> MultiPoly:
    return reduce(lambda x, y: x * y, polys)
