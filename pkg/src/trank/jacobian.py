"""Exact check of the Jacobian argument for m = 3.

The parameter space S consists of pairs ``(Y1, Y2)`` with

* ``Y1`` lower triangular with entries ``u_ij`` (i >= j) plus the extra
  identification ``Y1[1, n] = u_11``,
* ``Y2`` with zero first row, ``-1`` on the subdiagonal and last column
  ``(0, v_2, ..., v_n)``.

The map ``gamma(Y1, Y2) = |x1 Y1 + x2 Y2 + x3 E_n| - x3^n`` lands in the
space P spanned by the monomials ``x1^a x2^b x3^c`` of degree n with
``b != n`` and ``c != n``.  Both spaces have dimension ``n(n+3)/2 - 1``; the
Jacobian of gamma is computed exactly at rational points.

Parameters are ordered ``u_11, u_21, u_22, u_31, ...`` (row-major over the
lower triangle) followed by ``v_2 .. v_n``; the basis of P is ordered by
descending exponent tuple ``(a, b, c)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact
from .errors import CostGuard
from .poly import MultiPoly, det_poly_matrix

Y1_READING = ("Y1 read as lower triangular (u_ij, i >= j) with the single extra entry "
              "Y1[1, n] = u_11")

XVARS = ("x1", "x2", "x3")


def u_index(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, i + 1)]


def v_index(n: int) -> list[int]:
    return list(range(2, n + 1))


def param_names(n: int) -> list[str]:
    return [f"u{i}_{j}" for i, j in u_index(n)] + [f"v{j}" for j in v_index(n)]


def p_basis(n: int) -> list[tuple[int, int, int]]:
    """Exponents ``(a, b, c)`` spanning P, in descending order."""
    out = [(a, b, n - a - b) for a in range(n + 1) for b in range(n + 1 - a)]
    out = [e for e in out if e[1] != n and e[2] != n]
    return sorted(out, reverse=True)


def dimension_check(n: int) -> tuple[int, int]:
    """``(dim S, dim P)``; both equal ``n(n+3)/2 - 1``."""
    if n < 2:
        raise ValueError("need n >= 2")
    return len(u_index(n)) + len(v_index(n)), len(p_basis(n))


@dataclass
class SPoint:
    n: int
    u: dict
    v: dict

    def __post_init__(self):
        self.u = {tuple(k): Fraction(x) for k, x in self.u.items()}
        self.v = {int(k): Fraction(x) for k, x in self.v.items()}
        if set(self.u) != set(u_index(self.n)) or set(self.v) != set(v_index(self.n)):
            raise ValueError("parameter keys do not match n")

    @classmethod
    def from_vector(cls, n: int, values: Sequence) -> "SPoint":
        ui, vi = u_index(n), v_index(n)
        if len(values) != len(ui) + len(vi):
            raise ValueError(f"expected {len(ui) + len(vi)} parameters")
        return cls(n, dict(zip(ui, values[:len(ui)])), dict(zip(vi, values[len(ui):])))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, bound: int = 20) -> "SPoint":
        k = len(u_index(n)) + len(v_index(n))
        nums = rng.integers(-bound, bound + 1, size=k)
        dens = rng.integers(1, bound + 1, size=k)
        return cls.from_vector(n, [Fraction(int(a), int(b)) for a, b in zip(nums, dens)])

    def vector(self) -> list[Fraction]:
        return [self.u[k] for k in u_index(self.n)] + [self.v[j] for j in v_index(self.n)]

    def to_dict(self) -> dict:
        return {"n": self.n, "params": dict(zip(param_names(self.n), map(str, self.vector())))}

    @classmethod
    def from_dict(cls, d: dict) -> "SPoint":
        n = d["n"]
        return cls.from_vector(n, [Fraction(d["params"][k]) for k in param_names(n)])


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def _empty(n: int, zero):
    return [[zero for _ in range(n)] for _ in range(n)]


def build_Y1(u: dict, n: int | None = None, zero=Fraction(0)) -> list[list]:
    """Lower triangular ``u_ij`` with ``Y1[1, n] = u_11`` (1-based)."""
    if n is None:
        n = max(i for i, _ in u)
    if n < 2:
        raise ValueError("need n >= 2")
    Y = _empty(n, zero)
    for (i, j), x in u.items():
        Y[i - 1][j - 1] = x
    Y[0][n - 1] = u[(1, 1)]
    return Y


def build_Y2(v, n: int | None = None, zero=Fraction(0), minus_one=Fraction(-1)) -> list[list]:
    """Zero first row, ``-1`` subdiagonal, last column ``(0, v_2, ..., v_n)``.

    ``v`` is a mapping ``j -> v_j`` or a sequence ``(v_2, ..., v_n)``.
    """
    if not isinstance(v, dict):
        v = {j + 2: x for j, x in enumerate(v)}
    if n is None:
        n = len(v) + 1
    if n < 2:
        raise ValueError("need n >= 2")
    Y = _empty(n, zero)
    for k in range(1, n):
        Y[k][k - 1] = minus_one
    for j, x in v.items():
        Y[j - 1][n - 1] = Y[j - 1][n - 1] + x
    return Y


def _pencil_xyz(Y1, Y2, n: int, vars=XVARS) -> list[list[MultiPoly]]:
    """``x1 Y1 + x2 Y2 + x3 E`` for scalar or polynomial entries."""
    x1, x2, x3 = (MultiPoly.variable(vars, v) for v in XVARS)
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            e = x1 * Y1[i][j] + x2 * Y2[i][j]
            if i == j:
                e = e + x3
            row.append(e)
        M.append(row)
    return M


# ---------------------------------------------------------------------------
# gamma and its Jacobian
# ---------------------------------------------------------------------------

@dataclass
class PVector:
    n: int
    coefficients: list

    def as_dict(self) -> dict:
        return dict(zip(p_basis(self.n), self.coefficients))

    def to_dict(self) -> dict:
        return {"n": self.n, "basis": [list(e) for e in p_basis(self.n)],
                "coefficients": [str(c) for c in self.coefficients]}


def _check_cost(n: int, limit: int) -> None:
    if n > limit:
        raise CostGuard(f"n = {n} exceeds the symbolic limit {limit}")


def gamma_polynomial(s: SPoint) -> MultiPoly:
    """``|x1 Y1 + x2 Y2 + x3 E_n| - x3^n`` as a polynomial in x1, x2, x3."""
    n = s.n
    M = _pencil_xyz(build_Y1(s.u, n), build_Y2(s.v, n), n)
    x3 = MultiPoly.variable(XVARS, "x3")
    return det_poly_matrix(M) - x3 ** n


def _coefficients(p: MultiPoly, n: int) -> list[Fraction]:
    basis = set(p_basis(n))
    stray = [e for e in p.terms if e not in basis]
    if stray:
        raise ArithmeticError(f"polynomial has monomials outside P: {stray}")
    return [p.coefficient(e) for e in p_basis(n)]


def gamma(s: SPoint) -> PVector:
    _check_cost(s.n, 6)
    return PVector(s.n, _coefficients(gamma_polynomial(s), s.n))


def _cofactors(M: list[list[MultiPoly]]) -> list[list[MultiPoly]]:
    n = len(M)
    C = []
    for a in range(n):
        row = []
        for b in range(n):
            minor = [[M[i][j] for j in range(n) if j != b] for i in range(n) if i != a]
            d = det_poly_matrix(minor) if minor else MultiPoly.constant(XVARS, 1)
            row.append(-d if (a + b) % 2 else d)
        C.append(row)
    return C


def partial_derivatives(s: SPoint) -> list[MultiPoly]:
    """``d gamma / d theta`` for every parameter, by Jacobi's formula.

    The pencil matrix is linear in each parameter, so the derivative is the
    sum of cofactors at the positions where that parameter appears, times
    the coefficient (x1 for ``u``, x2 for ``v``).
    """
    n = s.n
    M = _pencil_xyz(build_Y1(s.u, n), build_Y2(s.v, n), n)
    C = _cofactors(M)
    x1, x2 = MultiPoly.variable(XVARS, "x1"), MultiPoly.variable(XVARS, "x2")
    out = []
    for i, j in u_index(n):
        d = C[i - 1][j - 1]
        if (i, j) == (1, 1):
            d = d + C[0][n - 1]
        out.append(x1 * d)
    for j in v_index(n):
        out.append(x2 * C[j - 1][n - 1])
    return out


@dataclass
class JacobianReport:
    n: int
    point: SPoint
    matrix: list
    determinant: Fraction
    nonsingular: bool
    dims: tuple = ()
    closed_forms: dict | None = None
    reading: str = Y1_READING

    def to_dict(self) -> dict:
        return {"n": self.n, "point": self.point.to_dict(),
                "matrix": [[str(x) for x in row] for row in self.matrix],
                "determinant": str(self.determinant), "nonsingular": self.nonsingular,
                "dims": list(self.dims), "closed_forms": self.closed_forms,
                "reading": self.reading}

    @classmethod
    def from_dict(cls, d: dict) -> "JacobianReport":
        return cls(d["n"], SPoint.from_dict(d["point"]),
                   [[Fraction(x) for x in row] for row in d["matrix"]],
                   Fraction(d["determinant"]), d["nonsingular"], tuple(d.get("dims", ())),
                   d.get("closed_forms"), d.get("reading", Y1_READING))


def jacobian(s: SPoint) -> JacobianReport:
    """Exact Jacobian of gamma at ``s``: rows follow the P basis, columns the parameters."""
    _check_cost(s.n, 5)
    cols = [_coefficients(d, s.n) for d in partial_derivatives(s)]
    J = [list(row) for row in zip(*cols)]
    det = exact.det(J)
    return JacobianReport(s.n, s, J, det, det != 0, dimension_check(s.n))


# ---------------------------------------------------------------------------
# closed-form derivatives
# ---------------------------------------------------------------------------

def _symbolic_ring(n: int) -> tuple[str, ...]:
    return XVARS + tuple(param_names(n))


def _lambda(vars, n):
    x1, x3 = MultiPoly.variable(vars, "x1"), MultiPoly.variable(vars, "x3")
    return {j: MultiPoly.variable(vars, f"u{j}_{j}") * x1 + x3 for j in range(1, n + 1)}


def _mu(lam, a: int, b: int, one: MultiPoly) -> MultiPoly:
    out = one
    for t in range(a, b + 1):
        out = out * lam[t]
    return out


def _det_or_one(M, one):
    return det_poly_matrix(M) if M else one


def closed_form_derivatives(n: int) -> dict[str, MultiPoly]:
    """Transcribed closed forms of the partial derivatives at ``u_ij = 0`` (i > j)."""
    vars = _symbolic_ring(n)
    one = MultiPoly.constant(vars, 1)
    zero = MultiPoly.constant(vars, 0)
    x1, x2 = MultiPoly.variable(vars, "x1"), MultiPoly.variable(vars, "x2")
    lam = _lambda(vars, n)
    v = {j: MultiPoly.variable(vars, f"v{j}") for j in v_index(n)}
    u11 = MultiPoly.variable(vars, "u1_1")
    out = {}
    for j in v_index(n):
        out[f"v{j}"] = x2 ** (n - j + 1) * _mu(lam, 1, j - 1, one)

    def tail_block(first: int, extra_corner) -> list[list[MultiPoly]]:
        # rows/cols for indices first..n: diag lambda, subdiag -x2, last column v_i x2
        size = n - first + 1
        K = [[zero] * size for _ in range(size)]
        for r in range(size):
            i = first + r
            K[r][r] = K[r][r] + lam[i]
            if r:
                K[r][r - 1] = K[r][r - 1] - x2
            K[r][size - 1] = K[r][size - 1] + v[i] * x2
        if size:
            K[0][size - 1] = K[0][size - 1] + extra_corner
        return K

    out["u1_1"] = x1 * _det_or_one(tail_block(2, x2), one)
    for j in range(2, n + 1):
        out[f"u{j}_{j}"] = x1 * _mu(lam, 1, j - 1, one) * _det_or_one(tail_block(j + 1, zero), one)
    for i in range(2, n + 1):
        for j in range(1, i):
            if j == 1:
                L = [[u11 * x1]]
            else:
                L = [[zero] * j for _ in range(j)]
                L[0][0] = lam[1]
                L[0][j - 1] = u11 * x1
                for r in range(1, j):
                    L[r][r - 1] = -x2
                    L[r][j - 1] = v[r + 1] * x2
                    if r < j - 1:
                        L[r][r] = lam[r + 1]
            out[f"u{i}_{j}"] = -(x1 * x2 ** (n - i) * _mu(lam, j + 1, i - 1, one) * det_poly_matrix(L))
    return out


def symbolic_derivatives(n: int) -> dict[str, MultiPoly]:
    """Differentiate the fully symbolic gamma, then set ``u_ij = 0`` for i > j."""
    vars = _symbolic_ring(n)
    u = {k: MultiPoly.variable(vars, f"u{k[0]}_{k[1]}") for k in u_index(n)}
    v = {j: MultiPoly.variable(vars, f"v{j}") for j in v_index(n)}
    zero = MultiPoly.constant(vars, 0)
    Y1 = build_Y1(u, n, zero)
    Y2 = build_Y2(v, n, zero, MultiPoly.constant(vars, -1))
    M = _pencil_xyz(Y1, Y2, n, vars)
    g = det_poly_matrix(M) - MultiPoly.variable(vars, "x3") ** n
    lower = {f"u{i}_{j}": zero for i, j in u_index(n) if i > j}
    return {name: g.derivative(name).substitute(lower, vars) for name in param_names(n)}


def verify_closed_forms(n: int) -> dict:
    """Compare symbolic derivatives with the closed forms, per family."""
    if not 2 <= n <= 4:
        raise CostGuard("closed-form verification supports 2 <= n <= 4")
    sym = symbolic_derivatives(n)
    closed = closed_form_derivatives(n)
    families = {"v": [f"v{j}" for j in v_index(n)],
                "u_diag": [f"u{j}_{j}" for j in range(1, n + 1)],
                "u_lower": [f"u{i}_{j}" for i, j in u_index(n) if i > j]}
    report = {"n": n}
    mismatches = []
    for fam, names in families.items():
        bad = [k for k in names if sym[k] != closed[k]]
        report[fam] = not bad
        mismatches.extend(bad)
    report["mismatches"] = mismatches
    return report
