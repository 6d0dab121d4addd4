from fractions import Fraction

import numpy as np
import pytest
import sympy

from trank import exact
from trank.errors import CostGuard
from trank.jacobian import (JacobianReport, SPoint, build_Y1, build_Y2, closed_form_derivatives,
                            dimension_check, gamma, gamma_polynomial, jacobian, p_basis,
                            symbolic_derivatives, verify_closed_forms)
from trank.poly import MultiPoly

F = Fraction


def test_build_Y2():
    assert build_Y2([5]) == [[0, 0], [-1, 5]]
    Y = build_Y2([F(2), F(7)])
    assert Y == [[0, 0, 0], [-1, 0, 2], [0, -1, 7]]
    assert exact.det(Y) == 0
    with pytest.raises(ValueError):
        build_Y2([], n=1)


def test_build_Y1():
    u = {(1, 1): F(1), (2, 1): F(2), (2, 2): F(3)}
    assert build_Y1(u) == [[1, 1], [2, 3]]
    u3 = {(i, j): F(10 * i + j) for i in range(1, 4) for j in range(1, i + 1)}
    Y = build_Y1(u3)
    assert Y[0][2] == 11 and Y[0][1] == 0 and Y[1][2] == 0
    assert build_Y1({k: F(0) for k in u3}) == [[0] * 3 for _ in range(3)]


def test_dimensions():
    for n in range(2, 9):
        assert dimension_check(n) == (n * (n + 3) // 2 - 1,) * 2
        assert len(p_basis(n)) == (n + 1) * (n + 2) // 2 - 2
    assert dimension_check(2) == (4, 4)
    assert dimension_check(3) == (8, 8)
    assert dimension_check(5) == (19, 19)
    assert p_basis(2) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)]


def test_gamma_n2_hand_expansion():
    assert gamma(SPoint.from_vector(2, [1, 0, 0, 0])).coefficients == [0, 1, 1, 0]
    assert gamma(SPoint.from_vector(3, [0] * 8)).coefficients == [0] * 8
    # x1^2 = u11 u22 - u11 u21, x1x2 = u11 v2 + u11, x1x3 = u11 + u22, x2x3 = v2
    u11, u21, u22, v2 = F(2), F(3), F(5), F(7)
    assert gamma(SPoint.from_vector(2, [u11, u21, u22, v2])).coefficients == [
        u11 * u22 - u11 * u21, u11 * v2 + u11, u11 + u22, v2]


def test_gamma_lands_in_P():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4):
        for _ in range(100):
            s = SPoint.random(n, rng)
            g = gamma_polynomial(s)
            assert g.coefficient((0, n, 0)) == 0 and g.coefficient((0, 0, n)) == 0
            assert len(gamma(s).coefficients) == dimension_check(n)[1]


def test_jacobian_n2_designated_point():
    rep = jacobian(SPoint.from_vector(2, [1, 0, 0, 0]))
    assert rep.determinant == 1 and rep.nonsingular
    assert not jacobian(SPoint.from_vector(2, [0, 0, 0, 0])).nonsingular


def _sympy_jacobian_det(n):
    """Independent oracle: det of the Jacobian of gamma, computed with sympy."""
    x1, x2, x3 = sympy.symbols("x1 x2 x3")
    u = {(i, j): sympy.Symbol(f"u{i}_{j}") for i in range(1, n + 1) for j in range(1, i + 1)}
    v = {j: sympy.Symbol(f"v{j}") for j in range(2, n + 1)}
    Y1, Y2 = sympy.zeros(n), sympy.zeros(n)
    for (i, j), sym in u.items():
        Y1[i - 1, j - 1] = sym
    Y1[0, n - 1] = u[(1, 1)]
    for k in range(1, n):
        Y2[k, k - 1] = -1
    for j, sym in v.items():
        Y2[j - 1, n - 1] = sym
    g = sympy.Poly(sympy.expand((x1 * Y1 + x2 * Y2 + x3 * sympy.eye(n)).det() - x3 ** n), x1, x2, x3)
    coeffs = [g.coeff_monomial(x1 ** a * x2 ** b * x3 ** c) for a, b, c in p_basis(n)]
    params = list(u.values()) + list(v.values())
    J = sympy.Matrix([[sympy.diff(c, q) for q in params] for c in coeffs])
    return J.det(method="berkowitz"), params


@pytest.mark.parametrize("n", [2, 3])
def test_jacobian_determinant_matches_sympy(n):
    det, params = _sympy_jacobian_det(n)
    if n == 2:
        u11, v2 = params[0], params[-1]
        assert sympy.expand(det - u11 * (v2 + 1)) == 0
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = SPoint.random(n, rng)
        value = det.subs({q: sympy.Rational(x.numerator, x.denominator)
                          for q, x in zip(params, s.vector())})
        assert jacobian(s).determinant == F(int(sympy.numer(value)), int(sympy.denom(value)))


def test_jacobian_singular_hyperplanes():
    # u11 = 0 and v2 = -1 are structural zeros of the Jacobian determinant
    rng = np.random.default_rng(5)
    for n in (3, 4):
        for _ in range(5):
            x = SPoint.random(n, rng).vector()
            y = list(x)
            y[0] = F(0)
            assert not jacobian(SPoint.from_vector(n, y)).nonsingular
            y = list(x)
            y[len(y) - n + 1] = F(-1)
            assert not jacobian(SPoint.from_vector(n, y)).nonsingular


def test_jacobian_random_points():
    rng = np.random.default_rng(2)
    for n in (3, 4):
        for _ in range(20):
            s = SPoint.random(n, rng)
            if s.u[(1, 1)] == 0 or s.v[2] == -1:
                continue
            assert jacobian(s).nonsingular


def test_finite_difference_crosscheck():
    rng = np.random.default_rng(3)
    s = SPoint.random(3, rng)
    J = np.array(jacobian(s).matrix, dtype=float)
    d = rng.standard_normal(J.shape[1])
    h = F(1, 10**6)
    x = s.vector()
    plus = gamma(SPoint.from_vector(3, [a + h * F(b) for a, b in zip(x, d)])).coefficients
    minus = gamma(SPoint.from_vector(3, [a - h * F(b) for a, b in zip(x, d)])).coefficients
    fd = np.array([float((p - m) / (2 * h)) for p, m in zip(plus, minus)])
    assert np.allclose(fd, J @ d, rtol=1e-6, atol=1e-6 * np.abs(J @ d).max())


def test_closed_form_examples_n2():
    sym = symbolic_derivatives(2)
    vars = sym["v2"].vars
    x1, x2, x3, u11 = (MultiPoly.variable(vars, v) for v in ("x1", "x2", "x3", "u1_1"))
    assert sym["v2"] == x2 * (u11 * x1 + x3)
    assert sym["u2_1"] == -(u11 * x1 ** 2)
    assert closed_form_derivatives(2)["u2_1"] == sym["u2_1"]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_verify_closed_forms(n):
    rep = verify_closed_forms(n)
    assert rep["v"] and rep["u_diag"] and rep["u_lower"] and not rep["mismatches"]


def test_guards():
    with pytest.raises(CostGuard):
        verify_closed_forms(5)
    with pytest.raises(CostGuard):
        jacobian(SPoint.random(6, np.random.default_rng(0)))
    with pytest.raises(ValueError):
        SPoint.from_vector(2, [1, 2, 3])


def test_report_roundtrip():
    rep = jacobian(SPoint.random(3, np.random.default_rng(4)))
    back = JacobianReport.from_dict(rep.to_dict())
    assert back.to_dict() == rep.to_dict()
    assert back.point.vector() == rep.point.vector()
