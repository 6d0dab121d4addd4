from fractions import Fraction

import numpy as np
import pytest
import sympy

from trank import exact

from conftest import rational_matrix


def test_det_rank_inverse_against_sympy(rng):
    for trial in range(60):
        n = int(rng.integers(1, 6))
        M = rational_matrix(rng, n, n, bound=5)
        if trial % 5 == 0 and n > 1:
            M[-1] = M[0] * Fraction(2, 3)  # force singularity
        rows = M.tolist()
        S = sympy.Matrix(rows)
        assert exact.det(rows) == Fraction(str(S.det()))
        assert exact.rank(rows) == S.rank()
        if S.det() != 0:
            inv = exact.inverse(rows)
            assert exact.matmul(inv, rows) == exact.identity(n)
        else:
            with pytest.raises(ZeroDivisionError):
                exact.inverse(rows)


def test_rectangular_rank(rng):
    for _ in range(30):
        r, c = (int(x) for x in rng.integers(1, 7, size=2))
        M = rational_matrix(rng, r, c, bound=3)
        assert exact.rank(M.tolist()) == sympy.Matrix(M.tolist()).rank()


def test_modular_rank_is_lower_bound(rng):
    for _ in range(30):
        r, c = (int(x) for x in rng.integers(1, 7, size=2))
        rows = rational_matrix(rng, r, c, bound=4).tolist()
        assert exact.rank_mod_p(rows) <= exact.rank(rows)
    assert exact.rank_mod_p([[2, 4], [1, 2]]) == 1
    assert exact.rank_mod_p([[1, 0], [0, 7]], p=7) == 1
