from fractions import Fraction

import numpy as np
import pytest

from trank import tensor as tc
from trank.completion import (CompletionReport, RankCertificate, certify_rank_equals_p0,
                              complete_with_certificate, erase_appended, map_f, map_g, reorient,
                              split_stack, z_tuple)
from trank.errors import GenericityFailed, NotInV1, SearchExhausted, WrongShape
from trank.estimation import als_fit
from trank.genericity import SIMPLE_ROOT, in_cone
from trank.tensor import RATIONAL, Tensor3

from conftest import rational_matrix


def rational_slices(rng, m, n):
    p = (m - 1) * n - 1
    while True:
        Xs = [rational_matrix(rng, n, p) for _ in range(m)]
        try:
            tc.inverse(split_stack(Xs[:-1]).A)
            return Xs
        except ZeroDivisionError:
            continue


def test_split_stack_layout(rng):
    Xs = rational_slices(rng, 3, 2)
    s = split_stack(Xs[:2])
    assert s.A.shape == (3, 3) and s.b.shape == (3,)
    assert (s.stacked() == np.vstack(Xs[:2])).all()
    assert (s.A == np.vstack(Xs[:2])[:3]).all()
    with pytest.raises(WrongShape):
        split_stack([np.ones((2, 3))] * 3)


def test_map_g_hand_assembly(rng):
    Xs = rational_slices(rng, 3, 2)
    c = [Fraction(1, 2), Fraction(-3)]
    Y = map_g(Xs, c)
    assert Y.dims == (2, 4, 3) and Y.mode == RATIONAL
    assert Y.slice(1)[:, 3].tolist() == [0, 0]
    assert Y.slice(2)[:, 3].tolist() == [0, 1]
    assert Y.slice(3)[:, 3].tolist() == c
    assert erase_appended(Y) == tc.from_slices(Xs)


def test_map_f_identity_case():
    n, m = 2, 3
    p0 = (m - 1) * n
    F = np.eye(p0)
    Ym = np.arange(n * p0, dtype=float).reshape(n, p0)
    Y = tc.from_slices([F[:n], F[n:], Ym])
    Z = map_f(Y)
    assert np.array_equal(Z[0], Ym[:, :2]) and np.array_equal(Z[1], Ym[:, 2:])


def test_map_f_singular():
    with pytest.raises(NotInV1):
        map_f(Tensor3(np.zeros((2, 4, 3))))
    with pytest.raises(NotInV1):
        certify_rank_equals_p0(Tensor3(np.zeros((3, 6, 3))))


@pytest.mark.parametrize("m,n", [(3, 2), (3, 3), (4, 3)])
def test_exact_identities(rng, m, n):
    for _ in range(5):
        Xs = rational_slices(rng, m, n)
        split = split_stack(Xs[:-1])
        Ainv = tc.inverse(split.A)
        Z = map_f(map_g(Xs))
        expected = list(tc.fl2_inv(np.hstack([tc.matmul(Xs[-1], Ainv),
                                              np.array([[Fraction(0)]] * n, dtype=object)]),
                                   m - 1).slices())
        assert all((a == b).all() for a, b in zip(Z, expected))
        c = rational_matrix(rng, n, 1)[:, 0]
        Zc = map_f(map_g(Xs, c))
        top = tc.matmul(Xs[-1] - tc.matmul(c.reshape(-1, 1), split.b.reshape(1, -1)), Ainv)
        expected = tc.fl2_inv(np.hstack([top, c.reshape(-1, 1)]), m - 1).slices()
        assert all((a == b).all() for a, b in zip(Zc, expected))
        assert all((a == b).all() for a, b in zip(Zc, z_tuple(split, Xs[-1], c)))


def test_completed_determinant_equals_A(rng):
    Xs = rational_slices(rng, 4, 3)
    c = rational_matrix(rng, 3, 1)[:, 0]
    Y = map_g(Xs, c)
    F = tc.fl1(tc.from_slices(Y.slices()[:-1]))
    assert tc.det(F) == tc.det(split_stack(Xs[:-1]).A)


def test_char_poly_simple_root_at_zero(rng):
    Xs = [X.astype(float) for X in rational_slices(rng, 3, 3)]
    Z = z_tuple(split_stack(Xs[:-1]), Xs[-1])[-1]
    coeffs = np.poly(Z)
    assert abs(coeffs[-1]) < 1e-9 and abs(coeffs[-2]) > 1e-6
    assert in_cone(z_tuple(split_stack(Xs[:-1]), Xs[-1]))[0]


def test_simple_root_cone_on_g_image():
    rng = np.random.default_rng(4)
    Xs = [rng.standard_normal((4, 7)) for _ in range(3)]
    Zs = z_tuple(split_stack(Xs[:-1]), Xs[-1])
    ok, cert = in_cone(Zs)
    assert ok and cert.method == SIMPLE_ROOT


def test_reorient():
    T = Tensor3(np.zeros((5, 3, 3)))
    X, perm, dims = reorient(T)
    assert dims == (3, 3, 5) and X.dims == (3, 5, 3)
    assert tc.permute_modes(X, tc.inverse_permutation(perm)) == T
    with pytest.raises(WrongShape):
        reorient(Tensor3(np.zeros((3, 3, 6))))


@pytest.mark.parametrize("dims", [(3, 3, 5), (4, 4, 11)])
def test_complete_gaussian(dims):
    T = Tensor3(np.random.default_rng(sum(dims)).standard_normal(dims))
    rep = complete_with_certificate(T, seed=0)
    assert rep.certified and rep.c_norm <= 0.5 * rep.scale + 1e-12
    assert rep.p0 == dims[-1] + 1 and rep.conclusion == f"rank <= {rep.p0}"
    assert isinstance(certify_rank_equals_p0(rep.completed), RankCertificate)
    X, _, _ = reorient(T)
    assert erase_appended(rep.completed) == X
    assert als_fit(rep.completed, rep.p0, seed=0).residual < 1e-6
    back = CompletionReport.from_dict(rep.to_dict())
    assert back.to_dict() == rep.to_dict()


def test_complete_singular_stack():
    rng = np.random.default_rng(3)
    T = rng.standard_normal((3, 5, 3))  # n x p x m orientation
    T[1, :, 0] = T[0, :, 0]
    with pytest.raises(GenericityFailed) as e:
        complete_with_certificate(Tensor3(T.transpose(2, 0, 1)))
    assert e.value.condition == "cd1"


def test_complete_budget_exhausted():
    T = Tensor3(np.random.default_rng(2).standard_normal((3, 3, 5)))
    with pytest.raises(SearchExhausted):
        complete_with_certificate(T, max_tries=0)


def test_wrong_shape():
    with pytest.raises(WrongShape):
        complete_with_certificate(Tensor3(np.zeros((3, 3, 6))))
