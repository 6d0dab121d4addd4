import numpy as np
import pytest

from trank.completion import split_stack, z_tuple
from trank.genericity import (FAIL, ODD_N, PASS, SIMPLE_ROOT, SKIPPED, UNCERTIFIED, ConeCertificate,
                              GenericityReport, W2Certificate, check_cd1, check_cd2, check_cd3,
                              check_cd5, check_char_poly, cone_value, in_cone, in_T_frak, in_W,
                              in_W2)


def test_cd1():
    assert check_cd1(np.eye(3)).status == PASS
    A = np.array([[1.0, 2, 3], [1, 2, 3], [0, 1, 5]])
    assert check_cd1(A).status == FAIL
    with pytest.raises(ValueError):
        check_cd1(np.ones((2, 3)))


def test_cd1_random():
    rng = np.random.default_rng(5)
    assert all(check_cd1(rng.standard_normal((5, 5))).ok for _ in range(1000))


def test_cd2_cd3_examples():
    Z = np.diag([1.0, 2.0, 0.0])
    assert check_cd2(Z).ok and check_cd3(Z).ok
    assert check_cd2(Z).detail["minor"] == pytest.approx(2)
    Z2 = np.array([[1.0, 0, 5], [0, 1, 2], [3, 4, 0]])
    assert not check_cd3(Z2).ok
    with pytest.raises(ValueError):
        check_cd2(np.ones((1, 1)))


def test_cd2_cd3_random():
    rng = np.random.default_rng(6)
    ok = sum(check_cd2(Z).ok and check_cd3(Z).ok
             for Z in (rng.standard_normal((4, 4)) for _ in range(1000)))
    assert ok >= 999


def test_in_W_examples():
    assert in_W(np.array([[1.0, 1], [0, 0]]))[0]
    assert not in_W(np.array([[1.0, 0], [2, 3]]))[0]
    Z = np.array([[0.0, 1, 1], [1, 0, 0], [5, 6, 7]])
    ok, cert = in_W(Z)
    assert ok and not cert.complex_P


def test_in_W_complex_eigenvalues_allowed():
    Z = np.array([[0.0, -1, 1], [1, 0, 2], [0, 0, 0]])
    ok, cert = in_W(Z)
    assert ok and cert.complex_P


def test_in_W_invariant_under_eigenvector_scaling():
    rng = np.random.default_rng(7)
    for _ in range(20):
        Z = rng.standard_normal((4, 4))
        A1, A2 = Z[:3, :3], Z[:3, 3]
        vals, P = np.linalg.eig(A1)
        D = np.diag(rng.uniform(0.1, 10, 3) * rng.choice([-1, 1], 3))
        w1 = np.linalg.solve(P, A2)
        w2 = np.linalg.solve(P @ D, A2)
        assert (np.abs(w1) > 1e-12).all() == (np.abs(w2) > 1e-12).all()
        assert in_W(Z)[0] == in_W(Z * 3.0)[0]


def test_cone_examples():
    ok, cert = in_cone([np.random.default_rng(0).standard_normal((3, 3))])
    assert ok and cert.method == ODD_N
    ok, cert = in_cone([np.diag([1.0, -1.0])])
    assert ok and cert.value < 0
    assert cone_value([np.diag([1.0, -1.0])], [1, 0])[0] == pytest.approx(-1)
    ok, cert = in_cone([np.zeros((2, 2))])
    assert not ok


def test_cone_certificates_reverify():
    rng = np.random.default_rng(8)
    for _ in range(30):
        Ys = [rng.standard_normal((4, 4)) for _ in range(2)]
        ok, cert = in_cone(Ys, seed=1)
        if ok:
            v, s = cone_value(Ys, cert.witness)
            assert v == pytest.approx(cert.value, rel=1e-9) and v < 0
            assert cert.verify(Ys)
            assert ConeCertificate.from_dict(cert.to_dict()) == cert


def test_simple_root_device():
    # last column zero and nonsingular leading minor: lambda divides the
    # characteristic polynomial exactly once
    rng = np.random.default_rng(9)
    Z = rng.standard_normal((4, 4))
    Z[:, -1] = 0
    coeffs = np.poly(Z)
    assert abs(coeffs[-1]) < 1e-12 and abs(coeffs[-2]) > 1e-6
    ok, cert = in_cone([rng.standard_normal((4, 4)), Z])
    assert ok and cert.method in (SIMPLE_ROOT, "RandomSearch")


def test_cd5_block_diagonal_fails():
    B = np.array([[1, 2], [3, -1]])
    Z = np.block([[B, np.zeros((2, 2), int)], [np.zeros((2, 2), int), B]])
    v = check_cd5([Z, Z, np.eye(4)], m=5)
    assert v.status == UNCERTIFIED
    assert check_char_poly([Z, Z]).status == UNCERTIFIED


def test_cd5_m3_is_error():
    with pytest.raises(ValueError, match="check_char_poly"):
        check_cd5([np.eye(3), np.eye(3)], m=3)


def test_cd5_random_integer():
    rng = np.random.default_rng(10)
    ok = sum(check_char_poly([rng.integers(-9, 10, (3, 3)) for _ in range(2)], seed=s).ok
             for s in range(100))
    assert ok >= 99


def test_cd5_extends_to_appended_matrix():
    rng = np.random.default_rng(11)
    Zs = [rng.integers(-9, 10, (3, 3)) for _ in range(2)]
    assert check_cd5(Zs + [np.eye(3)], m=4).ok
    ok = sum(check_char_poly(Zs + [rng.integers(-9, 10, (3, 3))], seed=s).ok for s in range(50))
    assert ok >= 49


def test_in_W2_roundtrip():
    rng = np.random.default_rng(12)
    ok, cert = in_W2([rng.standard_normal((3, 3)) for _ in range(2)])
    assert ok
    assert W2Certificate.from_dict(cert.to_dict()).to_dict() == cert.to_dict()


def gaussian_slices(rng, m, n):
    p = (m - 1) * n - 1
    return [rng.standard_normal((n, p)) for _ in range(m)]


def test_in_T_frak_random_44():
    rng = np.random.default_rng(13)
    ok = sum(in_T_frak(gaussian_slices(rng, 4, 4), seed=s).overall for s in range(100))
    assert ok >= 95


def test_in_T_frak_singular_A():
    rng = np.random.default_rng(14)
    Xs = gaussian_slices(rng, 3, 3)
    Xs[0][1] = Xs[0][0]
    rep = in_T_frak(Xs)
    assert rep.cd1.status == FAIL and not rep.overall
    assert rep.cd5.status == SKIPPED
    assert rep.first_failure().name == "cd1"


def test_in_T_frak_m3_uses_full_pencil():
    rng = np.random.default_rng(15)
    rep = in_T_frak(gaussian_slices(rng, 3, 3))
    assert rep.overall and "replacement" in rep.cd5.detail
    assert GenericityReport.from_dict(rep.to_dict()).to_dict() == rep.to_dict()


def test_in_T_frak_shape_error():
    with pytest.raises(ValueError):
        in_T_frak([np.ones((3, 4))] * 3)
