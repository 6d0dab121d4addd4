"""Certificate predicates for the genericity conditions of the completion proof.

Notation follows the completion module: ``Xs`` are the m slices (n x p) of
the reoriented tensor, ``A`` and ``b`` come from stacking the first m-1 of
them, and ``Zs`` is the tuple of n x n blocks of ``(X_m A^-1, 0)``.

Conditions checked by :func:`in_T_frak`:

cd1  ``|A| != 0``
cd2  the leading (n-1)-minor of ``Z_{m-1}`` is nonzero
cd3  that leading block has distinct eigenvalues
cd4  ``Z_k`` lies in W for ``k <= m-2``
cd5  ``|sum_{k<=m-2} x_k Z_k - x_m E_n|`` is irreducible (m > 3); for m = 3
     it is replaced by irreducibility of the full pencil over k <= m-1.

All "nonzero" tests in Float64 follow the tolerance policy
``|x| > eps * scale``.  Irreducibility is certified one-sidedly: a failed
certificate yields the status ``uncertified``, never ``fail``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .irreducible import IrreducibilityCertificate, absolutely_irreducible
from .poly import pencil_determinant
from .tensor import DEFAULT_EPS, Tensor3, hadamard_bound, max_abs, rationalize

PASS = "pass"
FAIL = "fail"
UNCERTIFIED = "uncertified"
SKIPPED = "skipped"

EIGEN_GAP_TOL = 1e-9

ODD_N = "OddN"
SIMPLE_ROOT = "SimpleRootSignChange"
RANDOM_SEARCH = "RandomSearch"


@dataclass
class Verdict:
    name: str
    status: str
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": _jsonable(self.detail)}

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(d["name"], d["status"], dict(d.get("detail", {})))


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_dict"):
        return x.to_dict()
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _float(M) -> np.ndarray:
    return np.asarray(M).astype(np.float64)


def _complex_pairs(vals) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in vals]


def _min_gap(vals) -> float:
    vals = np.asarray(vals)
    if vals.size < 2:
        return float("inf")
    diffs = np.abs(vals[:, None] - vals[None, :])
    diffs[np.diag_indices(vals.size)] = np.inf
    return float(diffs.min())


def _eigen_scale(vals, M) -> float:
    s = max(float(np.max(np.abs(vals))) if np.size(vals) else 0.0, max_abs(M))
    return s if s > 0 else 1.0


# ---------------------------------------------------------------------------
# cd1 - cd3
# ---------------------------------------------------------------------------

def check_cd1(A, eps: float = DEFAULT_EPS) -> Verdict:
    """``|A| != 0`` relative to the Hadamard bound of ``A``."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"cd1 needs a square matrix, got shape {A.shape}")
    Af = _float(A)
    d = float(np.linalg.det(Af))
    scale = hadamard_bound(Af)
    return Verdict("cd1", PASS if abs(d) > eps * scale else FAIL,
                   {"det": d, "scale": scale})


def _leading_block(Z) -> np.ndarray:
    Z = _float(Z)
    n = Z.shape[0]
    if Z.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {Z.shape}")
    if n < 2:
        raise ValueError("need n >= 2")
    return Z[:n - 1, :n - 1]


def check_cd2(Z, eps: float = DEFAULT_EPS) -> Verdict:
    B = _leading_block(Z)
    d = float(np.linalg.det(B))
    scale = hadamard_bound(B)
    return Verdict("cd2", PASS if abs(d) > eps * scale else FAIL,
                   {"minor": d, "scale": scale})


def check_cd3(Z, gap_tol: float = EIGEN_GAP_TOL) -> Verdict:
    B = _leading_block(Z)
    vals = np.linalg.eigvals(B)
    gap = _min_gap(vals)
    rel = gap / _eigen_scale(vals, B)
    return Verdict("cd3", PASS if rel > gap_tol else FAIL,
                   {"eigenvalues": _complex_pairs(vals), "relative_gap": rel})


# ---------------------------------------------------------------------------
# W
# ---------------------------------------------------------------------------

@dataclass
class WCertificate:
    eigenvalues: list
    min_gap: float
    min_modulus: float
    complex_P: bool
    member: bool

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues, "min_gap": self.min_gap,
                "min_modulus": self.min_modulus, "complex_P": self.complex_P,
                "member": self.member}

    @classmethod
    def from_dict(cls, d: dict) -> "WCertificate":
        return cls(d["eigenvalues"], d["min_gap"], d["min_modulus"], d["complex_P"], d["member"])


def in_W(Z, eps: float = DEFAULT_EPS, gap_tol: float = EIGEN_GAP_TOL) -> tuple[bool, WCertificate]:
    """Membership of the n x n matrix ``Z = [[A1, A2], [A3, A4]]`` in W.

    ``A1`` is the leading (n-1) x (n-1) block and ``A2`` the column next to
    it.  ``Z`` is in W when ``A1`` has distinct (complex) eigenvalues and,
    for ``P`` diagonalizing ``A1``, no entry of ``P^-1 A2`` vanishes.
    Rescaling the columns of ``P`` rescales those entries by nonzero
    factors, so the verdict does not depend on the eigenvector normalization
    (numpy's unit columns are used for the reported moduli).
    """
    Z = _float(Z)
    n = Z.shape[0]
    if Z.shape != (n, n) or n < 2:
        raise ValueError(f"in_W needs a square matrix of size >= 2, got {Z.shape}")
    A1, A2 = Z[:n - 1, :n - 1], Z[:n - 1, n - 1]
    vals, P = np.linalg.eig(A1)
    gap = _min_gap(vals)
    rel_gap = gap / _eigen_scale(vals, A1)
    complex_P = bool(np.any(np.abs(np.imag(P)) > 0))
    try:
        w = np.linalg.solve(P, A2.astype(complex))
        min_mod = float(np.min(np.abs(w)))
    except np.linalg.LinAlgError:
        min_mod = 0.0
    scale = max_abs(Z) or 1.0
    member = bool(rel_gap > gap_tol and min_mod > eps * scale)
    return member, WCertificate(_complex_pairs(vals), gap, min_mod, complex_P, member)


# ---------------------------------------------------------------------------
# cone condition
# ---------------------------------------------------------------------------

@dataclass
class ConeCertificate:
    witness: list
    value: float
    method: str
    scale: float = 1.0

    def to_dict(self) -> dict:
        return {"witness": list(self.witness), "value": self.value, "method": self.method,
                "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> "ConeCertificate":
        return cls(list(d["witness"]), d["value"], d["method"], d.get("scale", 1.0))

    def verify(self, Ys, eps: float = DEFAULT_EPS) -> bool:
        """Re-evaluate the determinant at the stored witness."""
        value, scale = cone_value(Ys, self.witness)
        return value < -eps * scale


def _pencil_matrix(Ys, a) -> np.ndarray:
    n = Ys[0].shape[0]
    M = -a[-1] * np.eye(n)
    for ak, Y in zip(a[:-1], Ys):
        M = M + ak * Y
    return M


def cone_value(Ys, a) -> tuple[float, float]:
    """``det(sum a_k Y_k - a_m E)`` and its Hadamard scale."""
    Ys = [_float(Y) for Y in Ys]
    a = np.asarray(a, dtype=np.float64)
    if a.size != len(Ys) + 1:
        raise ValueError("witness length must be the number of matrices plus one")
    M = _pencil_matrix(Ys, a)
    return float(np.linalg.det(M)), hadamard_bound(M)


def in_cone(Ys: Sequence, seed: int = 0, samples: int = 256, steps: int = 100,
            eps: float = DEFAULT_EPS) -> tuple[bool, ConeCertificate]:
    """Search for ``a`` with ``det(sum_k a_k Y_k - a_m E_n) < 0``.

    Phases: odd n (``a = e_m``); a simple real eigenvalue of some ``Y_k``,
    stepped across the sign change of the characteristic polynomial; seeded
    random sampling on the unit sphere followed by a local descent.  A
    witness counts only if the value is below ``-eps`` times the Hadamard
    bound of the pencil matrix.
    """
    Ys = [_float(Y) for Y in Ys]
    n = Ys[0].shape[0]
    if any(Y.shape != (n, n) for Y in Ys):
        raise ValueError("cone check needs equal square matrices")
    k_all = len(Ys) + 1

    def accept(a):
        v, s = cone_value(Ys, a)
        return v < -eps * s, v, s

    if n % 2:
        a = [0.0] * (k_all - 1) + [1.0]
        ok, v, s = accept(a)
        return True, ConeCertificate(a, v, ODD_N, s)

    for k, Y in enumerate(Ys):
        vals = np.linalg.eigvals(Y)
        scale = _eigen_scale(vals, Y)
        for i, lam in enumerate(vals):
            if abs(lam.imag) > 1e-12 * scale:
                continue
            others = np.delete(vals, i)
            dist = float(np.min(np.abs(others - lam))) if others.size else scale
            if dist <= EIGEN_GAP_TOL * scale:
                continue
            delta = 0.5 * dist
            for shift in (delta, -delta):
                a = [0.0] * k_all
                a[k] = 1.0
                a[-1] = float(lam.real) + shift
                ok, v, s = accept(a)
                if ok:
                    return True, ConeCertificate(a, v, SIMPLE_ROOT, s)

    rng = np.random.default_rng(seed)
    best_a, best_v = None, np.inf

    def normalized_value(a):
        v, s = cone_value(Ys, a)
        return v / s if s > 0 else 0.0

    for _ in range(samples):
        a = rng.standard_normal(k_all)
        a /= np.linalg.norm(a)
        v = normalized_value(a)
        if v < best_v:
            best_a, best_v = a, v
    step = 0.5
    for _ in range(steps):
        if best_v < -eps:
            break
        cand = best_a + step * rng.standard_normal(k_all)
        cand /= np.linalg.norm(cand)
        v = normalized_value(cand)
        if v < best_v:
            best_a, best_v = cand, v
        else:
            step *= 0.8
    ok, v, s = accept(best_a)
    return ok, ConeCertificate([float(x) for x in best_a], v, RANDOM_SEARCH, s)


# ---------------------------------------------------------------------------
# irreducibility conditions and W2
# ---------------------------------------------------------------------------

def pencil_irreducibility(Zs: Sequence, trials: int = 3, seed: int = 0,
                          vars: Sequence[str] | None = None) -> IrreducibilityCertificate:
    """Certificate for ``|sum_k x_k Z_k - x_last E_n|``; floats are rationalized."""
    mats = [rationalize(np.asarray(Z)) for Z in Zs]
    return absolutely_irreducible(pencil_determinant(mats, vars), trials=trials, seed=seed)


def _irreducibility_verdict(name: str, cert: IrreducibilityCertificate) -> Verdict:
    return Verdict(name, PASS if cert.certified else UNCERTIFIED, {"irreducibility": cert})


def check_cd5(Zs: Sequence, m: int, trials: int = 3, seed: int = 0) -> Verdict:
    """Irreducibility of the pencil in ``Z_1 .. Z_{m-2}`` (m > 3 only)."""
    if m <= 3:
        raise ValueError("condition cd5 is only used for m > 3; for m = 3 use check_char_poly, "
                         "the irreducibility of the full pencil in Z_1, Z_2")
    if len(Zs) < m - 2:
        raise ValueError(f"need at least {m - 2} matrices")
    names = [f"x{k + 1}" for k in range(m - 2)] + [f"x{m}"]
    return _irreducibility_verdict("cd5", pencil_irreducibility(Zs[:m - 2], trials, seed, names))


def check_char_poly(Zs: Sequence, trials: int = 3, seed: int = 0) -> Verdict:
    """Irreducibility of ``|sum_{k<=m-1} x_k Z_k - x_m E_n|`` (replaces cd5 when m = 3)."""
    return _irreducibility_verdict("cd5", pencil_irreducibility(Zs, trials, seed))


@dataclass
class W2Certificate:
    w: list
    irreducibility: IrreducibilityCertificate | None
    member: bool

    def to_dict(self) -> dict:
        return {"w": [c.to_dict() for c in self.w],
                "irreducibility": None if self.irreducibility is None else self.irreducibility.to_dict(),
                "member": self.member}

    @classmethod
    def from_dict(cls, d: dict) -> "W2Certificate":
        irr = d.get("irreducibility")
        return cls([WCertificate.from_dict(c) for c in d["w"]],
                   None if irr is None else IrreducibilityCertificate.from_dict(irr), d["member"])


def in_W2(Zs: Sequence, trials: int = 3, seed: int = 0,
          eps: float = DEFAULT_EPS) -> tuple[bool, W2Certificate]:
    """Every ``Z_k`` in W and the full pencil determinant certified irreducible.

    The costly irreducibility test is skipped when some ``Z_k`` is not in W.
    """
    certs = [in_W(Z, eps)[1] for Z in Zs]
    if not all(c.member for c in certs):
        return False, W2Certificate(certs, None, False)
    irr = pencil_irreducibility(Zs, trials, seed)
    return irr.certified, W2Certificate(certs, irr, irr.certified)


# ---------------------------------------------------------------------------
# the set T
# ---------------------------------------------------------------------------

@dataclass
class GenericityReport:
    cd1: Verdict
    cd2: Verdict
    cd3: Verdict
    cd4: Verdict
    cd5: Verdict
    m: int = 0
    n: int = 0

    @property
    def conditions(self) -> list[Verdict]:
        return [self.cd1, self.cd2, self.cd3, self.cd4, self.cd5]

    @property
    def overall(self) -> bool:
        return all(v.ok for v in self.conditions)

    def first_failure(self) -> Verdict | None:
        return next((v for v in self.conditions if v.status == FAIL), None)

    def to_dict(self) -> dict:
        d = {f"cd{i + 1}": v.to_dict() for i, v in enumerate(self.conditions)}
        d.update(m=self.m, n=self.n, overall=self.overall)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenericityReport":
        return cls(*(Verdict.from_dict(d[f"cd{i}"]) for i in range(1, 6)), d.get("m", 0), d.get("n", 0))


def in_T_frak(Xs, eps: float = DEFAULT_EPS, trials: int = 3, seed: int = 0) -> GenericityReport:
    """Evaluate cd1 - cd5 for the slices ``X_1 .. X_m`` (each n x p, p = (m-1)n - 1).

    ``Xs`` may also be an n x p x m :class:`Tensor3`.
    """
    from .completion import split_stack, z_tuple

    if isinstance(Xs, Tensor3):
        Xs = Xs.slices()
    Xs = [_float(X) for X in Xs]
    m = len(Xs)
    n, p = Xs[0].shape
    if m < 3 or p != (m - 1) * n - 1 or any(X.shape != (n, p) for X in Xs):
        raise ValueError(f"expected m >= 3 slices of shape n x ((m-1)n-1), got {m} of {Xs[0].shape}")
    split = split_stack(Xs[:-1])
    cd1 = check_cd1(split.A, eps)
    if not cd1.ok:
        skip = {"reason": "A is singular"}
        return GenericityReport(cd1, *(Verdict(f"cd{i}", SKIPPED, dict(skip)) for i in range(2, 6)), m, n)
    Zs = z_tuple(split, Xs[-1])
    cd2 = check_cd2(Zs[-1], eps)
    cd3 = check_cd3(Zs[-1])
    wcerts = [in_W(Z, eps)[1] for Z in Zs[:m - 2]]
    cd4 = Verdict("cd4", PASS if all(c.member for c in wcerts) else FAIL, {"w": wcerts})
    if m > 3:
        cd5 = check_cd5(Zs, m, trials, seed)
    else:
        cd5 = check_char_poly(Zs, trials, seed)
        cd5.detail["replacement"] = "m = 3: full pencil over Z_1, Z_2"
    return GenericityReport(cd1, cd2, cd3, cd4, cd5, m, n)
