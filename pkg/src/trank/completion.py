"""Slice completion: bound the rank of an m x n x ((m-1)n - 1) tensor by (m-1)n.

The tensor is reoriented to n x p x m with slices ``X_1 .. X_m`` (n x p,
p = (m-1)n - 1).  Stacking ``X_1 .. X_{m-1}`` gives a (p+1) x p matrix whose
first p rows form ``A`` and whose last row is ``b^T``.  Appending one column
to every slice yields an n x p0 x m tensor (p0 = p + 1)::

    slices 1 .. m-2 :  (X_k, 0)
    slice  m-1      :  (X_{m-1}, e_n)
    slice  m        :  (X_m, c)

This is :func:`map_g`.  Its image under :func:`map_f`,
``Y -> Y_m fl1(Y_1..Y_{m-1})^-1`` split into n x n blocks, is
``((X_m - c b^T) A^-1, c)``.

The rank criterion used for the conclusion is imported from earlier work
and is treated as a trusted axiom: a tensor ``Y`` with ``fl1(Y_1..Y_{m-1})``
nonsingular and ``f(Y)`` in the cone set and in W2 has rank exactly p0.
Erasing the appended columns cannot increase rank, so the input has rank at
most p0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import tensor as tc
from .errors import CertificateNotFound, GenericityFailed, NotInV1, SearchExhausted, WrongShape
from .genericity import (
    ConeCertificate,
    GenericityReport,
    W2Certificate,
    in_cone,
    in_T_frak,
    in_W,
    in_W2,
)
from .tensor import DEFAULT_EPS, F64, Tensor3

RANK_AXIOM = ("trusted criterion from prior work: rank Y = p0 for every Y with "
              "fl1(Y_1..Y_{m-1}) nonsingular and f(Y) in C and W2")


@dataclass
class StackSplit:
    A: np.ndarray
    b: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.vstack([self.A, self.b.reshape(1, -1)])


def split_stack(Xs) -> StackSplit:
    """Split the vertical stack of ``X_1 .. X_{m-1}`` into ``A`` and ``b``."""
    Xs = [np.asarray(X) for X in Xs]
    if not Xs:
        raise WrongShape("need at least one slice")
    n, p = Xs[0].shape
    if any(X.shape != (n, p) for X in Xs):
        raise WrongShape("slices must share a shape")
    stack = np.vstack(Xs)
    if stack.shape[0] != p + 1:
        raise WrongShape(f"stack of {len(Xs)} slices has {stack.shape[0]} rows, expected p + 1 = {p + 1}")
    return StackSplit(stack[:p].copy(), stack[p].copy())


def _zero_like(shape, mode) -> np.ndarray:
    if mode == F64:
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def _column(values, mode) -> np.ndarray:
    col = np.asarray(values).reshape(-1, 1)
    return tc.as_matrix(col, mode)


def map_g(Xs, c=None) -> Tensor3:
    """Append one column to every slice (see module docstring).

    ``c = None`` means the zero column.  ``Xs`` may be a list of m matrices
    (n x p) or an n x p x m tensor.
    """
    if isinstance(Xs, Tensor3):
        Xs = Xs.slices()
    Xs = [np.asarray(X) for X in Xs]
    m = len(Xs)
    n, p = Xs[0].shape
    mode = tc.mode_of(Xs[0])
    split_stack(Xs[:-1])  # shape validation
    zero = _zero_like((n, 1), mode)
    unit = zero.copy()
    unit[n - 1, 0] = 1 if mode == F64 else Fraction(1)
    if c is None:
        cc = zero
    else:
        cc = _column(c, mode)
        if cc.shape != (n, 1):
            raise WrongShape(f"c must have length {n}")
    cols = [zero] * (m - 2) + [unit, cc]
    return tc.from_slices([np.hstack([X, col]) for X, col in zip(Xs, cols)], mode)


def map_f(Y: Tensor3) -> list[np.ndarray]:
    """``Y_m fl1(Y_1..Y_{m-1})^-1`` split into m-1 blocks of size n x n."""
    n, p0, m = Y.dims
    if (m - 1) * n != p0:
        raise WrongShape(f"expected an n x (m-1)n x m tensor, got {Y.dims}")
    slices = Y.slices()
    F = tc.fl1(tc.from_slices(slices[:-1], Y.mode))
    if Y.mode == F64 and abs(np.linalg.det(F)) <= DEFAULT_EPS * tc.hadamard_bound(F):
        raise NotInV1("stacked first m-1 slices are singular")
    try:
        Finv = tc.inverse(F)
    except ZeroDivisionError:
        raise NotInV1("stacked first m-1 slices are singular") from None
    W = tc.matmul(slices[-1], Finv)
    return tc.fl2_inv(W, m - 1).slices()


def z_tuple(split: StackSplit, Xm, c=None) -> list[np.ndarray]:
    """The blocks of ``((X_m - c b^T) A^-1, c)`` directly from ``A`` and ``b``."""
    Xm = np.asarray(Xm)
    mode = tc.mode_of(Xm)
    n = Xm.shape[0]
    if c is None:
        cc = _zero_like((n, 1), mode)
    else:
        cc = _column(c, mode)
    top = tc.matmul(Xm - tc.matmul(cc, split.b.reshape(1, -1)), tc.inverse(split.A))
    W = np.hstack([top, cc])
    m1 = W.shape[1] // n
    return tc.fl2_inv(W, m1).slices()


def reorient(T: Tensor3) -> tuple[Tensor3, tuple[int, int, int], tuple[int, int, int]]:
    """Sort the dims to (m, n, p) and permute to n x p x m.

    Returns the reoriented tensor, the permutation applied (output mode i is
    input mode perm[i]) and the sorted dims.
    """
    order = sorted(range(3), key=lambda i: T.dims[i])
    m, n, p = (T.dims[i] for i in order)
    if not (3 <= m <= n and p == (m - 1) * n - 1):
        raise WrongShape(f"need dims m x n x ((m-1)n-1) with 3 <= m <= n, got {T.dims}")
    perm = (order[1] + 1, order[2] + 1, order[0] + 1)
    return tc.permute_modes(T, perm), perm, (m, n, p)


@dataclass
class RankCertificate:
    v1_det: float
    v1_scale: float
    cone: ConeCertificate | None
    w2: W2Certificate | None
    certified: bool
    p0: int
    claim: str = ""
    axiom: str = RANK_AXIOM

    def to_dict(self) -> dict:
        return {"v1_det": self.v1_det, "v1_scale": self.v1_scale,
                "cone": None if self.cone is None else self.cone.to_dict(),
                "w2": None if self.w2 is None else self.w2.to_dict(),
                "certified": self.certified, "p0": self.p0, "claim": self.claim,
                "axiom": self.axiom}

    @classmethod
    def from_dict(cls, d: dict) -> "RankCertificate":
        return cls(d["v1_det"], d["v1_scale"],
                   None if d["cone"] is None else ConeCertificate.from_dict(d["cone"]),
                   None if d["w2"] is None else W2Certificate.from_dict(d["w2"]),
                   d["certified"], d["p0"], d.get("claim", ""), d.get("axiom", RANK_AXIOM))


def certify_rank_equals_p0(Y: Tensor3, seed: int = 0, trials: int = 3,
                           eps: float = DEFAULT_EPS) -> RankCertificate:
    """Check the hypotheses of the trusted rank criterion for ``Y`` (n x p0 x m).

    Raises :class:`NotInV1` or :class:`CertificateNotFound`; on success the
    returned certificate asserts ``rank Y = p0``.
    """
    n, p0, m = Y.dims
    if (m - 1) * n != p0:
        raise WrongShape(f"expected an n x (m-1)n x m tensor, got {Y.dims}")
    Yf = Y if Y.mode == F64 else Tensor3(Y.array.astype(np.float64))
    F = tc.fl1(tc.from_slices(Yf.slices()[:-1]))
    d = float(np.linalg.det(F))
    scale = tc.hadamard_bound(F)
    if not abs(d) > eps * scale:
        raise NotInV1(f"|fl1(Y_1..Y_m-1)| = {d:.3e} is zero at scale {scale:.3e}")
    Zs = map_f(Yf)
    ok_cone, cone = in_cone(Zs, seed=seed, eps=eps)
    if not ok_cone:
        raise CertificateNotFound(f"no cone witness found (best value {cone.value:.3e})")
    ok_w2, w2 = in_W2(Zs, trials=trials, seed=seed, eps=eps)
    if not ok_w2:
        raise CertificateNotFound("W2 membership not certified")
    return RankCertificate(d, scale, cone, w2, True, p0, f"rank = {p0}")


@dataclass
class CompletionReport:
    dims: tuple
    sorted_dims: tuple
    p0: int
    permutation: tuple
    c: list
    c_norm: float
    scale: float
    level: int
    direction: int
    tries: int
    completed: Tensor3
    Z: list
    genericity: GenericityReport
    cone: ConeCertificate
    w2: W2Certificate
    recheck: RankCertificate
    certified: bool
    conclusion: str
    axiom: str = RANK_AXIOM
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims), "sorted_dims": list(self.sorted_dims), "p0": self.p0,
            "permutation": list(self.permutation), "c": [float(x) for x in self.c],
            "c_norm": self.c_norm, "scale": self.scale, "level": self.level,
            "direction": self.direction, "tries": self.tries,
            "completed": self.completed.to_dict(),
            "Z": [np.asarray(z, dtype=np.float64).tolist() for z in self.Z],
            "genericity": self.genericity.to_dict(), "cone": self.cone.to_dict(),
            "w2": self.w2.to_dict(), "recheck": self.recheck.to_dict(),
            "certified": self.certified, "conclusion": self.conclusion,
            "axiom": self.axiom, "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompletionReport":
        return cls(tuple(d["dims"]), tuple(d["sorted_dims"]), d["p0"], tuple(d["permutation"]),
                   list(d["c"]), d["c_norm"], d["scale"], d["level"], d["direction"], d["tries"],
                   Tensor3.from_dict(d["completed"]), [np.array(z) for z in d["Z"]],
                   GenericityReport.from_dict(d["genericity"]), ConeCertificate.from_dict(d["cone"]),
                   W2Certificate.from_dict(d["w2"]), RankCertificate.from_dict(d["recheck"]),
                   d["certified"], d["conclusion"], d.get("axiom", RANK_AXIOM), d.get("seed", 0))


def complete_with_certificate(T: Tensor3, seed: int = 0, levels: int = 11, directions: int = 16,
                              base_radius: float = 0.5, max_tries: int | None = None,
                              trials: int = 3, eps: float = DEFAULT_EPS) -> CompletionReport:
    """Find ``c`` so that ``map_g(X, c)`` carries a full rank certificate.

    Candidate perturbations are ``base_radius * 2^-j * scale * u`` for
    levels ``j = 0 .. levels-1`` and ``directions`` seeded random unit
    vectors ``u`` per level; ``scale`` is the largest entry of
    ``X_m A^-1``.  The first candidate whose blocks are all in W, lie in the
    cone set and have a certified irreducible pencil is accepted, and the
    completed tensor is then re-certified from scratch.

    Rational input is converted to Float64.
    """
    if T.mode != F64:
        T = Tensor3(T.array.astype(np.float64))
    X, perm, (m, n, p) = reorient(T)
    Xs = X.slices()
    report = in_T_frak(Xs, eps=eps, trials=trials, seed=seed)
    failure = report.first_failure()
    if failure is not None:
        raise GenericityFailed(failure.name, report)

    split = split_stack(Xs[:-1])
    Z0 = z_tuple(split, Xs[-1])
    scale = tc.max_abs(np.hstack(Z0)) or 1.0
    rng = np.random.default_rng([seed, 1])
    tries = 0
    for level in range(levels):
        radius = base_radius * 2.0 ** (-level) * scale
        for direction in range(directions):
            if max_tries is not None and tries >= max_tries:
                raise SearchExhausted(f"no certified perturbation within {max_tries} tries", tries)
            tries += 1
            u = rng.standard_normal(n)
            c = radius * u / np.linalg.norm(u)
            Zs = z_tuple(split, Xs[-1], c)
            if not all(in_W(Z, eps)[0] for Z in Zs):
                continue
            ok, cone = in_cone(Zs, seed=seed, eps=eps)
            if not ok:
                continue
            ok, w2 = in_W2(Zs, trials=trials, seed=seed + tries, eps=eps)
            if not ok:
                continue
            completed = map_g(Xs, c)
            try:
                recheck = certify_rank_equals_p0(completed, seed=seed + tries, trials=trials, eps=eps)
            except (NotInV1, CertificateNotFound):
                continue
            p0 = p + 1
            return CompletionReport(
                T.dims, (m, n, p), p0, perm, [float(x) for x in c], float(np.linalg.norm(c)),
                float(scale), level, direction, tries, completed, Zs, report, cone, w2, recheck,
                True, f"rank <= {p0}", seed=seed)
    raise SearchExhausted(f"no certified perturbation after {tries} tries", tries)


def erase_appended(Y: Tensor3) -> Tensor3:
    """Drop the last column of every slice (left inverse of :func:`map_g`)."""
    return Tensor3(Y.array[:, :-1, :], Y.mode)

