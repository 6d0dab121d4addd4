"""Dense 3-way arrays, matrices and the slice/flattening notation.

A tensor ``T`` of size d1 x d2 x d3 is viewed as the tuple of its d3 frontal
slices ``(T_1; ...; T_p)``, each a d1 x d2 matrix.  Indices in the public
functions (``slice``, ``column``, ``leading_submatrix``) are 1-based to match
that notation; everything else is plain numpy.

Matrices are numpy arrays: ``float64`` in Float64 mode, ``object`` arrays of
``Fraction`` in ExactRational mode.  The two modes never mix.

Serialized layout is slice-major then row-major: entry (i, j, k) sits at
flat position ``k*d1*d2 + i*d2 + j`` (0-based).
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import exact
from .errors import ModeMismatch, SingularMatrix, WrongShape

F64 = "f64"
RATIONAL = "rational"
DEFAULT_EPS = 1e-10


# ---------------------------------------------------------------------------
# scalar mode helpers
# ---------------------------------------------------------------------------

def mode_of(a: np.ndarray) -> str:
    return RATIONAL if np.asarray(a).dtype == object else F64


def as_matrix(x, mode: str | None = None) -> np.ndarray:
    """Coerce ``x`` to a 2-D array in the requested (or inferred) mode."""
    a = np.asarray(x)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise WrongShape(f"expected a matrix, got {a.ndim}-d array")
    if mode is None:
        mode = RATIONAL if a.dtype == object else F64
    return _coerce(a, mode)


def _coerce(a: np.ndarray, mode: str) -> np.ndarray:
    if mode == RATIONAL:
        if a.dtype == object and all(isinstance(v, Fraction) for v in a.flat):
            return a
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            if isinstance(v, (float, np.floating)):
                raise ModeMismatch("float entry in an exact-rational object")
            out[idx] = Fraction(v) if not isinstance(v, str) else Fraction(v)
        return out
    if mode == F64:
        if a.dtype == object:
            a = a.astype(np.float64)
        a = np.asarray(a, dtype=np.float64)
        if not np.all(np.isfinite(a)):
            raise ValueError("Float64 entries must be finite")
        return a
    raise ValueError(f"unknown scalar mode {mode!r}")


def _same_mode(*arrays: np.ndarray) -> str:
    modes = {mode_of(a) for a in arrays}
    if len(modes) > 1:
        raise ModeMismatch("cannot mix Float64 and exact-rational operands")
    return modes.pop()


def rationalize(a: np.ndarray, max_denominator: int = 10**6) -> np.ndarray:
    """Continued-fraction rounding of a float array to Fractions."""
    a = np.asarray(a)
    if a.dtype == object:
        return a
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = Fraction(float(v)).limit_denominator(max_denominator)
    return out


def is_nonzero(x, scale: float = 1.0, eps: float = DEFAULT_EPS) -> bool:
    """Tolerance-policy proxy for ``x != 0``; exact for Fractions."""
    if isinstance(x, Fraction):
        return x != 0
    return abs(x) > eps * scale


# ---------------------------------------------------------------------------
# matrix operations
# ---------------------------------------------------------------------------

def identity(n: int, mode: str = F64) -> np.ndarray:
    if mode == RATIONAL:
        return np.array(exact.identity(n), dtype=object)
    return np.eye(n)


def det(M) -> float | Fraction:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise WrongShape(f"determinant needs a square matrix, got {M.shape}")
    if mode_of(M) == RATIONAL:
        return exact.det(M.tolist())
    return float(np.linalg.det(M))


def hadamard_bound(M) -> float:
    """Product of row norms; upper bound for ``|det M|``."""
    M = np.asarray(M, dtype=np.float64)
    return float(np.prod(np.linalg.norm(M, axis=1)))


def inverse(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise WrongShape(f"inverse needs a square matrix, got {M.shape}")
    if mode_of(M) == RATIONAL:
        try:
            return np.array(exact.inverse(M.tolist()), dtype=object)
        except ZeroDivisionError:
            raise SingularMatrix("matrix is singular") from None
    try:
        return np.linalg.inv(M)
    except np.linalg.LinAlgError:
        raise SingularMatrix("matrix is singular") from None


def matmul(A, B) -> np.ndarray:
    A, B = np.asarray(A), np.asarray(B)
    _same_mode(A, B)
    if A.shape[-1] != B.shape[0]:
        raise WrongShape(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def leading_submatrix(M, i: int, j: int) -> np.ndarray:
    """The block of the first ``i`` rows and first ``j`` columns."""
    M = np.asarray(M)
    if not (1 <= i <= M.shape[0] and 1 <= j <= M.shape[1]):
        raise IndexError(f"leading block ({i},{j}) out of range for {M.shape}")
    return M[:i, :j].copy()


def column(M, j: int) -> np.ndarray:
    """The ``j``-th column (1-based)."""
    M = np.asarray(M)
    if not 1 <= j <= M.shape[1]:
        raise IndexError(f"column {j} out of range 1..{M.shape[1]}")
    return M[:, j - 1].copy()


def vector_norm(c) -> float:
    return math.sqrt(sum(float(x) ** 2 for x in np.asarray(c).ravel()))


# ---------------------------------------------------------------------------
# Tensor3
# ---------------------------------------------------------------------------

class Tensor3:
    """Immutable dense 3-way array.

    ``array`` has shape ``(d1, d2, d3)``; ``array[:, :, k]`` is the slice
    ``T_{k+1}``.
    """

    __slots__ = ("_a", "mode")

    def __init__(self, array, mode: str | None = None):
        a = np.asarray(array)
        if a.ndim != 3 or 0 in a.shape:
            raise WrongShape(f"expected a nonempty 3-way array, got shape {a.shape}")
        if mode is None:
            mode = mode_of(a)
        a = _coerce(a, mode).copy()
        a.flags.writeable = False
        self._a = a
        self.mode = mode

    @classmethod
    def from_data(cls, dims: Sequence[int], data: Sequence, mode: str = F64) -> "Tensor3":
        d1, d2, d3 = (int(d) for d in dims)
        if min(d1, d2, d3) < 1:
            raise WrongShape(f"dims must be positive, got {tuple(dims)}")
        if len(data) != d1 * d2 * d3:
            raise WrongShape(f"data length {len(data)} != {d1}*{d2}*{d3}")
        flat = np.array(list(data), dtype=object if mode == RATIONAL else np.float64)
        return cls(flat.reshape(d3, d1, d2).transpose(1, 2, 0), mode)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(d) for d in self._a.shape)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def data(self) -> list:
        return list(self._a.transpose(2, 0, 1).ravel())

    def slice(self, k: int) -> np.ndarray:
        """Frontal slice ``T_k`` (1-based)."""
        if not 1 <= k <= self._a.shape[2]:
            raise IndexError(f"slice {k} out of range 1..{self._a.shape[2]}")
        return self._a[:, :, k - 1].copy()

    def slices(self) -> list[np.ndarray]:
        return [self._a[:, :, k].copy() for k in range(self._a.shape[2])]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor3):
            return NotImplemented
        return (self.mode == other.mode and self.dims == other.dims
                and bool(np.all(self._a == other._a)))

    def __repr__(self) -> str:
        return f"Tensor3(dims={self.dims}, mode={self.mode!r})"

    def __add__(self, other: "Tensor3") -> "Tensor3":
        _same_mode(self._a, other._a)
        if self.dims != other.dims:
            raise WrongShape("dims differ")
        return Tensor3(self._a + other._a, self.mode)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        _same_mode(self._a, other._a)
        if self.dims != other.dims:
            raise WrongShape("dims differ")
        return Tensor3(self._a - other._a, self.mode)

    def scaled(self, s) -> "Tensor3":
        return Tensor3(self._a * s, self.mode)

    # serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        if self.mode == RATIONAL:
            data = [str(x) for x in self.data]
        else:
            data = [float(x) for x in self.data]
        return {"dims": list(self.dims), "mode": self.mode, "data": data}

    @classmethod
    def from_dict(cls, d: dict) -> "Tensor3":
        mode = d.get("mode", F64)
        data = d["data"]
        if mode == RATIONAL:
            data = [Fraction(str(x)) for x in data]
        return cls.from_data(d["dims"], data, mode)


def from_slices(slices: Sequence, mode: str | None = None) -> Tensor3:
    """Build ``(S_1; ...; S_p)`` from a list of equally shaped matrices."""
    mats = [np.asarray(s) for s in slices]
    if not mats:
        raise WrongShape("need at least one slice")
    if len({m.shape for m in mats}) != 1:
        raise WrongShape("slices must share a shape")
    return Tensor3(np.stack(mats, axis=2), mode)


def permute_modes(T: Tensor3, perm: Sequence[int]) -> Tensor3:
    """Reorder the three modes; output mode ``i`` is input mode ``perm[i]``.

    ``perm`` uses 1-based mode labels, e.g. ``(3, 1, 2)`` turns a 2x3x4
    tensor into a 4x2x3 one.
    """
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != [1, 2, 3]:
        raise ValueError(f"{perm} is not a permutation of (1, 2, 3)")
    return Tensor3(T.array.transpose([p - 1 for p in perm]), T.mode)


def inverse_permutation(perm: Sequence[int]) -> tuple[int, int, int]:
    inv = [0, 0, 0]
    for i, p in enumerate(perm):
        inv[p - 1] = i + 1
    return tuple(inv)


def fl1(T: Tensor3) -> np.ndarray:
    """Stack the slices vertically: a (d1*d3) x d2 matrix."""
    return np.concatenate(T.slices(), axis=0)


def fl1_inv(M, d1: int, d3: int) -> Tensor3:
    M = np.asarray(M)
    if M.shape[0] != d1 * d3:
        raise WrongShape(f"{M.shape[0]} rows cannot split into {d3} blocks of {d1}")
    return from_slices([M[k * d1:(k + 1) * d1, :] for k in range(d3)], mode_of(M))


def fl2(T: Tensor3) -> np.ndarray:
    """Concatenate the slices horizontally: a d1 x (d2*d3) matrix."""
    return np.concatenate(T.slices(), axis=1)


def fl2_inv(M, d3: int) -> Tensor3:
    M = np.asarray(M)
    if M.shape[1] % d3:
        raise WrongShape(f"{M.shape[1]} columns cannot split into {d3} blocks")
    d2 = M.shape[1] // d3
    return from_slices([M[:, k * d2:(k + 1) * d2] for k in range(d3)], mode_of(M))


def rank_one(x, y, z) -> Tensor3:
    """The tensor with entries ``x_i y_j z_k``."""
    x, y, z = (np.asarray(v).ravel() for v in (x, y, z))
    if min(x.size, y.size, z.size) == 0:
        raise WrongShape("rank-one factors must be nonempty")
    mode = RATIONAL if any(v.dtype == object for v in (x, y, z)) else F64
    x, y, z = (_coerce(v, mode) for v in (x, y, z))
    return Tensor3(np.multiply.outer(np.multiply.outer(x, y), z), mode)


def cp_compose(triples: Iterable) -> Tensor3:
    """Sum of the rank-one tensors given by ``(x, y, z)`` triples."""
    total = None
    for x, y, z in triples:
        t = rank_one(x, y, z)
        total = t if total is None else total + t
    if total is None:
        raise ValueError("need at least one triple")
    return total


def frobenius_norm(T: Tensor3) -> float:
    if T.mode == RATIONAL:
        return math.sqrt(sum(float(v) ** 2 for v in T.array.flat))
    return float(np.linalg.norm(T.array))


def max_abs(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a.astype(np.float64))))


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def save_tensor(T: Tensor3, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(tensor_to_csv(T))
    else:
        path.write_text(json.dumps(T.to_dict()) + "\n")


def load_tensor(path: str | Path) -> Tensor3:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return tensor_from_csv(text)
    return Tensor3.from_dict(json.loads(text))


def tensor_to_csv(T: Tensor3) -> str:
    buf = io.StringIO()
    for k, S in enumerate(T.slices()):
        if k:
            buf.write("\n")
        w = csv.writer(buf, lineterminator="\n")
        for row in S:
            w.writerow([str(v) if T.mode == RATIONAL else repr(float(v)) for v in row])
    return buf.getvalue()


def tensor_from_csv(text: str, mode: str | None = None) -> Tensor3:
    """Parse blank-line separated slice blocks.

    Without an explicit ``mode`` the tensor is rational when any entry is
    written as a fraction ``p/q``.
    """
    blocks, cur = [], []
    for line in text.splitlines():
        if line.strip():
            cur.append(next(csv.reader([line])))
        elif cur:
            blocks.append(cur)
            cur = []
    if cur:
        blocks.append(cur)
    if not blocks:
        raise WrongShape("no slices found")
    if mode is None:
        mode = RATIONAL if any("/" in v for b in blocks for r in b for v in r) else F64
    conv = (lambda s: Fraction(s.strip())) if mode == RATIONAL else (lambda s: float(s))
    mats = [np.array([[conv(v) for v in r] for r in b],
                     dtype=object if mode == RATIONAL else np.float64) for b in blocks]
    return from_slices(mats, mode)
