"""Closed-form typical ranks of real 3-tensors.

Only the regimes with a known answer are covered:

* 1 x n x p and 2 x n x p tensors (matrix rank; ten Berge's table),
* m x n x p with 3 <= m <= n and p >= (m-1)n - 1.

Everything else raises :class:`~trank.errors.Uncovered`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Uncovered

EXACT = "Exact"
UPPER_BOUND_ONLY = "UpperBoundOnly"


@dataclass(frozen=True)
class HurwitzDecomposition:
    n: int
    a: int
    b: int
    c: int

    @property
    def rho(self) -> int:
        return 2 ** self.b + 8 * self.c

    def to_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "b": self.b, "c": self.c, "rho": self.rho}


def hurwitz_decompose(n: int) -> HurwitzDecomposition:
    """Write ``n = (2a+1) 2^(b+4c)`` with ``0 <= b < 4``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    e = (n & -n).bit_length() - 1
    odd = n >> e
    c, b = divmod(e, 4)
    return HurwitzDecomposition(n, (odd - 1) // 2, b, c)


def rho(n: int) -> int:
    """Hurwitz-Radon number."""
    return hurwitz_decompose(n).rho


@dataclass
class TypicalRankResult:
    dims: tuple[int, int, int]
    ranks: tuple[int, ...]
    exactness: str
    regime: str
    citation: str
    sorted_dims: tuple[int, int, int] = field(default=None)

    def __post_init__(self):
        self.dims = tuple(self.dims)
        self.ranks = tuple(self.ranks)
        if self.sorted_dims is None:
            self.sorted_dims = tuple(sorted(self.dims))
        else:
            self.sorted_dims = tuple(self.sorted_dims)

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "sorted_dims": list(self.sorted_dims),
                "ranks": list(self.ranks), "exactness": self.exactness,
                "regime": self.regime, "citation": self.citation}

    @classmethod
    def from_dict(cls, d: dict) -> "TypicalRankResult":
        return cls(tuple(d["dims"]), tuple(d["ranks"]), d["exactness"], d["regime"],
                   d["citation"], tuple(d["sorted_dims"]))


def typical_ranks(m: int, n: int, p: int) -> TypicalRankResult:
    """Set of typical ranks of real ``m x n x p`` tensors, where known.

    The set is symmetric in the three dimensions, so they are sorted first.
    In the regime ``p = (m-1)n - 1`` with ``m > rho(n)`` and not
    ``m = n = 3 mod 4`` only ``p`` is known to be typical and ``p + 1`` is
    an upper bound; the result then carries ``exactness = UpperBoundOnly``.
    """
    dims = (m, n, p)
    if min(dims) < 1:
        raise ValueError(f"dims must be positive, got {dims}")
    a, b, c = sorted(dims)

    def result(ranks, exactness, regime, citation):
        return TypicalRankResult(dims, tuple(ranks), exactness, regime, citation, (a, b, c))

    if a == 1:
        return result([b], EXACT, "m=1", "rank of a 1 x n x p tensor is its matrix rank min(n, p)")
    if a == 2:
        cite = "ten Berge et al. (1999) classification of 2 x n x p tensors"
        if b == c:
            return result([c, c + 1], EXACT, "m=2,n=p", cite)
        if c <= 2 * b:
            return result([c], EXACT, "m=2,n<p<=2n", cite)
        return result([2 * b], EXACT, "m=2,p>2n", cite)

    m, n, p = a, b, c
    p0 = (m - 1) * n
    if p > p0:
        return result([min(p, m * n)], EXACT, "p>(m-1)n",
                      "single typical rank min(p, mn) when p > (m-1)n")
    if p == p0:
        if m > rho(n):
            return result([p], EXACT, "p=(m-1)n,m>rho(n)",
                          "Hurwitz-Radon criterion for p = (m-1)n: one typical rank iff m > rho(n)")
        return result([p, p + 1], EXACT, "p=(m-1)n,m<=rho(n)",
                      "Hurwitz-Radon criterion for p = (m-1)n: two typical ranks iff m <= rho(n)")
    if p == p0 - 1:
        if m <= rho(n):
            return result([p, p + 1], EXACT, "p=(m-1)n-1,m<=rho(n)",
                          "two typical ranks (m-1)n-1, (m-1)n when 3 <= m <= rho(n)")
        if m % 4 == 3 and n % 4 == 3:
            return result([p, p + 1], EXACT, "p=(m-1)n-1,m=n=3mod4",
                          "two typical ranks (m-1)n-1, (m-1)n when m = n = 3 (mod 4)")
        return result([p, p + 1], UPPER_BOUND_ONLY, "p=(m-1)n-1,open",
                      "minimal typical rank (m-1)n-1; every typical rank is at most (m-1)n")
    raise Uncovered(dims)
