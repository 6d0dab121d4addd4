"""Probabilistic certificate of absolute irreducibility.

The polynomial is restricted to random rational 2-planes.  For a bivariate
``f(s, t)`` with ``gcd(f, df/ds) = 1``, the rational solutions ``(g, h)`` of

    d/dt (g / f) = d/ds (h / f),   deg g <= (ds-1, dt),  deg h <= (ds, dt-1)

form a space whose dimension is the number of absolutely irreducible
factors of ``f`` (Ruppert; Gao).  ``(f_s, f_t)`` is always a solution, so
nullity 1 means ``f`` is absolutely irreducible.  A factorization of ``p``
restricts to a factorization of every degree-preserving restriction, hence
nullity 1 on one plane certifies ``p`` itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .errors import CostGuard
from .poly import MultiPoly, restrict_to_plane

ABSOLUTELY_IRREDUCIBLE = "AbsolutelyIrreducible"
REDUCIBLE = "Reducible"
INCONCLUSIVE = "Inconclusive"

MAX_DEGREE = 8


@dataclass
class IrreducibilityCertificate:
    verdict: str
    plane: dict | None = None
    nullity: int | None = None
    trials: int = 0
    nullities: list = field(default_factory=list)
    real_irreducibility_undecided: bool = False
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == ABSOLUTELY_IRREDUCIBLE

    def to_dict(self) -> dict:
        plane = None
        if self.plane is not None:
            plane = {k: [str(x) for x in v] for k, v in self.plane.items()}
        return {"verdict": self.verdict, "plane": plane, "nullity": self.nullity,
                "trials": self.trials, "nullities": list(self.nullities),
                "real_irreducibility_undecided": self.real_irreducibility_undecided,
                "note": self.note}

    @classmethod
    def from_dict(cls, d: dict) -> "IrreducibilityCertificate":
        plane = d.get("plane")
        if plane is not None:
            plane = {k: [Fraction(x) for x in v] for k, v in plane.items()}
        return cls(d["verdict"], plane, d.get("nullity"), d.get("trials", 0),
                   list(d.get("nullities", [])), d.get("real_irreducibility_undecided", False),
                   d.get("note", ""))


# ---------------------------------------------------------------------------
# univariate helpers (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------

def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_rem(a: list, b: list) -> list:
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    while len(a) - 1 >= db and a:
        q = a[-1] / lead
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        a.pop()
        _trim(a)
    return a


def _univariate_gcd_degree(a: list, b: list) -> int:
    a, b = _trim([Fraction(x) for x in a]), _trim([Fraction(x) for x in b])
    while b:
        a, b = b, _poly_rem(a, b)
    return len(a) - 1


def _is_squarefree(coeffs: list) -> bool:
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    return _univariate_gcd_degree(coeffs, deriv) == 0


# ---------------------------------------------------------------------------
# Gao's linear system
# ---------------------------------------------------------------------------

def gao_nullity(f: MultiPoly) -> int:
    """Dimension of the solution space of the Ruppert/Gao system for ``f(s, t)``.

    Only meaningful (equal to the number of absolutely irreducible factors)
    when ``gcd(f, f_s) = 1``; callers check that separately.
    """
    if len(f.vars) != 2:
        raise ValueError("gao_nullity expects a bivariate polynomial")
    ds, dt = f.degree_in(f.vars[0]), f.degree_in(f.vars[1])
    F = f.terms
    Fs = f.derivative(f.vars[0]).terms
    Ft = f.derivative(f.vars[1]).terms

    def image(mono, dmono, fd, sign):
        # sign * (f * dmono - mono * fd), returned as a dict
        out: dict = {}
        if dmono is not None:
            (ei, ej), k = dmono
            for (a, b), c in F.items():
                key = (a + ei, b + ej)
                out[key] = out.get(key, 0) + sign * k * c
        mi, mj = mono
        for (a, b), c in fd.items():
            key = (a + mi, b + mj)
            out[key] = out.get(key, 0) - sign * c
        return out

    columns = []
    # g-part: f g_t - g f_t
    for i in range(ds):
        for j in range(dt + 1):
            d = ((i, j - 1), j) if j else None
            columns.append(image((i, j), d, Ft, 1))
    # h-part: -(f h_s - h f_s)
    for i in range(ds + 1):
        for j in range(dt):
            d = ((i - 1, j), i) if i else None
            columns.append(image((i, j), d, Fs, -1))
    if not columns:
        return 0
    keys = sorted({k for col in columns for k in col})
    rows = [[col.get(k, 0) for col in columns] for k in keys]
    # modular rank is a lower bound, so a modular nullity of 1 is exact
    try:
        if len(columns) - exact.rank_mod_p(rows) == 1:
            return 1
    except ZeroDivisionError:
        pass
    return len(columns) - exact.rank(rows)


def _univariate_slice(f: MultiPoly, t0: int) -> list:
    ds = f.degree_in(f.vars[0])
    coeffs = [Fraction(0)] * (ds + 1)
    for (a, b), c in f.terms.items():
        coeffs[a] += c * Fraction(t0) ** b
    return coeffs


def absolutely_irreducible(p: MultiPoly, trials: int = 3, seed: int = 0,
                           coef_bound: int = 20) -> IrreducibilityCertificate:
    """Certify absolute irreducibility of ``p`` over the rationals.

    Each trial restricts ``p`` to the plane ``x_i = a_i s + b_i t + c_i``
    with random integers in ``[-coef_bound, coef_bound]``.  A trial counts
    only if the ``s``-leading coefficient of the restriction is the nonzero
    constant ``top(a)`` (so the degree is preserved and there are no factors
    free of ``s``) and a random ``t``-specialization is squarefree (so there
    are no repeated factors); together these give ``gcd(f, f_s) = 1``.

    The first trial with nullity 1 certifies ``AbsolutelyIrreducible``.  If
    every valid trial has nullity >= 2 the verdict is ``Reducible`` (over
    the complex numbers; irreducibility over the reals stays undecided).
    No valid trial gives ``Inconclusive``.
    """
    if p.is_constant():
        raise ValueError("irreducibility of a constant is undefined")
    d = p.total_degree()
    if d > MAX_DEGREE:
        raise CostGuard(f"total degree {d} exceeds {MAX_DEGREE}")
    rng = np.random.default_rng(seed)
    top = p.homogeneous_part(d)
    nv = len(p.vars)
    nullities: list = []
    last_plane = None
    reasons = set()
    used = 0
    for _ in range(trials):
        used += 1
        a, b, c = (rng.integers(-coef_bound, coef_bound + 1, size=nv).tolist() for _ in range(3))
        plane = {"a": [Fraction(x) for x in a], "b": [Fraction(x) for x in b],
                 "c": [Fraction(x) for x in c]}
        if top.evaluate([Fraction(x) for x in a]) == 0:
            nullities.append(None)
            reasons.add("degree drop")
            continue
        f = restrict_to_plane(p, a, b, c)
        t0 = int(rng.integers(-coef_bound, coef_bound + 1))
        if not _is_squarefree(_univariate_slice(f, t0)):
            nullities.append(None)
            reasons.add("restriction not squarefree")
            continue
        k = gao_nullity(f)
        nullities.append(k)
        last_plane = plane
        if k == 1:
            return IrreducibilityCertificate(ABSOLUTELY_IRREDUCIBLE, plane, 1, used, nullities)
    valid = [k for k in nullities if k is not None]
    if valid:
        return IrreducibilityCertificate(REDUCIBLE, last_plane, min(valid), used, nullities,
                                         real_irreducibility_undecided=True,
                                         note="factors over C; irreducibility over R not decided")
    return IrreducibilityCertificate(INCONCLUSIVE, None, None, used, nullities,
                                     note="; ".join(sorted(reasons)))
