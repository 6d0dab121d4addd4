"""Empirical rank estimation: CP fitting, numerical rank, Monte-Carlo histograms.

A successful fit at rank r is evidence that the rank (or at least the
border rank) is at most r.  A failed fit proves nothing; it only means the
optimizer did not find a decomposition.  Lower bounds used here come from
flattening ranks and, for n x n x 2 tensors, from the exact pencil oracle.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import tensor as tc
from .errors import OracleInapplicable, Uncovered
from .rank_tables import typical_ranks
from .tensor import Tensor3

DEFAULT_EPS = 1e-6
UNRESOLVED = None


@dataclass
class CPModel:
    rank: int
    factors: tuple

    def __post_init__(self):
        self.factors = tuple(np.asarray(f, dtype=np.float64) for f in self.factors)
        if len(self.factors) != 3 or any(f.shape[1] != self.rank for f in self.factors):
            raise ValueError("expected three factor matrices with `rank` columns")

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(f.shape[0] for f in self.factors)

    def full(self) -> np.ndarray:
        A, B, C = self.factors
        return np.einsum("ir,jr,kr->ijk", A, B, C)

    def to_tensor(self) -> Tensor3:
        return Tensor3(self.full())

    def triples(self) -> list:
        A, B, C = self.factors
        return [(A[:, q], B[:, q], C[:, q]) for q in range(self.rank)]

    def to_dict(self) -> dict:
        return {"rank": self.rank, "factors": [f.tolist() for f in self.factors]}

    @classmethod
    def from_dict(cls, d: dict) -> "CPModel":
        return cls(d["rank"], tuple(np.array(f, dtype=np.float64).reshape(-1, d["rank"])
                                    for f in d["factors"]))


@dataclass
class FitReport:
    rank: int
    residual: float
    iterations: int
    restarts: int
    converged: bool
    model: CPModel | None = None
    history: list = field(default_factory=list)
    seed: object = 0

    def to_dict(self) -> dict:
        return {"rank": self.rank, "residual": self.residual, "iterations": self.iterations,
                "restarts": self.restarts, "converged": self.converged,
                "model": None if self.model is None else self.model.to_dict(),
                "history": list(self.history), "seed": _seed_json(self.seed)}

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        model = None if d.get("model") is None else CPModel.from_dict(d["model"])
        seed = d.get("seed", 0)
        return cls(d["rank"], d["residual"], d["iterations"], d["restarts"], d["converged"],
                   model, list(d.get("history", [])), tuple(seed) if isinstance(seed, list) else seed)


def _seed_json(seed):
    return list(seed) if isinstance(seed, (tuple, list)) else seed


def _seed_list(seed) -> list[int]:
    return [int(s) for s in seed] if isinstance(seed, (tuple, list)) else [int(seed)]


def _as_float(T) -> np.ndarray:
    arr = T.array if isinstance(T, Tensor3) else np.asarray(T)
    return np.asarray(arr, dtype=np.float64)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def _khatri_rao(B: np.ndarray, C: np.ndarray) -> np.ndarray:
    # row (j, k) -> B[j] * C[k], j major
    return np.einsum("jr,kr->jkr", B, C).reshape(-1, B.shape[1])


def _residual(X: np.ndarray, A, B, C) -> float:
    return float(np.linalg.norm(X - np.einsum("ir,jr,kr->ijk", A, B, C)))


def _als_sweep(X: np.ndarray, A, B, C):
    d1, d2, d3 = X.shape
    A = np.linalg.lstsq(_khatri_rao(B, C), X.reshape(d1, -1).T, rcond=None)[0].T
    B = np.linalg.lstsq(_khatri_rao(A, C), X.transpose(1, 0, 2).reshape(d2, -1).T, rcond=None)[0].T
    C = np.linalg.lstsq(_khatri_rao(A, B), X.transpose(2, 0, 1).reshape(d3, -1).T, rcond=None)[0].T
    return A, B, C


def _jacobian(A, B, C) -> np.ndarray:
    d1, d2, d3 = A.shape[0], B.shape[0], C.shape[0]
    r = A.shape[1]
    BC = np.einsum("jr,kr->jkr", B, C)
    AC = np.einsum("ir,kr->ikr", A, C)
    AB = np.einsum("ir,jr->ijr", A, B)
    JA = np.einsum("ia,jkr->ijkar", np.eye(d1), BC).reshape(d1 * d2 * d3, d1 * r)
    JB = np.einsum("jb,ikr->ijkbr", np.eye(d2), AC).reshape(d1 * d2 * d3, d2 * r)
    JC = np.einsum("kc,ijr->ijkcr", np.eye(d3), AB).reshape(d1 * d2 * d3, d3 * r)
    return np.hstack([JA, JB, JC])


def _split(theta, dims, r):
    d1, d2, d3 = dims
    return (theta[:d1 * r].reshape(d1, r), theta[d1 * r:(d1 + d2) * r].reshape(d2, r),
            theta[(d1 + d2) * r:].reshape(d3, r))


def _fit_once(X: np.ndarray, r: int, rng: np.random.Generator, max_iters: int, target: float,
              als_iters: int = 30):
    """ALS warm start followed by Levenberg-Marquardt; returns factors and history."""
    dims = X.shape
    A, B, C = (rng.standard_normal((d, r)) for d in dims)
    res = _residual(X, A, B, C)
    history = [res]
    it = 0
    # ALS: exact block least squares, so each sweep cannot increase the residual
    while it < min(als_iters, max_iters) and res > target:
        A2, B2, C2 = _als_sweep(X, A, B, C)
        new = _residual(X, A2, B2, C2)
        it += 1
        if new > res:
            break
        A, B, C = A2, B2, C2
        improved = res - new
        res = new
        history.append(res)
        if improved < 1e-3 * res:
            break
    # Levenberg-Marquardt; steps are accepted only if the residual drops
    theta = np.concatenate([A.ravel(), B.ravel(), C.ravel()])
    x = X.ravel()
    lam = 1e-3
    window = 25
    while it < max_iters and res > target and lam < 1e12:
        A, B, C = _split(theta, dims, r)
        J = _jacobian(A, B, C)
        e = np.einsum("ir,jr,kr->ijk", A, B, C).ravel() - x
        g = J.T @ e
        H = J.T @ J
        it += 1
        while lam < 1e12:
            try:
                step = np.linalg.solve(H + lam * np.eye(H.shape[0]), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = theta + step
            new = _residual(X, *_split(trial, dims, r))
            if new < res:
                theta, res = trial, new
                lam = max(lam / 3, 1e-12)
                break
            lam *= 4
        history.append(res)
        if len(history) > window and history[-window - 1] - res < 1e-6 * history[-window - 1]:
            break
    return _split(theta, dims, r), history, it


def als_fit(T, r: int, restarts: int = 8, max_iters: int = 500, tol: float = DEFAULT_EPS,
            seed=0) -> FitReport:
    """Best-of-restarts rank-``r`` CP fit of ``T``.

    Each restart draws Gaussian factors from ``default_rng([*seed, restart])``,
    runs a few alternating least-squares sweeps and then polishes with
    Levenberg-Marquardt.  Restarts stop early once the relative residual is
    below ``tol``.  ``residual`` is relative, ``||T - model|| / ||T||``;
    ``history`` holds the absolute residuals of the winning restart and is
    nonincreasing.
    """
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    X = _as_float(T)
    if X.ndim != 3:
        raise ValueError("expected a 3-tensor")
    norm = float(np.linalg.norm(X))
    if norm == 0.0:
        model = CPModel(r, tuple(np.zeros((d, r)) for d in X.shape))
        return FitReport(r, 0.0, 0, 0, True, model, [0.0], seed)
    best = None
    used = 0
    for restart in range(restarts):
        used += 1
        rng = np.random.default_rng(_seed_list(seed) + [restart])
        factors, history, iters = _fit_once(X, r, rng, max_iters, tol * norm)
        rel = history[-1] / norm
        if best is None or rel < best[0]:
            best = (rel, factors, history, iters)
        if rel < tol:
            break
    rel, factors, history, iters = best
    return FitReport(r, float(rel), iters, used, bool(rel < tol), CPModel(r, factors),
                     [float(h) for h in history], seed)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def flattening_ranks(T, rtol: float = 1e-10) -> tuple[int, int, int]:
    """Ranks of the three unfoldings; each is a lower bound for the tensor rank."""
    X = _as_float(T)
    out = []
    for mode in range(3):
        M = np.moveaxis(X, mode, 0).reshape(X.shape[mode], -1)
        s = np.linalg.svd(M, compute_uv=False)
        out.append(int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0)
    return tuple(out)


def numeric_rank(T, r_max: int, eps: float = DEFAULT_EPS, r_min: int | None = None,
                 restarts: int = 8, max_iters: int = 500, seed=0):
    """Smallest ``r <= r_max`` with a fit below ``eps``, or ``UNRESOLVED`` (None).

    The search starts at the largest flattening rank, a sound lower bound.
    A returned value is upper evidence only: ALS can miss decompositions and
    can fit border-rank approximations.
    """
    X = _as_float(T)
    if r_max > X.size:
        raise ValueError(f"r_max = {r_max} exceeds the number of entries {X.size}")
    if not np.any(X):
        return 0
    if r_min is None:
        r_min = max(flattening_ranks(X))
    for r in range(max(r_min, 1), r_max + 1):
        if als_fit(X, r, restarts=restarts, max_iters=max_iters, tol=eps, seed=seed).converged:
            return r
    return UNRESOLVED


def pencil_rank_oracle(T, eps: float = 1e-9) -> int:
    """Exact rank of an n x n x 2 tensor from its pencil.

    With ``S1`` nonsingular and ``S1^-1 S2`` having distinct eigenvalues the
    rank is ``n`` plus the number of complex-conjugate eigenvalue pairs.
    """
    X = _as_float(T)
    if X.ndim != 3 or X.shape[2] != 2 or X.shape[0] != X.shape[1]:
        raise OracleInapplicable(f"expected an n x n x 2 tensor, got {X.shape}")
    S1, S2 = X[:, :, 0], X[:, :, 1]
    n = S1.shape[0]
    if not abs(np.linalg.det(S1)) > eps * tc.hadamard_bound(S1):
        raise OracleInapplicable("first slice is singular")
    ev = np.linalg.eigvals(np.linalg.solve(S1, S2))
    scale = max(1.0, float(np.max(np.abs(ev))))
    gaps = np.abs(ev[:, None] - ev[None, :])
    np.fill_diagonal(gaps, np.inf)
    if n > 1 and float(np.min(gaps)) <= eps * scale:
        raise OracleInapplicable("repeated eigenvalues")
    pairs = int(np.sum(ev.imag > eps * scale))
    return n + pairs


def _oracle_view(X: np.ndarray):
    """Reorder a tensor with one mode of size 2 and two equal others to n x n x 2."""
    shape = X.shape
    for k in range(3):
        rest = [i for i in range(3) if i != k]
        if shape[k] == 2 and shape[rest[0]] == shape[rest[1]]:
            return np.transpose(X, (rest[0], rest[1], k))
    return None


# ---------------------------------------------------------------------------
# Monte-Carlo
# ---------------------------------------------------------------------------

@dataclass
class RankHistogram:
    dims: tuple
    trials: int
    counts: dict
    unresolved: int
    seed: int
    eps: float = DEFAULT_EPS
    r_max: int = 0
    typical: list | None = None
    oracle_counts: dict = field(default_factory=dict)
    oracle_agreement: int = 0
    oracle_trials: int = 0
    ranks: list = field(default_factory=list)

    def __post_init__(self):
        self.dims = tuple(self.dims)
        self.counts = {int(k): int(v) for k, v in self.counts.items()}
        self.oracle_counts = {int(k): int(v) for k, v in self.oracle_counts.items()}

    @property
    def resolved(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "trials": self.trials, "seed": self.seed,
                "eps": self.eps, "r_max": self.r_max, "typical": self.typical,
                "counts": {str(k): v for k, v in sorted(self.counts.items())},
                "unresolved": self.unresolved,
                "oracle_counts": {str(k): v for k, v in sorted(self.oracle_counts.items())},
                "oracle_agreement": self.oracle_agreement, "oracle_trials": self.oracle_trials,
                "ranks": list(self.ranks)}

    @classmethod
    def from_dict(cls, d: dict) -> "RankHistogram":
        return cls(tuple(d["dims"]), d["trials"], d["counts"], d["unresolved"], d["seed"],
                   d.get("eps", DEFAULT_EPS), d.get("r_max", 0), d.get("typical"),
                   d.get("oracle_counts", {}), d.get("oracle_agreement", 0),
                   d.get("oracle_trials", 0), list(d.get("ranks", [])))

    def to_csv(self) -> str:
        lines = ["rank,count,oracle_count"]
        keys = sorted(set(self.counts) | set(self.oracle_counts))
        for k in keys:
            lines.append(f"{k},{self.counts.get(k, 0)},{self.oracle_counts.get(k, 0)}")
        lines.append(f"unresolved,{self.unresolved},")
        return "\n".join(lines) + "\n"


def trial_tensor(dims: Sequence[int], seed: int, index: int) -> np.ndarray:
    """The Gaussian tensor of trial ``index``; its stream depends only on (seed, index)."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    return rng.standard_normal(tuple(dims))


def _one_trial(args):
    dims, seed, index, eps, r_max, restarts, max_iters = args
    X = trial_tensor(dims, seed, index)
    r = numeric_rank(X, r_max, eps=eps, restarts=restarts, max_iters=max_iters, seed=(seed, index))
    oracle = None
    view = _oracle_view(X)
    if view is not None:
        try:
            oracle = pencil_rank_oracle(view)
        except OracleInapplicable:
            oracle = None
    return index, r, oracle


def default_r_max(m: int, n: int, p: int) -> int:
    """Largest typical rank when known, else the trivial bound min of slice sizes."""
    try:
        return max(typical_ranks(m, n, p).ranks)
    except Uncovered:
        a, b, c = sorted((m, n, p))
        return a * b


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get("TRANK_THREADS", "1") or 1)
    return max(1, workers)


def monte_carlo(m: int, n: int, p: int, trials: int = 200, seed: int = 0,
                eps: float = DEFAULT_EPS, r_max: int | None = None, restarts: int = 8,
                max_iters: int = 500, workers: int | None = None) -> RankHistogram:
    """Numerical-rank histogram of ``trials`` standard Gaussian ``m x n x p`` tensors.

    The result does not depend on ``workers``: every trial has its own
    random stream and results are merged in trial order.
    """
    if min(m, n, p) < 1 or trials < 0:
        raise ValueError("dims must be positive and trials nonnegative")
    if r_max is None:
        r_max = default_r_max(m, n, p)
    try:
        typical = list(typical_ranks(m, n, p).ranks)
    except Uncovered:
        typical = None
    jobs = [((m, n, p), seed, i, eps, r_max, restarts, max_iters) for i in range(trials)]
    workers = worker_count(workers)
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_trial, jobs))
    else:
        results = [_one_trial(j) for j in jobs]
    results.sort(key=lambda t: t[0])
    counts: dict = {}
    oracle_counts: dict = {}
    unresolved = agree = oracle_trials = 0
    ranks = []
    for _, r, oracle in results:
        ranks.append(r)
        if r is UNRESOLVED:
            unresolved += 1
        else:
            counts[r] = counts.get(r, 0) + 1
        if oracle is not None:
            oracle_trials += 1
            oracle_counts[oracle] = oracle_counts.get(oracle, 0) + 1
            agree += int(r == oracle)
    return RankHistogram((m, n, p), trials, counts, unresolved, seed, eps, r_max, typical,
                         oracle_counts, agree, oracle_trials, ranks)


__all__ = ["CPModel", "FitReport", "RankHistogram", "UNRESOLVED", "als_fit", "numeric_rank",
           "flattening_ranks", "pencil_rank_oracle", "monte_carlo", "trial_tensor",
           "default_r_max", "worker_count"]
