"""Gaussian BIC scoring over DAGs and Markov equivalence classes.

Scores are decomposable: the score of a DAG is the sum of local node
scores, each depending only on the node and its parent set.  Markov
equivalent DAGs share every conditional-variance factorization, so the
class score is well defined and computed through any consistent
extension.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import Dag, GraphError, Mec, consistent_extension
from .moves import Move, apply_move

__all__ = [
    "ScoringError",
    "SufficientStats",
    "LocalScoreCache",
    "local_bic",
    "score_dag",
    "score_mec",
    "score_delta",
    "load_csv",
    "stats_from_csv",
]


class ScoringError(Exception):
    """Raised for degenerate statistics or invalid scoring requests."""


@dataclass(frozen=True)
class SufficientStats:
    """Sample size, mean vector and MLE covariance (divisor n, not n-1)."""

    n: int
    mean: tuple[float, ...]
    cov: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ScoringError("sample size must be at least 1")
        p = len(self.mean)
        if len(self.cov) != p or any(len(row) != p for row in self.cov):
            raise ScoringError("covariance shape does not match mean length")

    @property
    def p(self) -> int:
        return len(self.mean)

    def cov_matrix(self) -> np.ndarray:
        return np.array(self.cov, dtype=float)

    @classmethod
    def from_data(cls, data) -> "SufficientStats":
        x = np.asarray(data, dtype=float)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ScoringError("data must be a nonempty 2-d array")
        n = x.shape[0]
        mean = x.mean(axis=0)
        centered = x - mean
        cov = centered.T @ centered / n
        return cls(n=n, mean=tuple(map(float, mean)),
                   cov=tuple(tuple(map(float, row)) for row in cov))

    @classmethod
    def from_covariance(cls, cov, n: int,
                        mean: Optional[Sequence[float]] = None) -> "SufficientStats":
        c = np.asarray(cov, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ScoringError("covariance must be square")
        if mean is None:
            mean = [0.0] * c.shape[0]
        if len(mean) != c.shape[0]:
            raise ScoringError("mean length does not match covariance")
        return cls(n=n, mean=tuple(float(v) for v in mean),
                   cov=tuple(tuple(map(float, row)) for row in c))


def load_csv(path) -> np.ndarray:
    """Read a numeric CSV, one row per sample; a non-numeric first row
    is treated as a header and skipped."""
    rows: list[list[float]] = []
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise ScoringError(f"cannot read {path}: {exc}")
    with handle:
        reader = csv.reader(handle)
        for lineno, cells in enumerate(reader):
            cells = [c.strip() for c in cells if c.strip() != ""]
            if not cells:
                continue
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if lineno == 0:
                    continue
                raise ScoringError(
                    f"non-numeric value in row {lineno + 1} of {path}")
    if not rows:
        raise ScoringError(f"no data rows in {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ScoringError(f"ragged rows in {path}")
    return np.array(rows, dtype=float)


def stats_from_csv(path) -> SufficientStats:
    return SufficientStats.from_data(load_csv(path))


def _collinear_subset(sub: np.ndarray, parents: tuple[int, ...]) -> list[int]:
    # Greedy rank sweep: a parent whose column fails to grow the rank of
    # the leading principal block is linearly dependent on its
    # predecessors.
    dependent: list[int] = []
    kept: list[int] = []
    for pos, node in enumerate(parents):
        trial = kept + [pos]
        block = sub[np.ix_(trial, trial)]
        if np.linalg.matrix_rank(block, tol=1e-10) == len(trial):
            kept.append(pos)
        else:
            dependent.append(node)
    return dependent


def _residual_variance(node: int, parents: tuple[int, ...],
                       cov: np.ndarray) -> float:
    if not parents:
        return float(cov[node, node])
    idx = list(parents)
    block = cov[np.ix_(idx, idx)]
    rhs = cov[idx, node]
    try:
        coef = np.linalg.solve(block, rhs)
    except np.linalg.LinAlgError:
        bad = _collinear_subset(cov, parents)
        raise ScoringError(
            f"singular parent covariance for node {node}: "
            f"parents {sorted(bad) or list(parents)} are collinear")
    return float(cov[node, node] - rhs @ coef)


def local_bic(node: int, parents: Iterable[int], stats: SufficientStats) -> float:
    """BIC contribution of one node given its parent set.

    Uses the profiled Gaussian log-likelihood with the residual variance
    obtained from the covariance by Schur complement, penalized by
    lambda * (|parents| + 1) with lambda = log(n) / 2.
    """
    pa = tuple(sorted(set(parents)))
    p = stats.p
    if not 0 <= node < p:
        raise ScoringError(f"node {node} out of range for p={p}")
    if node in pa:
        raise ScoringError(f"node {node} cannot be its own parent")
    if any(not 0 <= q < p for q in pa):
        raise ScoringError(f"parent out of range in {pa}")
    cov = stats.cov_matrix()
    sigma2 = _residual_variance(node, pa, cov)
    if sigma2 <= 0.0:
        raise ScoringError(
            f"zero residual variance for node {node} given parents {list(pa)}; "
            "data are deterministic along this direction")
    n = stats.n
    penalty = 0.5 * math.log(n) * (len(pa) + 1)
    return -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0) - penalty


@dataclass
class LocalScoreCache:
    """Memo table for local scores keyed by (node, canonical parent set)."""

    stats: SufficientStats
    hits: int = 0
    misses: int = 0
    _table: dict = field(default_factory=dict, repr=False)

    def local(self, node: int, parents: Iterable[int]) -> float:
        key = (node, tuple(sorted(set(parents))))
        if key in self._table:
            self.hits += 1
            return self._table[key]
        self.misses += 1
        value = local_bic(key[0], key[1], self.stats)
        self._table[key] = value
        return value

    def __len__(self) -> int:
        return len(self._table)


def _cache_for(stats: SufficientStats,
               cache: Optional[LocalScoreCache]) -> LocalScoreCache:
    if cache is None:
        return LocalScoreCache(stats)
    if cache.stats is not stats and cache.stats != stats:
        raise ScoringError("cache was built for different statistics")
    return cache


def score_dag(dag: Dag, stats: SufficientStats,
              cache: Optional[LocalScoreCache] = None) -> float:
    if dag.p != stats.p:
        raise ScoringError(f"graph has {dag.p} nodes, stats have {stats.p}")
    table = _cache_for(stats, cache)
    return sum(table.local(i, dag.parent_set(i)) for i in range(dag.p))


def score_mec(mec: Mec, stats: SufficientStats,
              cache: Optional[LocalScoreCache] = None) -> float:
    dag = consistent_extension(mec)
    if dag is None:
        raise GraphError("class admits no consistent extension")
    return score_dag(dag, stats, cache)


def delta_and_target(source: Mec, move: Move, stats: SufficientStats,
                     cache: Optional[LocalScoreCache] = None):
    """Score change of a move together with the target class.

    Only nodes whose parent sets differ between the two consistent
    extensions are rescored; identical local terms cancel exactly.
    """
    table = _cache_for(stats, cache)
    target = apply_move(source, move)
    before = consistent_extension(source)
    after = consistent_extension(target)
    if before is None or after is None:
        raise GraphError("class admits no consistent extension")
    delta = 0.0
    for i in range(source.p):
        pa_b = before.parent_set(i)
        pa_a = after.parent_set(i)
        if pa_b != pa_a:
            delta += table.local(i, pa_a) - table.local(i, pa_b)
    return delta, target


def score_delta(source: Mec, move: Move, stats: SufficientStats,
                cache: Optional[LocalScoreCache] = None) -> float:
    delta, _ = delta_and_target(source, move, stats, cache)
    return delta
