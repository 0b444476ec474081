"""Gaussian conditional-independence tests and skeleton recovery.

Fisher's z test on partial correlations, and a stable variant of the
PC skeleton phase: adjacency sets are frozen at the start of each
conditioning-size level, so the output does not depend on edge
processing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from .graphs import UndirectedGraph
from .scoring import SufficientStats

__all__ = [
    "CiTestError",
    "CiDecision",
    "fisher_z_test",
    "pc_skeleton",
]


class CiTestError(Exception):
    """Raised for malformed test requests or degenerate statistics."""


@dataclass(frozen=True)
class CiDecision:
    """Outcome of one conditional-independence test.

    ``independent`` is True exactly when ``p_value > alpha``.
    """

    i: int
    j: int
    cond: tuple[int, ...]
    statistic: float
    p_value: float
    independent: bool


def _partial_correlation(i: int, j: int, cond: tuple[int, ...],
                         cov: np.ndarray) -> float:
    idx = [i, j, *cond]
    block = cov[np.ix_(idx, idx)]
    try:
        prec = np.linalg.inv(block)
    except np.linalg.LinAlgError:
        raise CiTestError(
            f"singular covariance block for ({i},{j}) given {list(cond)}")
    denom = prec[0, 0] * prec[1, 1]
    if denom <= 0.0:
        raise CiTestError(
            f"non-positive precision diagonal for ({i},{j}) given {list(cond)}")
    return float(-prec[0, 1] / math.sqrt(denom))


def fisher_z_test(i: int, j: int, cond: Iterable[int],
                  stats: SufficientStats, alpha: float) -> CiDecision:
    """Two-sided Fisher z test of i independent of j given cond."""
    cond = tuple(sorted(set(cond)))
    p = stats.p
    if i == j or i in cond or j in cond:
        raise CiTestError(f"test nodes ({i},{j}) overlap conditioning set {cond}")
    if any(not 0 <= v < p for v in (i, j, *cond)):
        raise CiTestError(f"node out of range in ({i},{j}|{cond}) for p={p}")
    if stats.n <= len(cond) + 3:
        raise CiTestError(
            f"need n > |cond| + 3, got n={stats.n} with |cond|={len(cond)}")
    r = _partial_correlation(i, j, cond, stats.cov_matrix())
    scale = math.sqrt(stats.n - len(cond) - 3)
    if abs(r) >= 1.0:
        statistic = math.inf if r > 0 else -math.inf
        p_value = 0.0
    else:
        statistic = scale * math.atanh(r)
        p_value = math.erfc(abs(statistic) / math.sqrt(2.0))
    return CiDecision(i=i, j=j, cond=cond, statistic=statistic,
                      p_value=p_value, independent=p_value > alpha)


def pc_skeleton(stats: SufficientStats, alpha: float,
                max_cond: Optional[int] = None):
    """Skeleton phase of the PC algorithm (order-stable variant).

    Returns (graph, sepsets): the recovered undirected skeleton and a
    map from each removed pair to the first separating set found.
    Pairs are scanned in lexicographic order, conditioning sets in
    lexicographic order within each level, and neighborhoods are the
    ones frozen when the level began.
    """
    p = stats.p
    if not 0.0 < alpha < 1.0:
        raise CiTestError(f"alpha must be in (0,1), got {alpha}")
    graph = UndirectedGraph.from_edges(p, combinations(range(p), 2))
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}
    level = 0
    while True:
        if max_cond is not None and level > max_cond:
            break
        frozen = {v: tuple(sorted(graph.neighbors(v))) for v in range(p)}
        if all(len(frozen[v]) - 1 < level for v in range(p)):
            break
        if stats.n <= level + 3:
            break
        for i, j in combinations(range(p), 2):
            if not graph.has_edge(i, j):
                continue
            removed = False
            for anchor, other in ((i, j), (j, i)):
                pool = tuple(v for v in frozen[anchor] if v != other)
                if len(pool) < level:
                    continue
                for cond in combinations(pool, level):
                    decision = fisher_z_test(i, j, cond, stats, alpha)
                    if decision.independent:
                        graph = graph.remove_edge(i, j)
                        sepsets[(i, j)] = decision.cond
                        sepsets[(j, i)] = decision.cond
                        removed = True
                        break
                if removed:
                    break
        level += 1
    return graph, sepsets
