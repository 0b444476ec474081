"""Characteristic imsets: 0/1 vectors indexed by node subsets of size >= 2.

The entry at S is 1 exactly when some node i in S has all of S \\ {i} among
its parents.  Two DAGs are Markov equivalent iff their imsets coincide, and
the entries on subsets of size two and three already determine the rest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .graphs import Dag, GraphError, Mec, UndirectedGraph, VStructure

MAX_FULL_P = 16

SubsetKey = tuple


def subset_key(nodes: Iterable) -> SubsetKey:
    key = tuple(sorted(nodes))
    if len(set(key)) != len(key):
        raise ValueError(f"subset has repeated nodes: {nodes}")
    if len(key) < 2:
        raise ValueError("imset entries are indexed by subsets of size >= 2")
    return key


class ImsetError(ValueError):
    pass


@dataclass(frozen=True)
class CharImset:
    """Sparse characteristic imset: the set of subsets with entry 1.

    restricted=True means only entries on subsets of size 2 and 3 are stored;
    restricted=False means all subset sizes from 2 to p are covered.
    """

    p: int
    ones: frozenset
    restricted: bool = True

    def __post_init__(self):
        for key in self.ones:
            if len(key) < 2 or any(not (0 <= v < self.p) for v in key):
                raise ImsetError(f"bad subset key {key}")
            if self.restricted and len(key) > 3:
                raise ImsetError(f"restricted imset has key {key} of size > 3")

    def entry(self, nodes: Iterable) -> int:
        key = subset_key(nodes)
        if self.restricted and len(key) > 3:
            raise ImsetError("restricted imset has no entries beyond size 3")
        return 1 if key in self.ones else 0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "restricted": self.restricted,
            "ones": sorted(list(k) for k in self.ones),
        }

    @staticmethod
    def from_json(obj: dict) -> "CharImset":
        return CharImset(
            int(obj["p"]),
            frozenset(subset_key(k) for k in obj["ones"]),
            bool(obj.get("restricted", True)),
        )


def imset_entry(dag: Dag, nodes: Iterable) -> int:
    key = subset_key(nodes)
    for i in key:
        _check = all(0 <= v < dag.p for v in key)
        if not _check:
            raise ImsetError(f"subset {key} out of range for p={dag.p}")
        break
    s = set(key)
    for i in key:
        if s - {i} <= dag.parents[i]:
            return 1
    return 0


def restricted_imset(dag: Dag) -> CharImset:
    ones = set()
    for i in range(dag.p):
        pa = sorted(dag.parents[i])
        for k in pa:
            ones.add(subset_key((i, k)))
        for a, b in itertools.combinations(pa, 2):
            ones.add(subset_key((i, a, b)))
    return CharImset(dag.p, frozenset(ones), restricted=True)


def full_imset(dag: Dag) -> CharImset:
    """All entries; walks parent-set subsets, so cost is sum of 2^|pa(i)|."""
    if dag.p > MAX_FULL_P:
        raise ImsetError(f"full imset limited to p <= {MAX_FULL_P}")
    ones = set()
    for i in range(dag.p):
        pa = sorted(dag.parents[i])
        for r in range(1, len(pa) + 1):
            for sub in itertools.combinations(pa, r):
                ones.add(subset_key(sub + (i,)))
    return CharImset(dag.p, frozenset(ones), restricted=False)


@lru_cache(maxsize=1_000_000)
def mec_restricted_imset(mec: Mec) -> CharImset:
    """Restricted imset of a class straight from skeleton and v-structures.

    Size-2 entries are the skeleton edges.  A size-3 entry is 1 iff the
    triple is a complete triangle of the skeleton or a recorded v-structure.
    """
    ones = set(mec.skeleton.edges)
    for a, b, c in itertools.combinations(range(mec.p), 3):
        if (
            mec.skeleton.has_edge(a, b)
            and mec.skeleton.has_edge(a, c)
            and mec.skeleton.has_edge(b, c)
        ):
            ones.add((a, b, c))
    for vs in mec.vstructs:
        ones.add(vs.nodes())
    return CharImset(mec.p, frozenset(ones), restricted=True)


def recover_mec(imset: CharImset) -> Mec:
    """Rebuild skeleton and v-structures from size-2/3 entries.

    Raises ImsetError when the entries are structurally impossible for any
    DAG: a size-3 one whose triple has fewer than two skeleton edges, or a
    complete skeleton triangle whose size-3 entry is zero.
    """
    edges = {k for k in imset.ones if len(k) == 2}
    skel = UndirectedGraph(imset.p, frozenset(edges))
    vstructs = set()
    for key in imset.ones:
        if len(key) != 3:
            continue
        a, b, c = key
        present = [pair for pair in ((a, b), (a, c), (b, c)) if pair in edges]
        if len(present) < 2:
            raise ImsetError(f"size-3 entry {key} with fewer than two edges")
        if len(present) == 2:
            missing = next(pair for pair in ((a, b), (a, c), (b, c)) if pair not in edges)
            collider = next(v for v in key if v not in missing)
            vstructs.add(VStructure(collider, missing))
    for a, b, c in itertools.combinations(range(imset.p), 3):
        if (a, b) in edges and (a, c) in edges and (b, c) in edges:
            if (a, b, c) not in imset.ones:
                raise ImsetError(f"complete triangle {(a, b, c)} with zero entry")
    try:
        return Mec(skel, frozenset(vstructs))
    except GraphError as exc:  # pragma: no cover - guarded by the checks above
        raise ImsetError(str(exc)) from exc


def imset_delta(a: CharImset, b: CharImset) -> tuple:
    """(added, removed) subset keys going from a to b."""
    if a.p != b.p:
        raise ImsetError("imsets have different p")
    if a.restricted != b.restricted:
        raise ImsetError("cannot diff restricted against full imsets")
    return (frozenset(b.ones - a.ones), frozenset(a.ones - b.ones))
