"""Moves between Markov equivalence classes, seen as steps between imsets.

A move records the signed difference between the characteristic imsets of
two classes: `added` entries flip 0 -> 1 and `removed` entries flip 1 -> 0
when walking from the source class to the target.  Move kinds:

  v_structure_addition  single size-3 entry, same skeleton
  budding               one-sided family over a pair {i, j}, same skeleton
  flip                  two-sided family over a pair {i, j}, same skeleton
  edge_pair             skeletons differ in exactly one edge
  shift / split         v-structures traded along a path (trees and cycles)

Enumerators emit only verified moves: the claimed delta is checked against
full imsets recomputed from representative DAGs of both endpoints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from .graphs import (
    CycleError,
    Dag,
    GraphError,
    Mec,
    consistent_extension,
    mec_of,
)
from .imset import (
    CharImset,
    ImsetError,
    full_imset,
    imset_delta,
    imset_entry,
    mec_restricted_imset,
    recover_mec,
    subset_key,
)

MARKOV_EQUIVALENT = "markov_equivalent"
V_STRUCTURE_ADDITION = "v_structure_addition"
BUDDING = "budding"
FLIP = "flip"
EDGE_PAIR = "edge_pair"
SHIFT = "shift"
SPLIT = "split"

TURN_KINDS = (V_STRUCTURE_ADDITION, BUDDING, FLIP)


class MoveError(ValueError):
    """Raised when a claimed move is not realizable as a step between classes."""


@dataclass(frozen=True)
class Move:
    """A signed imset delta relative to a source class, with a kind label."""

    kind: str
    params: tuple
    added: frozenset
    removed: frozenset

    def delta(self) -> tuple:
        return (self.added, self.removed)

    def inverse(self) -> "Move":
        return Move(self.kind, self.params, self.removed, self.added)

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, (tuple, frozenset)):
                return [enc(v) for v in (sorted(x) if isinstance(x, frozenset) else x)]
            return x

        return {
            "kind": self.kind,
            "params": enc(self.params),
            "added": sorted(list(k) for k in self.added),
            "removed": sorted(list(k) for k in self.removed),
        }


def representative(mec: Mec) -> Dag:
    dag = consistent_extension(mec)
    if dag is None:
        raise MoveError("class is not realizable by any DAG")
    return dag


# ---------------------------------------------------------------------------
# Single-arc operations on DAGs


def turn_edge_delta(dag: Dag, i: int, j: int) -> Move:
    """Classify the reversal of arc i -> j as a move between the two classes.

    The delta is built from the two parent-set families
    A+ = {S + {i,j} : S within pa(i)} and A- = {S + {i,j} : S within pa(j)-{i}};
    entries in A+ only are gained and entries in A- only are lost.  The kind
    follows from how pa(i) and pa(j)-{i} relate: equal parent sets give a
    Markov-equivalent reversal, incomparable ones a flip, and nested ones a
    budding (or a v-structure addition when the larger side is a singleton).
    """
    if not dag.has_arc(i, j):
        raise GraphError(f"no arc {(i, j)}")
    dag.reverse_arc(i, j)  # raises CycleError when the reversal is cyclic
    pa_i = frozenset(dag.parents[i])
    pa_j = frozenset(dag.parents[j]) - {i}

    def fam(base):
        out = set()
        for r in range(len(base) + 1):
            for sub in itertools.combinations(sorted(base), r):
                out.add(subset_key(sub + (i, j)))
        return out

    a_plus = fam(pa_i)
    a_minus = fam(pa_j)
    added = frozenset(a_plus - a_minus)
    removed = frozenset(a_minus - a_plus)

    if pa_i == pa_j:
        return Move(MARKOV_EQUIVALENT, (i, j), frozenset(), frozenset())
    if pa_i - pa_j and pa_j - pa_i:
        return Move(FLIP, (i, j, tuple(sorted(pa_i)), tuple(sorted(pa_j))), added, removed)
    if pa_j < pa_i:
        if len(pa_i) >= 2:
            return Move(BUDDING, (i, j, tuple(sorted(pa_i))), added, removed)
        return Move(V_STRUCTURE_ADDITION, (subset_key((i, j) + tuple(pa_i)),), added, removed)
    # pa_i < pa_j: the reversed graph is the sparse side of the pair
    if len(pa_j) >= 2:
        return Move(BUDDING, (j, i, tuple(sorted(pa_j))), added, removed)
    return Move(V_STRUCTURE_ADDITION, (subset_key((i, j) + tuple(pa_j)),), added, removed)


def add_edge_delta(dag: Dag, tail: int, head: int) -> Move:
    """The move realized by adding arc tail -> head between non-adjacent nodes.

    Every subset of pa(head) joined with {tail, head} flips from 0 to 1;
    nothing is removed.
    """
    if dag.adjacent(tail, head):
        raise GraphError(f"nodes {tail},{head} already adjacent")
    dag.add_arc(tail, head)  # raises CycleError when the addition is cyclic
    pa = sorted(dag.parents[head])
    added = set()
    for r in range(len(pa) + 1):
        for sub in itertools.combinations(pa, r):
            added.add(subset_key(sub + (tail, head)))
    return Move(EDGE_PAIR, (head, tail, tuple(pa)), frozenset(added), frozenset())


# ---------------------------------------------------------------------------
# Applying and verifying moves on classes


def apply_move(mec: Mec, move: Move) -> Mec:
    """Apply a move's delta to a class and return the target class.

    Only size-2/3 entries are needed to rebuild the target.  Raises MoveError
    when the delta clashes with the current entries, the updated entries are
    impossible for any DAG, or the resulting class is not realizable.
    """
    base = set(mec_restricted_imset(mec).ones)
    for key in move.added:
        if len(key) > 3:
            continue
        if key in base:
            raise MoveError(f"added entry {key} already present")
        base.add(key)
    for key in move.removed:
        if len(key) > 3:
            continue
        if key not in base:
            raise MoveError(f"removed entry {key} not present")
        base.remove(key)
    try:
        target = recover_mec(CharImset(mec.p, frozenset(base), restricted=True))
    except ImsetError as exc:
        raise MoveError(str(exc)) from exc
    if mec_restricted_imset(target).ones != frozenset(base):
        raise MoveError("updated entries are inconsistent")
    if consistent_extension(target) is None:
        raise MoveError("target class is not realizable")
    return target


def verify_pair(source: Mec, target: Mec, move: Move) -> bool:
    """Check the move's delta against full imsets recomputed from scratch."""
    cs = full_imset(representative(source))
    ct = full_imset(representative(target))
    added, removed = imset_delta(cs, ct)
    return added == move.added and removed == move.removed


# ---------------------------------------------------------------------------
# Candidate generation

_EMPTY = ()


@lru_cache(maxsize=200_000)
def _admissible(mec: Mec, i: int, cap: Optional[int]) -> tuple:
    """Subsets T of ne(i) whose every nonempty subset S has entry(S+{i}) == 1.

    The family is downward closed, so it is grown level by level; returned in
    (size, lex) order.  `cap` bounds the subset size.
    """
    rep = representative(mec)
    nbrs = sorted(mec.skeleton.neighbors(i))
    out = [(k,) for k in nbrs]
    valid = {(k,) for k in nbrs}
    level = out[:]
    size = 1
    while level and (cap is None or size < cap):
        size += 1
        nxt = []
        for t in level:
            for k in nbrs:
                if k <= t[-1]:
                    continue
                cand = t + (k,)
                if all(tuple(x for x in cand if x != y) in valid for y in cand):
                    if imset_entry(rep, cand + (i,)) == 1:
                        valid.add(cand)
                        nxt.append(cand)
        out.extend(nxt)
        level = nxt
    return tuple(out)


def _family(s_star: tuple, i: int, j: int, excluded_nbrs: frozenset) -> frozenset:
    """{T + {i,j} : nonempty T within s_star, T not within excluded_nbrs}."""
    out = set()
    for r in range(1, len(s_star) + 1):
        for sub in itertools.combinations(s_star, r):
            if not (set(sub) <= excluded_nbrs):
                out.add(subset_key(sub + (i, j)))
    return frozenset(out)


def _raw_turn_candidates(mec: Mec, cap: Optional[int]) -> Iterator[Move]:
    """Parameter sweep for turn moves; deterministic (i, j, S_i, S_j) order.

    For ordered adjacent (i, j) and subset pairs S_i of ne(i)-{j} and S_j of
    ne(j)-{i}: entries over S_i joined with {i, j} must currently be 0 (they
    are gained) and entries over S_j joined with {i, j} must be 1 (lost).
    One side may be empty; the empty/singleton/larger split of the non-empty
    sides yields the kind.  Preconditions on entries of the form S + {i} are
    enforced through the admissible families.
    """
    rep = representative(mec)
    p = mec.p
    ne = [mec.skeleton.neighbors(i) for i in range(p)]

    def c(key):
        return imset_entry(rep, key)

    for i in range(p):
        for j in sorted(ne[i]):
            s_i_list = [_EMPTY] + [t for t in _admissible(mec, i, cap) if j not in t]
            s_j_list = [_EMPTY] + [t for t in _admissible(mec, j, cap) if i not in t]
            for s_i in s_i_list:
                if s_i and set(s_i) <= ne[j]:
                    continue
                plus = _family(s_i, i, j, ne[j]) if s_i else frozenset()
                if any(c(k) for k in plus):
                    continue
                for s_j in s_j_list:
                    if not s_i and not s_j:
                        continue
                    if s_j and set(s_j) <= ne[i]:
                        continue
                    minus = _family(s_j, j, i, ne[i]) if s_j else frozenset()
                    if any(not c(k) for k in minus):
                        continue
                    if s_i and s_j:
                        yield Move(FLIP, (i, j, s_i, s_j), plus, minus)
                    elif s_i:
                        if len(s_i) == 1:
                            yield Move(V_STRUCTURE_ADDITION, (next(iter(plus)),), plus, minus)
                        else:
                            yield Move(BUDDING, (i, j, s_i), plus, minus)
                    else:
                        if len(s_j) == 1:
                            yield Move(V_STRUCTURE_ADDITION, (next(iter(minus)),), plus, minus)
                        else:
                            yield Move(BUDDING, (j, i, s_j), plus, minus)


def _raw_edge_candidates(mec: Mec, cap: Optional[int]) -> Iterator[Move]:
    """Parameter sweep for edge moves, additions and deletions.

    Non-adjacent ordered (i, j): the family {S + {i,j} : S within S*} is
    gained, so all its entries must be 0.  Adjacent (i, j): the same family
    is lost, so all entries must be 1.
    """
    rep = representative(mec)
    p = mec.p
    ne = [mec.skeleton.neighbors(i) for i in range(p)]

    def c(key):
        return imset_entry(rep, key)

    for i in range(p):
        for j in range(p):
            if i == j:
                continue
            adjacent = j in ne[i]
            for s_star in [_EMPTY] + [t for t in _admissible(mec, i, cap) if j not in t]:
                fam = {subset_key((i, j))} | _family(s_star, i, j, frozenset())
                if adjacent:
                    if all(c(k) for k in fam):
                        yield Move(EDGE_PAIR, (i, j, s_star), frozenset(), frozenset(fam))
                else:
                    if not any(c(k) for k in fam):
                        yield Move(EDGE_PAIR, (i, j, s_star), frozenset(fam), frozenset())


def _tree_paths(mec: Mec) -> Iterator[tuple]:
    """Paths usable by shifts and splits, with at least four nodes.

    On a tree these are the unique simple paths between node pairs, in both
    orientations.  On a cycle, walks that keep advancing in one direction may
    wrap past the start, as long as no middle triple repeats; both directions
    and all start points are produced.
    """
    skel = mec.skeleton
    p = skel.p
    if skel.is_tree():
        for a in range(p):
            prev = {a: None}
            queue = [a]
            while queue:
                x = queue.pop(0)
                for y in sorted(skel.neighbors(x)):
                    if y not in prev:
                        prev[y] = x
                        queue.append(y)
            for b in range(p):
                if b == a:
                    continue
                path = [b]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                path.reverse()
                if len(path) >= 4:
                    yield tuple(path)
    elif skel.is_single_cycle():
        succ = {}
        start = 0
        nbrs = sorted(skel.neighbors(start))
        order = [start, nbrs[0]]
        while len(order) < p:
            nxt = [y for y in skel.neighbors(order[-1]) if y != order[-2]]
            order.append(nxt[0])
        for s in range(p):
            for direction in (1, -1):
                for n_nodes in range(4, p + 3):
                    yield tuple(order[(s + direction * k) % p] for k in range(n_nodes))
    else:
        raise MoveError("shifts and splits require a tree or single-cycle skeleton")


def _raw_tree_candidates(mec: Mec) -> Iterator[Move]:
    rep = representative(mec)

    def c(key):
        return imset_entry(rep, key)

    for path in _tree_paths(mec):
        n = len(path)
        triples = [subset_key((path[j - 1], path[j], path[j + 1])) for j in range(1, n - 1)]
        if len(set(triples)) != len(triples):
            continue
        odd = frozenset(triples[0::2])
        even = frozenset(triples[1::2])
        if n % 2 == 1 and len(triples) < 3:
            continue  # a one-triple split is just a v-structure addition
        if any(c(k) for k in odd) or any(not c(k) for k in even):
            continue
        kind = SHIFT if n % 2 == 0 else SPLIT
        yield Move(kind, (path,), odd, even)


def _verified(mec: Mec, raw: Iterator[Move]) -> Iterator[tuple]:
    seen = set()
    for move in raw:
        key = (move.added, move.removed)
        if key in seen:
            continue
        seen.add(key)
        try:
            target = apply_move(mec, move)
        except MoveError:
            continue
        if verify_pair(mec, target, move):
            yield move, target


def enumerate_turn_moves(mec: Mec, cap: Optional[int] = None) -> list:
    """All verified turn moves (v-structure additions, buddings, flips) from mec."""
    return list(_verified(mec, _raw_turn_candidates(mec, cap)))


def enumerate_edge_moves(mec: Mec, cap: Optional[int] = None) -> list:
    """All verified edge moves (single-edge additions and deletions) from mec."""
    return list(_verified(mec, _raw_edge_candidates(mec, cap)))


def enumerate_tree_moves(mec: Mec) -> list:
    """All verified shifts and splits from mec (tree or single-cycle skeleton)."""
    return list(_verified(mec, _raw_tree_candidates(mec)))
