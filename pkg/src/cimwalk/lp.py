"""Dense two-phase primal simplex with Bland's rule.

Solves  max c.x  s.t.  A x (<=|=|>=) b,  x >= 0.

One tableau layout serves two arithmetic modes: float64 numpy arrays with
vectorized pivots for speed, and Fraction object arrays with exact
comparisons for re-solves of numerically ambiguous instances.  Entering
columns follow Bland's smallest-index rule, which rules out cycling in the
exact mode and is harmless in the float mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_MAX_PIVOTS = 50_000


class LpError(RuntimeError):
    pass


@dataclass
class LpResult:
    status: str
    x: Sequence
    objective: object


def _pivot(tableau, basis, r, col):
    tableau[r] = tableau[r] / tableau[r, col]
    factors = tableau[:, col].copy()
    factors[r] = 0 * factors[r]  # keeps the dtype in object mode
    tableau -= np.outer(factors, tableau[r])
    basis[r] = col


def _run_float(tableau, basis, m, obj_row, allowed_mask, width):
    tol = 1e-9
    for _ in range(_MAX_PIVOTS):
        reduced = tableau[obj_row, : width - 1]
        candidates = np.nonzero((reduced > tol) & allowed_mask)[0]
        if candidates.size == 0:
            return True
        enter = int(candidates[0])
        col = tableau[:m, enter]
        pos = np.nonzero(col > tol)[0]
        if pos.size == 0:
            return False
        ratios = tableau[pos, -1] / col[pos]
        best = ratios.min()
        near = pos[ratios <= best + 1e-12 + 1e-9 * abs(best)]
        leave = int(min(near, key=lambda i: basis[i]))
        _pivot(tableau, basis, leave, enter)
    raise LpError("pivot limit exceeded")


def _run_exact(tableau, basis, m, obj_row, allowed_mask, width):
    zero = Fraction(0)
    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(width - 1):
            if allowed_mask[j] and tableau[obj_row, j] > zero:
                enter = j
                break
        if enter < 0:
            return True
        leave = -1
        best = None
        for i in range(m):
            aij = tableau[i, enter]
            if aij > zero:
                ratio = tableau[i, -1] / aij
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return False
        _pivot(tableau, basis, leave, enter)
    raise LpError("pivot limit exceeded")


def simplex_max(c, a_rows, senses, b, exact: bool = False) -> LpResult:
    """Maximize c.x subject to rows of (a_rows, senses, b) and x >= 0.

    senses[i] is one of '<=', '=', '>='.  With exact=True all data is lifted
    to Fractions and the solve is exact; otherwise float64.
    """
    n = len(c)
    m = len(a_rows)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    def lift(v):
        return Fraction(v) if exact else float(v)

    rows = []
    row_senses = []
    rhs = []
    for i in range(m):
        coeffs = [lift(v) for v in a_rows[i]]
        sense = senses[i]
        bi = lift(b[i])
        if bi < zero:
            coeffs = [-v for v in coeffs]
            bi = -bi
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        rows.append(coeffs)
        row_senses.append(sense)
        rhs.append(bi)

    n_slack = sum(1 for s in row_senses if s in ("<=", ">="))
    n_art = sum(1 for s in row_senses if s in (">=", "="))
    width = n + n_slack + n_art + 1
    art_cols = []
    basis = []
    if exact:
        tableau = np.full((m + 2, width), zero, dtype=object)
    else:
        tableau = np.zeros((m + 2, width), dtype=np.float64)
    slack_at = n
    art_at = n + n_slack
    for i in range(m):
        for j, v in enumerate(rows[i]):
            tableau[i, j] = v
        tableau[i, -1] = rhs[i]
        if row_senses[i] == "<=":
            tableau[i, slack_at] = one
            basis.append(slack_at)
            slack_at += 1
        elif row_senses[i] == ">=":
            tableau[i, slack_at] = -one
            slack_at += 1
            tableau[i, art_at] = one
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        else:
            tableau[i, art_at] = one
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1

    obj1, obj2 = m, m + 1
    # phase-1 objective: the sum of the artificial rows, so the rhs cell
    # tracks the current total infeasibility
    art_set = set(art_cols)
    for i in range(m):
        if basis[i] in art_set:
            tableau[obj1] = tableau[obj1] + tableau[i]
    for col in art_cols:
        tableau[obj1, col] = zero
    # phase-2 objective: reduced costs of the original objective
    for j in range(n):
        tableau[obj2, j] = lift(c[j])

    run = _run_exact if exact else _run_float
    all_mask = np.ones(width - 1, dtype=bool)

    if art_cols:
        finished = run(tableau, basis, m, obj1, all_mask, width)
        if not finished:
            raise LpError("phase 1 reported unbounded")
        feas_tol = zero if exact else 1e-7
        if tableau[obj1, -1] > feas_tol:
            return LpResult(INFEASIBLE, [], None)
        # drive leftover artificials out of the basis
        piv_tol = zero if exact else 1e-9
        drop = []
        for i in range(m):
            if basis[i] in art_set:
                col = -1
                for j in range(width - 1):
                    if j not in art_set and abs(tableau[i, j]) > piv_tol:
                        col = j
                        break
                if col >= 0:
                    _pivot(tableau, basis, i, col)
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in set(drop)]
            tableau = tableau[keep + [obj1, obj2]]
            basis = [basis[i] for i in keep]
            m = len(keep)
            obj1, obj2 = m, m + 1

    mask = all_mask.copy()
    for col in art_cols:
        mask[col] = False
    if not run(tableau, basis, m, obj2, mask, width):
        return LpResult(UNBOUNDED, [], None)

    x = [zero] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i, -1]
    objective = -tableau[obj2, -1]
    return LpResult(OPTIMAL, x, objective)
