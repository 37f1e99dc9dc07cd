"""Exact two-phase simplex over rationals.

Minimizes c.x subject to rows of the form a.x (<=|>=|==) b with x >= 0.
Everything is a Fraction, so optima are exact and comparisons against other
exact quantities (construction costs like 7/15) are meaningful.

Rows are sparse maps column -> value (the right-hand side lives at column
`ncols`), since the allocation programs solved here are overwhelmingly
zeros.  The entering rule is most-negative reduced cost, switching to
Bland's lowest-index rule after a run of degenerate pivots, which keeps
the method cycle-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

LE, GE, EQ = "<=", ">=", "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)

Row = dict[int, Fraction]


@dataclass
class LpResult:
    status: str
    x: list[Fraction] | None = None
    value: Fraction | None = None


def _pivot(rows: list[Row], basis: list[int], r: int, col: int) -> None:
    prow = rows[r]
    piv = prow[col]
    if piv != 1:
        prow = {j: v / piv for j, v in prow.items()}
        rows[r] = prow
    for i, row in enumerate(rows):
        if i == r:
            continue
        factor = row.get(col)
        if not factor:
            continue
        for j, v in prow.items():
            cur = row.get(j, _ZERO) - factor * v
            if cur:
                row[j] = cur
            elif j in row:
                del row[j]
    basis[r] = col


def _run_simplex(rows: list[Row], basis: list[int], ncols: int, allowed) -> str:
    m = len(rows) - 1
    stalled = 0
    while True:
        obj = rows[m]
        bland = stalled > 12
        enter = -1
        most = _ZERO
        for j, v in obj.items():
            if j < ncols and v < 0 and allowed[j]:
                if bland:
                    if enter < 0 or j < enter:
                        enter = j
                elif v < most:
                    most = v
                    enter = j
        if enter < 0:
            return OPTIMAL
        leave = -1
        best: Fraction | None = None
        for r in range(m):
            coeff = rows[r].get(enter)
            if coeff and coeff > 0:
                ratio = rows[r].get(ncols, _ZERO) / coeff
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return UNBOUNDED
        stalled = stalled + 1 if best == 0 else 0
        _pivot(rows, basis, leave, enter)


def solve_lp(
    objective: Sequence[Fraction],
    rows: Sequence[Row | Sequence[Fraction]],
    senses: Sequence[str],
    rhs: Sequence[Fraction],
) -> LpResult:
    """Minimize objective.x with x >= 0 subject to rows[i].x senses[i] rhs[i].

    `rows` entries may be dense sequences or sparse {index: value} maps.
    """
    n = len(objective)
    m = len(rows)

    norm_rows: list[Row] = []
    norm_senses: list[str] = []
    norm_rhs: list[Fraction] = []
    for row, sense, b in zip(rows, senses, rhs):
        if not isinstance(row, dict):
            row = {j: Fraction(v) for j, v in enumerate(row) if v}
        else:
            row = {j: Fraction(v) for j, v in row.items() if v}
        b = Fraction(b)
        if b < 0:
            row = {j: -v for j, v in row.items()}
            b = -b
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        norm_rows.append(row)
        norm_senses.append(sense)
        norm_rhs.append(b)

    slack_count = sum(1 for s in norm_senses if s in (LE, GE))
    ncols_body = n + slack_count
    art_total = sum(1 for s in norm_senses if s in (GE, EQ))
    total_cols = ncols_body + art_total
    rhs_col = total_cols

    tableau: list[Row] = []
    basis: list[int] = []
    art_cols: set[int] = set()
    slack_at = n
    art_at = ncols_body
    for row, sense, b in zip(norm_rows, norm_senses, norm_rhs):
        full = dict(row)
        if b:
            full[rhs_col] = b
        if sense == LE:
            full[slack_at] = _ONE
            basis.append(slack_at)
            slack_at += 1
        elif sense == GE:
            full[slack_at] = -_ONE
            slack_at += 1
            full[art_at] = _ONE
            art_cols.add(art_at)
            basis.append(art_at)
            art_at += 1
        else:
            full[art_at] = _ONE
            art_cols.add(art_at)
            basis.append(art_at)
            art_at += 1
        tableau.append(full)

    allowed = [True] * total_cols

    if art_cols:
        # Phase 1: minimize the artificial total, priced out over the basis.
        phase1: Row = {}
        for r, bcol in enumerate(basis):
            if bcol in art_cols:
                for j, v in tableau[r].items():
                    cur = phase1.get(j, _ZERO) - v
                    if cur:
                        phase1[j] = cur
                    elif j in phase1:
                        del phase1[j]
        for col in art_cols:
            phase1[col] = phase1.get(col, _ZERO) + _ONE
            if not phase1[col]:
                del phase1[col]
        tableau.append(phase1)
        status = _run_simplex(tableau, basis, total_cols, allowed)
        assert status == OPTIMAL  # phase-1 objective is bounded below by 0
        if tableau[-1].get(rhs_col, _ZERO) != 0:
            return LpResult(INFEASIBLE)
        tableau.pop()
        # Pivot leftover artificials out of the basis; drop redundant rows.
        drop: list[int] = []
        for r in range(len(basis)):
            if basis[r] in art_cols:
                col = next(
                    (j for j in sorted(tableau[r]) if j < ncols_body and tableau[r][j]),
                    None,
                )
                if col is None:
                    drop.append(r)
                else:
                    _pivot(tableau, basis, r, col)
        for r in reversed(drop):
            tableau.pop(r)
            basis.pop(r)
        for col in art_cols:
            allowed[col] = False

    # Phase 2: original objective, priced out over the current basis.
    phase2: Row = {j: Fraction(v) for j, v in enumerate(objective) if v}
    for r, bcol in enumerate(basis):
        factor = phase2.get(bcol)
        if factor:
            for j, v in tableau[r].items():
                cur = phase2.get(j, _ZERO) - factor * v
                if cur:
                    phase2[j] = cur
                elif j in phase2:
                    del phase2[j]
    tableau.append(phase2)
    status = _run_simplex(tableau, basis, total_cols, allowed)
    if status != OPTIMAL:
        return LpResult(UNBOUNDED)

    x = [_ZERO] * n
    for r, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = tableau[r].get(rhs_col, _ZERO)
    # pricing out leaves -z in the objective row's rhs cell
    return LpResult(OPTIMAL, x, -tableau[-1].get(rhs_col, _ZERO))


def solve_lp_dual(
    objective: Sequence[Fraction],
    rows: Sequence[Row | Sequence[Fraction]],
    senses: Sequence[str],
    rhs: Sequence[Fraction],
) -> LpResult:
    """Same contract as solve_lp (no == rows, objective >= 0) but pivots on
    the dual program, whose slack basis is immediately feasible: with
    min c.x, A x >= b, x >= 0 and c >= 0, the dual max b.u, A^T u <= c,
    u >= 0 starts at u = 0.  Skipping phase 1 pays off on programs that are
    mostly >= rows, which is what the allocation nodes look like.  The
    primal solution is read off the dual slack columns' reduced costs.
    """
    n = len(objective)
    m = len(rows)
    assert all(Fraction(v) >= 0 for v in objective)

    # normalize to A x >= b
    ge_rows: list[Row] = []
    ge_rhs: list[Fraction] = []
    for row, sense, b in zip(rows, senses, rhs):
        if sense == EQ:
            raise ValueError("solve_lp_dual does not handle == rows")
        if not isinstance(row, dict):
            row = {j: Fraction(v) for j, v in enumerate(row) if v}
        else:
            row = {j: Fraction(v) for j, v in row.items() if v}
        b = Fraction(b)
        if sense == LE:
            row = {j: -v for j, v in row.items()}
            b = -b
        ge_rows.append(row)
        ge_rhs.append(b)

    # dual: min (-b).u  s.t.  (A^T u)_j <= c_j, u >= 0
    cols_of_var: list[Row] = [dict() for _ in range(n)]
    for i, row in enumerate(ge_rows):
        for j, v in row.items():
            cols_of_var[j][i] = v

    rhs_col = m + n  # m dual vars + n dual slacks
    tableau: list[Row] = []
    basis: list[int] = []
    for j in range(n):
        full = dict(cols_of_var[j])
        full[m + j] = _ONE
        cj = Fraction(objective[j])
        if cj:
            full[rhs_col] = cj
        tableau.append(full)
        basis.append(m + j)
    dual_obj: Row = {i: -b for i, b in enumerate(ge_rhs) if b}
    tableau.append(dict(dual_obj))

    allowed = [True] * (m + n)
    status = _run_simplex(tableau, basis, rhs_col, allowed)
    if status == UNBOUNDED:
        return LpResult(INFEASIBLE)

    # optimal: primal values are the reduced costs on the dual slack columns,
    # and the rhs cell holds -min(-b.u) = max(b.u) = the primal optimum
    obj_row = tableau[-1]
    x = [obj_row.get(m + j, _ZERO) for j in range(n)]
    return LpResult(OPTIMAL, x, obj_row.get(rhs_col, _ZERO))
