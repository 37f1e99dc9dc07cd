"""Exact optimum of the separate-coding allocation problem.

Minimize the storage cost alpha over all per-state, per-version allocations
subject to: allocations are nonnegative, each state's total stays within
alpha, and for every multiset of c nonempty states with a common version,
some version at or after the latest common one must reach total allocation
1 across the multiset.  The "some version" disjunction is linearized with
binary selectors y_v and big-M constant 1 (valid because the covered sums
are nonnegative, so sum >= 1 - 1 = 0 is vacuous when y_v = 1), then solved
by branch and bound over the y with exact rational LP relaxations.

Two exactness-preserving reductions keep the search small:

- Multisets whose disjunction has a single live version are linear, and
  that sub-family is equivalent to one bound per state: a state must hold
  at least 1/c of its own latest version (take the uniform multiset for
  one direction, sum the bounds for the other).  These bounds go into
  every LP; only genuinely disjunctive multisets need selectors.
- Disjunctive constraints are activated lazily: solve over the active
  subset, test the optimal table against the full family, add the first
  violated constraints, repeat.  A subset optimum never exceeds the full
  optimum, so when the subset's optimal table satisfies everything it is
  optimal overall.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

from .allocation import (
    AllocationTable,
    VersionSet,
    all_states,
    build_construction_table,
)
from .simplex import GE, INFEASIBLE, LE, OPTIMAL, solve_lp_dual

GUARD_NU = 3
GUARD_C = 7
BATCH = 16

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)


class GuardExceededError(RuntimeError):
    def __init__(self, c: int, nu: int):
        states = (1 << nu) - 1
        estimate = comb(states + c - 1, c)
        super().__init__(
            f"(c={c}, nu={nu}) exceeds the solver guard (nu <= {GUARD_NU}, "
            f"c <= {GUARD_C}); ~{estimate} state multisets"
        )
        self.estimate = estimate


@dataclass(frozen=True)
class RecoveryConstraint:
    """One multiset of c states with a common version; the constraint is the
    disjunction over candidate versions of 'total allocation >= 1'."""

    multiset: tuple[VersionSet, ...]
    floor: int  # latest common version
    n_versions: int

    @property
    def candidate_versions(self) -> range:
        return range(self.floor, self.n_versions + 1)

    def coverage(self, version: int) -> list[VersionSet]:
        return [s for s in self.multiset if version in s]

    def live_versions(self) -> list[int]:
        return [v for v in self.candidate_versions if self.coverage(v)]


def enumerate_constraints(c: int, nu: int) -> list[RecoveryConstraint]:
    """Every multiset of c nonempty states with a common version, in
    canonical (mask-sorted) order.  Multisets suffice because allocations
    are functions of the state alone."""
    if nu > GUARD_NU or c > GUARD_C:
        raise GuardExceededError(c, nu)
    out = []
    for multiset in combinations_with_replacement(all_states(nu), c):
        common = multiset[0].mask
        for s in multiset[1:]:
            common &= s.mask
        if common:
            out.append(RecoveryConstraint(multiset, common.bit_length(), nu))
    return out


@dataclass
class OptimalityProof:
    """Search summary backing an exact optimum claim."""

    alpha_star: Fraction
    rounds: int
    active_constraints: int
    total_constraints: int
    nodes_explored: int
    nodes_pruned_bound: int
    nodes_pruned_infeasible: int
    branch_rule: str
    incumbent_updates: list[Fraction] = field(default_factory=list)


@dataclass
class MilpSolution:
    alpha_star: Fraction
    table: AllocationTable
    proof: OptimalityProof


class _Program:
    """LP layout shared by all branch-and-bound nodes of one active set.

    Allocation variables are materialized only where some >=-row can push
    them above zero (a state's own latest version, or a version covered by
    an active constraint); everything else is zero at any optimum since it
    would only consume a state's alpha budget.
    """

    def __init__(self, c: int, nu: int, active: list[RecoveryConstraint]):
        self.c = c
        self.nu = nu
        self.active = active
        self.states = all_states(nu)
        used: set[tuple[VersionSet, int]] = {(s, s.latest()) for s in self.states}
        for cons in active:
            for v in cons.live_versions():
                for s in cons.coverage(v):
                    used.add((s, v))
        self.alloc_index: dict[tuple[VersionSet, int], int] = {}
        idx = 1  # variable 0 is alpha
        for s in self.states:
            for v in s:
                if (s, v) in used:
                    self.alloc_index[(s, v)] = idx
                    idx += 1
        self.y_keys: list[tuple[int, int]] = []  # (constraint position, version)
        self.y_index: dict[tuple[int, int], int] = {}
        for k, cons in enumerate(active):
            for v in cons.live_versions():
                self.y_index[(k, v)] = idx
                self.y_keys.append((k, v))
                idx += 1
        self.num_vars = idx

    def build_lp(self, fixed: dict[tuple[int, int], int]):
        rows: list[dict[int, Fraction]] = []
        senses: list[str] = []
        rhs: list[Fraction] = []
        share = Fraction(1, self.c)

        for s in self.states:
            # state budget: total allocation <= alpha
            row = {0: -_ONE}
            for v in s:
                i = self.alloc_index.get((s, v))
                if i is not None:
                    row[i] = _ONE
            rows.append(row)
            senses.append(LE)
            rhs.append(_ZERO)
            # uniform-multiset bound: a state holds >= 1/c of its latest version
            rows.append({self.alloc_index[(s, s.latest())]: _ONE})
            senses.append(GE)
            rhs.append(share)

        for k, cons in enumerate(self.active):
            live = cons.live_versions()
            free: list[int] = []
            budget = len(live) - 1  # at least one selector must be 0
            aggregate: dict[int, Fraction] = {}
            for v in live:
                for s in cons.coverage(v):
                    i = self.alloc_index[(s, v)]
                    aggregate[i] = aggregate.get(i, _ZERO) + _ONE
                fix = fixed.get((k, v))
                if fix == 1:
                    budget -= 1
                    continue  # coverage row vacuous under big-M = 1
                row = {}
                for s in cons.coverage(v):
                    i = self.alloc_index[(s, v)]
                    row[i] = row.get(i, _ZERO) + _ONE
                if fix is None:
                    row[self.y_index[(k, v)]] = _ONE
                    free.append(v)
                rows.append(row)  # sum alloc (+ y) >= 1
                senses.append(GE)
                rhs.append(_ONE)
            # aggregate cut: summing the disjuncts is implied by any of them
            rows.append(aggregate)
            senses.append(GE)
            rhs.append(_ONE)
            if budget < 0:
                return None  # every disjunct switched off: infeasible node
            if free:
                rows.append({self.y_index[(k, v)]: _ONE for v in free})
                senses.append(LE)
                rhs.append(Fraction(budget))
                if budget >= 2:  # otherwise the budget row already caps each y at 1
                    for v in free:
                        rows.append({self.y_index[(k, v)]: _ONE})
                        senses.append(LE)
                        rhs.append(_ONE)

        objective = [_ZERO] * self.num_vars
        objective[0] = _ONE
        return objective, rows, senses, rhs

    def table_from(self, x: list[Fraction]) -> AllocationTable:
        entries = {
            s: {v: x[self.alloc_index[(s, v)]] if (s, v) in self.alloc_index else _ZERO for v in s}
            for s in self.states
        }
        return AllocationTable(self.nu, self.c, entries, x[0])

    def alloc_covers(self, x, cons: RecoveryConstraint) -> bool:
        for v in cons.live_versions():
            total = _ZERO
            for s in cons.coverage(v):
                i = self.alloc_index.get((s, v))
                if i is not None:
                    total += x[i]
            if total >= 1:
                return True
        return False


def _constraint_satisfied(cons: RecoveryConstraint, table: AllocationTable) -> bool:
    return any(
        sum(table.allocation(s, v) for s in cons.multiset) >= 1
        for v in cons.candidate_versions
    )


def _pick_batch(
    violated: list[RecoveryConstraint], table: AllocationTable
) -> list[RecoveryConstraint]:
    """Most-violated constraints first, at most two per support set, so each
    round adds cuts that say something new instead of near-duplicates."""
    ranked = []
    for pos, cons in enumerate(violated):
        best = max(
            sum(table.allocation(s, v) for s in cons.multiset)
            for v in cons.candidate_versions
        )
        ranked.append((best, pos, cons))
    ranked.sort(key=lambda item: (item[0], item[1]))
    picked: list[RecoveryConstraint] = []
    per_support: dict[frozenset, int] = {}
    for _, _, cons in ranked:
        support = frozenset(cons.multiset)
        if per_support.get(support, 0) >= 2:
            continue
        per_support[support] = per_support.get(support, 0) + 1
        picked.append(cons)
        if len(picked) >= BATCH:
            break
    return picked


def _pick_fractional(program: _Program, x, fixed, unsatisfied: list[int], rule: str):
    """A selector to branch on, drawn from constraints whose disjunction the
    allocations do not yet satisfy.  Such a constraint always carries a
    strictly fractional free selector: its coverage rows force y > 0 while
    the budget row keeps the y from all being 1."""
    fractional = []
    want = set(unsatisfied)
    for k, v in program.y_keys:
        if k not in want or (k, v) in fixed:
            continue
        val = x[program.y_index[(k, v)]]
        if val.denominator != 1:
            fractional.append((abs(val - _HALF), k, v))
    assert fractional, "unsatisfied constraint without a fractional selector"
    if rule == "index":
        return min((k, v) for _, k, v in fractional)
    _, k, v = min(fractional)
    return (k, v)


def _branch_and_bound(
    program: _Program,
    incumbent_value: Fraction,
    incumbent_table: AllocationTable,
    rule: str,
    proof: OptimalityProof,
):
    stack: list[dict[tuple[int, int], int]] = [{}]
    while stack:
        fixed = stack.pop()
        proof.nodes_explored += 1
        lp = program.build_lp(fixed)
        if lp is None:
            proof.nodes_pruned_infeasible += 1
            continue
        result = solve_lp_dual(*lp)
        if result.status == INFEASIBLE:
            proof.nodes_pruned_infeasible += 1
            continue
        assert result.status == OPTIMAL  # alpha >= 0 bounds the program below
        if result.value >= incumbent_value:
            proof.nodes_pruned_bound += 1
            continue
        unsatisfied = [
            k
            for k, cons in enumerate(program.active)
            if not program.alloc_covers(result.x, cons)
        ]
        if not unsatisfied:
            # allocations alone satisfy every disjunction: a feasible point
            incumbent_value = result.value
            incumbent_table = program.table_from(result.x)
            proof.incumbent_updates.append(incumbent_value)
            continue
        if rule == "disjunct":
            # one child per live version of an unsatisfied constraint, each
            # enforcing that version's coverage outright (y_v = 0); any
            # integral solution lands in at least one child.  Prefer few
            # children and a wide violation, so bounds move fast.
            def badness(k: int):
                cons = program.active[k]
                best = max(
                    sum(
                        result.x[program.alloc_index[(s, v)]]
                        for s in cons.coverage(v)
                    )
                    for v in cons.live_versions()
                )
                return (len(cons.live_versions()), best, k)

            k = min(unsatisfied, key=badness)
            for v in reversed(program.active[k].live_versions()):
                child = dict(fixed)
                child[(k, v)] = 0
                stack.append(child)
        else:
            k, v = _pick_fractional(program, result.x, fixed, unsatisfied, rule)
            for choice in (1, 0):  # LIFO: the y=0 child runs first
                child = dict(fixed)
                child[(k, v)] = choice
                stack.append(child)
    return incumbent_value, incumbent_table


def solve_milp(c: int, nu: int, branch_rule: str = "disjunct") -> MilpSolution:
    """Exact minimum storage cost over separate-coding allocations.

    The coded construction seeds the incumbent (it satisfies every recovery
    constraint), so the search can only confirm or improve it; pruning
    compares exact rationals, and the lazily grown active set ends with a
    table that satisfies the full constraint family at the final bound.
    """
    constraints = enumerate_constraints(c, nu)
    disjunctive = [k for k in constraints if len(k.live_versions()) > 1]
    seed_table = build_construction_table(c, nu)
    proof = OptimalityProof(
        alpha_star=seed_table.alpha,
        rounds=0,
        active_constraints=0,
        total_constraints=len(constraints),
        nodes_explored=0,
        nodes_pruned_bound=0,
        nodes_pruned_infeasible=0,
        branch_rule=branch_rule,
    )
    active: list[RecoveryConstraint] = []
    in_active: set[tuple] = set()

    def activate(batch: list[RecoveryConstraint]) -> int:
        added = 0
        for cons in batch:
            if cons.multiset not in in_active:
                in_active.add(cons.multiset)
                active.append(cons)
                added += 1
        return added

    # Cut seeding: grow the active set against root-relaxation tables only.
    # Purely heuristic (any active set gives a valid lower problem); it just
    # spares the exact search below from restarting on weak cut pools.
    prev_root = None
    stalls = 0
    for _ in range(80):
        program = _Program(c, nu, active)
        result = solve_lp_dual(*program.build_lp({}))
        assert result.status == OPTIMAL
        table = program.table_from(result.x)
        fresh = [
            k
            for k in disjunctive
            if k.multiset not in in_active and not _constraint_satisfied(k, table)
        ]
        if not fresh:
            break
        stalls = stalls + 1 if (prev_root is not None and result.value <= prev_root) else 0
        if stalls >= 3:
            break
        prev_root = result.value
        activate(_pick_batch(fresh, table))

    while True:
        proof.rounds += 1
        program = _Program(c, nu, active)
        value, table = _branch_and_bound(
            program, seed_table.alpha, seed_table, branch_rule, proof
        )
        violated = [k for k in disjunctive if not _constraint_satisfied(k, table)]
        if not violated:
            best_value, best_table = value, table
            break
        activate(_pick_batch(violated, table))
    assert all(_constraint_satisfied(k, best_table) for k in constraints)
    proof.alpha_star = best_value
    proof.active_constraints = len(active)
    return MilpSolution(best_value, best_table, proof)
