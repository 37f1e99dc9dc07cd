"""Exhaustive certification of allocation tables and their codecs.

Two layers of assurance:

- `feasibility_check` is combinatorial: over every multiset of c nonempty
  server states with a common version, some version at or after the latest
  common one must have total allocation >= 1.  Multisets suffice because
  allocations depend on the state, never on the server index.
- `exhaustive_codec_check` runs the real codec end to end over every system
  state and every c-subset, with random message tuples, and checks the
  decode contract exactly: NULL iff no common version, else some version at
  or after the latest common one with the exact encoded value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import comb

from .allocation import AllocationTable, VersionSet, all_states
from .codec import Codec, CodeInfeasibleError, StoredSymbol

DECODE_CALL_GUARD = 10**7

SystemState = tuple[VersionSet, ...]


class BudgetExceededError(RuntimeError):
    """Enumeration would exceed the guard; carries the size estimate."""

    def __init__(self, estimate: int, guard: int):
        super().__init__(f"enumeration needs ~{estimate} decode calls > guard {guard}")
        self.estimate = estimate
        self.guard = guard


@dataclass(frozen=True)
class Violation:
    system_state: SystemState
    subset: tuple[int, ...]
    reason: str  # no-version-covered | wrong-value | null-when-common | version-too-old
    detail: str = ""


def worst_case_cost(table: AllocationTable) -> Fraction:
    """Max over nonempty states of the summed per-version allocations."""
    return max(table.state_total(state) for state in all_states(table.n_versions))


def feasibility_check(table: AllocationTable, c: int) -> Violation | None:
    """Combinatorial decode-coverage check over state multisets."""
    nu = table.n_versions
    states = all_states(nu)
    for multiset in combinations_with_replacement(states, c):
        common = multiset[0].mask
        for s in multiset[1:]:
            common &= s.mask
        if not common:
            continue
        floor = common.bit_length()
        covered = any(
            sum(table.allocation(s, v) for s in multiset) >= 1
            for v in range(floor, nu + 1)
        )
        if not covered:
            return Violation(
                system_state=multiset,
                subset=tuple(range(c)),
                reason="no-version-covered",
                detail=f"no version >= {floor} reaches total allocation 1",
            )
    return None


def random_message_tuple(rng: random.Random, nu: int, length: int) -> tuple[bytes, ...]:
    """nu messages of `length` symbols, pairwise distinct so value checks bite."""
    drawn: list[bytes] = []
    while len(drawn) < nu:
        candidate = bytes(rng.randrange(256) for _ in range(length))
        if candidate not in drawn:
            drawn.append(candidate)
    return tuple(drawn)


def _check_one(
    codec: Codec,
    picked: list[StoredSymbol],
    common_mask: int,
    msgs: tuple[bytes, ...],
) -> tuple[str, str] | None:
    """Decode one subset and test the contract; None means it held."""
    try:
        result = codec.decode(picked)
    except CodeInfeasibleError as exc:
        return ("no-version-covered", str(exc))
    if not common_mask:
        if not result.is_null:
            return ("wrong-value", f"value for version {result.version} where NULL expected")
        return None
    floor = common_mask.bit_length()
    if result.is_null:
        return ("null-when-common", f"NULL despite common version {floor}")
    if result.version < floor:
        return ("version-too-old", f"decoded version {result.version} < latest common {floor}")
    if result.value != msgs[result.version - 1]:
        return ("wrong-value", f"decoded value of version {result.version} does not match")
    return None


def exhaustive_codec_check(
    table: AllocationTable,
    n: int,
    c: int,
    trials_per_state: int = 3,
    seed: int = 20140601,
    codec: Codec | None = None,
) -> Violation | None:
    """End-to-end sweep of the decode contract; first violation wins.

    `codec` may be a (possibly tampered) Codec substitute; by default the
    real codec for `table` is built.  System states are enumerated in
    lexicographic mask order so reported witnesses are stable.  The check
    outcome depends only on the states of the queried subset, so results
    are memoized on that key.
    """
    nu = table.n_versions
    if c > n:
        raise ValueError(f"quorum c={c} larger than n={n}")
    estimate = (1 << nu) ** n * comb(n, c) * trials_per_state
    if estimate > DECODE_CALL_GUARD:
        raise BudgetExceededError(estimate, DECODE_CALL_GUARD)

    codec = codec if codec is not None else Codec(table, n)
    rng = random.Random(seed)
    tuples = [random_message_tuple(rng, nu, codec.chunk_len) for _ in range(trials_per_state)]

    symbols: dict[tuple[int, int, int], StoredSymbol] = {}
    for i in range(n):
        for mask in range(1 << nu):
            state = VersionSet(mask)
            for t, msgs in enumerate(tuples):
                held = {v: msgs[v - 1] for v in state}
                symbols[(i, mask, t)] = codec.encode_server(i, state, held)

    subsets = list(combinations(range(n), c))
    memo: dict[tuple[tuple[tuple[int, int], ...], int], tuple[str, str] | None] = {}

    for sys_masks in product(range(1 << nu), repeat=n):
        for subset in subsets:
            key_states = tuple((i, sys_masks[i]) for i in subset)
            for t in range(trials_per_state):
                memo_key = (key_states, t)
                if memo_key in memo:
                    failure = memo[memo_key]
                else:
                    picked = [symbols[(i, sys_masks[i], t)] for i in subset]
                    common_mask = sys_masks[subset[0]]
                    for i in subset[1:]:
                        common_mask &= sys_masks[i]
                    failure = _check_one(codec, picked, common_mask, tuples[t])
                    memo[memo_key] = failure
                if failure is not None:
                    witness = tuple(VersionSet(m) for m in sys_masks)
                    return Violation(witness, subset, failure[0], failure[1])
    return None
