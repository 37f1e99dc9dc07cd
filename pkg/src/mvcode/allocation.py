"""Storage-allocation tables for multi-version codes.

An allocation table answers: a server whose received-version set is S keeps
what fraction of each version v in S?  Fractions are exact rationals; the
worst per-server total over all states is the storage cost alpha.  Three
families are built here:

- the coded construction (group servers by their latest version, store 1/t
  of it, plus a remainder of version 1 when the parameters require it),
- plain replication of the latest version,
- separate per-version MDS coding at 1/c per held version.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Mapping


@dataclass(frozen=True, order=True)
class VersionSet:
    """Subset of versions [1, nu] as a canonical bitmask (bit v-1 = version v)."""

    mask: int = 0

    @classmethod
    def of(cls, *versions: int) -> "VersionSet":
        return cls.from_iter(versions)

    @classmethod
    def from_iter(cls, versions: Iterable[int]) -> "VersionSet":
        mask = 0
        for v in versions:
            if v < 1:
                raise ValueError(f"version indices are 1-based, got {v}")
            mask |= 1 << (v - 1)
        return cls(mask)

    def members(self) -> tuple[int, ...]:
        return tuple(self)

    def latest(self) -> int:
        if self.mask == 0:
            raise ValueError("empty version set has no latest version")
        return self.mask.bit_length()

    def add(self, version: int) -> "VersionSet":
        return VersionSet(self.mask | (1 << (version - 1)))

    def intersection(self, other: "VersionSet") -> "VersionSet":
        return VersionSet(self.mask & other.mask)

    def issubset(self, other: "VersionSet") -> bool:
        return self.mask & ~other.mask == 0

    def __contains__(self, version: int) -> bool:
        return bool(self.mask >> (version - 1) & 1) if version >= 1 else False

    def __iter__(self) -> Iterator[int]:
        mask, v = self.mask, 1
        while mask:
            if mask & 1:
                yield v
            mask >>= 1
            v += 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __repr__(self) -> str:
        return "{" + ",".join(str(v) for v in self) + "}"


def all_states(nu: int, include_empty: bool = False) -> list[VersionSet]:
    """All server states over nu versions, in canonical (mask) order."""
    start = 0 if include_empty else 1
    return [VersionSet(m) for m in range(start, 1 << nu)]


def group_of(state: VersionSet) -> int:
    """Group index of a nonempty state: the latest version it holds."""
    return state.latest()


@dataclass(frozen=True)
class AllocationTable:
    """Per-state, per-version storage fractions plus the cost alpha.

    `entries` has a row for every nonempty S over [1, n_versions]; versions
    absent from a row store nothing.  Zero entries are kept explicit where a
    family defines them (the coded construction), so rendered tables show
    which versions a state tracks at size zero.
    """

    n_versions: int
    quorum: int
    entries: Mapping[VersionSet, Mapping[int, Fraction]]
    alpha: Fraction

    def allocation(self, state: VersionSet, version: int) -> Fraction:
        return self.entries.get(state, {}).get(version, Fraction(0))

    def state_total(self, state: VersionSet) -> Fraction:
        return sum(self.entries.get(state, {}).values(), Fraction(0))

    def validate(self) -> None:
        if self.quorum < 1 or self.n_versions < 1:
            raise ValueError("quorum and n_versions must be >= 1")
        expected = set(all_states(self.n_versions))
        if set(self.entries) != expected:
            raise ValueError("table must have a row for every nonempty state")
        for state, row in self.entries.items():
            for v, frac in row.items():
                if v not in state:
                    raise ValueError(f"state {state} cannot store version {v}")
                if frac < 0:
                    raise ValueError(f"negative allocation at {state} v{v}")
            if self.state_total(state) > self.alpha:
                raise ValueError(f"state {state} exceeds cost alpha={self.alpha}")

    def symbol_denominator(self) -> int:
        """Least L making every allocation an integer number of L-ths."""
        denoms = [f.denominator for row in self.entries.values() for f in row.values()]
        return lcm(*denoms) if denoms else 1


def recovery_threshold(c: int, nu: int) -> int:
    """Servers needed from one group so that 1/t-sized pieces rebuild a version."""
    if c < 1 or nu < 1:
        raise ValueError("c and nu must be >= 1")
    if nu >= 2 and c <= (nu - 1) ** 2:
        return -(-c // (nu - 1))
    return -(-(c - 1) // nu) + 1


def construction_alpha(c: int, nu: int) -> Fraction:
    """Storage cost of the coded construction: max{(nu*t-nu+1)/(t*c), 1/t}."""
    t = recovery_threshold(c, nu)
    return max(Fraction(nu * t - nu + 1, t * c), Fraction(1, t))


def build_construction_table(c: int, nu: int) -> AllocationTable:
    """Coded construction: each state stores 1/t of its latest version, and
    states holding version 1 under a newer latest keep an alpha - 1/t remainder
    of version 1.  Versions a state holds but does not store get explicit 0."""
    t = recovery_threshold(c, nu)
    alpha = construction_alpha(c, nu)
    one_over_t = Fraction(1, t)
    entries: dict[VersionSet, dict[int, Fraction]] = {}
    for state in all_states(nu):
        latest = state.latest()
        row: dict[int, Fraction] = {}
        for v in state:
            if v == latest:
                row[v] = alpha if latest == 1 else one_over_t
            elif v == 1:
                row[v] = alpha - one_over_t
            else:
                row[v] = Fraction(0)
        entries[state] = row
    return AllocationTable(nu, c, entries, alpha)


def build_replication_table(nu: int, c: int = 1) -> AllocationTable:
    """Store the latest received version in full; cost 1 regardless of c."""
    entries = {state: {state.latest(): Fraction(1)} for state in all_states(nu)}
    return AllocationTable(nu, c, entries, Fraction(1))


def build_simple_mds_table(c: int, nu: int) -> AllocationTable:
    """Separate per-version MDS coding: 1/c of every held version; cost nu/c."""
    if c < 1 or nu < 1:
        raise ValueError("c and nu must be >= 1")
    share = Fraction(1, c)
    entries = {state: {v: share for v in state} for state in all_states(nu)}
    return AllocationTable(nu, c, entries, Fraction(nu, c))


FAMILIES = ("construction", "replication", "mds")


def build_table(family: str, c: int, nu: int) -> AllocationTable:
    if family == "construction":
        return build_construction_table(c, nu)
    if family == "replication":
        return build_replication_table(nu, c)
    if family == "mds":
        return build_simple_mds_table(c, nu)
    raise ValueError(f"unknown table family {family!r}; pick one of {FAMILIES}")


def table_to_json(table: AllocationTable) -> str:
    """Lossless JSON rendering; fractions serialized as "p/q" strings."""
    doc = {
        "n_versions": table.n_versions,
        "quorum": table.quorum,
        "alpha": str(table.alpha),
        "entries": {
            ",".join(str(v) for v in state): {str(v): str(f) for v, f in sorted(row.items())}
            for state, row in sorted(table.entries.items())
        },
    }
    return json.dumps(doc, indent=2)


def table_from_json(text: str) -> AllocationTable:
    doc = json.loads(text)
    entries: dict[VersionSet, dict[int, Fraction]] = {}
    for state_key, row in doc["entries"].items():
        state = VersionSet.from_iter(int(v) for v in state_key.split(","))
        entries[state] = {int(v): Fraction(f) for v, f in row.items()}
    return AllocationTable(
        n_versions=int(doc["n_versions"]),
        quorum=int(doc["quorum"]),
        entries=entries,
        alpha=Fraction(doc["alpha"]),
    )
