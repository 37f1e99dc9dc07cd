"""Executable causal codec over an allocation table.

Every version is a message of L field symbols (L = least common denominator
of the table's fractions, so each allocation is a whole number of symbols).
Server i owns the evaluation points [i*L, (i+1)*L); a chunk for version v is
a prefix of v's evaluations on that range.  Prefixes make updates causal: a
new arrival only ever trims existing chunks or encodes the arriving value,
never needs data the server already threw away.

Decoding from c servers: if their states share no version, the answer is
NULL.  Otherwise scan versions from newest down to the latest common one
and return the first whose pooled chunks reach L symbols (distinct points
are guaranteed by the per-server ranges).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .allocation import AllocationTable, VersionSet
from .gf256 import EvalCodeword, eval_encode, interpolate_pairs


class PointBudgetError(ValueError):
    """n * L exceeds the 256 evaluation points of GF(2^8)."""


class CodeInfeasibleError(RuntimeError):
    """States share a version but no version at or after it is decodable."""


class CausalityError(RuntimeError):
    """An update would need to grow a chunk from data the server never kept."""


def derive_chunk_length(table: AllocationTable, n: int | None = None) -> int:
    """Symbols per version: the least L making every allocation integral."""
    length = table.symbol_denominator()
    if n is not None and n * length > 256:
        raise PointBudgetError(
            f"{n} servers * {length} symbols = {n * length} points > 256; "
            "use smaller (n, c, nu)"
        )
    return length


def reserved_points(server_id: int, chunk_len: int) -> range:
    return range(server_id * chunk_len, (server_id + 1) * chunk_len)


def pad_message(data: bytes, chunk_len: int) -> bytes:
    if len(data) > chunk_len:
        raise ValueError(f"message longer than {chunk_len} symbols")
    return data + bytes(chunk_len - len(data))


@dataclass(frozen=True)
class StoredSymbol:
    """One server's encoded content: a chunk per version it stores."""

    server_id: int
    state: VersionSet
    chunks: Mapping[int, EvalCodeword]

    def total_symbols(self) -> int:
        return sum(len(ch) for ch in self.chunks.values())

    def chunk_len(self, version: int) -> int:
        ch = self.chunks.get(version)
        return len(ch) if ch is not None else 0


@dataclass(frozen=True)
class DecodeResult:
    version: int | None
    value: bytes | None

    @classmethod
    def null(cls) -> "DecodeResult":
        return cls(None, None)

    @property
    def is_null(self) -> bool:
        return self.version is None


class Codec:
    """Binds an allocation table to n servers and a derived chunk length."""

    def __init__(self, table: AllocationTable, n: int):
        if n < 1:
            raise ValueError("need at least one server")
        self.table = table
        self.n = n
        self.chunk_len = derive_chunk_length(table, n)
        # symbols stored per (state, version); integral by choice of chunk_len
        self._symbols_for: dict[tuple[VersionSet, int], int] = {}
        for state, row in table.entries.items():
            for v, frac in row.items():
                amount = frac * self.chunk_len
                assert amount.denominator == 1
                self._symbols_for[(state, v)] = int(amount)

    def allocation_symbols(self, state: VersionSet, version: int) -> int:
        return self._symbols_for.get((state, version), 0)

    def encode_server(
        self, server_id: int, state: VersionSet, held: Mapping[int, bytes]
    ) -> StoredSymbol:
        """Encode the versions a server holds per its state's allocations."""
        if not 0 <= server_id < self.n:
            raise ValueError(f"server_id must be in [0, {self.n})")
        if set(held) != set(state):
            raise ValueError(f"held versions {sorted(held)} do not match state {state}")
        chunks: dict[int, EvalCodeword] = {}
        for v in state:
            count = self.allocation_symbols(state, v)
            if count == 0:
                continue
            value = held[v]
            if len(value) != self.chunk_len:
                raise ValueError(
                    f"version {v} value must be {self.chunk_len} symbols, got {len(value)}"
                )
            pts = list(reserved_points(server_id, self.chunk_len))[:count]
            chunks[v] = eval_encode(list(value), pts)
        return StoredSymbol(server_id, state, chunks)

    def apply_arrival(
        self, symbol: StoredSymbol, version: int, value: bytes
    ) -> StoredSymbol:
        """Causal update: new symbol from the old one plus the arriving value."""
        if version in symbol.state:
            return symbol
        if len(value) != self.chunk_len:
            raise ValueError(f"arriving value must be {self.chunk_len} symbols")
        new_state = symbol.state.add(version)
        chunks: dict[int, EvalCodeword] = {}
        for v in new_state:
            target = self.allocation_symbols(new_state, v)
            if target == 0:
                continue
            if v == version:
                pts = list(reserved_points(symbol.server_id, self.chunk_len))[:target]
                chunks[v] = eval_encode(list(value), pts)
                continue
            old = symbol.chunks.get(v)
            have = len(old) if old is not None else 0
            if target > have:
                raise CausalityError(
                    f"version {v} needs {target} symbols but only {have} were kept"
                )
            chunks[v] = EvalCodeword(old.point_ids[:target], old.values[:target])
        return StoredSymbol(symbol.server_id, new_state, chunks)

    def decode(self, symbols: Sequence[StoredSymbol]) -> DecodeResult:
        """Decode the latest common version or newer from exactly c symbols."""
        if len(symbols) != self.table.quorum:
            raise ValueError(f"decode needs exactly {self.table.quorum} symbols")
        common = VersionSet((1 << self.table.n_versions) - 1)
        for sym in symbols:
            common = common.intersection(sym.state)
        if not common:
            return DecodeResult.null()
        floor = common.latest()
        for v in range(self.table.n_versions, floor - 1, -1):
            pooled = sum(sym.chunk_len(v) for sym in symbols)
            if pooled < self.chunk_len:
                continue
            points: list[int] = []
            values: list[int] = []
            for sym in symbols:
                ch = sym.chunks.get(v)
                if ch is not None:
                    points.extend(ch.point_ids)
                    values.extend(ch.values)
            message = interpolate_pairs(points, values, self.chunk_len)
            return DecodeResult(v, bytes(message))
        raise CodeInfeasibleError(
            f"no version >= {floor} decodable from states "
            f"{[sym.state for sym in symbols]}"
        )


def storage_bits(symbol: StoredSymbol) -> int:
    """Bits stored by one server: 8 per field symbol."""
    return 8 * symbol.total_symbols()


def symbol_to_bytes(symbol: StoredSymbol, n_versions: int) -> bytes:
    """Stable wire format: [nu:1][state mask:2 BE] then per chunk, sorted by
    version: [version:1][symbol count:2 BE][payload].  Points are implied by
    the server's reserved range, so only values travel."""
    out = bytearray()
    out.append(n_versions)
    out += symbol.state.mask.to_bytes(2, "big")
    for v in sorted(symbol.chunks):
        ch = symbol.chunks[v]
        out.append(v)
        out += len(ch).to_bytes(2, "big")
        out += bytes(ch.values)
    return bytes(out)


def symbol_from_bytes(data: bytes, server_id: int, chunk_len: int) -> StoredSymbol:
    if len(data) < 3:
        raise ValueError("truncated symbol")
    state = VersionSet(int.from_bytes(data[1:3], "big"))
    chunks: dict[int, EvalCodeword] = {}
    pos = 3
    while pos < len(data):
        v = data[pos]
        count = int.from_bytes(data[pos + 1 : pos + 3], "big")
        payload = data[pos + 3 : pos + 3 + count]
        if len(payload) != count:
            raise ValueError("truncated chunk payload")
        pts = tuple(reserved_points(server_id, chunk_len))[:count]
        chunks[v] = EvalCodeword(pts, tuple(payload))
        pos += 3 + count
    return StoredSymbol(server_id, state, chunks)
