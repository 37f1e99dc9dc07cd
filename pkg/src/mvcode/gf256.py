"""GF(2^8) arithmetic and evaluation-style erasure coding.

Field elements are ints in [0, 255], interpreted as polynomials over GF(2)
reduced modulo x^8 + x^4 + x^3 + x + 1 (0x11B).  Addition is XOR; products
go through log/antilog tables built once at import (generator 0x03, since
x itself is not primitive for this modulus).

A message of L field elements is encoded as the evaluations of the degree-<L
polynomial whose coefficient vector is the message.  Any L evaluations at
distinct points recover the message, which is what gives the any-L-of-K
(MDS) behaviour used by the storage codec.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

MODULUS = 0x11B
GENERATOR = 0x03
FIELD_SIZE = 256


class InsufficientPointsError(ValueError):
    """Fewer distinct evaluation points than unknown coefficients."""


def _mul_raw(a: int, b: int) -> int:
    # Carry-less multiply with reduction; used only to build the tables.
    p = 0
    while b:
        if b & 1:
            p ^= a
        a <<= 1
        if a & 0x100:
            a ^= MODULUS
        b >>= 1
    return p


def _build_tables() -> tuple[list[int], list[int]]:
    exp = [0] * (2 * FIELD_SIZE)
    log = [0] * FIELD_SIZE
    x = 1
    for i in range(FIELD_SIZE - 1):
        exp[i] = x
        log[x] = i
        x = _mul_raw(x, GENERATOR)
    for i in range(FIELD_SIZE - 1, 2 * FIELD_SIZE):
        exp[i] = exp[i - (FIELD_SIZE - 1)]
    return exp, log


_EXP, _LOG = _build_tables()


def add(a: int, b: int) -> int:
    return a ^ b


def mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse in GF(256)")
    return _EXP[255 - _LOG[a]]


def div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return _EXP[_LOG[a] - _LOG[b] + 255]


@dataclass(frozen=True)
class EvalCodeword:
    """Evaluations of one message polynomial at distinct points."""

    point_ids: tuple[int, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.point_ids) != len(self.values):
            raise ValueError("point_ids and values must have equal length")
        if len(set(self.point_ids)) != len(self.point_ids):
            raise ValueError("evaluation points must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.point_ids)


def poly_eval(coeffs: Sequence[int], x: int) -> int:
    """Evaluate sum(coeffs[i] * x^i) by Horner's rule."""
    acc = 0
    for c in reversed(coeffs):
        acc = mul(acc, x) ^ c
    return acc


def eval_encode(message: Sequence[int], points: Sequence[int]) -> EvalCodeword:
    """Encode a length-L message as evaluations at the given distinct points."""
    if len(message) < 1:
        raise ValueError("message must contain at least one field element")
    if len(message) > FIELD_SIZE:
        raise ValueError("message length exceeds field size")
    pts = tuple(points)
    if len(set(pts)) != len(pts):
        raise ValueError("evaluation points must be pairwise distinct")
    return EvalCodeword(pts, tuple(poly_eval(message, p) for p in pts))


# Inverted Vandermonde matrices keyed by the point tuple.  Decoding pools the
# same few point sets over and over, so this turns interpolation into a
# matrix-vector product after the first solve.
_VANDERMONDE_INV: dict[tuple[int, ...], list[list[int]]] = {}


def _vandermonde_inverse(points: tuple[int, ...]) -> list[list[int]]:
    cached = _VANDERMONDE_INV.get(points)
    if cached is not None:
        return cached
    size = len(points)
    aug = []
    for i, p in enumerate(points):
        row = [0] * size
        acc = 1
        for j in range(size):
            row[j] = acc
            acc = mul(acc, p)
        ident = [0] * size
        ident[i] = 1
        aug.append(row + ident)
    # Gauss-Jordan; any nonzero pivot works in a field.
    for col in range(size):
        pivot = next(r for r in range(col, size) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        scale = inv(aug[col][col])
        aug[col] = [mul(v, scale) for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v ^ mul(factor, w) for v, w in zip(aug[r], aug[col])]
    inverse = [row[size:] for row in aug]
    _VANDERMONDE_INV[points] = inverse
    return inverse


def interpolate_pairs(points: Sequence[int], values: Sequence[int], length: int) -> list[int]:
    """Recover the degree-<length coefficient vector from (point, value) pairs.

    Uses the first `length` pairs with distinct points; extra pairs are
    ignored (they agree anyway when all pairs came from one polynomial).
    """
    seen: dict[int, int] = {}
    for p, v in zip(points, values):
        if p not in seen:
            seen[p] = v
        if len(seen) == length:
            break
    if len(seen) < length:
        raise InsufficientPointsError(
            f"need {length} distinct evaluation points, got {len(seen)}"
        )
    pts = tuple(seen.keys())
    vals = list(seen.values())
    inverse = _vandermonde_inverse(pts)
    coeffs = []
    for i in range(length):
        acc = 0
        row = inverse[i]
        for j in range(length):
            acc ^= mul(row[j], vals[j])
        coeffs.append(acc)
    return coeffs


def interpolate(codeword: EvalCodeword, length: int) -> list[int]:
    """Recover the length-`length` message a codeword was encoded from."""
    return interpolate_pairs(codeword.point_ids, codeword.values, length)
