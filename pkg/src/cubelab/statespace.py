"""Packed-bit representation and geometry of the sign hypercube {-1,+1}^d.

States are stored as d-bit words: bit i is set iff coordinate i equals +1,
with coordinate 0 in the least significant position. The packed word doubles
as the canonical state index, so the all-(-1) state is index 0 and the
all-(+1) state is index 2^d - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError

# 2^d indexing stays inside a 32-bit-safe integer up to d = 30; exact dense
# analysis runs far below that (memory is the binding constraint), while
# simulation paths only store coordinates and may go much higher.
MAX_EXACT_DIM = 30
MAX_SIM_DIM = 1 << 20


def _check_coord(i: int, dim: int) -> None:
    if not 0 <= i < dim:
        raise IndexError(f"coordinate {i} out of range for dimension {dim}")


@dataclass(frozen=True)
class BitState:
    """One point of {-1,+1}^d packed as a d-bit word."""

    bits: int
    dim: int

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_SIM_DIM:
            raise ValueError(f"dimension must be in [1, {MAX_SIM_DIM}], got {self.dim}")
        if not 0 <= self.bits < (1 << self.dim):
            raise IndexError(f"word {self.bits:#x} out of range for dimension {self.dim}")

    def coord(self, i: int) -> int:
        """Value of coordinate i, in {-1, +1}."""
        _check_coord(i, self.dim)
        return ((self.bits >> i) & 1) * 2 - 1

    def flip(self, i: int) -> "BitState":
        """The state with coordinate i negated and all others unchanged."""
        _check_coord(i, self.dim)
        return BitState(self.bits ^ (1 << i), self.dim)

    def neighbors(self) -> list["BitState"]:
        """All single-flip states, in coordinate order."""
        return [self.flip(i) for i in range(self.dim)]

    def signs(self) -> np.ndarray:
        """Coordinates as a +-1 vector of dtype int8."""
        if self.dim <= 63:
            bits = (np.int64(self.bits) >> np.arange(self.dim)) & 1
        else:
            # beyond 63 bits the word no longer fits a numpy integer
            bits = np.fromiter(((self.bits >> i) & 1 for i in range(self.dim)),
                               dtype=np.int8, count=self.dim)
        return (bits * 2 - 1).astype(np.int8)

    @classmethod
    def from_signs(cls, signs) -> "BitState":
        """Build a state from a +-1 coordinate vector."""
        arr = np.asarray(signs)
        if arr.ndim != 1 or not np.all(np.abs(arr) == 1):
            raise ValueError("signs must be a one-dimensional +-1 vector")
        bits = 0
        for i in np.flatnonzero(arr > 0):
            bits |= 1 << int(i)
        return cls(bits, arr.shape[0])


def index_of(x: BitState) -> int:
    """Canonical integer index of a state (the packed word itself)."""
    return x.bits


def state_of(k: int, dim: int) -> BitState:
    """State with index k in dimension dim; inverse of index_of."""
    if not 0 <= k < (1 << dim):
        raise IndexError(f"index {k} out of range for dimension {dim}")
    return BitState(k, dim)


def hamming(x: BitState, y: BitState) -> int:
    """Number of coordinates where x and y differ."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return (x.bits ^ y.bits).bit_count()


def all_signs(dim: int) -> np.ndarray:
    """The full (2^d, d) matrix of +-1 coordinates, row k = state k.

    Intended for exact enumeration; dimensions beyond MAX_EXACT_DIM are
    rejected outright (and memory gives out long before that).
    """
    if dim > MAX_EXACT_DIM:
        raise CapabilityError(f"exact enumeration capped at d <= {MAX_EXACT_DIM}, got {dim}")
    ks = np.arange(1 << dim, dtype=np.int64)
    bits = (ks[:, None] >> np.arange(dim)) & 1
    return (bits * 2 - 1).astype(np.int8)
