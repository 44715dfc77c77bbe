"""Runs of zeros, the block profile ``(N1, N2, N4, N5)`` and the transfer move."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from typing import NamedTuple

import numpy as np

from alignvar.sequences import BinarySequence, SequenceLike, as_sequence

TRACKED_LENGTHS = (1, 2, 4, 5)


class NoEligibleBlockError(ValueError):
    """The word lacks a zero-block of length 5 or of length 1."""


class BlockProfile(NamedTuple):
    """Counts of zero-blocks of length 1, 2, 4 and 5."""

    n1: int = 0
    n2: int = 0
    n4: int = 0
    n5: int = 0

    def __add__(self, other):
        return BlockProfile(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return BlockProfile(*(a - b for a, b in zip(self, other)))

    def shift(self, k: int) -> "BlockProfile":
        """``self + k * E_VEC``."""
        return BlockProfile(self.n1 - k, self.n2 + k, self.n4 + k, self.n5 - k)

    @property
    def zeros_used(self) -> int:
        return self.n1 + 2 * self.n2 + 4 * self.n4 + 5 * self.n5

    def is_valid(self) -> bool:
        return min(self) >= 0


E_VEC = BlockProfile(-1, 1, 1, -1)


class ProfileDecomposition(NamedTuple):
    """``profile == base.shift(k)`` with ``base.n2 == 0 or base.n4 == 0``."""

    base: BlockProfile
    k: int


@dataclass(frozen=True)
class TransferChoice:
    """Which 5-block loses a zero and which 1-block gains it.

    Both indices are 0-based ordinals among the zero-blocks of that length,
    counted left to right.
    """

    five_block: int
    one_block: int


def decompose_runs(x: SequenceLike) -> list[tuple[int, int]]:
    """Maximal runs as ``(symbol, length)`` pairs, left to right."""
    x = as_sequence(x)
    return [(int(s), len(list(g))) for s, g in groupby(x.symbols)]


def reconstruct(runs) -> BinarySequence:
    prev = None
    parts = []
    for sym, length in runs:
        if sym not in (0, 1) or length < 1:
            raise ValueError(f"bad run ({sym}, {length})")
        if sym == prev:
            raise ValueError("adjacent runs must alternate symbols")
        prev = sym
        parts.append(str(sym) * length)
    return BinarySequence("".join(parts))


def zero_blocks(x: SequenceLike) -> list[tuple[int, int]]:
    """Zero-blocks as ``(start, length)``, ``start`` 0-based."""
    x = as_sequence(x)
    out, pos = [], 0
    for sym, length in decompose_runs(x):
        if sym == 0:
            out.append((pos, length))
        pos += length
    return out


def zero_block_profile(x: SequenceLike) -> BlockProfile:
    counts = dict.fromkeys(TRACKED_LENGTHS, 0)
    for _, length in zero_blocks(x):
        if length in counts:
            counts[length] += 1
    return BlockProfile(*(counts[i] for i in TRACKED_LENGTHS))


def zero_block_profiles_batch(bits: np.ndarray) -> np.ndarray:
    """Profiles of every row of a ``(B, n)`` 0/1 array, as a ``(B, 4)`` array."""
    bits = np.asarray(bits, dtype=np.uint8)
    b, n = bits.shape
    padded = np.ones((b, n + 2), dtype=np.int8)
    padded[:, 1:-1] = bits
    edge = np.diff(padded, axis=1)  # -1 opens a zero-run, +1 closes it
    rows, starts = np.nonzero(edge == -1)
    _, ends = np.nonzero(edge == 1)
    lengths = ends - starts
    out = np.zeros((b, 4), dtype=np.int64)
    for col, length in enumerate(TRACKED_LENGTHS):
        sel = lengths == length
        out[:, col] = np.bincount(rows[sel], minlength=b)
    return out


def profile_decompose(p) -> ProfileDecomposition:
    p = BlockProfile(*p)
    if not p.is_valid():
        raise ValueError(f"profile has negative entries: {p}")
    k = min(p.n2, p.n4)
    return ProfileDecomposition(p.shift(-k), k)


def transfer_spans(x: SequenceLike) -> tuple[list[int], list[int]]:
    """Start offsets of the 5-blocks and of the 1-blocks of ``x``."""
    fives, ones = [], []
    for start, length in zero_blocks(x):
        if length == 5:
            fives.append(start)
        elif length == 1:
            ones.append(start)
    return fives, ones


def transfer(x: SequenceLike, choice: TransferChoice) -> BinarySequence:
    """Move one zero from the chosen 5-block to the chosen 1-block.

    The zero leaves the right end of the 5-block and is appended at the
    right end of the 1-block; the word keeps its length and its profile
    moves by ``E_VEC``.
    """
    x = as_sequence(x)
    fives, ones = transfer_spans(x)
    if not fives or not ones:
        raise NoEligibleBlockError(f"need a 5-block and a 1-block, profile is {zero_block_profile(x)}")
    if not (0 <= choice.five_block < len(fives) and 0 <= choice.one_block < len(ones)):
        raise NoEligibleBlockError(f"{choice} out of range ({len(fives)} fives, {len(ones)} ones)")
    drop = fives[choice.five_block] + 4
    add = ones[choice.one_block]
    s = x.symbols
    if add < drop:
        out = s[: add + 1] + "0" + s[add + 1: drop] + s[drop + 1:]
    else:
        out = s[:drop] + s[drop + 1: add + 1] + "0" + s[add + 1:]
    return BinarySequence(out)


def expected_block_count(n: int, i: int) -> Fraction:
    """Exact mean number of zero-blocks of length ``i`` in an iid Bernoulli(1/2)
    word of length ``n``.

    A block can start at ``n - i + 1`` offsets: the two boundary offsets need
    ``i + 1`` fixed symbols, the ``n - i - 1`` interior offsets need ``i + 2``.
    """
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got i={i}, n={n}")
    if i == n:
        return Fraction(1, 2**n)
    # (n - i - 1) / 2^(i+2) + 2 / 2^(i+1)
    return Fraction(n - i + 3, 2 ** (i + 2))
