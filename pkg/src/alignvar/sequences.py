"""Binary words over {0, 1}."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

import numpy as np


@dataclass(frozen=True)
class BinarySequence:
    """Immutable finite word over ``{0, 1}``, stored as a ``'0'/'1'`` string."""

    symbols: str

    def __post_init__(self):
        if not isinstance(self.symbols, str):
            raise TypeError(f"symbols must be a str, got {type(self.symbols).__name__}")
        if self.symbols.strip("01"):
            raise ValueError(f"not a binary word: {self.symbols!r}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BinarySequence":
        out = []
        for b in bits:
            b = int(b)
            if b not in (0, 1):
                raise ValueError(f"symbol {b} is not 0 or 1")
            out.append("1" if b else "0")
        return cls("".join(out))

    @cached_property
    def array(self) -> np.ndarray:
        """Symbols as a read-only ``uint8`` array."""
        arr = np.frombuffer(self.symbols.encode("ascii"), dtype=np.uint8) - ord("0")
        arr.setflags(write=False)
        return arr

    @property
    def n(self) -> int:
        return len(self.symbols)

    def count_ones(self) -> int:
        return self.symbols.count("1")

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, i):
        return int(self.symbols[i])

    def __iter__(self):
        return (int(c) for c in self.symbols)

    def __str__(self) -> str:
        return self.symbols or "ε"

    def __repr__(self) -> str:
        return f"BinarySequence({self.symbols!r})"


SequenceLike = Union[BinarySequence, str, Iterable[int], np.ndarray]


def as_sequence(x: SequenceLike) -> BinarySequence:
    """Coerce strings, bit iterables and arrays to :class:`BinarySequence`."""
    if isinstance(x, BinarySequence):
        return x
    if isinstance(x, str):
        return BinarySequence(x)
    if isinstance(x, np.ndarray):
        if x.size and (x.min() < 0 or x.max() > 1):
            raise ValueError("array entries must be 0 or 1")
        return BinarySequence((x.astype(np.uint8) + ord("0")).tobytes().decode("ascii"))
    return BinarySequence.from_bits(x)
