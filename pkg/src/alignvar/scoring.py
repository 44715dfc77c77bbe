"""Substitution scores and gap penalty, kept as exact rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

import numpy as np


def to_fraction(value) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float literal.

    Floats are converted through their shortest repr so that ``0.4`` becomes
    ``2/5`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class ScoringScheme:
    """Scores ``s(a, b)`` for ``a, b in {0, 1}`` and per-symbol gap score ``q``.

    Defaults give the model studied here: ``s(0,0)=1``, ``s(0,1)=s(1,0)=0``,
    ``q=0`` and a large ``s(1,1)``.
    """

    s11: Fraction = Fraction(50)
    s00: Fraction = Fraction(1)
    s01: Fraction = Fraction(0)
    s10: Fraction = Fraction(0)
    q: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("s11", "s00", "s01", "s10", "q"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))

    @classmethod
    def default(cls, s11=50) -> "ScoringScheme":
        return cls(s11=s11)

    @classmethod
    def lcs(cls) -> "ScoringScheme":
        """Identity scores: the optimal score is the LCS length."""
        return cls(s11=1)

    def s(self, a: int, b: int) -> Fraction:
        return ((self.s00, self.s01), (self.s10, self.s11))[a][b]

    @property
    def symmetric(self) -> bool:
        return self.s01 == self.s10

    @cached_property
    def scale(self) -> int:
        """Common denominator turning every score into an integer."""
        return lcm(*(f.denominator for f in (self.s00, self.s01, self.s10, self.s11, self.q)))

    @cached_property
    def int_table(self) -> np.ndarray:
        """``scale * s`` as a 2x2 int64 table indexed ``[a, b]``."""
        k = self.scale
        rows = [[self.s00 * k, self.s01 * k], [self.s10 * k, self.s11 * k]]
        return np.array([[int(v) for v in r] for r in rows], dtype=np.int64)

    @cached_property
    def int_gap(self) -> int:
        return int(self.q * self.scale)

    def unscale(self, value) -> Fraction:
        return Fraction(int(value), self.scale)

    def as_dict(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("s00", "s01", "s10", "s11", "q")}
