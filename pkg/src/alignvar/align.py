"""Optimal global alignment of binary words.

All dynamic programming runs on integers: scores are multiplied by the
scheme's common denominator and converted back to :class:`Fraction` at the
end, so equality tests against rational thresholds are exact.

The row update uses the fact that with a linear gap score ``q`` the
horizontal recurrence ``D[i][j] = max(T[j], D[i][j-1] + q)`` unrolls to a
running maximum, ``D[i][j] = q*j + max_{j' <= j} (T[j'] - q*j')``, so a whole
row is a handful of vectorised numpy operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from alignvar.scoring import ScoringScheme
from alignvar.sequences import BinarySequence, SequenceLike, as_sequence

_INT64_SAFE = 2**62


class InvalidAlignmentError(ValueError):
    """Index pairs are out of range or not strictly increasing."""


@dataclass(frozen=True)
class AlignmentPairs:
    """An alignment ``(pi, nu)`` as 1-based index pairs ``(pi(i), nu(i))``."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))
        prev_a = prev_b = 0
        for a, b in self.pairs:
            if a <= prev_a or b <= prev_b:
                raise InvalidAlignmentError(f"pairs must be strictly increasing, got {self.pairs}")
            prev_a, prev_b = a, b

    def check_bounds(self, n: int, m: int) -> None:
        if self.pairs and (self.pairs[-1][0] > n or self.pairs[-1][1] > m):
            raise InvalidAlignmentError(
                f"pair {self.pairs[-1]} out of range for lengths ({n}, {m})"
            )

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)


def _coerce_pairs(a) -> AlignmentPairs:
    return a if isinstance(a, AlignmentPairs) else AlignmentPairs(tuple(a))


def score_of_alignment(x: SequenceLike, y: SequenceLike, a, scheme: ScoringScheme) -> Fraction:
    """Sum of pair scores plus ``q`` for every symbol left unaligned."""
    x, y = as_sequence(x), as_sequence(y)
    a = _coerce_pairs(a)
    a.check_bounds(len(x), len(y))
    total = sum((scheme.s(x[i - 1], y[j - 1]) for i, j in a.pairs), Fraction(0))
    gapped = len(x) + len(y) - 2 * len(a)
    return total + scheme.q * gapped


# -- integer kernels ---------------------------------------------------------


def _dtype_for(table: np.ndarray, gap: int, n: int, m: int):
    bound = (int(np.abs(table).max()) + abs(gap) + 1) * (n + m + 2)
    return np.int64 if bound < _INT64_SAFE else object


def step_row(prev: np.ndarray, a: int, y: np.ndarray, table: np.ndarray, gap: int,
             ramp: np.ndarray) -> np.ndarray:
    """DP row after consuming one more symbol ``a`` of the first word.

    ``ramp`` is ``gap * arange(len(y) + 1)``, passed in to avoid rebuilding it.
    """
    t = np.empty_like(prev)
    t[0] = prev[0] + gap
    np.maximum(prev[:-1] + table[a][y], prev[1:] + gap, out=t[1:])
    if gap == 0:
        return np.maximum.accumulate(t)
    return np.maximum.accumulate(t - ramp) + ramp


def _prep(y: np.ndarray, table: np.ndarray, gap: int, n: int):
    m = len(y)
    dtype = _dtype_for(table, gap, n, m)
    table = table.astype(dtype)
    ramp = (np.arange(m + 1, dtype=np.int64) * gap).astype(dtype)
    y = np.asarray(y, dtype=np.intp)
    return y, table, ramp


def forward_matrix(x: np.ndarray, y: np.ndarray, table: np.ndarray, gap: int) -> np.ndarray:
    """Full ``(n+1, m+1)`` table of prefix scores ``D[i][j] = L(x[:i], y[:j])``."""
    y, table, ramp = _prep(y, table, gap, len(x))
    out = np.empty((len(x) + 1, len(y) + 1), dtype=table.dtype)
    out[0] = ramp
    for i, a in enumerate(x, start=1):
        out[i] = step_row(out[i - 1], int(a), y, table, gap, ramp)
    return out


def backward_matrix(x: np.ndarray, y: np.ndarray, table: np.ndarray, gap: int) -> np.ndarray:
    """Suffix scores ``B[r][j] = L(x[r:], y[j:])`` as an ``(n+1, m+1)`` table."""
    rev = forward_matrix(np.asarray(x)[::-1], np.asarray(y)[::-1], table, gap)
    return rev[::-1, ::-1]


def last_row(x: np.ndarray, y: np.ndarray, table: np.ndarray, gap: int) -> np.ndarray:
    y, table, ramp = _prep(y, table, gap, len(x))
    row = ramp.copy()
    for a in x:
        row = step_row(row, int(a), y, table, gap, ramp)
    return row


def optimal_score(x: SequenceLike, y: SequenceLike, scheme: ScoringScheme = ScoringScheme()) -> Fraction:
    """Maximum of :func:`score_of_alignment` over all alignments of ``x`` and ``y``."""
    x, y = as_sequence(x), as_sequence(y)
    row = last_row(x.array, y.array, scheme.int_table, scheme.int_gap)
    return scheme.unscale(row[-1])


def _traceback(d: np.ndarray, x: np.ndarray, y: np.ndarray, table: np.ndarray, gap: int):
    # priority: diagonal, then gap in x (consume y), then gap in y (consume x)
    i, j = len(x), len(y)
    pairs = []
    while i > 0 and j > 0:
        cur = d[i, j]
        if cur == d[i - 1, j - 1] + table[x[i - 1], y[j - 1]]:
            pairs.append((i, j))
            i -= 1
            j -= 1
        elif cur == d[i, j - 1] + gap:
            j -= 1
        else:
            i -= 1
    pairs.reverse()
    return AlignmentPairs(tuple(pairs))


def optimal_traceback(x: SequenceLike, y: SequenceLike,
                      scheme: ScoringScheme = ScoringScheme()) -> AlignmentPairs:
    """One optimal alignment, chosen by the fixed tie priority
    match/substitute > gap in ``x`` > gap in ``y`` while walking back from
    the bottom-right corner."""
    x, y = as_sequence(x), as_sequence(y)
    xa, ya = x.array.astype(np.intp), y.array.astype(np.intp)
    d = forward_matrix(xa, ya, scheme.int_table, scheme.int_gap)
    return _traceback(d, xa, ya, scheme.int_table.astype(d.dtype), scheme.int_gap)


def _lexicographic_weights(scheme: ScoringScheme, n: int, m: int):
    # value = score * big - (# matched ones); big exceeds any ones count
    big = min(n, m) + 1
    table = scheme.int_table * big
    table[1, 1] -= 1
    return table, scheme.int_gap * big, big


def min_matched_ones_among_optimal(x: SequenceLike, y: SequenceLike,
                                   scheme: ScoringScheme = ScoringScheme()) -> int:
    """Fewest 1-with-1 pairs in any score-optimal alignment."""
    x, y = as_sequence(x), as_sequence(y)
    table, gap, big = _lexicographic_weights(scheme, len(x), len(y))
    value = int(last_row(x.array, y.array, table, gap)[-1])
    best = -((-value) // big)
    return best * big - value


def matched_ones_alignment(x: SequenceLike, y: SequenceLike) -> AlignmentPairs:
    """Match the i-th one of ``x`` with the i-th one of ``y`` and, in every
    gap between consecutive matched ones (and before the first / after the
    last), align as many zeros as both sides offer, left to right."""
    x, y = as_sequence(x), as_sequence(y)
    ox = [i + 1 for i, c in enumerate(x.symbols) if c == "1"]
    oy = [j + 1 for j, c in enumerate(y.symbols) if c == "1"]
    k = min(len(ox), len(oy))
    # anchors delimiting the k+1 zero segments
    xs = [0] + ox[:k] + [len(x) + 1]
    ys = [0] + oy[:k] + [len(y) + 1]
    pairs = []
    for seg in range(k + 1):
        zx = [i for i in range(xs[seg] + 1, xs[seg + 1]) if x.symbols[i - 1] == "0"]
        zy = [j for j in range(ys[seg] + 1, ys[seg + 1]) if y.symbols[j - 1] == "0"]
        pairs.extend(zip(zx, zy))
        if seg < k:
            pairs.append((xs[seg + 1], ys[seg + 1]))
    return AlignmentPairs(tuple(pairs))


def matched_ones(a: AlignmentPairs, x: BinarySequence, y: BinarySequence) -> list[tuple[int, int]]:
    """The 1-with-1 pairs of ``a``, in order."""
    return [(i, j) for i, j in a.pairs if x.symbols[i - 1] == "1" and y.symbols[j - 1] == "1"]


def alignment_columns(x: SequenceLike, y: SequenceLike, a: Sequence[tuple[int, int]]) -> tuple[str, str]:
    """Two-row text rendering with ``_`` for gaps (debug helper)."""
    x, y = as_sequence(x), as_sequence(y)
    top, bot = [], []
    i = j = 0
    for pi, nu in list(a) + [(len(x) + 1, len(y) + 1)]:
        while i + 1 < pi:
            i += 1
            top.append(x.symbols[i - 1])
            bot.append("_")
        while j + 1 < nu:
            j += 1
            top.append("_")
            bot.append(y.symbols[j - 1])
        if pi <= len(x):
            i, j = pi, nu
            top.append(x.symbols[i - 1])
            bot.append(y.symbols[j - 1])
    return "".join(top), "".join(bot)
