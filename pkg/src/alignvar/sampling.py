"""Seeded generation of texts, conditional-profile samples and profile chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from alignvar.blocks import (
    BlockProfile,
    TransferChoice,
    transfer,
    transfer_spans,
    zero_block_profile,
    zero_block_profiles_batch,
)
from alignvar.sequences import BinarySequence, SequenceLike, as_sequence


class InfeasibleProfileError(RuntimeError):
    """Rejection sampling gave up: the profile is infeasible or too rare."""


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream keyed by ``(seed, stream)``.

    ``stream`` may be an int or a tuple of ints; it becomes the spawn key of a
    :class:`numpy.random.SeedSequence`, so distinct keys give statistically
    independent PCG64 streams.
    """

    seed: int
    stream: Union[int, tuple] = 0

    def generator(self) -> np.random.Generator:
        key = self.stream if isinstance(self.stream, tuple) else (self.stream,)
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *key: int) -> "RngStream":
        base = self.stream if isinstance(self.stream, tuple) else (self.stream,)
        return RngStream(self.seed, base + tuple(key))


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def iid_sequence(n: int, rng) -> BinarySequence:
    """``n`` independent fair bits."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    bits = _rng(rng).integers(0, 2, size=n, dtype=np.uint8)
    return BinarySequence((bits + ord("0")).tobytes().decode("ascii"))


def iid_batch(n: int, count: int, rng) -> np.ndarray:
    return _rng(rng).integers(0, 2, size=(count, n), dtype=np.uint8)


def min_length_for(p: BlockProfile) -> int:
    blocks = p.n1 + p.n2 + p.n4 + p.n5
    return p.zeros_used + max(blocks - 1, 0)


def conditional_profile_sample(n: int, p, rng, max_tries: int = 1_000_000,
                               batch: int = 4096) -> BinarySequence:
    """Uniform draw from ``{x in {0,1}^n : profile(x) == p}`` by rejection.

    Draws iid words in batches and returns the first whose profile matches;
    since every word is equally likely the accepted one is uniform on the
    class. Raises :class:`InfeasibleProfileError` once ``max_tries`` words
    have been rejected.
    """
    p = BlockProfile(*p)
    if not p.is_valid() or min_length_for(p) > n:
        raise InfeasibleProfileError(f"profile {tuple(p)} cannot occur at length {n}")
    g = _rng(rng)
    target = np.array(p, dtype=np.int64)
    tried = 0
    while tried < max_tries:
        size = min(batch, max_tries - tried)
        bits = g.integers(0, 2, size=(size, n), dtype=np.uint8)
        hits = np.flatnonzero((zero_block_profiles_batch(bits) == target).all(axis=1))
        if hits.size:
            return BinarySequence((bits[hits[0]] + ord("0")).tobytes().decode("ascii"))
        tried += size
    raise InfeasibleProfileError(
        f"no word with profile {tuple(p)} at length {n} after {max_tries} tries"
    )


@dataclass
class ChainTrajectory:
    """States ``X(m), X(m+e), ...`` of the transfer chain.

    ``stopped_at`` is the index of the state that had no 5-block or no
    1-block when more steps were requested, else ``None``.
    """

    states: list[BinarySequence]
    profiles: list[BlockProfile]
    choices: list[TransferChoice] = field(default_factory=list)
    stopped_at: Optional[int] = None

    @property
    def completed(self) -> bool:
        return self.stopped_at is None

    def __len__(self) -> int:
        return len(self.states)


def chain_step(x: BinarySequence, g: np.random.Generator):
    """One transfer with uniformly chosen blocks, or ``None`` if impossible."""
    fives, ones = transfer_spans(x)
    if not fives or not ones:
        return None
    choice = TransferChoice(int(g.integers(len(fives))), int(g.integers(len(ones))))
    return choice, transfer(x, choice)


def chain_trajectory(x0: SequenceLike, steps: int, rng) -> ChainTrajectory:
    x0 = as_sequence(x0)
    g = _rng(rng)
    traj = ChainTrajectory([x0], [zero_block_profile(x0)])
    for k in range(steps):
        nxt = chain_step(traj.states[-1], g)
        if nxt is None:
            traj.stopped_at = k
            break
        choice, x = nxt
        traj.choices.append(choice)
        traj.states.append(x)
        traj.profiles.append(zero_block_profile(x))
    return traj
