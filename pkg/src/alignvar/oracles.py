"""Exhaustive and exact verifiers.

Nothing here calls the alignment DP or the block routines it is meant to
check: words are handled as plain strings (``format``, ``split``, regular
expressions) and all verdicts come from integer or :class:`Fraction`
arithmetic. Transcendental constants enter only through outward-rounded
``mpmath.iv`` intervals, and a comparison that the interval cannot decide is
reported as ``None`` rather than guessed.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
import numpy as np

from alignvar.scoring import ScoringScheme, to_fraction

BRUTE_FORCE_MAX_TOTAL = 24
_ZERO_RUN = re.compile("0+")


class OracleSizeError(ValueError):
    """The requested enumeration exceeds the oracle's size guard."""


class PreconditionError(ValueError):
    """Inputs do not satisfy the hypotheses of the statement being checked."""


def _symbols(w) -> str:
    s = w if isinstance(w, str) else getattr(w, "symbols", None)
    if s is None:
        s = "".join(str(int(c)) for c in w)
    return s


# -- alignment -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _combos(n: int, k: int) -> np.ndarray:
    combos = list(itertools.combinations(range(n), k))
    return np.array(combos, dtype=np.intp).reshape(len(combos), k)


def brute_force_optimal(x, y, scheme: ScoringScheme = ScoringScheme()):
    """Best score over every alignment, and every alignment attaining it.

    Enumerates all pairs of equal-size position subsets. Returns
    ``(score, [tuple of 1-based pairs, ...])`` with optima in lexicographic order.
    """
    xs, ys = _symbols(x), _symbols(y)
    n, m = len(xs), len(ys)
    if n + m > BRUTE_FORCE_MAX_TOTAL:
        raise OracleSizeError(f"|x|+|y| = {n + m} exceeds {BRUTE_FORCE_MAX_TOTAL}")
    vals = {(a, b): to_fraction(scheme.s(int(a), int(b))) for a in "01" for b in "01"}
    q = to_fraction(scheme.q)
    scale = math.lcm(*(v.denominator for v in vals.values()), q.denominator)
    table = np.zeros((2, 2), dtype=np.int64)
    for (a, b), v in vals.items():
        table[int(a), int(b)] = int(v * scale)
    iq = int(q * scale)
    xa = np.frombuffer(xs.encode(), dtype=np.uint8) - 48
    ya = np.frombuffer(ys.encode(), dtype=np.uint8) - 48

    best, winners = None, []
    for k in range(min(n, m) + 1):
        cx, cy = _combos(n, k), _combos(m, k)
        gaps = iq * (n + m - 2 * k)
        if k == 0:
            scores = np.full((1, 1), gaps, dtype=np.int64)
        else:
            scores = table[xa[cx][:, None, :], ya[cy][None, :, :]].sum(axis=-1) + gaps
        top = int(scores.max())
        if best is None or top > best:
            best, winners = top, []
        if top == best:
            for ix, iy in zip(*np.nonzero(scores == top)):
                winners.append(tuple(zip((cx[ix] + 1).tolist(), (cy[iy] + 1).tolist())))
    winners.sort()
    return Fraction(best, scale), winners


def lcs_length(x, y) -> int:
    """Textbook quadratic LCS, pure Python."""
    xs, ys = _symbols(x), _symbols(y)
    prev = [0] * (len(ys) + 1)
    for a in xs:
        cur = [0]
        for j, b in enumerate(ys):
            cur.append(prev[j] + 1 if a == b else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def naive_score(x, y, scheme: ScoringScheme = ScoringScheme()) -> Fraction:
    """Three-way recurrence in exact rationals, pure Python."""
    xs, ys = _symbols(x), _symbols(y)
    q = to_fraction(scheme.q)
    s = {(a, b): to_fraction(scheme.s(int(a), int(b))) for a in "01" for b in "01"}
    prev = [q * j for j in range(len(ys) + 1)]
    for i, a in enumerate(xs, start=1):
        cur = [q * i]
        for j, b in enumerate(ys):
            cur.append(max(prev[j] + s[a, b], prev[j + 1] + q, cur[j] + q))
        prev = cur
    return prev[-1]


# -- finite distributions ---------------------------------------------------------


@dataclass(frozen=True)
class FiniteDistribution:
    """Exact law on finitely many values (integers or tuples)."""

    support: tuple
    weights: tuple

    def __post_init__(self):
        w = tuple(to_fraction(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "support", tuple(self.support))
        if len(w) != len(self.support):
            raise ValueError("support and weights differ in length")
        if any(v < 0 for v in w) or sum(w) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")

    @classmethod
    def from_counts(cls, counts: dict) -> "FiniteDistribution":
        total = sum(counts.values())
        keys = sorted(counts)
        return cls(tuple(keys), tuple(Fraction(counts[k], total) for k in keys))

    @classmethod
    def uniform(cls, values) -> "FiniteDistribution":
        values = list(values)
        return cls(tuple(values), (Fraction(1, len(values)),) * len(values))

    def pmf(self, v) -> Fraction:
        return sum((w for s, w in zip(self.support, self.weights) if s == v), Fraction(0))

    def mean(self) -> Fraction:
        return sum((s * w for s, w in zip(self.support, self.weights)), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return sum(((s - mu) ** 2 * w for s, w in zip(self.support, self.weights)), Fraction(0))

    def map(self, f) -> "FiniteDistribution":
        acc = defaultdict(Fraction)
        for s, w in zip(self.support, self.weights):
            acc[f(s)] += w
        keys = sorted(acc)
        return FiniteDistribution(tuple(keys), tuple(acc[k] for k in keys))


def exact_score_distribution(n: int, scheme: ScoringScheme = ScoringScheme(),
                             m: Optional[int] = None) -> FiniteDistribution:
    """Law of the optimal score for independent uniform words of lengths ``n``, ``m``."""
    m = n if m is None else m
    if n + m > 14:
        raise OracleSizeError("at most 2^14 word pairs")
    words_x = [format(v, f"0{n}b") if n else "" for v in range(2**n)]
    words_y = [format(v, f"0{m}b") if m else "" for v in range(2**m)]
    counts = Counter(naive_score(a, b, scheme) for a in words_x for b in words_y)
    return FiniteDistribution.from_counts(counts)


def binomial_window_probability(n: int, half_width) -> Fraction:
    """``P(|S - n/2| <= half_width)`` for ``S ~ Bin(n, 1/2)``."""
    hw = to_fraction(half_width)
    hits = sum(math.comb(n, s) for s in range(n + 1) if abs(Fraction(s) - Fraction(n, 2)) <= hw)
    return Fraction(hits, 2**n)


# -- block profiles by enumeration ------------------------------------------------------


def _profile_str(s: str) -> tuple[int, int, int, int]:
    lengths = Counter(len(r) for r in s.split("1") if r)
    return (lengths[1], lengths[2], lengths[4], lengths[5])


@lru_cache(maxsize=None)
def profile_classes(n: int) -> dict:
    """Every word of length ``n`` grouped by its ``(N1, N2, N4, N5)``."""
    if n > 20:
        raise OracleSizeError("profile enumeration limited to n <= 20")
    out = defaultdict(list)
    for v in range(2**n):
        s = format(v, f"0{n}b") if n else ""
        out[_profile_str(s)].append(s)
    return dict(out)


@dataclass(frozen=True)
class ProfileStats:
    n: int
    law: FiniteDistribution  # over (N1, N2, N4, N5)
    means: dict  # block length -> exact mean
    box_probability: Fraction
    box_radius_sq: Fraction


def exact_profile_stats(n: int) -> ProfileStats:
    """Exact joint law of the profile over all ``2^n`` words, its means, and
    ``P(|N_i - mu_i| <= sqrt(55 n / 4) for i in 1, 2, 4, 5)``."""
    classes = profile_classes(n)
    counts = {p: len(ws) for p, ws in classes.items()}
    law = FiniteDistribution.from_counts(counts)
    total = 2**n
    means = {}
    for idx, length in enumerate((1, 2, 4, 5)):
        means[length] = Fraction(sum(p[idx] * c for p, c in counts.items()), total)
    r2 = Fraction(55 * n, 4)
    inside = sum(
        c for p, c in counts.items()
        if all((p[i] - means[L]) ** 2 <= r2 for i, L in enumerate((1, 2, 4, 5)))
    )
    return ProfileStats(n, law, means, Fraction(inside, total), r2)


_E = (-1, 1, 1, -1)


def _shift(p, k=1):
    return tuple(a + k * e for a, e in zip(p, _E))


@dataclass
class RatioReport:
    n: int
    checked: int = 0
    skipped: int = 0
    counterexamples: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # (profile, count, count_shifted)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def profile_count_ratio(n: int) -> RatioReport:
    """Check ``count(p + e) (n2+1)(n4+1) == count(p) n1 n5`` wherever both classes are nonempty."""
    if n > 18:
        raise OracleSizeError("n <= 18")
    counts = {p: len(ws) for p, ws in profile_classes(n).items()}
    rep = RatioReport(n)
    for p, c in sorted(counts.items()):
        q = _shift(p)
        cq = counts.get(q, 0)
        if cq == 0:
            rep.skipped += 1
            continue
        rep.checked += 1
        rep.rows.append((p, c, cq))
        if cq * (p[1] + 1) * (p[2] + 1) != c * p[0] * p[3]:
            rep.counterexamples.append((p, c, cq))
    return rep


def _transfer_all(s: str) -> list[str]:
    """Every word reachable by one transfer, one entry per (5-block, 1-block) choice."""
    runs = [(mt.start(), mt.end() - mt.start()) for mt in _ZERO_RUN.finditer(s)]
    fives = [a for a, L in runs if L == 5]
    ones = [a for a, L in runs if L == 1]
    out = []
    for f in fives:
        for o in ones:
            chars = list(s)
            drop = f + 4
            chars.insert(o + 1, "0")
            del chars[drop + (1 if o < drop else 0)]
            out.append("".join(chars))
    return out


def chain_uniformity_check(n: int, m, k: int) -> bool:
    """Propagate the uniform law on ``class(m)`` through ``k`` transfer steps
    exactly and test that it lands uniformly on all of ``class(m + k e)``."""
    if n > 14:
        raise OracleSizeError("n <= 14")
    classes = profile_classes(n)
    m = tuple(m)
    if m not in classes:
        raise ValueError(f"profile {m} has no word of length {n}")
    law = {s: Fraction(1, len(classes[m])) for s in classes[m]}
    for _ in range(k):
        nxt = defaultdict(Fraction)
        for s, w in law.items():
            moves = _transfer_all(s)
            if not moves:
                return False
            for t in moves:
                nxt[t] += w / len(moves)
        law = nxt
    target = classes.get(_shift(m, k), [])
    if set(law) != set(target):
        return False
    u = Fraction(1, len(target))
    return all(w == u for w in law.values())


def feasible_chain_starts(n: int, k: int) -> list:
    """Profiles whose class is nonempty and admits ``k`` transfer steps."""
    return sorted(p for p in profile_classes(n) if p[0] >= k and p[3] >= k)


# -- variance inequalities ----------------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Nondecreasing integer map on ``{lo, ..., lo + len(values) - 1}``."""

    lo: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be nondecreasing")

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __call__(self, i: int) -> int:
        if not self.lo <= i <= self.hi:
            raise ValueError(f"{i} outside [{self.lo}, {self.hi}]")
        return self.values[i - self.lo]

    def is_one_lipschitz(self) -> bool:
        return all(b - a <= 1 for a, b in zip(self.values, self.values[1:]))

    def min_slope(self, m: int) -> Optional[Fraction]:
        """Smallest ``(f(j)-f(i))/(j-i)`` over ``j >= i + m``; ``None`` if no such pair."""
        v = self.values
        best = None
        for i in range(len(v)):
            for j in range(i + m, len(v)):
                r = Fraction(v[j] - v[i], j - i)
                if best is None or r < best:
                    best = r
        return best

    def satisfies(self, c, m: int) -> bool:
        ms = self.min_slope(m)
        return self.is_one_lipschitz() and (ms is None or ms >= to_fraction(c))


def random_step_function(rng: np.random.Generator, length: int, max_zero_run: int) -> StepFunction:
    """Increments in ``{0, 1}`` with no run of more than ``max_zero_run`` zeros."""
    inc, run = [], 0
    for _ in range(length - 1):
        step = int(rng.integers(2)) if run < max_zero_run else 1
        run = run + 1 if step == 0 else 0
        inc.append(step)
    start = int(rng.integers(-5, 6))
    return StepFunction(int(rng.integers(-10, 11)), tuple(itertools.accumulate(inc, initial=start)))


@dataclass(frozen=True)
class InequalityCheck:
    holds: Optional[bool]
    lhs: object
    rhs: object
    note: str = ""


def verify_variance_transfer(f: StepFunction, B: FiniteDistribution, c, m: int) -> InequalityCheck:
    """``Var f(B) >= c^2 (1 - 2m / (c sqrt(Var B))) Var B`` decided exactly.

    Raises :class:`PreconditionError` if ``f`` violates its hypotheses or
    ``B`` leaves the domain of ``f``.
    """
    c = to_fraction(c)
    if c <= 0 or m <= 0:
        raise PreconditionError("c and m must be positive")
    if not f.satisfies(c, m):
        raise PreconditionError("f is not 1-Lipschitz with slope >= c over windows >= m")
    if any(not f.lo <= b <= f.hi for b in B.support):
        raise PreconditionError("support of B leaves the domain of f")
    v = B.variance()
    vf = B.map(f).variance()
    if v == 0:
        return InequalityCheck(True, vf, None, "Var B = 0: bound undefined, nothing to check")
    # rhs = c^2 V - 2 m c sqrt(V); compare without the square root
    gap = c * c * v - vf
    holds = gap <= 0 or 4 * m * m * c * c * v >= gap * gap
    rhs = f"{c * c * v} - {2 * m * c}*sqrt({v})"
    return InequalityCheck(holds, vf, rhs)


def ln2_rational_bounds() -> tuple[Fraction, Fraction]:
    """Rationals ``lo < ln 2 < hi`` (ln 2 = 0.6931471805599453...)."""
    return Fraction(693147180559945, 10**15), Fraction(693147180559946, 10**15)


def verify_log_lipschitz_variance(W: FiniteDistribution, kappa, n: int) -> InequalityCheck:
    """``Var W >= n (ln 2)^2 / (16 kappa^2)`` under the diameter and
    neighbouring-ratio hypotheses, using rational brackets of ``ln 2``.

    ``holds`` is ``None`` when the bracket cannot decide.
    """
    kappa = to_fraction(kappa)
    lo2, hi2 = ln2_rational_bounds()
    pts = sorted(W.support)
    a, b = pts[0], pts[-1]
    diam = b - a
    # diam >= 3 kappa ln2 sqrt(n), certified with the upper bracket
    if diam * diam < 9 * kappa * kappa * hi2 * hi2 * n:
        raise PreconditionError(f"support diameter {diam} below 3*kappa*ln2*sqrt({n})")
    probs = {s: W.pmf(s) for s in range(a, b + 1)}
    for i in range(a, b):
        for p, q in ((probs[i], probs[i + 1]), (probs[i + 1], probs[i])):
            # need q >= p (1 - kappa/sqrt(n))
            if q >= p:
                continue
            if p == 0 or kappa * kappa < (1 - q / p) ** 2 * n:
                raise PreconditionError(f"ratio condition fails at {i}")
    v = W.variance()
    need_hi = n * hi2 * hi2 / (16 * kappa * kappa)
    need_lo = n * lo2 * lo2 / (16 * kappa * kappa)
    holds = True if v >= need_hi else False if v < need_lo else None
    return InequalityCheck(holds, v, need_hi, f"margin {float(v - need_hi):.6g}")


def uniform_interval_W(kappa, n: int, scale: int = 4) -> FiniteDistribution:
    """Uniform law on ``{0, ..., D}`` with ``D = ceil(scale * kappa * ln2 * sqrt(n))``."""
    kappa = to_fraction(kappa)
    _, hi2 = ln2_rational_bounds()
    target = scale * kappa * hi2  # times sqrt(n)
    d = math.isqrt(int(math.floor(target * target * n)))
    while d * d < target * target * n:
        d += 1
    return FiniteDistribution.uniform(range(d + 1))


def log_lipschitz_threshold(kappa, n_max: int = 4000, scale: int = 4) -> Optional[int]:
    """Smallest ``n0`` such that the uniform-interval law satisfies the
    variance inequality for every ``n0 <= n <= n_max``; ``None`` if it fails at ``n_max``."""
    n0 = None
    for n in range(n_max, 0, -1):
        res = verify_log_lipschitz_variance(uniform_interval_W(kappa, n, scale), kappa, n)
        if res.holds is not True:
            break
        n0 = n
    return n0


# -- counting V^k ---------------------------------------------------------------------


def binary_entropy_iv(p: Fraction):
    """Natural-log binary entropy as an ``mpmath.iv`` interval."""
    p = to_fraction(p)
    if p <= 0 or p >= 1:
        return mpmath.iv.mpf(0)
    a = mpmath.iv.mpf(p.numerator) / p.denominator
    b = 1 - a
    return -(a * mpmath.iv.log(a)) - b * mpmath.iv.log(b)


def count_gap_vectors(k: int, budget: int) -> int:
    """Vectors in ``(N^2)^k`` with coordinate sum at most ``budget``, by a
    slot-by-slot DP over partial sums."""
    ways = [1] + [0] * budget
    for _ in range(2 * k):
        acc, new = 0, []
        for w in ways:
            acc += w
            new.append(acc)
        ways = new
    return sum(ways)


@dataclass(frozen=True)
class VkCount:
    k: int
    eps: Fraction
    count: int
    printed_bound: object  # interval for e^{H(eps/4) k} 2^{eps k / 2}
    proof_bound: object  # interval for e^{2 k H(eps/4)} 2^{eps k / 2}
    holds_printed: Optional[bool]
    holds_proof: Optional[bool]


def iv_endpoints(v) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an ``mpmath.iv`` interval."""
    lo, hi = v._mpi_
    return Fraction(*mpmath.libmp.to_rational(lo)), Fraction(*mpmath.libmp.to_rational(hi))


def _le(count: int, bound) -> Optional[bool]:
    lo, hi = iv_endpoints(bound)
    if lo >= count:
        return True
    if hi < count:
        return False
    return None


def count_Vk_and_bound(k: int, eps) -> VkCount:
    """Exact number of gap vectors with ``k`` matched pairs and at most
    ``eps k / 2`` skipped ones, against ``e^{H(eps/4) k} 2^{eps k / 2}`` and
    against the same bound with the entropy term doubled."""
    if k > 40 or k < 0:
        raise OracleSizeError("0 <= k <= 40")
    eps = to_fraction(eps)
    budget = math.floor(eps * k / 2)
    count = count_gap_vectors(k, budget)
    h = binary_entropy_iv(eps / 4)
    two_pow = mpmath.iv.mpf(2) ** (mpmath.iv.mpf(eps.numerator) * k / (2 * eps.denominator))
    printed = mpmath.iv.exp(h * k) * two_pow
    proof = mpmath.iv.exp(2 * h * k) * two_pow
    return VkCount(k, eps, count, printed, proof, _le(count, printed), _le(count, proof))


def random_variance_transfer_instance(rng: np.random.Generator):
    """A random admissible ``(f, B, c, m)``: ``m`` exceeds the longest flat run
    of ``f``, so the slope bound ``c`` taken as the exact minimum is positive."""
    length = int(rng.integers(4, 41))
    run = int(rng.integers(0, 4))
    f = random_step_function(rng, length, run)
    m = int(rng.integers(run + 1, run + 4))
    c = f.min_slope(m)
    if c is None:  # domain shorter than one window
        c = Fraction(1)
    size = int(rng.integers(1, length + 1))
    pts = sorted(rng.choice(length, size=size, replace=False).tolist())
    raw = rng.integers(1, 20, size=size).tolist()
    total = sum(raw)
    B = FiniteDistribution(tuple(f.lo + p for p in pts), tuple(Fraction(w, total) for w in raw))
    return f, B, c, m
