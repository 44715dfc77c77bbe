"""Matched-ones encoding of alignments and the typicality events B0..F, A.

The central quantity is the law of ``L(X~, Y) - L(X, Y)`` over the uniformly
random choice of a 5-block and a 1-block of ``X``.  :func:`delta_distribution_exact`
computes it exactly for every choice.  The fast path avoids one full DP per
choice: deleting a zero at offset ``p`` and inserting one after offset ``t``
only changes the prefix/suffix tables between the two edits, so per 5-block
one forward sweep (for 1-blocks to its right) and one backward sweep (for
1-blocks to its left) suffice, and each choice is then scored by combining
a prefix row with a suffix row.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from alignvar import align
from alignvar.align import AlignmentPairs, matched_ones
from alignvar.blocks import (
    NoEligibleBlockError,
    TransferChoice,
    expected_block_count,
    transfer,
    transfer_spans,
    zero_block_profile,
)
from alignvar.scoring import ScoringScheme, to_fraction
from alignvar.sequences import BinarySequence, SequenceLike, as_sequence

P_FIVE_SHORTER = Fraction(31, 32)  # P(Z < 5)
P_ONE_LONGER = Fraction(1, 4)  # P(Z > 1)
EVENT_NAMES = ("B0", "B1", "B3", "B4", "C", "D", "E", "F", "A")
EXHAUSTIVE_MAX_TOTAL = 24


@dataclass(frozen=True)
class EpsilonParams:
    eps: Fraction = Fraction(2, 5)
    eps1: Fraction = Fraction(1, 10)

    def __post_init__(self):
        object.__setattr__(self, "eps", to_fraction(self.eps))
        object.__setattr__(self, "eps1", to_fraction(self.eps1))
        if not (0 < self.eps < 1 and 0 < self.eps1 < 1):
            raise ValueError("eps and eps1 must lie in (0, 1)")

    @property
    def pstar(self) -> Fraction:
        return Fraction(1, 2) - self.eps / 8


# -- geometric block model --------------------------------------------------


def geometric_block_pmf(k: int) -> Fraction:
    """``P(Z = k) = 2^-(k+1)`` for the zero-run length between matched ones."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return Fraction(1, 2 ** (k + 1))


def geometric_cdf(k: int) -> Fraction:
    """``P(Z <= k)``."""
    return sum((geometric_block_pmf(i) for i in range(k + 1)), Fraction(0))


@dataclass(frozen=True)
class DeltaDistribution:
    """Law of the score change, as ``{delta: probability}`` with exact rationals."""

    pmf: dict
    outcomes: int = 0

    @property
    def p_plus(self) -> Fraction:
        return self.pmf.get(Fraction(1), Fraction(0))

    @property
    def p_minus(self) -> Fraction:
        return self.pmf.get(Fraction(-1), Fraction(0))

    @property
    def p_zero(self) -> Fraction:
        return self.pmf.get(Fraction(0), Fraction(0))

    @property
    def expected(self) -> Fraction:
        return sum((d * p for d, p in self.pmf.items()), Fraction(0))

    @property
    def support_ok(self) -> bool:
        return set(self.pmf) <= {Fraction(-1), Fraction(0), Fraction(1)}

    @property
    def total(self) -> Fraction:
        return sum(self.pmf.values(), Fraction(0))


def predicted_delta_distribution() -> DeltaDistribution:
    """Score change when every one is matched and the Y-runs facing the two
    chosen X-blocks are independent geometric lengths."""
    shorter = geometric_cdf(4)  # Z < 5
    longer = 1 - geometric_cdf(1)  # Z > 1
    plus = shorter * longer
    minus = (1 - shorter) * (1 - longer)
    return DeltaDistribution(
        {Fraction(1): plus, Fraction(-1): minus, Fraction(0): 1 - plus - minus}
    )


def block_model_delta(z5: np.ndarray, z1: np.ndarray) -> np.ndarray:
    """Change of matched zeros when a 5-block facing ``z5`` Y-zeros drops a
    zero and a 1-block facing ``z1`` Y-zeros gains one."""
    z5, z1 = np.asarray(z5), np.asarray(z1)
    gain = np.minimum(z1, 2) - np.minimum(z1, 1)
    loss = np.minimum(z5, 5) - np.minimum(z5, 4)
    return gain - loss


def simulate_block_model(trials: int, rng) -> dict:
    """Monte Carlo counts of the score change in the two-block geometric model."""
    from alignvar.sampling import _rng

    g = _rng(rng)
    z5 = g.geometric(0.5, size=trials) - 1
    z1 = g.geometric(0.5, size=trials) - 1
    delta = block_model_delta(z5, z1)
    return {d: int(np.count_nonzero(delta == d)) for d in (-1, 0, 1)}


# -- matched-ones encoding ----------------------------------------------------


def gap_vector(a, x: SequenceLike, y: SequenceLike) -> tuple[tuple[int, int], ...]:
    """Skipped ones before each matched 1-1 pair.

    Entry ``i`` counts the ones of ``x`` (resp. ``y``) strictly between
    matched pair ``i-1`` and matched pair ``i``; the first entry counts from
    the start of the words. Pairs that are not 1-1 are ignored.
    """
    x, y = as_sequence(x), as_sequence(y)
    a = a if isinstance(a, AlignmentPairs) else AlignmentPairs(tuple(a))
    out = []
    pi = nu = 0
    for i, j in matched_ones(a, x, y):
        out.append((x.symbols.count("1", pi, i - 1), y.symbols.count("1", nu, j - 1)))
        pi, nu = i, j
    return tuple(out)


def in_V(v: Sequence[tuple[int, int]], n: int, params: EpsilonParams = EpsilonParams()) -> bool:
    """At least ``p* n`` matched pairs and at most ``eps k / 2`` skipped ones."""
    k = len(v)
    skipped = sum(a + b for a, b in v)
    return k >= params.pstar * n and skipped <= params.eps * k / 2


@dataclass(frozen=True)
class BlockAlignStats:
    """Counts over consecutive matched 1-1 pairs with nothing skipped between.

    ``n1``/``n5`` are the numbers of 1- and 5-blocks of zeros in ``x``;
    ``p1``/``p5`` are ``None`` when the matching count is zero.
    """

    n1: int
    n5: int
    N1: int
    N1more: int
    N5: int
    N5less: int
    p1: Optional[Fraction]
    p5: Optional[Fraction]


def block_align_stats(a, x: SequenceLike, y: SequenceLike) -> BlockAlignStats:
    x, y = as_sequence(x), as_sequence(y)
    a = a if isinstance(a, AlignmentPairs) else AlignmentPairs(tuple(a))
    prof = zero_block_profile(x)
    mo = matched_ones(a, x, y)
    N1 = N1more = N5 = N5less = 0
    for (i0, j0), (i1, j1) in zip(mo, mo[1:]):
        # only zeros strictly between, on both sides
        if "1" in x.symbols[i0: i1 - 1] or "1" in y.symbols[j0: j1 - 1]:
            continue
        dx, dy = i1 - i0, j1 - j0
        if dx == 6:
            N5 += 1
            N5less += dy < 6
        elif dx == 2:
            N1 += 1
            N1more += dy > 2
    return BlockAlignStats(
        n1=prof.n1, n5=prof.n5, N1=N1, N1more=N1more, N5=N5, N5less=N5less,
        p1=Fraction(N1more, prof.n1) if prof.n1 else None,
        p5=Fraction(N5less, prof.n5) if prof.n5 else None,
    )


# -- exact law of the score change -----------------------------------------------


def transfer_score_changes(x: SequenceLike, y: SequenceLike,
                           scheme: ScoringScheme = ScoringScheme()) -> np.ndarray:
    """Scaled-integer ``L(transfer(x, c), y) - L(x, y)`` for every choice ``c``,
    as an array indexed ``[five_block, one_block]``."""
    x, y = as_sequence(x), as_sequence(y)
    fives, ones = transfer_spans(x)
    if not fives or not ones:
        raise NoEligibleBlockError(f"profile {zero_block_profile(x)} has no eligible pair")
    n, m = len(x), len(y)
    xa = x.array.astype(np.intp)
    ya = y.array.astype(np.intp)
    yr = ya[::-1].copy()
    table, gap = scheme.int_table, scheme.int_gap
    fwd = align.forward_matrix(xa, ya, table, gap)
    rev = align.forward_matrix(xa[::-1].copy(), yr, table, gap)  # rev[i] = suffix of length i
    table = table.astype(fwd.dtype)
    ramp = (np.arange(m + 1, dtype=np.int64) * gap).astype(fwd.dtype)
    base = fwd[n, m]
    out = np.empty((len(fives), len(ones)), dtype=fwd.dtype)
    ones_arr = np.array(ones)

    for fi, start in enumerate(fives):
        p = start + 4
        before = [(oi, t) for oi, t in enumerate(ones) if t < p]
        after = [(oi, t) for oi, t in enumerate(ones) if t > p]
        if after:
            want = {t: oi for oi, t in after}
            row = fwd[p]
            for r in range(p + 1, int(ones_arr.max()) + 1):
                row = align.step_row(row, int(xa[r]), ya, table, gap, ramp)
                if r in want:
                    grown = align.step_row(row, 0, ya, table, gap, ramp)
                    out[fi, want[r]] = np.max(grown + rev[n - r - 1][::-1]) - base
        if before:
            want = {t + 1: oi for oi, t in before}
            lo = min(want)
            row = rev[n - p - 1]
            for r in range(p - 1, lo - 1, -1):
                row = align.step_row(row, int(xa[r]), yr, table, gap, ramp)
                if r in want:
                    grown = align.step_row(fwd[r], 0, ya, table, gap, ramp)
                    out[fi, want[r]] = np.max(grown + row[::-1]) - base
    return out


def transfer_score_changes_naive(x: SequenceLike, y: SequenceLike,
                                 scheme: ScoringScheme = ScoringScheme()) -> np.ndarray:
    """Same as :func:`transfer_score_changes`, one full DP per choice."""
    x, y = as_sequence(x), as_sequence(y)
    fives, ones = transfer_spans(x)
    if not fives or not ones:
        raise NoEligibleBlockError(f"profile {zero_block_profile(x)} has no eligible pair")
    base = align.last_row(x.array, y.array, scheme.int_table, scheme.int_gap)[-1]
    out = np.empty((len(fives), len(ones)), dtype=object)
    for fi in range(len(fives)):
        for oi in range(len(ones)):
            xt = transfer(x, TransferChoice(fi, oi))
            out[fi, oi] = align.last_row(xt.array, y.array, scheme.int_table, scheme.int_gap)[-1] - base
    return out


def delta_distribution_exact(x: SequenceLike, y: SequenceLike,
                             scheme: ScoringScheme = ScoringScheme(),
                             method: str = "fast") -> DeltaDistribution:
    """Exact law of ``L(X~, y) - L(x, y)`` given ``x, y``; every
    (5-block, 1-block) choice has probability ``1 / (n5 * n1)``."""
    if method == "fast":
        changes = transfer_score_changes(x, y, scheme)
    elif method == "naive":
        changes = transfer_score_changes_naive(x, y, scheme)
    else:
        raise ValueError(f"unknown method {method!r}")
    total = changes.size
    counts = Counter(int(v) for v in changes.ravel())
    pmf = {scheme.unscale(v): Fraction(c, total) for v, c in sorted(counts.items())}
    return DeltaDistribution(pmf, outcomes=total)


# -- events ------------------------------------------------------------------


@dataclass
class EventReport:
    """Flags for the typicality events plus everything needed to recompute them."""

    flags: dict
    reasons: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)
    exhaustive: Optional[dict] = None

    def __getitem__(self, name: str) -> bool:
        return self.flags[name]

    def to_dict(self) -> dict:
        return {
            "flags": {k: bool(self.flags[k]) for k in EVENT_NAMES},
            "reasons": dict(sorted(self.reasons.items())),
            "numbers": {k: _jsonable(v) for k, v in sorted(self.numbers.items())},
            "exhaustive": None if self.exhaustive is None
            else {k: _jsonable(v) for k, v in sorted(self.exhaustive.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, np.integer):
        return int(v)
    return v


def _block_mean(n: int, i: int) -> Fraction:
    return expected_block_count(n, i) if i <= n else Fraction(0)


def _ratio_event(num: int, den: int, threshold: Fraction, what: str):
    if den == 0:
        return False, f"{what} denominator is zero"
    return Fraction(num, den) >= threshold, None


def _alignment_events(v, x, y, params: EpsilonParams):
    """C, D, E, F for one alignment; an alignment outside V satisfies them vacuously."""
    n = len(x)
    gv = gap_vector(v, x, y)
    st = block_align_stats(v, x, y)
    flags, reasons = {}, {}
    if not in_V(gv, n, params):
        for name in "CDEF":
            flags[name] = True
            reasons[name] = "alignment not in V (vacuous)"
        return flags, reasons, st, gv
    e1 = params.eps1
    checks = {
        "C": _ratio_event(st.N5less, st.N5, P_FIVE_SHORTER - e1 / 4, "N5(v)"),
        "D": _ratio_event(st.N1more, st.N1, P_ONE_LONGER - e1 / 4, "N1(v)"),
        "E": _ratio_event(st.N5less, st.n5, P_FIVE_SHORTER - e1 / 2, "n5"),
        "F": _ratio_event(st.N1more, st.n1, P_ONE_LONGER - e1 / 2, "n1"),
    }
    for name, (ok, why) in checks.items():
        flags[name] = ok
        if why:
            reasons[name] = why
    return flags, reasons, st, gv


def check_events(x: SequenceLike, y: SequenceLike,
                 scheme: ScoringScheme = ScoringScheme(),
                 params: EpsilonParams = EpsilonParams(),
                 strict_paper_thresholds: bool = False,
                 exhaustive: Optional[bool] = None) -> EventReport:
    """Evaluate B0, B1, B3, B4, C, D, E, F and A on ``(x, y)``.

    C-F are evaluated on the canonical traceback alignment. When
    ``exhaustive`` is true (default: whenever ``|x| + |y| <= 24``) they are
    also evaluated over every optimal alignment by brute force and reported
    under ``report.exhaustive``.
    """
    x, y = as_sequence(x), as_sequence(y)
    n = len(x)
    eps, e1 = params.eps, params.eps1
    flags, reasons, nums = {}, {}, {}

    ones_x, ones_y = x.count_ones(), y.count_ones()
    dev_x = abs(ones_x - Fraction(len(x), 2))
    dev_y = abs(ones_y - Fraction(len(y), 2))
    flags["B0"] = dev_x <= eps * len(x) / 16 and dev_y <= eps * len(y) / 16
    nums.update(ones_x=ones_x, ones_y=ones_y, B0_slack_x=eps * len(x) / 16,
                B0_slack_y=eps * len(y) / 16)

    min_ones = align.min_matched_ones_among_optimal(x, y, scheme)
    b1_thr = Fraction(n, 2) - eps * n / 8
    flags["B1"] = min_ones >= b1_thr
    nums.update(min_matched_ones=min_ones, B1_threshold=b1_thr)

    prof = zero_block_profile(x)
    if strict_paper_thresholds:
        b3_thr = (Fraction(1, 32) - eps / 16) * n
        b4_thr = (Fraction(1, 4) - eps / 16) * n
    else:
        b3_thr = _block_mean(n, 5) - eps * n / 16
        b4_thr = _block_mean(n, 1) - eps * n / 16
    flags["B3"] = prof.n5 >= b3_thr
    flags["B4"] = prof.n1 >= b4_thr
    nums.update(profile=list(prof), B3_threshold=b3_thr, B4_threshold=b4_thr)

    v = align.optimal_traceback(x, y, scheme)
    ev, why, st, gv = _alignment_events(v, x, y, params)
    flags.update(ev)
    reasons.update(why)
    nums.update(stats=asdict(st), canonical_in_V=in_V(gv, n, params),
                canonical_matched_pairs=len(gv), canonical_skipped=sum(a + b for a, b in gv))
    nums["B2_derived"] = nums["canonical_in_V"]

    if prof.n5 and prof.n1:
        dist = delta_distribution_exact(x, y, scheme)
        a1 = dist.p_plus >= P_FIVE_SHORTER * P_ONE_LONGER - e1
        a3 = dist.p_minus <= Fraction(1, 32) + e1
        flags["A"] = a1 and a3
        nums.update(delta_pmf=dist.pmf, p_plus=dist.p_plus, p_minus=dist.p_minus)
    else:
        flags["A"] = False
        reasons["A"] = "no 5-block or no 1-block in x"

    if exhaustive is None:
        exhaustive = len(x) + len(y) <= EXHAUSTIVE_MAX_TOTAL
    ex = None
    if exhaustive:
        from alignvar.oracles import brute_force_optimal

        _, optima = brute_force_optimal(x, y, scheme)
        seen = {}
        for pairs in optima:
            alt = AlignmentPairs(pairs)
            seen.setdefault(tuple(matched_ones(alt, x, y)), alt)
        agg = dict.fromkeys("CDEF", True)
        all_in_v = True
        for alt in seen.values():
            f, _, _, g = _alignment_events(alt, x, y, params)
            all_in_v &= in_V(g, n, params)
            for k in "CDEF":
                agg[k] &= f[k]
        ex = {**agg, "B2": all_in_v, "optimal_alignments": len(optima),
              "distinct_matchings": len(seen)}

    return EventReport(flags=flags, reasons=reasons, numbers=nums, exhaustive=ex)


# -- parameter conditions ---------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    name: str
    holds: Optional[bool]
    detail: str


@dataclass(frozen=True)
class ConditionLedger:
    conditions: tuple
    printed_variants: tuple = ()

    @property
    def overall(self) -> bool:
        return all(c.holds is True for c in self.conditions)

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions + self.printed_variants:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "conditions": [asdict(c) for c in self.conditions],
            "printed_variants": [asdict(c) for c in self.printed_variants],
        }


def _iv(q: Fraction):
    return mpmath.iv.mpf(q.numerator) / q.denominator


def _iv_entropy(p: Fraction):
    if p <= 0 or p >= 1:
        return mpmath.iv.mpf(0)
    a, b = _iv(p), _iv(1 - p)
    return -(a * mpmath.iv.log(a)) - b * mpmath.iv.log(b)


def _iv_kl(a: Fraction, p: Fraction):
    """Bernoulli relative entropy ``D(a || p)`` as an interval."""
    terms = mpmath.iv.mpf(0)
    if a > 0:
        terms += _iv(a) * mpmath.iv.log(_iv(a) / _iv(p))
    if a < 1:
        terms += _iv(1 - a) * mpmath.iv.log(_iv(1 - a) / _iv(1 - p))
    return terms


def chernoff_rate(eps1) -> Optional[object]:
    """Interval for the large-deviation rate of a mean-31/32 indicator
    average falling below ``31/33 - eps1/4``; ``None`` means the event is
    impossible (infinite rate)."""
    a = Fraction(31, 33) - to_fraction(eps1) / 4
    if a <= 0:
        return None
    return _iv_kl(a, P_FIVE_SHORTER)


def _sign(iv_value, strict: bool) -> Optional[bool]:
    """Certified truth of ``value < 0`` (strict) or ``value <= 0``."""
    from alignvar.oracles import iv_endpoints

    lo, hi = iv_endpoints(iv_value)
    if hi < 0 or (not strict and hi <= 0):
        return True
    if lo > 0 or (strict and lo >= 0):
        return False
    return None


def validate_parameters(params: EpsilonParams = EpsilonParams(), s11=50) -> ConditionLedger:
    """Check every smallness condition on ``eps``, ``eps1`` and ``s(1,1)``.

    Rational inequalities are decided exactly; the entropy condition uses
    outward-rounded interval arithmetic and may come back undecided (``None``).
    """
    eps, e1, s11 = params.eps, params.eps1, to_fraction(s11)
    conds = []

    def add(name, holds, lhs, op, rhs):
        conds.append(Condition(name, holds, f"{lhs} {op} {rhs}"))

    lhs = 16 / eps
    add("epsi0", s11 > lhs, s11, ">", lhs)
    lhs = Fraction(3, 8) * eps / (1 - eps / 4)
    add("epsi1", lhs <= eps / 2, lhs, "<=", eps / 2)
    lhs = (P_FIVE_SHORTER - e1 / 4) * (1 - 3 * eps / (Fraction(1, 4) - eps / 2))
    add("epsi2", lhs >= P_FIVE_SHORTER - e1 / 2, lhs, ">=", P_FIVE_SHORTER - e1 / 2)
    lhs = (P_ONE_LONGER - e1 / 4) * (1 - 3 * eps / (2 - eps / 2))
    add("epsi3", lhs >= P_ONE_LONGER - e1 / 2, lhs, ">=", P_ONE_LONGER - e1 / 2)
    lhs = Fraction(35, 64) + e1 / 4
    add("epsi4", lhs < 1, lhs, "<", 1)
    lhs = Fraction(1, 32) - 7 * eps / 16
    add("epsi5", lhs >= Fraction(1, 33), lhs, ">=", Fraction(1, 33))
    rate = chernoff_rate(e1)
    if rate is None:
        conds.append(Condition("epsi6", True, "rate is infinite (threshold <= 0)"))
    else:
        value = _iv_entropy(eps) + _iv(eps) - rate
        conds.append(Condition("epsi6", _sign(value, strict=True),
                               f"H(eps)+eps-gamma(eps1) in {mpmath.nstr(value, 12)} < 0"))
    add("bias", e1 < Fraction(23, 32), e1, "<", Fraction(23, 32))

    printed = (Fraction(1, 4) - e1 / 4) * (1 - 3 * eps / (Fraction(1, 4) - eps / 2))
    variants = (Condition(
        "epsi3_printed", printed >= P_FIVE_SHORTER - e1 / 2,
        f"(1/4-eps1/4)(1-3eps/(1/4-eps/2)) >= 31/32-eps1/2: {printed} >= {P_FIVE_SHORTER - e1 / 2}",
    ),)
    return ConditionLedger(tuple(conds), variants)
