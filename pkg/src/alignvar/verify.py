"""The exact-check suite behind ``alignvar verify``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from alignvar import oracles
from alignvar.align import optimal_score, score_of_alignment
from alignvar.blocks import TransferChoice, expected_block_count, transfer, zero_block_profile
from alignvar.events import (
    block_align_stats,
    predicted_delta_distribution,
    transfer_score_changes,
    transfer_score_changes_naive,
)
from alignvar.sampling import RngStream, iid_sequence
from alignvar.scoring import ScoringScheme


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    informational: bool = False


def _words(max_len: int):
    for n in range(max_len + 1):
        for v in range(2**n):
            yield format(v, f"0{n}b") if n else ""


def check_dp_bruteforce(max_len: int, random_pairs: int, rng) -> CheckResult:
    bad = total = 0
    words = list(_words(max_len))
    for s11 in (1, 2, 50):
        sc = ScoringScheme(s11=s11)
        for x, y in itertools.product(words, words):
            total += 1
            bad += optimal_score(x, y, sc) != oracles.brute_force_optimal(x, y, sc)[0]
        for _ in range(random_pairs):
            x = iid_sequence(int(rng.integers(0, 11)), rng)
            y = iid_sequence(int(rng.integers(0, 11)), rng)
            total += 1
            bad += optimal_score(x, y, sc) != oracles.brute_force_optimal(x, y, sc)[0]
    return CheckResult("dp_vs_bruteforce", bad == 0, f"{bad} mismatches in {total} pairs")


def check_worked_examples() -> CheckResult:
    s1 = ScoringScheme(s11=1)
    x, y = "1011000001", "10010101"
    shown = [(1, 1), (2, 2), (3, 4), (4, 6), (5, 7), (10, 8)]
    xt = transfer(x, TransferChoice(0, 0))
    ok = (score_of_alignment(x, y, shown, s1) == 6 == optimal_score(x, y, s1)
          and optimal_score(xt, y, s1) == 7)
    x3 = "0101000001100000"
    x3t = transfer(x3, TransferChoice(1, 0))
    ok &= x3t.symbols == "0010100000110000"
    ok &= tuple(zero_block_profile(x3)) == (2, 0, 0, 2) and tuple(zero_block_profile(x3t)) == (1, 1, 1, 1)
    x4, y4 = "10101011000001", "101000110001"
    a4 = [(1, 1), (2, 2), (3, 3), (4, 4), (5, 7), (8, 8), (9, 9), (10, 10), (11, 11), (14, 12)]
    st = block_align_stats(a4, x4, y4)
    ok &= (st.n1, st.N1, st.N1more, st.p1, st.n5, st.N5less, st.p5) == (3, 2, 1, Fraction(1, 3), 1, 1, 1)
    return CheckResult("worked_examples", ok, "score 6->7, profile (2,0,0,2)->(1,1,1,1), block stats")


def check_delta_support(trials: int, rng) -> CheckResult:
    bad = done = 0
    while done < trials:
        n = int(rng.choice([50, 200]))
        sc = ScoringScheme(s11=int(rng.choice([1, 5, 50])))
        x, y = iid_sequence(n, rng), iid_sequence(n, rng)
        p = zero_block_profile(x)
        if not (p.n1 and p.n5):
            continue
        ch = transfer_score_changes(x, y, sc)
        vals = set(int(v) for v in ch.ravel())
        bad += not vals <= {-sc.scale, 0, sc.scale}
        done += ch.size
    return CheckResult("delta_support", bad == 0, f"{done} transfers, {bad} pairs with |dL| > 1")


def check_fast_delta(pairs: int, rng) -> CheckResult:
    bad = done = 0
    while done < pairs:
        n = int(rng.integers(12, 60))
        x, y = iid_sequence(n, rng), iid_sequence(n, rng)
        p = zero_block_profile(x)
        if not (p.n1 and p.n5):
            continue
        sc = ScoringScheme(s11=int(rng.choice([1, 5, 50])))
        bad += not np.array_equal(transfer_score_changes(x, y, sc),
                                  transfer_score_changes_naive(x, y, sc).astype(np.int64))
        done += 1
    return CheckResult("fast_vs_naive_delta", bad == 0, f"{bad} mismatches in {done} pairs")


def check_predicted() -> CheckResult:
    d = predicted_delta_distribution()
    ok = (d.p_plus, d.p_minus, d.p_zero) == (Fraction(31, 128), Fraction(3, 128), Fraction(94, 128))
    return CheckResult("predicted_delta", ok, f"({d.p_plus}, {d.p_minus}, {d.p_zero})")


def check_block_means(max_n: int) -> CheckResult:
    bad = []
    for n in range(1, max_n + 1):
        st = oracles.exact_profile_stats(n)
        for i in (1, 2, 4, 5):
            if i <= n and st.means[i] != expected_block_count(n, i):
                bad.append((n, i))
    return CheckResult("block_means", not bad, f"mismatches {bad}")


def check_profile_ratio(max_n: int) -> CheckResult:
    checked = bad = 0
    for n in range(1, max_n + 1):
        rep = oracles.profile_count_ratio(n)
        checked += rep.checked
        bad += len(rep.counterexamples)
    return CheckResult("profile_count_ratio", bad == 0, f"{checked} ratios, {bad} counterexamples")


def check_chain(max_n: int) -> CheckResult:
    total = bad = 0
    for n in range(max_n + 1):
        for k in range(3):
            for m in oracles.feasible_chain_starts(n, k):
                total += 1
                bad += not oracles.chain_uniformity_check(n, m, k)
    return CheckResult("chain_uniformity", bad == 0, f"{total} (n, m, k) cases, {bad} non-uniform")


def check_variance_transfer(count: int, rng) -> CheckResult:
    bad = 0
    for _ in range(count):
        f, B, c, m = oracles.random_variance_transfer_instance(rng)
        bad += oracles.verify_variance_transfer(f, B, c, m).holds is not True
    return CheckResult("variance_transfer", bad == 0, f"{bad} failures in {count} instances")


def check_log_lipschitz(n_max: int) -> list:
    out = []
    for kappa in (Fraction(1, 2), Fraction(1), Fraction(2)):
        n0 = oracles.log_lipschitz_threshold(kappa, n_max)
        out.append(CheckResult(f"log_lipschitz_kappa_{kappa}", n0 is not None,
                               f"holds for {n0} <= n <= {n_max}"))
    n0 = oracles.log_lipschitz_threshold(Fraction(1, 10), n_max)
    out.append(CheckResult("log_lipschitz_kappa_1/10", n0 is not None,
                           f"threshold {n0} (small kappa: uniform law too narrow)", informational=True))
    return out


def check_vk() -> list:
    printed = proof = 0
    for eps in (Fraction(1, 10), Fraction(1, 5), Fraction(2, 5)):
        for k in range(41):
            r = oracles.count_Vk_and_bound(k, eps)
            printed += r.holds_printed is not True
            proof += r.holds_proof is not True
    return [
        CheckResult("Vk_printed_bound", printed == 0, f"{printed} (k, eps) cases above the bound",
                    informational=True),
        CheckResult("Vk_doubled_entropy_bound", proof == 0, f"{proof} (k, eps) cases above the bound"),
    ]


def run_verification(seed: int = 0, quick: bool = False) -> list:
    rng = RngStream(seed, (0,)).generator()
    results = [
        check_dp_bruteforce(4 if quick else 6, 50 if quick else 500, rng),
        check_worked_examples(),
        check_predicted(),
        check_delta_support(1000 if quick else 10_000, rng),
        check_fast_delta(30 if quick else 200, rng),
        check_block_means(12 if quick else 16),
        check_profile_ratio(12 if quick else 14),
        check_chain(12 if quick else 14),
        check_variance_transfer(200 if quick else 1000, rng),
    ]
    results += check_log_lipschitz(500 if quick else 2000)
    results += check_vk()
    return results
