"""Acceptance criteria, one test each; every test records a PASS/FAIL line
that is echoed in the terminal summary."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from alignvar import (
    BlockProfile,
    ScoringScheme,
    TransferChoice,
    block_align_stats,
    expected_block_count,
    iid_sequence,
    optimal_score,
    predicted_delta_distribution,
    score_of_alignment,
    transfer,
    zero_block_profile,
)
from alignvar import cli
from alignvar import experiments as E
from alignvar import oracles as O
from alignvar.blocks import transfer_spans
from alignvar.events import simulate_block_model


def _words(max_len):
    return [format(v, f"0{n}b") if n else "" for n in range(max_len + 1) for v in range(2**n)]


def test_criterion_01_dp_correctness(criterion):
    t0 = time.perf_counter()
    words = _words(6)
    rng = np.random.default_rng(20240601)
    mismatches = checked = 0
    for s11 in (1, 2, 50):
        sc = ScoringScheme(s11=s11)
        for x, y in itertools.product(words, words):
            mismatches += optimal_score(x, y, sc) != O.brute_force_optimal(x, y, sc)[0]
            checked += 1
        for _ in range(500):
            x = iid_sequence(int(rng.integers(0, 11)), rng)
            y = iid_sequence(int(rng.integers(0, 11)), rng)
            mismatches += optimal_score(x, y, sc) != O.brute_force_optimal(x, y, sc)[0]
            checked += 1
    took = time.perf_counter() - t0
    ok = mismatches == 0 and took < 120
    criterion("1", ok, f"{mismatches} mismatches over {checked} pairs in {took:.1f}s")
    assert ok


def test_criterion_02_worked_examples(criterion):
    s1 = ScoringScheme(s11=1)
    x, y = "1011000001", "10010101"
    shown = [(1, 1), (2, 2), (3, 4), (4, 6), (5, 7), (10, 8)]
    fives, ones = transfer_spans(x)
    xt = transfer(x, TransferChoice(0, 0))
    sec2 = (len(fives), len(ones)) == (1, 1) and score_of_alignment(x, y, shown, s1) == 6 \
        and optimal_score(x, y, s1) == 6 and optimal_score(xt, y, s1) == 7

    x3 = "0101000001100000"
    x3t = transfer(x3, TransferChoice(1, 0))
    sec3 = x3t.symbols == "0010100000110000" and zero_block_profile(x3) == BlockProfile(2, 0, 0, 2) \
        and zero_block_profile(x3t) == BlockProfile(1, 1, 1, 1)

    x4, y4 = "10101011000001", "101000110001"
    v4 = [(1, 1), (2, 2), (3, 3), (4, 4), (5, 7), (8, 8), (9, 9), (10, 10), (11, 11), (14, 12)]
    st = block_align_stats(v4, x4, y4)
    sec4 = (st.n1, st.N1, st.N1more, st.p1, st.n5, st.N5less, st.p5) == \
        (3, 2, 1, Fraction(1, 3), 1, 1, Fraction(1))
    ok = sec2 and sec3 and sec4
    criterion("2", ok, f"score 6->7: {sec2}, transfer/profile: {sec3}, block stats: {sec4}")
    assert ok


def test_criterion_03_delta_support(criterion):
    rng = np.random.default_rng(7)
    violations = done = 0
    while done < 10_000:
        n = int(rng.choice([50, 200]))
        sc = ScoringScheme(s11=int(rng.choice([1, 5, 50])))
        x, y = iid_sequence(n, rng), iid_sequence(n, rng)
        fives, ones = transfer_spans(x)
        if not fives or not ones:
            continue
        base = optimal_score(x, y, sc)
        for _ in range(10):
            c = TransferChoice(int(rng.integers(len(fives))), int(rng.integers(len(ones))))
            violations += optimal_score(transfer(x, c), y, sc) - base not in (-1, 0, 1)
            done += 1
    criterion("3", violations == 0, f"{violations} violations in {done} transfers")
    assert violations == 0


def test_criterion_04_geometric_predictions(criterion):
    t0 = time.perf_counter()
    d = predicted_delta_distribution()
    exact_ok = (d.p_plus, d.p_minus, d.p_zero) == (Fraction(31, 128), Fraction(3, 128), Fraction(94, 128))
    trials = 100_000
    counts = simulate_block_model(trials, np.random.default_rng(44))
    zs = []
    for delta, p in ((1, d.p_plus), (-1, d.p_minus), (0, d.p_zero)):
        se = math.sqrt(float(p * (1 - p)) / trials)
        zs.append(abs(counts[delta] / trials - float(p)) / se)
    took = time.perf_counter() - t0
    ok = exact_ok and max(zs) <= 3 and took < 60
    criterion("4", ok, f"exact={exact_ok}, |z| max {max(zs):.2f} at 1e5 trials, {took:.1f}s")
    assert ok


def test_criterion_05_delta_bias_n2000(criterion):
    t0 = time.perf_counter()
    cfg = E.ExperimentConfig(sizes=(2000,), replicas=100, s11=50, eps1=Fraction(1, 20), seed=0)
    rec = E.estimate_delta_bias(cfg)
    e1 = Fraction(1, 20)
    plus_ok = sum(r["p_plus"] >= Fraction(31, 128) - e1 for r in rec.rows)
    minus_ok = sum(r["p_minus"] <= Fraction(1, 32) + e1 for r in rec.rows)
    took = time.perf_counter() - t0
    ok = plus_ok >= 95 and minus_ok >= 95 and took < 1800
    mean_minus = float(rec.summary["2000"]["mean_p_minus"])
    criterion("5", ok, f"P(+1) bound in {plus_ok}/100, P(-1) bound in {minus_ok}/100 "
                       f"(mean P(-1) {mean_minus:.3f}), {took:.0f}s")
    assert ok


def test_criterion_06_variance_linearity(criterion):
    t0 = time.perf_counter()
    cfg = E.ExperimentConfig(sizes=(128, 256, 512, 1024), replicas=1000, s11=50, seed=1)
    rec = E.estimate_variance_curve(cfg)
    ratios = [r["var_over_n"] for r in rec.rows]
    spread = max(ratios) / min(ratios)
    growth = rec.rows[-1]["var_score"] / rec.rows[0]["var_score"]
    took = time.perf_counter() - t0
    ok = spread <= 2 and 4 <= growth <= 16 and took < 1800
    criterion("6", ok, f"max/min Var/n = {float(spread):.3f}, Var1024/Var128 = {float(growth):.2f}, {took:.0f}s")
    assert ok


def test_criterion_07_chain_uniformity(criterion):
    t0 = time.perf_counter()
    cases = bad_chain = 0
    for n in range(15):
        for k in range(3):
            for m in O.feasible_chain_starts(n, k):
                cases += 1
                bad_chain += not O.chain_uniformity_check(n, m, k)
    ratios = bad_ratio = 0
    for n in range(1, 15):
        rep = O.profile_count_ratio(n)
        ratios += rep.checked
        bad_ratio += len(rep.counterexamples)
    took = time.perf_counter() - t0
    ok = bad_chain == 0 and bad_ratio == 0 and took < 600
    criterion("7", ok, f"{cases} chain cases ({bad_chain} bad), {ratios} ratios ({bad_ratio} bad), {took:.1f}s")
    assert ok


def test_criterion_08_block_moments(criterion):
    enum_bad = []
    for n in range(1, 17):
        words = [format(v, f"0{n}b") for v in range(2**n)]
        for i in (1, 2, 4, 5):
            if i > n:
                continue
            total = sum(sum(1 for r in w.split("1") if len(r) == i) for w in words)
            if expected_block_count(n, i) != Fraction(total, 2**n):
                enum_bad.append((n, i))
    bound_bad = 0
    for i in (1, 2, 4, 5):
        d = 2 ** (i + 2)
        for n in range(i, 10**6 + 1):
            mu = expected_block_count(n, i)
            bound_bad += abs(mu.numerator * d - n * mu.denominator) > i * d * mu.denominator
    ok = not enum_bad and bound_bad == 0
    criterion("8", ok, f"enumeration mismatches {enum_bad}, bound violations {bound_bad} up to n=1e6")
    assert ok


def test_criterion_09_profile_box(criterion):
    t0 = time.perf_counter()
    exact = O.exact_profile_stats(16).box_probability
    freq = E.profile_box_frequency(1024, 10_000, seed=9)
    took = time.perf_counter() - t0
    ok = exact >= Fraction(1, 5) and freq >= Fraction(1, 5) and took < 300
    criterion("9", ok, f"P(box) at n=16 = {exact}, frequency at n=1024 = {float(freq):.4f}, {took:.1f}s")
    assert ok


def test_criterion_10_variance_inequalities(criterion):
    rng = np.random.default_rng(1010)
    transfer_fail = 0
    for _ in range(1000):
        f, B, c, m = O.random_variance_transfer_instance(rng)
        transfer_fail += O.verify_variance_transfer(f, B, c, m).holds is not True
    loglip_fail = 0
    thresholds = {}
    for kappa in (Fraction(1, 2), Fraction(1), Fraction(2)):
        n0 = O.log_lipschitz_threshold(kappa, 2000)
        thresholds[str(kappa)] = n0
        if n0 is None:
            loglip_fail += 1
            continue
        for n in range(n0, 2001):
            loglip_fail += O.verify_log_lipschitz_variance(O.uniform_interval_W(kappa, n), kappa, n).holds is not True
    ok = transfer_fail == 0 and loglip_fail == 0
    criterion("10", ok, f"transfer failures {transfer_fail}/1000, log-Lipschitz failures {loglip_fail}, "
                        f"thresholds {thresholds}")
    assert ok


def _vk_sweep(attr):
    t0 = time.perf_counter()
    fails = []
    for eps in (Fraction(1, 10), Fraction(1, 5), Fraction(2, 5)):
        for k in range(41):
            r = O.count_Vk_and_bound(k, eps)
            if getattr(r, attr) is not True:
                fails.append((k, str(eps), r.count))
    return fails, time.perf_counter() - t0


def test_criterion_11_vk_bound(criterion):
    fails, took = _vk_sweep("holds_printed")
    ok = not fails and took < 60
    criterion("11", ok, f"{len(fails)} of 123 (k, eps) exceed e^(H(eps/4)k) 2^(eps k/2); "
                        f"first {fails[:3]}, {took:.1f}s")
    assert ok


def test_criterion_11b_vk_doubled_entropy_bound(criterion):
    fails, took = _vk_sweep("holds_proof")
    ok = not fails and took < 60
    criterion("11b", ok, f"{len(fails)} of 123 (k, eps) exceed e^(2H(eps/4)k) 2^(eps k/2), {took:.1f}s")
    assert ok


def test_criterion_12_reproducibility(criterion, tmp_path):
    verbs = {
        "variance": ["--sizes", "32,64", "--replicas", "8"],
        "delta-bias": ["--sizes", "48", "--replicas", "6"],
        "chain-slope": ["--sizes", "64", "--replicas", "3", "--steps", "5"],
        "events": ["--sizes", "40", "--replicas", "6"],
    }
    mismatched = []
    for verb, extra in verbs.items():
        outputs = []
        for workers in (1, 8):
            out = tmp_path / f"{verb}-{workers}"
            assert cli.main([verb, *extra, "--seed", "77", "--workers", str(workers), "--out", str(out)]) == 0
            outputs.append((out / f"{verb}.csv").read_bytes())
        replayed = E.replay(tmp_path / f"{verb}-1" / "manifest.json", workers=8).to_csv().encode()
        if not (outputs[0] == outputs[1] == replayed):
            mismatched.append(verb)
    ok = not mismatched
    criterion("12", ok, f"byte-identical CSV at workers 1 and 8 plus manifest replay; mismatches {mismatched}")
    assert ok
