import csv
import json
import math
from fractions import Fraction

import pytest

from alignvar import cli
from alignvar import experiments as E
from alignvar.oracles import binomial_window_probability, exact_score_distribution
from alignvar.scoring import ScoringScheme


def small(**kw):
    base = dict(sizes=(24, 40), replicas=6, seed=11)
    base.update(kw)
    return E.ExperimentConfig(**base)


# -- config and statistics ---------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        E.ExperimentConfig(replicas=0)
    with pytest.raises(ValueError):
        E.ExperimentConfig(sizes=())
    with pytest.raises(ValueError):
        E.ExperimentConfig(eps=2)
    cfg = E.ExperimentConfig(s11=0.5)
    assert cfg.scheme == ScoringScheme(s11=Fraction(1, 2))
    assert "workers" not in cfg.to_dict()


def test_sample_variance_and_jackknife():
    vals = [1, 2, 4, 7, 11]
    assert E.sample_variance(vals) == Fraction(33, 2)
    assert E.sample_variance([3]) is None
    # brute-force jackknife for comparison
    loo = [float(E.sample_variance(vals[:i] + vals[i + 1:])) for i in range(5)]
    mean = sum(loo) / 5
    direct = math.sqrt(4 / 5 * sum((v - mean) ** 2 for v in loo))
    assert E.jackknife_variance_se(vals) == pytest.approx(direct, rel=1e-12)
    assert E.jackknife_variance_se([1, 2]) is None


def test_wilson_interval():
    lo, hi = E.wilson_interval(0, 10)
    assert lo == 0 and 0 < hi < 0.35
    lo, hi = E.wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - 0.5 == pytest.approx(0.5 - lo)


def test_fit_slope():
    assert E.fit_slope([1, 2, 3], [2, 4, 6]) == pytest.approx(2)
    assert E.fit_slope([1], [1]) is None


def test_slope_windows():
    assert E.slope_windows([0, 0, 0, 1, 2], 2, Fraction(1, 100)) == (5, 6)
    assert E.slope_windows([5], 1, Fraction(1, 100)) == (0, 0)
    assert E.window_length(2000, Fraction(1, 10)) == 3


# -- drivers -----------------------------------------------------------------------------


def test_variance_curve_small():
    rec = E.estimate_variance_curve(small())
    assert rec.header[:6] == ["n", "replicas", "mean_score", "var_score", "var_stderr", "var_over_n"]
    assert [r["n"] for r in rec.rows] == [24, 40]
    assert all(r["var_score"] >= 0 for r in rec.rows)


def test_variance_single_replica_is_flagged():
    rec = E.estimate_variance_curve(small(replicas=1))
    assert rec.rows[0]["var_score"] is None and not rec.summary["variance_defined"]
    assert ",," in rec.to_csv().splitlines()[1]


def test_variance_n1_matches_exact_enumeration():
    exact = exact_score_distribution(1, ScoringScheme(s11=1)).variance()
    rec = E.estimate_variance_curve(E.ExperimentConfig(sizes=(1,), replicas=4000, s11=1, seed=3))
    row = rec.rows[0]
    assert abs(float(row["var_score"] - exact)) <= 4 * row["var_stderr"]


def test_delta_bias_rows():
    rec = E.estimate_delta_bias(small(sizes=(60,)))
    assert rec.header[:7] == ["n", "replica", "p_plus", "p_minus", "p_zero", "expected_delta", "event_A"]
    for r in rec.rows:
        assert r["p_plus"] + r["p_minus"] + r["p_zero"] == 1
        assert r["expected_delta"] == r["p_plus"] - r["p_minus"]


def test_delta_bias_infeasible_size():
    with pytest.raises(E.InfeasibleProfileError):
        E.estimate_delta_bias(small(sizes=(3,), replicas=1))


def test_chain_slope_rows_and_summary():
    rec = E.chain_slope_experiment(small(sizes=(80,), replicas=3), steps=4)
    assert rec.header[:4] == ["n", "step", "score", "delta"]
    s = rec.summary["80"]
    assert s["deltas_in_unit_set"] and s["windows"] >= 0
    assert all(r["delta"] is None for r in rec.rows if r["step"] == 0)


def test_chain_slope_zero_steps_has_no_windows():
    rec = E.chain_slope_experiment(small(sizes=(30,), replicas=2), steps=0)
    assert rec.summary["30"]["windows"] == 0 and rec.summary["30"]["fraction"] is None


def test_event_frequencies_in_unit_interval():
    rec = E.event_frequency_experiment(small(sizes=(30,), replicas=5))
    assert rec.header[:5] == ["n", "event", "frequency", "ci_low", "ci_high"]
    assert [r["event"] for r in rec.rows] == ["B0", "B1", "B3", "B4", "C", "D", "E", "F", "A"]
    for r in rec.rows:
        assert 0 <= r["ci_low"] <= r["frequency"] <= r["ci_high"] <= 1


def test_b0_frequency_matches_exact_binomial():
    n, reps = 128, 400
    rec = E.event_frequency_experiment(E.ExperimentConfig(sizes=(n,), replicas=reps, seed=5))
    row = next(r for r in rec.rows if r["event"] == "B0")
    exact = float(binomial_window_probability(n, Fraction(2, 5) * n / 16) ** 2)
    sd = math.sqrt(exact * (1 - exact) / reps)
    assert abs(float(row["frequency"]) - exact) <= 4 * sd


def test_b0_exact_probability_increases_with_n():
    vals = [binomial_window_probability(n, Fraction(2, 5) * n / 16) ** 2 for n in (128, 256, 512, 1024)]
    assert vals == sorted(vals)
    assert abs(float(vals[-1]) - 0.7904) < 1e-3


def test_profile_box_frequency_reproducible():
    a = E.profile_box_frequency(64, 500, seed=1)
    assert a == E.profile_box_frequency(64, 500, seed=1) and 0 <= a <= 1


def test_worker_count_does_not_change_rows():
    cfg = small(sizes=(30,), replicas=4)
    one = E.estimate_variance_curve(cfg).to_csv()
    two = E.estimate_variance_curve(E.ExperimentConfig(**{**cfg.__dict__, "workers": 2})).to_csv()
    assert one == two


# -- CLI ------------------------------------------------------------------------------


def run(argv, capsys=None):
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code


def test_cli_usage_errors(tmp_path):
    assert run([]) == 1
    assert run(["nonsense"]) == 1
    assert run(["variance", "--sizes", "a,b"]) == 1
    assert run(["variance", "--replicas", "0", "--out", str(tmp_path)]) == 1
    assert run(["validate-params", "--eps", "3"]) == 1


def test_cli_variance_writes_manifest_and_csv(tmp_path):
    out = tmp_path / "v"
    assert run(["variance", "--sizes", "20", "--replicas", "5", "--seed", "9", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 9 and manifest["config"]["sizes"] == [20] and manifest["timestamp"]
    rows = list(csv.reader((out / "variance.csv").open()))
    assert rows[0][:6] == ["n", "replicas", "mean_score", "var_score", "var_stderr", "var_over_n"]


def test_cli_json_format(tmp_path):
    assert run(["events", "--sizes", "20", "--replicas", "2", "--format", "json", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "events.json").read_text())
    assert doc["experiment"] == "events" and len(doc["rows"]) == 9


def test_cli_infeasible_exit_code(tmp_path):
    assert run(["delta-bias", "--sizes", "3", "--replicas", "1", "--out", str(tmp_path)]) == 3


def test_cli_validate_params(tmp_path, capsys):
    assert run(["validate-params", "--eps", "1/1000", "--eps1", "1/10", "--s11", "20000",
                "--out", str(tmp_path)]) == 0
    assert "all conditions hold" in capsys.readouterr().out
    rows = list(csv.DictReader((tmp_path / "validate-params.csv").open()))
    assert {r["condition"] for r in rows} >= {"epsi0", "epsi6", "bias", "epsi3_printed"}


def test_cli_verify_quick(tmp_path, capsys):
    assert run(["verify", "--quick", "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "PASS dp_vs_bruteforce" in text and "INFO Vk_printed_bound" in text


def test_cli_verify_failure_exit_code(tmp_path, monkeypatch):
    from alignvar import verify

    monkeypatch.setattr(verify, "run_verification",
                        lambda seed, quick: [verify.CheckResult("x", False, "forced")])
    assert run(["verify", "--out", str(tmp_path)]) == 2


def test_cli_version(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.strip() == "0.1.0"
