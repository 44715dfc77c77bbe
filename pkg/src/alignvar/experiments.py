"""Seeded Monte Carlo drivers and their CSV/JSON output.

Every replica draws from its own stream ``RngStream(seed, (n, replica))``, so
results do not depend on the number of worker processes or on scheduling.
Workers only compute per-replica rows; aggregation happens in the parent in
replica order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from alignvar import __version__
from alignvar.align import optimal_score
from alignvar.blocks import expected_block_count, zero_block_profile, zero_block_profiles_batch
from alignvar.events import (
    EVENT_NAMES,
    EpsilonParams,
    P_FIVE_SHORTER,
    P_ONE_LONGER,
    check_events,
    delta_distribution_exact,
)
from alignvar.sampling import InfeasibleProfileError, RngStream, chain_trajectory, iid_sequence
from alignvar.scoring import ScoringScheme, to_fraction

DEFAULT_SIZES = (128, 256, 512, 1024)
MAX_RESAMPLE = 10_000


@dataclass(frozen=True)
class ExperimentConfig:
    sizes: tuple = DEFAULT_SIZES
    replicas: int = 1000
    s11: Fraction = Fraction(50)
    eps: Fraction = Fraction(2, 5)
    eps1: Fraction = Fraction(1, 10)
    seed: int = 0
    workers: int = 1
    out: Optional[str] = None
    strict_paper_thresholds: bool = False
    steps: int = 40
    window_exponent: Fraction = Fraction(1, 10)
    rate: Fraction = Fraction(1, 100)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        for name in ("s11", "eps", "eps1", "window_exponent", "rate"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be a nonempty list of positive integers")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        EpsilonParams(self.eps, self.eps1)  # validates ranges

    @property
    def scheme(self) -> ScoringScheme:
        return ScoringScheme.default(self.s11)

    @property
    def params(self) -> EpsilonParams:
        return EpsilonParams(self.eps, self.eps1)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, Fraction):
                d[k] = str(v)
            elif isinstance(v, tuple):
                d[k] = list(v)
        d.pop("workers")  # does not influence results
        return d

    @classmethod
    def from_dict(cls, d: dict, workers: int = 1) -> "ExperimentConfig":
        """Inverse of :meth:`to_dict`."""
        return cls(**{**d, "sizes": tuple(d["sizes"]), "workers": workers})


@dataclass
class ResultRecord:
    """Rows (in output order) plus a summary for one experiment run."""

    name: str
    config: dict
    header: list
    rows: list
    summary: dict = field(default_factory=dict)
    timestamp: str = ""

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_cell(row.get(h)) for h in self.header])
        return buf.getvalue()

    def to_json(self) -> str:
        body = {
            "experiment": self.name,
            "config": self.config,
            "header": self.header,
            "rows": [{h: _cell(r.get(h)) for h in self.header} for r in self.rows],
            "summary": _plain(self.summary),
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, Fraction):
        return format_decimal(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _plain(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(u) for u in v]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def format_decimal(q) -> str:
    """12 significant digits."""
    return f"{float(q):.12g}"


def exact(q: Optional[Fraction]) -> Optional[str]:
    return None if q is None else f"{q.numerator}/{q.denominator}"


# -- statistics -----------------------------------------------------------------


def sample_variance(values: Sequence) -> Optional[Fraction]:
    """Unbiased sample variance in exact arithmetic; ``None`` for fewer than 2 values."""
    k = len(values)
    if k < 2:
        return None
    vals = [to_fraction(v) for v in values]
    mu = sum(vals, Fraction(0)) / k
    return sum(((v - mu) ** 2 for v in vals), Fraction(0)) / (k - 1)


def jackknife_variance_se(values: Sequence) -> Optional[float]:
    """Leave-one-out jackknife standard error of :func:`sample_variance`."""
    k = len(values)
    if k < 3:
        return None
    vals = [to_fraction(v) for v in values]
    s1 = sum(vals, Fraction(0))
    s2 = sum((v * v for v in vals), Fraction(0))
    m = k - 1
    loo = []
    for v in vals:
        a, b = s1 - v, s2 - v * v
        loo.append((b - a * a / m) / (m - 1))
    mean_loo = sum(loo, Fraction(0)) / k
    ss = sum(((u - mean_loo) ** 2 for u in loo), Fraction(0))
    return math.sqrt(float(ss * m / k))


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return (max(0.0, centre - half), min(1.0, centre + half))


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Least-squares slope; ``None`` with fewer than two points."""
    if len(xs) < 2:
        return None
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    xc = x - x.mean()
    return float(math.fsum(xc * (y - y.mean())) / math.fsum(xc * xc))


# -- task plumbing ----------------------------------------------------------------------


def run_tasks(func: Callable, tasks: list, workers: int) -> list:
    """``[func(t) for t in tasks]``, optionally in a process pool; order is kept."""
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=chunk))


def _pair(cfg: ExperimentConfig, n: int, r: int):
    g = RngStream(cfg.seed, (n, r)).generator()
    return g, iid_sequence(n, g), iid_sequence(n, g)


def _eligible_pair(cfg: ExperimentConfig, n: int, r: int):
    g = RngStream(cfg.seed, (n, r)).generator()
    for rejected in range(MAX_RESAMPLE):
        x, y = iid_sequence(n, g), iid_sequence(n, g)
        p = zero_block_profile(x)
        if p.n1 and p.n5:
            return g, x, y, rejected
    raise InfeasibleProfileError(f"no word with a 5-block and a 1-block at n={n} in {MAX_RESAMPLE} draws")


def _stamp(record: ResultRecord) -> ResultRecord:
    record.timestamp = datetime.now(timezone.utc).isoformat()
    return record


# -- variance -------------------------------------------------------------------------


def _variance_task(args):
    cfg, n, r = args
    _, x, y = _pair(cfg, n, r)
    return optimal_score(x, y, cfg.scheme)


VARIANCE_HEADER = ["n", "replicas", "mean_score", "var_score", "var_stderr", "var_over_n",
                   "mean_score_exact", "var_score_exact", "var_over_n_exact"]


def estimate_variance_curve(cfg: ExperimentConfig) -> ResultRecord:
    """Sample mean and variance of the optimal score at each size."""
    tasks = [(cfg, n, r) for n in cfg.sizes for r in range(cfg.replicas)]
    scores = run_tasks(_variance_task, tasks, cfg.workers)
    rows, pts = [], []
    for i, n in enumerate(cfg.sizes):
        vals = scores[i * cfg.replicas:(i + 1) * cfg.replicas]
        mean = sum(vals, Fraction(0)) / len(vals)
        var = sample_variance(vals)
        ratio = None if var is None else var / n
        rows.append({
            "n": n, "replicas": cfg.replicas, "mean_score": mean, "var_score": var,
            "var_stderr": jackknife_variance_se(vals), "var_over_n": ratio,
            "mean_score_exact": exact(mean), "var_score_exact": exact(var),
            "var_over_n_exact": exact(ratio),
        })
        if var is not None:
            pts.append((n, float(var)))
    ratios = [r["var_over_n"] for r in rows if r["var_over_n"] is not None]
    summary = {
        "variance_defined": bool(ratios),
        "slope_var_vs_n": fit_slope([p[0] for p in pts], [p[1] for p in pts]),
        "max_over_min_var_over_n": (float(max(ratios) / min(ratios))
                                    if ratios and min(ratios) > 0 else None),
    }
    return _stamp(ResultRecord("variance", cfg.to_dict(), VARIANCE_HEADER, rows, summary))


# -- delta bias ------------------------------------------------------------------------


def _delta_task(args):
    cfg, n, r = args
    _, x, y, rejected = _eligible_pair(cfg, n, r)
    d = delta_distribution_exact(x, y, cfg.scheme)
    e1 = cfg.eps1
    event_a = d.p_plus >= P_FIVE_SHORTER * P_ONE_LONGER - e1 and d.p_minus <= Fraction(1, 32) + e1
    return {
        "n": n, "replica": r, "p_plus": d.p_plus, "p_minus": d.p_minus, "p_zero": d.p_zero,
        "expected_delta": d.expected, "event_A": event_a, "rejections": rejected,
        "choices": d.outcomes, "p_plus_exact": exact(d.p_plus), "p_minus_exact": exact(d.p_minus),
        "p_zero_exact": exact(d.p_zero), "expected_delta_exact": exact(d.expected),
    }


DELTA_HEADER = ["n", "replica", "p_plus", "p_minus", "p_zero", "expected_delta", "event_A",
                "rejections", "choices", "p_plus_exact", "p_minus_exact", "p_zero_exact",
                "expected_delta_exact"]


def estimate_delta_bias(cfg: ExperimentConfig) -> ResultRecord:
    """Exact conditional law of the score change, one replica per row."""
    tasks = [(cfg, n, r) for n in cfg.sizes for r in range(cfg.replicas)]
    rows = run_tasks(_delta_task, tasks, cfg.workers)
    summary = {}
    for n in cfg.sizes:
        sub = [r for r in rows if r["n"] == n]
        k = len(sub)
        summary[str(n)] = {
            "event_A_frequency": Fraction(sum(r["event_A"] for r in sub), k),
            "mean_p_plus": sum((r["p_plus"] for r in sub), Fraction(0)) / k,
            "mean_p_minus": sum((r["p_minus"] for r in sub), Fraction(0)) / k,
            "mean_expected_delta": sum((r["expected_delta"] for r in sub), Fraction(0)) / k,
            "rejections": sum(r["rejections"] for r in sub),
        }
    return _stamp(ResultRecord("delta-bias", cfg.to_dict(), DELTA_HEADER, rows, summary))


# -- chain slope ----------------------------------------------------------------------


def window_length(n: int, exponent) -> int:
    return max(1, math.ceil(n ** float(exponent)))


def slope_windows(scores: Sequence[Fraction], min_len: int, rate) -> tuple[int, int]:
    """``(qualifying, total)`` over index pairs ``a < b`` with ``b - a >= min_len``
    and ``scores[b] - scores[a] >= rate * (b - a)``."""
    rate = to_fraction(rate)
    total = good = 0
    for a in range(len(scores)):
        for b in range(a + min_len, len(scores)):
            total += 1
            good += scores[b] - scores[a] >= rate * (b - a)
    return good, total


def _chain_task(args):
    cfg, n, r = args
    g, x, y = _pair(cfg, n, r)
    traj = chain_trajectory(x, cfg.steps, g)
    scores = [optimal_score(s, y, cfg.scheme) for s in traj.states]
    rows = [{"n": n, "step": i, "score": s, "delta": None if i == 0 else s - scores[i - 1],
             "replica": r, "score_exact": exact(s)} for i, s in enumerate(scores)]
    good, total = slope_windows(scores, window_length(n, cfg.window_exponent), cfg.rate)
    return rows, traj.stopped_at, good, total


CHAIN_HEADER = ["n", "step", "score", "delta", "replica", "score_exact"]


def chain_slope_experiment(cfg: ExperimentConfig, steps: Optional[int] = None) -> ResultRecord:
    """Score along the transfer chain started from an iid ``X``.

    A window ``(a, b)`` of at least ``ceil(n^window_exponent)`` steps qualifies
    when the score grows by at least ``rate`` per step across it.
    """
    if steps is not None:
        cfg = replace(cfg, steps=steps)
    if cfg.steps < 0:
        raise ValueError("steps must be >= 0")
    tasks = [(cfg, n, r) for n in cfg.sizes for r in range(cfg.replicas)]
    out = run_tasks(_chain_task, tasks, cfg.workers)
    rows, summary = [], {}
    for n in cfg.sizes:
        good = total = 0
        stops, deltas = [], set()
        for (task_rows, stopped, g, t), (_, tn, r) in zip(out, tasks):
            if tn != n:
                continue
            rows.extend(task_rows)
            good, total = good + g, total + t
            deltas.update(row["delta"] for row in task_rows if row["delta"] is not None)
            if stopped is not None:
                stops.append({"replica": r, "stopped_at": stopped})
        summary[str(n)] = {
            "window_length": window_length(n, cfg.window_exponent),
            "windows": total,
            "qualifying": good,
            "fraction": Fraction(good, total) if total else None,
            "early_stops": stops,
            "deltas_in_unit_set": deltas <= {-1, 0, 1},
        }
    return _stamp(ResultRecord("chain-slope", cfg.to_dict(), CHAIN_HEADER, rows, summary))


# -- event frequencies ----------------------------------------------------------------


def _events_task(args):
    cfg, n, r = args
    _, x, y = _pair(cfg, n, r)
    rep = check_events(x, y, cfg.scheme, cfg.params,
                       strict_paper_thresholds=cfg.strict_paper_thresholds, exhaustive=False)
    return {k: bool(rep.flags[k]) for k in EVENT_NAMES}


EVENTS_HEADER = ["n", "event", "frequency", "ci_low", "ci_high", "count", "trials"]


def event_frequency_experiment(cfg: ExperimentConfig) -> ResultRecord:
    """Frequencies of every typicality event, with 95% Wilson intervals."""
    tasks = [(cfg, n, r) for n in cfg.sizes for r in range(cfg.replicas)]
    flags = run_tasks(_events_task, tasks, cfg.workers)
    rows = []
    for i, n in enumerate(cfg.sizes):
        sub = flags[i * cfg.replicas:(i + 1) * cfg.replicas]
        for name in EVENT_NAMES:
            hits = sum(f[name] for f in sub)
            lo, hi = wilson_interval(hits, len(sub))
            rows.append({"n": n, "event": name, "frequency": Fraction(hits, len(sub)),
                         "ci_low": lo, "ci_high": hi, "count": hits, "trials": len(sub)})
    return _stamp(ResultRecord("events", cfg.to_dict(), EVENTS_HEADER, rows))


# -- profile box --------------------------------------------------------------------------


def profile_box_frequency(n: int, samples: int, seed: int, batch: int = 2000) -> Fraction:
    """Share of iid words with ``|N_i - mu_i| <= sqrt(55 n / 4)`` for all tracked ``i``."""
    mu = np.array([float(expected_block_count(n, i)) if i <= n else 0.0 for i in (1, 2, 4, 5)])
    g = RngStream(seed, (n,)).generator()
    inside = 0
    r2 = 55 * n / 4
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        prof = zero_block_profiles_batch(g.integers(0, 2, size=(size, n), dtype=np.uint8))
        inside += int(np.all((prof - mu) ** 2 <= r2, axis=1).sum())
        done += size
    return Fraction(inside, samples)


EXPERIMENTS = {
    "variance": estimate_variance_curve,
    "delta-bias": estimate_delta_bias,
    "chain-slope": chain_slope_experiment,
    "events": event_frequency_experiment,
}


def replay(manifest_path, workers: int = 1) -> ResultRecord:
    """Rerun the experiment recorded in a ``manifest.json``."""
    manifest = json.loads(Path(manifest_path).read_text())
    cfg = ExperimentConfig.from_dict(manifest["config"], workers=workers)
    return EXPERIMENTS[manifest["experiment"]](cfg)


# -- persistence ----------------------------------------------------------------------------


def write_outputs(record: ResultRecord, out_dir, fmt: str = "csv") -> Path:
    """Write ``manifest.json`` and ``<name>.csv`` (or ``.json``) under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "experiment": record.name,
        "version": __version__,
        "seed": record.config.get("seed"),
        "config": record.config,
        "format": fmt,
        "timestamp": record.timestamp,
        "summary": _plain(record.summary),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    path = out / f"{record.name}.{fmt}"
    path.write_text(record.to_csv() if fmt == "csv" else record.to_json())
    return path
