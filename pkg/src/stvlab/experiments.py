"""Monte-Carlo grids: manipulability probability and search cost, plus the
exponential growth fit over the number of candidates.

Every trial derives its own random stream from (master seed, point id,
trial id), so results are identical no matter how trials are scheduled.
The results CSV carries only reproducible values by default; wall-clock
timings live on the in-memory results and the printed summary, and can be
written to the CSV explicitly at the cost of byte-reproducibility.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import MAX_INDEX, Ballot, TieRule
from .fileio import fmt6, results_header_line, results_row_line
from .solver import (
    Decision,
    ManipulationInstance,
    SearchLimits,
    manipulate_single,
    verify_witness,
)
from .votegen import Distribution, dist_label, rng_from_seed, sample

__all__ = [
    "POWERS_OF_TWO",
    "DEFAULT_LIMITS",
    "GridConfig",
    "TrialResult",
    "PointResult",
    "FitResult",
    "trial_instance",
    "run_trial",
    "run_point",
    "run_grid",
    "fit_exponential",
    "summarize",
]

POWERS_OF_TWO = (1, 2, 4, 8, 16, 32, 64, 128)

DEFAULT_LIMITS = SearchLimits(max_nodes=10_000_000)

# every 100th successful manipulation gets its witness replayed
_AUDIT_STRIDE = 100


@dataclass(frozen=True, slots=True)
class GridConfig:
    """One experiment: a grid of (m, n) points sampled from one distribution."""

    distribution: Distribution
    m_values: tuple[int, ...] = POWERS_OF_TWO
    n_values: tuple[int, ...] = POWERS_OF_TWO
    trials: int = 1000
    manipulator_weight: int = 1
    master_seed: int = 0
    limits: SearchLimits = DEFAULT_LIMITS
    tie_rule: TieRule = MAX_INDEX

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("need at least one trial per point")
        if not self.m_values or not self.n_values:
            raise ValueError("grid needs at least one m and one n value")

    def point_id(self, m: int, n: int) -> int:
        return self.m_values.index(m) * len(self.n_values) + self.n_values.index(n)


@dataclass(frozen=True, slots=True)
class TrialResult:
    decision: Decision
    nodes: int
    elapsed: float
    preferred: int
    witness: Ballot | None


@dataclass(frozen=True, slots=True)
class PointResult:
    """Aggregate statistics for one (m, n) grid point.

    p_manipulable and the node/time statistics cover resolved trials only;
    trials that hit the search budget are counted in ``unresolved`` and
    never folded into either verdict.
    """

    m: int
    n: int
    trials: int
    p_manipulable: float
    stderr: float
    nodes_mean: float
    nodes_median: float
    nodes_p90: float
    nodes_max: int
    time_mean: float
    unresolved: int


@dataclass(frozen=True, slots=True)
class FitResult:
    """Parameters of mean_nodes ~ a * b**m, fitted by log-space least squares."""

    a: float
    b: float
    r2: float


def trial_seed(master_seed: int, point_id: int, trial_id: int) -> np.random.SeedSequence:
    """Independent per-trial stream, stable across schedules and platforms."""
    return np.random.SeedSequence(master_seed, spawn_key=(point_id, trial_id))


def trial_instance(
    m: int,
    n: int,
    distribution: Distribution,
    weight: int,
    seed: int | np.random.SeedSequence,
    tie_rule: TieRule = MAX_INDEX,
) -> ManipulationInstance:
    """Regenerate the exact instance a trial saw: n fixed votes, then the
    preferred candidate drawn uniformly (the honest winner included)."""
    rng = rng_from_seed(seed)
    fixed = sample(distribution, m, n, rng)
    preferred = int(rng.integers(m))
    return ManipulationInstance(fixed, weight, preferred, tie_rule)


def run_trial(
    m: int,
    n: int,
    distribution: Distribution,
    weight: int,
    seed: int | np.random.SeedSequence,
    limits: SearchLimits = DEFAULT_LIMITS,
    tie_rule: TieRule = MAX_INDEX,
) -> TrialResult:
    """Generate one instance and decide it."""
    instance = trial_instance(m, n, distribution, weight, seed, tie_rule)
    result = manipulate_single(instance, limits)
    return TrialResult(
        result.decision, result.nodes, result.elapsed, instance.preferred, result.witness
    )


def _trial_task(args) -> TrialResult:
    m, n, distribution, weight, master_seed, point_id, trial_id, limits, tie_rule = args
    return run_trial(
        m, n, distribution, weight,
        trial_seed(master_seed, point_id, trial_id), limits, tie_rule,
    )


def _aggregate(m: int, n: int, config: GridConfig, outcomes: Sequence[TrialResult],
               point_id: int) -> PointResult:
    resolved = [t for t in outcomes if t.decision is not Decision.LIMIT_EXCEEDED]
    unresolved = len(outcomes) - len(resolved)
    _audit_witnesses(m, n, config, outcomes, point_id)
    if not resolved:
        nan = float("nan")
        return PointResult(m, n, len(outcomes), nan, nan, nan, nan, nan, 0, nan,
                           unresolved)
    hits = sum(t.decision is Decision.MANIPULABLE for t in resolved)
    p_hat = hits / len(resolved)
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / len(resolved))
    nodes = np.array([t.nodes for t in resolved], dtype=np.int64)
    times = np.array([t.elapsed for t in resolved])
    return PointResult(
        m=m,
        n=n,
        trials=len(outcomes),
        p_manipulable=p_hat,
        stderr=stderr,
        nodes_mean=float(nodes.mean()),
        nodes_median=float(np.median(nodes)),
        nodes_p90=float(np.percentile(nodes, 90)),
        nodes_max=int(nodes.max()),
        time_mean=float(times.mean()),
        unresolved=unresolved,
    )


def _audit_witnesses(m: int, n: int, config: GridConfig,
                     outcomes: Sequence[TrialResult], point_id: int) -> None:
    """Replay every 100th positive verdict's witness through the plain tally."""
    positive = 0
    for trial_id, t in enumerate(outcomes):
        if t.decision is not Decision.MANIPULABLE:
            continue
        if positive % _AUDIT_STRIDE == 0:
            instance = trial_instance(
                m, n, config.distribution, config.manipulator_weight,
                trial_seed(config.master_seed, point_id, trial_id), config.tie_rule,
            )
            assert instance.preferred == t.preferred
            if not verify_witness(instance, t.witness):
                raise RuntimeError(
                    f"witness audit failed at m={m} n={n} trial={trial_id}"
                )
        positive += 1


def run_point(config: GridConfig, m: int, n: int, workers: int = 1) -> PointResult:
    """Run all trials for one grid point and aggregate.

    m and n must be members of the config's value lists; the point's trial
    seeds are derived from their position so any schedule agrees.
    """
    point_id = config.point_id(m, n)
    tasks = [
        (m, n, config.distribution, config.manipulator_weight,
         config.master_seed, point_id, trial_id, config.limits, config.tie_rule)
        for trial_id in range(config.trials)
    ]
    if workers <= 1:
        outcomes = [_trial_task(t) for t in tasks]
    else:
        chunk = max(1, config.trials // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=chunk))
    return _aggregate(m, n, config, outcomes, point_id)


def _csv_row(point: PointResult, config: GridConfig, record_time: bool) -> dict:
    name, b_param = dist_label(config.distribution)
    return {
        "distribution": name,
        "b_param": b_param,
        "m": point.m,
        "n": point.n,
        "weight": config.manipulator_weight,
        "trials": point.trials,
        "p_manipulable": fmt6(point.p_manipulable),
        "stderr": fmt6(point.stderr),
        "nodes_mean": fmt6(point.nodes_mean),
        "nodes_median": fmt6(point.nodes_median),
        "nodes_p90": fmt6(point.nodes_p90),
        "nodes_max": point.nodes_max,
        "time_mean_ms": fmt6(point.time_mean * 1e3) if record_time else "",
        "unresolved": point.unresolved,
        "master_seed": config.master_seed,
    }


def run_grid(
    config: GridConfig,
    csv_path: str | Path | None = None,
    workers: int = 1,
    record_time: bool = False,
    progress: bool = False,
) -> list[PointResult]:
    """Run the full m x n grid in canonical order.

    Rows are appended to the CSV as each point finishes, so partial results
    survive an interrupted run. ``record_time`` fills the time column with
    measured wall time, which makes the file non-reproducible byte for byte.
    """
    results: list[PointResult] = []
    fh = open(csv_path, "w", newline="") if csv_path is not None else None
    try:
        if fh is not None:
            fh.write(results_header_line())
            fh.flush()
        for m in config.m_values:
            for n in config.n_values:
                t0 = time.perf_counter()
                point = run_point(config, m, n, workers=workers)
                results.append(point)
                if fh is not None:
                    fh.write(results_row_line(_csv_row(point, config, record_time)))
                    fh.flush()
                if progress:
                    print(
                        f"m={m} n={n}: p={point.p_manipulable:.3f} "
                        f"nodes_mean={point.nodes_mean:.1f} "
                        f"unresolved={point.unresolved} "
                        f"[{time.perf_counter() - t0:.1f}s]",
                        flush=True,
                    )
    finally:
        if fh is not None:
            fh.close()
    return results


def fit_exponential(points: Iterable[tuple[float, float]]) -> FitResult:
    """Least-squares fit of mean nodes against a * b**m, in log space.

    Needs at least two points with strictly positive means. A zero-variance
    perfect fit reports r2 = 1 (constant data is the b = 1 model, fitted
    exactly).
    """
    pts = [(float(m), float(y)) for m, y in points]
    if len(pts) < 2:
        raise ValueError("need at least two points to fit")
    if any(y <= 0 for _, y in pts):
        raise ValueError("mean node counts must be positive to fit a*b**m")
    x = np.array([m for m, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(x, ly, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    # rounding noise floor; below it the data is constant and the exact
    # b = 1 fit deserves r2 = 1 rather than a 0/0
    tiny = len(pts) * (16 * np.finfo(float).eps * max(1.0, float(np.abs(ly).max()))) ** 2
    if ss_tot <= tiny:
        r2 = 1.0 if ss_res <= tiny else float("-inf")
    else:
        r2 = 1.0 - ss_res / ss_tot
    return FitResult(a=float(np.exp(intercept)), b=float(np.exp(slope)), r2=r2)


def summarize(
    results: Sequence[PointResult],
    plot_dir: str | Path | None = None,
    title: str = "",
) -> str:
    """Human-readable table of grid results; optionally also SVG line charts."""
    if not results:
        raise ValueError("no results to summarize")
    header = (
        f"{'m':>5} {'n':>5} {'trials':>7} {'p_manip':>8} {'stderr':>7} "
        f"{'nodes_mean':>11} {'median':>8} {'p90':>8} {'max':>8} "
        f"{'time_ms':>9} {'unres':>6}"
    )
    lines = [title, header] if title else [header]
    for r in results:
        lines.append(
            f"{r.m:>5} {r.n:>5} {r.trials:>7} {r.p_manipulable:>8.4f} "
            f"{r.stderr:>7.4f} {r.nodes_mean:>11.2f} {r.nodes_median:>8.1f} "
            f"{r.nodes_p90:>8.1f} {r.nodes_max:>8} {r.time_mean * 1e3:>9.2f} "
            f"{r.unresolved:>6}"
        )
    if plot_dir is not None:
        _write_charts(results, Path(plot_dir), title)
    return "\n".join(lines) + "\n"


def _series(results, fixed_attr, x_attr):
    groups: dict[int, list[PointResult]] = {}
    for r in results:
        groups.setdefault(getattr(r, fixed_attr), []).append(r)
    return {
        k: sorted(v, key=lambda r: getattr(r, x_attr)) for k, v in sorted(groups.items())
    }


def _write_charts(results: Sequence[PointResult], out_dir: Path, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.fonttype"] = "none"  # keep labels as text, not paths
    out_dir.mkdir(parents=True, exist_ok=True)

    axes = [
        ("m", "number of candidates m", "n", "n"),
        ("n", "number of voters n", "m", "m"),
    ]
    for x_attr, x_label, fixed_attr, fixed_name in axes:
        series = _series(results, fixed_attr, x_attr)
        if all(len(v) < 2 for v in series.values()):
            continue
        for y_attr, y_label, log_y, stem in (
            ("p_manipulable", "probability of successful manipulation", False, "p_manipulable"),
            ("nodes_mean", "mean search nodes", True, "nodes"),
        ):
            fig, ax = plt.subplots(figsize=(6, 4))
            for fixed_val, pts in series.items():
                if len(pts) < 2:
                    continue
                ax.plot(
                    [getattr(r, x_attr) for r in pts],
                    [getattr(r, y_attr) for r in pts],
                    marker="o",
                    label=f"{fixed_name}={fixed_val}",
                )
            ax.set_xlabel(x_label)
            ax.set_ylabel(y_label)
            ax.set_xscale("log", base=2)
            if log_y:
                ax.set_yscale("log")
            if title:
                ax.set_title(title)
            ax.legend()
            fig.tight_layout()
            fig.savefig(out_dir / f"{stem}_vs_{x_attr}.svg")
            plt.close(fig)
