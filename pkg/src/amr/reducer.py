"""Greedy selection of a minimal investor-model subset, plus a brute-force oracle.

Given a trained parameter vector, the full set of investor types defines
the benchmark approximation error against a target series.  Each type is
then scored alone (its explanatory power is the inverse of its MAPE) and
the best-ranked unused type is added to a growing subset until the
subset's error comes within a tolerance of the benchmark.  Being a hill
climb, this can get stuck; exhaustive_reduce evaluates every non-empty
subset and serves as the validation oracle.

Subsets are evaluated by toggling enabled flags only: parameters stay as
trained on the full set, and all subsets share the same replication
sub-seeds, so their scores differ only by which types act.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations
from math import sqrt
from typing import Iterable, Sequence

from . import market
from .learner import AnnealingSchedule, ParameterVector, anneal
from .market import MarketConfig, only_enabled, simulate_pk
from .rng import substream
from .timeseries import TimeSeries, mape

MAX_EXHAUSTIVE_TYPES = 16
DEFAULT_TOLERANCE = 0.005  # MAPE fraction, i.e. half a percentage point
DEFAULT_REPLICATIONS = 10


@dataclass(frozen=True)
class ModelSet:
    """Subset of a configuration's type labels, in declaration order."""

    member_names: tuple[str, ...]

    @classmethod
    def of(cls, config: MarketConfig, names: Iterable[str]) -> "ModelSet":
        wanted = set(names)
        unknown = wanted - set(config.type_names)
        if unknown:
            raise ValueError(f"unknown investor type(s) {sorted(unknown)}; have {list(config.type_names)}")
        return cls(tuple(n for n in config.type_names if n in wanted))

    def __len__(self) -> int:
        return len(self.member_names)

    def __contains__(self, name: str) -> bool:
        return name in self.member_names


@dataclass(frozen=True)
class Score:
    """Replication mean and sample standard deviation of a subset's MAPE."""

    mean: float
    std: float

    def as_percent(self) -> str:
        return f"{100 * self.mean:.2f} ± {100 * self.std:.2f}%"


@dataclass(frozen=True)
class ReductionReport:
    benchmark: Score  # full set
    baseline: Score  # all types disabled (constant output)
    singletons: dict[str, Score]
    ranking: tuple[str, ...]  # ascending singleton MAPE
    selection_trace: tuple[tuple[str, Score], ...]  # (added label, cumulative score)
    reduced_set: ModelSet
    tolerance_used: float
    eval_replications: int

    def to_dict(self) -> dict:
        return {
            "benchmark": {"mean": self.benchmark.mean, "std": self.benchmark.std},
            "baseline": {"mean": self.baseline.mean, "std": self.baseline.std},
            "singletons": {
                name: {"mean": s.mean, "std": s.std} for name, s in self.singletons.items()
            },
            "ranking": list(self.ranking),
            "selection_trace": [
                {"added": name, "mean": s.mean, "std": s.std} for name, s in self.selection_trace
            ],
            "reduced_set": list(self.reduced_set.member_names),
            "tolerance": self.tolerance_used,
            "replications": self.eval_replications,
        }

    def format_table(self) -> str:
        """Aligned text table: full set, baseline, singletons, reduced set."""
        rows = [("full set", self.benchmark), ("all disabled (constant)", self.baseline)]
        rows += [(f"only {name}", score) for name, score in self.singletons.items()]
        reduced_label = "reduced {" + ", ".join(self.reduced_set.member_names) + "}"
        rows.append((reduced_label, self.selection_trace[-1][1]))
        width = max(len(label) for label, _ in rows)
        lines = [f"{'case'.ljust(width)}  MAPE"]
        lines += [f"{label.ljust(width)}  {score.as_percent()}" for label, score in rows]
        return "\n".join(lines)


def _score(samples: Sequence[float]) -> Score:
    n = len(samples)
    if all(x == samples[0] for x in samples):
        # Identical replications (e.g. the constant baseline) score an
        # exact mean and an exact zero spread, no summation residue.
        return Score(samples[0], 0.0)
    mean = 0.0
    for x in samples:  # fixed order, deterministic float result
        mean += x
    mean /= n
    var = sum((x - mean) ** 2 for x in samples) / (n - 1)
    return Score(mean, sqrt(var))


def evaluate_subset(
    subset: ModelSet | Iterable[str],
    params: ParameterVector,
    config: MarketConfig,
    target: TimeSeries,
    replications: int = DEFAULT_REPLICATIONS,
    workers: int = 1,
) -> Score:
    """MAPE of the market restricted to `subset`, over the target window.

    Enables exactly the subset's types (the empty subset is the constant
    baseline), simulates from the target's first value, and repeats with
    sub-seeds substream(master_seed, r).  The same sub-seeds are used for
    every subset, making subset scores directly comparable.
    """
    members = subset.member_names if isinstance(subset, ModelSet) else tuple(subset)
    cfg = params.apply(config)
    cfg = only_enabled(cfg, members)
    p0 = target.values[0]
    samples = []
    for r in range(replications):
        run = simulate_pk(
            replace(cfg, master_seed=substream(cfg.master_seed, r)),
            p0=p0,
            horizon=len(target),
            dates=target.dates,
            workers=workers,
        )
        samples.append(mape(target, run.predicted))
    return _score(samples)


def _score_singletons(
    config: MarketConfig,
    params: ParameterVector,
    target: TimeSeries,
    replications: int,
    workers: int,
) -> dict[str, Score]:
    names = config.type_names
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(
                pool.map(
                    lambda n: evaluate_subset((n,), params, config, target, replications), names
                )
            )
    else:
        scores = [evaluate_subset((n,), params, config, target, replications) for n in names]
    return dict(zip(names, scores))


def rank_models(
    config: MarketConfig,
    params: ParameterVector,
    target: TimeSeries,
    replications: int = DEFAULT_REPLICATIONS,
    workers: int = 1,
) -> list[tuple[str, float]]:
    """Types by ascending singleton MAPE (most explanatory first).

    Ties keep configuration declaration order (stable sort).
    """
    singles = _score_singletons(config, params, target, replications, workers)
    return sorted(((n, s.mean) for n, s in singles.items()), key=lambda item: item[1])


def greedy_reduce(
    config: MarketConfig,
    params: ParameterVector,
    target: TimeSeries,
    tolerance: float = DEFAULT_TOLERANCE,
    replications: int = DEFAULT_REPLICATIONS,
    workers: int = 1,
    retrain_schedule: AnnealingSchedule | None = None,
    retrain_train: TimeSeries | None = None,
    retrain_seed: int = 0,
) -> ReductionReport:
    """Grow a subset by singleton rank until it matches the benchmark.

    The singleton ranking is computed once up front; each addition
    re-evaluates the cumulative subset.  Selection stops as soon as the
    subset's mean MAPE is within `tolerance` of the full set's, and at
    the latest when the subset equals the full set (whose evaluation
    reproduces the benchmark exactly).

    With `retrain_schedule` and `retrain_train` given, every evaluated
    cumulative subset is re-annealed on the training series before
    scoring, instead of reusing the full-set parameters.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    if (retrain_schedule is None) != (retrain_train is None):
        raise ValueError("retraining needs both retrain_schedule and retrain_train")
    if len(config.types) == 0:  # unreachable through MarketConfig, kept for direct calls
        raise ValueError("configuration has no investor types")

    def cumulative_score(members: tuple[str, ...]) -> Score:
        p = params
        if retrain_schedule is not None:
            subset_cfg = only_enabled(config, members)
            p = anneal(retrain_train, subset_cfg, retrain_schedule, retrain_seed, workers).best_params
        return evaluate_subset(members, p, config, target, replications, workers)

    benchmark = cumulative_score(config.type_names)
    baseline = evaluate_subset((), params, config, target, replications, workers)
    singletons = _score_singletons(config, params, target, replications, workers)
    ranking = tuple(n for n, _ in sorted(singletons.items(), key=lambda item: item[1].mean))

    chosen: list[str] = []
    trace: list[tuple[str, Score]] = []
    for name in ranking:
        chosen.append(name)
        if len(chosen) == 1 and retrain_schedule is None:
            score = singletons[name]
        else:
            score = cumulative_score(tuple(chosen))
        trace.append((name, score))
        if score.mean <= benchmark.mean + tolerance:
            break

    return ReductionReport(
        benchmark=benchmark,
        baseline=baseline,
        singletons=singletons,
        ranking=ranking,
        selection_trace=tuple(trace),
        reduced_set=ModelSet.of(config, chosen),
        tolerance_used=tolerance,
        eval_replications=replications,
    )


@dataclass(frozen=True)
class ExhaustiveReport:
    """Every non-empty subset scored, plus the best subset per size."""

    table: tuple[tuple[ModelSet, Score], ...]  # enumeration order: by size, then declaration order
    best_by_size: dict[int, tuple[ModelSet, Score]]

    def to_dict(self) -> dict:
        return {
            "table": [
                {"subset": list(ms.member_names), "mean": s.mean, "std": s.std}
                for ms, s in self.table
            ],
            "best_by_size": {
                str(k): {"subset": list(ms.member_names), "mean": s.mean, "std": s.std}
                for k, (ms, s) in self.best_by_size.items()
            },
        }


def exhaustive_reduce(
    config: MarketConfig,
    params: ParameterVector,
    target: TimeSeries,
    replications: int = DEFAULT_REPLICATIONS,
    workers: int = 1,
) -> ExhaustiveReport:
    """Score all 2^n - 1 non-empty subsets (n <= 16 guard)."""
    names = config.type_names
    if len(names) > MAX_EXHAUSTIVE_TYPES:
        raise ValueError(
            f"exhaustive search over {len(names)} types would evaluate "
            f"2^{len(names)} - 1 subsets; limit is {MAX_EXHAUSTIVE_TYPES}"
        )
    subsets = [combo for size in range(1, len(names) + 1) for combo in combinations(names, size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(
                pool.map(
                    lambda c: evaluate_subset(c, params, config, target, replications), subsets
                )
            )
    else:
        scores = [evaluate_subset(c, params, config, target, replications) for c in subsets]

    table = tuple((ModelSet.of(config, combo), score) for combo, score in zip(subsets, scores))
    best_by_size: dict[int, tuple[ModelSet, Score]] = {}
    for model_set, score in table:
        size = len(model_set)
        if size not in best_by_size or score.mean < best_by_size[size][1].mean:
            best_by_size[size] = (model_set, score)
    return ExhaustiveReport(table=table, best_by_size=best_by_size)
