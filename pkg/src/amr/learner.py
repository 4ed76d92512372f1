"""Simulated-annealing calibration of the market's free parameters.

The learnable degrees of freedom are (optimism, reactivity,
trade_fraction) for every investor type plus the global price impact:
3 * n_types + 1 box-bounded coordinates.  The objective ("energy") is
the replication-averaged MAPE of a partial-knowledge simulation against
the training series; replications use fixed sub-seeds, so the energy of
a given vector is deterministic and the whole chain is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import exp

import numpy as np

from . import market
from .market import MarketConfig
from .rng import Stream, fold, substream
from .timeseries import TimeSeries, mape

_ANNEAL_TAG = 0x414E


def _bounds(n_types: int) -> tuple[np.ndarray, np.ndarray]:
    """Box bounds for the flat layout [opt_0, react_0, frac_0, ..., impact]."""
    lo = np.empty(3 * n_types + 1)
    hi = np.empty(3 * n_types + 1)
    lo[0::3], hi[0::3] = market.OPTIMISM_BOUNDS
    lo[1::3], hi[1::3] = market.REACTIVITY_BOUNDS
    lo[2:-1:3], hi[2:-1:3] = market.TRADE_FRACTION_BOUNDS
    lo[-1], hi[-1] = market.PRICE_IMPACT_BOUNDS
    return lo, hi


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Flat, box-bounded view of a config's behavioral parameters."""

    type_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        lo, hi = self.bounds()
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != lo.shape:
            raise ValueError(f"expected {lo.shape[0]} coordinates, got {v.shape}")
        if np.any(v < lo) or np.any(v > hi):
            bad = int(np.argmax((v < lo) | (v > hi)))
            raise ValueError(f"coordinate {self.coordinate_names()[bad]} = {v[bad]} out of bounds")
        object.__setattr__(self, "values", v)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return _bounds(len(self.type_names))

    def coordinate_names(self) -> list[str]:
        names = []
        for t in self.type_names:
            names += [f"{t}.optimism", f"{t}.reactivity", f"{t}.trade_fraction"]
        names.append("price_impact")
        return names

    @property
    def price_impact(self) -> float:
        return float(self.values[-1])

    @classmethod
    def from_config(cls, config: MarketConfig) -> "ParameterVector":
        vals = []
        for t in config.types:
            vals += [t.optimism, t.reactivity, t.trade_fraction]
        vals.append(config.price_impact)
        return cls(config.type_names, np.array(vals))

    @classmethod
    def random(cls, config: MarketConfig, stream: Stream) -> "ParameterVector":
        lo, hi = _bounds(len(config.types))
        vals = np.array([stream.uniform(a, b) for a, b in zip(lo, hi)])
        return cls(config.type_names, vals)

    def apply(self, config: MarketConfig) -> MarketConfig:
        """Config with this vector's behavior and impact substituted in."""
        if config.type_names != self.type_names:
            raise ValueError(
                f"parameter vector is for types {self.type_names}, config has {config.type_names}"
            )
        new_types = tuple(
            replace(
                t,
                optimism=float(self.values[3 * k]),
                reactivity=float(self.values[3 * k + 1]),
                trade_fraction=float(self.values[3 * k + 2]),
            )
            for k, t in enumerate(config.types)
        )
        return replace(config, types=new_types, price_impact=self.price_impact)

    def to_dict(self) -> dict[str, float]:
        return {name: float(v) for name, v in zip(self.coordinate_names(), self.values)}

    @classmethod
    def from_dict(cls, data: dict[str, float], type_names: tuple[str, ...]) -> "ParameterVector":
        vals = []
        for t in type_names:
            for p in ("optimism", "reactivity", "trade_fraction"):
                key = f"{t}.{p}"
                if key not in data:
                    raise ValueError(f"parameter file missing {key!r}")
                vals.append(float(data[key]))
        if "price_impact" not in data:
            raise ValueError("parameter file missing 'price_impact'")
        vals.append(float(data["price_impact"]))
        return cls(type_names, np.array(vals))


@dataclass(frozen=True)
class AnnealingSchedule:
    initial_temperature: float = 0.05  # energies are MAPE fractions, typically 0.03-0.15
    cooling_factor: float = 0.95
    proposals_per_epoch: int = 50
    total_evaluations: int = 5000
    proposal_sigma: float = 0.05  # fraction of each coordinate's range
    replications: int = 3  # simulations averaged per energy

    def __post_init__(self):
        if not self.initial_temperature > 0:
            raise ValueError("initial_temperature must be > 0")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling_factor must be in (0, 1)")
        if self.proposals_per_epoch < 1 or self.total_evaluations < 1 or self.replications < 1:
            raise ValueError("proposals_per_epoch, total_evaluations, replications must be >= 1")
        if self.proposal_sigma < 0:
            raise ValueError("proposal_sigma must be >= 0")


@dataclass(frozen=True)
class FitResult:
    best_params: ParameterVector
    best_energy: float
    energy_trace: tuple[float, ...]  # best-so-far after each evaluation
    seed_used: int
    evaluations: int


def energy(
    params: ParameterVector,
    train: TimeSeries,
    config: MarketConfig,
    replications: int = 3,
    workers: int = 1,
) -> float:
    """Replication-averaged training MAPE of `params`.

    Replication r simulates with master seed substream(config.master_seed, r),
    p0 equal to the first training value, over the training dates; results
    are averaged in replication order, so the value is deterministic.
    """
    cfg = params.apply(config)
    p0 = train.values[0]
    total = 0.0
    for r in range(replications):
        run = market.simulate_pk(
            replace(cfg, master_seed=substream(cfg.master_seed, r)),
            p0=p0,
            horizon=len(train),
            dates=train.dates,
            workers=workers,
        )
        total += mape(train, run.predicted)
    return total / replications


def propose(params: ParameterVector, sigma: float, stream: Stream) -> ParameterVector:
    """Perturb one uniformly chosen coordinate by clamped Gaussian noise.

    The noise standard deviation is sigma times the coordinate's range.
    """
    lo, hi = params.bounds()
    i = stream.integer(len(params.values))
    noise = stream.gauss(0.0, sigma * (hi[i] - lo[i]))
    new_values = params.values.copy()
    new_values[i] = min(max(new_values[i] + noise, lo[i]), hi[i])
    return ParameterVector(params.type_names, new_values)


def accept(delta_energy: float, temperature: float, stream: Stream) -> bool:
    """Metropolis criterion: downhill always, uphill with exp(-delta/T)."""
    if not temperature > 0:
        raise ValueError("temperature must be > 0")
    if delta_energy <= 0:
        return True
    return stream.u01() < exp(-delta_energy / temperature)


def anneal(
    train: TimeSeries,
    config: MarketConfig,
    schedule: AnnealingSchedule = AnnealingSchedule(),
    seed: int = 0,
    workers: int = 1,
) -> FitResult:
    """Metropolis search with geometric cooling over the parameter box.

    Starts from a uniformly random in-bounds vector, computes exactly
    schedule.total_evaluations energies (the start included), and cools
    T <- cooling_factor * T every proposals_per_epoch proposals.  Fully
    deterministic given (train, config, schedule, seed).
    """
    if len(train) < 2:
        raise ValueError("training series needs at least 2 observations")
    stream = Stream(fold(seed, _ANNEAL_TAG))

    current = ParameterVector.random(config, stream)
    current_energy = energy(current, train, config, schedule.replications, workers)
    best, best_energy = current, current_energy
    trace = [best_energy]

    temperature = schedule.initial_temperature
    proposals = 0
    while len(trace) < schedule.total_evaluations:
        candidate = propose(current, schedule.proposal_sigma, stream)
        candidate_energy = energy(candidate, train, config, schedule.replications, workers)
        if candidate_energy < best_energy:
            best, best_energy = candidate, candidate_energy
        if accept(candidate_energy - current_energy, temperature, stream):
            current, current_energy = candidate, candidate_energy
        trace.append(best_energy)
        proposals += 1
        if proposals % schedule.proposals_per_epoch == 0:
            temperature *= schedule.cooling_factor

    return FitResult(
        best_params=best,
        best_energy=best_energy,
        energy_trace=tuple(trace),
        seed_used=seed,
        evaluations=len(trace),
    )


def fit_to_dict(fit: FitResult) -> dict:
    return {
        "params": fit.best_params.to_dict(),
        "best_mape": fit.best_energy,
        "seed": fit.seed_used,
        "evaluations": fit.evaluations,
        "best_mape_trace": list(fit.energy_trace),
    }


def params_from_fit_dict(data: dict, type_names: tuple[str, ...]) -> ParameterVector:
    if "params" not in data:
        raise ValueError("fit file missing 'params'")
    return ParameterVector.from_dict(data["params"], type_names)
