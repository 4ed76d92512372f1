"""Investor types, agent populations, and the partial-knowledge market simulation.

A market is a small set of named investor types; each type stamps out
`count` agents whose behavioral parameters are the type's values plus a
uniform jitter, so agents are similar but not identical.  Simulation is
seeded with the target's value at t=0 only and never reads the target
again: each step every enabled agent votes buy (+1) or sell (-1), votes
are weighted by the assets the agent puts in play, and the aggregate net
demand moves the price multiplicatively.

Determinism contract: every random draw is a pure function of
(master_seed, purpose, step, agent) via counter-based streams, and net
demand is summed in fixed chunks combined in chunk order.  Worker counts
therefore never change the output, bit for bit.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .rng import TAG_DECISION, TAG_JITTER, fold, fold_array, fold_matrix, u01_array
from .timeseries import TimeSeries

OPTIMISM_BOUNDS = (0.0, 1.0)
REACTIVITY_BOUNDS = (-1.0, 1.0)
# Lower bounds of trade_fraction and price_impact are open (> 0); the
# tiny floors below are what jitter and proposals clamp to.
TRADE_FRACTION_BOUNDS = (1e-6, 1.0)
PRICE_IMPACT_BOUNDS = (1e-6, 0.1)
JITTER_MAX = 0.2
MAX_TYPES = 16

# Fixed unit of parallel demand aggregation; recorded on every run.
DEFAULT_CHUNK_SIZE = 4096

# Upper bound on precomputed decision uniforms held at once (elements).
_UNIFORM_BLOCK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class InvestorType:
    """Behavioral template from which a population of agents is built."""

    name: str
    assets_per_investor: float  # millions
    count: int
    optimism: float  # baseline buy probability, in [0, 1]
    reactivity: float  # sensitivity of buy probability to the last return, in [-1, 1]
    trade_fraction: float  # share of assets placed per decision, in (0, 1]
    enabled: bool = True

    def __post_init__(self):
        if not self.name:
            raise ValueError("investor type needs a name")
        if not self.assets_per_investor > 0:
            raise ValueError(f"{self.name}: assets_per_investor must be > 0")
        if not (isinstance(self.count, int) and self.count >= 1):
            raise ValueError(f"{self.name}: count must be an integer >= 1")
        if not 0.0 <= self.optimism <= 1.0:
            raise ValueError(f"{self.name}: optimism {self.optimism} outside [0, 1]")
        if not -1.0 <= self.reactivity <= 1.0:
            raise ValueError(f"{self.name}: reactivity {self.reactivity} outside [-1, 1]")
        if not 0.0 < self.trade_fraction <= 1.0:
            raise ValueError(f"{self.name}: trade_fraction {self.trade_fraction} outside (0, 1]")

    @property
    def total_assets(self) -> float:
        return self.assets_per_investor * self.count


@dataclass(frozen=True)
class MarketConfig:
    """A full market: investor types plus global simulation knobs."""

    types: tuple[InvestorType, ...]
    price_impact: float  # in (0, 0.1]; with |demand| <= 1 this keeps prices positive
    jitter: float = 0.05  # amplitude of per-agent parameter noise, in [0, 0.2]
    master_seed: int = 0

    def __post_init__(self):
        if not 1 <= len(self.types) <= MAX_TYPES:
            raise ValueError(f"need 1..{MAX_TYPES} investor types, got {len(self.types)}")
        names = [t.name for t in self.types]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate type names in {names}")
        if not 0.0 < self.price_impact <= PRICE_IMPACT_BOUNDS[1]:
            raise ValueError(f"price_impact {self.price_impact} outside (0, {PRICE_IMPACT_BOUNDS[1]}]")
        if not 0.0 <= self.jitter <= JITTER_MAX:
            raise ValueError(f"jitter {self.jitter} outside [0, {JITTER_MAX}]")
        if not isinstance(self.master_seed, int):
            raise ValueError("master_seed must be an integer")

    @property
    def type_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.types)

    @property
    def total_assets(self) -> float:
        """Total assets of the full configuration, disabled types included."""
        return sum(t.total_assets for t in self.types)

    @property
    def enabled_asset_share(self) -> float:
        return sum(t.total_assets for t in self.types if t.enabled) / self.total_assets

    def type_named(self, name: str) -> InvestorType:
        for t in self.types:
            if t.name == name:
                return t
        raise ValueError(f"unknown investor type {name!r}; have {list(self.type_names)}")


def set_enabled(config: MarketConfig, type_names: Iterable[str], enabled: bool) -> MarketConfig:
    """Copy of `config` with the named types' enabled flag set.

    Demand normalization is by the full configuration's assets, so
    disabling a type attenuates demand by that type's asset share
    rather than re-weighting the survivors.
    """
    wanted = set(type_names)
    known = set(config.type_names)
    unknown = wanted - known
    if unknown:
        raise ValueError(f"unknown investor type(s) {sorted(unknown)}; have {sorted(known)}")
    new_types = tuple(
        replace(t, enabled=enabled) if t.name in wanted else t for t in config.types
    )
    return replace(config, types=new_types)


def only_enabled(config: MarketConfig, type_names: Iterable[str]) -> MarketConfig:
    """Copy of `config` with exactly `type_names` enabled, all others off."""
    wanted = list(type_names)
    cfg = set_enabled(config, config.type_names, False)
    if wanted:
        cfg = set_enabled(cfg, wanted, True)
    return cfg


# -- JSON wire format ---------------------------------------------------


def config_to_dict(config: MarketConfig) -> dict:
    return {
        "types": [
            {
                "name": t.name,
                "assets_per_investor": t.assets_per_investor,
                "count": t.count,
                "optimism": t.optimism,
                "reactivity": t.reactivity,
                "trade_fraction": t.trade_fraction,
                "enabled": t.enabled,
            }
            for t in config.types
        ],
        "price_impact": config.price_impact,
        "jitter": config.jitter,
        "master_seed": config.master_seed,
    }


def config_from_dict(data: dict) -> MarketConfig:
    try:
        types = tuple(
            InvestorType(
                name=t["name"],
                assets_per_investor=float(t["assets_per_investor"]),
                count=int(t["count"]),
                optimism=float(t["optimism"]),
                reactivity=float(t["reactivity"]),
                trade_fraction=float(t["trade_fraction"]),
                enabled=bool(t.get("enabled", True)),
            )
            for t in data["types"]
        )
        return MarketConfig(
            types=types,
            price_impact=float(data["price_impact"]),
            jitter=float(data.get("jitter", 0.05)),
            master_seed=int(data.get("master_seed", 0)),
        )
    except KeyError as missing:
        raise ValueError(f"market config missing field {missing}") from None


def load_config(path: str | Path) -> MarketConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"market config not found: {path}")
    return config_from_dict(json.loads(path.read_text()))


def save_config(config: MarketConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")


# -- population ---------------------------------------------------------


@dataclass
class AgentPopulation:
    """Jittered agents realized from a config; a pure function of it.

    normalization_assets is the FULL configuration's asset total,
    including disabled types, and never changes when types are toggled.
    """

    type_index: np.ndarray  # int64, agent -> type position
    optimism: np.ndarray
    reactivity: np.ndarray
    trade_fraction: np.ndarray
    assets: np.ndarray  # per agent, millions
    enabled: np.ndarray  # bool mask
    normalization_assets: float
    price_impact: float
    chunk_size: int

    def __post_init__(self):
        # Cache the per-agent demand weight and decision counters.
        self._weight = np.where(
            self.enabled, self.trade_fraction * self.assets / self.normalization_assets, 0.0
        )
        self._agent_ids = np.arange(len(self.type_index), dtype=np.uint64)

    def __len__(self) -> int:
        return len(self.type_index)

    @property
    def enabled_asset_share(self) -> float:
        return float(np.sum(self.assets[self.enabled])) / self.normalization_assets


def init_population(config: MarketConfig, chunk_size: int = DEFAULT_CHUNK_SIZE) -> AgentPopulation:
    """One agent per individual investor, parameters jittered within bounds.

    Noise for agent a's parameter d is uniform in +/- config.jitter,
    drawn from the counter stream keyed by (master_seed, jitter tag, d, a)
    and clamped to the parameter's bounds.  Disabled types' agents are
    created too; they simply emit no demand.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    counts = np.array([t.count for t in config.types], dtype=np.int64)
    type_index = np.repeat(np.arange(len(config.types), dtype=np.int64), counts)
    n = int(counts.sum())
    agent_ids = np.arange(n, dtype=np.uint64)

    base = np.repeat(np.array([[t.optimism, t.reactivity, t.trade_fraction] for t in config.types]),
                     counts, axis=0)
    lo = np.array([OPTIMISM_BOUNDS[0], REACTIVITY_BOUNDS[0], TRADE_FRACTION_BOUNDS[0]])
    hi = np.array([OPTIMISM_BOUNDS[1], REACTIVITY_BOUNDS[1], TRADE_FRACTION_BOUNDS[1]])

    jitter_key = fold(config.master_seed, TAG_JITTER)
    jittered = np.empty((n, 3))
    for d in range(3):
        bits = fold_array(fold(jitter_key, d), agent_ids)
        noise = (2.0 * u01_array(bits) - 1.0) * config.jitter
        jittered[:, d] = np.clip(base[:, d] + noise, lo[d], hi[d])

    return AgentPopulation(
        type_index=type_index,
        optimism=jittered[:, 0],
        reactivity=jittered[:, 1],
        trade_fraction=jittered[:, 2],
        assets=np.repeat(np.array([t.assets_per_investor for t in config.types]), counts),
        enabled=np.repeat(np.array([t.enabled for t in config.types], dtype=bool), counts),
        normalization_assets=config.total_assets,
        price_impact=config.price_impact,
        chunk_size=chunk_size,
    )


class _StepBuffers:
    """Scratch arrays for one sequential run; populations stay immutable."""

    def __init__(self, n: int):
        self.prob = np.empty(n)
        self.buy = np.empty(n, dtype=bool)
        self.contrib = np.empty(n)
        self.accum = np.empty(n)


def _chunk_total(contrib: np.ndarray, accum: np.ndarray | None) -> float:
    """Strict ascending-index sum of one chunk."""
    if accum is None:
        return float(np.cumsum(contrib)[-1])
    out = accum[: len(contrib)]
    np.add.accumulate(contrib, out=out)
    return float(out[-1])


def _net_demand(
    contrib: np.ndarray,
    chunk_size: int,
    pool: ThreadPoolExecutor | None,
    accum: np.ndarray | None = None,
) -> float:
    """Sum agent contributions: fixed chunks, combined in chunk order."""
    n = len(contrib)
    if n <= chunk_size:
        return _chunk_total(contrib, accum)
    spans = [(i, min(i + chunk_size, n)) for i in range(0, n, chunk_size)]

    def one(span: tuple[int, int]) -> float:
        lo, hi = span
        return _chunk_total(contrib[lo:hi], accum[lo:hi] if accum is not None else None)

    totals = [one(s) for s in spans] if pool is None else list(pool.map(one, spans))
    demand = 0.0
    for t in totals:
        demand += t
    return demand


def _decision_uniforms(master_seed: int, steps: list[int], agent_ids: np.ndarray) -> np.ndarray:
    """Uniforms u[s, a] for the given step indices, all agents.

    Row s equals the per-step stream exactly: the value for (step, agent)
    is a pure function of (master_seed, decision tag, step, agent).
    """
    keys = [fold(master_seed, TAG_DECISION, s) for s in steps]
    return u01_array(fold_matrix(keys, agent_ids))


def step(
    price: float,
    last_return: float,
    population: AgentPopulation,
    step_index: int,
    master_seed: int,
    workers: int = 1,
    _pool: ThreadPoolExecutor | None = None,
    _uniforms: np.ndarray | None = None,
    _buffers: _StepBuffers | None = None,
) -> tuple[float, float]:
    """Advance the price one trading day.

    Enabled agent i buys with probability clamp(optimism_i +
    reactivity_i * last_return, 0, 1) against a counter-based uniform
    keyed by (master_seed, decision tag, step_index, i); its vote is
    weighted by trade_fraction_i * assets_i / normalization_assets.
    The draw exists for every agent, enabled or not, so toggling types
    never shifts anyone else's stream.
    """
    if not price > 0:
        raise ValueError(f"price must be positive, got {price}")
    if _uniforms is None:
        step_key = fold(master_seed, TAG_DECISION, step_index)
        _uniforms = u01_array(fold_array(step_key, population._agent_ids))
    buf = _buffers if _buffers is not None else _StepBuffers(len(population))

    np.multiply(population.reactivity, last_return, out=buf.prob)
    buf.prob += population.optimism
    np.clip(buf.prob, 0.0, 1.0, out=buf.prob)
    np.less(_uniforms, buf.prob, out=buf.buy)
    np.negative(population._weight, out=buf.contrib)
    np.copyto(buf.contrib, population._weight, where=buf.buy)

    if _pool is None and workers > 1 and len(population) > population.chunk_size:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            demand = _net_demand(buf.contrib, population.chunk_size, pool, buf.accum)
    else:
        demand = _net_demand(buf.contrib, population.chunk_size, _pool, buf.accum)
    next_price = price * (1.0 + population.price_impact * demand)
    return next_price, demand


@dataclass(frozen=True)
class SimulationRun:
    """Output of one partial-knowledge simulation."""

    predicted: TimeSeries
    demands: tuple[float, ...]  # one per step taken (horizon - 1)
    seed_used: int
    chunk_size: int


def simulate_pk(
    config: MarketConfig,
    p0: float,
    horizon: int,
    dates: Sequence[date],
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> SimulationRun:
    """Simulate `horizon` days seeded only by the starting price p0.

    predicted[0] = p0; each later value comes from step() fed with the
    return of the simulation's own previous move (0 for the first step,
    which has no history).  The run is a pure function of
    (config, p0, horizon): worker count never changes the result.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if len(dates) != horizon:
        raise ValueError(f"got {len(dates)} dates for horizon {horizon}")
    if not p0 > 0:
        raise ValueError(f"p0 must be positive, got {p0}")

    population = init_population(config, chunk_size=chunk_size)
    n_agents = len(population)
    n_chunks = (n_agents + chunk_size - 1) // chunk_size
    use_pool = workers > 1 and n_chunks > 1

    prices = np.empty(horizon, dtype=np.float64)
    prices[0] = p0
    demands: list[float] = []
    buffers = _StepBuffers(n_agents)
    # Decision uniforms are price-independent, so they are produced in
    # blocks ahead of the sequential price loop.
    block = max(1, _UNIFORM_BLOCK_ELEMENTS // max(n_agents, 1))

    pool = ThreadPoolExecutor(max_workers=workers) if use_pool else None
    try:
        u_block: np.ndarray | None = None
        block_start = 0
        for t in range(1, horizon):
            s = t - 1  # step index
            if u_block is None or s >= block_start + len(u_block):
                block_start = s
                steps = list(range(s, min(s + block, horizon - 1)))
                u_block = _decision_uniforms(config.master_seed, steps, population._agent_ids)
            last_return = 0.0 if t == 1 else (prices[t - 1] - prices[t - 2]) / prices[t - 2]
            prices[t], demand = step(
                prices[t - 1],
                last_return,
                population,
                s,
                config.master_seed,
                _pool=pool,
                _uniforms=u_block[s - block_start],
                _buffers=buffers,
            )
            demands.append(demand)
    finally:
        if pool is not None:
            pool.shutdown()

    predicted = TimeSeries(tuple(dates), tuple(float(p) for p in prices))
    return SimulationRun(
        predicted=predicted,
        demands=tuple(demands),
        seed_used=config.master_seed,
        chunk_size=chunk_size,
    )
