"""Experiment orchestration.

For each (seed, episode): generate traffic, drive the event loop, route each
arrival through the configured policy and the controller, dispatch rewards,
and accumulate blocking statistics. Learning state persists across episodes
within a seed and resets across seeds; exploration and traffic randomness
come from separately seeded streams, so different policies at the same seed
face identical traffic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .agents import (
    ALGORITHMS,
    BASELINE_ALGORITHMS,
    KSP_INF,
    QLEARNING,
    SPF_FF,
    UCB,
    EpsilonSchedule,
    Pair,
    RewardPolicy,
    baseline_select,
    epsilon_at,
    make_agent,
)
from .controller import (
    DEFAULT_GUARD_BAND_SLOTS,
    BlockReason,
    ModulationTable,
    ProvisionOutcome,
    find_assignment,
    provision,
    select_modulation,
)
from .grid import GridConsistencyError, SpectrumGrid, congestion_level
from .topology import CandidatePaths, PathCandidate, Topology, build_candidate_paths
from .traffic import EventQueue, TrafficConfig, generate_episode, run_events

CONGESTION_SCOPES = ("per_path", "network")

_TRAFFIC_STREAM = 0
_AGENT_STREAM = 1


def _substream_seed(*entropy: int) -> int:
    """Well-mixed 128-bit seed for an independent random stream."""
    words = np.random.SeedSequence(entropy).generate_state(2, np.uint64)
    return (int(words[0]) << 64) | int(words[1])


@dataclass
class ExperimentConfig:
    """Everything one experiment needs; validated on construction."""

    topology: Topology
    algorithm: str
    traffic: TrafficConfig
    k: int | None = 3
    episodes: int = 100
    seeds: tuple[int, ...] = (1, 2, 3, 4)
    slots_per_core: int = 128
    guard_band_slots: int = DEFAULT_GUARD_BAND_SLOTS
    reward_policy: RewardPolicy | None = None
    epsilon: EpsilonSchedule | None = None
    alpha: float | None = None
    gamma: float | None = None
    c: float | None = None
    congestion_scope: str = "per_path"
    modulation_retry: bool = True
    modulation_table: ModulationTable = field(default_factory=ModulationTable.default)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {sorted(ALGORITHMS)}")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        self.seeds = tuple(self.seeds)
        if not self.seeds:
            raise ValueError("need at least one seed")
        if any(not isinstance(s, int) or s < 0 for s in self.seeds):
            raise ValueError("seeds must be non-negative integers")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1 (or None for unbounded)")
        if self.algorithm == KSP_INF and self.k is not None:
            raise ValueError("ksp_inf uses the unbounded candidate set; set k=None")
        if self.slots_per_core < 0 or self.guard_band_slots < 0:
            raise ValueError("slots_per_core and guard_band_slots must be >= 0")
        if self.congestion_scope not in CONGESTION_SCOPES:
            raise ValueError(f"congestion_scope must be one of {CONGESTION_SCOPES}")
        if self.is_learning:
            if self.reward_policy is None or self.epsilon is None:
                raise ValueError(f"{self.algorithm} needs a reward policy and an epsilon schedule")
            if self.algorithm == QLEARNING and (self.alpha is None or self.gamma is None):
                raise ValueError("qlearning needs alpha and gamma")
            if self.algorithm == UCB and self.c is None:
                raise ValueError("ucb needs the exploration parameter c")

    @property
    def is_learning(self) -> bool:
        return self.algorithm not in BASELINE_ALGORITHMS


@dataclass(frozen=True)
class EpisodeStats:
    """Blocking counts for one episode."""

    episode_index: int
    total: int
    blocked_no_spectrum: int
    blocked_no_reach: int

    @property
    def blocked(self) -> int:
        return self.blocked_no_spectrum + self.blocked_no_reach

    @property
    def routed(self) -> int:
        return self.total - self.blocked

    @property
    def blocking_probability(self) -> float:
        return self.blocked / self.total if self.total else 0.0


@dataclass(frozen=True)
class ExperimentResult:
    """Per-seed, per-episode stats plus across-seed aggregation helpers."""

    algorithm: str
    seeds: tuple[int, ...]
    per_seed: tuple[tuple[EpisodeStats, ...], ...]

    @property
    def episodes(self) -> int:
        return len(self.per_seed[0])

    def mean_bp_per_episode(self) -> list[float]:
        """Across-seed mean blocking probability, one value per episode."""
        n = len(self.per_seed)
        return [
            sum(seed_stats[ep].blocking_probability for seed_stats in self.per_seed) / n
            for ep in range(self.episodes)
        ]

    def final_window_mean_bp(self, window: int = 10) -> float:
        series = self.mean_bp_per_episode()
        tail = series[-window:] if window < len(series) else series
        return sum(tail) / len(tail)


@dataclass(frozen=True)
class RoutePlan:
    """A candidate path bound to grid link indices, with reach info cached."""

    candidate: PathCandidate
    link_ids: np.ndarray
    reachable_rates: frozenset[int]

    @property
    def length_km(self) -> float:
        return self.candidate.length_km


def bind_route_plans(
    candidates: CandidatePaths, grid: SpectrumGrid, table: ModulationTable
) -> dict[Pair, list[RoutePlan]]:
    """Resolve every candidate path to directed-link ids, once per experiment."""
    plans: dict[Pair, list[RoutePlan]] = {}
    for pair, paths in candidates.by_pair.items():
        plans[pair] = [
            RoutePlan(
                candidate=path,
                link_ids=grid.link_ids_for(path.links),
                reachable_rates=frozenset(
                    rate for rate in table.bit_rates
                    if select_modulation(table, rate, path.length_km) is not None
                ),
            )
            for path in paths
        ]
    return plans


def reward_for(outcome: ProvisionOutcome, policy: RewardPolicy) -> float:
    return policy.routed if outcome.routed else policy.blocked


def run_episode(
    config: ExperimentConfig,
    agent,
    grid: SpectrumGrid,
    episode_index: int,
    *,
    seed: int | None = None,
    plans: dict[Pair, list[RoutePlan]] | None = None,
    epsilon: float | None = None,
    agent_rng: np.random.Generator | None = None,
) -> EpisodeStats:
    """Process one episode's requests on a fresh grid.

    ``agent`` is None for the deterministic baselines. ``run_experiment``
    supplies plans, epsilon, and the persistent agent stream; calling this
    directly derives defaults from the config's first seed.
    """
    if not grid.is_empty():
        raise GridConsistencyError("episode must start on an empty grid")
    if seed is None:
        seed = config.seeds[0]
    if plans is None:
        plans = bind_route_plans(build_candidate_paths(config.topology, config.k), grid, config.modulation_table)
    if agent is not None:
        if epsilon is None:
            epsilon = epsilon_at(config.epsilon, episode_index, config.episodes)
        if agent_rng is None:
            agent_rng = np.random.default_rng(_substream_seed(seed, _AGENT_STREAM))

    traffic_cfg = replace(config.traffic, rng_seed=_substream_seed(seed, _TRAFFIC_STREAM, episode_index))
    requests = generate_episode(traffic_cfg, config.topology.nodes)

    queue = EventQueue()
    for request in requests:
        queue.push_arrival(request)

    table = config.modulation_table
    guard = config.guard_band_slots
    retry = config.modulation_retry
    network_scope = config.congestion_scope == "network"
    track_congestion = agent is not None and agent.needs_congestion
    blocked_spectrum = 0
    blocked_reach = 0

    def levels_for(entries: list[RoutePlan]) -> list:
        if network_scope:
            level = congestion_level(grid.network_congestion())
            return [level] * len(entries)
        return [congestion_level(grid.path_congestion(e.link_ids)) for e in entries]

    def on_arrival(request) -> bool:
        nonlocal blocked_spectrum, blocked_reach
        pair = (request.source, request.destination)
        entries = plans[pair]

        if agent is not None:
            levels = levels_for(entries) if track_congestion else None
            index = agent.select(pair, levels, epsilon, agent_rng)
            entry = entries[index]
            outcome = provision(
                grid, table, request, entry.candidate,
                guard_band_slots=guard, try_all_modulations=retry, link_ids=entry.link_ids,
            )
            reward = reward_for(outcome, config.reward_policy)
            if track_congestion:
                if network_scope:
                    level_after = congestion_level(grid.network_congestion())
                else:
                    level_after = congestion_level(grid.path_congestion(entry.link_ids))
                agent.observe(pair, index, reward, level_before=levels[index], level_after=level_after)
            else:
                agent.observe(pair, index, reward)
        else:
            considered = entries[:1] if config.algorithm == SPF_FF else entries

            def probe(entry: RoutePlan) -> bool:
                found = find_assignment(
                    grid, table, request.bit_rate_gbps, entry.candidate,
                    guard_band_slots=guard, try_all_modulations=retry, link_ids=entry.link_ids,
                )
                return not isinstance(found, BlockReason)

            chosen = baseline_select(config.algorithm, entries, probe)
            if chosen is None:
                if any(request.bit_rate_gbps in e.reachable_rates for e in considered):
                    blocked_spectrum += 1
                else:
                    blocked_reach += 1
                return False
            outcome = provision(
                grid, table, request, chosen.candidate,
                guard_band_slots=guard, try_all_modulations=retry, link_ids=chosen.link_ids,
            )

        if not outcome.routed:
            if outcome.reason is BlockReason.NO_SPECTRUM:
                blocked_spectrum += 1
            else:
                blocked_reach += 1
        return outcome.routed

    def on_departure(request_id: int, time: float) -> None:
        grid.release(request_id)

    run_events(queue, on_arrival, on_departure)

    if not grid.is_empty():
        raise GridConsistencyError("grid not empty after draining departures")

    return EpisodeStats(
        episode_index=episode_index,
        total=len(requests),
        blocked_no_spectrum=blocked_spectrum,
        blocked_no_reach=blocked_reach,
    )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all seeds and episodes; a pure function of (config, seeds)."""
    candidates = build_candidate_paths(config.topology, config.k)
    grid = SpectrumGrid(config.topology, config.traffic.cores_per_link, config.slots_per_core)
    plans = bind_route_plans(candidates, grid, config.modulation_table)

    per_seed: list[tuple[EpisodeStats, ...]] = []
    for seed in config.seeds:
        grid.reset()
        agent = None
        agent_rng = None
        if config.is_learning:
            action_counts = {pair: len(entries) for pair, entries in plans.items()}
            agent = make_agent(
                config.algorithm, action_counts,
                alpha=config.alpha, gamma=config.gamma, c=config.c,
            )
            agent_rng = np.random.default_rng(_substream_seed(seed, _AGENT_STREAM))
        episode_stats = []
        for episode_index in range(config.episodes):
            grid.reset()
            stats = run_episode(
                config, agent, grid, episode_index,
                seed=seed, plans=plans,
                epsilon=epsilon_at(config.epsilon, episode_index, config.episodes) if agent else None,
                agent_rng=agent_rng,
            )
            episode_stats.append(stats)
        per_seed.append(tuple(episode_stats))
    return ExperimentResult(algorithm=config.algorithm, seeds=config.seeds, per_seed=tuple(per_seed))
