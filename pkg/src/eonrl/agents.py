"""Path-selection policies.

Three learned policies (epsilon-greedy bandit, UCB bandit, tabular Q-learning)
and the three deterministic baselines (SPF-FF, KSP-FF, KSP-inf) sit behind
one loop shape: observe state, choose a path index, receive a reward, update.

Bandit value estimates are exact running means: the visit count is
incremented before the incremental update so the divisor is the
post-increment count (the only order consistent with zero-initialized
counts). Q-learning keys its table by (pair, congestion level, path index)
and evaluates each candidate at its own path's congestion level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .grid import NUM_CONGESTION_LEVELS, CongestionLevel
from .topology import Node, PathCandidate

Pair = tuple[Node, Node]

EGREEDY = "egreedy"
UCB = "ucb"
QLEARNING = "qlearning"
SPF_FF = "spf_ff"
KSP_FF = "ksp_ff"
KSP_INF = "ksp_inf"

RL_ALGORITHMS = frozenset({EGREEDY, UCB, QLEARNING})
BASELINE_ALGORITHMS = frozenset({SPF_FF, KSP_FF, KSP_INF})
ALGORITHMS = RL_ALGORITHMS | BASELINE_ALGORITHMS


@dataclass(frozen=True)
class RewardPolicy:
    """Reward fed back per provisioning outcome; blocked is stored negative."""

    routed: float
    blocked: float

    def __post_init__(self):
        if not (self.routed >= 0 > self.blocked):
            raise ValueError(f"need routed >= 0 > blocked, got ({self.routed}, {self.blocked})")


@dataclass(frozen=True)
class EpsilonSchedule:
    """Exploration rate per episode: constant, or linear from start to end."""

    start: float
    end: float | None = None
    mode: str = "constant"

    def __post_init__(self):
        if self.mode not in ("constant", "linear"):
            raise ValueError(f"unknown epsilon mode {self.mode!r}")
        if self.mode == "linear" and self.end is None:
            raise ValueError("linear epsilon schedule needs an end value")
        for value in (self.start, self.end):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"epsilon values must be in [0, 1], got {value}")

    @classmethod
    def constant(cls, value: float) -> "EpsilonSchedule":
        return cls(start=value, mode="constant")

    @classmethod
    def linear(cls, start: float, end: float) -> "EpsilonSchedule":
        return cls(start=start, end=end, mode="linear")


def epsilon_at(schedule: EpsilonSchedule, episode_index: int, total_episodes: int) -> float:
    """Exploration rate for one episode of the schedule."""
    if not 0 <= episode_index < total_episodes:
        raise ValueError(f"episode {episode_index} outside [0, {total_episodes})")
    if schedule.mode == "constant" or total_episodes == 1:
        return schedule.start
    frac = episode_index / (total_episodes - 1)
    return schedule.start + (schedule.end - schedule.start) * frac


class BanditState:
    """Per-pair value estimates Q, visit counts N, and selection counter t."""

    def __init__(self, action_counts: Mapping[Pair, int]):
        self.q = {pair: np.zeros(k) for pair, k in action_counts.items()}
        self.n = {pair: np.zeros(k, dtype=np.int64) for pair, k in action_counts.items()}
        self.t = {pair: 0 for pair in action_counts}


def egreedy_select(state: BanditState, pair: Pair, epsilon: float, rng: np.random.Generator) -> int:
    """Uniform with probability epsilon, else argmax Q (lowest-index ties)."""
    q = state.q[pair]
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(len(q)))
    return int(np.argmax(q))


def ucb_select(state: BanditState, pair: Pair, epsilon: float, c: float, rng: np.random.Generator) -> int:
    """Epsilon-exploration, else argmax of Q + c*sqrt(ln t / N).

    Untried actions carry an infinite bonus and are taken first, lowest
    index among them.
    """
    q = state.q[pair]
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(len(q)))
    n = state.n[pair]
    untried = n == 0
    if untried.any():
        return int(np.argmax(untried))
    bonus = c * np.sqrt(math.log(state.t[pair]) / n)
    return int(np.argmax(q + bonus))


def bandit_update(state: BanditState, pair: Pair, path_index: int, reward: float) -> None:
    """Incremental running-mean update; Q stays the exact mean of rewards seen."""
    state.n[pair][path_index] += 1
    state.t[pair] += 1
    q = state.q[pair]
    q[path_index] += (reward - q[path_index]) / state.n[pair][path_index]


class QLearnState:
    """Q table over (pair, congestion level, path index), zero-initialized."""

    def __init__(self, action_counts: Mapping[Pair, int], alpha: float, gamma: float):
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {alpha}")
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {gamma}")
        self.alpha = alpha
        self.gamma = gamma
        self.q = {pair: np.zeros((NUM_CONGESTION_LEVELS, k)) for pair, k in action_counts.items()}


def qlearn_select(
    state: QLearnState,
    pair: Pair,
    path_levels: Sequence[CongestionLevel],
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    """Uniform with probability epsilon, else argmax over candidates, each
    scored at its own path's congestion level."""
    q = state.q[pair]
    k = q.shape[1]
    if len(path_levels) != k:
        raise ValueError(f"expected {k} congestion levels, got {len(path_levels)}")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(k))
    values = q[np.asarray(path_levels, dtype=np.intp), np.arange(k)]
    return int(np.argmax(values))


def qlearn_update(
    state: QLearnState,
    pair: Pair,
    level_before: CongestionLevel,
    path_index: int,
    reward: float,
    level_after: CongestionLevel,
) -> None:
    """One-step temporal-difference update toward the post-allocation level."""
    q = state.q[pair]
    target = reward + state.gamma * float(q[level_after].max())
    q[level_before, path_index] += state.alpha * (target - q[level_before, path_index])


def baseline_select(
    policy: str,
    candidates: Sequence[PathCandidate],
    feasibility_probe: Callable[[PathCandidate], bool],
) -> PathCandidate | None:
    """Deterministic path choice for the non-learning policies.

    SPF-FF considers only the shortest path; KSP-FF and KSP-inf walk the
    length-sorted candidates and take the first the controller can fit.
    None signals a block.
    """
    if policy not in BASELINE_ALGORITHMS:
        raise ValueError(f"unknown baseline policy {policy!r}")
    if not candidates:
        return None
    if policy == SPF_FF:
        first = candidates[0]
        return first if feasibility_probe(first) else None
    for candidate in candidates:
        if feasibility_probe(candidate):
            return candidate
    return None


# -- agent wrappers ----------------------------------------------------------


class EpsilonGreedyAgent:
    """Bandit agent: per-pair running-mean values, epsilon-greedy selection."""

    algorithm = EGREEDY
    needs_congestion = False

    def __init__(self, action_counts: Mapping[Pair, int]):
        self.state = BanditState(action_counts)

    def select(self, pair, path_levels, epsilon, rng) -> int:
        return egreedy_select(self.state, pair, epsilon, rng)

    def observe(self, pair, path_index, reward, level_before=None, level_after=None) -> None:
        bandit_update(self.state, pair, path_index, reward)

    def checkpoint_rows(self) -> Iterator[tuple]:
        yield from _bandit_rows(self.state)


class UcbAgent:
    """Bandit agent scoring exploitation choices by upper confidence bound."""

    algorithm = UCB
    needs_congestion = False

    def __init__(self, action_counts: Mapping[Pair, int], c: float):
        self.state = BanditState(action_counts)
        self.c = c

    def select(self, pair, path_levels, epsilon, rng) -> int:
        return ucb_select(self.state, pair, epsilon, self.c, rng)

    def observe(self, pair, path_index, reward, level_before=None, level_after=None) -> None:
        bandit_update(self.state, pair, path_index, reward)

    def checkpoint_rows(self) -> Iterator[tuple]:
        yield from _bandit_rows(self.state)


class QLearningAgent:
    """Tabular Q-learning over (pair, congestion level, path index)."""

    algorithm = QLEARNING
    needs_congestion = True

    def __init__(self, action_counts: Mapping[Pair, int], alpha: float, gamma: float):
        self.state = QLearnState(action_counts, alpha=alpha, gamma=gamma)

    def select(self, pair, path_levels, epsilon, rng) -> int:
        return qlearn_select(self.state, pair, path_levels, epsilon, rng)

    def observe(self, pair, path_index, reward, level_before=None, level_after=None) -> None:
        qlearn_update(self.state, pair, level_before, path_index, reward, level_after)

    def checkpoint_rows(self) -> Iterator[tuple]:
        for pair in sorted(self.state.q):
            q = self.state.q[pair]
            for level in range(q.shape[0]):
                for idx in range(q.shape[1]):
                    yield pair, level + 1, idx, float(q[level, idx]), 0


def _bandit_rows(state: BanditState) -> Iterator[tuple]:
    for pair in sorted(state.q):
        q, n = state.q[pair], state.n[pair]
        for idx in range(len(q)):
            yield pair, None, idx, float(q[idx]), int(n[idx])


def make_agent(algorithm: str, action_counts: Mapping[Pair, int], *,
               alpha: float | None = None, gamma: float | None = None,
               c: float | None = None):
    """Instantiate the learning agent for one experiment seed."""
    if algorithm == EGREEDY:
        return EpsilonGreedyAgent(action_counts)
    if algorithm == UCB:
        if c is None:
            raise ValueError("ucb agent needs the exploration parameter c")
        return UcbAgent(action_counts, c=c)
    if algorithm == QLEARNING:
        if alpha is None or gamma is None:
            raise ValueError("qlearning agent needs alpha and gamma")
        return QLearningAgent(action_counts, alpha=alpha, gamma=gamma)
    raise ValueError(f"not a learning algorithm: {algorithm!r}")


# -- checkpoint I/O ----------------------------------------------------------


def write_checkpoint(agent, path) -> None:
    """Dump the agent's table as `sd_pair,level(or -),path_index,Q,N` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sd_pair,level,path_index,Q,N\n")
        for pair, level, idx, q, n in agent.checkpoint_rows():
            level_text = "-" if level is None else str(level)
            fh.write(f"{pair[0]}>{pair[1]},{level_text},{idx},{q!r},{n}\n")


def read_checkpoint(agent, path) -> None:
    """Warm-start an agent's table from a checkpoint written by this package."""
    def parse_node(text: str) -> Node:
        return int(text) if text.isdigit() else text

    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("sd_pair"):
            raise ValueError("not a checkpoint file")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            pair_text, level_text, idx_text, q_text, n_text = line.split(",")
            src_text, dst_text = pair_text.split(">")
            pair = (parse_node(src_text), parse_node(dst_text))
            idx = int(idx_text)
            if level_text == "-":
                agent.state.q[pair][idx] = float(q_text)
                agent.state.n[pair][idx] = int(n_text)
            else:
                agent.state.q[pair][int(level_text) - 1, idx] = float(q_text)
    if hasattr(agent.state, "t"):
        agent.state.t = {pair: int(n.sum()) for pair, n in agent.state.n.items()}
