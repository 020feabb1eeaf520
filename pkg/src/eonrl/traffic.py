"""Stochastic request streams and the discrete-event clock.

An episode is a fixed number of dynamic lightpath requests with Poisson
arrivals (exponential inter-arrival times), exponential holding times,
uniform ordered source-destination pairs, and weighted bit rates. The
arrival rate is normalized by spatial capacity:

    arrival_rate = erlang * cores_per_link / mean_holding

so offered load scales with the number of cores per link. Everything is a
pure function of (config, seed).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .topology import Node

DEFAULT_BIT_RATE_WEIGHTS = {25: 3.0, 50: 5.0, 100: 2.0}


@dataclass(frozen=True)
class Request:
    """One dynamic lightpath demand."""

    id: int
    source: Node
    destination: Node
    bit_rate_gbps: int
    arrival_time: float
    holding_time: float


@dataclass(frozen=True)
class TrafficConfig:
    erlang: float
    mean_holding: float = 5.0
    cores_per_link: int = 4
    requests_per_episode: int = 2000
    bit_rate_weights: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_BIT_RATE_WEIGHTS))
    rng_seed: int = 0

    def __post_init__(self):
        if self.erlang <= 0 or self.mean_holding <= 0:
            raise ValueError("erlang and mean_holding must be positive")
        if self.cores_per_link < 1 or self.requests_per_episode < 1:
            raise ValueError("cores_per_link and requests_per_episode must be >= 1")
        if not self.bit_rate_weights or any(w <= 0 for w in self.bit_rate_weights.values()):
            raise ValueError("bit rate weights must be positive")

    @property
    def arrival_rate(self) -> float:
        """Requests per time unit, normalized by the number of cores per link."""
        return self.erlang * self.cores_per_link / self.mean_holding


def generate_episode(config: TrafficConfig, nodes: Sequence[Node]) -> list[Request]:
    """Draw one episode's request stream, fully determined by ``config.rng_seed``."""
    if len(nodes) < 2:
        raise ValueError("need at least two nodes to draw source-destination pairs")
    rng = np.random.default_rng(config.rng_seed)
    n = config.requests_per_episode
    arrivals = np.cumsum(rng.exponential(1.0 / config.arrival_rate, size=n))
    holdings = rng.exponential(config.mean_holding, size=n)

    rates = sorted(config.bit_rate_weights)
    weights = np.array([config.bit_rate_weights[r] for r in rates], dtype=float)
    rate_draws = rng.choice(len(rates), size=n, p=weights / weights.sum())

    # Uniform over ordered pairs with distinct endpoints.
    num_nodes = len(nodes)
    src_idx = rng.integers(0, num_nodes, size=n)
    dst_off = rng.integers(1, num_nodes, size=n)
    dst_idx = (src_idx + dst_off) % num_nodes

    return [
        Request(
            id=i,
            source=nodes[src_idx[i]],
            destination=nodes[dst_idx[i]],
            bit_rate_gbps=rates[rate_draws[i]],
            arrival_time=float(arrivals[i]),
            holding_time=float(holdings[i]),
        )
        for i in range(n)
    ]


_DEPARTURE = 0  # departures sort before arrivals at equal timestamps
_ARRIVAL = 1


class EventQueue:
    """Time-ordered arrival/departure queue with deterministic tie order."""

    def __init__(self):
        self._heap: list[tuple[float, int, int, object]] = []
        self._counter = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push_arrival(self, request: Request) -> None:
        heapq.heappush(self._heap, (request.arrival_time, _ARRIVAL, self._counter, request))
        self._counter += 1

    def push_departure(self, time: float, request_id: int) -> None:
        heapq.heappush(self._heap, (time, _DEPARTURE, self._counter, request_id))
        self._counter += 1

    def pop(self) -> tuple[float, int, object]:
        time, kind, _, payload = heapq.heappop(self._heap)
        return time, kind, payload


def run_events(
    queue: EventQueue,
    on_arrival: Callable[[Request], bool],
    on_departure: Callable[[int, float], None],
) -> None:
    """Drain the queue in time order.

    ``on_arrival`` returns whether the request was routed; routed requests get
    a departure scheduled at arrival + holding. Departures at the same
    timestamp as an arrival run first, freeing capacity before the contender.
    """
    while queue:
        time, kind, payload = queue.pop()
        if kind == _ARRIVAL:
            request: Request = payload  # type: ignore[assignment]
            if on_arrival(request):
                queue.push_departure(request.arrival_time + request.holding_time, request.id)
        else:
            on_departure(payload, time)  # type: ignore[arg-type]
