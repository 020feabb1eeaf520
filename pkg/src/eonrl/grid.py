"""Per-link, per-core spectral slot occupancy.

Each bidirectional topology link is modeled as two independent directed
links; a lightpath occupies slots only in its travel direction, on one core,
with the same (core, slot range) on every hop. The grid also computes the
mean-occupancy congestion metric and its two-level discretization used as
reinforcement-learning state.

Occupancy arrays store ``request_id + 1`` for occupied slots and 0 for free
slots, so every occupied slot is attributable to exactly one allocation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from .topology import Node, Topology

CONGESTION_THRESHOLD = 0.3


class CongestionLevel(IntEnum):
    """Two-level discretization of a path's mean occupancy fraction."""

    LEVEL_1 = 0  # congestion fraction < 0.3
    LEVEL_2 = 1  # congestion fraction >= 0.3


NUM_CONGESTION_LEVELS = len(CongestionLevel)


def congestion_level(fraction: float) -> CongestionLevel:
    """Map a congestion fraction in [0, 1] to its level (boundary 0.3 is Level 2)."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"congestion fraction must be in [0, 1], got {fraction}")
    return CongestionLevel.LEVEL_2 if fraction >= CONGESTION_THRESHOLD else CongestionLevel.LEVEL_1


class GridConsistencyError(RuntimeError):
    """Internal invariant broken: overlapping or dangling slot ownership."""


@dataclass(frozen=True)
class Allocation:
    """An active lightpath's footprint: directed hops, core, slot range.

    The slot range [start, start + width) includes the guard band; the same
    core and range apply on every hop (core and spectrum continuity).
    """

    request_id: int
    links: tuple[tuple[Node, Node], ...]
    core: int
    start: int
    width: int

    @property
    def end(self) -> int:
        return self.start + self.width


class SpectrumGrid:
    """Mutable slot occupancy for all directed links of a topology.

    Single-writer: one grid per simulation run. Parallel experiments each
    build their own grid.
    """

    def __init__(self, topology: Topology, cores_per_link: int = 4, slots_per_core: int = 128):
        if cores_per_link < 1 or slots_per_core < 0:
            raise ValueError("cores_per_link must be >= 1 and slots_per_core >= 0")
        self._cores = cores_per_link
        self._slots = slots_per_core
        self._link_index: dict[tuple[Node, Node], int] = {}
        for a, b, _ in topology.links:
            self._link_index[(a, b)] = len(self._link_index)
            self._link_index[(b, a)] = len(self._link_index)
        n_links = len(self._link_index)
        self._occ = np.zeros((n_links, cores_per_link, slots_per_core), dtype=np.int32)
        self._occupied_counts = np.zeros((n_links, cores_per_link), dtype=np.int64)
        self._allocations: dict[int, Allocation] = {}
        self._alloc_link_ids: dict[int, np.ndarray] = {}

    @property
    def cores_per_link(self) -> int:
        return self._cores

    @property
    def slots_per_core(self) -> int:
        return self._slots

    @property
    def num_directed_links(self) -> int:
        return len(self._link_index)

    @property
    def active_allocations(self) -> int:
        return len(self._allocations)

    def link_id(self, u: Node, v: Node) -> int:
        return self._link_index[(u, v)]

    def link_ids_for(self, links: Sequence[tuple[Node, Node]]) -> np.ndarray:
        """Directed-link index array for a path's hop list (precompute once)."""
        return np.fromiter((self._link_index[hop] for hop in links), dtype=np.intp, count=len(links))

    def _as_link_ids(self, path) -> np.ndarray:
        if isinstance(path, np.ndarray):
            return path
        return self.link_ids_for(path)

    def occupancy_matrix(self, u: Node, v: Node) -> np.ndarray:
        """Copy of the (cores, slots) boolean occupancy of directed link u->v."""
        return self._occ[self._link_index[(u, v)]] != 0

    def total_occupied_slots(self) -> int:
        return int(self._occupied_counts.sum())

    def is_empty(self) -> bool:
        return not self._allocations and self.total_occupied_slots() == 0

    def reset(self) -> None:
        """Clear all occupancy and registered allocations."""
        self._occ.fill(0)
        self._occupied_counts.fill(0)
        self._allocations.clear()
        self._alloc_link_ids.clear()

    # -- search / mutation ---------------------------------------------------

    def first_fit_search(self, path, width: int) -> tuple[int, int] | None:
        """Lowest (core, start) whose ``width`` slots are free on every hop.

        ``path`` is a hop list or a precomputed link-id array. Absence of a
        feasible placement is a value (None), not an error: it signals a block.
        """
        if width < 1:
            raise ValueError(f"width must be >= 1, got {width}")
        if width > self._slots:
            return None
        link_ids = self._as_link_ids(path)
        free = (self._occ[link_ids] == 0).all(axis=0)
        if width == 1:
            hits = free
        else:
            counts = np.cumsum(free, axis=1, dtype=np.int32)
            windows = counts[:, width - 1 :].copy()
            windows[:, 1:] -= counts[:, : -width]
            hits = windows == width
        flat = hits.ravel()
        pos = int(np.argmax(flat))
        if not flat[pos]:
            return None
        core, start = divmod(pos, hits.shape[1])
        return core, start

    def allocate(self, allocation: Allocation, link_ids: np.ndarray | None = None) -> None:
        """Mark the allocation's slots occupied and register it.

        Overlap with existing occupancy or a reused request id means the
        caller's bookkeeping broke; both raise ``GridConsistencyError``.
        """
        if allocation.request_id in self._allocations:
            raise GridConsistencyError(f"request {allocation.request_id} already has an allocation")
        if allocation.start < 0 or allocation.end > self._slots:
            raise GridConsistencyError(f"slot range [{allocation.start}, {allocation.end}) out of bounds")
        if not 0 <= allocation.core < self._cores:
            raise GridConsistencyError(f"core {allocation.core} out of range")
        ids = link_ids if link_ids is not None else self.link_ids_for(allocation.links)
        window = self._occ[ids, allocation.core, allocation.start : allocation.end]
        if window.any():
            raise GridConsistencyError(
                f"overlap allocating request {allocation.request_id} on slots "
                f"[{allocation.start}, {allocation.end}) core {allocation.core}"
            )
        self._occ[ids, allocation.core, allocation.start : allocation.end] = allocation.request_id + 1
        self._occupied_counts[ids, allocation.core] += allocation.width
        self._allocations[allocation.request_id] = allocation
        self._alloc_link_ids[allocation.request_id] = ids

    def release(self, request_id: int) -> Allocation:
        """Free exactly the slots of the request's allocation and deregister it."""
        try:
            alloc = self._allocations.pop(request_id)
        except KeyError:
            raise KeyError(f"no active allocation for request {request_id}") from None
        ids = self._alloc_link_ids.pop(request_id)
        window = self._occ[ids, alloc.core, alloc.start : alloc.end]
        if not (window == request_id + 1).all():
            raise GridConsistencyError(f"occupancy for request {request_id} was clobbered")
        self._occ[ids, alloc.core, alloc.start : alloc.end] = 0
        self._occupied_counts[ids, alloc.core] -= alloc.width
        return alloc

    def allocation_for(self, request_id: int) -> Allocation | None:
        return self._allocations.get(request_id)

    # -- congestion ------------------------------------------------------------

    def path_congestion(self, path) -> float:
        """Mean occupied fraction over all (hop, core) pairs of the path."""
        link_ids = self._as_link_ids(path)
        if self._slots == 0:
            return 1.0
        total = int(self._occupied_counts[link_ids].sum())
        return total / (len(link_ids) * self._cores * self._slots)

    def network_congestion(self) -> float:
        """Mean occupied fraction over every (directed link, core) pair."""
        if self._slots == 0:
            return 1.0
        return self.total_occupied_slots() / (self.num_directed_links * self._cores * self._slots)

    # -- diagnostics -----------------------------------------------------------

    def occupancy_snapshot(self) -> str:
        """Run-length-encoded slot bitmaps, one line per (directed link, core)."""
        lines = [f"# occupancy snapshot: {self.num_directed_links} directed links, "
                 f"{self._cores} cores, {self._slots} slots"]
        for (u, v), idx in self._link_index.items():
            for core in range(self._cores):
                bits = self._occ[idx, core] != 0
                lines.append(f"{u}>{v} core {core}: {_rle(bits)}")
        return "\n".join(lines) + "\n"


def _rle(bits: np.ndarray) -> str:
    if bits.size == 0:
        return "-"
    runs = []
    edges = np.flatnonzero(np.diff(bits)) + 1
    start = 0
    for end in list(edges) + [bits.size]:
        runs.append(f"{end - start}x{int(bits[start])}")
        start = end
    return ",".join(runs)


def first_fit_search(grid: SpectrumGrid, path, width: int) -> tuple[int, int] | None:
    """Functional form of :meth:`SpectrumGrid.first_fit_search`."""
    return grid.first_fit_search(path, width)


def path_congestion(grid: SpectrumGrid, path) -> float:
    """Functional form of :meth:`SpectrumGrid.path_congestion`."""
    return grid.path_congestion(path)
