"""SDN controller: modulation selection and first-fit provisioning.

Given a request and an agent-chosen path, pick the most spectrally efficient
modulation format whose reach covers the path, add the guard band, and try
first-fit core/spectrum assignment. The outcome is either a registered
allocation or a block with its governing reason.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .grid import Allocation, SpectrumGrid
from .topology import PathCandidate

DEFAULT_GUARD_BAND_SLOTS = 1


@dataclass(frozen=True)
class ModulationRow:
    format: str
    bit_rate_gbps: int
    slots: int
    reach_km: float


class ModulationTableError(ValueError):
    """Malformed or inconsistent modulation table."""


class ModulationTable:
    """Reach table mapping (format, bit rate) to slot demand and max distance.

    Rows for a bit rate are kept in preference order: fewest slots first,
    ties broken by shortest reach (highest-order format), so the first
    reachable row is always the most spectrum-efficient choice.
    """

    def __init__(self, rows: list[ModulationRow]):
        if not rows:
            raise ModulationTableError("modulation table is empty")
        seen = set()
        for row in rows:
            key = (row.format, row.bit_rate_gbps)
            if key in seen:
                raise ModulationTableError(f"duplicate row for {key}")
            seen.add(key)
            if row.slots < 1 or row.reach_km <= 0:
                raise ModulationTableError(f"bad slots/reach in row {row}")
        self.rows = tuple(rows)
        self._by_rate: dict[int, list[ModulationRow]] = {}
        for row in rows:
            self._by_rate.setdefault(row.bit_rate_gbps, []).append(row)
        for rate, group in self._by_rate.items():
            reaches = [r.reach_km for r in group]
            if len(set(reaches)) != len(reaches):
                raise ModulationTableError(f"two formats share a reach at {rate} Gbps")
            # Longer reach must not come with fewer slots than a shorter one.
            by_reach = sorted(group, key=lambda r: -r.reach_km)
            for hi, lo in zip(by_reach, by_reach[1:]):
                if lo.slots > hi.slots:
                    raise ModulationTableError(
                        f"{lo.format}/{rate} reaches less than {hi.format}/{rate} but needs more slots"
                    )
            group.sort(key=lambda r: (r.slots, r.reach_km))

    @property
    def bit_rates(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_rate))

    def rows_for(self, bit_rate_gbps: int) -> list[ModulationRow]:
        try:
            return self._by_rate[bit_rate_gbps]
        except KeyError:
            raise ValueError(f"unsupported bit rate {bit_rate_gbps} Gbps") from None

    @classmethod
    def from_text(cls, text: str, source: str = "<table>") -> "ModulationTable":
        rows = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ModulationTableError(
                    f"{source}:{lineno}: expected 'format bit_rate_gbps slots reach_km'"
                )
            try:
                rows.append(
                    ModulationRow(
                        format=parts[0],
                        bit_rate_gbps=int(parts[1]),
                        slots=int(parts[2]),
                        reach_km=float(parts[3]),
                    )
                )
            except ValueError as exc:
                raise ModulationTableError(f"{source}:{lineno}: {exc}") from None
        return cls(rows)

    @classmethod
    def from_file(cls, path) -> "ModulationTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), source=str(path))

    @classmethod
    def default(cls) -> "ModulationTable":
        """The built-in nine-row table (QPSK/16-QAM/64-QAM at 25/50/100 Gbps)."""
        text = resources.files("eonrl.data").joinpath("modulation_table.txt").read_text(encoding="utf-8")
        return cls.from_text(text, source="modulation_table.txt")


def select_modulation(table: ModulationTable, bit_rate_gbps: int, path_length_km: float) -> ModulationRow | None:
    """Fewest-slot row whose reach covers the path; ties favor shorter reach.

    Reach comparison is inclusive: a path exactly at a row's limit may use it.
    Returns None when no format reaches.
    """
    if path_length_km <= 0:
        raise ValueError(f"path length must be positive, got {path_length_km}")
    for row in table.rows_for(bit_rate_gbps):
        if row.reach_km >= path_length_km:
            return row
    return None


class BlockReason(Enum):
    NO_MODULATION_REACH = "no_modulation_reach"
    NO_SPECTRUM = "no_spectrum"


@dataclass(frozen=True)
class ProvisionOutcome:
    """Routed with an allocation and modulation, or blocked with a reason."""

    routed: bool
    allocation: Allocation | None = None
    modulation: ModulationRow | None = None
    reason: BlockReason | None = None

    def __post_init__(self):
        if self.routed and (self.allocation is None or self.modulation is None or self.reason is not None):
            raise ValueError("routed outcome carries allocation and modulation only")
        if not self.routed and (self.reason is None or self.allocation is not None or self.modulation is not None):
            raise ValueError("blocked outcome carries a reason only")


def find_assignment(
    grid: SpectrumGrid,
    table: ModulationTable,
    bit_rate_gbps: int,
    path: PathCandidate,
    guard_band_slots: int = DEFAULT_GUARD_BAND_SLOTS,
    try_all_modulations: bool = True,
    link_ids: np.ndarray | None = None,
) -> tuple[ModulationRow, int, int] | BlockReason:
    """Locate (modulation, core, start) for the request on ``path``, or a reason.

    Pure search: never mutates the grid. With ``try_all_modulations`` the
    reachable formats are attempted in preference order until one fits;
    otherwise only the preferred format is tried.
    """
    reachable = [row for row in table.rows_for(bit_rate_gbps) if row.reach_km >= path.length_km]
    if not reachable:
        return BlockReason.NO_MODULATION_REACH
    if not try_all_modulations:
        reachable = reachable[:1]
    ids = link_ids if link_ids is not None else grid.link_ids_for(path.links)
    for row in reachable:
        placement = grid.first_fit_search(ids, row.slots + guard_band_slots)
        if placement is not None:
            return row, placement[0], placement[1]
    return BlockReason.NO_SPECTRUM


def provision(
    grid: SpectrumGrid,
    table: ModulationTable,
    request,
    path: PathCandidate,
    guard_band_slots: int = DEFAULT_GUARD_BAND_SLOTS,
    try_all_modulations: bool = True,
    link_ids: np.ndarray | None = None,
) -> ProvisionOutcome:
    """Attempt to route ``request`` on ``path``; allocate on success.

    Never allocates when blocking, never routes without allocating.
    """
    found = find_assignment(
        grid, table, request.bit_rate_gbps, path,
        guard_band_slots=guard_band_slots,
        try_all_modulations=try_all_modulations,
        link_ids=link_ids,
    )
    if isinstance(found, BlockReason):
        return ProvisionOutcome(routed=False, reason=found)
    row, core, start = found
    allocation = Allocation(
        request_id=request.id,
        links=path.links,
        core=core,
        start=start,
        width=row.slots + guard_band_slots,
    )
    grid.allocate(allocation, link_ids=link_ids)
    return ProvisionOutcome(routed=True, allocation=allocation, modulation=row)


def teardown(grid: SpectrumGrid, request_id: int) -> Allocation:
    """Release the request's allocation (departure handling)."""
    return grid.release(request_id)
