"""Network topology and candidate-path computation.

Holds the undirected weighted graph, ships the 14-node NSFNet preset, and
pre-computes the ordered candidate path sets (k-shortest or all simple paths)
that routing policies select from. Topologies are immutable after
construction and safe to share across concurrent simulation runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import networkx as nx

Node = int | str

LENGTH_ATTR = "length_km"


class TopologyError(ValueError):
    """Base class for topology construction/lookup failures."""


class SelfLoopError(TopologyError):
    """A link connects a node to itself."""


class DuplicateLinkError(TopologyError):
    """The same undirected link appears twice in the edge list."""


class InvalidLengthError(TopologyError):
    """A link length is not strictly positive."""


class DisconnectedError(TopologyError):
    """The graph does not connect all nodes."""


class UnknownNodeError(TopologyError):
    """A referenced node is not part of the topology."""


@dataclass(frozen=True)
class PathCandidate:
    """One loop-free route: node sequence, total length, and directed hops."""

    nodes: tuple[Node, ...]
    length_km: float
    links: tuple[tuple[Node, Node], ...]

    @property
    def hop_count(self) -> int:
        return len(self.links)


class Topology:
    """Undirected weighted graph of nodes and fiber links (lengths in km).

    Immutable after construction; build instances through ``load_topology``,
    ``load_topology_file``, or ``nsfnet_preset``.
    """

    def __init__(self, graph: nx.Graph):
        self._graph = graph
        self._nodes = tuple(sorted(graph.nodes))
        self._links = tuple(
            sorted((min(u, v), max(u, v), float(d[LENGTH_ATTR])) for u, v, d in graph.edges(data=True))
        )

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self._nodes

    @property
    def links(self) -> tuple[tuple[Node, Node, float], ...]:
        return self._links

    @property
    def graph(self) -> nx.Graph:
        """Underlying networkx graph; treat as read-only."""
        return self._graph

    def has_node(self, node: Node) -> bool:
        return self._graph.has_node(node)

    def length(self, u: Node, v: Node) -> float:
        """Length in km of the undirected link u-v."""
        try:
            return float(self._graph.edges[u, v][LENGTH_ATTR])
        except KeyError:
            raise UnknownNodeError(f"no link {u!r}-{v!r} in topology") from None

    def ordered_pairs(self) -> list[tuple[Node, Node]]:
        """All ordered (source, destination) pairs with distinct endpoints."""
        return [(s, d) for s in self._nodes for d in self._nodes if s != d]

    def __repr__(self) -> str:
        return f"Topology(nodes={len(self._nodes)}, links={len(self._links)})"


def load_topology(edge_list: Iterable[tuple[Node, Node, float]]) -> Topology:
    """Build and validate a topology from (node_a, node_b, length_km) triples.

    Raises a distinct ``TopologyError`` subclass for self-loops, duplicate
    links, non-positive lengths, and disconnected graphs.
    """
    graph = nx.Graph()
    for a, b, length in edge_list:
        if a == b:
            raise SelfLoopError(f"self-loop on node {a!r}")
        length = float(length)
        if not length > 0:
            raise InvalidLengthError(f"link {a!r}-{b!r} has non-positive length {length}")
        if graph.has_edge(a, b):
            raise DuplicateLinkError(f"duplicate link {a!r}-{b!r}")
        graph.add_edge(a, b, **{LENGTH_ATTR: length})
    if graph.number_of_nodes() == 0:
        raise TopologyError("empty edge list")
    if not nx.is_connected(graph):
        raise DisconnectedError("graph is not connected")
    try:
        sorted(graph.nodes)
    except TypeError:
        raise TopologyError("node identifiers must be mutually comparable") from None
    return Topology(graph)


def load_topology_file(path) -> Topology:
    """Load a topology from a text file: one `<a> <b> <length_km>` per line.

    Lines starting with `#` and blank lines are ignored. Purely numeric node
    labels are converted to integers so file-based and programmatic
    topologies order nodes identically.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return _parse_topology_text(text, source=str(path))


def _parse_topology_text(text: str, source: str = "<topology>") -> Topology:
    triples: list[tuple[str, str, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TopologyError(f"{source}:{lineno}: expected '<a> <b> <length_km>', got {raw!r}")
        try:
            length = float(parts[2])
        except ValueError:
            raise TopologyError(f"{source}:{lineno}: bad length {parts[2]!r}") from None
        triples.append((parts[0], parts[1], length))
    if not triples:
        raise TopologyError(f"{source}: no links found")
    if all(a.isdigit() and b.isdigit() for a, b, _ in triples):
        return load_topology([(int(a), int(b), l) for a, b, l in triples])
    return load_topology(triples)


def nsfnet_preset() -> Topology:
    """The 14-node, 22-link NSFNet graph with its standard link lengths."""
    text = resources.files("eonrl.data").joinpath("nsfnet.txt").read_text(encoding="utf-8")
    return _parse_topology_text(text, source="nsfnet.txt")


def _check_endpoints(topology: Topology, source: Node, destination: Node) -> None:
    for node in (source, destination):
        if not topology.has_node(node):
            raise UnknownNodeError(f"unknown node {node!r}")
    if source == destination:
        raise TopologyError("source and destination must differ")


def _candidate_from_nodes(topology: Topology, nodes: Sequence[Node]) -> PathCandidate:
    graph = topology.graph
    links = tuple((nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1))
    length = sum(graph.edges[u, v][LENGTH_ATTR] for u, v in links)
    return PathCandidate(nodes=tuple(nodes), length_km=float(length), links=links)


def _sort_key(cand: PathCandidate) -> tuple[float, tuple[Node, ...]]:
    # Ascending length, ties broken by lexicographic node sequence.
    return (cand.length_km, cand.nodes)


def yen_k_shortest(topology: Topology, source: Node, destination: Node, k: int) -> list[PathCandidate]:
    """Up to ``k`` loopless shortest paths, sorted by (length, node sequence).

    Backed by networkx's shortest-simple-paths generator; paths of equal
    length are re-sorted lexicographically so ties resolve deterministically.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_endpoints(topology, source, destination)
    collected: list[PathCandidate] = []
    # The generator yields paths in non-decreasing length order, but the
    # relative order of equal-length paths is unspecified: keep pulling while
    # the incoming length still ties the k-th best, then sort and cut.
    for nodes in nx.shortest_simple_paths(topology.graph, source, destination, weight=LENGTH_ATTR):
        cand = _candidate_from_nodes(topology, nodes)
        if len(collected) >= k and cand.length_km > collected[-1].length_km:
            break
        collected.append(cand)
    collected.sort(key=_sort_key)
    return collected[:k]


def all_paths_sorted(topology: Topology, source: Node, destination: Node) -> list[PathCandidate]:
    """Every simple path between the endpoints, sorted like ``yen_k_shortest``.

    Realizes the unbounded (k = inf) candidate set; enumeration count on
    NSFNet-scale graphs is bounded and computed once per experiment.
    """
    _check_endpoints(topology, source, destination)
    candidates = [
        _candidate_from_nodes(topology, nodes)
        for nodes in nx.all_simple_paths(topology.graph, source, destination)
    ]
    candidates.sort(key=_sort_key)
    return candidates


@dataclass(frozen=True)
class CandidatePaths:
    """Ordered candidate paths for every ordered (source, destination) pair."""

    k: int | None
    by_pair: dict[tuple[Node, Node], list[PathCandidate]]

    def paths(self, source: Node, destination: Node) -> list[PathCandidate]:
        try:
            return self.by_pair[(source, destination)]
        except KeyError:
            raise UnknownNodeError(f"no candidate paths for pair ({source!r}, {destination!r})") from None

    def pairs(self) -> list[tuple[Node, Node]]:
        return list(self.by_pair)

    def max_actions(self) -> int:
        return max(len(paths) for paths in self.by_pair.values())


def build_candidate_paths(topology: Topology, k: int | None) -> CandidatePaths:
    """Candidate sets for all ordered pairs; ``k=None`` means every simple path."""
    by_pair: dict[tuple[Node, Node], list[PathCandidate]] = {}
    for source, destination in topology.ordered_pairs():
        if k is None:
            by_pair[(source, destination)] = all_paths_sorted(topology, source, destination)
        else:
            by_pair[(source, destination)] = yen_k_shortest(topology, source, destination, k)
    return CandidatePaths(k=k, by_pair=by_pair)
