"""Graph representation, deterministic generators, and text serialization.

Graphs are immutable after construction and carry a stable edge index:
``edges[i]`` is edge ``i`` for the lifetime of the graph, and every
per-edge vector in the package (transmission probabilities, recovered
weights) is indexed the same way.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass


class GraphError(ValueError):
    """Structurally invalid graph or malformed graph file."""


@dataclass(frozen=True)
class Graph:
    """Immutable node/edge structure with stable edge indexing.

    Nodes are ``0 .. node_count - 1``.  For undirected graphs each edge is
    stored once, as the pair given at construction time, and transmission
    runs both ways.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    directed: bool

    def __post_init__(self):
        if self.node_count < 1:
            raise GraphError("node_count must be >= 1")
        seen = set()
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise GraphError(f"edge {i} ({u}, {v}): endpoint out of range")
            if u == v:
                raise GraphError(f"edge {i} ({u}, {v}): self-loop")
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"edge {i} ({u}, {v}): duplicate edge")
            seen.add(key)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def build_graph(node_count: int, edges, directed: bool) -> Graph:
    """Construct a :class:`Graph`, validating endpoints and uniqueness.

    Edge indices follow input order.  Raises :class:`GraphError` naming
    the offending edge on invalid endpoints, self-loops, or duplicates.
    """
    return Graph(node_count, tuple((int(u), int(v)) for u, v in edges), bool(directed))


def gen_binary_arborescence(levels: int) -> Graph:
    """Complete binary out-tree with ``levels`` levels below the root.

    Node 0 is the root; node ``i`` has children ``2i+1`` and ``2i+2``
    (heap numbering).  The result has ``2**(levels+1) - 1`` nodes and one
    fewer edges, all directed away from the root, in breadth-first order.
    """
    if levels < 1:
        raise GraphError("levels must be >= 1")
    n = 2 ** (levels + 1) - 1
    edges = []
    for parent in range((n - 1) // 2):
        edges.append((parent, 2 * parent + 1))
        edges.append((parent, 2 * parent + 2))
    return Graph(n, tuple(edges), True)


def gen_directed_lattice(rows: int, cols: int) -> Graph:
    """Directed grid: every node points to its right and down neighbours.

    Node ids are row-major (``id = row * cols + col``).  The result is a
    DAG with unique source node 0; every node is reachable from it.
    """
    if rows < 1 or cols < 1:
        raise GraphError("rows and cols must be >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            if r + 1 < rows:
                edges.append((u, u + cols))
    return Graph(rows * cols, tuple(edges), True)


def _geometric(rng: random.Random, p: float) -> int:
    # number of successes before the first failure; mean p / (1 - p)
    k = 0
    while rng.random() < p:
        k += 1
    return k


# chance that a singed (backward-burned) node keeps spreading the fire;
# calibrated so the default probabilities put a 250-node graph near 900 edges
_SINGED_SPREAD = 0.25


def gen_forest_fire(
    node_count: int,
    forward_prob: float = 0.37,
    backward_prob: float = 0.32,
    seed: int = 0,
) -> Graph:
    """Connected undirected graph grown by a forest-fire process.

    Each new node links to a uniformly chosen ambassador among the
    existing nodes, then "burns" outward from it: every burning node
    nominates a geometric number of its not-yet-burned neighbours to keep
    burning (fan-out governed by ``forward_prob``) plus a geometric
    number that are singed but do not propagate (``backward_prob``), and
    the new node links to every burned node.  Deterministic given
    ``seed``.  With the default probabilities a 250-node graph lands near
    900 edges.
    """
    if node_count < 1:
        raise GraphError("node_count must be >= 1")
    for name, p in (("forward_prob", forward_prob), ("backward_prob", backward_prob)):
        if not (0.0 <= p < 1.0):
            raise GraphError(f"{name} must be in [0, 1)")
    rng = random.Random(seed)
    neighbors: list[list[int]] = [[] for _ in range(node_count)]
    edges: list[tuple[int, int]] = []
    for v in range(1, node_count):
        ambassador = rng.randrange(v)
        burned = {ambassador}
        queue = deque([ambassador])
        while queue:
            u = queue.popleft()
            spreading = _geometric(rng, forward_prob)
            singed = _geometric(rng, backward_prob)
            if spreading + singed == 0:
                continue
            candidates = [w for w in neighbors[u] if w not in burned]
            rng.shuffle(candidates)
            for w in candidates[:spreading]:
                burned.add(w)
                queue.append(w)
            for w in candidates[spreading:spreading + singed]:
                burned.add(w)
                if rng.random() < _SINGED_SPREAD:
                    queue.append(w)
        for u in sorted(burned):
            edges.append((u, v))
            neighbors[u].append(v)
            neighbors[v].append(u)
    return Graph(node_count, tuple(edges), False)


def write_graph(graph: Graph, path) -> None:
    """Write a graph as plain text: ``directed|undirected <node_count>``
    on the first line, then one ``src tgt`` pair per line in edge order."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        kind = "directed" if graph.directed else "undirected"
        f.write(f"{kind} {graph.node_count}\n")
        for u, v in graph.edges:
            f.write(f"{u} {v}\n")


def read_graph(path) -> Graph:
    """Read a graph written by :func:`write_graph`.

    Raises :class:`GraphError` with the offending line number on parse
    failures; the round trip preserves edge order exactly.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise GraphError("line 1: empty graph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] not in ("directed", "undirected"):
        raise GraphError("line 1: expected 'directed|undirected <node_count>'")
    try:
        node_count = int(head[1])
    except ValueError:
        raise GraphError("line 1: node count is not an integer") from None
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'src tgt'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: endpoints are not integers") from None
        edges.append((u, v))
    try:
        return Graph(node_count, tuple(edges), head[0] == "directed")
    except GraphError as exc:
        raise GraphError(f"invalid graph in file: {exc}") from None
