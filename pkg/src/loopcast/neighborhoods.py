"""Radius-r neighborhood edge sets and the message index built on them.

The neighborhood of node i collects the edges incident to i plus every edge
lying on a simple cycle through i of length at most r + 2.  Setting r = 0
recovers the classical pairwise message structure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, UsageError
from .graph import Network, NodeSet

DEFAULT_R_MAX = 4


@dataclass(frozen=True)
class Neighborhood:
    focal: int
    radius: int
    edge_set: frozenset
    node_set: NodeSet


@dataclass(frozen=True)
class ConditionalNeighborhood:
    """Edges of the focal node's neighborhood not in the excluded owner's."""

    focal: int
    excluded_owner: int
    edge_set: frozenset


def _nodes_of_edges(net, focal, edge_set):
    nodes = {int(focal)}
    for e in edge_set:
        nodes.add(int(net.edge_u[e]))
        nodes.add(int(net.edge_v[e]))
    return NodeSet(nodes, net.node_count)


def build_neighborhood(net: Network, i: int, r: int, r_max: int = DEFAULT_R_MAX):
    """Neighborhood edge set of node i at radius r.

    Edges on simple cycles through i are found by depth-limited DFS over
    simple paths out of i; a path of d edges whose tip closes back to i
    yields a cycle of length d + 1.
    """
    if r < 0 or r > r_max:
        raise ConfigError(f"radius {r} outside [0, r_max={r_max}]")
    if not 0 <= i < net.node_count:
        raise UsageError(f"node {i} out of range")
    edges = set(int(e) for e in net.incident_edges(i))
    if r == 0:
        return Neighborhood(i, r, frozenset(edges), _nodes_of_edges(net, i, edges))

    max_len = r + 2  # longest admissible cycle through i
    path_edges = []
    on_path = {i}

    def dfs(u, depth):
        # depth = number of nodes on the current path including i;
        # closing back to i from here yields a cycle of length `depth`
        for v, e in zip(net.neighbors(u), net.incident_edges(u)):
            v, e = int(v), int(e)
            if v == i:
                if 3 <= depth <= max_len:
                    edges.update(path_edges)
                    edges.add(e)
                continue
            if v in on_path or depth + 1 > max_len:
                continue
            on_path.add(v)
            path_edges.append(e)
            dfs(v, depth + 1)
            path_edges.pop()
            on_path.discard(v)

    # start one step out so the trivial back-and-forth walk is not a cycle
    for v0, e0 in zip(net.neighbors(i), net.incident_edges(i)):
        v0, e0 = int(v0), int(e0)
        on_path.add(v0)
        path_edges.append(e0)
        dfs(v0, 2)
        path_edges.pop()
        on_path.discard(v0)
    return Neighborhood(i, r, frozenset(edges), _nodes_of_edges(net, i, edges))


def build_all_neighborhoods(net, r, r_max=DEFAULT_R_MAX):
    return [build_neighborhood(net, i, r, r_max) for i in range(net.node_count)]


def build_conditional(nbr_i: Neighborhood, nbr_j: Neighborhood):
    """Exact edge-set difference N_i \\ N_j."""
    if nbr_i.focal == nbr_j.focal:
        raise UsageError("conditional neighborhood requires distinct focal nodes")
    if nbr_i.radius != nbr_j.radius:
        raise UsageError("conditional neighborhood requires matching radii")
    return ConditionalNeighborhood(
        nbr_i.focal, nbr_j.focal, nbr_i.edge_set - nbr_j.edge_set)


@dataclass(frozen=True)
class MessageIndex:
    """Enumeration of messages (k, i), one per neighborhood owner i and
    non-focal node k in N_i's node set."""

    pairs: tuple              # ((k, i), ...)
    index: dict               # (k, i) -> position
    neighborhoods: tuple      # Neighborhood per node

    def __len__(self):
        return len(self.pairs)

    def members(self, i):
        """Message ids owned by neighborhood i."""
        return [m for m, (_, owner) in enumerate(self.pairs) if owner == i]


def build_message_index(net, r, r_max=DEFAULT_R_MAX, neighborhoods=None):
    if neighborhoods is None:
        neighborhoods = build_all_neighborhoods(net, r, r_max)
    pairs = []
    for i, nbr in enumerate(neighborhoods):
        for k in nbr.node_set:
            if k != i:
                pairs.append((k, i))
    index = {pair: m for m, pair in enumerate(pairs)}
    return MessageIndex(tuple(pairs), index, tuple(neighborhoods))


def neighborhood_size_csv(net, r, r_max=DEFAULT_R_MAX):
    """Per-node neighborhood sizes as CSV text, for cost profiling."""
    lines = ["node,edges,nodes"]
    for nbr in build_all_neighborhoods(net, r, r_max):
        lines.append(f"{nbr.focal},{len(nbr.edge_set)},{len(nbr.node_set)}")
    return "\n".join(lines) + "\n"
