"""Undirected network substrate with per-edge transmission probabilities.

Node ids are dense integers [0, N).  Ids that never appear in the edge list
are treated as isolated nodes.  Edges are stored once and are queryable from
both endpoints through a CSR-style adjacency.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import EdgeListError, UsageError


@dataclass(frozen=True)
class NodeSet:
    """A sorted collection of distinct node ids in [0, N)."""

    ids: tuple

    def __init__(self, nodes, node_count=None):
        ids = tuple(sorted({int(v) for v in nodes}))
        for v in ids:
            if v < 0 or (node_count is not None and v >= node_count):
                raise UsageError(f"node id {v} out of range")
        object.__setattr__(self, "ids", ids)

    def __contains__(self, v):
        return v in set(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __len__(self):
        return len(self.ids)

    def asarray(self):
        return np.asarray(self.ids, dtype=np.int64)


@dataclass(frozen=True)
class Network:
    """Immutable undirected graph with transmission probabilities p_uv.

    Attributes
    ----------
    node_count : number of nodes N
    edge_u, edge_v : endpoint arrays, one entry per undirected edge (u < v)
    edge_p : per-edge probability in [0, 1]
    adj_indptr, adj_node, adj_edge : CSR adjacency; for node i the neighbors
        are adj_node[adj_indptr[i]:adj_indptr[i+1]] with matching edge index.
    """

    node_count: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_p: np.ndarray
    adj_indptr: np.ndarray = field(repr=False)
    adj_node: np.ndarray = field(repr=False)
    adj_edge: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, node_count, edges, probs):
        edges = [(int(u), int(v)) for u, v in edges]
        probs = np.asarray(probs, dtype=np.float64)
        if len(edges) != len(probs):
            raise UsageError("edges and probs must have equal length")
        seen = set()
        for u, v in edges:
            if u == v:
                raise EdgeListError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise EdgeListError(f"edge ({u},{v}) outside [0,{node_count})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise EdgeListError(f"duplicate edge ({u},{v})")
            seen.add(key)
        if len(probs) and (np.min(probs) < 0.0 or np.max(probs) > 1.0):
            raise EdgeListError("edge probability outside [0,1]")

        eu = np.array([min(u, v) for u, v in edges], dtype=np.int64)
        ev = np.array([max(u, v) for u, v in edges], dtype=np.int64)
        deg = np.zeros(node_count, dtype=np.int64)
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        adj_node = np.zeros(indptr[-1], dtype=np.int64)
        adj_edge = np.zeros(indptr[-1], dtype=np.int64)
        cursor = indptr[:-1].copy()
        for e, (u, v) in enumerate(zip(eu, ev)):
            adj_node[cursor[u]] = v
            adj_edge[cursor[u]] = e
            cursor[u] += 1
            adj_node[cursor[v]] = u
            adj_edge[cursor[v]] = e
            cursor[v] += 1
        for arr in (eu, ev, probs, indptr, adj_node, adj_edge):
            arr.setflags(write=False)
        return cls(int(node_count), eu, ev, probs, indptr, adj_node, adj_edge)

    @property
    def edge_count(self):
        return len(self.edge_u)

    def degree(self, i=None):
        deg = np.diff(self.adj_indptr)
        return deg if i is None else int(deg[i])

    def neighbors(self, i):
        return self.adj_node[self.adj_indptr[i]:self.adj_indptr[i + 1]]

    def incident_edges(self, i):
        return self.adj_edge[self.adj_indptr[i]:self.adj_indptr[i + 1]]

    def edge_index(self, u, v):
        """Index of undirected edge (u, v), or -1 when absent."""
        for nbr, e in zip(self.neighbors(u), self.incident_edges(u)):
            if nbr == v:
                return int(e)
        return -1

    def with_zeroed_edges(self, nodes):
        """Copy of the network with p=0 on every edge adjacent to `nodes`.

        This is the complete-immunity transform: the targeted nodes can
        neither infect nor become infected, in any neighborhood.
        """
        blocked = set(int(v) for v in nodes)
        p = np.array(self.edge_p)
        for e, (u, v) in enumerate(zip(self.edge_u, self.edge_v)):
            if u in blocked or v in blocked:
                p[e] = 0.0
        return Network.from_edges(
            self.node_count, list(zip(self.edge_u, self.edge_v)), p)


def load_edge_list(source, default_p=1.0):
    """Parse an edge-list text stream into a Network.

    Lines are "u v" or "u v p"; '#' starts a comment; ids are 0-based
    integers.  node_count is 1 + max id, so ids absent from the file are
    isolated nodes.
    """
    if isinstance(source, bytes):
        source = source.decode()
    if isinstance(source, str):
        source = io.StringIO(source)
    edges, probs = [], []
    max_id = -1
    for line_no, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(f"expected 'u v' or 'u v p', got {raw!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
            p = float(parts[2]) if len(parts) == 3 else float(default_p)
        except ValueError as exc:
            raise EdgeListError(str(exc), line_no) from None
        if u < 0 or v < 0:
            raise EdgeListError(f"negative node id in {raw!r}", line_no)
        if u == v:
            raise EdgeListError(f"self-loop at node {u}", line_no)
        if not 0.0 <= p <= 1.0:
            raise EdgeListError(f"probability {p} outside [0,1]", line_no)
        key = (min(u, v), max(u, v))
        if key in {(min(a, b), max(a, b)) for a, b in edges}:
            raise EdgeListError(f"duplicate edge ({u},{v})", line_no)
        edges.append((u, v))
        probs.append(p)
        max_id = max(max_id, u, v)
    return Network.from_edges(max_id + 1, edges, probs)


def karate_club(p=1.0):
    """The bundled Zachary karate-club network with uniform edge probability."""
    text = resources.files("loopcast.data").joinpath("karate_club.txt").read_text()
    return load_edge_list(text, default_p=p)


def bfs_distances(net, sources):
    """Unweighted shortest-path distance from a source set; -1 if unreachable."""
    if np.isscalar(sources):
        sources = [sources]
    dist = np.full(net.node_count, -1, dtype=np.int64)
    queue = [int(s) for s in sources]
    for s in queue:
        dist[s] = 0
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in net.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(int(v))
    return dist


def coreness(net):
    """Core number of every node via iterative degree peeling."""
    n = net.node_count
    deg = net.degree().copy()
    core = np.zeros(n, dtype=np.int64)
    removed = np.zeros(n, dtype=bool)
    # peel in nondecreasing current-degree order; stale heap entries are skipped
    k = 0
    heap = [(int(deg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        k = max(k, d)
        core[v] = k
        removed[v] = True
        for u in net.neighbors(v):
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (int(deg[u]), int(u)))
    return core


def connected_components(net):
    """Partition of the nodes into maximal connected NodeSets."""
    seen = np.zeros(net.node_count, dtype=bool)
    comps = []
    for s in range(net.node_count):
        if seen[s]:
            continue
        dist = bfs_distances(net, s)
        members = np.nonzero(dist >= 0)[0]
        seen[members] = True
        comps.append(NodeSet(members, net.node_count))
    return comps


def diameter(net):
    """Max shortest-path length over node pairs; errors when disconnected."""
    if net.node_count == 0:
        raise UsageError("diameter of an empty graph is undefined")
    best = 0
    for s in range(net.node_count):
        dist = bfs_distances(net, s)
        if np.any(dist < 0):
            raise UsageError("diameter is undefined on a disconnected graph")
        best = max(best, int(dist.max()))
    return best
