"""Integral maximum s-t flow and residual reachability.

Shortest augmenting paths (Edmonds-Karp) with a fixed arc order: nodes are
ordered by their position in the network, and each node scans its residual arcs
by target position. The same network therefore always yields the same flow.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import ContractViolation, InvalidInstanceError

__all__ = [
    "FlowNetwork",
    "FlowResult",
    "max_flow",
    "residual_unreachable",
    "cut_capacity",
    "decompose_flow",
    "bounded_flow",
]

Node = Hashable
Arc = tuple[Node, Node]


@dataclass(frozen=True)
class FlowNetwork:
    nodes: tuple[Node, ...]
    arcs: Mapping[Arc, int]
    source: Node = "s"
    sink: Node = "t"

    @classmethod
    def build(
        cls,
        arcs: Iterable[tuple[Node, Node, int]],
        source: Node = "s",
        sink: Node = "t",
        nodes: Iterable[Node] = (),
        max_capacity: int | None = None,
    ) -> "FlowNetwork":
        order: dict[Node, None] = {source: None}
        for x in nodes:
            order.setdefault(x, None)
        caps: dict[Arc, int] = {}
        for u, v, c in arcs:
            if (u, v) in caps:
                raise InvalidInstanceError(f"duplicate arc {u!r} -> {v!r}")
            order.setdefault(u, None)
            order.setdefault(v, None)
            caps[(u, v)] = int(c)
        order.setdefault(sink, None)
        net = cls(nodes=tuple(order), arcs=caps, source=source, sink=sink)
        net.validate(max_capacity)
        return net

    def validate(self, max_capacity: int | None = None) -> None:
        known = set(self.nodes)
        for (u, v), c in self.arcs.items():
            if u not in known or v not in known:
                raise InvalidInstanceError(f"arc {u!r} -> {v!r} uses an unknown node")
            if u == v:
                raise InvalidInstanceError("self loops are not allowed")
            if v == self.source:
                raise InvalidInstanceError("arc into the source")
            if u == self.sink:
                raise InvalidInstanceError("arc out of the sink")
            if c < 0:
                raise InvalidInstanceError("negative capacity")
            if max_capacity is not None and c > max_capacity:
                raise InvalidInstanceError(f"capacity {c} exceeds the bound {max_capacity}")


@dataclass(frozen=True)
class FlowResult:
    flow: Mapping[Arc, int]
    value: int
    sink_saturation: Mapping[Arc, bool]

    @property
    def saturates_sink(self) -> bool:
        return all(self.sink_saturation.values())


class _Residual:
    """Paired-edge residual graph over integer node positions."""

    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, c: int) -> int:
        e = len(self.to)
        self.to += [v, u]
        self.cap += [c, 0]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def freeze_order(self) -> None:
        to = self.to
        for lst in self.adj:
            lst.sort(key=lambda e: (to[e], e))

    def run(self, s: int, t: int) -> int:
        to, cap, adj = self.to, self.cap, self.adj
        total = 0
        while True:
            parent = [-1] * self.n
            parent[s] = -2
            q = deque([s])
            while q and parent[t] == -1:
                u = q.popleft()
                for e in adj[u]:
                    v = to[e]
                    if cap[e] > 0 and parent[v] == -1:
                        parent[v] = e
                        q.append(v)
            if parent[t] == -1:
                return total
            push = None
            v = t
            while v != s:
                e = parent[v]
                push = cap[e] if push is None else min(push, cap[e])
                v = to[e ^ 1]
            v = t
            while v != s:
                e = parent[v]
                cap[e] -= push
                cap[e ^ 1] += push
                v = to[e ^ 1]
            total += push

    def reachable(self, s: int) -> list[bool]:
        seen = [False] * self.n
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if self.cap[e] > 0 and not seen[v]:
                    seen[v] = True
                    q.append(v)
        return seen


def _residual_for(net: FlowNetwork, flow: Mapping[Arc, int] | None = None):
    index = {x: i for i, x in enumerate(net.nodes)}
    res = _Residual(len(net.nodes))
    edge_of: dict[Arc, int] = {}
    for (u, v), c in net.arcs.items():
        f = 0 if flow is None else flow.get((u, v), 0)
        e = res.add(index[u], index[v], c - f)
        res.cap[e + 1] = f
        edge_of[(u, v)] = e
    res.freeze_order()
    return res, index, edge_of


def max_flow(net: FlowNetwork) -> FlowResult:
    """Integral maximum flow from ``net.source`` to ``net.sink``."""
    res, index, edge_of = _residual_for(net)
    value = res.run(index[net.source], index[net.sink])
    flow = {a: net.arcs[a] - res.cap[e] for a, e in edge_of.items()}
    saturation = {a: flow[a] == net.arcs[a] for a in net.arcs if a[1] == net.sink}
    return FlowResult(flow=flow, value=value, sink_saturation=saturation)


def residual_unreachable(net: FlowNetwork, fr: FlowResult) -> frozenset:
    """Nodes with no residual path from the source.

    Raises :class:`ContractViolation` when the sink is reachable, i.e. when
    ``fr`` is not a maximum flow.
    """
    for a, f in fr.flow.items():
        if not 0 <= f <= net.arcs[a]:
            raise ContractViolation(f"flow {f} on {a!r} violates its capacity")
    res, index, _ = _residual_for(net, fr.flow)
    seen = res.reachable(index[net.source])
    if seen[index[net.sink]]:
        raise ContractViolation("an augmenting path exists; the flow is not maximum")
    return frozenset(x for x, i in index.items() if not seen[i])


def cut_capacity(net: FlowNetwork, sink_side: Iterable[Node]) -> int:
    side = set(sink_side)
    return sum(c for (u, v), c in net.arcs.items() if u not in side and v in side)


def decompose_flow(net: FlowNetwork, fr: FlowResult) -> list[tuple[tuple[Node, ...], int]]:
    """Split a flow into s-t paths with integral values, discarding circulations."""
    rest = {a: f for a, f in fr.flow.items() if f > 0}
    out_arcs: dict[Node, list[Node]] = {}
    for u, v in sorted(rest, key=lambda a: (net.nodes.index(a[0]), net.nodes.index(a[1]))):
        out_arcs.setdefault(u, []).append(v)

    def next_hop(u):
        for v in out_arcs.get(u, ()):
            if rest.get((u, v), 0) > 0:
                return v
        return None

    paths = []
    while True:
        path = [net.source]
        pos = {net.source: 0}
        while path[-1] != net.sink:
            v = next_hop(path[-1])
            if v is None:
                break
            if v in pos:
                cycle = path[pos[v]:] + [v]
                amount = min(rest[(a, b)] for a, b in zip(cycle, cycle[1:]))
                for a, b in zip(cycle, cycle[1:]):
                    rest[(a, b)] -= amount
                for x in path[pos[v] + 1:]:
                    del pos[x]
                path = path[: pos[v] + 1]
                continue
            pos[v] = len(path)
            path.append(v)
        if path[-1] != net.sink:
            break
        amount = min(rest[(a, b)] for a, b in zip(path, path[1:]))
        for a, b in zip(path, path[1:]):
            rest[(a, b)] -= amount
        paths.append((tuple(path), amount))
    return paths


def bounded_flow(
    arcs: Sequence[tuple[Node, Node, int, int]],
    source: Node,
    sink: Node,
    min_value: int,
) -> dict[Arc, int] | None:
    """Find an integral s-t flow of value at least ``min_value`` with per-arc ``[lo, hi]`` bounds.

    Returns the flow on every given arc, or ``None`` when no such flow exists.
    Standard reduction to a maximum flow between an auxiliary source and sink.
    """
    nodes: dict[Node, int] = {}

    def idx(x):
        if x not in nodes:
            nodes[x] = len(nodes)
        return nodes[x]

    idx(source)
    for u, v, _, _ in arcs:
        idx(u)
        idx(v)
    idx(sink)
    n = len(nodes)
    big = sum(hi for _, _, _, hi in arcs) + min_value + 1
    aux_s, aux_t = n, n + 1
    res = _Residual(n + 2)
    excess = [0] * n
    edge_ids = []
    for u, v, lo, hi in arcs:
        if lo > hi:
            return None
        iu, iv = nodes[u], nodes[v]
        edge_ids.append(res.add(iu, iv, hi - lo))
        excess[iv] += lo
        excess[iu] -= lo
    # return arc closes the circulation and forces the value
    isink, isrc = nodes[sink], nodes[source]
    res.add(isink, isrc, big - min_value)
    excess[isrc] += min_value
    excess[isink] -= min_value
    need = 0
    for i, ex in enumerate(excess):
        if ex > 0:
            res.add(aux_s, i, ex)
            need += ex
        elif ex < 0:
            res.add(i, aux_t, -ex)
    res.freeze_order()
    if res.run(aux_s, aux_t) != need:
        return None
    out = {}
    for (u, v, lo, hi), e in zip(arcs, edge_ids):
        out[(u, v)] = lo + (hi - lo - res.cap[e])
    return out
