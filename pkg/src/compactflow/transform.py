"""Preprocessing transforms: bounded-degree reduction and in/out vertex splitting.

``to_bounded_degree`` rewrites a network so every vertex has in-degree and
out-degree at most d = floor(m/n) + 3 (computed from the input network).
A vertex above the bound is split into a chain of copies joined by
"infinite" capacity arcs; the chain is the degenerate binary tree whose
per-copy arc budget works for every d >= 3.  The pass runs twice, first for
in-degree and then for out-degree; the second pass redistributes both arc
directions of a split vertex, which is what keeps the first pass's bound
intact (a copy's other-direction load is at most d and always fits the
chain budget 2(d-1)).

"Infinite" capacity is a sentinel >= n*U + 1 of the input network, which no
feasible flow can reach; every undirected tree arc is realized as a pair of
antiparallel directed arcs of that capacity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import FlowNetwork, ResidualState, verify_flow


def infinite_capacity(net: FlowNetwork) -> int:
    return net.n * net.U + 1


@dataclass
class DegreeReduction:
    original: FlowNetwork
    reduced: FlowNetwork
    d: int
    # original vertex -> set of reduced copies (chain of copies, root first)
    vertex_map: dict[int, set[int]]
    # number of copies per split original vertex
    k_by_vertex: dict[int, int]
    # original arc index -> reduced arc index (tree arcs have no preimage)
    arc_image: list[int]
    # reduced vertex -> original vertex
    origin_of: list[int]


def _chain_budget(d: int, k: int) -> int:
    # k chain copies: two ends with one tree neighbor, k-2 middles with two.
    return k * (d - 2) + 2


def _copies_needed(deg: int, d: int) -> int:
    k = 2
    while _chain_budget(d, k) < deg:
        k += 1
    return k


class _Pass:
    """One splitting pass over the arc list; ``axis`` is 'in' or 'out'."""

    def __init__(self, n: int, arcs: list[tuple[int, int, int]], origin_of: list[int],
                 provenance: list[int | None], d: int, sentinel: int, axis: str):
        self.n = n
        self.arcs = arcs
        self.origin_of = origin_of
        self.provenance = provenance
        self.d = d
        self.sentinel = sentinel
        self.axis = axis

    def run(self):
        d = self.d
        key = 1 if self.axis == "in" else 0  # arc tuple slot holding this axis's endpoint
        deg = [0] * self.n
        for arc in self.arcs:
            deg[arc[key]] += 1
        assign: dict[int, int] = {}  # arc index -> new endpoint (for the split slot)
        other_assign: dict[int, int] = {}
        tree_arcs: list[tuple[int, int, int]] = []
        chains: dict[int, list[int]] = {}
        next_id = self.n
        for u in range(self.n):
            if deg[u] <= d:
                continue
            k = _copies_needed(deg[u], d)
            copies = [u] + list(range(next_id, next_id + k - 1))
            next_id += k - 1
            chains[u] = copies
            for a, b in zip(copies, copies[1:]):
                tree_arcs.append((a, b, self.sentinel))
                tree_arcs.append((b, a, self.sentinel))
            tree_deg = [1 if i in (0, k - 1) else 2 for i in range(k)]
            # Distribute this axis's arcs within per-copy budgets (always fits
            # by the choice of k), then the other direction's arcs; overflow
            # there is legal mid-pipeline and goes round-robin.
            budget = [d - t for t in tree_deg]
            slot = 0
            for idx, arc in enumerate(self.arcs):
                if arc[key] != u:
                    continue
                while budget[slot] == 0:
                    slot += 1
                budget[slot] -= 1
                assign[idx] = copies[slot]
            other_budget = [d - t for t in tree_deg]
            other_key = 1 - key
            slot = 0
            rr = 0
            for idx, arc in enumerate(self.arcs):
                if arc[other_key] != u or arc[key] == u:
                    continue
                while slot < k and other_budget[slot] == 0:
                    slot += 1
                if slot < k:
                    other_budget[slot] -= 1
                    other_assign[idx] = copies[slot]
                else:
                    other_assign[idx] = copies[rr % k]
                    rr += 1
        if not chains:
            return None
        out = []
        for idx, (a, b, c) in enumerate(self.arcs):
            if key == 1:
                head = assign.get(idx, b)
                tail = other_assign.get(idx, a)
            else:
                tail = assign.get(idx, a)
                head = other_assign.get(idx, b)
            out.append((tail, head, c))
        origin_of = list(self.origin_of)
        provenance = list(self.provenance)
        for u, copies in chains.items():
            for c in copies[1:]:
                origin_of.append(self.origin_of[u])
        out.extend(tree_arcs)
        provenance.extend([None] * len(tree_arcs))
        return next_id, out, origin_of, provenance


def to_bounded_degree(net: FlowNetwork) -> DegreeReduction:
    """Split high-degree vertices so max in/out degree <= floor(m/n) + 3.

    Returns the original network itself (identity maps) when no vertex
    exceeds the bound.
    """
    d = net.m // net.n + 3
    sentinel = infinite_capacity(net)
    n = net.n
    arcs = [tuple(a) for a in net.arcs]
    origin_of = list(range(n))
    provenance: list[int | None] = list(range(len(arcs)))
    changed = False
    for axis in ("in", "out"):
        result = _Pass(n, arcs, origin_of, provenance, d, sentinel, axis).run()
        if result is not None:
            changed = True
            n, arcs, origin_of, provenance = result
    if not changed:
        return DegreeReduction(
            original=net, reduced=net, d=d,
            vertex_map={u: {u} for u in range(net.n)},
            k_by_vertex={},
            arc_image=list(range(net.m)),
            origin_of=list(range(net.n)),
        )
    reduced = FlowNetwork(n, arcs, net.source, net.sink)
    vertex_map: dict[int, set[int]] = {u: set() for u in range(net.n)}
    for rid, orig in enumerate(origin_of):
        vertex_map[orig].add(rid)
    arc_image = [-1] * net.m
    for ridx, src in enumerate(provenance):
        if src is not None:
            arc_image[src] = ridx
    k_by_vertex = {u: len(copies) for u, copies in vertex_map.items() if len(copies) > 1}
    outd, ind = reduced.degrees()
    assert max(outd) <= d and max(ind) <= d, "degree bound violated after both passes"
    return DegreeReduction(net, reduced, d, vertex_map, k_by_vertex, arc_image, origin_of)


def map_flow_back(red: DegreeReduction, state: ResidualState) -> ResidualState:
    """Pull a feasible flow on the reduced network back to the original.

    Each original arc takes the flow of its unique reduced image; tree arcs
    are dropped.  The result is verified against the original network.
    """
    if state.net is not red.reduced:
        raise ValueError("state does not belong to the reduction's reduced network")
    if red.reduced is red.original:
        return state
    per_arc = state.arc_flows()
    out = ResidualState.zero(red.original)
    for idx, arc in enumerate(red.original.arcs):
        f = per_arc[red.arc_image[idx]]
        if f:
            out.push_flow(arc.tail, arc.head, f)
    verdict, _ = verify_flow(red.original, out)
    if not verdict:
        raise ValueError(f"mapped-back flow infeasible: {verdict.reason}")
    return out


# In/out splitting -----------------------------------------------------------

@dataclass
class InOutSplit:
    """Result of splitting vertices into an in-copy and an out-copy.

    For a target u the in-copy keeps id u and the out-copy is a fresh id;
    a sentinel-capacity bridge arc joins them.  ``mark_deleted`` removes a
    bridge in O(1); ``network()`` materializes the current network.
    """

    base: FlowNetwork
    out_id: dict[int, int]
    bridge_arc: dict[int, int]  # target -> arc index of its bridge in base
    deleted: set[int] = field(default_factory=set)

    @property
    def network(self) -> FlowNetwork:
        return self.network_view()

    def in_out(self, u: int) -> tuple[int, int]:
        return u, self.out_id[u]

    def mark_deleted(self, u: int) -> None:
        if u not in self.bridge_arc:
            raise ValueError(f"{u} was not split")
        self.deleted.add(u)

    def network_view(self) -> FlowNetwork:
        if not self.deleted:
            return self.base
        drop = {self.bridge_arc[u] for u in self.deleted}
        arcs = [a for i, a in enumerate(self.base.arcs) if i not in drop]
        return FlowNetwork(self.base.n, arcs, self.base.source, self.base.sink)


def split_in_out(net: FlowNetwork, targets: set[int]) -> InOutSplit:
    """Split each target vertex u into u_in (all in-arcs) and u_out (all out-arcs)."""
    for u in targets:
        if u in (net.source, net.sink):
            raise ValueError("cannot split source or sink")
        if not 0 <= u < net.n:
            raise ValueError(f"target {u} out of range")
    sentinel = infinite_capacity(net)
    out_id = {}
    next_id = net.n
    for u in sorted(targets):
        out_id[u] = next_id
        next_id += 1
    arcs = [(out_id.get(u, u), v, c) for u, v, c in net.arcs]
    bridge_arc = {}
    for u in sorted(targets):
        bridge_arc[u] = len(arcs)
        arcs.append((u, out_id[u], sentinel))
    return InOutSplit(FlowNetwork(next_id, arcs, net.source, net.sink), out_id, bridge_arc)
