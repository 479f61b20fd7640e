"""Oracle solvers and certificates used for differential testing.

``edmonds_karp`` (shortest augmenting paths) is the designated ground truth;
``goldberg_tarjan`` (generic push-relabel) and ``ahuja_orlin`` (excess
scaling) triangulate it.  ``min_cut_check`` and ``decompose_flow`` certify
results independently of how they were produced.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import FlowNetwork, ResidualState, verify_flow, verify_preflow


@dataclass
class CutCertificate:
    S: set[int]
    capacity: int


@dataclass
class PathFlow:
    path: list[int]
    amount: int

    @property
    def is_cycle(self) -> bool:
        return self.path[0] == self.path[-1]


class NotMaximalError(ValueError):
    pass


def edmonds_karp(net: FlowNetwork) -> tuple[int, ResidualState]:
    """Max flow by shortest augmenting paths; exact, the trusted oracle."""
    state = ResidualState.zero(net)
    s, t = net.source, net.sink
    value = 0
    parent = [-1] * net.n
    while True:
        for i in range(net.n):
            parent[i] = -1
        parent[s] = s
        q = deque([s])
        reached = False
        while q:
            u = q.popleft()
            if u == t:
                reached = True
                break
            for v in state.neighbors[u]:
                if parent[v] < 0 and state.residual(u, v) > 0:
                    parent[v] = u
                    q.append(v)
        if not reached:
            break
        bottleneck = None
        v = t
        while v != s:
            u = parent[v]
            r = state.residual(u, v)
            bottleneck = r if bottleneck is None else min(bottleneck, r)
            v = u
        v = t
        while v != s:
            u = parent[v]
            state.push_flow(u, v, bottleneck)
            v = u
        value += bottleneck
    return value, state


def goldberg_tarjan(net: FlowNetwork, trace: list | None = None) -> tuple[int, ResidualState]:
    """Generic push-relabel (FIFO active selection, classic admissibility).

    With a ``trace`` list, appends ('push', u, v, delta, saturating, d_u, d_v,
    e_u_before, e_v_before) and ('relabel', u, old_d, new_d) events, which the
    tests use to watch potential-function behavior.
    """
    state = ResidualState.zero(net)
    n, s, t = net.n, net.source, net.sink
    d = [0] * n
    d[s] = n
    for v in state.neighbors[s]:
        c = state.residual(s, v)
        if c > 0:
            state.push_flow(s, v, c)
    active = deque(u for u in range(n) if u not in (s, t) and state.excess[u] > 0)
    queued = [False] * n
    for u in active:
        queued[u] = True
    while active:
        u = active.popleft()
        queued[u] = False
        while state.excess[u] > 0:
            pushed = False
            min_d = None
            for v in state.neighbors[u]:
                r = state.residual(u, v)
                if r <= 0:
                    continue
                if d[u] == d[v] + 1:
                    delta = min(state.excess[u], r)
                    if trace is not None:
                        trace.append(("push", u, v, delta, delta == r, d[u], d[v],
                                      state.excess[u], state.excess[v]))
                    state.push_flow(u, v, delta)
                    if v not in (s, t) and not queued[v]:
                        active.append(v)
                        queued[v] = True
                    pushed = True
                    if state.excess[u] == 0:
                        break
                else:
                    min_d = d[v] if min_d is None else min(min_d, d[v])
            if state.excess[u] == 0:
                break
            if not pushed:
                if min_d is None:
                    raise RuntimeError("overflowing vertex with no residual out-arc")
                if trace is not None:
                    trace.append(("relabel", u, d[u], min_d + 1))
                d[u] = min_d + 1
    verdict, value = verify_flow(net, state)
    assert verdict, verdict.reason
    return value, state


def ahuja_orlin(net: FlowNetwork) -> tuple[int, ResidualState, int]:
    """Excess scaling push-relabel; returns (value, state, phase count)."""
    state = ResidualState.zero(net)
    n, s, t = net.n, net.source, net.sink
    d = [0] * n
    d[s] = n
    for v in state.neighbors[s]:
        c = state.residual(s, v)
        if c > 0:
            state.push_flow(s, v, c)
    delta = 1
    while delta < max(net.U, 1):
        delta *= 2
    phases = 0
    while delta >= 1:
        phases += 1
        while True:
            # lowest-labeled vertex among those with 2e > delta
            u = -1
            for w in range(n):
                if w in (s, t) or 2 * state.excess[w] <= delta:
                    continue
                if u < 0 or d[w] < d[u]:
                    u = w
            if u < 0:
                break
            pushed = False
            min_d = None
            for v in state.neighbors[u]:
                r = state.residual(u, v)
                if r <= 0:
                    continue
                if d[u] == d[v] + 1:
                    room = delta - state.excess[v] if v not in (s, t) else r
                    amount = min(state.excess[u], r, room)
                    if amount > 0:
                        state.push_flow(u, v, amount)
                        pushed = True
                        break
                else:
                    min_d = d[v] if min_d is None else min(min_d, d[v])
            if not pushed:
                others = [d[v] for v in state.neighbors[u] if state.residual(u, v) > 0]
                if not others:
                    raise RuntimeError("overflowing vertex with no residual out-arc")
                d[u] = min(others) + 1
        delta //= 2
    verdict, value = verify_flow(net, state)
    assert verdict, verdict.reason
    return value, state, phases


def min_cut_check(net: FlowNetwork, state: ResidualState) -> CutCertificate:
    """Certify maximality: S = residual reachability from s, t must not be in S,
    and the cut capacity must equal the flow value."""
    verdict, value = verify_flow(net, state)
    if not verdict:
        raise NotMaximalError(f"not a feasible flow: {verdict.reason}")
    s, t = net.source, net.sink
    seen = {s}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in state.neighbors[u]:
            if v not in seen and state.residual(u, v) > 0:
                seen.add(v)
                q.append(v)
    if t in seen:
        raise NotMaximalError("sink reachable in residual network; flow not maximal")
    capacity = sum(c for u, v, c in net.arcs if u in seen and v not in seen)
    if capacity != value:
        raise NotMaximalError(f"cut capacity {capacity} != flow value {value}")
    return CutCertificate(seen, capacity)


def decompose_flow(net: FlowNetwork, state: ResidualState) -> tuple[list[PathFlow], list[PathFlow]]:
    """Decompose a feasible flow (or preflow) into s-rooted paths and cycles.

    Paths start at s and end at t or at a vertex holding excess; cycles are
    returned separately.  Subtracting everything leaves zero flow, and at
    most m paths/cycles are produced (each zeroes an arc or exhausts an
    excess).
    """
    verdict = verify_preflow(net, state)
    if not verdict:
        raise ValueError(f"not a feasible preflow: {verdict.reason}")
    s = net.source
    flow = {k: v for k, v in state.flow.items() if v > 0}
    out: dict[int, list[int]] = {}
    for (u, v) in sorted(flow):
        out.setdefault(u, []).append(v)
    # balance > 0 consumes path endings (t and excess vertices), < 0 emits (s)
    balance = [0] * net.n
    for (u, v), f in flow.items():
        balance[u] -= f
        balance[v] += f

    def _take(seq: list[int], amount: int) -> None:
        for a, b in zip(seq, seq[1:]):
            left = flow[(a, b)] - amount
            if left:
                flow[(a, b)] = left
            else:
                del flow[(a, b)]
                out[a].remove(b)

    paths: list[PathFlow] = []
    cycles: list[PathFlow] = []

    # Phase 1: path extraction from s.  A walk never dead-ends: any vertex
    # with remaining inflow and non-positive balance has remaining outflow.
    while balance[s] < 0:
        path = [s]
        seen = {s: 0}
        cur = s
        cyc = None
        while True:
            nxt = out[cur][0]
            if nxt in seen:
                cyc = path[seen[nxt]:] + [nxt]
                break
            path.append(nxt)
            seen[nxt] = len(path) - 1
            cur = nxt
            if balance[cur] > 0:
                break
        if cyc is not None:
            amount = min(flow[(a, b)] for a, b in zip(cyc, cyc[1:]))
            _take(cyc, amount)
            cycles.append(PathFlow(cyc, amount))
            continue
        end = path[-1]
        amount = min(-balance[s], balance[end],
                     min(flow[(a, b)] for a, b in zip(path, path[1:])))
        _take(path, amount)
        balance[s] += amount
        balance[end] -= amount
        paths.append(PathFlow(path, amount))
    # Phase 2: the remainder is balanced at every vertex, i.e. pure cycles.
    while flow:
        u, v = min(flow)
        path = [u, v]
        seen = {u: 0, v: 1}
        cur = v
        while True:
            cur = out[cur][0]
            if cur in seen:
                cyc = path[seen[cur]:] + [cur]
                amount = min(flow[(a, b)] for a, b in zip(cyc, cyc[1:]))
                _take(cyc, amount)
                cycles.append(PathFlow(cyc, amount))
                break
            seen[cur] = len(path)
            path.append(cur)
    if len(paths) > net.m + net.n:
        raise AssertionError("decomposition produced too many pieces")
    return paths, cycles
