"""Graph and preflow data model shared by every solver.

All arithmetic is exact integer arithmetic.  A ``FlowNetwork`` is immutable;
a ``ResidualState`` is a single-owner mutable preflow on top of one.

Conventions used throughout the package:

* Parallel arcs are kept distinct in ``FlowNetwork``, but residual
  bookkeeping between a vertex pair is merged per direction: the state
  stores one capacity and one flow value for each directed pair that
  carries at least one arc.
* Flow is canonicalized per direction.  Pushing along the residual
  direction (u, v) first cancels flow stored on (v, u) and only then
  increases the flow on (u, v), so at most one direction of a pair holds
  positive flow at any time.
* Excess is tracked for every vertex.  Only the source may go negative;
  verifiers enforce non-negativity away from source and sink.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple

VertexId = int


class Arc(NamedTuple):
    tail: int
    head: int
    capacity: int


class FlowNetwork:
    """Immutable directed capacitated graph with a distinguished source and sink."""

    __slots__ = ("n", "arcs", "source", "sink", "U")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int, int]], source: int, sink: int):
        arcs = tuple(Arc(*a) for a in arcs)
        if not (0 <= source < n and 0 <= sink < n):
            raise ValueError("source/sink out of range")
        if source == sink:
            raise ValueError("source and sink must be distinct")
        for i, (u, v, c) in enumerate(arcs):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc {i}: vertex id out of range")
            if u == v:
                raise ValueError(f"arc {i}: self-loop not allowed")
            if c < 0:
                raise ValueError(f"arc {i}: negative capacity")
        self.n = n
        self.arcs = arcs
        self.source = source
        self.sink = sink
        self.U = max((a.capacity for a in arcs), default=0)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def degrees(self) -> tuple[list[int], list[int]]:
        """Return (out_degree, in_degree) lists counting parallel arcs."""
        outd = [0] * self.n
        ind = [0] * self.n
        for u, v, _ in self.arcs:
            outd[u] += 1
            ind[v] += 1
        return outd, ind

    def max_degree(self) -> int:
        outd, ind = self.degrees()
        return max(max(outd, default=0), max(ind, default=0))

    def __eq__(self, other) -> bool:
        return (isinstance(other, FlowNetwork)
                and self.n == other.n
                and self.arcs == other.arcs
                and self.source == other.source
                and self.sink == other.sink)

    def __hash__(self):
        return hash((self.n, self.arcs, self.source, self.sink))

    def __repr__(self) -> str:
        return f"FlowNetwork(n={self.n}, m={self.m}, s={self.source}, t={self.sink}, U={self.U})"


class ArcClass(enum.Enum):
    """Capacity class of a directed pair for a given excess dominator."""

    FAVORABLE = "favorable"
    LARGE = "large"
    ABUNDANT = "abundant"
    SMALL = "small"


def classify_arc(gamma: int, r_uv: int, delta: int) -> ArcClass:
    """Classify a directed pair by its two-way capacity ``gamma`` and residual ``r_uv``.

    Thresholds are compared exactly (4*gamma vs delta and so on), never with
    integer division.  The classification is total and mutually exclusive:
    abundant wins first, then favorable, then large, else small.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if r_uv < 0 or gamma < r_uv:
        raise ValueError("need gamma >= r_uv >= 0")
    if r_uv > delta:
        return ArcClass.ABUNDANT
    if 4 * gamma > delta and 2 * gamma <= delta:
        return ArcClass.FAVORABLE
    if 4 * gamma >= delta and gamma <= 2 * delta and r_uv <= delta:
        return ArcClass.LARGE
    return ArcClass.SMALL


class ResidualState:
    """Mutable preflow over a ``FlowNetwork``.

    Stores merged per-direction capacities and flows plus per-vertex excess.
    Residual capacities are implied:

        r(u, v) = cap(u, v) - flow(u, v) + flow(v, u)

    which matches the usual three-case definition and extends it additively
    when both (u, v) and (v, u) are original arcs.
    """

    __slots__ = ("net", "cap", "flow", "excess", "neighbors")

    def __init__(self, net: FlowNetwork, cap, flow, excess, neighbors):
        self.net = net
        self.cap = cap
        self.flow = flow
        self.excess = excess
        self.neighbors = neighbors

    @classmethod
    def zero(cls, net: FlowNetwork) -> "ResidualState":
        """Zero preflow on ``net``."""
        cap: dict[tuple[int, int], int] = {}
        adj: list[set[int]] = [set() for _ in range(net.n)]
        for u, v, c in net.arcs:
            cap[(u, v)] = cap.get((u, v), 0) + c
            adj[u].add(v)
            adj[v].add(u)
        neighbors = [sorted(s) for s in adj]
        return cls(net, cap, {}, [0] * net.n, neighbors)

    def copy(self) -> "ResidualState":
        return ResidualState(self.net, self.cap, dict(self.flow), list(self.excess), self.neighbors)

    def _check_ids(self, u: int, v: int) -> None:
        n = self.net.n
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError("vertex id out of range")
        if u == v:
            raise ValueError("u and v must differ")

    def residual(self, u: int, v: int) -> int:
        """Residual capacity r(u, v); 0 when the pair carries no arc."""
        self._check_ids(u, v)
        return (self.cap.get((u, v), 0) - self.flow.get((u, v), 0)
                + self.flow.get((v, u), 0))

    def gamma(self, u: int, v: int) -> int:
        """Compaction capacity r(u, v) + r(v, u); symmetric and push-invariant."""
        self._check_ids(u, v)
        return self.cap.get((u, v), 0) + self.cap.get((v, u), 0)

    def push_flow(self, u: int, v: int, delta: int, *, adjust_excess: bool = True) -> None:
        """Move ``delta`` units from u to v along the residual pair direction.

        Cancels reverse flow first.  ``adjust_excess=False`` is used when
        replaying pseudoarc flows whose endpoint excesses were already
        settled at push time; interior vertices net to zero arc by arc.
        """
        if delta < 0:
            raise ValueError("negative push")
        if delta == 0:
            return
        if delta > self.residual(u, v):
            raise ValueError(f"push of {delta} exceeds residual {self.residual(u, v)} on ({u},{v})")
        amount = delta
        rev = self.flow.get((v, u), 0)
        if rev:
            back = min(delta, rev)
            if back == rev:
                del self.flow[(v, u)]
            else:
                self.flow[(v, u)] = rev - back
            delta -= back
        if delta:
            self.flow[(u, v)] = self.flow.get((u, v), 0) + delta
        if adjust_excess:
            self.excess[u] -= amount
            self.excess[v] += amount

    def arc_flows(self) -> list[int]:
        """Distribute merged directional flow over the original arcs, in arc order."""
        remaining = dict(self.flow)
        out = []
        for u, v, c in self.net.arcs:
            take = min(c, remaining.get((u, v), 0))
            if take:
                remaining[(u, v)] -= take
            out.append(take)
        return out


# Verification ---------------------------------------------------------------

@dataclass
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _recomputed_excess(state: ResidualState) -> list[int]:
    e = [0] * state.net.n
    for (u, v), f in state.flow.items():
        e[u] -= f
        e[v] += f
    return e


def verify_preflow(net: FlowNetwork, state: ResidualState) -> Verdict:
    """Accept iff capacity constraints hold, stored excess matches the flow
    exactly, and no vertex besides source/sink has negative excess."""
    for key in sorted(state.flow):
        f = state.flow[key]
        c = state.cap.get(key, 0)
        if f < 0:
            return Verdict(False, f"negative flow {f} on {key}")
        if f > c:
            return Verdict(False, f"capacity violated on {key}: flow {f} > cap {c}")
    recomputed = _recomputed_excess(state)
    for u in range(net.n):
        if state.excess[u] != recomputed[u]:
            return Verdict(False,
                           f"excess bookkeeping broken at {u}: stored {state.excess[u]},"
                           f" recomputed {recomputed[u]}")
    for u in range(net.n):
        if u in (net.source, net.sink):
            continue
        if state.excess[u] < 0:
            return Verdict(False, f"negative excess {state.excess[u]} at {u}")
    return Verdict(True)


def verify_flow(net: FlowNetwork, state: ResidualState) -> tuple[Verdict, int]:
    """Accept iff ``verify_preflow`` accepts and conservation holds everywhere.

    Returns the flow value, the net outflow of the source, which must equal
    the net inflow of the sink.
    """
    verdict = verify_preflow(net, state)
    if not verdict:
        return verdict, 0
    for u in range(net.n):
        if u in (net.source, net.sink):
            continue
        if state.excess[u] != 0:
            return Verdict(False, f"conservation violated at {u}: excess {state.excess[u]}"), 0
    out_s = sum(f for (u, _), f in state.flow.items() if u == net.source)
    in_s = sum(f for (_, v), f in state.flow.items() if v == net.source)
    value = out_s - in_s
    in_t = sum(f for (_, v), f in state.flow.items() if v == net.sink)
    out_t = sum(f for (u, _), f in state.flow.items() if u == net.sink)
    if value != in_t - out_t:
        return Verdict(False, "source outflow does not match sink inflow"), 0
    return Verdict(True), value


def residual_capacity(state: ResidualState, u: int, v: int) -> int:
    return state.residual(u, v)


def compaction_capacity(state: ResidualState, u: int, v: int) -> int:
    return state.gamma(u, v)
