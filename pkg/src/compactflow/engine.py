"""Scaling push-relabel driver over per-phase compact networks.

Each phase: build the compact network for the current excess dominator,
relabel it globally, discharge active vertices in minimum-label order, then
replay pseudoarc flows back onto the residual network and relabel the full
graph.  The dominator at least halves between phases and the run ends when
every internal excess is zero.

Labels come in two parts, d = d_h + d_ell.  d_h moves only by relabels and
global relabels; d_ell throttles low-capacity nonsaturating pushes: while an
active vertex sits at or below half the dominator, each d_ell value buys
exactly one such push, until d_ell tops out and discharge runs free.
Admissibility is the relaxed d(u) > d(v).

The bounds the analysis promises are enforced as runtime invariants and
raise ``InvariantViolation`` when breached: label ceilings (d_h < 2n,
d_ell <= 4n-1), relabel budget 6n^2, the excess dominator (C2), per-phase
push budgets, full discharge of phase-start actives, compaction size, and
the phase-count ceiling.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import ArcClass, FlowNetwork, ResidualState, verify_flow, verify_preflow
from .compact import CompactNetwork, build_compact, restore_all_flows
from .transform import to_bounded_degree, map_flow_back

UNREACHABLE = 10 ** 9  # label sentinel; only excess-free vertices may carry it


class InvariantViolation(AssertionError):
    """An analysis bound failed at runtime; names the broken invariant."""


@dataclass
class DualLabels:
    d_h: list[int]
    d_ell: list[int]

    @classmethod
    def fresh(cls, n: int) -> "DualLabels":
        return cls([0] * n, [0] * n)

    def d(self, u: int) -> int:
        return self.d_h[u] + self.d_ell[u]


@dataclass
class PhaseStats:
    delta: int
    vc_size: int = 0
    va_size: int = 0
    sat_pushes: int = 0
    hi_pushes: int = 0
    lo_pushes: int = 0
    relabels: int = 0
    dl_increments: int = 0
    pseudoarcs: int = 0
    rescues: int = 0
    dyntree_ops: int = 0
    dyntree_rotations: int = 0
    phi_g_start: int = 0
    phi_g_end: int = 0
    phi_num_start: int = 0
    phi_num_end: int = 0


@dataclass
class RunStats:
    n: int
    m: int
    delta0: int = 0
    phases: list[PhaseStats] = field(default_factory=list)
    relabels: int = 0
    sat_pushes: int = 0
    hi_pushes: int = 0
    lo_pushes: int = 0
    sum_vc: int = 0
    dyntree_ops: int = 0
    dyntree_rotations: int = 0
    reduced: bool = False

    @property
    def phase_count(self) -> int:
        return len(self.phases)


@dataclass
class PushOutcome:
    amount: int
    saturating: bool
    high_capacity: bool


@dataclass
class MaxFlowResult:
    value: int
    state: ResidualState
    stats: RunStats


def _pow2_at_least(x: int) -> int:
    return 1 << (x - 1).bit_length() if x > 1 else 1


def global_relabel(n: int, source: int, sink: int, residual_in) -> DualLabels:
    """Labels from residual BFS: d_h(u) = min(dist(u->s) + n, dist(u->t)).

    ``residual_in(v)`` yields the vertices u with a positive residual arc
    (u, v); both distances-to-a-target searches traverse it.  Unreachable
    vertices get a large sentinel; source and sink labels are pinned to n
    and 0.  d_ell is zero everywhere.
    """
    def dist_to(target: int) -> list[int]:
        dist = [UNREACHABLE] * n
        dist[target] = 0
        q = deque([target])
        while q:
            v = q.popleft()
            for u in residual_in(v):
                if dist[u] == UNREACHABLE:
                    dist[u] = dist[v] + 1
                    q.append(u)
        return dist

    d_t = dist_to(sink)
    d_s = dist_to(source)
    labels = DualLabels.fresh(n)
    for u in range(n):
        labels.d_h[u] = min(d_s[u] + n, d_t[u], UNREACHABLE)
    labels.d_h[source] = n
    labels.d_h[sink] = 0
    return labels


class ScalingState:
    """All mutable state of one compact-solver run."""

    def __init__(self, net: FlowNetwork):
        self.net = net
        self.res = ResidualState.zero(net)
        self.labels = DualLabels.fresh(net.n)
        self.labels.d_h[net.source] = net.n
        self.delta = 0
        self.stats = RunStats(net.n, net.m)
        self._fav_streak: dict[tuple[int, int], int] = {}
        # per-phase context
        self.compact: CompactNetwork | None = None
        self._phase: PhaseStats | None = None
        self._ports: dict[int, list[tuple]] = {}
        self._nonsat_spent: dict[int, bool] = {}
        self._lo_count: dict[int, int] = {}
        self._dischargeable: set[int] = set()

    # invariant helpers -------------------------------------------------------

    def _fail(self, what: str) -> None:
        raise InvariantViolation(what)

    def internal(self, u: int) -> bool:
        return u not in (self.net.source, self.net.sink)

    def max_internal_excess(self) -> int:
        return max((self.res.excess[u] for u in range(self.net.n) if self.internal(u)),
                   default=0)

    def phi_g(self) -> int:
        return sum(self.labels.d(u) for u in range(self.net.n)
                   if self.internal(u) and self.res.excess[u] > 0)

    def phi_numerator(self) -> int:
        assert self.compact is not None
        return sum(self.labels.d(u) * self.res.excess[u]
                   for u in self.compact.members if self.internal(u))

    # compact ports ------------------------------------------------------------

    def _build_ports(self) -> None:
        compact = self.compact
        ports: dict[int, list[tuple]] = {}
        for u, vs in compact.a1_pairs.items():
            ports.setdefault(u, []).extend(("pair", v) for v in vs)
        for u, idxs in compact.by_tail.items():
            ports.setdefault(u, []).extend(("fw", i) for i in idxs)
        for u, idxs in compact.by_head.items():
            ports.setdefault(u, []).extend(("bw", i) for i in idxs)
        self._ports = ports

    def port_target(self, u: int, port: tuple) -> int:
        kind, x = port
        if kind == "pair":
            return x
        arc = self.compact.pseudoarcs[x]
        return arc.head if kind == "fw" else arc.tail

    def port_residual(self, u: int, port: tuple) -> int:
        kind, x = port
        if kind == "pair":
            return self.res.residual(u, x) - self.compact.consumed.get((u, x), 0)
        arc = self.compact.pseudoarcs[x]
        return arc.residual_fw() if kind == "fw" else arc.residual_bw()

    def _rescue_credit(self, u: int) -> int:
        """Unused capacity of on-demand rescue arcs out of u.  While positive,
        u's ports into the source are suppressed: the excess must try the
        rescued route before any of it may be sent back."""
        total = 0
        for i in self.compact.by_tail.get(u, ()):
            p = self.compact.pseudoarcs[i]
            if not p.in_log:
                total += p.capacity - p.flow
        return total

    def _admissible(self, u: int) -> list[tuple[int, int, int, tuple, int]]:
        """Admissible ports of u with positive residual, increasing d_h."""
        labels = self.labels
        du = labels.d(u)
        out = []
        rank = {"pair": 0, "fw": 1, "bw": 2}
        skip_source = self._rescue_credit(u) > 0
        for port in self._ports.get(u, ()):
            v = self.port_target(u, port)
            if skip_source and v == self.net.source:
                continue
            if du <= labels.d(v):
                continue
            r = self.port_residual(u, port)
            if r <= 0:
                continue
            out.append((labels.d_h[v], v, rank[port[0]], port, r))
        out.sort(key=lambda item: item[:3] + (item[3][1],))
        return out

    def _residual_ports(self, u: int, skip_source: bool = False):
        for port in self._ports.get(u, ()):
            if skip_source and self.port_target(u, port) == self.net.source:
                continue
            r = self.port_residual(u, port)
            if r > 0:
                yield port, r

    # operations ---------------------------------------------------------------

    def push(self, u: int, v: int) -> PushOutcome:
        """Push along the pair arc (u, v) of the compact network."""
        return self._push_port(u, ("pair", v))

    def _push_port(self, u: int, port: tuple) -> PushOutcome:
        res = self.res
        labels = self.labels
        v = self.port_target(u, port)
        r = self.port_residual(u, port)
        if res.excess[u] <= 0:
            raise ValueError("push from a vertex without excess")
        if labels.d(u) <= labels.d(v):
            raise ValueError("push on an inadmissible arc")
        if r <= 0:
            raise ValueError("push on a saturated arc")
        delta = min(res.excess[u], r)
        if self.internal(v):
            delta = min(delta, self.delta - res.excess[v])
        if delta <= 0:
            raise ValueError("push target already holds a full dominator of excess")
        kind = port[0]
        if kind == "pair":
            res.push_flow(u, v, delta)
        else:
            arc = self.compact.pseudoarcs[port[1]]
            arc.flow += delta if kind == "fw" else -delta
            res.excess[u] -= delta
            res.excess[v] += delta
        if self.internal(v) and res.excess[v] > self.delta:
            self._fail("excess dominator exceeded after push")
        outcome = PushOutcome(delta, delta == r, 2 * delta > self.delta)
        self._account_push(u, v, outcome)
        return outcome

    def _account_push(self, u: int, v: int, outcome: PushOutcome) -> None:
        phase = self._phase
        if phase is None:
            return
        n = self.net.n
        if outcome.saturating:
            phase.sat_pushes += 1
        elif outcome.high_capacity:
            phase.hi_pushes += 1
            if phase.hi_pushes > 16 * phase.vc_size * n:
                self._fail("high-capacity nonsaturating push budget exceeded")
        else:
            phase.lo_pushes += 1
            if u in self.compact.v_active:
                c = self._lo_count.get(u, 0) + 1
                self._lo_count[u] = c
                if c > (4 * n - 1) + 2 * n:
                    self._fail("low-capacity nonsaturating push budget exceeded")
        if self.internal(v) and v in self.compact.members:
            ev = self.res.excess[v]
            if (v in self.compact.v_active and ev > 0) or 2 * ev > self.delta:
                self._dischargeable.add(v)

    def relabel(self, u: int) -> None:
        """Raise d_h(u) above its lowest-labelled residual neighbor, with the
        d_ell catch-up jump when the combined label would still not clear it."""
        labels = self.labels
        n = self.net.n
        skip_source = self._rescue_credit(u) > 0
        best = None
        for port, _r in self._residual_ports(u, skip_source):
            v = self.port_target(u, port)
            if best is None or (labels.d_h[v], v) < best:
                best = (labels.d_h[v], v)
        if best is None and self._try_rescue(u):
            for port, _r in self._residual_ports(u, True):
                v = self.port_target(u, port)
                if best is None or (labels.d_h[v], v) < best:
                    best = (labels.d_h[v], v)
        if best is None:
            self._fail("stranded excess: no residual arc leaves the vertex in the compact network")
        dh_min, vstar = best
        if dh_min >= UNREACHABLE:
            self._fail("relabel into unreachable territory")
        labels.d_h[u] = dh_min + 1
        if labels.d_h[u] >= 2 * n:
            self._fail("d_h label reached 2n")
        if labels.d(u) <= labels.d(vstar):
            labels.d_ell[u] = labels.d_ell[vstar]
            if labels.d_ell[u] > 4 * n - 1:
                self._fail("d_ell label exceeded 4n-1")
        phase = self._phase
        if phase is not None:
            phase.relabels += 1
        self.stats.relabels += 1
        if self.stats.relabels > 6 * n * n:
            self._fail("relabel budget 6n^2 exceeded")

    def _free_capacity(self, a: int, b: int) -> int:
        """Residual capacity of (a, b) not yet promised to any pseudoarc flow:
        plain availability plus reserved-but-unused pseudoarc capacity."""
        compact = self.compact
        base = self.res.residual(a, b) - compact.consumed.get((a, b), 0)
        for i in compact.arc_users.get((a, b), ()):
            p = compact.pseudoarcs[i]
            base += p.capacity - p.flow
        return base

    def _try_rescue(self, u: int) -> bool:
        """Build an on-demand pseudoarc out of u over unpromised capacity.

        Construction partitions capacity among pseudoarcs up front, so a
        vertex's only remaining route may sit reserved-but-unused inside
        someone else's pseudoarc.  Excess must never return to the source
        while such a route exists; this reclaims the reservations along one
        such route and turns it into a port of u.
        """
        compact = self.compact
        need = self.res.excess[u]
        if need <= 0:
            return False
        parent = {u: None}
        queue = deque([u])
        hits = []
        while queue:
            x = queue.popleft()
            for y in self.res.neighbors[x]:
                if y in parent or self._free_capacity(x, y) <= 0:
                    continue
                parent[y] = x
                if y in compact.members:
                    hits.append(y)  # heads stop a route; only interiors are walked
                else:
                    queue.append(y)
        if not hits:
            return False
        head = min(hits, key=lambda y: (y == self.net.source, self.labels.d_h[y], y))
        path = []
        y = head
        while y != u:
            x = parent[y]
            path.append((x, y))
            y = x
        path.reverse()
        alpha = min(min(self._free_capacity(a, b) for a, b in path), need)
        for a, b in path:
            avail = self.res.residual(a, b) - compact.consumed.get((a, b), 0)
            if avail >= alpha:
                continue
            for i in compact.arc_users.get((a, b), ()):
                p = compact.pseudoarcs[i]
                take = min(alpha - avail, p.capacity - p.flow)
                if take > 0:
                    compact.release(i, take)
                    avail += take
                if avail >= alpha:
                    break
            if avail < alpha:
                self._fail("rescue reservation accounting failed")
        kind = ArcClass.ABUNDANT if alpha > self.delta else ArcClass.SMALL
        arc = _rescue_arc(u, head, alpha, kind, path)
        index = len(compact.pseudoarcs)
        compact.pseudoarcs.append(arc)
        compact.register(index)
        for a, b in path:
            compact.consumed[(a, b)] = compact.consumed.get((a, b), 0) + alpha
        self._ports.setdefault(u, []).append(("fw", index))
        self._ports.setdefault(head, []).append(("bw", index))
        if self._phase is not None:
            self._phase.rescues += 1
        return True

    def discharge(self, u: int) -> str:
        """Discharge u per its phase role; 'done' or 'suspended' (target full)."""
        res = self.res
        labels = self.labels
        n = self.net.n
        in_va = u in self.compact.v_active
        cap = 4 * n - 1
        while True:
            e_u = res.excess[u]
            if in_va:
                if e_u == 0:
                    return "done"
            elif 2 * e_u <= self.delta:
                return "done"
            throttled = in_va and 2 * e_u <= self.delta and labels.d_ell[u] < cap
            chosen = None
            saw_full = False
            for _dh, v, _rk, port, r in self._admissible(u):
                delta = min(e_u, r)
                if self.internal(v):
                    delta = min(delta, self.delta - res.excess[v])
                if delta <= 0:
                    saw_full = True
                    continue
                chosen = (port, r, delta)
                break
            if chosen is None:
                if saw_full:
                    return "suspended"
                self.relabel(u)
                continue
            port, r, delta = chosen
            if (self.port_target(u, port) == self.net.source
                    and self._try_rescue(u)):
                continue  # never hand excess back while a forward route exists
            if throttled and delta < r:
                # a nonsaturating push here is low-capacity; it needs this
                # d_ell value's credit
                if self._nonsat_spent.get(u, False):
                    labels.d_ell[u] += 1
                    if labels.d_ell[u] > cap:
                        self._fail("d_ell label exceeded 4n-1")
                    self._nonsat_spent[u] = False
                    self._phase.dl_increments += 1
                    continue
                self._nonsat_spent[u] = True
            self._push_port(u, port)

    # phases --------------------------------------------------------------------

    def _compact_relabel(self) -> None:
        compact = self.compact
        into: dict[int, list[int]] = {u: [] for u in compact.members}
        for u in compact.members:
            for port, _r in self._residual_ports(u):
                v = self.port_target(u, port)
                into[v].append(u)

        def residual_in(v: int):
            return into.get(v, ())

        fresh = global_relabel(self.net.n, self.net.source, self.net.sink, residual_in)
        for u in compact.members:
            self.labels.d_h[u] = fresh.d_h[u]
            self.labels.d_ell[u] = 0
            if u in compact.v_active and self.labels.d_h[u] >= UNREACHABLE:
                self._fail("active vertex cannot reach source or sink in the compact network")

    def _full_relabel(self) -> None:
        res = self.res

        def residual_in(v: int):
            return [u for u in res.neighbors[v] if res.residual(u, v) > 0]

        self.labels = global_relabel(self.net.n, self.net.source, self.net.sink, residual_in)
        self._check_validity()

    def _check_validity(self) -> None:
        """d_h(u) <= d_h(v) + 1 across residual arcs (source arcs exempt: its
        label is pinned)."""
        res = self.res
        d_h = self.labels.d_h
        for u in range(self.net.n):
            if u == self.net.source or d_h[u] >= UNREACHABLE:
                continue
            for v in res.neighbors[u]:
                if res.residual(u, v) > 0 and d_h[u] > d_h[v] + 1:
                    self._fail(f"validity condition broken on residual arc ({u},{v})")

    def run_phase(self) -> PhaseStats:
        n = self.net.n
        delta = self.delta
        if delta < 1:
            raise ValueError("run_phase needs a positive excess dominator")
        if self.max_internal_excess() > delta:
            self._fail("excess dominator invariant broken at phase start")
        compact = build_compact(self.res, delta, self.labels)
        self.compact = compact
        phase = PhaseStats(delta=delta, vc_size=len(compact.members),
                           va_size=len(compact.v_active),
                           pseudoarcs=len(compact.pseudoarcs))
        self._phase = phase
        self._build_ports()
        self._track_favorables(compact)
        self._compact_relabel()
        self._nonsat_spent = {}
        self._lo_count = {}
        phase.phi_g_start = self.phi_g()
        phase.phi_num_start = self.phi_numerator()
        self._dischargeable = {u for u in compact.v_active if self.res.excess[u] > 0}
        while self._dischargeable:
            u = min(self._dischargeable, key=lambda w: (self.labels.d(w), w))
            result = self.discharge(u)
            if result == "done":
                self._dischargeable.discard(u)
            else:
                unblockable = any(w != u and (self.labels.d(w), w) < (self.labels.d(u), u)
                                  for w in self._dischargeable)
                if not unblockable:
                    self._fail("discharge suspended with no lower-labelled vertex to unblock it")
        restore_all_flows(compact, self.res)
        for u in compact.v_active:
            if self.res.excess[u] != 0:
                self._fail("phase-start active vertex not fully discharged")
        for u in range(n):
            if self.internal(u) and 2 * self.res.excess[u] > delta:
                self._fail("vertex above half the dominator at phase end")
        verdict = verify_preflow(self.net, self.res)
        if not verdict:
            self._fail(f"preflow infeasible after flow restoration: {verdict.reason}")
        self._full_relabel()
        phase.phi_g_end = self.phi_g()
        phase.phi_num_end = self.phi_numerator()
        phase.dyntree_ops = compact.dyntree_ops
        phase.dyntree_rotations = compact.dyntree_rotations
        stats = self.stats
        stats.phases.append(phase)
        stats.sat_pushes += phase.sat_pushes
        stats.hi_pushes += phase.hi_pushes
        stats.lo_pushes += phase.lo_pushes
        stats.sum_vc += phase.vc_size
        stats.dyntree_ops += phase.dyntree_ops
        stats.dyntree_rotations += phase.dyntree_rotations
        if stats.sat_pushes > 6 * self.net.m * n:
            self._fail("saturating push budget 6mn exceeded")
        if stats.sum_vc > 20 * max(self.net.m, 1):
            self._fail("compact vertex total exceeded 20m")
        self._phase = None
        self.compact = None
        return phase

    def _track_favorables(self, compact: CompactNetwork) -> None:
        current = {(u, v) for u, v, cls in compact.a1 if cls is ArcClass.FAVORABLE}
        streak = self._fav_streak
        for arc in current:
            streak[arc] = streak.get(arc, 0) + 1
            if streak[arc] > 3:
                self._fail("favorable arc stayed in the compact network more than 3 phases")
        for arc in list(streak):
            if arc not in current:
                del streak[arc]


def initialize(net: FlowNetwork) -> ScalingState:
    """Saturate every source out-arc and set the initial dominator."""
    state = ScalingState(net)
    res = state.res
    for v in res.neighbors[net.source]:
        c = res.residual(net.source, v)
        if c > 0:
            res.push_flow(net.source, v, c)
    top = state.max_internal_excess()
    state.delta = _pow2_at_least(top) if top > 0 else 0
    state.stats.delta0 = state.delta
    return state


def _no_augmenting_path(net: FlowNetwork, state: ResidualState) -> bool:
    seen = {net.source}
    q = deque([net.source])
    while q:
        u = q.popleft()
        for v in state.neighbors[u]:
            if v not in seen and state.residual(u, v) > 0:
                if v == net.sink:
                    return False
                seen.add(v)
                q.append(v)
    return True


def max_flow(net: FlowNetwork, *, auto_reduce: bool = True,
             trace=None) -> MaxFlowResult:
    """Exact max flow via the compact-network scaling solver.

    With ``auto_reduce`` (default), a network whose max in/out degree
    exceeds floor(m/n) + 3 is first rewritten to bounded degree and the flow
    is mapped back, so the returned state always lives on ``net``.
    """
    if auto_reduce and net.m and net.max_degree() > net.m // net.n + 3:
        red = to_bounded_degree(net)
        if red.reduced is not net:
            inner = max_flow(red.reduced, auto_reduce=False, trace=trace)
            state = map_flow_back(red, inner.state)
            inner.stats.reduced = True
            return MaxFlowResult(inner.value, state, inner.stats)
    state = initialize(net)
    # ceil(log2 delta0) + 1 == bit_length for the power-of-two delta0
    max_phases = state.delta.bit_length()
    while state.delta >= 1:
        phase = state.run_phase()
        if trace is not None:
            trace.append(phase)
        top = state.max_internal_excess()
        state.delta = min(state.delta // 2, _pow2_at_least(top)) if top > 0 else 0
        if state.stats.phase_count > max_phases:
            raise InvariantViolation("phase count exceeded ceil(log2 delta0) + 1")
    if state.max_internal_excess() != 0:
        raise InvariantViolation("internal excess left after the final phase")
    verdict, value = verify_flow(net, state.res)
    if not verdict:
        raise InvariantViolation(f"final state is not a feasible flow: {verdict.reason}")
    if not _no_augmenting_path(net, state.res):
        raise InvariantViolation("residual augmenting path remains at termination")
    return MaxFlowResult(value, state.res, state.stats)
