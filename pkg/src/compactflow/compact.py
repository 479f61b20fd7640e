"""Per-phase compact network: classification, pseudoarc construction, replay.

A phase's compact network consists of

* ``a1``: the favorable and large directed pairs, kept as real arcs whose
  residuals stay live in the underlying state, and
* ``pseudoarcs``: single arcs standing for residual paths, built by capacity
  transfer on a dynamic forest.

Construction walks grow paths along arcs of residual capacity above a
threshold rho (the excess dominator for abundant pseudoarcs, zero for small
ones).  A walk links arcs into the forest; once it reaches a compact vertex,
the path bottleneck moves onto a new pseudoarc, the path values drop by the
bottleneck, and saturated arcs are cut.  Compact vertices are never linked
below anything, so they are always forest roots: every pseudoarc's interior
is non-compact, which in particular keeps active vertices off pseudoarc
interiors.  A pseudoarc's first arc leaves its (compact) tail and is
accounted outside the forest.

Everything the forest does is appended to an operation log.  At phase end
``restore_all_flows`` replays the log against a fresh forest, reusing the
value slots as per-arc flow accumulators, and converts each pseudoarc's
pushed flow into flow on the underlying residual arcs.

``consumed`` tracks, per directed pair, how much residual capacity moved
into pseudoarcs (or still sits linked in the forest at phase end after the
leftover write-back).  The engine subtracts it from live residuals so the
same capacity can never be used both through a pseudoarc and directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import FlowNetwork, ResidualState, classify_arc, ArcClass
from .dyntree import DynForest


@dataclass
class LinkOp:
    child: int
    parent: int
    value: int


@dataclass
class CutOp:
    child: int
    parent: int


@dataclass
class PseudoOp:
    arc_index: int
    tail: int
    first: int
    amount: int
    has_tree_path: bool


@dataclass
class Pseudoarc:
    tail: int
    head: int
    capacity: int
    kind: ArcClass  # ABUNDANT or SMALL
    entry: tuple[int, int]  # the first underlying arc (tail, first)
    has_tree_path: bool
    log_index: int
    # the underlying residual arcs at creation time, entry first; rescue
    # arcs (built outside the forest) replay their flow along this directly
    path: tuple[tuple[int, int], ...] = ()
    in_log: bool = True
    flow: int = 0  # net forward flow pushed during the phase

    def residual_fw(self) -> int:
        return self.capacity - self.flow

    def residual_bw(self) -> int:
        return self.flow


@dataclass
class CompactNetwork:
    delta: int
    v_active: frozenset[int]
    v_sc: frozenset[int]
    members: frozenset[int]  # V_C plus source and sink
    a1: list[tuple[int, int, ArcClass]]  # favorable/large directed pairs at phase start
    a1_pairs: dict[int, list[int]]  # vertex -> neighbors across an a1 pair
    pseudoarcs: list[Pseudoarc]
    log: list
    consumed: dict[tuple[int, int], int]
    gamma_snapshot: dict[tuple[int, int], int]
    by_tail: dict[int, list[int]] = field(default_factory=dict)
    by_head: dict[int, list[int]] = field(default_factory=dict)
    arc_users: dict[tuple[int, int], list[int]] = field(default_factory=dict)
    dyntree_ops: int = 0
    dyntree_rotations: int = 0

    def register(self, index: int) -> None:
        p = self.pseudoarcs[index]
        self.by_tail.setdefault(p.tail, []).append(index)
        self.by_head.setdefault(p.head, []).append(index)
        for arc in p.path:
            self.arc_users.setdefault(arc, []).append(index)

    def release(self, index: int, amount: int) -> None:
        """Give back unused reserved capacity of one pseudoarc."""
        p = self.pseudoarcs[index]
        if amount <= 0 or amount > p.capacity - p.flow:
            raise ValueError("release amount outside the pseudoarc's unused capacity")
        p.capacity -= amount
        for arc in p.path:
            self.consumed[arc] -= amount

    def dump(self) -> str:
        """Stable text dump of the phase structure, for golden tests."""
        lines = [f"delta {self.delta}",
                 "VA " + " ".join(map(str, sorted(self.v_active))),
                 "VSC " + " ".join(map(str, sorted(self.v_sc)))]
        for u, v, cls in sorted(self.a1):
            lines.append(f"a1 {u} {v} {cls.value}")
        for p in self.pseudoarcs:
            lines.append(f"a2 {p.tail} {p.head} cap {p.capacity} {p.kind.value}")
        return "\n".join(lines) + "\n"


class PseudoarcBuilder:
    """Capacity-transfer construction over one phase's shared forest and log."""

    def __init__(self, state: ResidualState, members: frozenset[int],
                 v_active: frozenset[int], consumed: dict, a1_dirs: set,
                 forest: DynForest, log: list, pseudoarcs: list, delta: int,
                 label_of=None):
        self.state = state
        self.members = members
        self.v_active = v_active
        self.consumed = consumed
        self.a1_dirs = a1_dirs
        self.forest = forest
        self.log = log
        self.pseudoarcs = pseudoarcs
        self.delta = delta
        self.label_of = label_of or (lambda v: 0)
        self.parent_of: dict[int, int] = {}  # shadow of forest link structure
        self.children: dict[int, set[int]] = {}
        self.rho = 0
        self.abundant_only = False
        self.reverse_only = False
        # arcs proven useless this pass: they only reached dead ends
        self.forbidden: set[tuple[int, int]] = set()

    # arc availability --------------------------------------------------------

    def avail(self, u: int, v: int) -> int:
        return self.state.residual(u, v) - self.consumed.get((u, v), 0)

    def _arc_ok(self, u: int, v: int) -> bool:
        if (u, v) in self.forbidden or self.avail(u, v) <= self.rho:
            return False
        if self.reverse_only and self.state.flow.get((v, u), 0) <= 0:
            return False  # return routes ride the reversals of earlier pushes
        if self.abundant_only and (u in self.v_active or v in self.v_active):
            # abundance-graph arcs avoid active endpoints; walks themselves
            # only ever continue from non-compact vertices
            return False
        if not self.abundant_only and (u, v) in self.a1_dirs:
            return False  # an original arc lives in at most one compact representation
        return True

    def _link(self, child: int, parent: int) -> None:
        value = self.avail(child, parent)
        self.forest.link(child, parent, value)
        self.consumed[(child, parent)] = self.consumed.get((child, parent), 0) + value
        self.log.append(LinkOp(child, parent, value))
        self.parent_of[child] = parent
        self.children.setdefault(parent, set()).add(child)

    def _cut(self, child: int) -> int:
        parent = self.parent_of.pop(child)
        self.children[parent].discard(child)
        returned = self.forest.cut(child)
        self.consumed[(child, parent)] -= returned
        self.log.append(CutOp(child, parent))
        return returned

    def _dismantle(self, root: int) -> None:
        """Cut an entire dead tree, returning its arcs' capacity to the pool.

        A tree whose interior root has no usable out-arc can never extend to
        a compact head; left alone it would imprison every arc linked below
        it for the rest of the phase."""
        stack = [root]
        while stack:
            v = stack.pop()
            for c in list(self.children.get(v, ())):
                stack.append(c)
                self._cut(c)

    def _candidates(self, v: int, tail: int) -> list[int]:
        """Usable out-arcs of v, lowest distance label first.

        Walking toward small d_h steers paths the way discharge will want to
        push them: sink-ward before source-ward, never into unreachable
        corners while a labelled alternative exists."""
        found = []
        for w in self.state.neighbors[v]:
            if not self._arc_ok(v, w):
                continue
            rw = self.forest.root(w)
            if rw == v or rw == tail:
                continue  # would close a cycle or loop back onto the tail
            found.append((self.label_of(w), w))
        found.sort()
        return [w for _, w in found]

    # the five construction operations ----------------------------------------

    def feasible_path(self, u: int, rho: int) -> tuple[int, int] | None:
        """Grow a path from compact vertex u along arcs of availability > rho.

        Returns (first, head) on success, where ``first`` is the vertex the
        entry arc (u, first) reaches and ``head`` the compact vertex the walk
        stopped at; None when every entry is exhausted.  Links go into the
        shared log as they happen.  A walk that dead-ends backtracks: it cuts
        its own most recent link (restoring the arc's availability and
        removing the log entry) and forbids that arc for the rest of the
        pass, so the search is exhaustive but every arc is walked at most
        twice per pass.
        """
        self.rho = rho
        while True:
            entries = self._candidates(u, u)
            if not entries:
                return None
            first = entries[0]
            cur = self.forest.root(first)
            stack: list[int] = []  # children of this walk's own links, in order
            dead_entry = False
            while cur not in self.members or cur == u:
                if cur == u:
                    dead_entry = True  # walk tunneled back onto the tail's tree
                    break
                step = self._candidates(cur, u)
                if step:
                    self._link(cur, step[0])
                    stack.append(cur)
                    cur = self.forest.root(step[0])
                    continue
                if stack:
                    child = stack.pop()
                    parent = self.parent_of[child]
                    self._cut(child)
                    self.forbidden.add((child, parent))
                    cur = child
                    continue
                # dead on arrival: the entry's tree root cannot continue
                if cur not in self.members and self.children.get(cur):
                    self._dismantle(cur)  # free the imprisoned tree and retry
                else:
                    dead_entry = True
                    break
                cur = self.forest.root(first)
            if dead_entry:
                self.forbidden.add((u, first))
                continue
            return first, cur

    def transfer_capacity(self, u: int, cap_bound: int | None = None) -> tuple[int, int]:
        """Move the bottleneck of path(u) onto a pseudoarc: returns
        (head, bottleneck) and debits every arc on the path.  ``cap_bound``
        folds in a capacity constraint living outside the forest (the entry
        arc of a pseudoarc)."""
        head = self.forest.root(u)
        if head == u:
            raise ValueError("transfer_capacity: u is a root (empty path)")
        _, bottleneck = self.forest.find_min(u)
        if cap_bound is not None:
            bottleneck = min(bottleneck, cap_bound)
        if bottleneck <= 0:
            raise ValueError("transfer_capacity: zero bottleneck, cut saturated arcs first")
        self.forest.add_val(u, -bottleneck)
        return head, bottleneck

    def cut_all_saturated(self, u: int) -> None:
        """Cut every zero-valued arc off path(u), logging the cuts."""
        forest = self.forest
        while not forest.is_root(u):
            w, val = forest.find_min(u)
            if val != 0:
                break
            self._cut(w)

    def build_pseudoarc(self, u: int, rho: int, kind: ArcClass,
                        cap_bound: int | None = None) -> Pseudoarc | None:
        """One create-all-pseudoarcs iteration for tail u; None when exhausted."""
        path = self.feasible_path(u, rho)
        if path is None:
            return None
        first, head = path
        entry_avail = self.avail(u, first)
        if cap_bound is not None:
            entry_avail = min(entry_avail, cap_bound)
        if first == head:
            bottleneck = entry_avail
            has_tree = False
        else:
            head, bottleneck = self.transfer_capacity(first, cap_bound=entry_avail)
            has_tree = True
        self.consumed[(u, first)] = self.consumed.get((u, first), 0) + bottleneck
        if bottleneck > self.delta:
            kind = ArcClass.ABUNDANT  # a small-pass arc above the dominator acts abundant
        path = [(u, first)]
        x = first
        while x != head:
            nxt = self.parent_of[x]
            path.append((x, nxt))
            x = nxt
        arc = Pseudoarc(tail=u, head=head, capacity=bottleneck, kind=kind,
                        entry=(u, first), has_tree_path=has_tree,
                        log_index=len(self.log), path=tuple(path))
        self.log.append(PseudoOp(len(self.pseudoarcs), u, first, bottleneck, has_tree))
        self.pseudoarcs.append(arc)
        if has_tree:
            self.cut_all_saturated(first)
            root = self.forest.root(first)
            if root not in self.members and not self._candidates(root, -1):
                self._dismantle(root)
        return arc

    def create_all_pseudoarcs(self, tails: list[int], rho: int, kind: ArcClass) -> None:
        """Exhaust every tail in order, building pseudoarcs until none is feasible."""
        for u in tails:
            while True:
                arc = self.build_pseudoarc(u, rho, kind)
                if arc is None:
                    break

    def reserve_returns(self, tails: list[int]) -> None:
        """Secure each active vertex a way to send its phase-start excess back
        the way it came: pseudoarcs over reversals of earlier pushes, capacity
        capped at the excess still uncovered.  Built before anything else so
        the general passes cannot starve a vertex of its return route."""
        self.reverse_only = True
        try:
            for u in tails:
                need = self.state.excess[u]
                while need > 0:
                    arc = self.build_pseudoarc(u, 0, ArcClass.SMALL, cap_bound=need)
                    if arc is None:
                        break
                    need -= arc.capacity
        finally:
            self.reverse_only = False

    def write_back_leftovers(self) -> None:
        """Return un-transferred linked capacity to the availability view."""
        for child, parent in list(self.parent_of.items()):
            self.consumed[(child, parent)] -= self.forest.value(child)


def build_compact(state: ResidualState, delta: int,
                  labels=None) -> CompactNetwork:
    """Build the phase's compact network from the live residual state.

    ``labels`` orders pseudoarc tails (overall distance, ascending); the
    engine passes its current labels, tests may omit them.
    """
    if delta < 1:
        raise ValueError("delta must be positive")
    net = state.net
    s, t = net.source, net.sink
    a1: list[tuple[int, int, ArcClass]] = []
    a1_dirs: set[tuple[int, int]] = set()
    gamma_snapshot: dict[tuple[int, int], int] = {}
    for u in range(net.n):
        for v in state.neighbors[u]:
            if u > v:
                continue
            gamma = state.gamma(u, v)
            for a, b in ((u, v), (v, u)):
                r = state.residual(a, b)
                cls = classify_arc(gamma, r, delta)
                if cls in (ArcClass.FAVORABLE, ArcClass.LARGE):
                    a1.append((a, b, cls))
                    a1_dirs.add((a, b))
                    gamma_snapshot[(a, b)] = gamma
    v_active = frozenset(u for u in range(net.n)
                         if u not in (s, t) and 2 * state.excess[u] > delta)
    v_sc = frozenset(x for u, v, _ in a1 for x in (u, v)) - v_active
    members = v_active | v_sc | {s, t}

    forest = DynForest(net.n)
    log: list = []
    pseudoarcs: list[Pseudoarc] = []
    consumed: dict[tuple[int, int], int] = {}
    label_of = (lambda v: labels.d_h[v]) if labels is not None else None
    builder = PseudoarcBuilder(state, members, v_active, consumed, a1_dirs,
                               forest, log, pseudoarcs, delta, label_of)

    def order(vs):
        if labels is None:
            return sorted(vs)
        return sorted(vs, key=lambda u: (labels.d(u), u))

    # return routes for phase-start actives come first, then abundant
    # pseudoarcs (which avoid active endpoints entirely), then a small pass
    # that picks up whatever capacity is left, active tails included
    builder.reserve_returns(order(v_active))
    builder.forbidden.clear()
    builder.abundant_only = True
    builder.create_all_pseudoarcs(order(members - v_active), delta, ArcClass.ABUNDANT)
    builder.abundant_only = False
    builder.forbidden.clear()
    builder.create_all_pseudoarcs(order(members), 0, ArcClass.SMALL)
    builder.write_back_leftovers()

    compact = CompactNetwork(
        delta=delta, v_active=v_active, v_sc=v_sc, members=members,
        a1=a1, a1_pairs=_pair_adjacency(a1), pseudoarcs=pseudoarcs, log=log,
        consumed=consumed, gamma_snapshot=gamma_snapshot,
        dyntree_ops=forest.op_count, dyntree_rotations=forest.rotations,
    )
    for i in range(len(pseudoarcs)):
        compact.register(i)
    return compact


def _pair_adjacency(a1) -> dict[int, list[int]]:
    adj: dict[int, set[int]] = {}
    for u, v, _ in a1:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return {u: sorted(vs) for u, vs in adj.items()}


def restore_all_flows(compact: CompactNetwork, state: ResidualState,
                      forest_cls=DynForest) -> ResidualState:
    """Replay the phase log, converting pseudoarc flows into residual flows.

    The replayed forest mirrors the construction forest exactly (links and
    cuts are positional); value slots accumulate flow instead of capacity.
    Excesses are untouched: pseudoarc endpoints were settled at push time
    and interior vertices net to zero.
    """
    forest = forest_cls(state.net.n)
    parent_of: dict[int, int] = {}

    for op in compact.log:
        if isinstance(op, LinkOp):
            forest.link(op.child, op.parent, 0)
            parent_of[op.child] = op.parent
        elif isinstance(op, CutOp):
            if parent_of.pop(op.child) != op.parent:
                raise AssertionError("restore replay diverged from construction log")
            moved = forest.cut(op.child)
            if moved:
                state.push_flow(op.child, op.parent, moved, adjust_excess=False)
        else:  # PseudoOp
            arc = compact.pseudoarcs[op.arc_index]
            amount = arc.flow
            if amount < 0 or amount > arc.capacity:
                raise AssertionError("pseudoarc flow outside its transferred capacity")
            if arc.has_tree_path != (not forest.is_root(op.first)):
                raise AssertionError("restore replay diverged from construction log")
            if amount:
                state.push_flow(op.tail, op.first, amount, adjust_excess=False)
                if arc.has_tree_path:
                    forest.add_val(op.first, amount)
    for child in list(parent_of):
        moved = forest.value(child)
        if moved:
            state.push_flow(child, parent_of[child], moved, adjust_excess=False)
    for arc in compact.pseudoarcs:
        if not arc.in_log and arc.flow:
            for a, b in arc.path:
                state.push_flow(a, b, arc.flow, adjust_excess=False)
    compact.dyntree_ops += forest.op_count
    compact.dyntree_rotations += forest.rotations
    return state
