"""Dynamic forest (link-cut trees) with path addition and path minimum.

Each non-root vertex u carries ``val(u)``, the value of the arc (u, parent(u)).
Supported path operations act on the path from u up to its tree root:

* ``add_val(u, delta)`` adds delta to every arc value on that path
  (no-op at a root).  Callers consuming capacity pass a negative delta.
* ``find_min(u)`` returns the vertex whose parent arc has minimum value,
  ties broken toward the vertex closest to the root.

The implementation is the classic splay-tree decomposition into preferred
paths, ordered by depth (leftmost = shallowest).  Root vertices hold an
infinity sentinel in their value slot so whole-path lazy updates never
corrupt an observable value; ``link`` overwrites the slot.

``rotations`` counts elementary splay rotations and ``op_count`` counts
public operations, so amortized-cost claims can be checked empirically.
"""

from __future__ import annotations

_INF = float("inf")


class _Node:
    __slots__ = ("id", "left", "right", "parent", "val", "mn", "lz")

    def __init__(self, vid: int):
        self.id = vid
        self.left = None
        self.right = None
        self.parent = None
        self.val = _INF
        self.mn = _INF
        self.lz = 0


class DynForest:
    def __init__(self, n: int):
        if n < 0:
            raise ValueError("negative size")
        self._nodes = [_Node(i) for i in range(n)]
        self.rotations = 0
        self.op_count = 0

    def __len__(self) -> int:
        return len(self._nodes)

    # splay machinery -------------------------------------------------------

    @staticmethod
    def _is_splay_root(x: _Node) -> bool:
        p = x.parent
        return p is None or (p.left is not x and p.right is not x)

    @staticmethod
    def _apply(x: _Node, d: int) -> None:
        x.val += d
        x.mn += d
        x.lz += d

    @staticmethod
    def _push(x: _Node) -> None:
        if x.lz:
            d = x.lz
            if x.left is not None:
                DynForest._apply(x.left, d)
            if x.right is not None:
                DynForest._apply(x.right, d)
            x.lz = 0

    @staticmethod
    def _pull(x: _Node) -> None:
        m = x.val
        if x.left is not None and x.left.mn < m:
            m = x.left.mn
        if x.right is not None and x.right.mn < m:
            m = x.right.mn
        x.mn = m

    def _rotate(self, x: _Node) -> None:
        p = x.parent
        g = p.parent
        if not self._is_splay_root(p):
            if g.left is p:
                g.left = x
            else:
                g.right = x
        x.parent = g
        if p.left is x:
            p.left = x.right
            if x.right is not None:
                x.right.parent = p
            x.right = p
        else:
            p.right = x.left
            if x.left is not None:
                x.left.parent = p
            x.left = p
        p.parent = x
        self._pull(p)
        self._pull(x)
        self.rotations += 1

    def _splay(self, x: _Node) -> None:
        stack = [x]
        y = x
        while not self._is_splay_root(y):
            y = y.parent
            stack.append(y)
        while stack:
            self._push(stack.pop())
        while not self._is_splay_root(x):
            p = x.parent
            if not self._is_splay_root(p):
                g = p.parent
                if (g.left is p) == (p.left is x):
                    self._rotate(p)
                else:
                    self._rotate(x)
            self._rotate(x)

    def _access(self, x: _Node) -> None:
        """Make the root-to-x path one splay tree with x as its splay root."""
        self._splay(x)
        if x.right is not None:
            x.right = None  # deeper part keeps x as path-parent
            self._pull(x)
        while x.parent is not None:
            y = x.parent
            self._splay(y)
            y.right = x  # x.parent is already y
            self._pull(y)
            self._splay(x)

    def _leftmost(self, x: _Node) -> _Node:
        self._push(x)
        while x.left is not None:
            x = x.left
            self._push(x)
        self._splay(x)
        return x

    def _node(self, u: int) -> _Node:
        return self._nodes[u]

    # public operations ------------------------------------------------------

    def root(self, u: int) -> int:
        self.op_count += 1
        x = self._node(u)
        self._access(x)
        return self._leftmost(x).id

    def is_root(self, u: int) -> bool:
        self.op_count += 1
        x = self._node(u)
        self._access(x)
        return x.left is None

    def link(self, u: int, v: int, value: int) -> None:
        """Attach root vertex u below v with arc value ``value``."""
        if value < 0:
            raise ValueError("negative arc value")
        x = self._node(u)
        self._access(x)
        if x.left is not None:
            raise ValueError(f"link: {u} is not a tree root")
        y = self._node(v)
        self._access(y)
        if self._leftmost(y).id == u:
            raise ValueError(f"link: {u} and {v} are already in one tree")
        self._access(x)  # leftmost(y) splayed y's tree; re-expose x
        x.val = value
        self._pull(x)
        x.parent = y
        self.op_count += 1

    def cut(self, u: int) -> int:
        """Detach u from its parent; returns the arc value at cut time."""
        self.op_count += 1
        x = self._node(u)
        self._access(x)
        if x.left is None:
            raise ValueError(f"cut: {u} is a tree root")
        ret = x.val
        x.left.parent = None
        x.left = None
        x.val = _INF
        self._pull(x)
        return ret

    def add_val(self, u: int, delta: int) -> None:
        """Add ``delta`` to every arc value on path(u); no-op when u is a root."""
        self.op_count += 1
        x = self._node(u)
        self._access(x)
        if x.left is None:
            return
        if delta < 0:
            low = min(x.val, x.left.mn)
            if low + delta < 0:
                raise ValueError(f"add_val would drive a path value negative ({low} {delta:+d})")
        x.val += delta
        self._apply(x.left, delta)
        self._pull(x)

    def find_min(self, u: int) -> tuple[int, int]:
        """Minimum arc value on path(u) with its vertex; ties go closest to the root."""
        self.op_count += 1
        x = self._node(u)
        self._access(x)
        if x.left is None:
            raise ValueError(f"find_min: {u} is a tree root (empty path)")
        m = x.val if x.val < x.left.mn else x.left.mn
        # Leftmost attainer = shallowest = closest to the root.
        cur = x
        while True:
            self._push(cur)
            if cur.left is not None and cur.left.mn == m:
                cur = cur.left
            elif cur.val == m:
                break
            else:
                cur = cur.right
        self._splay(cur)
        return cur.id, m

    def value(self, u: int) -> int:
        """Value of the arc (u, parent(u)); error at a root."""
        self.op_count += 1
        x = self._node(u)
        self._access(x)
        if x.left is None:
            raise ValueError(f"value: {u} is a tree root")
        return x.val
