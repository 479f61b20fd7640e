"""DIMACS max-flow instance parsing/writing and flat solver statistics records.

On disk vertex ids are 1-based per the DIMACS convention; in memory they are
0-based.  Stats are emitted as a single ``key=value`` line with a fixed field
order so benchmark output stays diffable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import FlowNetwork


class ParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_dimacs(text: str | bytes) -> FlowNetwork:
    """Parse a DIMACS max-flow instance.

    Recognized lines: ``c`` comments, one ``p max N M`` problem line,
    ``n ID s`` / ``n ID t`` designators, and ``a U V CAP`` arcs.  Anything
    else, and any structural inconsistency, raises ``ParseError`` with the
    offending line number.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    n = m = None
    source = sink = None
    arcs: list[tuple[int, int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "c":
            continue
        if kind == "p":
            if n is not None:
                raise ParseError("duplicate problem line", line_no)
            if len(fields) != 4 or fields[1] != "max":
                raise ParseError("problem line must be 'p max N M'", line_no)
            try:
                n, m = int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError("non-integer sizes in problem line", line_no) from None
            if n < 0 or m < 0:
                raise ParseError("negative sizes in problem line", line_no)
        elif kind == "n":
            if n is None:
                raise ParseError("designator before problem line", line_no)
            if len(fields) != 3 or fields[2] not in ("s", "t"):
                raise ParseError("designator must be 'n ID s' or 'n ID t'", line_no)
            try:
                vid = int(fields[1]) - 1
            except ValueError:
                raise ParseError("non-integer vertex id", line_no) from None
            if not 0 <= vid < n:
                raise ParseError("designator vertex id out of range", line_no)
            if fields[2] == "s":
                if source is not None:
                    raise ParseError("duplicate source designator", line_no)
                source = vid
            else:
                if sink is not None:
                    raise ParseError("duplicate sink designator", line_no)
                sink = vid
        elif kind == "a":
            if n is None:
                raise ParseError("arc before problem line", line_no)
            if len(fields) != 4:
                raise ParseError("arc line must be 'a U V CAP'", line_no)
            try:
                u, v, c = int(fields[1]) - 1, int(fields[2]) - 1, int(fields[3])
            except ValueError:
                raise ParseError("non-integer arc fields", line_no) from None
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError("arc vertex id out of range", line_no)
            if u == v:
                raise ParseError("self-loop arc", line_no)
            if c < 0:
                raise ParseError("negative capacity", line_no)
            arcs.append((u, v, c))
        else:
            raise ParseError(f"unrecognized line type {kind!r}", line_no)
    last = line_no if text.strip() else 0  # type: ignore[possibly-undefined]
    if n is None:
        raise ParseError("missing problem line", last)
    if source is None or sink is None:
        raise ParseError("missing source or sink designator", last)
    if source == sink:
        raise ParseError("source equals sink", last)
    if len(arcs) != m:
        raise ParseError(f"arc count mismatch: declared {m}, found {len(arcs)}", last)
    return FlowNetwork(n, arcs, source, sink)


def write_dimacs(net: FlowNetwork) -> str:
    """Emit a DIMACS instance; ``parse_dimacs`` reproduces the network exactly."""
    lines = [f"p max {net.n} {net.m}",
             f"n {net.source + 1} s",
             f"n {net.sink + 1} t"]
    lines.extend(f"a {u + 1} {v + 1} {c}" for u, v, c in net.arcs)
    return "\n".join(lines) + "\n"


STATS_FIELDS = (
    "instance", "solver", "flow_value", "phases", "sat_pushes", "hi_pushes",
    "lo_pushes", "relabels", "sum_vc", "dyntree_ops", "wall_ms",
)


@dataclass
class StatsRecord:
    """One solver run's counters, in the field order of ``STATS_FIELDS``."""

    instance: str
    solver: str
    flow_value: int
    phases: int = 0
    sat_pushes: int = 0
    hi_pushes: int = 0
    lo_pushes: int = 0
    relabels: int = 0
    sum_vc: int = 0
    dyntree_ops: int = 0
    wall_ms: float = 0.0


def write_stats(record: StatsRecord) -> str:
    """Render a record as one self-describing key=value line (no newline)."""
    parts = []
    for name in STATS_FIELDS:
        value = getattr(record, name)
        if name == "wall_ms":
            parts.append(f"{name}={value:.3f}")
        else:
            parts.append(f"{name}={value}")
    return " ".join(parts)
