"""Command-line surface: solve DIMACS instances, generate networks, run
benchmark matrices with cross-solver checking, verify flow files.

Exit codes: 0 success, 2 parse/usage errors, 3 verification failures.
"""

from __future__ import annotations

import argparse
import math
import os
import random
import sys
import time
from dataclasses import dataclass

from .baselines import NotMaximalError, ahuja_orlin, edmonds_karp, goldberg_tarjan, min_cut_check
from .core import FlowNetwork, ResidualState, verify_flow
from .engine import max_flow
from .io import ParseError, StatsRecord, parse_dimacs, write_dimacs, write_stats

FAMILIES = ("random-sparse", "grid", "star-heavy")
EXIT_PARSE = 2
EXIT_VERIFY = 3
CORPUS_ENV = "COMPACTFLOW_CORPUS"


@dataclass
class GeneratorSpec:
    family: str
    n: int
    m: int
    max_cap: int
    seed: int


def generate(spec: GeneratorSpec) -> FlowNetwork:
    """Deterministic test instance for (family, seed)."""
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}")
    if spec.n < 2 or spec.max_cap < 1:
        raise ValueError("need n >= 2 and max-cap >= 1")
    rng = random.Random((spec.seed, spec.family, spec.n, spec.m, spec.max_cap).__repr__())
    if spec.family == "random-sparse":
        return _gen_random_sparse(spec, rng)
    if spec.family == "grid":
        return _gen_grid(spec, rng)
    return _gen_star_heavy(spec, rng)


def _gen_random_sparse(spec: GeneratorSpec, rng: random.Random) -> FlowNetwork:
    n, m, U = spec.n, spec.m, spec.max_cap
    if m > 3 * n:
        raise ValueError("random-sparse requires m <= 3n")
    s, t = 0, n - 1
    arcs: list[tuple[int, int, int]] = []
    spine = [s] + rng.sample(range(1, n - 1), min(n - 2, max(0, m - 1))) + [t]
    for u, v in zip(spine, spine[1:]):
        if len(arcs) >= m:
            break
        arcs.append((u, v, rng.randint(1, U)))
    while len(arcs) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            arcs.append((u, v, rng.randint(1, U)))
    return FlowNetwork(n, arcs, s, t)


def _gen_grid(spec: GeneratorSpec, rng: random.Random) -> FlowNetwork:
    side = max(1, math.isqrt(spec.n))
    U = spec.max_cap
    n = side * side + 2
    s, t = 0, n - 1
    cell = lambda r, c: 1 + r * side + c
    arcs = []
    for r in range(side):
        arcs.append((s, cell(r, 0), rng.randint(1, U)))
    for r in range(side):
        for c in range(side):
            if c + 1 < side:
                arcs.append((cell(r, c), cell(r, c + 1), rng.randint(1, U)))
            if r + 1 < side:
                arcs.append((cell(r, c), cell(r + 1, c), rng.randint(1, U)))
    for r in range(side):
        arcs.append((cell(r, side - 1), t, rng.randint(1, U)))
    return FlowNetwork(n, arcs, s, t)


def _gen_star_heavy(spec: GeneratorSpec, rng: random.Random) -> FlowNetwork:
    """A few hub vertices of deliberately high degree between s and t."""
    n, U = spec.n, spec.max_cap
    if n < 6:
        raise ValueError("star-heavy requires n >= 6")
    s, t = 0, n - 1
    hubs = [1 + i for i in range(max(1, n // 40))]
    leaves = [v for v in range(1, n - 1) if v not in hubs]
    arcs = []
    for h in hubs:
        arcs.append((s, h, rng.randint(1, U)))
    for i, v in enumerate(leaves):
        h = hubs[i % len(hubs)]
        arcs.append((h, v, rng.randint(1, U)))
        arcs.append((v, t, rng.randint(1, U)))
    while len(arcs) < spec.m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            arcs.append((u, v, rng.randint(1, U)))
    return FlowNetwork(n, arcs, s, t)


# solvers --------------------------------------------------------------------

def _solve_compact(net: FlowNetwork):
    result = max_flow(net)
    st = result.stats
    return result.value, result.state, dict(
        phases=st.phase_count, sat_pushes=st.sat_pushes, hi_pushes=st.hi_pushes,
        lo_pushes=st.lo_pushes, relabels=st.relabels, sum_vc=st.sum_vc,
        dyntree_ops=st.dyntree_ops)


def _solve_ek(net: FlowNetwork):
    value, state = edmonds_karp(net)
    return value, state, {}


def _solve_gt(net: FlowNetwork):
    value, state = goldberg_tarjan(net)
    return value, state, {}


def _solve_ao(net: FlowNetwork):
    value, state, phases = ahuja_orlin(net)
    return value, state, {"phases": phases}


SOLVERS = {
    "compact": _solve_compact,
    "ek": _solve_ek,
    "gt": _solve_gt,
    "ao": _solve_ao,
}


def _run_solver(name: str, net: FlowNetwork, instance: str) -> tuple[int, ResidualState, StatsRecord]:
    start = time.perf_counter()
    value, state, counters = SOLVERS[name](net)
    wall = (time.perf_counter() - start) * 1000.0
    record = StatsRecord(instance=instance, solver=name, flow_value=value,
                         wall_ms=wall, **counters)
    return value, state, record


# commands --------------------------------------------------------------------

def cmd_solve(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            net = parse_dimacs(fh.read())
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    trace = [] if args.trace else None
    value, state, record = _run_solver(args.solver, net, os.path.basename(args.input))
    if args.trace and args.solver == "compact":
        print("note: per-phase trace requires the library API; printing totals only",
              file=sys.stderr)
    print(f"flow {value}")
    print(write_stats(record))
    if args.write_flow:
        flows = state.arc_flows()
        with open(args.write_flow, "w") as fh:
            for (u, v, _c), f in zip(net.arcs, flows):
                fh.write(f"f {u + 1} {v + 1} {f}\n")
    if args.check:
        verdict, verified = verify_flow(net, state)
        if not verdict or verified != value:
            print(f"verification failed: {verdict.reason}", file=sys.stderr)
            return EXIT_VERIFY
        try:
            min_cut_check(net, state)
        except NotMaximalError as exc:
            print(f"verification failed: {exc}", file=sys.stderr)
            return EXIT_VERIFY
        if args.solver == "compact":
            oracle, _ = edmonds_karp(net)
            if oracle != value:
                print(f"verification failed: oracle disagrees ({oracle} != {value})",
                      file=sys.stderr)
                return EXIT_VERIFY
    return 0


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.family, args.n, args.m, args.max_cap, args.seed)
    try:
        net = generate(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = (f"c family={spec.family} n={spec.n} m={spec.m}"
            f" max-cap={spec.max_cap} seed={spec.seed}\n" + write_dimacs(net))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    solvers = args.solvers.split(",")
    for name in solvers:
        if name not in SOLVERS:
            print(f"error: unknown solver {name!r}", file=sys.stderr)
            return EXIT_PARSE
    corpus = args.corpus or os.environ.get(CORPUS_ENV)
    if not corpus:
        print("error: no corpus directory (argument or COMPACTFLOW_CORPUS)", file=sys.stderr)
        return EXIT_PARSE
    try:
        files = sorted(f for f in os.listdir(corpus)
                       if f.endswith((".dimacs", ".max", ".txt")))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    ratios = []
    for name in files:
        path = os.path.join(corpus, name)
        try:
            with open(path, "rb") as fh:
                net = parse_dimacs(fh.read())
        except ParseError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_PARSE
        values = {}
        for solver in solvers:
            value, _state, record = _run_solver(solver, net, name)
            values[solver] = value
            print(write_stats(record))
            if solver == "compact" and record.phases and net.m:
                ratios.append(record.phases / math.sqrt(net.m))
        if len(set(values.values())) > 1:
            print(f"bench abort: solver disagreement on {path}: {values}", file=sys.stderr)
            return EXIT_VERIFY
    if ratios:
        print(f"c phases/sqrt(m): max {max(ratios):.3f} mean {sum(ratios) / len(ratios):.3f}")
    return 0


def cmd_verify(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            net = parse_dimacs(fh.read())
        with open(args.flow) as fh:
            lines = [ln.split() for ln in fh if ln.strip()]
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if len(lines) != net.m:
        print(f"error: flow file has {len(lines)} entries for {net.m} arcs", file=sys.stderr)
        return EXIT_PARSE
    state = ResidualState.zero(net)
    for fields, (u, v, c) in zip(lines, net.arcs):
        if len(fields) != 4 or fields[0] != "f":
            print("error: flow lines must be 'f U V AMOUNT'", file=sys.stderr)
            return EXIT_PARSE
        fu, fv, amount = int(fields[1]) - 1, int(fields[2]) - 1, int(fields[3])
        if (fu, fv) != (u, v):
            print(f"error: flow file arc ({fu + 1},{fv + 1}) out of order", file=sys.stderr)
            return EXIT_PARSE
        if amount < 0 or amount > c:
            print("verification failed: arc flow outside its capacity", file=sys.stderr)
            return EXIT_VERIFY
        if amount:
            state.flow[(u, v)] = state.flow.get((u, v), 0) + amount
    for (u, v), f in state.flow.items():
        state.excess[u] -= f
        state.excess[v] += f
    verdict, value = verify_flow(net, state)
    if not verdict:
        print(f"verification failed: {verdict.reason}", file=sys.stderr)
        return EXIT_VERIFY
    try:
        min_cut_check(net, state)
    except NotMaximalError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"ok {value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compactflow",
                                     description="max-flow solvers on compact networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a DIMACS instance")
    p.add_argument("input")
    p.add_argument("--solver", choices=sorted(SOLVERS), default="compact")
    p.add_argument("--check", action="store_true", help="verify flow, cut, and oracle equality")
    p.add_argument("--trace", action="store_true", help="verbose per-run reporting")
    p.add_argument("--write-flow", metavar="PATH", help="write per-arc flows as 'f U V AMOUNT'")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a deterministic instance")
    p.add_argument("--family", choices=FAMILIES, default="random-sparse")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--m", type=int, default=120)
    p.add_argument("--max-cap", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a solver matrix over a corpus directory")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--solvers", default="compact,ek")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check a flow file against an instance")
    p.add_argument("input")
    p.add_argument("flow")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
