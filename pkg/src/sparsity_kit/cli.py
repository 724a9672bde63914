"""Command line front end.

Subcommands: recognize | decompose | certify | generate | replay | bench.
'-' means stdin/stdout for graph and certificate paths.  Exit codes: 0 success
(sparse/tight/valid), 1 usage, I/O, or parse errors, 2 not-sparse (recognize),
3 not tight (decompose), 4 invalid certificate or trace.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .canonical import run_canonical_game
from .decompose import (
    Certificate,
    CertificateError,
    NotTightError,
    certificate_from_json,
    certificate_to_json,
    extract_certificate,
    to_dot,
    validate_certificate,
)
from .graph import GraphFormatError, Multigraph, SparsityParams, parse_graph, write_graph
from .oracle import random_tight_graph
from .pebbles import TraceError, check_invariants, replay_trace, trace_to_lines

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_SPARSE = 2
EXIT_NOT_TIGHT = 3
EXIT_INVALID = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep usage errors at 1
        raise UsageError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _default_seed() -> int:
    env = os.environ.get("SPARSITY_KIT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SPARSITY_KIT_SEED must be an integer, got {env!r}") from None


def _params(args) -> SparsityParams:
    try:
        return SparsityParams(args.k, args.l)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_graph(path: str) -> Multigraph:
    return parse_graph(_read_text(path))


def _maybe_write_trace(args, result) -> None:
    if getattr(args, "trace", None):
        lines = trace_to_lines(result.state)
        _write_text(args.trace, "\n".join(lines) + "\n")


def cmd_recognize(args) -> int:
    params = _params(args)
    g = _load_graph(args.graph)
    hook = None
    if args.debug_invariants:

        def hook(state, move):
            rep = check_invariants(state)
            if not rep.ok:
                raise RuntimeError(f"invariant failure after {move}: {rep.failures[0].name}")

    try:
        result = run_canonical_game(
            g, params, record_trace=bool(args.trace), after_move=hook
        )
    except RuntimeError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    _maybe_write_trace(args, result)
    verdict = result.verdict()
    if args.format == "json":
        payload = {
            "verdict": verdict,
            "accepted": len(result.accepted),
            "rejected": len(result.rejected),
            "n": g.n,
            "m": g.m,
        }
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print(verdict)
        print(f"accepted={len(result.accepted)} rejected={len(result.rejected)}")
    return EXIT_OK if verdict in ("tight", "sparse") else EXIT_NOT_SPARSE


def cmd_decompose(args) -> int:
    params = _params(args)
    g = _load_graph(args.graph)
    result = run_canonical_game(g, params, record_trace=bool(args.trace))
    _maybe_write_trace(args, result)
    kind = args.kind
    try:
        cert = extract_certificate(result, kind)
    except NotTightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_TIGHT
    if args.format == "dot":
        _write_text(args.output, to_dot(g, cert))
    else:
        _write_text(args.output, certificate_to_json(cert))
    return EXIT_OK


def cmd_certify(args) -> int:
    g = _load_graph(args.graph)
    cert = certificate_from_json(_read_text(args.certificate))
    if cert.n != g.n or len(cert.edges) != g.m:
        print("error: graph and certificate disagree on n or m", file=sys.stderr)
        return EXIT_USAGE
    ok, failure = validate_certificate(g, cert)
    if ok:
        print("valid")
        return EXIT_OK
    print(f"invalid: {failure}")
    return EXIT_INVALID


def cmd_generate(args) -> int:
    params = _params(args)
    seed = args.seed if args.seed is not None else _default_seed()
    if params.max_edges(args.n) < 0:
        raise UsageError(f"k*n - l is negative for n={args.n}")
    g = random_tight_graph(args.n, params, seed)
    _write_text(args.output, write_graph(g))
    return EXIT_OK


def cmd_replay(args) -> int:
    text = _read_text(args.trace)
    try:
        replay_trace(text.splitlines(), debug_invariants=args.debug_invariants)
    except TraceError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def cmd_bench(args) -> int:
    params = _params(args)
    sizes = args.sizes
    if sizes != sorted(set(sizes)):
        raise UsageError("sizes must be strictly increasing")
    seed = args.seed if args.seed is not None else _default_seed()
    rows = []
    prev: tuple[int, float] | None = None
    for n in sizes:
        g = random_tight_graph(n, params, seed * 1_000_003 + n)
        start = time.perf_counter()
        result = run_canonical_game(g, params)
        elapsed = time.perf_counter() - start
        assert result.all_accepted()
        ratio = None
        if prev is not None and prev[0] * 2 == n and prev[1] > 0:
            ratio = elapsed / prev[1]
        rows.append((n, g.m, elapsed, ratio))
        prev = (n, elapsed)
    if args.format == "csv":
        print("n,edges,seconds,ratio")
        for n, m, secs, ratio in rows:
            print(f"{n},{m},{secs:.6f},{'' if ratio is None else f'{ratio:.3f}'}")
    else:
        print(f"{'n':>8} {'edges':>8} {'seconds':>10} {'t(2n)/t(n)':>11}")
        for n, m, secs, ratio in rows:
            rtxt = "-" if ratio is None else f"{ratio:.3f}"
            print(f"{n:>8} {m:>8} {secs:>10.4f} {rtxt:>11}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="sparsity-kit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_kl(p):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--l", type=int, required=True)

    p = sub.add_parser("recognize", help="classify a graph as tight/sparse/not-sparse")
    add_kl(p)
    p.add_argument("graph", help="graph file or '-'")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--trace", help="write the construction trace to this file")
    p.add_argument("--debug-invariants", action="store_true")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("decompose", help="write a sparsity-certifying certificate")
    add_kl(p)
    p.add_argument("graph")
    p.add_argument("--kind", choices=("coloring", "maps-and-trees", "proper-ltk"), default=None)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--trace", help="write the construction trace to this file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("certify", help="validate a certificate against a graph")
    p.add_argument("graph")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("generate", help="emit a seeded random tight graph")
    add_kl(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("replay", help="replay a trace file and verify its hash")
    p.add_argument("trace")
    p.add_argument("--debug-invariants", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="time constructions on random tight graphs")
    add_kl(p)
    p.add_argument("--sizes", type=int, nargs="+", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, CertificateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
