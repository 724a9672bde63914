"""The pebble game with colors: state, moves, pebble search, invariants, components.

The state is a directed multigraph H with stable edge ids.  Every vertex starts
with one pebble of each of the k colors; an edge is added by spending a pebble
from one endpoint (which becomes the tail), and a pebble-slide reverses an edge
by covering it with a pebble taken from its head.  Because each vertex holds at
most one pebble per color and at most one outgoing edge per color, per-vertex
adjacency is a k-slot array, which keeps searches O(n) on sparse states.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .graph import SparsityParams


class PebbleGameError(Exception):
    """Base class for engine errors."""


class IllegalMoveError(PebbleGameError):
    """A move whose preconditions do not hold in the current state."""


class InsufficientPebblesError(IllegalMoveError):
    def __init__(self, message: str = "insufficient pebbles"):
        super().__init__(message)


class ColorNotAvailableError(IllegalMoveError):
    def __init__(self, message: str = "color not available"):
        super().__init__(message)


@dataclass(frozen=True)
class AddEdgeMove:
    v: int
    w: int
    color: int


@dataclass(frozen=True)
class SlideMove:
    edge: int
    tail: int  # tail before the slide
    head: int  # head before the slide
    color: int  # color of the covering pebble taken from the head


Move = AddEdgeMove | SlideMove


class GameState:
    """Mutable pebble game configuration; single writer, no interior sharing."""

    __slots__ = (
        "params",
        "n",
        "tails",
        "heads",
        "colors",
        "pebbles",
        "peb_sum",
        "out_color",
        "in_edges",
        "component_id",
        "_next_component",
        "trace",
        "after_move",
    )

    def __init__(self, n: int, params: SparsityParams, *, record_trace: bool = False):
        if n < 1:
            raise ValueError("the game needs at least one vertex")
        k = params.k
        self.params = params
        self.n = n
        self.tails: list[int] = []
        self.heads: list[int] = []
        self.colors: list[int] = []
        self.pebbles: list[list[int]] = [[1] * k for _ in range(n)]
        self.peb_sum: list[int] = [k] * n
        # out_color[v][c] is the id of v's outgoing edge of color c, or -1.
        self.out_color: list[list[int]] = [[-1] * k for _ in range(n)]
        self.in_edges: list[set[int]] = [set() for _ in range(n)]
        self.component_id: list[int] = [0] * n
        self._next_component = 1
        self.trace: list[Move] | None = [] if record_trace else None
        self.after_move: Optional[Callable[["GameState", Move], None]] = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_parts(
        cls,
        n: int,
        params: SparsityParams,
        edges: Iterable[tuple[int, int, int]],
        pebbles: Iterable[Iterable[int]],
    ) -> "GameState":
        """Build a state directly from (tail, head, color) edges and pebble counts.

        Intended for tests and adversarial configurations; only structural
        impossibilities (two same-color out-edges at one vertex) are rejected.
        """
        state = cls(n, params)
        state.pebbles = [list(row) for row in pebbles]
        if len(state.pebbles) != n or any(len(row) != params.k for row in state.pebbles):
            raise ValueError("pebbles must be an n x k table of counts")
        state.peb_sum = [sum(row) for row in state.pebbles]
        for t, h, c in edges:
            eid = len(state.tails)
            state.tails.append(t)
            state.heads.append(h)
            state.colors.append(c)
            if state.out_color[t][c] != -1:
                raise ValueError(f"vertex {t} would have two outgoing edges of color {c}")
            state.out_color[t][c] = eid
            state.in_edges[h].add(eid)
        return state

    # -- simple accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.tails)

    def edge(self, eid: int) -> tuple[int, int, int]:
        return self.tails[eid], self.heads[eid], self.colors[eid]

    def peb(self, v: int) -> int:
        return self.peb_sum[v]

    def peb_pair(self, v: int, w: int) -> int:
        return self.peb_sum[v] if v == w else self.peb_sum[v] + self.peb_sum[w]

    def total_pebbles(self) -> int:
        return sum(self.peb_sum)

    def pebble_colors(self, v: int) -> list[int]:
        return [c for c in range(self.params.k) if self.pebbles[v][c] > 0]

    def out_edges(self, v: int) -> list[int]:
        """Outgoing edge ids of v in ascending edge id order."""
        outs = [e for e in self.out_color[v] if e >= 0]
        outs.sort()
        return outs

    def loop_count(self, v: int) -> int:
        return sum(1 for e in self.out_color[v] if e >= 0 and self.heads[e] == self.tails[e] == v)

    def out_degree_nonloop(self, v: int) -> int:
        return sum(1 for e in self.out_color[v] if e >= 0 and self.heads[e] != v)

    def span_subset(self, subset: Iterable[int]) -> int:
        s = set(subset)
        return sum(1 for e in range(self.m) if self.tails[e] in s and self.heads[e] in s)

    def out_subset(self, subset: Iterable[int]) -> int:
        s = set(subset)
        return sum(1 for e in range(self.m) if self.tails[e] in s and self.heads[e] not in s)

    def peb_subset(self, subset: Iterable[int]) -> int:
        return sum(self.peb_sum[v] for v in set(subset))

    def undirected_edges(self) -> list[tuple[int, int]]:
        return [(self.tails[e], self.heads[e]) for e in range(self.m)]

    def state_hash(self) -> str:
        """Deterministic digest of the full configuration (components excluded)."""
        payload = {
            "n": self.n,
            "k": self.params.k,
            "l": self.params.l,
            "edges": [[self.tails[e], self.heads[e], self.colors[e]] for e in range(self.m)],
            "pebbles": self.pebbles,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def _emit(self, move: Move) -> None:
        if self.trace is not None:
            self.trace.append(move)
        if self.after_move is not None:
            self.after_move(self, move)


def init_game(n: int, params: SparsityParams, *, record_trace: bool = False) -> GameState:
    """Fresh state: n vertices, no edges, one pebble of each color per vertex."""
    return GameState(n, params, record_trace=record_trace)


# -- moves -------------------------------------------------------------------


def add_edge(state: GameState, v: int, w: int, color: int) -> AddEdgeMove:
    """Add the edge vw, spending a pebble of `color` from v (preferred) or w.

    Requires at least l+1 pebbles on {v, w} and a pebble of `color` on one of
    them.  The endpoint the pebble is taken from becomes the tail.
    """
    params = state.params
    if not 0 <= color < params.k:
        raise ColorNotAvailableError(f"color {color} out of range")
    if state.peb_pair(v, w) < params.l + 1:
        raise InsufficientPebblesError()
    if state.pebbles[v][color] > 0:
        tail, head = v, w
    elif state.pebbles[w][color] > 0:
        tail, head = w, v
    else:
        raise ColorNotAvailableError()
    state.pebbles[tail][color] -= 1
    state.peb_sum[tail] -= 1
    eid = len(state.tails)
    state.tails.append(tail)
    state.heads.append(head)
    state.colors.append(color)
    # the spent pebble guarantees this color slot was empty
    state.out_color[tail][color] = eid
    state.in_edges[head].add(eid)
    move = AddEdgeMove(v, w, color)
    state._emit(move)
    return move


def pebble_slide(state: GameState, eid: int, color: int) -> SlideMove:
    """Reverse edge eid, covering it with a pebble of `color` from its head.

    The pebble that was on the edge returns to the old tail; the edge takes the
    covering pebble's color.
    """
    if not 0 <= eid < state.m:
        raise IllegalMoveError(f"no edge {eid}")
    t, h, old = state.tails[eid], state.heads[eid], state.colors[eid]
    if not 0 <= color < state.params.k or state.pebbles[h][color] <= 0:
        raise IllegalMoveError(f"no pebble of color {color} on vertex {h}")
    state.out_color[t][old] = -1
    state.pebbles[t][old] += 1
    state.peb_sum[t] += 1
    state.pebbles[h][color] -= 1
    state.peb_sum[h] -= 1
    state.tails[eid], state.heads[eid], state.colors[eid] = h, t, color
    state.out_color[h][color] = eid
    state.in_edges[h].discard(eid)
    state.in_edges[t].add(eid)
    move = SlideMove(eid, t, h, color)
    state._emit(move)
    return move


def apply_move(state: GameState, move: Move) -> Move:
    """Replay a recorded move, verifying slide orientation against the record."""
    if isinstance(move, AddEdgeMove):
        return add_edge(state, move.v, move.w, move.color)
    if state.m <= move.edge or (state.tails[move.edge], state.heads[move.edge]) != (
        move.tail,
        move.head,
    ):
        raise IllegalMoveError(f"stale slide record for edge {move.edge}")
    return pebble_slide(state, move.edge, move.color)


# -- pebble search -------------------------------------------------------------


def find_pebble(
    state: GameState, source: int, forbidden: frozenset[int] | set[int] = frozenset()
) -> tuple[list[int] | None, set[int]]:
    """Depth-first search from `source` for a pebbled vertex outside `forbidden`.

    Returns (path, visited): `path` is a list of edge ids forming a simple
    directed path from source to the found vertex (empty if source itself
    qualifies), or None if no pebble is reachable, in which case `visited` is
    the full reachable set.  Out-edges are explored in ascending edge id order.
    """
    peb_sum = state.peb_sum
    heads = state.heads
    if peb_sum[source] > 0 and source not in forbidden:
        return [], {source}
    visited = {source}
    parent: dict[int, int] = {}
    stack: list[tuple[int, Iterable[int]]] = [(source, iter(state.out_edges(source)))]
    found = -1
    while stack:
        x, it = stack[-1]
        advanced = False
        for e in it:
            y = heads[e]
            if y in visited:
                continue
            visited.add(y)
            parent[y] = e
            if peb_sum[y] > 0 and y not in forbidden:
                found = y
                stack.clear()
                advanced = True
                break
            stack.append((y, iter(state.out_edges(y))))
            advanced = True
            break
        if not advanced:
            stack.pop()
    if found < 0:
        return None, visited
    path: list[int] = []
    cur = found
    while cur != source:
        e = parent[cur]
        path.append(e)
        cur = state.tails[e]
    path.reverse()
    return path, visited


def bring_pebble(state: GameState, path: list[int]) -> list[Move]:
    """Slide along `path` in reverse edge order, moving one pebble to its start.

    The covering pebble at the path's end is the lowest color present; each
    later slide is covered by the pebble the previous slide dropped.
    """
    if not path:
        return []
    for a, b in zip(path, path[1:]):
        if state.heads[a] != state.tails[b]:
            raise IllegalMoveError("stale path: edges no longer form a chain")
    end = state.heads[path[-1]]
    avail = state.pebble_colors(end)
    if not avail:
        raise IllegalMoveError("stale path: no pebble at the end")
    cover = avail[0]
    moves = []
    for e in reversed(path):
        dropped = state.colors[e]
        moves.append(pebble_slide(state, e, cover))
        cover = dropped
    return moves


# -- component maintenance ------------------------------------------------------


def _saturated_block(state: GameState, v: int, w: int) -> list[int] | None:
    """The maximal tight vertex set containing {v, w}, or None if none exists.

    First a forward search confirms every pebble reachable from {v, w} already
    sits on {v, w}; then the backward closure of all other pebbled vertices is
    removed, leaving exactly the vertices that cannot reach a free pebble.
    """
    heads = state.heads
    peb_sum = state.peb_sum
    pair = {v, w}
    seen = set(pair)
    stack = [v, w] if v != w else [v]
    while stack:
        x = stack.pop()
        if peb_sum[x] > 0 and x not in pair:
            return None
        for e in state.out_color[x]:
            if e >= 0:
                y = heads[e]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    bad = {x for x in range(state.n) if peb_sum[x] > 0 and x not in pair}
    stack = list(bad)
    tails = state.tails
    while stack:
        y = stack.pop()
        for e in state.in_edges[y]:
            x = tails[e]
            if x not in bad:
                bad.add(x)
                stack.append(x)
    return [x for x in range(state.n) if x not in bad]


def update_components(state: GameState, v: int, w: int) -> None:
    """Detect and tag the block containing {v, w} after an accepted edge.

    Triggered when exactly l pebbles remain on {v, w} and no further pebble is
    reachable: the saturated set is tight and all its vertices get a fresh
    shared component id.
    """
    if state.peb_pair(v, w) != state.params.l:
        return
    block = _saturated_block(state, v, w)
    if block is None:
        return
    cid = state._next_component
    state._next_component += 1
    component_id = state.component_id
    for x in block:
        component_id[x] = cid


def reject_fast(state: GameState, v: int, w: int) -> bool:
    """True iff v and w already share a component, so the edge must be rejected."""
    cid = state.component_id
    return cid[v] != 0 and cid[v] == cid[w]


# -- invariant checking ----------------------------------------------------------


@dataclass(frozen=True)
class InvariantFailure:
    name: str
    detail: str
    witness: tuple[int, ...] = ()


@dataclass
class InvariantReport:
    ok: bool
    failures: list[InvariantFailure] = field(default_factory=list)
    subsets_checked: int = 0
    exhaustive: bool = True


def check_invariants(
    state: GameState, *, subset_limit: int = 8, samples: int = 200, seed: int = 0
) -> InvariantReport:
    """Evaluate the engine invariants on a state.

    Per-vertex and per-color balances and monochromatic path termination are
    checked exactly; the subset balance is exhaustive for n <= subset_limit and
    sampled (seeded) above.  On failure the report carries a witness.
    """
    import random

    failures: list[InvariantFailure] = []
    k, l, n = state.params.k, state.params.l, state.n

    # total pebbles: a game on very few vertices starts with fewer than l
    needed = min(l, k * n)
    total = state.total_pebbles()
    if total < needed:
        failures.append(
            InvariantFailure("min-pebbles", f"{total} pebbles on vertices, need >= {needed}")
        )

    # per-vertex balance: loops + outgoing + pebbles = k
    for v in range(n):
        got = state.loop_count(v) + state.out_degree_nonloop(v) + state.peb_sum[v]
        if got != k:
            failures.append(
                InvariantFailure("vertex-balance", f"vertex {v}: {got} != k={k}", (v,))
            )

    # per-vertex per-color slot: exactly one of {pebble, outgoing edge}
    for v in range(n):
        for c in range(k):
            slots = (1 if state.out_color[v][c] >= 0 else 0) + state.pebbles[v][c]
            if slots != 1:
                failures.append(
                    InvariantFailure(
                        "color-slot", f"vertex {v} color {c}: pebbles+out = {slots} != 1", (v,)
                    )
                )

    # monochromatic paths end at the first same-color pebble or in a cycle
    for v in range(n):
        for c in range(k):
            cur = v
            seen = set()
            while True:
                if state.pebbles[cur][c] > 0:
                    if state.out_color[cur][c] >= 0:
                        failures.append(
                            InvariantFailure(
                                "monochrome-termination",
                                f"color {c}: pebbled vertex {cur} also has an outgoing "
                                f"color-{c} edge",
                                (v, cur),
                            )
                        )
                    break
                e = state.out_color[cur][c]
                if e < 0:
                    failures.append(
                        InvariantFailure(
                            "monochrome-termination",
                            f"color {c}: path from {v} dies at {cur} with no pebble",
                            (v, cur),
                        )
                    )
                    break
                nxt = state.heads[e]
                if nxt in seen or nxt == cur:
                    break  # cycle
                seen.add(cur)
                cur = nxt

    # subset balance: span + out + pebbles = k * |subset|
    subsets_checked = 0
    exhaustive = n <= subset_limit
    if exhaustive:
        masks = range(1, 1 << n)

        def verts_of(mask: int) -> list[int]:
            return [i for i in range(n) if mask >> i & 1]

        candidates = (verts_of(m) for m in masks)
    else:
        rng = random.Random(seed)
        pool: list[list[int]] = [[v] for v in range(n)]
        for _ in range(samples):
            size = rng.randint(2, n)
            pool.append(rng.sample(range(n), size))
        candidates = iter(pool)
    for subset in candidates:
        subsets_checked += 1
        got = state.span_subset(subset) + state.out_subset(subset) + state.peb_subset(subset)
        if got != k * len(subset):
            failures.append(
                InvariantFailure(
                    "subset-balance",
                    f"subset {sorted(subset)}: span+out+peb = {got} != {k * len(subset)}",
                    tuple(sorted(subset)),
                )
            )
            break

    return InvariantReport(not failures, failures, subsets_checked, exhaustive)


# -- trace files -------------------------------------------------------------------


def trace_to_lines(state: GameState) -> list[str]:
    """Serialize a recorded game as JSON lines with an init header and hash footer."""
    if state.trace is None:
        raise ValueError("state was created without trace recording")
    lines = [
        json.dumps(
            {"op": "init", "n": state.n, "k": state.params.k, "l": state.params.l},
            sort_keys=True,
            separators=(",", ":"),
        )
    ]
    for move in state.trace:
        if isinstance(move, AddEdgeMove):
            rec = {"op": "add", "v": move.v, "w": move.w, "color": move.color}
        else:
            rec = {
                "op": "slide",
                "edge": move.edge,
                "tail": move.tail,
                "head": move.head,
                "color": move.color,
            }
        lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
    lines.append(
        json.dumps({"op": "end", "hash": state.state_hash()}, sort_keys=True, separators=(",", ":"))
    )
    return lines


class TraceError(PebbleGameError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message if index is None else f"move {index}: {message}")


def replay_trace(
    lines: Iterable[str], *, debug_invariants: bool = False, subset_limit: int = 8
) -> GameState:
    """Replay a serialized trace; raises TraceError on illegal moves or hash mismatch."""
    state: GameState | None = None
    expected_hash: str | None = None
    move_index = 0
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TraceError(f"bad JSON: {exc}") from None
        op = rec.get("op")
        if op == "init":
            state = init_game(rec["n"], SparsityParams(rec["k"], rec["l"]))
            continue
        if state is None:
            raise TraceError("trace does not start with an init record")
        if op == "add":
            move: Move = AddEdgeMove(rec["v"], rec["w"], rec["color"])
        elif op == "slide":
            move = SlideMove(rec["edge"], rec["tail"], rec["head"], rec["color"])
        elif op == "end":
            expected_hash = rec["hash"]
            continue
        else:
            raise TraceError(f"unknown op {op!r}", move_index)
        try:
            apply_move(state, move)
        except IllegalMoveError as exc:
            raise TraceError(str(exc), move_index) from None
        if debug_invariants:
            report = check_invariants(state, subset_limit=subset_limit)
            if not report.ok:
                raise TraceError(f"invariant violated: {report.failures[0].name}", move_index)
        move_index += 1
    if state is None:
        raise TraceError("empty trace")
    if expected_hash is not None and state.state_hash() != expected_hash:
        raise TraceError("final state hash does not match the trace footer")
    return state
