"""Canonical pebble game: cycle-avoiding moves and the full construction.

Canonical add-edge covers a new edge with a color carried by both endpoints
when one exists (so the two tree roots merge without closing a cycle) and with
the highest color present otherwise.  Canonical slides never close a
monochromatic cycle; the planner sketches a slide path that needs no such move
by rerouting along monochromatic trees, and a dynamic executor with the same
guarantee backs it up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .graph import Multigraph, SparsityParams
from .pebbles import (
    GameState,
    IllegalMoveError,
    Move,
    add_edge,
    find_pebble,
    init_game,
    pebble_slide,
    reject_fast,
    update_components,
)


class CanonicalError(Exception):
    pass


class PlanUnsoundError(CanonicalError):
    """The sketch cannot be trusted (broken walk, oscillating reroute, or a
    simulated slide that closes a cycle); callers take the dynamic route."""


class CanonicalViolationError(CanonicalError):
    """An execution was about to close a monochromatic cycle."""


def canonical_add_edge(state: GameState, v: int, w: int) -> Move:
    """Add vw with the canonical color choice.

    Shared color (lowest index) when some color has a pebble on both distinct
    endpoints; otherwise the highest color present on {v, w}.  A loop always
    closes a cycle in its own color, so it takes the highest color, keeping the
    low (tree) colors acyclic.
    """
    k = state.params.k
    if v == w:
        present = state.pebble_colors(v)
        if not present:
            raise IllegalMoveError("no pebble available on the loop vertex")
        return add_edge(state, v, v, present[-1])
    shared = [c for c in range(k) if state.pebbles[v][c] > 0 and state.pebbles[w][c] > 0]
    if shared:
        return add_edge(state, v, w, shared[0])
    present = [c for c in range(k) if state.pebbles[v][c] > 0 or state.pebbles[w][c] > 0]
    if not present:
        raise IllegalMoveError("no pebble available on either endpoint")
    return add_edge(state, v, w, present[-1])


def creates_monochromatic_cycle(state: GameState, eid: int, cover: int) -> bool:
    """Would sliding edge eid covered with color `cover` close a cycle in `cover`?

    Covering with the edge's own color only re-roots its tree.  Otherwise the
    reversed edge closes a cycle exactly when the old tail's cover-colored
    out-chain already leads to the old head.
    """
    t, h, old = state.edge(eid)
    if old == cover:
        return False
    if t == h:
        return True  # recoloring a loop starts a fresh one-edge cycle
    x = t
    seen = {t}
    heads = state.heads
    out_color = state.out_color
    while True:
        f = out_color[x][cover]
        if f < 0:
            return False
        y = heads[f]
        if y == h:
            return True
        if y in seen:
            return False  # ran into a pre-existing cycle elsewhere
        seen.add(y)
        x = y


@dataclass
class CanonicalPathPlan:
    """A slide path sketch: successor edge and tentative pebble color per vertex.

    Executing the steps in reverse order brings one pebble to `source` without
    any cycle-closing slide.
    """

    source: int
    target: int
    succ: dict[int, int] = field(default_factory=dict)
    colors: dict[int, int] = field(default_factory=dict)
    steps: list[tuple[int, int, int]] = field(default_factory=list)  # (tail, edge, head)


def _walk_plan(state: GameState, source: int, target: int, succ: dict[int, int]):
    """Materialize the successor walk; raises PlanUnsoundError on any defect."""
    steps: list[tuple[int, int, int]] = []
    seen_edges: set[int] = set()
    x = source
    limit = state.n * state.params.k + 1
    while x != target:
        if len(steps) > limit:
            raise PlanUnsoundError("successor walk does not terminate")
        e = succ.get(x, -1)
        if e < 0 or state.tails[e] != x or e in seen_edges:
            raise PlanUnsoundError("successor walk leaves the sketch")
        seen_edges.add(e)
        y = state.heads[e]
        steps.append((x, e, y))
        x = y
    return steps


def canonical_find_pebble(
    state: GameState, source: int, forbidden: frozenset[int] | set[int] = frozenset()
) -> CanonicalPathPlan | None:
    plan, _ = plan_pebble_path(state, source, forbidden)
    return plan


def plan_pebble_path(
    state: GameState, source: int, forbidden: frozenset[int] | set[int] = frozenset()
) -> tuple[CanonicalPathPlan | None, set[int]]:
    """Plan a cycle-free pebble route to `source`; also report the reachable set.

    Returns (plan, visited); plan is None exactly when the plain search fails.
    May raise PlanUnsoundError in pathological sketches; callers fall back to
    the dynamic executor on the same search path.
    """
    path, visited = find_pebble(state, source, forbidden)
    if path is None:
        return None, visited
    if not path:
        return CanonicalPathPlan(source, source), visited
    heads = state.heads
    ecolors = state.colors
    out_color = state.out_color
    target = heads[path[-1]]
    colors: dict[int, int] = {target: state.pebble_colors(target)[0]}
    succ: dict[int, int] = {}
    verts = [source]
    for e in path:
        verts.append(heads[e])

    def resolve(a: int, e: int, b: int) -> None:
        guard: set[tuple[int, int]] = set()
        while True:
            ce = ecolors[e]
            q = colors[b]
            if q == ce:
                succ[a] = e
                colors[a] = ce
                return
            # sliding e would cover it with q while dropping ce on a; if a's
            # q-chain touches the planned path, reroute along it instead
            chain: list[tuple[int, int]] = []
            x = a
            seen = {a}
            hit = -1
            while True:
                f = out_color[x][q]
                if f < 0:
                    break
                y = heads[f]
                chain.append((x, f))
                if y in colors:
                    hit = y
                    break
                if y in seen:
                    chain.clear()
                    break
                seen.add(y)
                x = y
            if hit < 0:
                succ[a] = e
                colors[a] = ce
                return
            for xj, fj in chain:
                succ[xj] = fj
                colors[xj] = q
            if colors[hit] == q:
                return
            # the chain's last hop still mismatches; re-examine it
            a, e, b = chain[-1][0], chain[-1][1], hit
            key = (a, colors[b])
            if key in guard:
                # the reroute oscillates between two mismatched chains; the
                # sketch cannot be trusted, so hand over to the dynamic route
                raise PlanUnsoundError("reroute oscillation")
            guard.add(key)

    for i in range(len(path) - 1, -1, -1):
        a = verts[i]
        if a in colors:
            continue
        resolve(a, path[i], verts[i + 1])

    plan = CanonicalPathPlan(source, target, succ, colors)
    plan.steps = _walk_plan(state, source, target, succ)
    if not _plan_is_safe(state, plan):
        raise PlanUnsoundError("sketch would close a monochromatic cycle")
    return plan, visited


def _plan_is_safe(state: GameState, plan: CanonicalPathPlan) -> bool:
    """Simulate the plan's slides on an overlay and reject any cycle-closing one.

    The sketch is computed against the pre-move configuration, but execution
    mutates edges nearest the pebble first; replaying the slides against
    overlay-patched slots checks the condition each slide will actually face.
    """
    slot: dict[tuple[int, int], int] = {}
    edge_over: dict[int, tuple[int, int, int]] = {}
    out_color = state.out_color
    tails, heads, ecolors = state.tails, state.heads, state.colors

    def get_slot(v: int, c: int) -> int:
        return slot.get((v, c), out_color[v][c])

    def get_edge(e: int) -> tuple[int, int, int]:
        return edge_over.get(e, (tails[e], heads[e], ecolors[e]))

    for a, e, b in reversed(plan.steps):
        cover = plan.colors[b]
        t, h, old = get_edge(e)
        if old != cover:
            if t == h:
                return False
            x, seen = t, {t}
            while True:
                f = get_slot(x, cover)
                if f < 0:
                    break
                _, y, _ = get_edge(f)
                if y == h:
                    return False
                if y in seen:
                    break
                seen.add(y)
                x = y
        slot[(t, old)] = -1
        slot[(h, cover)] = e
        edge_over[e] = (h, t, cover)
    return True


def execute_plan(
    state: GameState,
    plan: CanonicalPathPlan,
    *,
    on_slide: Optional[Callable[[GameState, int, int], None]] = None,
) -> list[Move]:
    """Run the plan's slides from the pebble end back to the source.

    Plans produced by the planner are pre-verified cycle-free; a foreign plan
    that would close a cycle is rejected before the offending slide.
    """
    moves: list[Move] = []
    for a, e, b in reversed(plan.steps):
        cover = plan.colors[b]
        if on_slide is not None:
            on_slide(state, e, cover)
        if state.colors[e] != cover and creates_monochromatic_cycle(state, e, cover):
            raise CanonicalViolationError(
                f"planned slide on edge {e} covered with color {cover} closes a cycle"
            )
        moves.append(pebble_slide(state, e, cover))
    return moves


def _monochromatic_chain_to(state: GameState, start: int, color: int, goal: int) -> list[int] | None:
    """Edge ids of start's color-chain up to `goal`, or None if it never arrives."""
    x = start
    chain: list[int] = []
    seen = {start}
    while True:
        f = state.out_color[x][color]
        if f < 0:
            return None
        chain.append(f)
        y = state.heads[f]
        if y == goal:
            return chain
        if y in seen:
            return None
        seen.add(y)
        x = y


def bring_pebble_dynamic(
    state: GameState,
    path: list[int],
    *,
    on_slide: Optional[Callable[[GameState, int, int], None]] = None,
) -> list[Move]:
    """Slide a pebble along `path` to its start, avoiding cycle-closing covers.

    Whenever every available covering pebble would close a cycle, the path
    suffix is replaced by the covering color's tree path from its first touch,
    whose slides are all same-colored and safe.  Each replacement strictly
    shortens the unprocessed prefix, so this always terminates.
    """
    path = list(path)
    moves: list[Move] = []
    while path:
        e = path[-1]
        h = state.heads[e]
        ce = state.colors[e]
        avail = state.pebble_colors(h)
        if not avail:
            raise IllegalMoveError("dynamic path lost its pebble")
        pick = -1
        if ce in avail:
            pick = ce
        else:
            for c in avail:
                if not creates_monochromatic_cycle(state, e, c):
                    pick = c
                    break
        if pick >= 0:
            if on_slide is not None:
                on_slide(state, e, pick)
            moves.append(pebble_slide(state, e, pick))
            path.pop()
            continue
        # every cover closes a cycle in its color; shortcut along the lowest one
        q = avail[0]
        replaced = False
        for idx in range(len(path)):
            z = state.tails[path[idx]]
            chain = _monochromatic_chain_to(state, z, q, h)
            if chain is not None:
                path = path[:idx] + chain
                replaced = True
                break
        if not replaced:
            raise CanonicalError("shortcut target vanished; state corrupted")
    return moves


def collect_pebbles_canonically(
    state: GameState,
    v: int,
    w: int,
    target: int | None = None,
    *,
    on_slide: Optional[Callable[[GameState, int, int], None]] = None,
) -> bool:
    """Gather at least `target` (default l+1) pebbles on {v, w} with canonical slides.

    Fills v first, then w; pebbles already on {v, w} are never slid away.
    When the sketched plan cannot be trusted, the dynamic shortcut executor
    brings the pebble instead.  Returns False when the reachable region is
    exhausted short of the target.
    """
    params = state.params
    goal = params.l + 1 if target is None else target
    forbidden = frozenset((v, w))
    sources = (v,) if v == w else (v, w)
    while state.peb_pair(v, w) < goal:
        moved = False
        for src in sources:
            if state.peb_sum[src] >= params.k:
                continue
            try:
                plan, _ = plan_pebble_path(state, src, forbidden)
            except PlanUnsoundError:
                path, _ = find_pebble(state, src, forbidden)
                if path is not None:
                    bring_pebble_dynamic(state, path, on_slide=on_slide)
                    moved = True
                    break
                continue
            if plan is not None:
                execute_plan(state, plan, on_slide=on_slide)
                moved = True
                break
        if not moved:
            return False
    return True


@dataclass
class ConstructionResult:
    """Outcome of running the canonical game over a multigraph's edge list."""

    graph: Multigraph
    params: SparsityParams
    state: GameState
    accepted: list[int]
    rejected: list[int]

    def all_accepted(self) -> bool:
        return not self.rejected

    def pebbles_remaining(self) -> int:
        return self.state.total_pebbles()

    def is_tight(self) -> bool:
        return self.all_accepted() and self.pebbles_remaining() == self.params.l

    def verdict(self) -> str:
        if self.rejected:
            return "not-sparse"
        return "tight" if self.is_tight() else "sparse"


def run_canonical_game(
    g: Multigraph,
    params: SparsityParams,
    *,
    record_trace: bool = False,
    on_slide: Optional[Callable[[GameState, int, int], None]] = None,
    after_move: Optional[Callable[[GameState, Move], None]] = None,
) -> ConstructionResult:
    """Process g's edges in order, keeping a maximum-size sparse subgraph.

    Accepted edges are added canonically; rejection is a normal outcome.  Each
    edge is first screened by the component map, then by pebble collection.
    """
    if g.n < 1:
        raise ValueError("the game needs at least one vertex")
    state = init_game(g.n, params, record_trace=record_trace)
    state.after_move = after_move
    accepted: list[int] = []
    rejected: list[int] = []
    loops_forbidden = params.l >= params.k
    for eid, (u, v) in enumerate(g.edges):
        if u == v and loops_forbidden:
            rejected.append(eid)
            continue
        if reject_fast(state, u, v):
            rejected.append(eid)
            continue
        if collect_pebbles_canonically(state, u, v, on_slide=on_slide):
            canonical_add_edge(state, u, v)
            accepted.append(eid)
        else:
            rejected.append(eid)
        # a failed collection exposes the same saturated block an accepted
        # tight edge does, so both feed the component map
        update_components(state, u, v)
    return ConstructionResult(g, params, state, accepted, rejected)


def monochromatic_cycle_colors(state: GameState) -> list[int]:
    """Colors that currently contain a directed monochromatic cycle (loops count)."""
    bad: list[int] = []
    for c in range(state.params.k):
        status = [0] * state.n  # 0 unseen, 1 active, 2 done
        found = False
        for v in range(state.n):
            if status[v] or found:
                continue
            chain = []
            x = v
            while True:
                if status[x] == 1:
                    found = True
                    break
                if status[x] == 2:
                    break
                status[x] = 1
                chain.append(x)
                e = state.out_color[x][c]
                if e < 0:
                    break
                y = state.heads[e]
                if y == x:
                    found = True  # loop edge
                    break
                x = y
            for z in chain:
                status[z] = 2
            if found:
                break
        if found:
            bad.append(c)
    return bad
