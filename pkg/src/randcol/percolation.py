"""Threshold bootstrap percolation, its equivalence with t-cores, and
the two randomised spread processes run on blow-up constructions,
together with super-vertex classification and the boundary-resilience
audit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import InputError
from .generators import BlowUpLayout, ConstructionParams
from .graphs import DiGraph, Graph, vertex_boundary
from .colouring import t_core
from .sampling import RngStream


@dataclass(frozen=True)
class PercolationState:
    """Fixpoint of a spread process.

    round_trace[0] is the seed size; round_trace[i] for i >= 1 counts
    vertices newly infected in synchronous round i. Exactly one of
    protected_edges / resilient_vertices is set by the randomised
    processes (their static random set R); both stay None for the plain
    threshold engine.
    """

    infected: frozenset
    round_trace: tuple
    fixpoint_reached: bool
    protected_edges: frozenset | None = None
    resilient_vertices: frozenset | None = None


def _normalise_thresholds(g: Graph, threshold_of) -> list:
    if callable(threshold_of):
        thresholds = [threshold_of(v) for v in range(g.n)]
    elif isinstance(threshold_of, Mapping):
        thresholds = [threshold_of[v] for v in range(g.n)]
    else:
        thresholds = list(threshold_of)
        if len(thresholds) != g.n:
            raise InputError("threshold sequence length must equal vertex count")
    for v, th in enumerate(thresholds):
        if th < 0:
            raise InputError(f"negative threshold at vertex {v}")
    return thresholds


def bootstrap_percolate(g: Graph, initially_infected, threshold_of) -> PercolationState:
    """Least fixpoint of: infect v once it has >= threshold_of(v)
    infected neighbours. Thresholds of 0 ignite in round one even
    without neighbours; math.inf disables a vertex entirely.
    """
    seed = frozenset(initially_infected)
    for v in seed:
        if not (0 <= v < g.n):
            raise InputError(f"seed vertex {v} out of range")
    thresholds = _normalise_thresholds(g, threshold_of)
    adj = g.adjacency()
    infected = set(seed)
    counts = [0] * g.n
    trace = [len(seed)]
    current: Iterable[int] = seed
    auto = [v for v in range(g.n) if v not in infected and thresholds[v] <= 0]
    while True:
        nxt = set(auto)
        auto = []
        for v in current:
            for w in adj[v]:
                if w not in infected:
                    counts[w] += 1
                    if counts[w] >= thresholds[w]:
                        nxt.add(w)
        nxt -= infected
        if not nxt:
            break
        infected |= nxt
        trace.append(len(nxt))
        current = nxt
    return PercolationState(
        infected=frozenset(infected),
        round_trace=tuple(trace),
        fixpoint_reached=True,
    )


def t_core_via_percolation(g: Graph, t: int) -> frozenset:
    """t-core computed by infection: seed every vertex of degree < t and
    spread removal with per-vertex threshold deg(v) - t + 1 (lose that
    many neighbours and you drop below t). The complement of the
    fixpoint equals the peeled t-core exactly.
    """
    if t < 0:
        raise InputError("t must be >= 0")
    deg = g.degrees()
    seed = [v for v in range(g.n) if deg[v] < t]
    # vertices below t are seeds, so clamping their raw (negative)
    # thresholds changes nothing
    thresholds = [max(0, deg[v] - t + 1) for v in range(g.n)]
    state = bootstrap_percolate(g, seed, thresholds)
    return frozenset(range(g.n)) - state.infected


def thm3_process(h: Graph, p_protect: float, r: int, rng: RngStream) -> PercolationState:
    """Spread over h from {r} where a vertex joins with two infected
    neighbours, or with one infected neighbour if none of its incident
    edges is protected. Protection is a static per-edge coin flip at
    rate p_protect drawn from rng's "protect" child stream, so sweeps
    over p with a shared stream are coupled monotonely.
    """
    if not (0.0 <= p_protect <= 1.0):
        raise InputError(f"p_protect {p_protect} outside [0, 1]")
    if not (0 <= r < h.n):
        raise InputError(f"root {r} out of range")
    u = rng.child("protect").uniforms(h.m)
    protected = frozenset(h.edges[i] for i in range(h.m) if u[i] < p_protect)
    incident = [False] * h.n
    for a, b in protected:
        incident[a] = incident[b] = True
    thresholds = [2 if incident[v] else 1 for v in range(h.n)]
    state = bootstrap_percolate(h, {r}, thresholds)
    return PercolationState(
        infected=state.infected,
        round_trace=state.round_trace,
        fixpoint_reached=True,
        protected_edges=protected,
    )


def thm4_process(h: DiGraph, p_resilient: float, r: int, rng: RngStream) -> PercolationState:
    """Directed spread from {r}: out-neighbours join unless they belong
    to the static random set R, drawn per-vertex at rate p_resilient
    from rng's "resilient" child stream. The root joins regardless."""
    if not (0.0 <= p_resilient <= 1.0):
        raise InputError(f"p_resilient {p_resilient} outside [0, 1]")
    if not (0 <= r < h.n):
        raise InputError(f"root {r} out of range")
    u = rng.child("resilient").uniforms(h.n)
    blocked = frozenset(v for v in range(h.n) if u[v] < p_resilient)
    infected = {r}
    trace = [1]
    current = [r]
    while current:
        nxt = set()
        for v in current:
            for w in h.out_neighbours(v):
                if w not in infected and w not in blocked:
                    nxt.add(w)
        if not nxt:
            break
        infected |= nxt
        trace.append(len(nxt))
        current = sorted(nxt)
    return PercolationState(
        infected=frozenset(infected),
        round_trace=tuple(trace),
        fixpoint_reached=True,
        resilient_vertices=blocked,
    )


def thm3_fixpoint_violations(h: Graph, state: PercolationState) -> list:
    """Outside vertices that the rule says should have joined."""
    protected = state.protected_edges or frozenset()
    incident = [False] * h.n
    for a, b in protected:
        incident[a] = incident[b] = True
    bad = []
    for v in range(h.n):
        if v in state.infected:
            continue
        cnt = sum(1 for w in h.neighbours(v) if w in state.infected)
        if cnt >= 2 or (cnt >= 1 and not incident[v]):
            bad.append(v)
    return bad


def thm4_fixpoint_violations(h: DiGraph, state: PercolationState) -> list:
    """Members of the out-boundary of the fixpoint that are not in R."""
    blocked = state.resilient_vertices or frozenset()
    return sorted(vertex_boundary(h, state.infected) - blocked)


# --- super-vertex classification ---------------------------------------------


@dataclass(frozen=True)
class SuperVertexStatus:
    """Per-super-vertex classification over a blow-up.

    status holds "dead" / "nearly_dead" / "alive" (most specific wins;
    dead implies nearly dead). surviving_count[v][j-1] counts core
    survivors in layer j of super-vertex v. resilient marks
    super-vertices containing a resilient adjacent-layer pair; empty
    when not evaluated (single-layer blow-ups).
    """

    status: tuple
    surviving_count: tuple
    core: frozenset
    resilient: tuple = ()
    dead_component: frozenset | None = None

    def is_dead(self, v: int) -> bool:
        return self.status[v] == "dead"

    def is_nearly_dead(self, v: int) -> bool:
        return self.status[v] in ("dead", "nearly_dead")

    def dead_set(self) -> frozenset:
        return frozenset(v for v, st in enumerate(self.status) if st == "dead")

    def nearly_dead_set(self) -> frozenset:
        return frozenset(v for v in range(len(self.status)) if self.is_nearly_dead(v))


def _survivor_table(core: frozenset, layout: BlowUpLayout) -> list:
    table = [[0] * layout.layers for _ in range(layout.n_super)]
    for v in core:
        table[layout.h_vertex_of(v)][layout.layer_of(v) - 1] += 1
    return table


def classify_supervertices_thm3(
    g_half: Graph,
    layout: BlowUpLayout,
    t: int,
    root: int | None = None,
    h: Graph | None = None,
) -> SuperVertexStatus:
    """Mark each super-vertex dead iff none of its vertices lies in the
    t-core of g_half. With root and the base graph h given, also report
    the connected set of dead super-vertices containing the root (the
    root is included even if it is not dead)."""
    if g_half.n != layout.n_vertices:
        raise InputError("graph does not match layout dimensions")
    core = t_core(g_half, t)
    table = _survivor_table(core, layout)
    status = tuple(
        "dead" if sum(row) == 0 else "alive" for row in table
    )
    dead_component = None
    if root is not None:
        if h is None:
            raise InputError("dead-component report needs the base graph h")
        if h.n != layout.n_super:
            raise InputError("base graph does not match layout")
        dead = {v for v, st in enumerate(status) if st == "dead"}
        seen = {root}
        queue = [root]
        while queue:
            v = queue.pop()
            for w in h.neighbours(v):
                if w in dead and w not in seen:
                    seen.add(w)
                    queue.append(w)
        dead_component = frozenset(seen)
    return SuperVertexStatus(
        status=status,
        surviving_count=tuple(tuple(row) for row in table),
        core=core,
        dead_component=dead_component,
    )


def _count_edges_into_layer(
    g: Graph, layout: BlowUpLayout, vertex: int, super_v: int, layer: int
) -> int:
    cnt = 0
    for w in g.neighbours(vertex):
        if layout.h_vertex_of(w) == super_v and layout.layer_of(w) == layer:
            cnt += 1
    return cnt


def resilient_pair_detect(
    g_half: Graph,
    layout: BlowUpLayout,
    params: ConstructionParams,
    edge_graph: Graph | None = None,
) -> SuperVertexStatus:
    """Classify super-vertices of a gadget blow-up.

    Core survival (dead / nearly-dead status, per-layer survivor counts)
    is read from g_half at threshold params.t. A layer pair (j, j+1) is
    resilient when, in edge_graph (default g_half; pass the graph of
    edges that survived the second deletion round alone to measure
    second-round resilience), one side has at least k/s vertices each
    sending at least k/4 edges to the other side.
    """
    if params.mode != "gadget":
        raise InputError("params must be in gadget mode")
    if g_half.n != layout.n_vertices:
        raise InputError("graph does not match layout dimensions")
    if edge_graph is None:
        edge_graph = g_half
    if edge_graph.n != layout.n_vertices:
        raise InputError("edge graph does not match layout dimensions")
    k, s = params.k, params.s
    core = t_core(g_half, params.t)
    table = _survivor_table(core, layout)
    status = []
    resilient = []
    for v in range(layout.n_super):
        row = table[v]
        if sum(row) == 0:
            status.append("dead")
        elif all(row[j - 1] * s < k for j in range(2, s + 3)):
            status.append("nearly_dead")
        else:
            status.append("alive")
        found = False
        for j in range(1, s + 3):
            for lo, hi in ((j, j + 1), (j + 1, j)):
                good = 0
                for v_star in layout.members(v, lo):
                    if _count_edges_into_layer(edge_graph, layout, v_star, v, hi) * 4 >= k:
                        good += 1
                if good * s >= k:
                    found = True
                    break
            if found:
                break
        resilient.append(found)
    return SuperVertexStatus(
        status=tuple(status),
        surviving_count=tuple(tuple(row) for row in table),
        core=core,
        resilient=tuple(resilient),
    )


@dataclass(frozen=True)
class BoundaryResilienceReport:
    """Check that every super-vertex on the out-boundary of the
    nearly-dead reachable set contains a resilient pair. Violations are
    reported, not raised: the guarantee is asymptotic and desk-scale
    instances may sit outside its regime."""

    reachable_nearly_dead: frozenset
    boundary: frozenset
    violations: tuple

    @property
    def holds(self) -> bool:
        return not self.violations


def boundary_resilience_audit(
    h: DiGraph,
    layout: BlowUpLayout,
    params: ConstructionParams,
    final_graph: Graph,
    round2_graph: Graph,
    root: int,
) -> BoundaryResilienceReport:
    """Audit the boundary-resilience claim on one concrete outcome.

    final_graph is the graph after both deletion rounds (defines
    survival); round2_graph contains the edges missed by the second
    round alone (defines resilient pairs). The nearly-dead set is grown
    from root along out-arcs staying inside nearly-dead super-vertices;
    the root is included unconditionally.
    """
    if not (0 <= root < h.n):
        raise InputError(f"root {root} out of range")
    if h.n != layout.n_super:
        raise InputError("base digraph does not match layout")
    cls = resilient_pair_detect(final_graph, layout, params, edge_graph=round2_graph)
    nearly = cls.nearly_dead_set()
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop()
        for w in h.out_neighbours(v):
            if w in nearly and w not in seen:
                seen.add(w)
                queue.append(w)
    t_set = frozenset(seen)
    boundary = vertex_boundary(h, t_set)
    violations = tuple(sorted(v for v in boundary if not cls.resilient[v]))
    return BoundaryResilienceReport(
        reachable_nearly_dead=t_set,
        boundary=boundary,
        violations=violations,
    )
