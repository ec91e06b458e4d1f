"""Breadth-first exploration of H(Sigma) and H(X).

In ``topo`` mode vertices are canonical forms of maps, so balls live in the quotient
graph. In ``weighted`` mode vertices are weighted keys and balls are rooted and exact.
"""
import logging
import random
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from config import DRIFT_TOL, MEMORY_CAP, REMOVAL_CAP

from .errors import MemoryBudgetExceeded, MoveError, NotConnectedWithinBudget
from .hyp_geom import check_geometry, renormalized, state_residual
from .moves_topo import MoveEdge, apply_move, neighbor_states
from .surface_core import canonical_form, key_digest, validate
from .weighted_graph import WeightedState, apply_weighted_move, weighted_key, weighted_neighbor_states

logger = logging.getLogger(__name__)

TOPO = "topo"
WEIGHTED = "weighted"
MODES = (TOPO, WEIGHTED)


@dataclass(frozen=True)
class Mode:
    """How to key, expand and move states of one graph"""

    name: str
    key: Callable[[Any], bytes]
    neighbors: Callable[[Any], List[Tuple[MoveEdge, Any]]]
    apply: Callable[[Any, MoveEdge], Tuple[Any, MoveEdge]]


def mode_for(name: str, removal_cap: int = REMOVAL_CAP) -> Mode:
    if name == TOPO:
        return Mode(TOPO, canonical_form, lambda state: neighbor_states(state, removal_cap), apply_move)
    if name == WEIGHTED:
        return Mode(WEIGHTED, weighted_key, weighted_neighbor_states, apply_weighted_move)
    raise MoveError(f"Unknown exploration mode {name}")


@dataclass
class QuotientGraph:
    """Explored ball: keys as vertices, move kinds on edges, one realizing state per vertex"""

    mode: str
    root_key: bytes
    radius: int
    graph: nx.Graph = field(default_factory=nx.Graph)
    states: Dict[bytes, Any] = field(default_factory=dict)
    provenance: Dict[Tuple[bytes, bytes], List[MoveEdge]] = field(default_factory=dict)
    complete: bool = False

    def add_vertex(self, key: bytes, state: Any, depth: int) -> None:
        self.graph.add_node(key, depth=depth)
        self.states[key] = state

    def add_edge(self, source: bytes, target: bytes, edge: MoveEdge) -> None:
        if source == target:
            return
        pair = (source, target) if source <= target else (target, source)
        if self.graph.has_edge(source, target):
            self.graph.edges[source, target]["kinds"].add(edge.kind)
        else:
            self.graph.add_edge(source, target, kinds={edge.kind})
        self.provenance.setdefault(pair, []).append(edge)

    def vertices(self) -> List[bytes]:
        """Vertices by depth, then key"""
        return sorted(self.graph.nodes, key=lambda k: (self.graph.nodes[k]["depth"], k))

    def depth(self, key: bytes) -> int:
        return self.graph.nodes[key]["depth"]

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    def __contains__(self, key: bytes) -> bool:
        return key in self.states


def _expand(mode: Mode, states: Sequence[Any], threads: int) -> List[List[Tuple[MoveEdge, Any]]]:
    if threads <= 1 or len(states) <= 1:
        return [mode.neighbors(state) for state in states]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(mode.neighbors, states))


def bfs_ball(
    root: Any,
    radius: int,
    mode: str = TOPO,
    removal_cap: int = REMOVAL_CAP,
    memory_cap: int = MEMORY_CAP,
    threads: int = 1,
) -> QuotientGraph:
    """Complete ball of ``radius`` around ``root``.

    Each level is expanded (in parallel when ``threads > 1``) and merged in key order, so
    the result does not depend on the thread count.
    """
    if radius < 0:
        raise MoveError(f"Negative radius {radius}")
    behaviour = mode_for(mode, removal_cap)
    root_key = behaviour.key(root)
    ball = QuotientGraph(mode, root_key, radius)
    ball.add_vertex(root_key, root, 0)
    frontier = [root_key]
    depth = 0
    while frontier and depth < radius:
        expanded = _expand(behaviour, [ball.states[k] for k in frontier], threads)
        discovered: Dict[bytes, Any] = {}
        for source, moves in zip(frontier, expanded):
            for edge, target in moves:
                key = behaviour.key(target)
                if key not in ball and key not in discovered:
                    discovered[key] = target
                ball.add_edge(source, key, edge)
        if len(ball) + len(discovered) > memory_cap:
            raise MemoryBudgetExceeded(f"Ball exceeds {memory_cap} vertices at depth {depth + 1}")
        depth += 1
        for key in sorted(discovered):
            ball.add_vertex(key, discovered[key], depth)
        frontier = sorted(discovered)
        logger.info(f"BFS depth {depth}: {len(frontier)} new vertices, {len(ball)} total")
    if not frontier:
        ball.complete = True
    else:
        # edges among the outermost shell
        for source, moves in zip(frontier, _expand(behaviour, [ball.states[k] for k in frontier], threads)):
            for edge, target in moves:
                key = behaviour.key(target)
                if key in ball:
                    ball.add_edge(source, key, edge)
    return ball


def distance(
    first: Any,
    second: Any,
    mode: str = TOPO,
    max_radius: int = 6,
    removal_cap: int = REMOVAL_CAP,
    memory_cap: int = MEMORY_CAP,
) -> int:
    """Exact distance by bidirectional BFS, searching at most ``max_radius`` moves"""
    behaviour = mode_for(mode, removal_cap)
    first_key, second_key = behaviour.key(first), behaviour.key(second)
    if first_key == second_key:
        return 0
    sides = [
        {"seen": {first_key: 0}, "frontier": [(first_key, first)]},
        {"seen": {second_key: 0}, "frontier": [(second_key, second)]},
    ]
    radii = [0, 0]
    while radii[0] + radii[1] < max_radius:
        if not sides[0]["frontier"] and not sides[1]["frontier"]:
            break
        sizes = [len(side["frontier"]) or memory_cap + 1 for side in sides]
        i = 0 if sizes[0] <= sizes[1] else 1
        mine, other = sides[i], sides[1 - i]
        radii[i] += 1
        best = None
        next_frontier = []
        for _, state in mine["frontier"]:
            for _, target in behaviour.neighbors(state):
                key = behaviour.key(target)
                if key in mine["seen"]:
                    continue
                mine["seen"][key] = radii[i]
                next_frontier.append((key, target))
                if key in other["seen"]:
                    total = radii[i] + other["seen"][key]
                    best = total if best is None else min(best, total)
        if best is not None:
            logger.debug(f"Distance {best} found after radii {radii}")
            return best
        if len(mine["seen"]) + len(other["seen"]) > memory_cap:
            raise MemoryBudgetExceeded(f"Distance search exceeds {memory_cap} vertices")
        mine["frontier"] = next_frontier
    raise NotConnectedWithinBudget(
        f"{key_digest(first_key)} and {key_digest(second_key)} not connected within {max_radius} moves"
    )


# Random walks

@dataclass(frozen=True)
class WalkStep:
    step: int
    edge: MoveEdge
    key: str


@dataclass
class WalkResult:
    final: Any
    log: List[WalkStep]
    max_residual: float = 0.0


def _normalized(state: Any, mode: str) -> Any:
    if mode == TOPO:
        return state
    return WeightedState(renormalized(state.geo), state.weights)


def _check_state(state: Any, mode: str) -> None:
    if mode == TOPO:
        validate(state)
        return
    validate(state.hex_map)
    check_geometry(state.geo, DRIFT_TOL)


def random_walk(
    root: Any,
    steps: int,
    seed: int,
    mode: str = TOPO,
    removal_cap: int = REMOVAL_CAP,
    check: bool = True,
) -> WalkResult:
    """Seeded walk choosing uniformly among the distinct neighbours at every step"""
    rng = random.Random(seed)
    behaviour = mode_for(mode, removal_cap)
    state = root
    log: List[WalkStep] = []
    worst = 0.0
    for step in range(steps):
        moves = behaviour.neighbors(state)
        if not moves:
            logger.warning(f"Walk stuck at step {step}: no moves")
            break
        edge, state = moves[rng.randrange(len(moves))]
        if check:
            _check_state(state, mode)
        if mode == WEIGHTED:
            worst = max(worst, state_residual(state.geo))
        state = _normalized(state, mode)
        log.append(WalkStep(step, edge, key_digest(behaviour.key(state))))
        if step % 1000 == 0:
            logger.info(f"Walk step {step}: {edge.kind}")
    return WalkResult(state, log, worst)


def replay(root: Any, edges: Sequence[MoveEdge], mode: str = TOPO) -> Any:
    """Apply a logged move sequence to ``root``"""
    behaviour = mode_for(mode)
    state = root
    for edge in edges:
        state, _ = behaviour.apply(state, edge)
        state = _normalized(state, mode)
    return state


# Statistics

@dataclass
class GraphStats:
    vertex_count: int
    edge_count: int
    edges_by_kind: Dict[str, int]
    degree_histogram: Dict[int, int]
    diameter: Optional[int]
    connected: bool


def stats(ball: QuotientGraph) -> GraphStats:
    graph = ball.graph
    by_kind: Counter = Counter()
    for _, _, kinds in graph.edges(data="kinds"):
        for kind in kinds:
            by_kind[kind] += 1
    histogram = Counter(degree for _, degree in graph.degree())
    connected = graph.number_of_nodes() > 0 and nx.is_connected(graph)
    diameter = nx.diameter(graph) if ball.complete and connected else None
    return GraphStats(
        graph.number_of_nodes(),
        graph.number_of_edges(),
        dict(sorted(by_kind.items())),
        dict(sorted(histogram.items())),
        diameter,
        connected,
    )


def distances_to(ball: QuotientGraph, targets: Sequence[bytes]) -> Dict[bytes, Optional[int]]:
    """Graph distance inside the ball from every vertex to the nearest target"""
    present = [t for t in targets if t in ball]
    result: Dict[bytes, Optional[int]] = {key: None for key in ball.graph.nodes}
    if not present:
        return result
    queue = deque(present)
    for t in present:
        result[t] = 0
    while queue:
        key = queue.popleft()
        for other in ball.graph.neighbors(key):
            if result[other] is None:
                result[other] = result[key] + 1
                queue.append(other)
    return result
