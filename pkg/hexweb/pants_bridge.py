"""Pants decompositions and the maps between the pants graph and hexagon decompositions.

``phi`` puts the standard three-seam arc system on every pair of pants; ``psi`` completes
a decomposition to a pants decomposition by flipping until a curve becomes addable and
adding the lexicographically smallest such curve.
"""
import itertools
import logging
import random
from collections import deque
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from config import MEMORY_CAP

from .errors import (
    ComplexityLimitExceeded,
    IncompatibleCurve,
    InvalidPants,
    MemoryBudgetExceeded,
    NotAdjacent,
    NotConnectedWithinBudget,
)
from .moves_topo import (
    ADD_CURVE,
    FLIP,
    REMOVE_CURVE,
    MoveEdge,
    add_curve_detailed,
    apply_move,
    candidate_moves,
    enumerate_compatible_curves,
    enumerate_removals,
    flip,
    flippable_arcs,
    neighbor_states,
)
from .surface_core import CompatibleCurve, HexMap, SurfaceSig, canonical_form, hex_of, key_digest, make_map

if TYPE_CHECKING:
    from .hyp_geom import GeoState

logger = logging.getLogger(__name__)

Pants = Tuple[int, int, int]


@dataclass(frozen=True)
class PantsDecomp:
    """Pants list with cuff labels; a label twice in one pants is a handle curve"""

    signature: SurfaceSig
    pants: Tuple[Pants, ...]
    peripheral: FrozenSet[int]

    @classmethod
    def of(cls, signature: SurfaceSig, pants: Sequence[Sequence[int]], peripheral: Sequence[int] = ()) -> "PantsDecomp":
        normalized = tuple(sorted(tuple(sorted(p)) for p in pants))
        return cls(signature, normalized, frozenset(peripheral))

    def curves(self) -> List[int]:
        return sorted({c for p in self.pants for c in p})

    def interior_curves(self) -> List[int]:
        return [c for c in self.curves() if c not in self.peripheral]

    def next_label(self) -> int:
        return max(self.curves(), default=-1) + 1

    def replace(self, old: int, new: int) -> "PantsDecomp":
        return PantsDecomp.of(
            self.signature,
            [[new if c == old else c for c in p] for p in self.pants],
            [new if c == old else c for c in self.peripheral],
        )


def validate_pants(decomp: PantsDecomp) -> bool:
    sig = decomp.signature
    if len(decomp.pants) != abs(sig.euler_characteristic):
        raise InvalidPants(f"{len(decomp.pants)} pants, expected {abs(sig.euler_characteristic)} for {sig}")
    occurrences: Dict[int, int] = {}
    for p in decomp.pants:
        if len(p) != 3:
            raise InvalidPants(f"Pants {p} does not have three cuffs")
        for c in p:
            occurrences[c] = occurrences.get(c, 0) + 1
    for c, count in occurrences.items():
        expected = 1 if c in decomp.peripheral else 2
        if count != expected:
            raise InvalidPants(f"Curve {c} bounds {count} pants sides, expected {expected}")
    if len(decomp.peripheral) != sig.boundary_count or not decomp.peripheral <= set(occurrences):
        raise InvalidPants(f"Peripheral curves {sorted(decomp.peripheral)} do not match {sig}")
    if len(occurrences) != sig.pants_curve_count:
        raise InvalidPants(f"{len(occurrences)} curves, expected {sig.pants_curve_count}")
    graph = nx.Graph()
    graph.add_nodes_from(range(len(decomp.pants)))
    for i, j in itertools.combinations(range(len(decomp.pants)), 2):
        if set(decomp.pants[i]) & set(decomp.pants[j]) - decomp.peripheral:
            graph.add_edge(i, j)
    if not nx.is_connected(graph):
        raise InvalidPants("Pants do not form a connected surface")
    return True


def base_pants(sig: SurfaceSig) -> PantsDecomp:
    """Handles (c, c, d) for the genus, then a chain of pants over the remaining ends"""
    peripheral = list(range(sig.boundary_count))
    next_label = itertools.count(sig.boundary_count)
    pants: List[List[int]] = []
    ends = list(peripheral)
    for _ in range(sig.genus):
        c, d = next(next_label), next(next_label)
        pants.append([c, c, d])
        ends.insert(len(ends) - sig.boundary_count, d)
    if len(ends) == 2:
        survivor, dropped = (ends[1], ends[0]) if ends[1] in peripheral else (ends[0], ends[1])
        pants = [[survivor if c == dropped else c for c in p] for p in pants]
    else:
        previous = ends[0]
        for end in ends[1:-2]:
            joint = next(next_label)
            pants.append([previous, end, joint])
            previous = joint
        pants.append([previous, ends[-2], ends[-1]])

    # compact labels in order of first appearance
    order: Dict[int, int] = {c: c for c in peripheral}
    for p in pants:
        for c in p:
            order.setdefault(c, len(order))
    decomp = PantsDecomp.of(sig, [[order[c] for c in p] for p in pants], peripheral)
    validate_pants(decomp)
    return decomp


# phi and psi

def phi(decomp: PantsDecomp, flipped: Sequence[int] = ()) -> HexMap:
    """Hexagon decomposition with two hexagons and three seams per pants.

    Pants ``i`` with cuffs (c0, c1, c2) becomes hexagons 2i and 2i+1 with seam arcs
    3i, 3i+1, 3i+2. ``flipped`` lists pants whose first seam is flipped afterwards.
    """
    validate_pants(decomp)
    seen: Set[int] = set()
    hexagons = []
    for i, (c0, c1, c2) in enumerate(decomp.pants):
        circles = []
        for c in (c0, c1, c2):
            circles.append(2 * c + (1 if c in seen else 0))
            seen.add(c)
        k0, k1, k2 = circles
        s01, s12, s20 = 3 * i, 3 * i + 1, 3 * i + 2
        hexagons.append([("a", s01), ("c", k1), ("a", s12), ("c", k2), ("a", s20), ("c", k0)])
        hexagons.append([("a", s01), ("c", k0), ("a", s20), ("c", k2), ("a", s12), ("c", k1)])
    result = make_map(decomp.signature, hexagons, decomp.peripheral)
    for i in flipped:
        result = flip(result, 3 * i)
    return result


def pants_from_map(hex_map: HexMap) -> PantsDecomp:
    """Read the pants of a pants-maximal decomposition"""
    if not hex_map.is_pants_maximal():
        raise InvalidPants(f"Map has {len(hex_map.curve_labels())} curves, not a pants decomposition")
    graph = nx.Graph()
    graph.add_nodes_from(range(hex_map.hexagon_count))
    for s in hex_map.arc_slots():
        graph.add_edge(hex_of(s), hex_of(hex_map.glue[s]))
    pants = []
    for component in nx.connected_components(graph):
        circles = {hex_map.circle[s] for h in component for s in range(6 * h + 1, 6 * h + 6, 2)}
        if len(component) != 2 or len(circles) != 3:
            raise InvalidPants(f"Piece with hexagons {sorted(component)} is not a pair of pants")
        pants.append([c // 2 for c in circles])
    decomp = PantsDecomp.of(hex_map.signature, pants, hex_map.peripheral)
    validate_pants(decomp)
    return decomp


def pants_key(decomp: PantsDecomp) -> bytes:
    return canonical_form(phi(decomp))


def _flip_path_to_addable(hex_map: HexMap, memory_cap: int):
    """Breadth-first flips until some curve is addable; flips tried in arc-label order"""
    queue = deque([(hex_map, [])])
    seen = {canonical_form(hex_map)}
    while queue:
        current, path = queue.popleft()
        curves = enumerate_compatible_curves(current)
        if curves:
            return path, curves[0]
        for arc in flippable_arcs(current):
            target = flip(current, arc)
            key = canonical_form(target)
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > memory_cap:
                raise MemoryBudgetExceeded(f"Flip search exceeded {memory_cap} maps")
            queue.append((target, path + [MoveEdge(kind=FLIP, arc=arc)]))
    raise IncompatibleCurve("No arc system of this multicurve admits a compatible curve")


def _completion_steps(hex_map: HexMap, memory_cap: int, first: Optional[CompatibleCurve] = None) -> Iterator[tuple]:
    current = hex_map
    if first is not None:
        addition = add_curve_detailed(current, first)
        yield MoveEdge(kind=ADD_CURVE, curve=first), current, addition.hex_map, addition
        current = addition.hex_map
    while not current.is_pants_maximal():
        flips, curve = _flip_path_to_addable(current, memory_cap)
        for edge in flips:
            after = flip(current, edge.arc)
            yield edge, current, after, None
            current = after
        addition = add_curve_detailed(current, curve)
        yield MoveEdge(kind=ADD_CURVE, curve=curve), current, addition.hex_map, addition
        current = addition.hex_map


def complete_to_pants(
    hex_map: HexMap, memory_cap: int = MEMORY_CAP, first: Optional[CompatibleCurve] = None
) -> Tuple[HexMap, List[MoveEdge]]:
    """Pants decomposition containing the map's multicurve, with the move path reaching it.

    With ``first``, that compatible curve is added before anything else, so the result is
    the completion of the map with ``first`` added.
    """
    current = hex_map
    path = []
    for edge, _, after, _ in _completion_steps(hex_map, memory_cap, first):
        path.append(edge)
        current = after
    logger.debug(f"Completed {len(hex_map.curve_labels())} curves to pants in {len(path)} moves")
    return current, path


def psi(hex_map: HexMap, memory_cap: int = MEMORY_CAP, first: Optional[CompatibleCurve] = None) -> PantsDecomp:
    return pants_from_map(complete_to_pants(hex_map, memory_cap, first)[0])


# Intersection tracking

@dataclass(frozen=True)
class IntersectionStep:
    """Crossings with the starting arc system, measured after one move of a psi run.

    Totals before the move count crossings of the starting arcs with the current arcs and
    with the curves added so far. For additions, ``curve_crossings`` counts the crossings of
    the added curve and ``shared`` the crossed arcs that are still starting arcs.
    ``changed`` counts arcs and curves kept by the move whose crossings moved.
    """

    step: int
    kind: str
    flips_before: int
    arcs_total: int
    curves_total: int
    unshared: int
    arcs_after: int
    curve_crossings: Optional[int] = None
    shared: Optional[int] = None
    changed: int = 0
    misrouted: int = 0

    def crossing_bound(self) -> Optional[int]:
        """Bound on the added curve's crossings, charged to the ends of starting-arc chords.

        Inside a hexagon the curve runs once, cutting off one curve side, and meets a chord
        of a starting arc only if one chord end lies in the cut-off corner. Chord ends are
        crossing points with arcs or added curves, each ending two chords, or feet.
        """
        if self.curve_crossings is None:
            return None
        return 2 * (self.arcs_total + self.curves_total + self.unshared) + self.shared


def track_intersections(state: "GeoState", memory_cap: int = MEMORY_CAP) -> List[IntersectionStep]:
    """Crossings of the starting arcs with the arcs and added curves along a psi run.

    The run is the completion of ``state.hex_map``, replayed geometrically; starting arcs
    are traced as orthogeodesics through the hexagons of every state.
    """
    from .hyp_geom import fixed_arc_crossings, fixed_arcs, geo_add_curve_detailed, geo_flip

    system = fixed_arcs(state)
    fixed = frozenset(state.hex_map.curve_labels())
    current = state
    counts = fixed_arc_crossings(current, system, fixed)
    trace = []
    flips = 0
    for index, (edge, before, after, _) in enumerate(_completion_steps(state.hex_map, memory_cap)):
        unshared = len(system) - len(counts.matched)
        if edge.kind == FLIP:
            current = geo_flip(current, edge.arc)
            crossed, added = frozenset({edge.arc}), None
        else:
            current, addition, _ = geo_add_curve_detailed(current, edge.curve)
            crossed, added = edge.curve.crossed_arcs(before), addition.label
        following = fixed_arc_crossings(current, system, fixed)
        kept_arcs = [a for a in counts.arcs if a not in crossed]
        changed = sum(counts.arcs[a] != following.arcs.get(a) for a in kept_arcs)
        changed += sum(counts.curves[c] != following.curves.get(c) for c in counts.curves)
        step = IntersectionStep(
            step=index,
            kind=edge.kind,
            flips_before=flips,
            arcs_total=counts.arcs_total,
            curves_total=counts.curves_total,
            unshared=unshared,
            arcs_after=following.arcs_total,
            changed=changed,
            misrouted=following.misrouted,
        )
        if added is None:
            flips += 1
        else:
            shared = len(crossed & set(counts.matched.values()))
            step = replace(step, curve_crossings=following.curves[added], shared=shared)
            flips = 0
        trace.append(step)
        counts = following
    return trace


# Pants graph

def pants_elementary_moves(decomp: PantsDecomp) -> List[PantsDecomp]:
    """Type-1 moves on four-holed spheres and type-2 moves on one-holed tori"""
    validate_pants(decomp)
    fresh = decomp.next_label()
    results = []
    for c in decomp.interior_curves():
        holding = [i for i, p in enumerate(decomp.pants) if c in p]
        rest = [p for i, p in enumerate(decomp.pants) if i not in holding]
        if len(holding) == 1:
            p = list(decomp.pants[holding[0]])
            p.remove(c)
            p.remove(c)
            results.append(PantsDecomp.of(decomp.signature, rest + [[fresh, fresh, p[0]]], decomp.peripheral))
            continue
        first, second = (list(decomp.pants[i]) for i in holding)
        first.remove(c)
        second.remove(c)
        (a, b), (d, e) = first, second
        for pairing in (([a, d], [b, e]), ([a, e], [b, d])):
            new_pants = rest + [pairing[0] + [fresh], pairing[1] + [fresh]]
            results.append(PantsDecomp.of(decomp.signature, new_pants, decomp.peripheral))
    return results


def pants_distance(first: PantsDecomp, second: PantsDecomp, memory_cap: int = MEMORY_CAP) -> int:
    """Distance in the quotient pants graph"""
    target = pants_key(second)
    start = pants_key(first)
    if start == target:
        return 0
    seen = {start}
    frontier = [first]
    depth = 0
    while frontier:
        depth += 1
        next_frontier = []
        for decomp in frontier:
            for neighbour in pants_elementary_moves(decomp):
                key = pants_key(neighbour)
                if key == target:
                    return depth
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > memory_cap:
                    raise MemoryBudgetExceeded(f"Pants search exceeded {memory_cap} vertices")
                next_frontier.append(neighbour)
        frontier = next_frontier
    raise NotConnectedWithinBudget("Pants decompositions are in different components")


def pants_types(sig: SurfaceSig, memory_cap: int = MEMORY_CAP) -> List[PantsDecomp]:
    """One representative per homeomorphism type of pants decomposition"""
    start = base_pants(sig)
    seen = {pants_key(start): start}
    queue = deque([start])
    while queue:
        decomp = queue.popleft()
        for neighbour in pants_elementary_moves(decomp):
            key = pants_key(neighbour)
            if key not in seen:
                seen[key] = neighbour
                queue.append(neighbour)
                if len(seen) > memory_cap:
                    raise MemoryBudgetExceeded(f"Pants enumeration exceeded {memory_cap} types")
    return [seen[key] for key in sorted(seen)]


def adjacent_pants(first: PantsDecomp, second: PantsDecomp) -> bool:
    """Whether ``second`` is one elementary move away from ``first``, labels compared"""
    if first.signature != second.signature:
        return False
    removed = set(first.curves()) - set(second.curves())
    added = set(second.curves()) - set(first.curves())
    if len(removed) != 1 or len(added) != 1:
        return False
    renamed = second.replace(added.pop(), first.next_label())
    return any(move == renamed for move in pants_elementary_moves(first))


# Emulation in the hexagon graph

@dataclass
class Emulation:
    source_key: bytes
    target_key: bytes
    path: List[MoveEdge]
    states: List[HexMap]
    found: bool

    @property
    def length(self) -> Optional[int]:
        return len(self.path) if self.found else None


def quotient_path(start: HexMap, target_key: bytes, radius: int, removal_cap: int = 2, memory_cap: int = MEMORY_CAP):
    """Shortest realized move path from ``start`` to a map with canonical key ``target_key``"""
    start_key = canonical_form(start)
    if start_key == target_key:
        return [], [start]
    parents = {start_key: None}
    frontier = [(start, start_key)]
    for _ in range(radius):
        next_frontier = []
        for state, key in frontier:
            for edge, target in neighbor_states(state, removal_cap):
                reached = canonical_form(target)
                if reached in parents:
                    continue
                parents[reached] = (key, edge, state, target)
                if len(parents) > memory_cap:
                    raise MemoryBudgetExceeded(f"Path search exceeded {memory_cap} vertices")
                if reached == target_key:
                    edges, states = [], [target]
                    cursor = reached
                    while parents[cursor] is not None:
                        parent_key, step, source, _ = parents[cursor]
                        edges.append(step)
                        states.append(source)
                        cursor = parent_key
                    return edges[::-1], states[::-1]
                next_frontier.append((target, reached))
        frontier = next_frontier
    return None


def emulate_pants_move(
    first: PantsDecomp, second: PantsDecomp, radius: int = 4, removal_cap: int = 2
) -> Emulation:
    if not adjacent_pants(first, second):
        raise NotAdjacent("Pants decompositions do not differ by one elementary move")
    start = phi(first)
    target_key = pants_key(second)
    found = quotient_path(start, target_key, radius, removal_cap)
    if found is None:
        logger.warning(f"No emulating path within radius {radius}")
        return Emulation(canonical_form(start), target_key, [], [start], False)
    path, states = found
    return Emulation(canonical_form(start), target_key, path, states, True)


# Modular diameter

def _remove_one_curve(hex_map: HexMap, memory_cap: int) -> HexMap:
    queue = deque([hex_map])
    seen = {canonical_form(hex_map)}
    while queue:
        current = queue.popleft()
        for label in current.interior_curves():
            candidates = enumerate_removals(current, label, removal_cap=0).candidates
            if candidates:
                return candidates[0][0]
        for arc in flippable_arcs(current):
            target = flip(current, arc)
            key = canonical_form(target)
            if key not in seen:
                seen.add(key)
                queue.append(target)
                if len(seen) > memory_cap:
                    raise MemoryBudgetExceeded(f"Removal search exceeded {memory_cap} maps")
    raise IncompatibleCurve("No interior curve can be removed")


def peripheral_only_map(piece: SurfaceSig, memory_cap: int = MEMORY_CAP) -> HexMap:
    """A decomposition whose multicurve is the boundary of ``piece``"""
    if piece.boundary_count == 0:
        raise InvalidPants(f"{piece} has no boundary to keep as multicurve")
    current = phi(base_pants(piece))
    while current.interior_curves():
        current = _remove_one_curve(current, memory_cap)
    return current


def flip_quotient_graph(hex_map: HexMap, memory_cap: int = MEMORY_CAP) -> nx.Graph:
    """Quotient by homeomorphism of the flip graph with the multicurve fixed"""
    graph = nx.Graph()
    start = canonical_form(hex_map)
    graph.add_node(start)
    queue = deque([hex_map])
    while queue:
        current = queue.popleft()
        key = canonical_form(current)
        for arc in flippable_arcs(current):
            target = flip(current, arc)
            target_key = canonical_form(target)
            if target_key not in graph:
                queue.append(target)
                if graph.number_of_nodes() >= memory_cap:
                    raise MemoryBudgetExceeded(f"Flip graph exceeded {memory_cap} vertices")
            if target_key != key:
                graph.add_edge(key, target_key)
            else:
                graph.add_node(target_key)
    return graph


@lru_cache(maxsize=64)
def estimate_modular_diameter(piece: SurfaceSig, complexity_limit: int = 6) -> int:
    if piece.arc_count > complexity_limit:
        raise ComplexityLimitExceeded(f"{piece} has {piece.arc_count} arcs, limit {complexity_limit}")
    graph = flip_quotient_graph(peripheral_only_map(piece))
    diameter = nx.diameter(graph) if graph.number_of_nodes() > 1 else 0
    logger.info(f"Modular flip graph of {piece}: {graph.number_of_nodes()} vertices, diameter {diameter}")
    return diameter


def multicurve_pieces(decomp: PantsDecomp, gamma: FrozenSet[int]) -> List[SurfaceSig]:
    """Topological types of the pieces of the surface cut along ``gamma``"""
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(len(decomp.pants)))
    holder: Dict[int, List[int]] = {}
    for i, p in enumerate(decomp.pants):
        for c in p:
            holder.setdefault(c, []).append(i)
    for c, owners in holder.items():
        if c not in gamma and len(owners) == 2:
            graph.add_edge(owners[0], owners[1])
    pieces = []
    for component in nx.connected_components(graph):
        boundary = sum(1 for i in component for c in decomp.pants[i] if c in gamma)
        pants_count = len(component)
        genus = (2 + pants_count - boundary) // 2
        pieces.append(SurfaceSig(genus, boundary))
    return sorted(pieces, key=lambda s: (s.genus, s.boundary_count))


def multicurve_types(sig: SurfaceSig) -> List[Tuple[SurfaceSig, ...]]:
    """Piece-type lists of every non-empty multicurve containing the boundary"""
    found = set()
    for decomp in pants_types(sig):
        interior = decomp.interior_curves()
        for size in range(len(interior) + 1):
            for chosen in itertools.combinations(interior, size):
                gamma = frozenset(chosen) | decomp.peripheral
                if gamma:
                    found.add(tuple(multicurve_pieces(decomp, gamma)))
    return sorted(found, key=lambda t: [(s.genus, s.boundary_count) for s in t])


@lru_cache(maxsize=64)
def estimate_D(sig: SurfaceSig, complexity_limit: int = 6) -> int:
    """Largest modular diameter over multicurve types; pieces contribute additively"""
    best = 0
    for pieces in multicurve_types(sig):
        total = sum(estimate_modular_diameter(piece, complexity_limit) for piece in pieces)
        best = max(best, total)
    logger.info(f"D({sig}) = {best}")
    return best


def completion_bound(sig: SurfaceSig, complexity_limit: int = 6) -> int:
    return (estimate_D(sig, complexity_limit) + 1) * (sig.pants_curve_count - 1)


# Empirical constants

@dataclass(frozen=True)
class PantsSample:
    sample_id: int
    key_a: str
    key_b: str
    value: Optional[int]
    move: Optional[str] = None


def random_pants(sig: SurfaceSig, rng: random.Random, steps: int = 6) -> PantsDecomp:
    decomp = base_pants(sig)
    for _ in range(steps):
        moves = pants_elementary_moves(decomp)
        if not moves:
            break
        decomp = rng.choice(moves)
    return decomp


def estimate_c1(
    sig: SurfaceSig, samples: int, rng: random.Random, radius: int = 4, removal_cap: int = 2
) -> List[PantsSample]:
    """Emulation lengths of random elementary moves"""
    records = []
    for sample_id in range(samples):
        decomp = random_pants(sig, rng)
        moves = pants_elementary_moves(decomp)
        if not moves:
            continue
        target = rng.choice(moves)
        emulation = emulate_pants_move(decomp, target, radius, removal_cap)
        records.append(
            PantsSample(sample_id, key_digest(emulation.source_key), key_digest(emulation.target_key), emulation.length)
        )
        logger.debug(f"C1 sample {sample_id}: length {emulation.length}")
    return records


def estimate_c2(
    sig: SurfaceSig, samples: int, rng: random.Random, walk_steps: int = 4, removal_cap: int = 1
) -> List[PantsSample]:
    """Pants distances between psi-images of adjacent decompositions.

    Across a curve addition the smaller map is completed with the added curve first, so
    both images are the same completion.
    """
    records = []
    for sample_id in range(samples):
        current = phi(base_pants(sig))
        for _ in range(walk_steps):
            current = rng.choice(candidate_moves(current, removal_cap))[1]
        edge, neighbour = rng.choice(candidate_moves(current, removal_cap))
        if edge.kind == ADD_CURVE:
            first, second = psi(current, first=edge.curve), psi(neighbour)
        elif edge.kind == REMOVE_CURVE:
            _, inverse = apply_move(current, edge)
            first, second = psi(current), psi(neighbour, first=inverse.curve)
        else:
            first, second = psi(current), psi(neighbour)
        distance = pants_distance(first, second)
        records.append(
            PantsSample(
                sample_id,
                key_digest(canonical_form(current)),
                key_digest(canonical_form(neighbour)),
                distance,
                edge.kind,
            )
        )
        logger.debug(f"C2 sample {sample_id} across {edge.kind}: distance {distance}")
    return records
