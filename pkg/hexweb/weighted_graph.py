"""Weighted hexagon decompositions of a fixed hyperbolic surface, the vertices of H(X).

The weight of a curve is stored relative to the direction of its side 0. Circles are
decorated with ``w`` on side 0 and ``-w`` on side 1 when computing canonical keys, so a
curve with weight ``k`` and the reversed curve with weight ``-k`` give the same vertex.
Weights live on interior curves only.
"""
import json
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import networkx as nx

from config import DRIFT_TOL, MEMORY_CAP, SNAP_TOL

from .errors import (
    GeometryError,
    MemoryBudgetExceeded,
    MoveError,
    NoSplitArcs,
    UnknownCurve,
    ValidationError,
)
from .hyp_geom import (
    AlphaPlacement,
    CurveDevelopment,
    FNConfig,
    GeoState,
    build_base,
    curve_development,
    geo_add_curve_detailed,
    geo_flip,
    geo_remove_curve,
    geometry_matches,
    snap_floor,
)
from .moves_topo import (
    ADD_CURVE,
    FLIP,
    REMOVE_CURVE,
    WEIGHT_SHIFT,
    MoveEdge,
    Reattachment,
    add_curve_with_record,
    check_removable,
    enumerate_compatible_curves,
    flippable_arcs,
    reattach,
    reattachment_words,
)
from .surface_core import (
    CompatibleCurve,
    Decoration,
    HexMap,
    canonical_form,
    canonical_labelling,
    hex_of,
    validate,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightedState:
    geo: GeoState
    weights: Tuple[Tuple[int, int], ...]

    @property
    def hex_map(self) -> HexMap:
        return self.geo.hex_map

    def weight(self, label: int) -> int:
        for curve, value in self.weights:
            if curve == label:
                return value
        raise UnknownCurve(f"Curve {label} carries no weight")

    def with_weight(self, label: int, value: int) -> "WeightedState":
        self.weight(label)
        return WeightedState(self.geo, tuple((c, value if c == label else w) for c, w in self.weights))

    def decoration(self) -> Decoration:
        return tuple(item for c, w in self.weights for item in ((2 * c, w), (2 * c + 1, -w)))


def base_weighted_state(config: FNConfig) -> WeightedState:
    geo = build_base(config)
    return WeightedState(geo, tuple((c, 0) for c in geo.hex_map.interior_curves()))


def fingerprint(state: WeightedState, digits: int = 6) -> List[float]:
    """Arc lengths in canonical arc order, rounded"""
    arcs = canonical_labelling(state.hex_map, state.decoration()).arcs()
    ordered = sorted(state.hex_map.arc_labels(), key=arcs.get)
    return [round(state.geo.arc_length(a), digits) for a in ordered]


def weighted_key(state: WeightedState) -> bytes:
    """Canonical form with weights, followed by the geometric fingerprint"""
    code = canonical_form(state.hex_map, state.decoration())
    return code + b"|" + json.dumps(fingerprint(state), separators=(",", ":")).encode()


def unweighted_key(state: WeightedState) -> bytes:
    return canonical_form(state.hex_map)


def orientations(state: WeightedState) -> List[int]:
    """+1 for curves whose side 0 is also side 0 in the canonical numbering"""
    circles = canonical_labelling(state.hex_map, state.decoration()).circles()
    return [1 if circles[2 * c] % 2 == 0 else -1 for c, _ in state.weights]


def canonical_direction(hex_map: HexMap, curve: CompatibleCurve) -> bool:
    """Whether the curve, read in the canonical numbering of the map, runs in its minimal direction"""
    slot_map = canonical_labelling(hex_map).slot_map
    mapped = CompatibleCurve(tuple((hex_of(slot_map[e]), slot_map[e], slot_map[x]) for _, e, x in curve.segments))
    return mapped.is_canonical_direction()


# Weights of added curves

def arc_weights(development: CurveDevelopment, tol: float = SNAP_TOL) -> List[int]:
    return [snap_floor(ratio, tol) for ratio in development.ratios()]


def _raw_weight(development: CurveDevelopment, tol: float = SNAP_TOL) -> int:
    if not development.crossings:
        raise NoSplitArcs("The curve crosses no arc")
    values = arc_weights(development, tol)
    logger.debug(f"Arc weights of added curve: max {max(values)}, min {min(values)}")
    return max(values)


def weight_of_added_curve(
    state: GeoState, curve: CompatibleCurve, tol: float = SNAP_TOL, development: Optional[CurveDevelopment] = None
) -> int:
    """Max over split arcs of floor(t / length), signed by the curve's direction"""
    if development is None:
        development = curve_development(state, curve)
    raw = _raw_weight(development, tol)
    return raw if canonical_direction(state.hex_map, curve) else -raw


def weighted_add(state: WeightedState, curve: CompatibleCurve) -> Tuple[WeightedState, int]:
    """Add a curve in its canonical direction; returns the new state and the curve label"""
    if not canonical_direction(state.hex_map, curve):
        curve = curve.reversed()
    geo, addition, development = geo_add_curve_detailed(state.geo, curve)
    weight = weight_of_added_curve(state.geo, curve, development=development)
    weights = tuple(sorted(state.weights + ((addition.label, weight),)))
    return WeightedState(geo, weights), addition.label


# Removals

def total_shift(state: WeightedState, label: int, word: str, residue: int, predecessor: HexMap, curve: CompatibleCurve) -> int:
    """Integer shift with the given residue whose re-added weight equals the curve's weight"""
    placement = AlphaPlacement(state.geo, label)
    wanted = state.weight(label) if canonical_direction(predecessor, curve) else -state.weight(label)
    right_count = len(placement.right)
    current = placement.raw_weight(Reattachment(word=word, shift=residue))
    return residue + right_count * (wanted - current)


def removal_round_trips(state: WeightedState, label: int, predecessor: GeoState, curve: CompatibleCurve, tol: float = DRIFT_TOL) -> bool:
    rebuilt, _, development = geo_add_curve_detailed(predecessor, curve)
    if not geometry_matches(rebuilt, state.geo, tol):
        return False
    return weight_of_added_curve(predecessor, curve, development=development) == state.weight(label)


def weighted_removals(state: WeightedState, label: int) -> List[Tuple[MoveEdge, WeightedState]]:
    """Every predecessor obtained by removing ``label``: one total shift per word and residue"""
    try:
        left, right = check_removable(state.hex_map, label)
    except MoveError as e:
        logger.debug(f"Curve {label} not removable: {e.message}")
        return []
    result = []
    for word in reattachment_words(len(left), len(right)):
        for residue in range(len(right)):
            try:
                predecessor_map, curve = reattach(state.hex_map, label, Reattachment(word=word, shift=residue))
                validate(predecessor_map)
            except (MoveError, ValidationError):
                continue
            shift = total_shift(state, label, word, residue, predecessor_map, curve)
            reattachment = Reattachment(word=word, shift=shift)
            try:
                predecessor, curve = geo_remove_curve(state.geo, label, reattachment)
                if not removal_round_trips(state, label, predecessor, curve):
                    logger.debug(f"Removal {word}/{shift} of curve {label} fails the round trip")
                    continue
            except (GeometryError, MoveError) as e:
                logger.debug(f"Removal {word}/{shift} of curve {label} rejected: {e.message}")
                continue
            weights = tuple((c, w) for c, w in state.weights if c != label)
            edge = MoveEdge(kind=REMOVE_CURVE, curve_label=label, reattachment=reattachment, weight=state.weight(label))
            result.append((edge, WeightedState(predecessor, weights)))
    return result


# Edges

def twist_action(state: WeightedState, curve: int, direction: int = 1) -> WeightedState:
    """Dehn twist along a curve of the multicurve: same decomposition, weight shifted by ``direction``"""
    if curve not in state.hex_map.interior_curves():
        raise UnknownCurve(f"Curve {curve} is not an interior curve of the multicurve")
    return state.with_weight(curve, state.weight(curve) + direction)


def apply_weighted_move(state: WeightedState, edge: MoveEdge) -> Tuple[WeightedState, MoveEdge]:
    """Apply a move; return the target and the inverse move"""
    if edge.kind == FLIP:
        new_label = state.hex_map.next_arc_label()
        return WeightedState(geo_flip(state.geo, edge.arc), state.weights), MoveEdge(kind=FLIP, arc=new_label)
    if edge.kind == WEIGHT_SHIFT:
        target = twist_action(state, edge.curve_label, edge.delta)
        return target, MoveEdge(kind=WEIGHT_SHIFT, curve_label=edge.curve_label, delta=-edge.delta)
    if edge.kind == ADD_CURVE:
        target, label = weighted_add(state, edge.curve)
        oriented = edge.curve if canonical_direction(state.hex_map, edge.curve) else edge.curve.reversed()
        _, record = add_curve_with_record(state.hex_map, oriented)
        shift = total_shift(target, label, record.word, record.shift, state.hex_map, oriented)
        inverse = MoveEdge(
            kind=REMOVE_CURVE,
            curve_label=label,
            reattachment=Reattachment(word=record.word, shift=shift),
            weight=target.weight(label),
        )
        return target, inverse
    if edge.kind == REMOVE_CURVE:
        predecessor, curve = geo_remove_curve(state.geo, edge.curve_label, edge.reattachment)
        weights = tuple((c, w) for c, w in state.weights if c != edge.curve_label)
        return WeightedState(predecessor, weights), MoveEdge(kind=ADD_CURVE, curve=curve)
    raise MoveError(f"Unknown move kind {edge.kind}")


def weighted_neighbor_states(state: WeightedState) -> List[Tuple[MoveEdge, WeightedState]]:
    """Flips, weight shifts, additions and removals, each class sorted by target key"""
    classes: List[List[Tuple[MoveEdge, WeightedState]]] = [[], [], [], []]
    for arc in flippable_arcs(state.hex_map):
        classes[0].append((MoveEdge(kind=FLIP, arc=arc), WeightedState(geo_flip(state.geo, arc), state.weights)))
    for curve_label in state.hex_map.interior_curves():
        for delta in (1, -1):
            edge = MoveEdge(kind=WEIGHT_SHIFT, curve_label=curve_label, delta=delta)
            classes[1].append((edge, twist_action(state, curve_label, delta)))
    for curve in enumerate_compatible_curves(state.hex_map):
        try:
            target, label = weighted_add(state, curve)
        except GeometryError as e:
            logger.warning(f"Skipping addition with degenerate geometry: {e.message}")
            continue
        classes[2].append((MoveEdge(kind=ADD_CURVE, curve=curve, weight=target.weight(label)), target))
    if len(state.hex_map.curve_labels()) > 1:
        for curve_label in state.hex_map.interior_curves():
            classes[3].extend(weighted_removals(state, curve_label))
    result = []
    for group in classes:
        keyed = sorted(((weighted_key(target), edge.sort_key(), edge, target) for edge, target in group), key=lambda item: item[:2])
        result.extend((edge, target) for _, _, edge, target in keyed)
    return result


def neighbors_weighted(state: WeightedState) -> List[MoveEdge]:
    return [edge for edge, _ in weighted_neighbor_states(state)]


# Valency

def merged_piece_arcs(hex_map: HexMap, label: int) -> int:
    """Arc count of the piece of the cut surface obtained by removing ``label``"""
    graph = nx.Graph()
    graph.add_nodes_from(range(hex_map.hexagon_count))
    for s in hex_map.arc_slots():
        graph.add_edge(hex_of(s), hex_of(hex_map.glue[s]))
    touching = {hex_of(s) for s in hex_map.curve_slots() if hex_map.circle[s] // 2 == label}
    hexagons = set()
    for component in nx.connected_components(graph):
        if component & touching:
            hexagons |= component
    # a piece with h hexagons has Euler characteristic -h/2 and 3|chi| arcs
    return 3 * len(hexagons) // 2


def valency_bound(hex_map: HexMap) -> int:
    """|A| + 2|Gamma| + 2^|A| + |Gamma| * C(2|A|^2, N)"""
    arcs = len(hex_map.arc_labels())
    curves = hex_map.interior_curves()
    merged = max((merged_piece_arcs(hex_map, c) for c in curves), default=0)
    return arcs + 2 * len(curves) + 2 ** arcs + len(curves) * math.comb(2 * arcs * arcs, merged)


# Stabilizers

@dataclass
class StabilizerReport:
    fixed_at_zero: bool
    moved_powers: int
    fixed_powers: List[Tuple[int, int]]
    weighted_vertices: int
    quotient_vertices: int

    @property
    def passed(self) -> bool:
        return self.fixed_at_zero and not self.fixed_powers


def weighted_ball(root: WeightedState, radius: int, memory_cap: int = MEMORY_CAP) -> Dict[bytes, WeightedState]:
    seen = {weighted_key(root): root}
    frontier = deque([(root, 0)])
    while frontier:
        state, depth = frontier.popleft()
        if depth == radius:
            continue
        for _, target in weighted_neighbor_states(state):
            key = weighted_key(target)
            if key in seen:
                continue
            if len(seen) >= memory_cap:
                raise MemoryBudgetExceeded(f"Weighted ball exceeds {memory_cap} vertices")
            seen[key] = target
            frontier.append((target, depth + 1))
    return seen


def stabilizer_probe(state: WeightedState, max_power: int, radius: int = 0, memory_cap: int = MEMORY_CAP) -> StabilizerReport:
    """Check that no nonzero twist power fixes the state, and count the ball's quotient"""
    key = weighted_key(state)
    fixed = []
    moved = 0
    for curve in state.hex_map.interior_curves():
        for power in range(1, max_power + 1):
            for sign in (1, -1):
                if weighted_key(twist_action(state, curve, sign * power)) == key:
                    fixed.append((curve, sign * power))
                else:
                    moved += 1
    fixed_at_zero = all(weighted_key(twist_action(state, c, 0)) == key for c in state.hex_map.interior_curves())
    ball = weighted_ball(state, radius, memory_cap)
    quotient = {unweighted_key(s) for s in ball.values()}
    logger.info(f"Stabilizer probe: {moved} twist powers move the state, ball {len(ball)} -> quotient {len(quotient)}")
    return StabilizerReport(fixed_at_zero, moved, fixed, len(ball), len(quotient))
