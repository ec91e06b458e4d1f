"""Edge moves of the hexagon graph: flips, curve additions and curve removals.

Moves keep hexagon indices stable. A flip writes its two new hexagons over the two old
ones; a curve addition keeps the hexagon piece of every split hexagon at the same index,
with the new curve side on the position of the collapsed quadrilateral's curve side.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import (
    IncompatibleCurve,
    InvalidCurve,
    LastCurve,
    MoveError,
    NotRemovable,
    PeripheralCurve,
    SelfAdjacentArc,
    UnknownCurve,
    ValidationError,
)
from .surface_core import (
    NO_SLOT,
    CompatibleCurve,
    HexMap,
    canonical_form,
    check_segments,
    hex_of,
    same_structure,
    shifted,
    validate,
)

logger = logging.getLogger(__name__)

FLIP = "flip"
ADD_CURVE = "add_curve"
REMOVE_CURVE = "remove_curve"
WEIGHT_SHIFT = "weight_shift"
MOVE_KINDS = (FLIP, ADD_CURVE, REMOVE_CURVE, WEIGHT_SHIFT)


@dataclass(frozen=True)
class Reattachment:
    """How the arcs ending on a removed curve are rejoined.

    ``word[i]`` says whether the i-th interval between consecutive crossings lies on the
    left (``L``) or right (``R``) of the curve; ``shift`` rotates the right-hand pieces
    along the curve. Topologically only ``shift`` modulo the number of right pieces matters.
    """

    word: str
    shift: int


@dataclass(frozen=True)
class MoveEdge:
    kind: str
    arc: Optional[int] = None
    curve: Optional[CompatibleCurve] = None
    curve_label: Optional[int] = None
    reattachment: Optional[Reattachment] = None
    delta: int = 0
    weight: Optional[int] = None

    def sort_key(self) -> tuple:
        return (
            MOVE_KINDS.index(self.kind),
            -1 if self.arc is None else self.arc,
            -1 if self.curve_label is None else self.curve_label,
            self.curve.segments if self.curve else (),
            (self.reattachment.word, abs(self.reattachment.shift), self.reattachment.shift) if self.reattachment else (),
            self.delta,
        )


@dataclass
class RemovalResult:
    candidates: List[Tuple[HexMap, MoveEdge]] = field(default_factory=list)
    truncated: bool = False


# Flips

def flip(hex_map: HexMap, arc: int) -> HexMap:
    """Replace ``arc`` by the other diagonal of the octagon formed by its two hexagons"""
    s1, s2 = hex_map.slots_of_arc(arc)
    h1, h2 = hex_of(s1), hex_of(s2)
    if h1 == h2:
        raise SelfAdjacentArc(f"Arc {arc} has both sides on hexagon {h1}")
    c1, a1, c2, a2, c3 = (shifted(s1, k) for k in range(1, 6))
    d1, b1, d2, b2, d3 = (shifted(s2, k) for k in range(1, 6))
    p, q = 6 * h1, 6 * h2
    moved = {a1: q + 4, a2: p + 2, b1: p + 4, b2: q + 2}

    glue = list(hex_map.glue)
    arc_label = list(hex_map.arc_label)
    circle = list(hex_map.circle)
    for base in (p, q):
        for j in range(6):
            glue[base + j] = arc_label[base + j] = circle[base + j] = NO_SLOT
    for old, new in moved.items():
        partner = hex_map.glue[old]
        new_partner = moved.get(partner, partner)
        glue[new], glue[new_partner] = new_partner, new
        arc_label[new] = hex_map.arc_label[old]
    label = hex_map.next_arc_label()
    glue[p], glue[q] = q, p
    arc_label[p] = arc_label[q] = label

    # P = [a', C2b, A2, C3+D1, B1, D2a]; Q = [a', D2b, B2, D3+C1, A1, C2a]
    circle[p + 1], circle[p + 3], circle[p + 5] = hex_map.circle[c2], hex_map.circle[c3], hex_map.circle[d2]
    circle[q + 1], circle[q + 3], circle[q + 5] = hex_map.circle[d2], hex_map.circle[d3], hex_map.circle[c2]
    return HexMap(hex_map.signature, tuple(glue), tuple(arc_label), tuple(circle), hex_map.peripheral)


def flippable_arcs(hex_map: HexMap) -> List[int]:
    result = []
    for label in hex_map.arc_labels():
        s1, s2 = hex_map.slots_of_arc(label)
        if hex_of(s1) != hex_of(s2):
            result.append(label)
    return result


# Compatible curves

def _piece_of(slot: int, entry: int, exit_: int) -> str:
    """Side of a split hexagon holding an uncrossed slot"""
    k = 1
    while shifted(exit_, k) != entry:
        if shifted(exit_, k) == slot:
            return "L"
        k += 1
    return "R"


def classify_curve(hex_map: HexMap, curve: CompatibleCurve) -> str:
    """Cut along the curve and classify the pieces: ``ok``, ``peripheral`` or ``inessential``"""
    check_segments(hex_map, curve)
    split = {h: (e, x) for h, e, x in curve.segments}
    graph = nx.MultiGraph()
    disks = []
    for h in range(hex_map.hexagon_count):
        disks.extend([("L", h), ("R", h)] if h in split else [("H", h)])
    graph.add_nodes_from(disks)

    def piece(slot: int):
        h = hex_of(slot)
        if h not in split:
            return ("H", h)
        return (_piece_of(slot, *split[h]), h)

    crossed = set(curve.exit_slots()) | {e for _, e, _ in curve.segments}
    for s in hex_map.arc_slots():
        t = hex_map.glue[s]
        if s < t and s not in crossed:
            graph.add_edge(piece(s), piece(t))
    n = len(curve.segments)
    for i, (h, _, _) in enumerate(curve.segments):
        following = curve.segments[(i + 1) % n][0]
        graph.add_edge(("L", h), ("L", following))
        graph.add_edge(("R", h), ("R", following))

    worst = "ok"
    for component in nx.connected_components(graph):
        sub = graph.subgraph(component)
        euler = sub.number_of_nodes() - sub.number_of_edges()
        if euler > 0:
            return "inessential"
        if euler == 0:
            worst = "peripheral"
    return worst


def check_compatible(hex_map: HexMap, curve: CompatibleCurve) -> None:
    try:
        kind = classify_curve(hex_map, curve)
    except InvalidCurve as e:
        raise IncompatibleCurve(f"Not a compatible curve: {e.message}")
    if kind == "inessential":
        raise IncompatibleCurve("The curve bounds a disk")
    if kind == "peripheral":
        raise PeripheralCurve("The curve is isotopic to a curve of the multicurve")


def _cycles_from(hex_map: HexMap, h0: int) -> List[CompatibleCurve]:
    """Segment cycles whose smallest hexagon is ``h0``, in both directions"""
    found = []

    def extend(start, path, used_arcs, visited, entry):
        h = hex_of(entry)
        for k in (2, 4):
            exit_ = shifted(entry, k)
            target = hex_map.glue[exit_]
            step = path + [(h, entry, exit_)]
            if target == start:
                found.append(CompatibleCurve(tuple(step)))
                continue
            label = hex_map.arc_label[exit_]
            nxt = hex_of(target)
            if label in used_arcs or nxt <= h0 or nxt in visited:
                continue
            extend(start, step, used_arcs | {label}, visited | {nxt}, target)

    for entry in (6 * h0, 6 * h0 + 2, 6 * h0 + 4):
        extend(entry, [], {hex_map.arc_label[entry]}, {h0}, entry)
    return found


def enumerate_compatible_curves(hex_map: HexMap) -> List[CompatibleCurve]:
    """All compatible curves as canonical segment cycles, in sorted order"""
    candidates = set()
    for h0 in range(hex_map.hexagon_count):
        for curve in _cycles_from(hex_map, h0):
            candidates.add(curve.canonical())
    result = []
    for curve in sorted(candidates, key=lambda c: c.segments):
        if classify_curve(hex_map, curve) == "ok":
            result.append(curve)
    logger.debug(f"{len(result)} compatible curves out of {len(candidates)} cycles")
    return result


# Curve addition

@dataclass(frozen=True)
class CurveAddition:
    """Result of adding a curve, with what is needed to undo or track it"""

    hex_map: HexMap
    label: int
    reattachment: Reattachment
    collapsed: Tuple[Tuple[int, Tuple[int, ...]], ...]

    def collapsed_arcs(self) -> Dict[int, Tuple[int, ...]]:
        """New arc label to the labels of the old arcs whose halves it is made of"""
        return dict(self.collapsed)


class _Surgery:
    """Half-arc bookkeeping for cutting the arcs crossed by a curve.

    A token ``(slot, half)`` is the first (0) or second (1) half, counterclockwise, of
    an arc slot. In a split hexagon the hexagon piece keeps two of the four crossed
    half-slots and the quadrilateral keeps the other two.
    """

    def __init__(self, hex_map: HexMap, curve: CompatibleCurve):
        self.hex_map = hex_map
        self.split = {h: (e, x) for h, e, x in curve.segments}
        self.kinds = {h: ("L" if x == shifted(e, 2) else "R") for h, (e, x) in self.split.items()}

    def piece_tokens(self, h: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        e, x = self.split[h]
        return ((e, 0), (x, 1)) if self.kinds[h] == "L" else ((e, 1), (x, 0))

    def piece_holds(self, token: Tuple[int, int]) -> bool:
        slot, _ = token
        h = hex_of(slot)
        if h not in self.split or slot not in self.split[h]:
            return True
        return token in self.piece_tokens(h)

    def quad_other(self, token: Tuple[int, int]) -> Tuple[int, int]:
        h = hex_of(token[0])
        e, x = self.split[h]
        pair = ((e, 1), (x, 0)) if self.kinds[h] == "L" else ((x, 1), (e, 0))
        return pair[1] if token == pair[0] else pair[0]

    def chain(self, token: Tuple[int, int]) -> Tuple[int, List[int]]:
        """Piece slot reached from ``token`` through collapsed quadrilaterals, and the arcs passed"""
        glue, labels = self.hex_map.glue, self.hex_map.arc_label
        passed = [labels[token[0]]]
        partner = (glue[token[0]], 1 - token[1])
        while not self.piece_holds(partner):
            other = self.quad_other(partner)
            passed.append(labels[other[0]])
            partner = (glue[other[0]], 1 - other[1])
            if len(passed) > self.hex_map.slot_count:
                raise PeripheralCurve("Quadrilaterals close up around the curve")
        return partner[0], passed


def add_curve_detailed(hex_map: HexMap, curve: CompatibleCurve) -> CurveAddition:
    check_compatible(hex_map, curve)
    label = hex_map.next_curve_label()
    surgery = _Surgery(hex_map, curve)

    glue = list(hex_map.glue)
    arc_label = list(hex_map.arc_label)
    circle = list(hex_map.circle)
    passed: Dict[int, List[int]] = {}
    for h, (e, x) in surgery.split.items():
        if surgery.kinds[h] == "L":
            circle[shifted(e, 1)] = 2 * label
        else:
            circle[shifted(e, -1)] = 2 * label + 1
        for token in surgery.piece_tokens(h):
            end, labels = surgery.chain(token)
            glue[token[0]], glue[end] = end, token[0]
            passed[token[0]] = labels

    fresh = hex_map.next_arc_label()
    collapsed = []
    named = set()
    for h, e, x in curve.segments:
        for slot in (e, x):
            if slot in named:
                continue
            arc_label[slot] = arc_label[glue[slot]] = fresh
            named.update((slot, glue[slot]))
            collapsed.append((fresh, tuple(sorted(set(passed[slot])))))
            fresh += 1

    result = HexMap(hex_map.signature, tuple(glue), tuple(arc_label), tuple(circle), hex_map.peripheral)
    left, right = alpha_layout(result, label)
    start = next(i for i, (h, _, _) in enumerate(curve.segments) if h == hex_of(left[0]))
    order = curve.segments[start:] + curve.segments[:start]
    word = "".join(surgery.kinds[h] for h, _, _ in order)
    first_right = next(h for h, _, _ in order if surgery.kinds[h] == "R")
    shift = next(i for i, q in enumerate(right) if hex_of(q) == first_right)
    logger.debug(f"Added curve {label} across {len(curve)} hexagons, word {word}")
    return CurveAddition(result, label, Reattachment(word=word, shift=shift), tuple(collapsed))


def add_curve_with_record(hex_map: HexMap, curve: CompatibleCurve) -> Tuple[HexMap, Reattachment]:
    addition = add_curve_detailed(hex_map, curve)
    return addition.hex_map, addition.reattachment


def add_curve(hex_map: HexMap, curve: CompatibleCurve) -> HexMap:
    return add_curve_detailed(hex_map, curve).hex_map


# Curve removal

def alpha_layout(hex_map: HexMap, label: int) -> Tuple[List[int], List[int]]:
    """Slots of the two sides of a curve, both listed in the curve's positive direction"""
    left = hex_map.circle_slots(2 * label)
    side1 = hex_map.circle_slots(2 * label + 1)
    right = [side1[0]] + list(reversed(side1[1:]))
    return left, right


def check_removable(hex_map: HexMap, label: int) -> Tuple[List[int], List[int]]:
    if label not in hex_map.curve_labels():
        raise UnknownCurve(f"Curve {label} does not exist")
    if label in hex_map.peripheral:
        raise PeripheralCurve(f"Curve {label} is peripheral and stays in the multicurve")
    if len(hex_map.curve_labels()) == 1:
        raise LastCurve(f"Curve {label} is the only curve of the multicurve")
    left, right = alpha_layout(hex_map, label)
    hexagons = [hex_of(s) for s in left + right]
    if len(set(hexagons)) != len(hexagons):
        raise NotRemovable(f"A hexagon has two sides on curve {label}")
    return left, right


def interval_pieces(layout: Tuple[List[int], List[int]], reattachment: Reattachment) -> List[Tuple[str, int]]:
    """Kind and curve slot of each interval of a reattachment"""
    left, right = layout
    pieces = []
    li = ri = 0
    for kind in reattachment.word:
        if kind == "L":
            pieces.append(("L", left[li]))
            li += 1
        else:
            pieces.append(("R", right[(reattachment.shift + ri) % len(right)]))
            ri += 1
    return pieces


def crossing_slots(pieces: Sequence[Tuple[str, int]]) -> Tuple[List[int], List[int]]:
    entries = [shifted(q, -1) if kind == "L" else shifted(q, 1) for kind, q in pieces]
    exits = [shifted(q, 1) if kind == "L" else shifted(q, -1) for kind, q in pieces]
    return entries, exits


def reattach(hex_map: HexMap, label: int, reattachment: Reattachment) -> Tuple[HexMap, CompatibleCurve]:
    """Remove ``label`` and rejoin its arcs as described; raise MoveError when impossible"""
    layout = check_removable(hex_map, label)
    left, right = layout
    word = reattachment.word
    if len(word) != len(left) + len(right) or word.count("L") != len(left) or not word.startswith("L"):
        raise NotRemovable(f"Word {word} does not fit {len(left)} left and {len(right)} right pieces")
    pieces = interval_pieces(layout, reattachment)
    entries, exits = crossing_slots(pieces)
    n = len(pieces)

    glue = list(hex_map.glue)
    arc_label = list(hex_map.arc_label)
    circle = list(hex_map.circle)
    fresh = hex_map.next_arc_label()
    for i in range(n):
        a, b = exits[i], entries[(i + 1) % n]
        glue[a], glue[b] = b, a
        arc_label[a] = arc_label[b] = fresh
        fresh += 1
    for _, q in pieces:
        circle[q] = NO_SLOT

    seen = set()
    owner: Dict[int, int] = {}
    for start in range(1, len(glue), 2):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        slot = shifted(glue[shifted(start, 1)], 1)
        while slot != start:
            cycle.append(slot)
            seen.add(slot)
            slot = shifted(glue[shifted(slot, 1)], 1)
        ids = {circle[s] for s in cycle if circle[s] >= 0}
        if len(ids) != 1:
            raise NotRemovable("Reattached boundary circle does not match a single curve side")
        circle_id = ids.pop()
        if circle_id in owner:
            raise NotRemovable(f"Reattachment splits circle {circle_id}")
        owner[circle_id] = start
        for s in cycle:
            circle[s] = circle_id

    predecessor = HexMap(hex_map.signature, tuple(glue), tuple(arc_label), tuple(circle), hex_map.peripheral)
    curve = CompatibleCurve(tuple((hex_of(q), entries[i], exits[i]) for i, (_, q) in enumerate(pieces)))
    return predecessor, curve


def reattachment_words(left_count: int, right_count: int) -> List[str]:
    total = left_count + right_count
    words = []
    for rest in itertools.combinations(range(1, total), left_count - 1):
        chosen = {0, *rest}
        words.append("".join("L" if i in chosen else "R" for i in range(total)))
    return words


def _shift_representatives(right_count: int, removal_cap: int) -> Tuple[List[int], bool]:
    shifts, residues = [], set()
    for magnitude in range(removal_cap + 1):
        for value in ((0,) if magnitude == 0 else (magnitude, -magnitude)):
            if value % right_count not in residues:
                residues.add(value % right_count)
                shifts.append(value)
    return shifts, len(residues) < right_count


def try_reattach(hex_map: HexMap, label: int, reattachment: Reattachment) -> Optional[Tuple[HexMap, CompatibleCurve]]:
    """Reattach and confirm the round trip through add_curve; None for invalid choices"""
    try:
        predecessor, curve = reattach(hex_map, label, reattachment)
        validate(predecessor)
        rebuilt = add_curve(predecessor, curve)
    except (MoveError, ValidationError):
        return None
    if not same_structure(rebuilt, hex_map):
        return None
    return predecessor, curve


def enumerate_removals(hex_map: HexMap, label: int, removal_cap: int = 2) -> RemovalResult:
    """Predecessors of ``hex_map`` obtained by removing curve ``label``"""
    try:
        left, right = check_removable(hex_map, label)
    except NotRemovable as e:
        logger.debug(f"Curve {label} not removable: {e.message}")
        return RemovalResult()
    shifts, truncated = _shift_representatives(len(right), removal_cap)
    result = RemovalResult(truncated=truncated)
    for word in reattachment_words(len(left), len(right)):
        for shift in shifts:
            reattachment = Reattachment(word=word, shift=shift)
            found = try_reattach(hex_map, label, reattachment)
            if found is None:
                continue
            predecessor, _ = found
            edge = MoveEdge(kind=REMOVE_CURVE, curve_label=label, reattachment=reattachment)
            result.candidates.append((predecessor, edge))
    return result


# Neighbours

def apply_move(hex_map: HexMap, edge: MoveEdge) -> Tuple[HexMap, MoveEdge]:
    """Apply a move; return the target and the formal inverse move"""
    if edge.kind == FLIP:
        new_label = hex_map.next_arc_label()
        return flip(hex_map, edge.arc), MoveEdge(kind=FLIP, arc=new_label)
    if edge.kind == ADD_CURVE:
        new_label = hex_map.next_curve_label()
        result, record = add_curve_with_record(hex_map, edge.curve)
        return result, MoveEdge(kind=REMOVE_CURVE, curve_label=new_label, reattachment=record)
    if edge.kind == REMOVE_CURVE:
        predecessor, curve = reattach(hex_map, edge.curve_label, edge.reattachment)
        return predecessor, MoveEdge(kind=ADD_CURVE, curve=curve)
    raise MoveError(f"Move kind {edge.kind} does not act on unweighted maps")


def candidate_moves(hex_map: HexMap, removal_cap: int = 2) -> List[Tuple[MoveEdge, HexMap]]:
    """Every move with its target, before identifying isomorphic targets"""
    moves = []
    for arc in flippable_arcs(hex_map):
        moves.append((MoveEdge(kind=FLIP, arc=arc), flip(hex_map, arc)))
    for curve in enumerate_compatible_curves(hex_map):
        moves.append((MoveEdge(kind=ADD_CURVE, curve=curve), add_curve(hex_map, curve)))
    if len(hex_map.curve_labels()) > 1:
        for label in hex_map.interior_curves():
            for predecessor, edge in enumerate_removals(hex_map, label, removal_cap).candidates:
                moves.append((edge, predecessor))
    return moves


def neighbor_states(hex_map: HexMap, removal_cap: int = 2) -> List[Tuple[MoveEdge, HexMap]]:
    """Moves to pairwise non-isomorphic targets, first realization of each kept"""
    seen = set()
    result = []
    for edge, target in candidate_moves(hex_map, removal_cap):
        key = canonical_form(target)
        if key in seen:
            continue
        seen.add(key)
        result.append((edge, target))
    return result


def neighbors_topo(hex_map: HexMap, removal_cap: int = 2) -> List[MoveEdge]:
    return [edge for edge, _ in neighbor_states(hex_map, removal_cap)]
