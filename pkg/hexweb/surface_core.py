"""Surfaces and hexagon decompositions as validated combinatorial maps.

A hexagon decomposition with ``h`` hexagons owns ``6h`` slots. Slot ``6*i + j`` is side
``j`` of hexagon ``i``; sides are listed counterclockwise and alternate arc, curve, arc,
curve, arc, curve, so even positions are arc slots and odd positions curve slots.
Arc slots are glued in pairs. Curve slots carry the id of the boundary circle of the cut
surface they lie on: circle ``2*c + side`` for curve label ``c``. Interior curves have
sides 0 and 1, peripheral curves only side 0. A circle is traced with the surface on its
left: the curve slot after ``c`` is ``shifted(glue[shifted(c, 1)], 1)``.
"""
import hashlib
import json
import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import (
    ArcCountMismatch,
    DisconnectedMap,
    EmptyMulticurve,
    InconsistentCurves,
    InvalidConfig,
    InvalidCurve,
    InvalidGluing,
    NonAlternatingSlots,
    SignatureMismatch,
    UnknownArc,
    UnknownCurve,
)

logger = logging.getLogger(__name__)

NO_SLOT = -1
CURVE_POSITIONS = (1, 3, 5)

Decoration = Tuple[Tuple[int, int], ...]


def hex_of(slot: int) -> int:
    return slot // 6


def position(slot: int) -> int:
    return slot % 6


def shifted(slot: int, step: int) -> int:
    """Slot ``step`` sides further counterclockwise in the same hexagon"""
    return 6 * (slot // 6) + (slot % 6 + step) % 6


def is_arc_slot(slot: int) -> bool:
    return slot % 2 == 0


@dataclass(frozen=True)
class SurfaceSig:
    genus: int
    boundary_count: int

    def __post_init__(self):
        if self.genus < 0 or self.boundary_count < 0:
            raise InvalidConfig(f"Negative genus or boundary count in S{self.genus},{self.boundary_count}")
        if self.euler_characteristic >= 0:
            raise InvalidConfig(
                f"S{self.genus},{self.boundary_count} has Euler characteristic {self.euler_characteristic} >= 0"
            )

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.boundary_count

    @property
    def arc_count(self) -> int:
        """kappa_a: arcs of any hexagon decomposition"""
        return 3 * abs(self.euler_characteristic)

    @property
    def hexagon_count(self) -> int:
        return 2 * abs(self.euler_characteristic)

    @property
    def pants_curve_count(self) -> int:
        """kappa_c: curves of a pants decomposition, peripheral curves included"""
        return 3 * self.genus - 3 + 2 * self.boundary_count

    def __str__(self) -> str:
        return f"S{self.genus},{self.boundary_count}"


@dataclass(frozen=True)
class HexMap:
    """Combinatorial map of a hexagon decomposition (Gamma, A)"""

    signature: SurfaceSig
    glue: Tuple[int, ...]
    arc_label: Tuple[int, ...]
    circle: Tuple[int, ...]
    peripheral: FrozenSet[int]

    @property
    def hexagon_count(self) -> int:
        return len(self.glue) // 6

    @property
    def slot_count(self) -> int:
        return len(self.glue)

    def arc_slots(self) -> List[int]:
        return [s for s in range(self.slot_count) if is_arc_slot(s)]

    def curve_slots(self) -> List[int]:
        return [s for s in range(self.slot_count) if not is_arc_slot(s)]

    def arc_labels(self) -> List[int]:
        return sorted({self.arc_label[s] for s in self.arc_slots()})

    def curve_labels(self) -> List[int]:
        return sorted({self.circle[s] // 2 for s in self.curve_slots() if self.circle[s] >= 0})

    def interior_curves(self) -> List[int]:
        return [c for c in self.curve_labels() if c not in self.peripheral]

    def slots_of_arc(self, label: int) -> Tuple[int, int]:
        found = [s for s in self.arc_slots() if self.arc_label[s] == label]
        if len(found) != 2:
            raise UnknownArc(f"Arc {label} does not exist")
        return found[0], found[1]

    def trace_next(self, slot: int) -> int:
        """Next curve slot along the boundary circle through ``slot``"""
        return shifted(self.glue[shifted(slot, 1)], 1)

    def circle_slots(self, circle_id: int) -> List[int]:
        """Curve slots of a circle in trace order, starting at the smallest slot"""
        members = [s for s in self.curve_slots() if self.circle[s] == circle_id]
        if not members:
            raise UnknownCurve(f"Circle {circle_id} does not exist")
        start = min(members)
        ordered = [start]
        slot = self.trace_next(start)
        while slot != start:
            ordered.append(slot)
            slot = self.trace_next(slot)
        return ordered

    def hexagons_on_curve(self, label: int) -> List[int]:
        return [hex_of(s) for s in self.curve_slots() if self.circle[s] // 2 == label]

    def next_arc_label(self) -> int:
        return max(self.arc_labels(), default=-1) + 1

    def next_curve_label(self) -> int:
        return max(self.curve_labels(), default=-1) + 1

    def is_pants_maximal(self) -> bool:
        return len(self.curve_labels()) == self.signature.pants_curve_count


@dataclass(frozen=True)
class CircleTrace:
    circle: int
    curve: int
    side: int
    peripheral: bool
    slots: Tuple[int, ...]
    arc_endpoints: Tuple[int, ...]


@dataclass(frozen=True)
class CompatibleCurve:
    """Cyclic sequence of (hexagon, entry arc slot, exit arc slot) segments"""

    segments: Tuple[Tuple[int, int, int], ...]

    def __len__(self) -> int:
        return len(self.segments)

    def reversed(self) -> "CompatibleCurve":
        return CompatibleCurve(tuple((h, x, e) for h, e, x in reversed(self.segments)))

    def _min_rotation(self) -> Tuple[Tuple[int, int, int], ...]:
        n = len(self.segments)
        return min(self.segments[i:] + self.segments[:i] for i in range(n))

    def canonical(self) -> "CompatibleCurve":
        return CompatibleCurve(min(self._min_rotation(), self.reversed()._min_rotation()))

    def is_canonical_direction(self) -> bool:
        return self._min_rotation() <= self.reversed()._min_rotation()

    def exit_slots(self) -> Tuple[int, ...]:
        return tuple(x for _, _, x in self.segments)

    def crossed_arcs(self, hex_map: HexMap) -> FrozenSet[int]:
        return frozenset(hex_map.arc_label[x] for x in self.exit_slots())


@dataclass(frozen=True)
class NormalVec:
    counts: Tuple[Tuple[int, int], ...]

    def as_dict(self) -> Dict[int, int]:
        return dict(self.counts)

    def total(self) -> int:
        return sum(n for _, n in self.counts)


def _trace_cycles(hex_map: HexMap) -> List[Tuple[int, ...]]:
    seen = set()
    cycles = []
    for start in hex_map.curve_slots():
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        slot = hex_map.trace_next(start)
        while slot != start:
            if slot in seen or is_arc_slot(slot):
                raise InvalidGluing(f"Boundary trace from slot {start} does not close")
            cycle.append(slot)
            seen.add(slot)
            slot = hex_map.trace_next(slot)
        cycles.append(tuple(cycle))
    return cycles


def validate(hex_map: HexMap, sig: Optional[SurfaceSig] = None) -> bool:
    """Check every invariant of a hexagon decomposition; raise on the first violation"""
    sig = sig or hex_map.signature
    n = hex_map.slot_count
    if n == 0 or n % 6 or len(hex_map.arc_label) != n or len(hex_map.circle) != n:
        raise NonAlternatingSlots(f"Slot arrays of length {n}, {len(hex_map.arc_label)}, {len(hex_map.circle)}")
    if all(c < 0 for c in hex_map.circle):
        raise EmptyMulticurve("The decomposition carries no curve")

    for s in range(n):
        if is_arc_slot(s):
            if hex_map.glue[s] < 0 or hex_map.arc_label[s] < 0 or hex_map.circle[s] >= 0:
                raise NonAlternatingSlots(f"Slot {s} should be an arc side")
        elif hex_map.glue[s] >= 0 or hex_map.circle[s] < 0:
            raise NonAlternatingSlots(f"Slot {s} should be a curve side")

    labels_seen = {}
    for s in hex_map.arc_slots():
        t = hex_map.glue[s]
        if t >= n or t == s or not is_arc_slot(t) or hex_map.glue[t] != s:
            raise InvalidGluing(f"Arc gluing is not a fixed-point-free involution at slot {s}")
        if hex_map.arc_label[t] != hex_map.arc_label[s]:
            raise InvalidGluing(f"Slots {s} and {t} carry different arc labels")
        pair = (min(s, t), max(s, t))
        if labels_seen.setdefault(hex_map.arc_label[s], pair) != pair:
            raise InvalidGluing(f"Arc label {hex_map.arc_label[s]} used twice")

    circles_seen = set()
    for cycle in _trace_cycles(hex_map):
        ids = {hex_map.circle[s] for s in cycle}
        if len(ids) != 1:
            raise InconsistentCurves(f"Boundary circle through slot {cycle[0]} mixes circle ids {sorted(ids)}")
        circle_id = ids.pop()
        if circle_id in circles_seen:
            raise InconsistentCurves(f"Circle id {circle_id} labels two boundary circles")
        circles_seen.add(circle_id)

    curves = {c // 2 for c in circles_seen}
    for label in curves:
        sides = {c % 2 for c in circles_seen if c // 2 == label}
        expected = {0} if label in hex_map.peripheral else {0, 1}
        if sides != expected:
            raise InconsistentCurves(f"Curve {label} has sides {sorted(sides)}, expected {sorted(expected)}")
    if not hex_map.peripheral <= curves:
        raise InconsistentCurves(f"Peripheral labels {sorted(hex_map.peripheral - curves)} have no circle")

    hexagons = hex_map.hexagon_count
    arcs = len(labels_seen)
    euler = hexagons - arcs
    if arcs != sig.arc_count:
        raise ArcCountMismatch(f"{arcs} arcs, expected {sig.arc_count} for {sig}")
    boundary = len(hex_map.peripheral)
    genus2 = 2 - boundary - euler
    if boundary != sig.boundary_count or genus2 != 2 * sig.genus:
        raise SignatureMismatch(f"Map has chi={euler} with {boundary} boundary curves, expected {sig}")

    graph = nx.Graph()
    graph.add_nodes_from(range(hexagons))
    for s in hex_map.arc_slots():
        graph.add_edge(hex_of(s), hex_of(hex_map.glue[s]))
    by_circle: Dict[int, int] = {}
    for s in hex_map.curve_slots():
        by_circle.setdefault(hex_map.circle[s], hex_of(s))
    for circle_id, h in by_circle.items():
        if circle_id % 2 == 0 and circle_id + 1 in by_circle:
            graph.add_edge(h, by_circle[circle_id + 1])
    if not nx.is_connected(graph):
        raise DisconnectedMap(f"Map splits into {nx.number_connected_components(graph)} components")
    return True


def curve_traces(hex_map: HexMap) -> List[CircleTrace]:
    """Boundary circles of the cut surface with their curve slots and arc endpoints"""
    traces = []
    for cycle in _trace_cycles(hex_map):
        circle_id = hex_map.circle[cycle[0]]
        label = circle_id // 2
        traces.append(
            CircleTrace(
                circle=circle_id,
                curve=label,
                side=circle_id % 2,
                peripheral=label in hex_map.peripheral,
                slots=cycle,
                arc_endpoints=tuple(hex_map.arc_label[shifted(s, 1)] for s in cycle),
            )
        )
    return sorted(traces, key=lambda t: t.circle)


def check_segments(hex_map: HexMap, curve: CompatibleCurve) -> None:
    """Structural check of a segment cycle: closure, one crossing per arc, one segment per hexagon"""
    if not curve.segments:
        raise InvalidCurve("A curve needs at least one segment")
    n = hex_map.slot_count
    hexagons = set()
    for index, (h, entry, exit_) in enumerate(curve.segments):
        if not (0 <= entry < n and 0 <= exit_ < n) or not is_arc_slot(entry) or not is_arc_slot(exit_):
            raise InvalidCurve(f"Segment {index} does not run between arc slots")
        if hex_of(entry) != h or hex_of(exit_) != h or entry == exit_:
            raise InvalidCurve(f"Segment {index} is not a chord of hexagon {h}")
        if h in hexagons:
            raise InvalidCurve(f"Hexagon {h} visited twice")
        hexagons.add(h)
        following = curve.segments[(index + 1) % len(curve.segments)]
        if hex_map.glue[exit_] != following[1]:
            raise InvalidCurve(f"Segment {index} does not continue into the next segment")
    crossed = [hex_map.arc_label[x] for x in curve.exit_slots()]
    if len(set(crossed)) != len(crossed):
        raise InvalidCurve("The curve crosses an arc twice")


def normal_vector(hex_map: HexMap, curve: CompatibleCurve) -> NormalVec:
    check_segments(hex_map, curve)
    crossed = curve.crossed_arcs(hex_map)
    return NormalVec(tuple((a, 1 if a in crossed else 0) for a in hex_map.arc_labels()))


# Canonical form

@dataclass(frozen=True)
class Labelling:
    """Relabelling from a map to its canonical numbering"""

    slot_map: Tuple[int, ...]
    circle_map: Tuple[Tuple[int, int], ...]
    arc_map: Tuple[Tuple[int, int], ...]
    curve_map: Tuple[Tuple[int, int], ...]

    def circles(self) -> Dict[int, int]:
        return dict(self.circle_map)

    def arcs(self) -> Dict[int, int]:
        return dict(self.arc_map)

    def curves(self) -> Dict[int, int]:
        return dict(self.curve_map)


def _explore_component(hex_map, start, hex_new, rot, circle_new, code, decoration):
    queue = deque()
    h0 = hex_of(start)
    hex_new[h0] = len(hex_new)
    rot[h0] = position(start)
    queue.append(h0)
    while queue:
        h = queue.popleft()
        for p in range(6):
            s = 6 * h + (rot[h] + p) % 6
            if p % 2 == 0:
                t = hex_map.glue[s]
                ht = hex_of(t)
                if ht not in hex_new:
                    hex_new[ht] = len(hex_new)
                    rot[ht] = position(t)
                    queue.append(ht)
                code.append((0, hex_new[ht], (position(t) - rot[ht]) % 6))
            else:
                c = hex_map.circle[s]
                if c not in circle_new:
                    circle_new[c] = len(circle_new)
                code.append((1, circle_new[c], decoration.get(c, 0)))


def _labellings(hex_map, start, hex_new, rot, circle_new, code, decoration) -> Iterator[tuple]:
    hex_new, rot, circle_new, code = dict(hex_new), dict(rot), dict(circle_new), list(code)
    _explore_component(hex_map, start, hex_new, rot, circle_new, code, decoration)
    pending = None
    for c, _ in sorted(circle_new.items(), key=lambda item: item[1]):
        if c // 2 not in hex_map.peripheral and (c ^ 1) not in circle_new:
            pending = c
            break
    if pending is None:
        order = sorted(circle_new.items(), key=lambda item: item[1])
        for c, _ in order:
            partner = -1 if c // 2 in hex_map.peripheral else circle_new[c ^ 1]
            code.append((3, partner, 0))
        yield tuple(code), hex_new, rot, circle_new
        return
    partner = pending ^ 1
    circle_new[partner] = len(circle_new)
    code.append((2, circle_new[pending], 0))
    for c_slot in hex_map.circle_slots(partner):
        yield from _labellings(hex_map, shifted(c_slot, 1), hex_new, rot, circle_new, code, decoration)


@lru_cache(maxsize=65536)
def _canonical_search(hex_map: HexMap, decoration: Decoration):
    table = dict(decoration)
    best = None
    prefix = [(-1, hex_map.signature.genus, hex_map.signature.boundary_count)]
    for start in hex_map.arc_slots():
        for candidate in _labellings(hex_map, start, {}, {}, {}, prefix, table):
            if best is None or candidate[0] < best[0]:
                best = candidate
    return best


def canonical_form(hex_map: HexMap, decoration: Optional[Decoration] = None) -> bytes:
    """Complete isomorphism invariant: minimal breadth-first code over all starting slots.

    ``decoration`` attaches an integer to circle ids (used for curve weights).
    """
    code = _canonical_search(hex_map, tuple(sorted(decoration or ())))[0]
    return json.dumps([list(item) for item in code], separators=(",", ":")).encode()


def canonical_labelling(hex_map: HexMap, decoration: Optional[Decoration] = None) -> Labelling:
    _, hex_new, rot, circle_new = _canonical_search(hex_map, tuple(sorted(decoration or ())))
    slot_map = tuple(6 * hex_new[hex_of(s)] + (position(s) - rot[hex_of(s)]) % 6 for s in range(hex_map.slot_count))

    arc_first: Dict[int, int] = {}
    for s in hex_map.arc_slots():
        label = hex_map.arc_label[s]
        arc_first[label] = min(arc_first.get(label, slot_map[s]), slot_map[s])
    arc_map = {label: i for i, label in enumerate(sorted(arc_first, key=arc_first.get))}

    curve_map: Dict[int, int] = {}
    circle_map: Dict[int, int] = {}
    for c, _ in sorted(circle_new.items(), key=lambda item: item[1]):
        label = c // 2
        if label not in curve_map:
            curve_map[label] = len(curve_map)
            circle_map[c] = 2 * curve_map[label]
        else:
            circle_map[c] = 2 * curve_map[label] + 1
    return Labelling(
        slot_map=slot_map,
        circle_map=tuple(sorted(circle_map.items())),
        arc_map=tuple(sorted(arc_map.items())),
        curve_map=tuple(sorted(curve_map.items())),
    )


def relabel(hex_map: HexMap, labelling: Labelling) -> HexMap:
    n = hex_map.slot_count
    glue = [NO_SLOT] * n
    arc_label = [NO_SLOT] * n
    circle = [NO_SLOT] * n
    arcs, circles, curves = labelling.arcs(), labelling.circles(), labelling.curves()
    for s in range(n):
        t = labelling.slot_map[s]
        if is_arc_slot(s):
            glue[t] = labelling.slot_map[hex_map.glue[s]]
            arc_label[t] = arcs[hex_map.arc_label[s]]
        else:
            circle[t] = circles[hex_map.circle[s]]
    return HexMap(
        signature=hex_map.signature,
        glue=tuple(glue),
        arc_label=tuple(arc_label),
        circle=tuple(circle),
        peripheral=frozenset(curves[c] for c in hex_map.peripheral),
    )


def canonical_relabel(hex_map: HexMap) -> HexMap:
    """Isomorphic map in canonical numbering; equal for isomorphic inputs"""
    return relabel(hex_map, canonical_labelling(hex_map))


def same_structure(first: HexMap, second: HexMap) -> bool:
    """Slot-for-slot equality up to renaming of arc and curve labels"""
    if first.signature != second.signature or first.glue != second.glue:
        return False
    renaming: Dict[int, int] = {}
    for s in first.curve_slots():
        a, b = first.circle[s], second.circle[s]
        if renaming.setdefault(a, b) != b:
            return False
    if len(set(renaming.values())) != len(renaming):
        return False
    for a, b in renaming.items():
        if (a // 2 in first.peripheral) != (b // 2 in second.peripheral):
            return False
        if a % 2 == 0 and a + 1 in renaming and renaming[a + 1] != b ^ 1:
            return False
    return True


def make_map(
    sig: SurfaceSig,
    hexagons: Sequence[Sequence[Tuple[str, int]]],
    peripheral: Sequence[int] = (),
) -> HexMap:
    """Build a map from hexagon side lists.

    Each hexagon is six sides in counterclockwise order: ``("a", label)`` for an arc
    side, ``("c", circle_id)`` for a curve side. The two sides of an arc label are glued.
    """
    n = 6 * len(hexagons)
    glue = [NO_SLOT] * n
    arc_label = [NO_SLOT] * n
    circle = [NO_SLOT] * n
    pending: Dict[int, int] = {}
    for i, sides in enumerate(hexagons):
        for j, (kind, value) in enumerate(sides):
            s = 6 * i + j
            if kind == "a":
                arc_label[s] = value
                if value in pending:
                    t = pending.pop(value)
                    glue[s], glue[t] = t, s
                else:
                    pending[value] = s
            else:
                circle[s] = value
    if pending:
        raise InvalidGluing(f"Arcs {sorted(pending)} have a single side")
    return HexMap(sig, tuple(glue), tuple(arc_label), tuple(circle), frozenset(peripheral))


def key_digest(key: bytes) -> str:
    """Short printable name of a canonical key for reports"""
    return hashlib.sha1(key).hexdigest()[:16]
