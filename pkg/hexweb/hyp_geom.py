"""Hyperbolic realization of hexagon decompositions on a surface given by Fenchel-Nielsen data.

Isometries of the upper half-plane are real 2x2 matrices of determinant 1.
``translation(t)`` moves along the imaginary axis by ``t`` towards infinity and
``rotation(theta)`` turns counterclockwise about ``i``. A frame is an isometry taking the
point ``i`` with the upward direction to a point and direction on the surface.

Hexagon sides are walked counterclockwise with the hexagon on the left: side ``j`` starts
at frame ``F_j``, with ``F_0 = I`` and ``F_{j+1} = F_j T(L_j) R(pi/2)``. Crossing an arc
from side ``s`` of one hexagon to side ``s'`` of the other composes
``F_s T(L) R(pi) F_s'^-1``.

Every curve slot stores the coordinate, along its curve, of its counterclockwise start.
Coordinates grow in the curve's positive direction, the trace direction of side 0, so a
side 1 slot runs towards decreasing coordinates.
"""
import logging
import math
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from config import COMPARE_TOL, DRIFT_TOL, RESIDUAL_TOL, SNAP_TOL

from .errors import (
    DegenerateGeometry,
    EllipticOrParabolicHolonomy,
    InvalidConfig,
    InvalidPants,
    NonPositiveSide,
    NotCrossing,
    UnknownCurve,
)
from .moves_topo import (
    CurveAddition,
    Reattachment,
    add_curve_detailed,
    alpha_layout,
    crossing_slots,
    flip,
    interval_pieces,
    reattach,
)
from .pants_bridge import PantsDecomp, base_pants, phi, validate_pants
from .surface_core import (
    CURVE_POSITIONS,
    CompatibleCurve,
    HexMap,
    SurfaceSig,
    check_segments,
    hex_of,
    is_arc_slot,
    position,
    same_structure,
    shifted,
)

logger = logging.getLogger(__name__)


# Matrices

def translation(t: float) -> np.ndarray:
    return np.array([[math.exp(t / 2), 0.0], [0.0, math.exp(-t / 2)]])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]])


QUARTER_TURN = rotation(math.pi / 2)
HALF_TURN = rotation(math.pi)


def sl2_inverse(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def line_ends(m: np.ndarray) -> Tuple[float, float]:
    """Images of 0 and infinity, the ends of the line ``m`` carries the imaginary axis to"""
    low = m[0, 1] / m[1, 1] if m[1, 1] != 0 else math.inf
    high = m[0, 0] / m[1, 0] if m[1, 0] != 0 else math.inf
    return low, high


def perpendicular(frame: np.ndarray, other: np.ndarray) -> Tuple[float, float]:
    """Common perpendicular of two disjoint lines given by frames.

    Returns its length and its foot on the first line, as a signed distance from the
    first frame's base point in the frame's direction.
    """
    p, q = line_ends(sl2_inverse(frame) @ other)
    if not (math.isfinite(p) and math.isfinite(q)) or p * q <= 0:
        raise DegenerateGeometry("Lines meet or share an ideal endpoint")
    ap, aq = abs(p), abs(q)
    if ap == aq:
        raise DegenerateGeometry("Lines meet at a right angle")
    return math.acosh((ap + aq) / abs(aq - ap)), 0.5 * (math.log(ap) + math.log(aq))


def axis_frame(holonomy: np.ndarray, tol: float = COMPARE_TOL) -> np.ndarray:
    """Frame sending the imaginary axis, oriented upwards, to the translation axis"""
    trace = float(np.trace(holonomy))
    if abs(trace) <= 2 + tol:
        raise EllipticOrParabolicHolonomy(f"Holonomy trace {trace:.12g} is not hyperbolic")
    values, vectors = np.linalg.eig(holonomy)
    order = np.argsort(-np.abs(values.real))
    frame = np.column_stack([vectors[:, order[0]].real, vectors[:, order[1]].real])
    det = np.linalg.det(frame)
    if det < 0:
        frame[:, 1] *= -1
        det = -det
    return frame / math.sqrt(det)


def translation_length(holonomy: np.ndarray, tol: float = COMPARE_TOL) -> float:
    trace = abs(float(np.trace(holonomy)))
    if trace <= 2 + tol:
        raise EllipticOrParabolicHolonomy(f"Holonomy trace {trace:.12g} is not hyperbolic")
    return 2 * math.acosh(trace / 2)


def snap_floor(value: float, tol: float = SNAP_TOL) -> int:
    """Floor, with values within ``tol`` of an integer taken as that integer"""
    nearest = round(value)
    if abs(value - nearest) <= tol:
        return int(nearest)
    return math.floor(value)


# Right-angled hexagons

def solve_hexagon(a: float, b: float, c: float) -> Tuple[float, float, float]:
    """Sides opposite to alternate sides ``a``, ``b``, ``c`` of a right-angled hexagon"""
    for side in (a, b, c):
        if not side > 0:
            raise NonPositiveSide(f"Alternate side {side} is not positive")
    ch = (math.cosh(a), math.cosh(b), math.cosh(c))
    sh = (math.sinh(a), math.sinh(b), math.sinh(c))
    result = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        result.append(math.acosh((ch[i] + ch[j] * ch[k]) / (sh[j] * sh[k])))
    return result[0], result[1], result[2]


def hexagon_from_arcs(a0: float, a2: float, a4: float) -> Tuple[float, ...]:
    """Six sides in slot order from the arc sides at positions 0, 2 and 4"""
    opposite0, opposite2, opposite4 = solve_hexagon(a0, a2, a4)
    return (a0, opposite4, a2, opposite0, a4, opposite2)


def hexagon_from_curves(c1: float, c3: float, c5: float) -> Tuple[float, ...]:
    """Six sides in slot order from the curve sides at positions 1, 3 and 5"""
    opposite1, opposite3, opposite5 = solve_hexagon(c1, c3, c5)
    return (opposite3, c1, opposite5, c3, opposite1, c5)


def hexagon_residual(sides: Sequence[float]) -> float:
    """Largest relative defect of the six alternate-side identities"""
    worst = 0.0
    for p in range(6):
        before, after, opposite = sides[(p - 1) % 6], sides[(p + 1) % 6], sides[(p + 3) % 6]
        rhs = math.cosh(opposite) + math.cosh(before) * math.cosh(after)
        lhs = math.cosh(sides[p]) * math.sinh(before) * math.sinh(after)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


@lru_cache(maxsize=65536)
def hexagon_frames(sides: Tuple[float, ...]) -> Tuple[np.ndarray, ...]:
    frames = [np.eye(2)]
    for j in range(5):
        frames.append(frames[-1] @ translation(sides[j]) @ QUARTER_TURN)
    return tuple(frames)


def closure_error(sides: Tuple[float, ...]) -> float:
    """Distance of the walk around the hexagon from the identity (up to sign)"""
    closing = hexagon_frames(sides)[5] @ translation(sides[5]) @ QUARTER_TURN
    return float(min(np.abs(closing - np.eye(2)).max(), np.abs(closing + np.eye(2)).max()))


# Geometric states

@dataclass(frozen=True)
class FNConfig:
    """Fenchel-Nielsen coordinates over a pants decomposition"""

    decomposition: PantsDecomp
    lengths: Tuple[Tuple[int, float], ...]
    twists: Tuple[Tuple[int, float], ...]

    @classmethod
    def of(cls, decomposition: PantsDecomp, lengths: Dict[int, float], twists: Optional[Dict[int, float]] = None):
        twists = twists or {}
        return cls(
            decomposition,
            tuple(sorted((c, float(v)) for c, v in lengths.items())),
            tuple(sorted((c, float(twists.get(c, 0.0))) for c in decomposition.interior_curves())),
        )

    @property
    def signature(self) -> SurfaceSig:
        return self.decomposition.signature

    def length(self, curve: int) -> float:
        return dict(self.lengths)[curve]

    def twist(self, curve: int) -> float:
        return dict(self.twists).get(curve, 0.0)


def validate_config(config: FNConfig) -> bool:
    try:
        validate_pants(config.decomposition)
    except InvalidPants as e:
        raise InvalidConfig(f"Invalid pants combinatorics: {e.message}")
    lengths = dict(config.lengths)
    curves = config.decomposition.curves()
    if sorted(lengths) != curves:
        raise InvalidConfig(f"Lengths given for curves {sorted(lengths)}, expected {curves}")
    for curve, value in lengths.items():
        if not (value > 0 and math.isfinite(value)):
            raise InvalidConfig(f"Curve {curve} has length {value}")
    for curve, value in config.twists:
        if curve in config.decomposition.peripheral or not math.isfinite(value):
            raise InvalidConfig(f"Twist {value} given for curve {curve}")
    return True


def default_config(sig: SurfaceSig, length: float = 2.0, twist: float = 0.0) -> FNConfig:
    decomposition = base_pants(sig)
    return FNConfig.of(
        decomposition,
        {c: length for c in decomposition.curves()},
        {c: twist for c in decomposition.interior_curves()},
    )


def random_config(
    sig: SurfaceSig,
    rng: random.Random,
    length_range: Tuple[float, float] = (0.5, 3.0),
    twist_range: Tuple[float, float] = (0.0, 1.0),
) -> FNConfig:
    decomposition = base_pants(sig)
    return FNConfig.of(
        decomposition,
        {c: rng.uniform(*length_range) for c in decomposition.curves()},
        {c: rng.uniform(*twist_range) for c in decomposition.interior_curves()},
    )


@dataclass(frozen=True)
class GeomData:
    """Side lengths per slot, curve coordinates of curve slots, and curve lengths"""

    sides: Tuple[float, ...]
    starts: Tuple[float, ...]
    curve_lengths: Tuple[Tuple[int, float], ...]
    tolerance: float = RESIDUAL_TOL

    def hexagon(self, h: int) -> Tuple[float, ...]:
        return self.sides[6 * h:6 * h + 6]

    def curve_length(self, label: int) -> float:
        for curve, value in self.curve_lengths:
            if curve == label:
                return value
        raise UnknownCurve(f"Curve {label} has no length")


@dataclass(frozen=True)
class GeoState:
    hex_map: HexMap
    geom: GeomData

    def frames(self, h: int) -> Tuple[np.ndarray, ...]:
        return hexagon_frames(self.geom.hexagon(h))

    def arc_length(self, label: int) -> float:
        return self.geom.sides[self.hex_map.slots_of_arc(label)[0]]

    def side_sign(self, slot: int) -> int:
        return 1 if self.hex_map.circle[slot] % 2 == 0 else -1

    def curve_length_of_slot(self, slot: int) -> float:
        return self.geom.curve_length(self.hex_map.circle[slot] // 2)


def reference_point(state: GeoState, circle_id: int) -> float:
    """Coordinate of the endpoint of the smallest-label arc ending on a side of a curve"""
    slots = state.hex_map.circle_slots(circle_id)
    chosen = min(slots, key=lambda s: (state.hex_map.arc_label[shifted(s, -1)], s))
    return state.geom.starts[chosen]


def reference_offset(state: GeoState, label: int) -> float:
    """Gluing offset of an interior curve: side 1 reference point seen from side 0"""
    if label in state.hex_map.peripheral:
        raise UnknownCurve(f"Curve {label} is peripheral and has a single side")
    length = state.geom.curve_length(label)
    return (reference_point(state, 2 * label + 1) - reference_point(state, 2 * label)) % length


def build_base(config: FNConfig) -> GeoState:
    """phi of the base pants decomposition, each pants cut into two congruent hexagons"""
    validate_config(config)
    decomposition = config.decomposition
    hex_map = phi(decomposition)
    sides = [0.0] * hex_map.slot_count
    starts = [0.0] * hex_map.slot_count
    # positions of cuff k of (c0, c1, c2) in hexagons A and B
    a_position = {0: 5, 1: 1, 2: 3}
    b_position = {0: 1, 1: 5, 2: 3}
    seen = set()
    for i, cuffs in enumerate(decomposition.pants):
        half = [config.length(c) / 2 for c in cuffs]
        sides[12 * i:12 * i + 6] = hexagon_from_curves(half[1], half[2], half[0])
        sides[12 * i + 6:12 * i + 12] = hexagon_from_curves(half[0], half[2], half[1])
        for k, curve in enumerate(cuffs):
            length = config.length(curve)
            a_slot, b_slot = 12 * i + a_position[k], 12 * i + 6 + b_position[k]
            if curve not in seen:
                starts[a_slot], starts[b_slot] = 0.0, length / 2
                seen.add(curve)
            else:
                twist = config.twist(curve) % length
                starts[a_slot], starts[b_slot] = twist, (twist - length / 2) % length
    geom = GeomData(tuple(sides), tuple(starts), config.lengths)
    state = GeoState(hex_map, geom)
    logger.debug(f"Built base geometry for {config.signature}, residual {state_residual(state):.3g}")
    return state


# Checks

def state_residual(state: GeoState) -> float:
    return max(hexagon_residual(state.geom.hexagon(h)) for h in range(state.hex_map.hexagon_count))


def curve_sum_error(state: GeoState) -> float:
    """Largest relative mismatch between a side's segment lengths and its curve's length"""
    worst = 0.0
    circles = {state.hex_map.circle[s] for s in state.hex_map.curve_slots()}
    for circle_id in circles:
        total = sum(state.geom.sides[s] for s in state.hex_map.circle_slots(circle_id))
        length = state.geom.curve_length(circle_id // 2)
        worst = max(worst, abs(total - length) / length)
    return worst


def check_geometry(state: GeoState, tol: Optional[float] = None) -> bool:
    tol = state.geom.tolerance if tol is None else tol
    hex_map, sides = state.hex_map, state.geom.sides
    for s in hex_map.arc_slots():
        if abs(sides[s] - sides[hex_map.glue[s]]) > COMPARE_TOL * max(1.0, sides[s]):
            raise DegenerateGeometry(f"Arc {hex_map.arc_label[s]} has two different lengths")
    residual = state_residual(state)
    if residual > tol:
        raise DegenerateGeometry(f"Hexagon residual {residual:.3g} above {tol:.3g}")
    error = curve_sum_error(state)
    if error > max(tol, COMPARE_TOL):
        raise DegenerateGeometry(f"Curve segments miss their curve length by {error:.3g}")
    return True


def renormalized(state: GeoState) -> GeoState:
    """Re-solve every hexagon from its arc sides"""
    sides = list(state.geom.sides)
    for h in range(state.hex_map.hexagon_count):
        base = 6 * h
        sides[base:base + 6] = hexagon_from_arcs(sides[base], sides[base + 2], sides[base + 4])
    return GeoState(state.hex_map, GeomData(tuple(sides), state.geom.starts, state.geom.curve_lengths, state.geom.tolerance))


def _circular_gap(a: float, b: float, length: float) -> float:
    gap = (a - b) % length
    return min(gap, length - gap)


def geometry_matches(first: GeoState, second: GeoState, tol: float = DRIFT_TOL) -> bool:
    """Slot-by-slot comparison of two states with the same combinatorial structure.

    Curve coordinates are compared relative to the smallest side 0 slot of each curve.
    """
    if not same_structure(first.hex_map, second.hex_map):
        return False
    for a, b in zip(first.geom.sides, second.geom.sides):
        if abs(a - b) > tol * max(1.0, abs(a)):
            return False
    for label in first.hex_map.curve_labels():
        origin = first.hex_map.circle_slots(2 * label)[0]
        other_label = second.hex_map.circle[origin] // 2
        length = first.geom.curve_length(label)
        if abs(length - second.geom.curve_length(other_label)) > tol * max(1.0, length):
            return False
        for s in first.hex_map.curve_slots():
            if first.hex_map.circle[s] // 2 != label:
                continue
            mine = first.geom.starts[s] - first.geom.starts[origin]
            theirs = second.geom.starts[s] - second.geom.starts[origin]
            if _circular_gap(mine, theirs, length) > tol * max(1.0, length):
                return False
    return True


# Development along curves

def glue_matrix(state: GeoState, slot: int, partner: int) -> np.ndarray:
    """Coordinates of ``partner``'s hexagon into those of ``slot``'s hexagon"""
    near = state.frames(hex_of(slot))[position(slot)]
    far = state.frames(hex_of(partner))[position(partner)]
    return near @ translation(state.geom.sides[slot]) @ HALF_TURN @ sl2_inverse(far)


def develop(state: GeoState, curve: CompatibleCurve) -> List[np.ndarray]:
    """Placements of the hexagons met along a curve, the last one being the holonomy"""
    placements = [np.eye(2)]
    n = len(curve.segments)
    for i, (_, _, exit_) in enumerate(curve.segments):
        entry = curve.segments[(i + 1) % n][1]
        placements.append(placements[-1] @ glue_matrix(state, exit_, entry))
    return placements


def holonomy_length(state: GeoState, curve: CompatibleCurve) -> float:
    check_segments(state.hex_map, curve)
    return translation_length(develop(state, curve)[-1])


def circle_holonomy_length(state: GeoState, circle_id: int) -> float:
    """Length of a curve of the multicurve, developed along one of its sides"""
    segments = tuple(
        (hex_of(s), shifted(s, -1), shifted(s, 1)) for s in state.hex_map.circle_slots(circle_id)
    )
    return translation_length(develop(state, CompatibleCurve(segments))[-1])


@dataclass(frozen=True)
class CrossingGeometry:
    """Split of one crossed arc: halves to the left and right curve lines and their feet"""

    arc: int
    slot: int
    left_length: float
    right_length: float
    left_foot: float
    right_foot: float

    @property
    def twist(self) -> float:
        """Signed distance along the curve from the left foot to the right foot"""
        return self.right_foot - self.left_foot


@dataclass(frozen=True)
class CurveDevelopment:
    curve: CompatibleCurve
    length: float
    crossings: Tuple[CrossingGeometry, ...]

    def ratios(self) -> List[float]:
        return [c.twist / self.length for c in self.crossings]


def curve_development(state: GeoState, curve: CompatibleCurve) -> CurveDevelopment:
    """Develop the hexagons along ``curve`` and split every crossed arc at the curve's axis.

    Crossing ``i`` is the entry arc of segment ``i``; its left half ends on the curve side
    before the entry slot, its right half on the side after it.
    """
    check_segments(state.hex_map, curve)
    placements = develop(state, curve)
    holonomy = placements[-1]
    length = translation_length(holonomy)
    axis = axis_frame(holonomy)
    crossings = []
    for i, (h, entry, _) in enumerate(curve.segments):
        frames = state.frames(h)
        left = placements[i] @ frames[position(shifted(entry, -1))]
        right = placements[i] @ frames[position(shifted(entry, 1))]
        left_length, left_foot = perpendicular(axis, left)
        right_length, right_foot = perpendicular(axis, right)
        crossings.append(
            CrossingGeometry(
                arc=state.hex_map.arc_label[entry],
                slot=entry,
                left_length=left_length,
                right_length=right_length,
                left_foot=left_foot,
                right_foot=right_foot,
            )
        )
    return CurveDevelopment(curve, length, tuple(crossings))


def split_arc_geometry(state: GeoState, curve: CompatibleCurve, arc: int) -> Tuple[float, float, float]:
    """Lengths of the two halves of ``arc`` cut by ``curve``, and the twist between their feet"""
    if arc not in curve.crossed_arcs(state.hex_map):
        raise NotCrossing(f"Arc {arc} is not crossed by the curve")
    development = curve_development(state, curve)
    for crossing in development.crossings:
        if crossing.arc == arc:
            return crossing.left_length, crossing.right_length, crossing.twist
    raise NotCrossing(f"Arc {arc} is not crossed by the curve")


# Crossings with a fixed arc system

@dataclass(frozen=True)
class FixedArc:
    """An orthogeodesic arc remembered by its two feet, as (circle, coordinate) pairs"""

    label: int
    near: Tuple[int, float]
    far: Tuple[int, float]


@dataclass(frozen=True)
class ArcCrossings:
    """Crossings of a fixed arc system with the arcs and the added curves of a state.

    ``matched`` maps fixed arcs that are still arcs of the state to their current labels;
    those are not traced.
    """

    arcs: Dict[int, int]
    curves: Dict[int, int]
    matched: Dict[int, int]
    misrouted: int = 0

    @property
    def arcs_total(self) -> int:
        return sum(self.arcs.values())

    @property
    def curves_total(self) -> int:
        return sum(self.curves.values())


def _foot(state: GeoState, arc_slot: int) -> Tuple[int, float]:
    s = shifted(arc_slot, 1)
    return state.hex_map.circle[s], state.geom.starts[s]


def fixed_arcs(state: GeoState) -> List[FixedArc]:
    result = []
    for label in state.hex_map.arc_labels():
        s1, s2 = state.hex_map.slots_of_arc(label)
        result.append(FixedArc(label, _foot(state, s1), _foot(state, s2)))
    return result


def locate(state: GeoState, circle_id: int, coordinate: float) -> Tuple[int, float]:
    """Curve slot of a circle holding a coordinate, and the distance from the slot's start"""
    length = state.geom.curve_length(circle_id // 2)
    best = None
    for s in state.hex_map.circle_slots(circle_id):
        d = (state.side_sign(s) * (coordinate - state.geom.starts[s])) % length
        if d > length - DRIFT_TOL * max(1.0, length):
            d -= length
        overshoot = max(0.0, -d, d - state.geom.sides[s])
        if best is None or overshoot < best[0]:
            best = (overshoot, s, d)
    _, slot, d = best
    return slot, min(max(d, 0.0), state.geom.sides[slot])


def _side_hit(line: np.ndarray, frame: np.ndarray, length: float) -> Optional[Tuple[float, float]]:
    """Where a line meets a hexagon side: distance along the side and parameter along the line"""
    p, q = line_ends(sl2_inverse(frame) @ line)
    if not (math.isfinite(p) and math.isfinite(q)) or p * q >= 0:
        return None
    x = 0.5 * math.log(-p * q)
    if x < -COMPARE_TOL or x > length + COMPARE_TOL:
        return None
    p, q = line_ends(sl2_inverse(line) @ frame)
    if not (math.isfinite(p) and math.isfinite(q)) or p * q >= 0:
        return None
    return x, 0.5 * math.log(-p * q)


def _curve_crossing(state: GeoState, slot: int, x: float) -> Tuple[int, np.ndarray]:
    """Slot on the other side of a curve, and the map of its hexagon into ``slot``'s hexagon"""
    coordinate = state.geom.starts[slot] + state.side_sign(slot) * x
    other, d = locate(state, state.hex_map.circle[slot] ^ 1, coordinate)
    near = state.frames(hex_of(slot))[position(slot)]
    far = state.frames(hex_of(other))[position(other)]
    return other, near @ translation(x) @ HALF_TURN @ translation(-d) @ sl2_inverse(far)


def trace_arc(
    state: GeoState, foot: Tuple[int, float], fixed: FrozenSet[int], max_steps: int = 10_000
) -> Tuple[Counter, Counter, int]:
    """Follow the orthogeodesic leaving a foot until it reaches a curve of ``fixed``.

    Returns the arcs and the other curves it crosses, with multiplicity, and the circle it
    ends on.
    """
    hex_map = state.hex_map
    slot, d = locate(state, *foot)
    h = hex_of(slot)
    line = state.frames(h)[position(slot)] @ translation(d) @ QUARTER_TURN
    t = 0.0
    arcs, curves = Counter(), Counter()
    for _ in range(max_steps):
        frames = state.frames(h)
        exit_ = None
        for j in range(6):
            s = 6 * h + j
            hit = _side_hit(line, frames[j], state.geom.sides[s])
            if hit is not None and hit[1] > t + COMPARE_TOL and (exit_ is None or hit[1] < exit_[2]):
                exit_ = (s, hit[0], hit[1])
        if exit_ is None:
            raise DegenerateGeometry(f"Arc from circle {foot[0]} leaves hexagon {h} through no side")
        s, x, t = exit_
        if is_arc_slot(s):
            arcs[hex_map.arc_label[s]] += 1
            partner = hex_map.glue[s]
            line = sl2_inverse(glue_matrix(state, s, partner)) @ line
            h = hex_of(partner)
            continue
        circle_id = hex_map.circle[s]
        if circle_id // 2 in fixed:
            return arcs, curves, circle_id
        curves[circle_id // 2] += 1
        other, crossing = _curve_crossing(state, s, x)
        line = sl2_inverse(crossing) @ line
        h = hex_of(other)
    raise DegenerateGeometry(f"Arc from circle {foot[0]} crosses more than {max_steps} sides")


def _same_foot(state: GeoState, first: Tuple[int, float], second: Tuple[int, float], tol: float) -> bool:
    if first[0] != second[0]:
        return False
    length = state.geom.curve_length(first[0] // 2)
    return _circular_gap(first[1], second[1], length) <= tol * max(1.0, length)


def fixed_arc_crossings(
    state: GeoState, system: Sequence[FixedArc], fixed: FrozenSet[int], tol: float = DRIFT_TOL
) -> ArcCrossings:
    """Crossings of ``system``, an arc system on the curves ``fixed``, with the arcs and curves of a state.

    A fixed arc with both feet on the feet of a current arc is that arc.
    """
    current = fixed_arcs(state)
    arcs = Counter({a.label: 0 for a in current})
    curves = Counter({c: 0 for c in state.hex_map.curve_labels() if c not in fixed})
    matched = {}
    misrouted = 0
    for arc in system:
        twin = next(
            (
                c.label
                for c in current
                if (_same_foot(state, arc.near, c.near, tol) and _same_foot(state, arc.far, c.far, tol))
                or (_same_foot(state, arc.near, c.far, tol) and _same_foot(state, arc.far, c.near, tol))
            ),
            None,
        )
        if twin is not None:
            matched[arc.label] = twin
            continue
        crossed_arcs, crossed_curves, end = trace_arc(state, arc.near, fixed)
        arcs.update(crossed_arcs)
        curves.update(crossed_curves)
        if end != arc.far[0]:
            logger.debug(f"Arc {arc.label} ends on circle {end} instead of {arc.far[0]}")
            misrouted += 1
    return ArcCrossings(dict(arcs), dict(curves), matched, misrouted)


# Moves

def _moved_start(state: GeoState, slot: int, old_side: float, new_side: float) -> float:
    """Start of a curve slot whose end stays fixed while its length changes"""
    sign = state.side_sign(slot)
    end = state.geom.starts[slot] + sign * old_side
    return (end - sign * new_side) % state.curve_length_of_slot(slot)


def geo_flip(state: GeoState, arc: int) -> GeoState:
    hex_map = state.hex_map
    new_map = flip(hex_map, arc)
    s1, s2 = hex_map.slots_of_arc(arc)
    h1, h2 = hex_of(s1), hex_of(s2)
    sides, starts = state.geom.sides, state.geom.starts
    c1, a1, c2, a2, c3 = (shifted(s1, k) for k in range(1, 6))
    d1, b1, d2, b2, d3 = (shifted(s2, k) for k in range(1, 6))

    frames1 = state.frames(h1)
    c2_line = frames1[position(c2)]
    d2_line = glue_matrix(state, s1, s2) @ state.frames(h2)[position(d2)]
    diagonal, c_foot = perpendicular(c2_line, d2_line)
    _, d_foot = perpendicular(d2_line, c2_line)

    p_sides = hexagon_from_arcs(diagonal, sides[a2], sides[b1])
    q_sides = hexagon_from_arcs(diagonal, sides[b2], sides[a1])
    expected = (
        (p_sides[1], sides[c2] - c_foot),
        (p_sides[3], sides[c3] + sides[d1]),
        (p_sides[5], d_foot),
        (q_sides[1], sides[d2] - d_foot),
        (q_sides[3], sides[d3] + sides[c1]),
        (q_sides[5], c_foot),
    )
    for solved, measured in expected:
        if abs(solved - measured) > 1e3 * COMPARE_TOL * max(1.0, measured):
            raise DegenerateGeometry(f"Octagon split {measured:.12g} disagrees with hexagon {solved:.12g}")

    def start(slot: int, offset: float = 0.0) -> float:
        return (starts[slot] + state.side_sign(slot) * offset) % state.curve_length_of_slot(slot)

    new_sides = list(sides)
    new_starts = list(starts)
    p, q = 6 * h1, 6 * h2
    new_sides[p:p + 6] = p_sides
    new_sides[q:q + 6] = q_sides
    new_starts[p:p + 6] = [0.0, start(c2, c_foot), 0.0, start(c3), 0.0, start(d2)]
    new_starts[q:q + 6] = [0.0, start(d2, d_foot), 0.0, start(d3), 0.0, start(c2)]
    geom = GeomData(tuple(new_sides), tuple(new_starts), state.geom.curve_lengths, state.geom.tolerance)
    return GeoState(new_map, geom)


def geo_add_curve_detailed(state: GeoState, curve: CompatibleCurve) -> Tuple[GeoState, CurveAddition, CurveDevelopment]:
    addition = add_curve_detailed(state.hex_map, curve)
    development = curve_development(state, curve)
    new_map, label = addition.hex_map, addition.label
    length = development.length
    sides = list(state.geom.sides)
    starts = list(state.geom.starts)
    n = len(curve.segments)
    alpha_slots = []
    for i, (h, entry, exit_) in enumerate(curve.segments):
        here, following = development.crossings[i], development.crossings[(i + 1) % n]
        if exit_ == shifted(entry, 2):
            sides[entry], sides[exit_] = here.left_length, following.left_length
            q, alpha_start = shifted(entry, 1), here.left_foot
        else:
            sides[entry], sides[exit_] = here.right_length, following.right_length
            q, alpha_start = shifted(entry, -1), following.right_foot
        old = state.geom.hexagon(h)
        new = hexagon_from_arcs(sides[6 * h], sides[6 * h + 2], sides[6 * h + 4])
        for p in CURVE_POSITIONS:
            s = 6 * h + p
            if s == q:
                starts[s] = alpha_start
                alpha_slots.append(s)
            elif shifted(s, -1) in (entry, exit_):
                starts[s] = _moved_start(state, s, old[p], new[p])
            sides[s] = new[p]

    origin = starts[new_map.circle_slots(2 * label)[0]]
    for s in alpha_slots:
        starts[s] = (starts[s] - origin) % length
    geom = GeomData(
        tuple(sides),
        tuple(starts),
        tuple(sorted(state.geom.curve_lengths + ((label, length),))),
        state.geom.tolerance,
    )
    logger.debug(f"Added curve {label} of length {length:.6f} across {n} hexagons")
    return GeoState(new_map, geom), addition, development


def geo_add_curve(state: GeoState, curve: CompatibleCurve) -> GeoState:
    return geo_add_curve_detailed(state, curve)[0]


class AlphaPlacement:
    """Hexagon pieces along a curve, placed on its axis (the imaginary axis, upwards).

    Left pieces are indexed in the curve's positive direction starting from its smallest
    side 0 slot; right pieces likewise along side 1. Any integer index is allowed, an index
    beyond the piece count meaning a lift one curve length further.
    """

    def __init__(self, state: GeoState, label: int):
        self.state = state
        self.label = label
        self.length = state.geom.curve_length(label)
        self.left, self.right = alpha_layout(state.hex_map, label)
        sides, starts = state.geom.sides, state.geom.starts
        self.left_starts = []
        cursor = starts[self.left[0]] % self.length
        for q in self.left:
            self.left_starts.append(cursor)
            cursor += sides[q]
        cursor = self.left_starts[0] + (starts[self.right[0]] - sides[self.right[0]] - self.left_starts[0]) % self.length
        self.right_bottoms = []
        for q in self.right:
            self.right_bottoms.append(cursor)
            cursor += sides[q]

    def left_piece(self, index: int) -> Tuple[int, float]:
        lift, r = divmod(index, len(self.left))
        return self.left[r], self.left_starts[r] + lift * self.length

    def right_piece(self, index: int) -> Tuple[int, float]:
        lift, r = divmod(index, len(self.right))
        return self.right[r], self.right_bottoms[r] + lift * self.length

    def place_left(self, index: int) -> Tuple[int, np.ndarray]:
        slot, start = self.left_piece(index)
        frame = self.state.frames(hex_of(slot))[position(slot)]
        return slot, translation(start) @ sl2_inverse(frame)

    def place_right(self, index: int) -> Tuple[int, np.ndarray]:
        slot, bottom = self.right_piece(index)
        frame = self.state.frames(hex_of(slot))[position(slot)]
        top = bottom + self.state.geom.sides[slot]
        return slot, translation(top) @ HALF_TURN @ sl2_inverse(frame)

    def crossing_pieces(self, reattachment: Reattachment) -> List[Tuple[int, int]]:
        """Left and right piece indices whose curve lines a rejoined arc runs between.

        Crossing ``i`` enters interval ``i``; its halves end on the next left and the next
        right piece at or after that interval.
        """
        word = reattachment.word
        n = len(word)
        ordinal, counts = [], {"L": 0, "R": 0}
        for kind in word:
            ordinal.append(counts[kind])
            counts[kind] += 1
        result = []
        for i in range(n):
            found = {}
            for j in range(i, i + n + 1):
                kind = word[j % n]
                if kind not in found:
                    lift = j // n
                    if kind == "L":
                        found[kind] = ordinal[j % n] + lift * len(self.left)
                    else:
                        found[kind] = reattachment.shift + ordinal[j % n] + lift * len(self.right)
                if len(found) == 2:
                    break
            result.append((found["L"], found["R"]))
        return result

    def twists(self, reattachment: Reattachment) -> List[float]:
        """Twist of every rejoined arc about the removed curve"""
        return [
            self.right_piece(right)[1] - self.left_piece(left)[1]
            for left, right in self.crossing_pieces(reattachment)
        ]

    def raw_weight(self, reattachment: Reattachment, tol: float = SNAP_TOL) -> int:
        return max(snap_floor(t / self.length, tol) for t in self.twists(reattachment))


def geo_remove_curve(state: GeoState, label: int, reattachment: Reattachment) -> Tuple[GeoState, CompatibleCurve]:
    """Predecessor geometry: every rejoined arc is the common perpendicular of its two curve lines"""
    hex_map = state.hex_map
    predecessor_map, curve = reattach(hex_map, label, reattachment)
    placement = AlphaPlacement(state, label)
    pieces = interval_pieces((placement.left, placement.right), reattachment)
    entries, exits = crossing_slots(pieces)
    n = len(pieces)

    lengths, left_feet, right_feet = [], [], []
    for left_index, right_index in placement.crossing_pieces(reattachment):
        q_left, place_left = placement.place_left(left_index)
        q_right, place_right = placement.place_right(right_index)
        left_slot, right_slot = shifted(q_left, -2), shifted(q_right, 2)
        left_line = place_left @ state.frames(hex_of(q_left))[position(left_slot)]
        right_line = place_right @ state.frames(hex_of(q_right))[position(right_slot)]
        length, left_foot = perpendicular(left_line, right_line)
        _, right_foot = perpendicular(right_line, left_line)
        lengths.append(length)
        left_feet.append((left_slot, left_foot))
        right_feet.append((right_slot, right_foot))

    sides = list(state.geom.sides)
    starts = list(state.geom.starts)
    for i in range(n):
        sides[entries[i]] = lengths[i]
        sides[exits[i]] = lengths[(i + 1) % n]
    for i, (kind, q) in enumerate(pieces):
        h = hex_of(q)
        old = state.geom.hexagon(h)
        new = hexagon_from_arcs(sides[6 * h], sides[6 * h + 2], sides[6 * h + 4])
        for p in CURVE_POSITIONS:
            s = 6 * h + p
            if s == q:
                reference, foot = right_feet[i] if kind == "L" else left_feet[(i + 1) % n]
                if predecessor_map.circle[s] != hex_map.circle[reference]:
                    raise DegenerateGeometry(f"Rejoined side {s} does not lie on the curve of slot {reference}")
                starts[s] = (state.geom.starts[reference] + state.side_sign(reference) * foot) % state.curve_length_of_slot(reference)
            elif shifted(s, -1) in (entries[i], exits[i]):
                starts[s] = _moved_start(state, s, old[p], new[p])
            sides[s] = new[p]

    curve_lengths = tuple((c, v) for c, v in state.geom.curve_lengths if c != label)
    geom = GeomData(tuple(sides), tuple(starts), curve_lengths, state.geom.tolerance)
    return GeoState(predecessor_map, geom), curve
