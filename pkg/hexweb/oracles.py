"""Slow independent computations used to check the fast ones.

- compatible curves by brute force over arc subsets;
- isomorphism of maps by propagating a slot bijection from every start;
- crossing geometry re-derived in the hyperboloid model with SO(2,1) matrices.
"""
import itertools
import logging
import math
from collections import deque
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from .hyp_geom import GeoState
from .moves_topo import classify_curve
from .surface_core import CompatibleCurve, HexMap, hex_of, position, shifted

logger = logging.getLogger(__name__)


# Compatible curves

def _cycle_through(hex_map: HexMap, crossed: Set[int]) -> Optional[CompatibleCurve]:
    by_hexagon: Dict[int, List[int]] = {}
    for s in crossed:
        by_hexagon.setdefault(hex_of(s), []).append(s)
    if any(len(slots) != 2 for slots in by_hexagon.values()):
        return None
    start = min(crossed)
    entry = start
    segments = []
    while True:
        h = hex_of(entry)
        exit_ = next(s for s in by_hexagon[h] if s != entry)
        segments.append((h, entry, exit_))
        entry = hex_map.glue[exit_]
        if entry == start:
            break
        if len(segments) > len(by_hexagon):
            return None
    if 2 * len(segments) != len(crossed):
        return None
    return CompatibleCurve(tuple(segments)).canonical()


def brute_force_compatible_curves(hex_map: HexMap) -> List[CompatibleCurve]:
    """Every arc subset whose crossings close up into one essential non-peripheral curve"""
    labels = hex_map.arc_labels()
    found = set()
    for size in range(1, len(labels) + 1):
        for subset in itertools.combinations(labels, size):
            crossed = {s for a in subset for s in hex_map.slots_of_arc(a)}
            curve = _cycle_through(hex_map, crossed)
            if curve is not None and classify_curve(hex_map, curve) == "ok":
                found.add(curve)
    return sorted(found, key=lambda c: c.segments)


# Isomorphism

def _propagate(first: HexMap, second: HexMap, image: int, turn: int) -> Optional[List[int]]:
    slot_map = [-1] * first.slot_count
    placed = {}
    queue = deque([(0, image, turn)])
    while queue:
        h, h2, r = queue.popleft()
        if h in placed:
            if placed[h] != (h2, r):
                return None
            continue
        placed[h] = (h2, r)
        for j in range(6):
            slot_map[6 * h + j] = 6 * h2 + (j + r) % 6
        for j in (0, 2, 4):
            s = 6 * h + j
            t = first.glue[s]
            t2 = second.glue[slot_map[s]]
            queue.append((hex_of(t), hex_of(t2), (position(t2) - position(t)) % 6))
    if len(placed) != first.hexagon_count or len({h2 for h2, _ in placed.values()}) != len(placed):
        return None
    return slot_map


def isomorphic(first: HexMap, second: HexMap) -> bool:
    """Orientation-preserving isomorphism of decorated maps, found by exhaustive search"""
    if first.signature != second.signature or first.slot_count != second.slot_count:
        return False
    for image in range(second.hexagon_count):
        for turn in (0, 2, 4):
            slot_map = _propagate(first, second, image, turn)
            if slot_map is None:
                continue
            if all(second.glue[slot_map[s]] == slot_map[first.glue[s]] for s in first.arc_slots()) and _circles_agree(
                first, second, slot_map
            ):
                return True
    return False


def _circles_agree(first: HexMap, second: HexMap, slot_map: List[int]) -> bool:
    renaming: Dict[int, int] = {}
    for s in first.curve_slots():
        if renaming.setdefault(first.circle[s], second.circle[slot_map[s]]) != second.circle[slot_map[s]]:
            return False
    if len(set(renaming.values())) != len(renaming):
        return False
    for a, b in renaming.items():
        if (a // 2 in first.peripheral) != (b // 2 in second.peripheral):
            return False
        if a ^ 1 in renaming and renaming[a ^ 1] != b ^ 1:
            return False
    return True


# Hyperboloid model

MINKOWSKI = np.diag([1.0, 1.0, -1.0])
LINE_NORMAL = np.array([0.0, 1.0, 0.0])


def boost(t: float) -> np.ndarray:
    """Translation by ``t`` along the base line"""
    c, s = math.cosh(t), math.sinh(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def turn(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def lorentz_inverse(m: np.ndarray) -> np.ndarray:
    return MINKOWSKI @ m.T @ MINKOWSKI


def form(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ MINKOWSKI @ v)


def hyperboloid_frames(sides: Tuple[float, ...]) -> List[np.ndarray]:
    frames = [np.eye(3)]
    for j in range(5):
        frames.append(frames[-1] @ boost(sides[j]) @ turn(math.pi / 2))
    return frames


def _future(v: np.ndarray) -> np.ndarray:
    return v if v[2] > 0 else -v


def unrolled_crossings(state: GeoState, curve: CompatibleCurve) -> List[Tuple[float, float, float]]:
    """Half lengths and twist of every crossed arc, measured on the hyperboloid.

    The hexagon chain along the curve is developed with SO(2,1) matrices; the axis is
    spanned by the light-like eigenvectors of the holonomy and every foot is located by
    its coordinates in that light-like basis.
    """
    hex_map = state.hex_map
    frames = {h: hyperboloid_frames(state.geom.hexagon(h)) for h, _, _ in curve.segments}
    placements = [np.eye(3)]
    n = len(curve.segments)
    for i, (h, _, exit_) in enumerate(curve.segments):
        entry = curve.segments[(i + 1) % n][1]
        near = frames[h][position(exit_)]
        far = frames[hex_of(entry)][position(entry)]
        placements.append(placements[-1] @ near @ boost(state.geom.sides[exit_]) @ turn(math.pi) @ lorentz_inverse(far))
    values, vectors = np.linalg.eig(placements[-1])
    order = np.argsort(np.abs(values.real))
    repelling = _future(vectors[:, order[0]].real)
    attracting = _future(vectors[:, order[-1]].real)
    normal = MINKOWSKI @ np.cross(attracting, repelling)
    normal = normal / math.sqrt(form(normal, normal))
    pairing = form(attracting, repelling)

    def foot(line_normal: np.ndarray) -> Tuple[float, float]:
        c = form(normal, line_normal)
        point = _future((line_normal - c * normal) / math.sqrt(c * c - 1))
        a = form(point, repelling) / pairing
        b = form(point, attracting) / pairing
        return math.acosh(abs(c)), 0.5 * math.log(a / b)

    result = []
    for i, (h, entry, _) in enumerate(curve.segments):
        left = placements[i] @ frames[h][position(shifted(entry, -1))] @ LINE_NORMAL
        right = placements[i] @ frames[h][position(shifted(entry, 1))] @ LINE_NORMAL
        left_length, left_foot = foot(left)
        right_length, right_foot = foot(right)
        result.append((left_length, right_length, right_foot - left_foot))
    logger.debug(f"Unrolled {len(result)} crossings on the hyperboloid")
    return result
