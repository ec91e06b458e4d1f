"""Property suites run by ``hexweb verify``.

Every suite takes a ``SuiteParams`` and returns a ``SuiteReport``; sample counts are the
suite defaults multiplied by ``scale``.
"""
import logging
import random
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional

from pydantic import BaseModel, Field

from config import COMPARE_TOL, DRIFT_TOL, MEMORY_CAP, REMOVAL_CAP, RESIDUAL_TOL

from .errors import BudgetError, GeometryError, InvalidConfig, MoveError, ValidationError
from .explorer import TOPO, WEIGHTED, bfs_ball, distance, distances_to, random_walk, stats
from .hyp_geom import (
    GeoState,
    build_base,
    circle_holonomy_length,
    curve_development,
    geo_flip,
    random_config,
    state_residual,
)
from .moves_topo import (
    ADD_CURVE,
    REMOVE_CURVE,
    add_curve_with_record,
    candidate_moves,
    enumerate_compatible_curves,
    flip,
    flippable_arcs,
    reattach,
)
from .oracles import brute_force_compatible_curves, unrolled_crossings
from .pants_bridge import (
    base_pants,
    complete_to_pants,
    completion_bound,
    emulate_pants_move,
    estimate_D,
    estimate_c2,
    pants_elementary_moves,
    pants_key,
    pants_types,
    phi,
    psi,
    random_pants,
    track_intersections,
)
from .surface_core import HexMap, SurfaceSig, canonical_form, key_digest, normal_vector, validate
from .weighted_graph import (
    apply_weighted_move,
    arc_weights,
    base_weighted_state,
    stabilizer_probe,
    twist_action,
    unweighted_key,
    valency_bound,
    weighted_ball,
    weighted_key,
    weighted_neighbor_states,
    weighted_removals,
)

logger = logging.getLogger(__name__)

GENUS_TWO = SurfaceSig(2, 0)
ONE_HOLED_TORUS = SurfaceSig(1, 1)
FOUR_HOLED_SPHERE = SurfaceSig(0, 4)


@dataclass
class SuiteParams:
    seed: int = 0
    scale: float = 1.0
    removal_cap: int = REMOVAL_CAP
    memory_cap: int = MEMORY_CAP
    threads: int = 1
    radius: Optional[int] = None

    def size(self, default: int) -> int:
        return max(1, int(round(default * self.scale)))

    def ball_radius(self, default: int) -> int:
        return default if self.radius is None else self.radius


class SuiteReport(BaseModel):
    suite: str
    passed: bool = True
    checked: int = 0
    failures: List[str] = Field(default_factory=list)
    measurements: Dict[str, Optional[float]] = Field(default_factory=dict)
    samples: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)

    def check(self, condition: bool, message: str) -> bool:
        self.checked += 1
        if not condition:
            self.passed = False
            if len(self.failures) < 50:
                self.failures.append(message)
            logger.warning(f"[{self.suite}] {message}")
        return condition

    def fail(self, message: str) -> None:
        self.check(False, message)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.suite}: {status} ({self.checked} checks, {len(self.failures)} failures)"


# Sampling helpers

def random_map(sig: SurfaceSig, rng: random.Random, steps: int, removal_cap: int = REMOVAL_CAP) -> HexMap:
    current = phi(base_pants(sig))
    for _ in range(steps):
        current = rng.choice(candidate_moves(current, removal_cap))[1]
    return current


def reduced_states(rng: random.Random, sig: SurfaceSig = GENUS_TWO) -> Iterator[GeoState]:
    """Geometric states with one curve removed from a random base, so curves can be added"""
    while True:
        base = base_weighted_state(random_config(sig, rng))
        labels = list(base.hex_map.interior_curves())
        rng.shuffle(labels)
        for label in labels:
            removals = weighted_removals(base, label)
            if removals:
                yield rng.choice(removals)[1].geo
                break


def _wander(state: GeoState, rng: random.Random, flips: int) -> GeoState:
    for _ in range(flips):
        arcs = flippable_arcs(state.hex_map)
        if not arcs:
            break
        try:
            state = geo_flip(state, rng.choice(arcs))
        except GeometryError as e:
            logger.debug(f"Skipping degenerate flip: {e.message}")
    return state


# Suites

def structural_soak(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="structural-soak")
    steps = params.size(10_000)
    root = phi(base_pants(GENUS_TWO))
    try:
        result = random_walk(root, steps, params.seed, TOPO, params.removal_cap)
    except ValidationError as e:
        report.fail(f"Invalid state during walk: {e.message}")
        return report
    report.check(len(result.log) == steps, f"Walk stopped after {len(result.log)} of {steps} steps")
    report.check(len(result.final.arc_labels()) == GENUS_TWO.arc_count, "Arc count changed")
    report.checked += len(result.log)
    report.measurements["steps"] = len(result.log)
    return report


def flip_involution(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="flip-involution")
    rng = random.Random(params.seed)
    current = phi(base_pants(GENUS_TWO))
    for i in range(params.size(1_000)):
        arcs = flippable_arcs(current)
        if not arcs:
            current = phi(base_pants(GENUS_TWO))
            continue
        arc = rng.choice(arcs)
        replacement = current.next_arc_label()
        once = flip(current, arc)
        validate(once)
        back = flip(once, replacement)
        report.check(canonical_form(back) == canonical_form(current), f"Flip of arc {arc} at step {i} is not undone")
        current = once if i % 20 else rng.choice(candidate_moves(once, params.removal_cap))[1]
    return report


def curve_enumeration(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="curve-enumeration")
    for sig, radius in ((ONE_HOLED_TORUS, 3), (FOUR_HOLED_SPHERE, 2), (GENUS_TWO, 1)):
        ball = bfs_ball(phi(base_pants(sig)), params.ball_radius(radius), TOPO, params.removal_cap, params.memory_cap)
        for key in ball.vertices():
            hex_map = ball.states[key]
            fast = enumerate_compatible_curves(hex_map)
            slow = brute_force_compatible_curves(hex_map)
            name = key_digest(key)
            report.check(fast == slow, f"{sig} {name}: {len(fast)} curves, oracle finds {len(slow)}")
            report.check(len(fast) <= 2 ** len(hex_map.arc_labels()), f"{sig} {name}: more than 2^|A| curves")
            if hex_map.is_pants_maximal():
                report.check(not fast, f"{sig} {name}: curves on a pants decomposition")
            vectors = {normal_vector(hex_map, c).counts for c in fast}
            report.check(len(vectors) == len(fast), f"{sig} {name}: normal vectors not injective")
    return report


def curve_addition(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="curve-addition")
    rng = random.Random(params.seed)
    ball = bfs_ball(phi(base_pants(GENUS_TWO)), params.ball_radius(2), TOPO, params.removal_cap, params.memory_cap)
    pool = [(m, c) for m in ball.states.values() for c in enumerate_compatible_curves(m)]
    if not report.check(bool(pool), "No compatible curve in the explored ball"):
        return report
    for i in range(params.size(100)):
        hex_map, curve = rng.choice(pool)
        label = hex_map.next_curve_label()
        result, record = add_curve_with_record(hex_map, curve)
        try:
            validate(result)
        except ValidationError as e:
            report.fail(f"Addition {i} gives an invalid map: {e.message}")
            continue
        report.check(len(result.arc_labels()) == len(hex_map.arc_labels()), f"Addition {i} changed the arc count")
        back, _ = reattach(result, label, record)
        report.check(canonical_form(back) == canonical_form(hex_map), f"Recorded removal {i} does not invert")
    return report


def psi_phi(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="psi-phi")
    rng = random.Random(params.seed)
    for i in range(params.size(100)):
        decomp = random_pants(GENUS_TWO, rng)
        report.check(pants_key(psi(phi(decomp))) == pants_key(decomp), f"psi(phi(P)) != P for sample {i}")
    bound = completion_bound(GENUS_TWO)
    longest = 0
    for i in range(params.size(20)):
        hex_map = random_map(GENUS_TWO, rng, rng.randrange(1, 6), params.removal_cap)
        _, path = complete_to_pants(hex_map, params.memory_cap)
        longest = max(longest, len(path))
        report.check(len(path) <= bound, f"Completion {i} takes {len(path)} moves, bound {bound}")
    samples = estimate_c2(GENUS_TWO, params.size(10), rng, removal_cap=params.removal_cap)
    for s in samples:
        if s.move == ADD_CURVE:
            report.check(s.value == 0, f"C2 sample {s.sample_id}: addition changes the psi-image by {s.value}")
    mismatched = sum(1 for s in samples if s.move == REMOVE_CURVE and s.value != 0)
    report.samples["c2"] = [vars(s) for s in samples]
    report.measurements.update(D=estimate_D(GENUS_TWO), completion_bound=bound, longest_completion=longest)
    report.measurements["c2"] = max((s.value for s in samples if s.value is not None), default=None)
    report.measurements["removal_mismatches"] = mismatched
    return report


def pants_emulation(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="pants-emulation")
    rows = []
    worst = 0
    for sig in (FOUR_HOLED_SPHERE, ONE_HOLED_TORUS, GENUS_TWO):
        for decomp in pants_types(sig):
            for target in pants_elementary_moves(decomp):
                emulation = emulate_pants_move(decomp, target, params.ball_radius(4), params.removal_cap)
                length = emulation.length
                rows.append(
                    {
                        "sample_id": len(rows),
                        "key_a": key_digest(emulation.source_key),
                        "key_b": key_digest(emulation.target_key),
                        "value": length,
                    }
                )
                if not report.check(length is not None, f"{sig}: no emulating path within radius 4"):
                    continue
                worst = max(worst, length)
                if length > 2:
                    logger.info(f"{sig}: elementary move needs {length} hexagon moves")
    report.samples["c1"] = rows
    report.measurements["c1"] = worst
    return report


def weight_spread(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="lemma-weight-spread")
    rng = random.Random(params.seed)
    wanted = params.size(1_000)
    spreads = []
    states = reduced_states(rng)
    while len(spreads) < wanted:
        state = next(states)
        for _ in range(10):
            curves = enumerate_compatible_curves(state.hex_map)
            if not curves or len(spreads) >= wanted:
                break
            curve = rng.choice(curves)
            if rng.random() < 0.5:
                curve = curve.reversed()
            try:
                weights = arc_weights(curve_development(state, curve))
            except GeometryError as e:
                logger.debug(f"Skipping degenerate development: {e.message}")
                continue
            spread = max(weights) - min(weights)
            spreads.append(spread)
            report.check(spread in (0, 1), f"Arc weights {weights} spread over {spread + 1} integers")
            state = _wander(state, rng, 1)
    report.samples["weight_spread"] = [{"sample_id": i, "value": s} for i, s in enumerate(spreads)]
    report.measurements["largest_spread"] = max(spreads)
    report.measurements["additions"] = len(spreads)
    return report


def fn_consistency(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="fn-consistency")
    rng = random.Random(params.seed)
    for i in range(params.size(20)):
        config = random_config(GENUS_TWO, rng)
        state = build_base(config)
        residual = state_residual(state)
        report.check(residual < RESIDUAL_TOL, f"Config {i}: hexagon residual {residual:.3g}")
        for circle_id in sorted({state.hex_map.circle[s] for s in state.hex_map.curve_slots()}):
            expected = config.length(circle_id // 2)
            measured = circle_holonomy_length(state, circle_id)
            error = abs(measured - expected) / expected
            report.check(error < COMPARE_TOL, f"Config {i}: circle {circle_id} length error {error:.3g}")
    worst = 0.0
    compared = 0
    states = reduced_states(rng)
    while compared < params.size(100):
        state = _wander(next(states), rng, rng.randrange(3))
        curves = enumerate_compatible_curves(state.hex_map)
        if not curves:
            continue
        curve = rng.choice(curves)
        fast = curve_development(state, curve).crossings
        slow = unrolled_crossings(state, curve)
        for crossing, (left, right, twist) in zip(fast, slow):
            gap = max(abs(crossing.left_length - left), abs(crossing.right_length - right), abs(crossing.twist - twist))
            worst = max(worst, gap)
            report.check(gap < DRIFT_TOL, f"Crossing of arc {crossing.arc} differs from the unrolled value by {gap:.3g}")
        compared += 1
    report.measurements["unrolling_gap"] = worst
    return report


def valency(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="valency")
    rng = random.Random(params.seed)
    rows = []
    for i in range(params.size(100)):
        root = base_weighted_state(random_config(GENUS_TWO, rng))
        state = random_walk(root, rng.randrange(4), rng.randrange(2**31), WEIGHTED).final
        moves = weighted_neighbor_states(state)
        bound = valency_bound(state.hex_map)
        rows.append({"sample_id": i, "key_a": key_digest(weighted_key(state)), "key_b": "", "value": len(moves)})
        report.check(len(moves) <= bound, f"State {i}: degree {len(moves)} above {bound}")
        original = canonical_form(state.hex_map, state.decoration())
        for edge, target in moves:
            if edge.kind != REMOVE_CURVE:
                continue
            _, inverse = apply_weighted_move(state, edge)
            back, _ = apply_weighted_move(target, inverse)
            report.check(
                canonical_form(back.hex_map, back.decoration()) == original,
                f"State {i}: removal of curve {edge.curve_label} does not round-trip",
            )
    report.samples["valency"] = rows
    report.measurements["largest_degree"] = max(r["value"] for r in rows)
    return report


def connectivity(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="connectivity")
    torus = bfs_ball(phi(base_pants(ONE_HOLED_TORUS)), 50, TOPO, params.removal_cap, params.memory_cap, params.threads)
    torus_stats = stats(torus)
    report.check(torus.complete, "One-holed torus enumeration did not close up")
    report.check(torus_stats.connected, "One-holed torus quotient graph is disconnected")
    report.measurements["torus_vertices"] = torus_stats.vertex_count

    ball = bfs_ball(
        phi(base_pants(GENUS_TWO)), params.ball_radius(3), TOPO, params.removal_cap, params.memory_cap, params.threads
    )
    d = estimate_D(GENUS_TWO)
    reach = completion_bound(GENUS_TWO)
    targets = [pants_key(p) for p in pants_types(GENUS_TWO)]
    nearest = distances_to(ball, targets)
    for key, value in nearest.items():
        report.check(value is not None and value <= reach + d, f"{key_digest(key)} is {value} moves from phi-images")
    report.measurements["ball_vertices"] = len(ball)
    report.measurements["k_density"] = max((v for v in nearest.values() if v is not None), default=None)

    rng = random.Random(params.seed)
    keys = ball.vertices()
    farthest = 0
    for key in rng.sample(keys, min(len(keys), params.size(5))):
        hex_map = ball.states[key]
        try:
            gap = distance(hex_map, phi(psi(hex_map)), TOPO, reach + d, params.removal_cap, params.memory_cap)
        except BudgetError as e:
            report.fail(f"{key_digest(key)}: {e.message}")
            continue
        farthest = max(farthest, gap)
    report.measurements["quasi_inverse"] = farthest
    return report


def twist_quasi_action(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="twist-action")
    rng = random.Random(params.seed)
    state = base_weighted_state(random_config(GENUS_TWO, rng))
    key = weighted_key(state)
    for curve in state.hex_map.interior_curves():
        for direction in (1, -1):
            moved = twist_action(state, curve, direction)
            others = all(moved.weight(c) == state.weight(c) for c in state.hex_map.interior_curves() if c != curve)
            report.check(moved.weight(curve) == state.weight(curve) + direction, f"Twist along {curve} misses the weight")
            report.check(others and moved.geo is state.geo, f"Twist along {curve} changes other data")
            report.check(weighted_key(twist_action(moved, curve, -direction)) == key, f"Twist along {curve} not undone")
    radius = params.ball_radius(3)
    probe = stabilizer_probe(state, params.size(5), radius, params.memory_cap)
    report.check(probe.passed, f"Twist powers {probe.fixed_powers} fix the state")
    weighted = weighted_ball(state, radius, params.memory_cap)
    forgotten = {unweighted_key(s) for s in weighted.values()}
    topo = bfs_ball(state.hex_map, radius, TOPO, params.removal_cap, params.memory_cap, params.threads)
    report.check(forgotten == set(topo.states), f"Weighted quotient has {len(forgotten)} vertices, unweighted {len(topo)}")
    report.measurements.update(weighted_vertices=len(weighted), quotient_vertices=len(forgotten), topo_vertices=len(topo))
    return report


def intersection_tracking(params: SuiteParams) -> SuiteReport:
    report = SuiteReport(suite="intersection-tracking")
    rng = random.Random(params.seed)
    states = reduced_states(rng)
    rows = []
    skipped = 0
    largest = 0
    arc_growth = 0
    above_arcs = 0
    for run in range(params.size(50)):
        start = _wander(next(states), rng, rng.randrange(0, 4))
        try:
            trace = track_intersections(start, params.memory_cap)
        except GeometryError as e:
            logger.debug(f"Run {run} skipped: {e.message}")
            skipped += 1
            continue
        first = True
        for step in trace:
            rows.append({"sample_id": run, **vars(step)})
            where = f"Run {run} step {step.step}"
            largest = max(largest, step.arcs_after + step.curves_total)
            report.check(step.changed == 0, f"{where}: {step.changed} kept arcs or curves changed crossings")
            report.check(step.misrouted == 0, f"{where}: {step.misrouted} starting arcs end on the wrong curve")
            if step.curve_crossings is None:
                continue
            report.check(
                step.curve_crossings <= step.crossing_bound(),
                f"{where}: added curve crosses {step.curve_crossings} times, bound {step.crossing_bound()}",
            )
            if first and step.flips_before == 0:
                report.check(
                    step.curve_crossings == step.shared,
                    f"{where}: curve added without flips crosses {step.curve_crossings} starting arcs, not {step.shared}",
                )
            first = False
            arc_growth += step.arcs_after > step.arcs_total
            above_arcs += step.curve_crossings > step.arcs_total + step.shared
    report.samples["ik"] = rows
    report.measurements.update(
        runs=params.size(50) - skipped,
        skipped=skipped,
        largest_total=largest,
        additions_growing_arcs=arc_growth,
        curves_above_arc_total=above_arcs,
    )
    return report


SUITES: Dict[str, Callable[[SuiteParams], SuiteReport]] = {
    "structural-soak": structural_soak,
    "flip-involution": flip_involution,
    "curve-enumeration": curve_enumeration,
    "curve-addition": curve_addition,
    "psi-phi": psi_phi,
    "pants-emulation": pants_emulation,
    "lemma-weight-spread": weight_spread,
    "fn-consistency": fn_consistency,
    "valency": valency,
    "connectivity": connectivity,
    "twist-action": twist_quasi_action,
    "intersection-tracking": intersection_tracking,
}


def run_suite(name: str, params: Optional[SuiteParams] = None) -> SuiteReport:
    params = params or SuiteParams()
    if name not in SUITES:
        raise InvalidConfig(f"Unknown suite {name}; choose from {', '.join(SUITES)}")
    logger.info(f"Running suite {name} (seed {params.seed}, scale {params.scale})")
    try:
        report = SUITES[name](params)
    except (MoveError, GeometryError, ValidationError) as e:
        logger.error(f"Suite {name} aborted: {e.message}")
        report = SuiteReport(suite=name)
        report.fail(f"Aborted with {e.code}: {e.message}")
    logger.info(report.summary())
    return report


def run_all(params: Optional[SuiteParams] = None) -> List[SuiteReport]:
    return [run_suite(name, params) for name in SUITES]
