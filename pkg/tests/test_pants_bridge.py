import inspect
import random

import pytest

from config import MEMORY_CAP
from hexweb.errors import ComplexityLimitExceeded, InvalidPants, NotAdjacent
from hexweb.hyp_geom import build_base, geo_flip
from hexweb.moves_topo import (
    ADD_CURVE,
    FLIP,
    REMOVE_CURVE,
    add_curve,
    enumerate_compatible_curves,
    enumerate_removals,
    flippable_arcs,
)
from hexweb.pants_bridge import (
    PantsDecomp,
    adjacent_pants,
    base_pants,
    complete_to_pants,
    emulate_pants_move,
    estimate_c2,
    estimate_modular_diameter,
    multicurve_pieces,
    pants_distance,
    pants_elementary_moves,
    pants_from_map,
    pants_types,
    peripheral_only_map,
    phi,
    psi,
    track_intersections,
    validate_pants,
)
from hexweb.surface_core import SurfaceSig, curve_traces, validate
from hexweb.weighted_graph import stabilizer_probe, weighted_ball

GENUS_TWO = SurfaceSig(2, 0)
ONE_HOLED_TORUS = SurfaceSig(1, 1)


@pytest.mark.parametrize(
    "sig,pants,peripheral",
    [
        (SurfaceSig(2, 0), ((0, 0, 1), (1, 2, 2)), frozenset()),
        (SurfaceSig(1, 1), ((0, 1, 1),), frozenset({0})),
        (SurfaceSig(0, 4), ((0, 1, 4), (2, 3, 4)), frozenset({0, 1, 2, 3})),
        (SurfaceSig(0, 3), ((0, 1, 2),), frozenset({0, 1, 2})),
    ],
)
def test_base_pants(sig, pants, peripheral):
    decomp = base_pants(sig)
    assert decomp.pants == pants
    assert decomp.peripheral == peripheral
    assert validate_pants(decomp)


def test_invalid_pants():
    with pytest.raises(InvalidPants):
        validate_pants(PantsDecomp.of(GENUS_TWO, [[0, 0, 1], [1, 2, 3]]))
    with pytest.raises(InvalidPants):
        validate_pants(PantsDecomp.of(GENUS_TWO, [[0, 0, 1]]))


@pytest.mark.parametrize("sig", [SurfaceSig(2, 0), SurfaceSig(1, 1), SurfaceSig(0, 4), SurfaceSig(1, 2)])
def test_phi_then_read_back(sig):
    decomp = base_pants(sig)
    hex_map = phi(decomp)
    assert validate(hex_map)
    assert hex_map.is_pants_maximal()
    assert pants_from_map(hex_map) == decomp
    assert psi(hex_map) == decomp


def test_pants_from_map_needs_maximal_map(sphere_reduced_map):
    with pytest.raises(InvalidPants):
        pants_from_map(sphere_reduced_map)


def test_psi_completes_reduced_map(sphere_reduced_map):
    decomp = psi(sphere_reduced_map)
    assert validate_pants(decomp)
    assert decomp.peripheral == sphere_reduced_map.peripheral
    assert set(sphere_reduced_map.curve_labels()) <= set(decomp.curves())


def test_psi_completes_added_curve_first(sphere_reduced_map):
    for curve in enumerate_compatible_curves(sphere_reduced_map):
        assert psi(sphere_reduced_map, first=curve) == psi(add_curve(sphere_reduced_map, curve))


def test_psi_images_agree_across_additions(genus_two_map):
    reduced = enumerate_removals(genus_two_map, 1).candidates[0][0]
    for curve in enumerate_compatible_curves(reduced):
        assert pants_distance(psi(reduced, first=curve), psi(add_curve(reduced, curve))) == 0


def test_c2_samples_record_their_move():
    samples = estimate_c2(GENUS_TWO, 6, random.Random(2))
    assert len(samples) == 6
    for sample in samples:
        assert sample.move in (FLIP, ADD_CURVE, REMOVE_CURVE)
        assert sample.value is not None and sample.value >= 0
        if sample.move == ADD_CURVE:
            assert sample.value == 0


def test_torus_elementary_move():
    moves = pants_elementary_moves(base_pants(ONE_HOLED_TORUS))
    assert moves == [PantsDecomp.of(ONE_HOLED_TORUS, [[0, 2, 2]], [0])]


def test_genus_two_pants_types():
    types = pants_types(GENUS_TWO)
    assert len(types) == 2
    base = base_pants(GENUS_TWO)
    theta = next(m for m in pants_elementary_moves(base) if m.pants == ((0, 2, 3), (0, 2, 3)))
    assert adjacent_pants(base, theta)
    assert pants_distance(base, theta) == 1
    assert pants_distance(base, base) == 0


def test_adjacency_needs_one_changed_curve():
    base = base_pants(GENUS_TWO)
    assert not adjacent_pants(base, base)
    with pytest.raises(NotAdjacent):
        emulate_pants_move(base, base)


def test_emulation_reaches_target():
    base = base_pants(ONE_HOLED_TORUS)
    target = pants_elementary_moves(base)[0]
    emulation = emulate_pants_move(base, target, radius=4)
    assert emulation.found
    assert emulation.length == len(emulation.path)
    assert emulation.states[0] == phi(base)


def test_no_intersections_for_pants_maps(default_fn):
    assert track_intersections(build_base(default_fn)) == []


def test_curve_added_without_flips_crosses_each_starting_arc_once(reduced_weighted_state):
    trace = track_intersections(reduced_weighted_state.geo)
    assert len(trace) == 1
    step = trace[0]
    assert step.kind == ADD_CURVE
    assert step.flips_before == 0
    assert step.arcs_total == 0 and step.curves_total == 0 and step.unshared == 0
    assert step.changed == 0 and step.misrouted == 0
    assert step.curve_crossings == step.shared > 0
    assert step.curve_crossings <= step.crossing_bound()


def test_flips_move_crossings_only_through_flipped_arcs(reduced_weighted_state):
    state = geo_flip(reduced_weighted_state.geo, flippable_arcs(reduced_weighted_state.hex_map)[0])
    trace = track_intersections(state)
    assert trace[-1].kind == ADD_CURVE
    for step in trace:
        assert step.changed == 0
        assert step.misrouted == 0
        if step.kind == ADD_CURVE:
            assert step.curve_crossings <= step.crossing_bound()


def test_peripheral_only_torus():
    hex_map = peripheral_only_map(ONE_HOLED_TORUS)
    assert validate(hex_map)
    assert hex_map.interior_curves() == []
    traces = curve_traces(hex_map)
    assert len(traces) == 1
    assert len(traces[0].slots) == 6


def test_modular_diameter_complexity_limit():
    with pytest.raises(ComplexityLimitExceeded):
        estimate_modular_diameter(GENUS_TWO, 3)
    assert estimate_modular_diameter(ONE_HOLED_TORUS) >= 0


def test_multicurve_pieces():
    base = base_pants(GENUS_TWO)
    assert multicurve_pieces(base, frozenset({1})) == [SurfaceSig(1, 1), SurfaceSig(1, 1)]
    assert multicurve_pieces(base, frozenset({0, 1, 2})) == [SurfaceSig(0, 3), SurfaceSig(0, 3)]


@pytest.mark.parametrize(
    "function",
    [complete_to_pants, psi, track_intersections, pants_distance, pants_types, peripheral_only_map, weighted_ball, stabilizer_probe],
)
def test_memory_cap_defaults_follow_config(function):
    assert inspect.signature(function).parameters["memory_cap"].default == MEMORY_CAP
