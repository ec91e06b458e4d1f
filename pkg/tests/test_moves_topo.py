import itertools
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexweb.errors import MoveError, NotRemovable, PeripheralCurve, SelfAdjacentArc, UnknownArc, UnknownCurve
from hexweb.moves_topo import (
    ADD_CURVE,
    FLIP,
    REMOVE_CURVE,
    WEIGHT_SHIFT,
    MoveEdge,
    add_curve,
    apply_move,
    candidate_moves,
    check_removable,
    classify_curve,
    enumerate_compatible_curves,
    enumerate_removals,
    flip,
    flippable_arcs,
    neighbor_states,
    reattachment_words,
)
from hexweb.oracles import brute_force_compatible_curves
from hexweb.pants_bridge import base_pants, peripheral_only_map, phi
from hexweb.surface_core import SurfaceSig, canonical_form, normal_vector, shifted, validate

GENUS_TWO_MAP = phi(base_pants(SurfaceSig(2, 0)))
REDUCED_MAPS = {
    "genus-two": enumerate_removals(GENUS_TWO_MAP, 1).candidates[0][0],
    "one-holed-torus": peripheral_only_map(SurfaceSig(1, 1)),
    "four-holed-sphere": peripheral_only_map(SurfaceSig(0, 4)),
}
CURVE_PAIRS = [
    (target, first, second)
    for hex_map in REDUCED_MAPS.values()
    for target in [hex_map] + [flip(hex_map, a) for a in flippable_arcs(hex_map)]
    for first, second in itertools.combinations(enumerate_compatible_curves(target), 2)
]


def test_every_seam_is_flippable(genus_two_map):
    assert flippable_arcs(genus_two_map) == genus_two_map.arc_labels()


@settings(max_examples=12, deadline=None)
@given(arc=st.sampled_from(GENUS_TWO_MAP.arc_labels()))
def test_flip_is_an_involution(arc):
    flipped, inverse = apply_move(GENUS_TWO_MAP, MoveEdge(kind=FLIP, arc=arc))
    assert validate(flipped)
    assert arc not in flipped.arc_labels()
    assert inverse.arc in flipped.arc_labels()
    back = flip(flipped, inverse.arc)
    assert validate(back)
    assert canonical_form(back) == canonical_form(GENUS_TWO_MAP)


def test_flip_keeps_multicurve(genus_two_map):
    flipped = flip(genus_two_map, 0)
    assert flipped.curve_labels() == genus_two_map.curve_labels()
    assert flipped.peripheral == genus_two_map.peripheral


def test_flip_unknown_arc(genus_two_map):
    with pytest.raises(UnknownArc):
        flip(genus_two_map, 99)


def test_pants_decompositions_admit_no_curve(genus_two_map, torus_map, sphere_map):
    for hex_map in (genus_two_map, torus_map, sphere_map):
        assert enumerate_compatible_curves(hex_map) == []


def test_curves_match_brute_force(sphere_reduced_map):
    fast = enumerate_compatible_curves(sphere_reduced_map)
    slow = brute_force_compatible_curves(sphere_reduced_map)
    assert fast == slow
    assert 0 < len(fast) <= 2 ** len(sphere_reduced_map.arc_labels())
    assert all(classify_curve(sphere_reduced_map, c) == "ok" for c in fast)


def test_add_curve_gives_valid_maps(sphere_reduced_map):
    for curve in enumerate_compatible_curves(sphere_reduced_map):
        result = add_curve(sphere_reduced_map, curve)
        assert validate(result)
        assert len(result.curve_labels()) == len(sphere_reduced_map.curve_labels()) + 1
        assert result.is_pants_maximal()


def test_add_then_remove_round_trip(sphere_reduced_map):
    for curve in enumerate_compatible_curves(sphere_reduced_map):
        added, inverse = apply_move(sphere_reduced_map, MoveEdge(kind=ADD_CURVE, curve=curve))
        assert inverse.kind == REMOVE_CURVE
        back, forward = apply_move(added, inverse)
        assert validate(back)
        assert canonical_form(back) == canonical_form(sphere_reduced_map)
        assert forward.kind == ADD_CURVE


def test_removals_of_separating_curve(genus_two_map):
    result = enumerate_removals(genus_two_map, 1)
    assert result.candidates
    for predecessor, edge in result.candidates:
        assert validate(predecessor)
        assert edge.kind == REMOVE_CURVE
        assert 1 not in predecessor.curve_labels()


def test_handle_curve_is_not_removable(genus_two_map):
    with pytest.raises(NotRemovable):
        check_removable(genus_two_map, 0)
    assert enumerate_removals(genus_two_map, 0).candidates == []


def test_check_removable_errors(torus_map):
    with pytest.raises(PeripheralCurve):
        check_removable(torus_map, 0)
    with pytest.raises(UnknownCurve):
        check_removable(torus_map, 99)


def test_reattachment_words():
    assert reattachment_words(2, 1) == ["LLR", "LRL"]
    assert reattachment_words(1, 1) == ["LR"]
    assert len(reattachment_words(3, 3)) == 10
    assert all(w.startswith("L") for w in reattachment_words(3, 2))


def test_neighbor_states_are_distinct(genus_two_map):
    neighbours = neighbor_states(genus_two_map)
    keys = [canonical_form(target) for _, target in neighbours]
    assert len(keys) == len(set(keys))
    assert len(neighbours) <= len(candidate_moves(genus_two_map))
    assert {edge.kind for edge, _ in neighbours} <= {FLIP, REMOVE_CURVE}


def test_weight_shift_needs_weights(genus_two_map):
    with pytest.raises(MoveError):
        apply_move(genus_two_map, MoveEdge(kind=WEIGHT_SHIFT, curve_label=1, delta=1))


@pytest.mark.parametrize("name", sorted(REDUCED_MAPS))
def test_reduced_curves_match_brute_force(name):
    hex_map = REDUCED_MAPS[name]
    for target in [hex_map] + [flip(hex_map, a) for a in flippable_arcs(hex_map)[:2]]:
        fast = enumerate_compatible_curves(target)
        assert fast == brute_force_compatible_curves(target)


@settings(max_examples=40, deadline=None)
@given(pair=st.sampled_from(CURVE_PAIRS))
def test_normal_vectors_tell_curves_apart(pair):
    hex_map, first, second = pair
    assert normal_vector(hex_map, first) != normal_vector(hex_map, second)


def test_flip_self_adjacent_arc(genus_two_map):
    s1, s2 = genus_two_map.slots_of_arc(0)
    t = shifted(s1, 2)
    t_partner = genus_two_map.glue[t]
    glue = list(genus_two_map.glue)
    labels = list(genus_two_map.arc_label)
    glue[s1], glue[t] = t, s1
    glue[s2], glue[t_partner] = t_partner, s2
    labels[t], labels[s2] = 0, labels[t_partner]
    rewired = replace(genus_two_map, glue=tuple(glue), arc_label=tuple(labels))
    assert 0 not in flippable_arcs(rewired)
    with pytest.raises(SelfAdjacentArc):
        flip(rewired, 0)


def test_removed_curve_can_be_added_back():
    assert enumerate_compatible_curves(REDUCED_MAPS["genus-two"])
