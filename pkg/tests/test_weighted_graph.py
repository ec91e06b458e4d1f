import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexweb.errors import NoSplitArcs, UnknownCurve
from hexweb.hyp_geom import CrossingGeometry, CurveDevelopment, curve_development, default_config
from hexweb.moves_topo import ADD_CURVE, FLIP, REMOVE_CURVE, WEIGHT_SHIFT, MoveEdge, enumerate_compatible_curves
from hexweb.surface_core import SurfaceSig, canonical_form
from hexweb.weighted_graph import (
    apply_weighted_move,
    arc_weights,
    base_weighted_state,
    canonical_direction,
    fingerprint,
    merged_piece_arcs,
    orientations,
    stabilizer_probe,
    twist_action,
    unweighted_key,
    valency_bound,
    weighted_key,
    weighted_add,
    weighted_neighbor_states,
    weight_of_added_curve,
)

GENUS_TWO_STATE = base_weighted_state(default_config(SurfaceSig(2, 0)))


@pytest.fixture(scope="module")
def torus_state(torus_fn):
    return base_weighted_state(torus_fn)


def test_base_weights_are_zero():
    assert GENUS_TWO_STATE.weights == ((0, 0), (1, 0), (2, 0))


@settings(max_examples=25, deadline=None)
@given(curve=st.sampled_from([0, 1, 2]), a=st.integers(-3, 3), b=st.integers(-3, 3))
def test_twists_act_as_a_group(curve, a, b):
    composed = twist_action(twist_action(GENUS_TWO_STATE, curve, a), curve, b)
    assert composed == twist_action(GENUS_TWO_STATE, curve, a + b)
    assert twist_action(composed, curve, -(a + b)) == GENUS_TWO_STATE


def test_twists_on_different_curves_commute():
    first = twist_action(twist_action(GENUS_TWO_STATE, 0, 2), 1, -1)
    second = twist_action(twist_action(GENUS_TWO_STATE, 1, -1), 0, 2)
    assert first == second
    assert weighted_key(first) != weighted_key(GENUS_TWO_STATE)
    assert unweighted_key(first) == unweighted_key(GENUS_TWO_STATE)


def test_twist_on_peripheral_curve(torus_state):
    with pytest.raises(UnknownCurve):
        twist_action(torus_state, 0)


def test_torus_stabilizer(torus_state):
    report = stabilizer_probe(torus_state, max_power=2)
    assert report.fixed_at_zero
    assert report.fixed_powers == []
    assert report.moved_powers == 4
    assert report.passed
    assert report.weighted_vertices == report.quotient_vertices == 1


def test_torus_neighbours(torus_state):
    neighbours = weighted_neighbor_states(torus_state)
    kinds = [edge.kind for edge, _ in neighbours]
    assert kinds.count(WEIGHT_SHIFT) == 2 * len(torus_state.hex_map.interior_curves())
    assert kinds.count(FLIP) == len(torus_state.hex_map.arc_labels())
    assert REMOVE_CURVE not in kinds


def test_weight_shift_inverse(torus_state):
    shifted, inverse = apply_weighted_move(torus_state, MoveEdge(kind=WEIGHT_SHIFT, curve_label=1, delta=3))
    assert shifted.weight(1) == 3
    back, _ = apply_weighted_move(shifted, inverse)
    assert back == torus_state


def test_degree_within_valency_bound():
    neighbours = weighted_neighbor_states(GENUS_TWO_STATE)
    assert 0 < len(neighbours) <= valency_bound(GENUS_TWO_STATE.hex_map)


def test_merged_piece_arcs(genus_two_map):
    assert merged_piece_arcs(genus_two_map, 1) == 6
    assert merged_piece_arcs(genus_two_map, 0) == 3
    assert merged_piece_arcs(genus_two_map, 2) == 3


def test_fingerprint_and_orientations():
    assert len(fingerprint(GENUS_TWO_STATE)) == len(GENUS_TWO_STATE.hex_map.arc_labels())
    signs = orientations(GENUS_TWO_STATE)
    assert len(signs) == len(GENUS_TWO_STATE.weights)
    assert set(signs) <= {1, -1}


def test_reduced_state_weights(reduced_weighted_state):
    assert 1 not in dict(reduced_weighted_state.weights)
    assert sorted(dict(reduced_weighted_state.weights)) == reduced_weighted_state.hex_map.interior_curves()


def test_weight_spread_of_added_curves(reduced_weighted_state):
    state = reduced_weighted_state.geo
    for curve in enumerate_compatible_curves(state.hex_map):
        weights = arc_weights(curve_development(state, curve))
        assert max(weights) - min(weights) <= 1


def test_add_then_remove_returns(reduced_weighted_state):
    curve = enumerate_compatible_curves(reduced_weighted_state.hex_map)[0]
    added, inverse = apply_weighted_move(reduced_weighted_state, MoveEdge(kind=ADD_CURVE, curve=curve))
    assert inverse.kind == REMOVE_CURVE
    assert inverse.weight == added.weight(inverse.curve_label)
    back, _ = apply_weighted_move(added, inverse)
    assert canonical_form(back.hex_map, back.decoration()) == canonical_form(
        reduced_weighted_state.hex_map, reduced_weighted_state.decoration()
    )


def _development(curve, length, twists):
    crossings = tuple(
        CrossingGeometry(arc=i, slot=2 * i, left_length=1.0, right_length=1.0, left_foot=0.0, right_foot=t)
        for i, t in enumerate(twists)
    )
    return CurveDevelopment(curve, length, crossings)


@pytest.mark.parametrize(
    "twists,expected",
    [((0.3, 0.9), [0, 0]), ((2.5,), [2]), ((-0.25, 0.5), [-1, 0]), ((1.0 - 1e-12, 3.0), [1, 3])],
)
def test_arc_weights_floor_ratios(reduced_weighted_state, twists, expected):
    curve = enumerate_compatible_curves(reduced_weighted_state.hex_map)[0]
    development = _development(curve, 1.0, twists)
    assert arc_weights(development) == expected
    weight = weight_of_added_curve(reduced_weighted_state.geo, curve, development=development)
    assert abs(weight) == max(expected)


def test_reversed_curve_has_opposite_weight(reduced_weighted_state):
    state = reduced_weighted_state.geo
    for curve in enumerate_compatible_curves(state.hex_map):
        assert weight_of_added_curve(state, curve.reversed()) == -weight_of_added_curve(state, curve)


def test_added_weight_matches_direct_weight(reduced_weighted_state):
    for curve in enumerate_compatible_curves(reduced_weighted_state.hex_map):
        added, label = weighted_add(reduced_weighted_state, curve)
        oriented = curve if canonical_direction(reduced_weighted_state.hex_map, curve) else curve.reversed()
        assert added.weight(label) == weight_of_added_curve(reduced_weighted_state.geo, oriented)


def test_curve_splitting_no_arc(reduced_weighted_state):
    curve = enumerate_compatible_curves(reduced_weighted_state.hex_map)[0]
    with pytest.raises(NoSplitArcs):
        weight_of_added_curve(reduced_weighted_state.geo, curve, development=_development(curve, 1.0, ()))
