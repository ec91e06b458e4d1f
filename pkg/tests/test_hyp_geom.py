import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import DRIFT_TOL
from hexweb.errors import EllipticOrParabolicHolonomy, InvalidConfig, NonPositiveSide, NotCrossing
from hexweb.hyp_geom import (
    FNConfig,
    build_base,
    check_geometry,
    circle_holonomy_length,
    closure_error,
    curve_development,
    curve_sum_error,
    fixed_arc_crossings,
    fixed_arcs,
    geo_add_curve,
    geo_flip,
    geo_remove_curve,
    geometry_matches,
    hexagon_from_arcs,
    hexagon_from_curves,
    hexagon_residual,
    holonomy_length,
    locate,
    renormalized,
    rotation,
    sl2_inverse,
    snap_floor,
    solve_hexagon,
    split_arc_geometry,
    state_residual,
    translation,
    translation_length,
    validate_config,
)
from hexweb.moves_topo import ADD_CURVE, MoveEdge, enumerate_compatible_curves, flip
from hexweb.pants_bridge import base_pants
from hexweb.surface_core import CompatibleCurve, SurfaceSig, hex_of
from hexweb.weighted_graph import apply_weighted_move

side = st.floats(min_value=0.2, max_value=4.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(a=side, b=side, c=side)
def test_solved_hexagons_close_up(a, b, c):
    sides = hexagon_from_arcs(a, b, c)
    assert all(s > 0 for s in sides)
    assert hexagon_residual(sides) < 1e-9
    assert closure_error(tuple(sides)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(a=side, b=side, c=side)
def test_curve_and_arc_solutions_agree(a, b, c):
    sides = hexagon_from_curves(a, b, c)
    again = hexagon_from_arcs(sides[0], sides[2], sides[4])
    assert np.allclose(sides, again, rtol=1e-9, atol=1e-9)


def test_solve_hexagon_is_cyclic():
    x, y, z = solve_hexagon(1.0, 1.5, 2.0)
    assert solve_hexagon(1.5, 2.0, 1.0) == pytest.approx((y, z, x))


def test_regular_hexagon():
    x, y, z = solve_hexagon(1.0, 1.0, 1.0)
    assert x == pytest.approx(y)
    assert y == pytest.approx(z)


@pytest.mark.parametrize("sides", [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (1.0, 1.0, math.nan)])
def test_non_positive_side(sides):
    with pytest.raises(NonPositiveSide):
        solve_hexagon(*sides)


def test_matrices():
    m = translation(0.7) @ rotation(1.1)
    assert np.linalg.det(m) == pytest.approx(1.0)
    assert np.allclose(m @ sl2_inverse(m), np.eye(2))
    assert translation_length(translation(1.3)) == pytest.approx(1.3)


def test_elliptic_holonomy_rejected():
    with pytest.raises(EllipticOrParabolicHolonomy):
        translation_length(np.eye(2))
    with pytest.raises(EllipticOrParabolicHolonomy):
        translation_length(rotation(0.5))


@pytest.mark.parametrize(
    "value,expected",
    [(1.0, 1), (0.9999999999, 1), (-1e-12, 0), (1.5, 1), (-0.5, -1), (2.0000000001, 2)],
)
def test_snap_floor(value, expected):
    assert snap_floor(value) == expected


def test_base_geometry(default_fn):
    state = build_base(default_fn)
    assert check_geometry(state)
    assert state_residual(state) < 1e-12
    assert curve_sum_error(state) < 1e-12
    for circle_id in range(6):
        assert circle_holonomy_length(state, circle_id) == pytest.approx(2.0, abs=1e-8)


def test_base_geometry_with_boundary(torus_fn):
    state = build_base(torus_fn)
    assert check_geometry(state)
    assert circle_holonomy_length(state, 0) == pytest.approx(1.5, abs=1e-8)


def test_validate_config():
    decomp = base_pants(SurfaceSig(1, 1))
    with pytest.raises(InvalidConfig):
        validate_config(FNConfig.of(decomp, {0: 1.0, 1: -2.0}))
    with pytest.raises(InvalidConfig):
        validate_config(FNConfig.of(decomp, {0: 1.0}))
    with pytest.raises(InvalidConfig):
        validate_config(FNConfig(decomp, ((0, 1.0), (1, 1.0)), ((0, 0.5),)))
    assert validate_config(FNConfig.of(decomp, {0: 1.0, 1: 2.0}, {1: 0.3}))


def test_geo_flip_keeps_geometry(default_fn):
    state = build_base(default_fn)
    for arc in state.hex_map.arc_labels():
        flipped = geo_flip(state, arc)
        assert flipped.hex_map == flip(state.hex_map, arc)
        assert check_geometry(flipped, DRIFT_TOL)


def test_geo_flip_twice_returns(default_fn):
    state = build_base(default_fn)
    once = geo_flip(state, 0)
    new_arc = state.hex_map.next_arc_label()
    twice = geo_flip(once, new_arc)
    assert check_geometry(twice, DRIFT_TOL)
    before = sorted(state.arc_length(a) for a in state.hex_map.arc_labels())
    after = sorted(twice.arc_length(a) for a in twice.hex_map.arc_labels())
    assert after == pytest.approx(before, abs=1e-8)


def test_renormalized_is_close(default_fn):
    state = geo_flip(build_base(default_fn), 1)
    assert geometry_matches(renormalized(state), state)


def test_added_curve_geometry(reduced_weighted_state):
    state = reduced_weighted_state.geo
    curves = enumerate_compatible_curves(state.hex_map)
    assert curves
    for curve in curves:
        development = curve_development(state, curve)
        assert development.length == pytest.approx(holonomy_length(state, curve))
        assert all(c.left_length > 0 and c.right_length > 0 for c in development.crossings)
        added = geo_add_curve(state, curve)
        assert check_geometry(added, DRIFT_TOL)
        label = added.hex_map.next_curve_label() - 1
        assert circle_holonomy_length(added, 2 * label) == pytest.approx(development.length, abs=1e-6)


def test_split_arc_geometry(reduced_weighted_state):
    state = reduced_weighted_state.geo
    curve = enumerate_compatible_curves(state.hex_map)[0]
    arc = sorted(curve.crossed_arcs(state.hex_map))[0]
    left, right, _ = split_arc_geometry(state, curve, arc)
    assert left > 0 and right > 0
    missing = next(a for a in state.hex_map.arc_labels() if a not in curve.crossed_arcs(state.hex_map))
    with pytest.raises(NotCrossing):
        split_arc_geometry(state, curve, missing)


def test_holonomy_ignores_starting_hexagon_and_direction(reduced_weighted_state):
    state = reduced_weighted_state.geo
    for curve in enumerate_compatible_curves(state.hex_map):
        length = holonomy_length(state, curve)
        segments = curve.segments
        for k in range(1, len(segments)):
            rotated = CompatibleCurve(segments[k:] + segments[:k])
            assert holonomy_length(state, rotated) == pytest.approx(length, abs=1e-9)
        assert holonomy_length(state, curve.reversed()) == pytest.approx(length, abs=1e-9)


def test_full_twist_gives_same_geometry(torus_fn):
    decomp = torus_fn.decomposition
    lengths = dict(torus_fn.lengths)
    once = build_base(FNConfig.of(decomp, lengths, {1: 0.3}))
    again = build_base(FNConfig.of(decomp, lengths, {1: 0.3 + lengths[1]}))
    assert once.geom.sides == again.geom.sides
    assert once.geom.starts == pytest.approx(again.geom.starts, abs=1e-12)
    assert geometry_matches(once, again, 1e-12)


def test_remove_undoes_add(reduced_weighted_state):
    state = reduced_weighted_state.geo
    for curve in enumerate_compatible_curves(state.hex_map):
        added, inverse = apply_weighted_move(reduced_weighted_state, MoveEdge(kind=ADD_CURVE, curve=curve))
        back, _ = geo_remove_curve(added.geo, inverse.curve_label, inverse.reattachment)
        assert geometry_matches(back, state, 1e-8)


def test_symmetric_octagon_splits_symmetrically(default_fn):
    state = build_base(default_fn)
    s1, s2 = state.hex_map.slots_of_arc(0)
    flipped = geo_flip(state, 0)
    first, second = flipped.geom.hexagon(hex_of(s1)), flipped.geom.hexagon(hex_of(s2))
    for hexagon in (first, second):
        assert hexagon[1] == pytest.approx(hexagon[5], abs=1e-9)
        assert hexagon[2] == pytest.approx(hexagon[4], abs=1e-9)
    assert first == pytest.approx(second, abs=1e-9)


def test_starting_arcs_cross_nothing(default_fn):
    state = build_base(default_fn)
    system = fixed_arcs(state)
    crossings = fixed_arc_crossings(state, system, frozenset(state.hex_map.curve_labels()))
    assert crossings.arcs_total == 0
    assert crossings.matched == {a: a for a in state.hex_map.arc_labels()}


def test_flipped_arc_crosses_the_new_diagonal(default_fn):
    state = build_base(default_fn)
    system = fixed_arcs(state)
    flipped = geo_flip(state, 0)
    new_arc = state.hex_map.next_arc_label()
    crossings = fixed_arc_crossings(flipped, system, frozenset(state.hex_map.curve_labels()))
    assert crossings.arcs[new_arc] == 1
    assert crossings.arcs_total == 1
    assert crossings.curves == {}
    assert crossings.misrouted == 0
    assert set(crossings.matched) == set(state.hex_map.arc_labels()) - {0}


def test_locate_inverts_slot_coordinates(default_fn):
    state = geo_flip(build_base(default_fn), 1)
    for s in state.hex_map.curve_slots():
        middle = state.geom.starts[s] + state.side_sign(s) * state.geom.sides[s] / 2
        slot, d = locate(state, state.hex_map.circle[s], middle)
        assert slot == s
        assert d == pytest.approx(state.geom.sides[s] / 2, abs=1e-9)
