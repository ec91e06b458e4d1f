import pytest

from hexweb.hyp_geom import curve_development
from hexweb.moves_topo import enumerate_compatible_curves, flip
from hexweb.oracles import brute_force_compatible_curves, isomorphic, unrolled_crossings
from hexweb.surface_core import canonical_form, canonical_relabel


def test_relabelled_maps_are_isomorphic(genus_two_map, sphere_reduced_map):
    for hex_map in (genus_two_map, sphere_reduced_map):
        assert isomorphic(hex_map, canonical_relabel(hex_map))
        assert isomorphic(canonical_relabel(hex_map), hex_map)


def test_different_surfaces_are_not_isomorphic(torus_map, sphere_map, sphere_reduced_map):
    assert not isomorphic(torus_map, sphere_map)
    assert not isomorphic(sphere_map, sphere_reduced_map)


def test_isomorphism_agrees_with_canonical_form(genus_two_map):
    for a in genus_two_map.arc_labels():
        for b in genus_two_map.arc_labels():
            first, second = flip(genus_two_map, a), flip(genus_two_map, b)
            same_key = canonical_form(first) == canonical_form(second)
            assert isomorphic(first, second) == same_key


def test_brute_force_on_pants_map(genus_two_map):
    assert brute_force_compatible_curves(genus_two_map) == []


def test_hyperboloid_crossings_match(reduced_weighted_state):
    state = reduced_weighted_state.geo
    for curve in enumerate_compatible_curves(state.hex_map):
        development = curve_development(state, curve)
        unrolled = unrolled_crossings(state, curve)
        assert len(unrolled) == len(development.crossings)
        for (left, right, twist), crossing in zip(unrolled, development.crossings):
            assert left == pytest.approx(crossing.left_length, abs=1e-8)
            assert right == pytest.approx(crossing.right_length, abs=1e-8)
            assert twist == pytest.approx(crossing.twist, abs=1e-8)
