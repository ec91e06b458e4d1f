import pytest

from hexweb.errors import MemoryBudgetExceeded, MoveError, NotConnectedWithinBudget
from hexweb.explorer import (
    TOPO,
    WEIGHTED,
    bfs_ball,
    distance,
    distances_to,
    mode_for,
    random_walk,
    replay,
    stats,
)
from hexweb.hyp_geom import state_residual
from hexweb.moves_topo import flip, neighbor_states
from hexweb.surface_core import canonical_form, key_digest, validate
from hexweb.weighted_graph import base_weighted_state, weighted_key


def test_radius_zero(genus_two_map):
    ball = bfs_ball(genus_two_map, 0)
    assert len(ball) == 1
    assert ball.root_key == canonical_form(genus_two_map)
    assert ball.depth(ball.root_key) == 0


def test_radius_one_matches_neighbours(genus_two_map):
    ball = bfs_ball(genus_two_map, 1)
    root = canonical_form(genus_two_map)
    targets = {canonical_form(t) for _, t in neighbor_states(genus_two_map)} - {root}
    assert set(ball.graph.neighbors(root)) == targets
    assert len(ball) == len(targets) + 1
    assert all(ball.depth(k) == 1 for k in targets)


def test_balls_grow_monotonically(torus_map):
    small = bfs_ball(torus_map, 1)
    large = bfs_ball(torus_map, 2)
    assert set(small.graph.nodes) <= set(large.graph.nodes)


def test_torus_graph_is_finite_and_connected(torus_map):
    ball = bfs_ball(torus_map, 50)
    assert ball.complete
    summary = stats(ball)
    assert summary.connected
    assert summary.diameter is not None
    assert summary.vertex_count == len(ball)
    assert sum(summary.degree_histogram.values()) == summary.vertex_count


def test_threads_do_not_change_the_ball(torus_map):
    single = bfs_ball(torus_map, 2, threads=1)
    pooled = bfs_ball(torus_map, 2, threads=2)
    assert single.vertices() == pooled.vertices()
    assert set(single.graph.edges) == set(pooled.graph.edges)


def test_negative_radius(genus_two_map):
    with pytest.raises(MoveError):
        bfs_ball(genus_two_map, -1)


def test_unknown_mode():
    with pytest.raises(MoveError):
        mode_for("sideways")


def test_memory_cap(genus_two_map):
    with pytest.raises(MemoryBudgetExceeded):
        bfs_ball(genus_two_map, 2, memory_cap=2)


def test_distance(genus_two_map):
    assert distance(genus_two_map, genus_two_map) == 0
    neighbour = flip(genus_two_map, 0)
    expected = 0 if canonical_form(neighbour) == canonical_form(genus_two_map) else 1
    assert distance(genus_two_map, neighbour) == expected


def test_distance_budget(genus_two_map):
    _, target = next(
        (e, t) for e, t in neighbor_states(genus_two_map) if canonical_form(t) != canonical_form(genus_two_map)
    )
    with pytest.raises(NotConnectedWithinBudget):
        distance(genus_two_map, target, max_radius=0)
    assert distance(genus_two_map, target, max_radius=1) == 1


def test_distances_to(torus_map):
    ball = bfs_ball(torus_map, 2)
    result = distances_to(ball, [ball.root_key])
    assert result[ball.root_key] == 0
    assert all(result[k] == ball.depth(k) for k in ball.graph.nodes)
    assert all(v is None for v in distances_to(ball, [b"missing"]).values())


def test_topo_walk_is_reproducible(genus_two_map):
    first = random_walk(genus_two_map, 15, seed=7)
    second = random_walk(genus_two_map, 15, seed=7)
    assert [s.edge for s in first.log] == [s.edge for s in second.log]
    assert validate(first.final)
    replayed = replay(genus_two_map, [s.edge for s in first.log])
    assert canonical_form(replayed) == canonical_form(first.final)
    assert key_digest(canonical_form(replayed)) == first.log[-1].key


def test_weighted_walk_replays(torus_fn):
    root = base_weighted_state(torus_fn)
    walk = random_walk(root, 10, seed=3, mode=WEIGHTED)
    assert len(walk.log) == 10
    assert walk.max_residual < 1e-8
    replayed = replay(root, [s.edge for s in walk.log], mode=WEIGHTED)
    assert state_residual(replayed.geo) < 1e-8
    assert canonical_form(replayed.hex_map, replayed.decoration()) == canonical_form(
        walk.final.hex_map, walk.final.decoration()
    )


def test_weighted_ball_radius_one(torus_fn):
    root = base_weighted_state(torus_fn)
    ball = bfs_ball(root, 1, mode=WEIGHTED)
    assert ball.mode == WEIGHTED
    assert ball.root_key == weighted_key(root)
    assert len(ball) > 1
    assert "weight_shift" in stats(ball).edges_by_kind
    assert ball.graph.degree(ball.root_key) == len(ball) - 1


def test_ball_kinds(genus_two_map):
    ball = bfs_ball(genus_two_map, 1, mode=TOPO)
    kinds = stats(ball).edges_by_kind
    assert set(kinds) <= {"flip", "add_curve", "remove_curve"}
