import os
import sys

sys.path.append(os.getcwd())

import pytest

from app.errors import CapExceededError, ParameterError
from app.services.cayley_service import ball_distance, build_ball, geodesic, is_edge_path, volume_profile
from app.services.words_service import parse_presentation

Z2 = parse_presentation("generators: a b\nrelators: abAB\n")
F2 = parse_presentation("generators: a b\n")


def test_z2_ball_sizes():
    ball = build_ball(Z2, 3)
    assert ball.layer_sizes() == [1, 4, 8, 12]
    assert len(ball) == 25
    assert ball.vertices[0] == ()


def test_shortlex_vertex_order():
    ball = build_ball(Z2, 1)
    assert list(ball.vertices) == [(), (1,), (-1,), (2,), (-2,)]


def test_free_group_ball_is_a_tree():
    ball = build_ball(F2, 2)
    assert len(ball) == 17
    assert ball.graph.number_of_edges() == len(ball) - 1


def test_z2_edges_inside_radius_two():
    ball = build_ball(Z2, 2)
    assert len(ball) == 13
    assert len(ball.edges) == 16


def test_volume_profile():
    assert volume_profile(Z2, 3) == ([1, 5, 13, 25], True)
    volumes, exact = volume_profile(Z2, 3, vertex_cap=10)
    assert volumes == [1, 5] and not exact


def test_lexicographically_least_geodesic():
    ball = build_ball(Z2, 3)
    ab = ball.index[(1, 2)]
    path = geodesic(ball, 0, ab)
    assert path.vertices == (0, ball.index[(1,)], ab)
    assert path.length == 2
    assert not path.ball_restricted
    assert is_edge_path(ball, path.vertices)
    assert ball_distance(ball, ball.index[(1,)], ball.index[(-1,)]) == 2


def test_ball_restricted_flag():
    ball = build_ball(Z2, 2)
    path = geodesic(ball, ball.index[(1, 1)], ball.index[(-1, -1)])
    assert path.length == 4
    assert path.ball_restricted


def test_bad_radius_and_cap():
    with pytest.raises(ParameterError):
        build_ball(Z2, -1)
    with pytest.raises(CapExceededError):
        build_ball(Z2, 3, vertex_cap=10)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
