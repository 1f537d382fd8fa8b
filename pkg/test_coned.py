import os
import sys

sys.path.append(os.getcwd())

import pytest

from app.errors import ParameterError
from app.services.cayley_service import build_ball
from app.services.coned_service import (
    annotate, bcp_estimate, bcp_report, cone_off, delta_by_radius, delta_hyperbolicity, witness_value
)
from app.services.words_service import parse_presentation

Z2_HK = parse_presentation("generators: a b\nrelators: abAB\nsubgroup H: a\nsubgroup K: b\n")
F2_HK = parse_presentation("generators: a b\nsubgroup H: a\nsubgroup K: b\n")


def test_one_vertex_per_coset():
    ball = build_ball(Z2_HK, 2)
    assert len(cone_off(ball, ["H"]).cosets) == 5
    G = cone_off(ball)
    assert len(G.cosets) == 10
    assert G.graph.number_of_nodes() == 13 + 10


def test_coset_labels():
    ball = build_ball(Z2_HK, 2)
    G = cone_off(ball, ["H"])
    labels = [G.label(G.n_elements + i) for i in range(len(G.cosets))]
    assert labels[0] == "H"
    assert "bH" in labels
    assert G.label(0) == "e"


def test_cone_edges_have_half_length():
    ball = build_ball(Z2_HK, 2)
    G = cone_off(ball)
    d = G.element_distances()
    assert d[0, ball.index[(1, 1)]] == 1
    assert d[0, ball.index[(1, 2)]] == 2
    assert G.doubled_distances[0, G.n_elements] == 1
    assert G.cayley_distance(0, ball.index[(1, 1)]) == 2


def test_unknown_subgroup_rejected():
    with pytest.raises(ParameterError):
        cone_off(build_ball(Z2_HK, 1), ["L"])


def test_delta_of_free_group_is_zero():
    G = cone_off(build_ball(F2_HK, 3), [])
    result = delta_hyperbolicity(G)
    assert result.value_doubled == 0
    assert result.mode == "exhaustive"


def test_delta_of_flat_plane_is_positive():
    G = cone_off(build_ball(Z2_HK, 3), [])
    assert delta_hyperbolicity(G).value_doubled >= 4


def test_coning_both_factors_of_z2():
    for R in (2, 3):
        G = cone_off(build_ball(Z2_HK, R))
        assert delta_hyperbolicity(G).value_doubled == 2


def test_delta_sampling_above_the_cap():
    G = cone_off(build_ball(Z2_HK, 3), [])
    exhaustive = delta_hyperbolicity(G)
    sampled = delta_hyperbolicity(G, quadruple_cap=100, seed=7)
    assert sampled.mode == "sampled"
    assert sampled.quadruples == 100
    assert sampled.value_doubled <= exhaustive.value_doubled
    assert delta_hyperbolicity(G, quadruple_cap=100, seed=7).value_doubled == sampled.value_doubled


def test_tiny_ball_has_zero_delta():
    G = cone_off(build_ball(Z2_HK, 0), [])
    assert delta_hyperbolicity(G).value_doubled == 0


def test_delta_by_radius():
    reports = delta_by_radius(F2_HK, [1, 2], [])
    assert [r.R for r in reports] == [1, 2]
    assert all(r.value_doubled == 0 for r in reports)


def test_annotate_marks_entry_and_exit():
    ball = build_ball(Z2_HK, 2)
    G = cone_off(ball, ["H"])
    path = annotate(G, [0, G.n_elements, ball.index[(1, 1)]])
    assert len(path.penetrations) == 1
    pen = path.penetrations[0]
    assert (pen.entry, pen.exit) == (0, ball.index[(1, 1)])
    assert not path.backtracks()


def test_bcp_of_free_group_coned_at_both_factors():
    G = cone_off(build_ball(F2_HK, 3))
    result = bcp_estimate(G)
    assert result.c1_pairwise == 0
    assert result.c1_entry_exit == 1
    assert result.c1 == 1
    val, coset, p, q = result.witnesses["entry_exit"]
    assert witness_value(G, "entry_exit", coset, p, q) == val
    report = bcp_report(G, result)
    assert report.witnesses[0].kind == "entry_exit"


def test_bcp_without_subgroups_is_trivial():
    G = cone_off(build_ball(F2_HK, 2), [])
    assert bcp_estimate(G).c1 == 0


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
