import os
import sys
from fractions import Fraction

sys.path.append(os.getcwd())

import pytest

from app.errors import InfeasibleInstanceError, MissingCombingPathError, ParameterError
from app.services.cayley_service import build_ball
from app.services.combing_service import (
    NormalFormSubgroupCombing, TableSubgroupCombing, analyze_combing, build_alpha, build_beta, check_alpha,
    check_beta, collapse_excursions, constants_stability, fellow_traveler_K, group_metric, make_path,
    normal_form_combing, parse_polynomial, return_bound_N, synchrony_report
)
from app.services.coned_service import cone_off
from app.services.words_service import parse_presentation

Z2_HK = parse_presentation("generators: a b\nrelators: abAB\nsubgroup H: a\nsubgroup K: b\n")
F2 = parse_presentation("generators: a b\n")


def test_parse_polynomial():
    assert parse_polynomial("x")(5) == 5
    assert parse_polynomial("2*x**2 + 1")(3) == 19
    assert parse_polynomial("4")(10) == 4
    with pytest.raises(ParameterError):
        parse_polynomial("x - 1")
    with pytest.raises(ParameterError):
        parse_polynomial("x**")
    with pytest.raises(ParameterError):
        parse_polynomial("x/2")


def test_make_path_trims_the_tail():
    path = make_path((1,), [(), (1,), (1,), (1,)])
    assert path.positions == ((), (1,))
    assert path.settle_time == 1
    assert path.at(7) == (1,)
    with pytest.raises(InfeasibleInstanceError):
        make_path((2,), [(), (1,)])


def test_straight_line_combing_of_z2():
    c = normal_form_combing(Z2_HK, build_ball(Z2_HK, 2))
    K, witness = fellow_traveler_K(c)
    assert K == 2
    assert witness.constant == "K"
    N, _ = return_bound_N(c)
    assert N == 1


def test_tree_combing_of_free_group():
    alpha = build_alpha(cone_off(build_ball(F2, 3), []))
    check = check_alpha(alpha)
    assert check.coherent and check.geodesic
    K, _ = fellow_traveler_K(alpha)
    assert K == 1


def test_alpha_crosses_cosets_in_one_step():
    ball = build_ball(Z2_HK, 3)
    alpha = build_alpha(cone_off(ball))
    path = alpha.paths[(1, 1, 1)]
    assert path.positions == ((), (1, 1, 1))
    assert path.vias[0] is not None
    check = check_alpha(alpha)
    assert check.coherent and check.geodesic
    assert check.pairs_checked == len(ball) * (len(ball) - 1) // 2


def test_beta_pads_edge_steps_to_unit_time():
    ball = build_ball(Z2_HK, 3)
    alpha = build_alpha(cone_off(ball, ["H"]))
    combs = {"H": NormalFormSubgroupCombing(Z2_HK, "H")}
    beta = build_beta(alpha, combs, parse_polynomial("x"), 3)
    path = beta.paths[(2,)]
    assert path.positions == ((), (2,))
    assert path.segments[0].end == 3
    assert path.segments[0].coset is None


def test_beta_follows_the_subgroup_path_through_a_coset():
    ball = build_ball(Z2_HK, 5)
    alpha = build_alpha(cone_off(ball, ["H"]))
    combs = {"H": NormalFormSubgroupCombing(Z2_HK, "H")}
    beta = build_beta(alpha, combs, parse_polynomial("x"), 3)
    path = beta.paths[(1,) * 5]
    assert path.positions == tuple((1,) * i for i in range(6))
    assert path.segments[0].end == 5
    report = check_beta(beta, alpha)
    assert report.ends_ok and report.projection_ok and report.prefix_ok


def test_unit_time_below_one_is_rejected():
    alpha = build_alpha(cone_off(build_ball(Z2_HK, 1), ["H"]))
    with pytest.raises(InfeasibleInstanceError):
        build_beta(alpha, {"H": NormalFormSubgroupCombing(Z2_HK, "H")}, parse_polynomial("0"), 3)


def test_subgroup_combings_refuse_foreign_elements():
    comb = NormalFormSubgroupCombing(Z2_HK, "H")
    assert comb.path((1, 1)).positions == ((), (1,), (1, 1))
    with pytest.raises(MissingCombingPathError):
        comb.path((2,))
    table = TableSubgroupCombing(Z2_HK, "H", {(1,): [(), (1,)]})
    assert table.path((1,)).settle_time == 1
    with pytest.raises(MissingCombingPathError):
        table.path((1, 1))


def test_paths_with_jumps_are_rejected():
    with pytest.raises(InfeasibleInstanceError):
        make_path((1, 2), [(), (1, 2)], metric=group_metric(Z2_HK))
    jumping = TableSubgroupCombing(Z2_HK, "H", {(1,): [(), (1,)], (1, 1): [(), (1, 1)]})
    assert jumping.path((1,)).settle_time == 1
    with pytest.raises(InfeasibleInstanceError):
        jumping.path((1, 1))


def test_lifted_combing_rejects_a_jumping_subgroup_table():
    alpha = build_alpha(cone_off(build_ball(Z2_HK, 2), ["H"]))
    table = {(1,): [(), (1,)], (-1,): [(), (-1,)], (1, 1): [(), (1, 1)], (-1, -1): [(), (-1,), (-1, -1)]}
    with pytest.raises(InfeasibleInstanceError):
        build_beta(alpha, {"H": TableSubgroupCombing(Z2_HK, "H", table)}, parse_polynomial("x"), 1)


def test_projection_collapses_coset_excursions():
    G = cone_off(build_ball(Z2_HK, 3))
    assert collapse_excursions(G, [(), (1,), (1,), (1, 1), (1, 1, 1)]) == [(), (1, 1, 1)]
    assert collapse_excursions(G, [(), (2,), (1, 2), (1, 1, 2)]) == [(), (2,), (1, 1, 2)]


def test_corrupted_lifted_path_fails_the_projection_check():
    ball = build_ball(Z2_HK, 3)
    alpha = build_alpha(cone_off(ball))
    combs = {name: NormalFormSubgroupCombing(Z2_HK, name) for name in ("H", "K")}
    beta = build_beta(alpha, combs, parse_polynomial("x"), 1)
    assert check_beta(beta, alpha).projection_ok
    target = (1, 1, 1)
    old = beta.paths[target]
    detour = [(), (2,), (1, 2), (1, 1, 2), (1, 1, 1, 2), (1, 1, 1)]
    beta.paths[target] = make_path(target, detour, old.vias, old.segments)
    report = check_beta(beta, alpha)
    assert not report.projection_ok
    assert report.witness == ["aaa"]


def test_synchrony_counts_adjacent_pairs():
    ball = build_ball(Z2_HK, 3)
    alpha = build_alpha(cone_off(ball))
    combs = {name: NormalFormSubgroupCombing(Z2_HK, name) for name in ("H", "K")}
    beta = build_beta(alpha, combs, parse_polynomial("x"), 1)
    report = synchrony_report(beta, alpha)
    assert report.pairs == len(ball.edges)
    assert report.synchronous > 0
    assert report.M >= 1


def test_full_analysis_of_doubly_coned_z2():
    analysis = analyze_combing(Z2_HK, 2, poly="x", c1=1)
    assert analysis.c1_source == "user"
    assert analysis.alpha_check.coherent and analysis.alpha_check.geodesic
    beta = analysis.beta_check
    assert beta.ends_ok and beta.projection_ok and beta.prefix_ok
    assert analysis.subgroup_N == {"H": 1, "K": 1}
    assert analysis.length_bound.violations == []
    assert isinstance(analysis.K, Fraction)
    report = analysis.to_report()
    assert report.unit_time == 1
    assert report.constants.N == analysis.N


def test_c1_is_measured_when_missing():
    p = parse_presentation("generators: a b\nsubgroup H: a\nsubgroup K: b\n")
    analysis = analyze_combing(p, 2, checks=False)
    assert analysis.c1_source == "measured"
    assert analysis.c1 >= 1
    assert analysis.settle is None


def test_constants_stability_across_radii():
    report = constants_stability(Z2_HK, [1, 2], c1=1)
    assert report.radii == [1, 2]
    assert len(report.constants) == 2


def test_lifted_combing_with_measured_c1_at_radius_three():
    analysis = analyze_combing(Z2_HK, 3, poly="x")
    assert analysis.c1_source == "measured"
    assert analysis.alpha_check.coherent and analysis.alpha_check.geodesic
    beta = analysis.beta_check
    assert beta.ends_ok and beta.projection_ok and beta.prefix_ok
    assert analysis.length_bound.violations == []


def test_constants_at_radius_three_and_four():
    report = constants_stability(Z2_HK, [3, 4], c1=1)
    assert report.radii == [3, 4]
    for constants in report.constants:
        assert constants.subgroup_N == {"H": 1, "K": 1}
        assert Fraction(constants.K) < 100
        assert constants.M is not None and constants.T is not None
    assert "subgroup_N" not in {d.constant for d in report.diffs}


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
