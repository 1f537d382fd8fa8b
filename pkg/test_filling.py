import os
import sys

sys.path.append(os.getcwd())

import pytest

from app.errors import InfeasibleInstanceError, NotABoundaryError, NotACycleError, ParameterError
from app.services.cayley_service import build_ball
from app.services.complex_service import (
    Chain, boundary, box_surface, cube_cell, cubical_lattice, loop_chain, presentation_complex
)
from app.services.filling_service import (
    bridge_check, compare_tables_over_radii, dehn_table, dominates, enumerate_min_filling, equivalent,
    lex_key, min_area_diagram, min_filling, poly_bound_fit
)
from app.services.words_service import parse_presentation, parse_word

Z2 = parse_presentation("generators: a b\nrelators: abAB\n")
F2 = parse_presentation("generators: a b\n")


def _z2(R):
    return presentation_complex(build_ball(Z2, R))


def test_unit_square_fills_with_one_cell():
    X = _z2(2)
    b = loop_chain(X, X.base_vertex, parse_word(Z2, "abAB"))
    result = min_filling(X, b)
    assert result.count == 1
    assert result.status == "exact"
    assert result.weighted_count == 4
    brute = enumerate_min_filling(X, b, max_count=1)
    assert brute.count == 1


def test_two_by_two_square():
    X = _z2(4)
    word = parse_word(Z2, "aabbAABB")
    b = loop_chain(X, X.base_vertex, word)
    assert min_filling(X, b).count == 4
    assert min_area_diagram(X, X.base_vertex, word).count == 4
    lp = min_filling(X, b, solver="lp")
    assert lp.status == "lp-lower-bound"
    assert lp.lower_bound <= 4


def test_three_by_three_square():
    X = _z2(6)
    word = parse_word(Z2, "aaabbbAAABBB")
    b = loop_chain(X, X.base_vertex, word)
    assert min_area_diagram(X, X.base_vertex, word).count == 9
    result = min_filling(X, b)
    assert result.count == 9
    assert result.status == "exact"


def test_trivial_loop_has_empty_filling():
    X = _z2(2)
    result = min_area_diagram(X, X.base_vertex, parse_word(Z2, "aA"))
    assert result.count == 0


def test_non_cycle_and_non_boundary():
    X = _z2(2)
    with pytest.raises(NotACycleError):
        min_filling(X, Chain.cell(1, 0))
    full = cubical_lattice(2, 1)
    skeleton = cubical_lattice(2, 1, maxdim=1)
    with pytest.raises(NotABoundaryError):
        min_filling(skeleton, box_surface(full, (0, 0), 1))


def test_cube_surfaces():
    X = cubical_lattice(3, 1)
    for lo, size, volume in (((0, 0, 0), 1, 1), ((-1, -1, -1), 2, 8)):
        surface = box_surface(X, lo, size)
        exact = min_filling(X, surface)
        assert exact.count == volume
        assert exact.status == "exact"
        assert min_filling(X, surface, solver="lp").lower_bound <= volume


def test_ties_go_to_the_lexicographically_least_filling():
    X = cubical_lattice(3, 1, maxdim=2)

    def edge(corner, axis):
        return Chain.cell(1, cube_cell(X, corner, (axis,)))

    # skew hexagon on the unit cube; either half of the cube surface fills it with three squares
    hexagon = (edge((1, 0, 0), 1) - edge((0, 1, 0), 0) + edge((0, 1, 0), 2)
               - edge((0, 0, 1), 1) + edge((0, 0, 1), 0) - edge((1, 0, 0), 2))
    assert boundary(X, hexagon).is_zero()
    faces = [cube_cell(X, corner, axes) for corner, axes in (
        ((0, 0, 0), (0, 1)), ((0, 0, 0), (0, 2)), ((0, 0, 0), (1, 2)),
        ((1, 0, 0), (1, 2)), ((0, 1, 0), (0, 2)), ((0, 0, 1), (0, 1)),
    )]
    result = min_filling(X, hexagon)
    assert result.count == 3
    brute = enumerate_min_filling(X, hexagon, max_count=3, candidates=faces)
    assert brute.count == 3
    assert result.filling == brute.filling
    assert set(result.filling.support) <= set(faces)
    assert boundary(X, result.filling) == hexagon
    surface = box_surface(cubical_lattice(3, 1), (0, 0, 0), 1)
    other = min((result.filling - surface, result.filling + surface), key=lambda c: sum(abs(k) for _, k in c.items))
    assert sum(abs(k) for _, k in other.items) == 3
    m = X.num_cells(2)
    assert lex_key(result.filling, m) < lex_key(other, m)


def test_dehn_table_of_z2():
    table = dehn_table(_z2(3), 1, 8)
    assert table.values == [0, 0, 0, 0, 1, 1, 2, 2, 4]
    assert set(table.statuses) == {"exact"}
    report = table.to_report()
    assert report.entries[8].witness_id is not None


def test_free_group_has_no_area():
    X = presentation_complex(build_ball(F2, 3))
    assert X.num_cells(2) == 0
    table = dehn_table(X, 1, 10)
    assert table.values == [0] * 11
    assert table.enumerated == 0
    assert min_area_diagram(X, X.base_vertex, (1, 2, -2, -1)).count == 0


def test_weighted_dehn_table_of_z2():
    table = dehn_table(_z2(3), 1, 10, weighted=True)
    assert table.values == [0] * 8 + [4, 4, 4]
    assert table.values[8] == 4
    assert dehn_table(_z2(2), 1, 10, weighted=True).values == table.values


def test_weighted_tables_refuse_translate_pruning():
    with pytest.raises(ParameterError):
        dehn_table(_z2(2), 1, 8, weighted=True, prune_translates=True)
    assert dehn_table(_z2(2), 1, 8, weighted=True, prune_translates=False).values[8] == 4


def test_plain_and_weighted_tables_are_equivalent():
    X = _z2(2)
    plain = dehn_table(X, 1, 8)
    weighted = dehn_table(X, 1, 10, weighted=True)
    assert dominates(plain, weighted) == (0, 0, 0, 0, 4)
    assert dominates(weighted, plain) == (0, 0, 0, 0, 4)
    assert equivalent(plain, weighted).equivalent


def test_tables_to_ten_dominate_each_other():
    X = _z2(2)
    plain = dehn_table(X, 1, 10)
    weighted = dehn_table(X, 1, 10, weighted=True)
    report = equivalent(plain, weighted)
    assert report.equivalent
    assert report.f_dominated_by_g is not None
    assert report.g_dominated_by_f is not None


def test_domination_on_formula_tables():
    square = [n * n for n in range(21)]
    cube = [n ** 3 for n in range(21)]
    exp = [2 ** n for n in range(21)]
    assert dominates(square, square) == (1, 1, 0, 0, 0)
    assert dominates(exp, cube) is None
    assert dominates(cube, exp) == (3, 1, 0, 5, 4)
    assert not equivalent(exp, cube).equivalent
    assert dominates(exp[:13], cube[:13], box=4) == (3, 1, 0, 0, 1)


def test_poly_bound_fit():
    fit = poly_bound_fit([n * n for n in range(11)])
    assert fit.degree == 2
    assert fit.coefficient == "1"
    measured = poly_bound_fit([0, 0, 0, 0, 1, 1, 2, 2, 4, 4, 6, 6, 9])
    assert measured.degree == 2
    assert measured.coefficient == "1/16"
    assert poly_bound_fit([0, 0, 0]).degree == 0
    with pytest.raises(InfeasibleInstanceError):
        poly_bound_fit([0, 1, 4])


def test_bridge_inequalities_hold_on_z2():
    X = _z2(2)
    plain = dehn_table(X, 1, 10)
    weighted = dehn_table(X, 1, 10, weighted=True)
    report = bridge_check(X, plain, weighted)
    assert report.violations == []
    assert report.converse_checked > 0


def test_bridge_inequalities_hold_at_radius_three():
    X = _z2(3)
    plain = dehn_table(X, 1, 8)
    weighted = dehn_table(X, 1, 10, weighted=True)
    report = bridge_check(X, plain, weighted)
    assert report.violations == []
    assert report.converse_checked > 0
    assert report.forward_checked > 0


def test_tables_grow_with_radius():
    tables = [dehn_table(_z2(R), 1, 8) for R in (2, 3)]
    report = compare_tables_over_radii(tables)
    assert report.radii == [2, 3]
    assert report.nondecreasing


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
