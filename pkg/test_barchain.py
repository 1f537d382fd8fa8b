import os
import sys

sys.path.append(os.getcwd())

import numpy as np
import pytest

from app.errors import ParameterError
from app.services.barchain_service import (
    BarChain, analyze_chain, bar_boundary, bar_chain, bar_norm, bar_selftest, chain_record, cone,
    parse_bar_chain, random_bar_chain
)
from app.services.words_service import parse_presentation

Z2 = parse_presentation("generators: a b\nrelators: abAB\n")
F2 = parse_presentation("generators: a b\n")

A, B, AB = (1,), (2,), (1, 2)


def test_boundary_of_an_edge():
    c = bar_chain(Z2, [((A, AB), 1)])
    assert bar_boundary(c).as_dict() == {(AB,): 1, (A,): -1}


def test_degree_zero_maps_to_the_augmentation():
    b = bar_boundary(bar_chain(Z2, [((A,), 2)]))
    assert b.degree == -1
    assert b.as_dict() == {(): 2}
    with pytest.raises(ParameterError):
        bar_boundary(b)


def test_words_are_normalised():
    c = bar_chain(Z2, [(((2, 1),), 1), ((AB,), 1)])
    assert c.as_dict() == {(AB,): 2}


def test_weighted_norms():
    c = bar_chain(Z2, [((A, AB), 1)])
    assert bar_norm(Z2, c, 0) == 1
    assert bar_norm(Z2, c, 1) == 4
    assert bar_norm(Z2, c, 2) == 16
    assert bar_norm(Z2, -c - c, 1) == 8


def test_cone_fills_a_cycle_and_keeps_its_norm():
    cycle = bar_boundary(bar_chain(Z2, [((A, B, AB), 1)]))
    assert bar_boundary(cycle).is_zero()
    coned = cone(cycle)
    assert coned.degree == 2
    assert bar_boundary(coned) == cycle
    for k in range(4):
        assert bar_norm(Z2, coned, k) == bar_norm(Z2, cycle, k)


def test_homotopy_identity_on_a_non_cycle():
    c = bar_chain(F2, [((A, B), 1), ((B, AB), -3)])
    assert bar_boundary(cone(c)) + cone(bar_boundary(c)) == c
    report = analyze_chain(F2, c, k_max=2)
    assert report.homotopy_identity
    assert not report.is_cycle
    assert not report.cone_fills
    assert sorted(report.norms) == [0, 1, 2]


def test_boundary_squared_vanishes_on_random_chains():
    rng = np.random.default_rng(3)
    for degree in (1, 2, 3):
        c = random_bar_chain(Z2, degree, rng)
        assert bar_boundary(bar_boundary(c)).is_zero()


def test_adding_to_the_zero_chain_keeps_the_degree():
    c = bar_chain(Z2, [((A, B), 1)])
    assert (BarChain(0) + c).degree == 1


def test_parse_chain_text():
    c = parse_bar_chain(Z2, "[a,ab] - 2[b,e]")
    assert c.as_dict() == {(A, AB): 1, (B, ()): -2}
    record = chain_record(Z2, c)
    assert record.model_dump(by_alias=True)["terms"][0]["tuple"] == ["a", "ab"]


def test_unreadable_chain_text():
    with pytest.raises(ParameterError):
        parse_bar_chain(Z2, "[a,b")
    with pytest.raises(ParameterError):
        parse_bar_chain(Z2, "[a] + [a,b]")
    with pytest.raises(ParameterError):
        parse_bar_chain(Z2, "")


def test_selftest_passes():
    report = bar_selftest(Z2, samples=50, seed=1)
    assert report.passed
    assert report.failures == []
    assert report.cycles_checked == 50
    assert report.noncycles_checked == 50
    assert bar_selftest(F2, samples=20, seed=2).passed


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
