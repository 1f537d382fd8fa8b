import os
import sys
from pathlib import Path

sys.path.append(os.getcwd())

import pytest

from app.crud.presentation_crud import load_presentation
from app.errors import EngineValidationError, PresentationParseError, UnknownGeneratorError
from app.services.words_service import (
    coset_key, cyclic_reduce, distance, format_word, free_reduce, get_engine, inverse, multiply,
    normal_form, parse_presentation, parse_word, word_length, word_length_status
)

Z2 = "generators: a b\nrelators: abAB\n"
F2 = "generators: a b\n"


def test_free_reduction_and_inverse():
    assert free_reduce((1, 2, -2, -1, 1)) == (1,)
    assert inverse((1, 2, -1)) == (1, -2, -1)
    assert multiply((1, 2), (-2, 3)) == (1, 3)
    core, k = cyclic_reduce((2, 1, 1, -2))
    assert core == (1, 1) and k == 1


def test_parse_presentation_reads_subgroups_and_comments():
    p = parse_presentation("# torus\ngenerators: a b\nrelators: abAB\nsubgroup H: a\nsubgroup K: b\n")
    assert p.generator_names == ("a", "b")
    assert p.relators == ((1, 2, -1, -2),)
    assert [s.name for s in p.subgroups] == ["H", "K"]
    assert p.subgroup("K").generators == (2,)


def test_parse_errors():
    with pytest.raises(PresentationParseError):
        parse_presentation("relators: abAB\n")
    with pytest.raises(UnknownGeneratorError):
        parse_presentation("generators: a\nrelators: ab\n")
    with pytest.raises(PresentationParseError):
        parse_presentation("generators: a a\n")
    with pytest.raises(PresentationParseError):
        parse_presentation("generators: a b\nrelators: aAb\n")
    with pytest.raises(PresentationParseError):
        parse_presentation("generators: a b\ncolour: blue\n")


def test_identity_spellings():
    p = parse_presentation(Z2)
    assert parse_word(p, "e") == ()
    assert parse_word(p, "") == ()
    assert format_word(p, ()) == "e"


def test_free_abelian_normal_form():
    p = parse_presentation(Z2)
    assert get_engine(p).strategy == "free-abelian"
    assert normal_form(p, parse_word(p, "ba")) == (1, 2)
    assert format_word(p, normal_form(p, parse_word(p, "bAbA"))) == "AAbb"
    assert normal_form(p, parse_word(p, "abAB")) == ()


def test_free_group_normal_form():
    p = parse_presentation(F2)
    assert get_engine(p).strategy == "free"
    assert normal_form(p, parse_word(p, "aAb")) == (2,)
    assert normal_form(p, parse_word(p, "ab")) != normal_form(p, parse_word(p, "ba"))


def test_free_product_of_abelian_blocks():
    p = parse_presentation("generators: a b c\nrelators: abAB\n")
    assert get_engine(p).strategy == "free-abelian-product"
    assert format_word(p, normal_form(p, parse_word(p, "cbac"))) == "cabc"
    assert normal_form(p, parse_word(p, "cC")) == ()


def test_lengths_and_distance():
    p = parse_presentation(Z2)
    assert word_length(p, parse_word(p, "abab")) == 4
    assert word_length(p, parse_word(p, "abAB")) == 0
    assert distance(p, (1,), (2,)) == 2
    assert word_length_status(p, (1, 1)) == (2, True)


def test_coset_keys():
    z2 = parse_presentation(Z2)
    assert coset_key(z2, (1, 1, 2), {1}) == (2,)
    assert coset_key(z2, (2, 1), {1}) == coset_key(z2, (2,), {1})
    f2 = parse_presentation(F2)
    assert coset_key(f2, (2, 1, 1), {1}) == (2,)
    assert coset_key(f2, (1, 2), {1}) == (1, 2)


def test_engine_cannot_be_inferred_for_torsion():
    p = parse_presentation("generators: a\nrelators: aaa\n")
    with pytest.raises(EngineValidationError):
        get_engine(p)


def test_rewriting_engine_for_cyclic_group_of_order_two():
    p = parse_presentation("generators: a\nrelators: aa\nrule: aa -> e\nrule: A -> a\n")
    engine = get_engine(p)
    assert engine.strategy == "rewriting"
    assert not engine.geodesic
    assert normal_form(p, (1, 1, 1)) == (1,)
    assert normal_form(p, (-1,)) == (1,)
    assert word_length(p, (1, 1, 1)) == 1


def test_bundled_presentations_load():
    folder = Path(__file__).resolve().parent / "presentations"
    files = sorted(folder.glob("*.grp"))
    assert len(files) >= 5
    for path in files:
        p, digest = load_presentation(str(path))
        assert len(digest) == 64
        for r in p.relators:
            assert normal_form(p, r) == ()


def test_cyclic_group_of_order_three():
    p, _ = load_presentation(str(Path(__file__).resolve().parent / "presentations" / "z3_cyclic.grp"))
    assert normal_form(p, (1, 1)) == (-1,)
    assert normal_form(p, (1, 1, 1, 1)) == (1,)
    assert word_length(p, (1, 1)) == 1


def test_rewriting_rule_must_decrease():
    p = parse_presentation("generators: a\nrelators: aa\nrule: a -> aa\n")
    with pytest.raises(EngineValidationError):
        get_engine(p)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
