import math
from fractions import Fraction

import pytest

from solvsemi.explorer import (
    builtin_example, check_predicate, enumerate_words,
    export_boundary_curves_csv, export_orbit_csv, quadrant_witnesses,
)
from solvsemi.groups import GroupShape, g1, identity, product
from solvsemi.scalars import rational
from solvsemi.separation import decide_separation


def ex32_generators():
    return builtin_example("ex32").generators


def test_enumerate_single_generator_powers():
    orbit = enumerate_words([g1(a_mult=2, y=0)], 3)
    got = {(e.element.a_mult.rational_value(), e.element.b[0].rational_value())
           for e in orbit.entries}
    assert got == {(2, 0), (4, 0), (8, 0)}


def test_enumerate_empty_generators():
    orbit = enumerate_words([], 4)
    assert len(orbit) == 0


def test_enumerate_ex32_length_two():
    orbit = enumerate_words(ex32_generators(), 2)
    # 3 generators + 9 distinct length-2 products
    assert len(orbit) == 12
    words2 = [e for e in orbit.entries if len(e.word) == 2]
    assert len(words2) == 9
    vals = {(e.element.a_mult.rational_value(), e.element.b[0].rational_value())
            for e in words2}
    assert (Fraction(4), Fraction(6)) in vals   # b.b
    assert (Fraction(2, 3), Fraction(-2)) in vals  # c.a


def test_enumerate_finds_deeper_composition():
    # a.b.c.a lands on (4/9, -2/3)
    orbit = enumerate_words(ex32_generators(), 4)
    target = g1(a_mult=rational(4, 9), y=rational(-2, 3))
    hits = [e for e in orbit.entries if e.element == target]
    assert hits and len(hits[0].word) == 4
    # a.b.c.a is one witnessing composition
    gens = orbit.generators
    acc = gens[0]
    for i in (1, 2, 0):
        acc = product(acc, gens[i])
    assert acc == target


def test_every_entry_word_reproduces_element():
    orbit = enumerate_words(ex32_generators(), 4)
    gens = orbit.generators
    for entry in orbit.entries:
        acc = gens[entry.word[0]]
        for i in entry.word[1:]:
            acc = product(acc, gens[i])
        assert acc == entry.element


def test_orbit_growth_bound_and_cap():
    orbit = enumerate_words(ex32_generators(), 5)
    assert len(orbit) <= 3 ** 5 * 2
    with pytest.raises(ValueError):
        enumerate_words(ex32_generators(), 13)


def test_projection_commutes_with_enumeration():
    # project G_1 generators to their a_mult line, enumerate, compare
    gens = ex32_generators()
    orbit = enumerate_words(gens, 4)
    projected = sorted({e.element.a_mult.rational_value() for e in orbit.entries})
    proj_gens = [g1(a_mult=x.a_mult, y=0) for x in gens]
    orbit2 = enumerate_words(proj_gens, 4)
    projected2 = sorted({e.element.a_mult.rational_value() for e in orbit2.entries})
    assert projected == projected2


def test_quadrant_witnesses_ex32():
    wit = quadrant_witnesses(ex32_generators(), y_threshold=10, max_length=12)
    assert all(w != "not found" for w in wit.values())
    gens = ex32_generators()
    for quad, word in wit.items():
        acc = gens[word[0]]
        for i in word[1:]:
            acc = product(acc, gens[i])
        y = acc.b[0].evaluate()
        a = acc.a_mult.evaluate()
        assert abs(y) > 10
        assert {"I": (a > 1, y > 0), "II": (a < 1, y > 0),
                "III": (a < 1, y < 0), "IV": (a > 1, y < 0)}[quad] == (True, True)


def test_quadrant_witnesses_ex33():
    ex = builtin_example("ex33")
    wit = quadrant_witnesses(ex.generators, y_threshold=5, max_length=12)
    assert all(w != "not found" for w in wit.values())


def test_quadrant_witnesses_reject_separated():
    with pytest.raises(ValueError, match="separated"):
        quadrant_witnesses([g1(a_mult=2, y=1)], 10, 6)


def test_builtin_sets_are_nonseparated():
    for name in ("ex31", "ex32", "ex33"):
        ex = builtin_example(name)
        assert not decide_separation(ex.generators).separated, name


def test_builtin_unknown_name():
    with pytest.raises(ValueError):
        builtin_example("ex99")


@pytest.mark.parametrize("name,length", [("ex31", 4), ("ex32", 6), ("ex33", 6)])
def test_builtin_predicates_pass_and_exclude_inverse(name, length):
    ex = builtin_example(name)
    orbit = enumerate_words(ex.generators, length)
    report = check_predicate(orbit, ex.predicate, ex.excluded)
    assert report.all_pass
    assert report.excluded_fails
    assert report.closure_pairs > 0


def test_ex32_excluded_is_three():
    ex = builtin_example("ex32")
    assert ex.excluded == g1(a_mult=3, y=0)
    assert not ex.predicate.holds(ex.excluded)


def test_ex33_paper_inverse():
    ex = builtin_example("ex33")
    inv = ex.excluded
    assert inv.a_mult == rational(1, 2)
    assert inv.b[0].coefficient("sqrt3") == Fraction(-1, 2)
    assert ex.predicate.holds(ex.generators[1])
    assert not ex.predicate.holds(inv)


def test_ex31_predicate_closed_under_addition():
    ex = builtin_example("ex31")
    x, y = ex.generators[0], ex.generators[1]
    assert ex.predicate.holds(product(x, y))
    assert not ex.predicate.holds(ex.excluded)


def test_planted_violation_is_reported():
    ex = builtin_example("ex32")
    bad = g1(a_mult=5, y=0)  # 5 is not of the form 2^p/3^q
    orbit = enumerate_words(ex.generators + [bad], 2)
    report = check_predicate(orbit, ex.predicate, ex.excluded)
    assert not report.all_pass
    assert any(word == (3,) for word, _ in report.violations)


def test_export_orbit_csv(tmp_path):
    orbit = enumerate_words(ex32_generators(), 3)
    out = tmp_path / "orbit.csv"
    export_orbit_csv(orbit, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,y,tag,word"
    assert len(lines) == len(orbit) + 1
    assert any(",0.1" not in l for l in lines)


def test_export_empty_orbit(tmp_path):
    out = tmp_path / "empty.csv"
    export_orbit_csv(enumerate_words([], 3), out)
    assert out.read_text().strip() == "x,y,tag,word"


def test_export_boundary_curves(tmp_path):
    out = tmp_path / "curves.csv"
    export_boundary_curves_csv([-2, 0, 1.5], out, window=(-2.5, 0.9), samples=400)
    lines = out.read_text().strip().splitlines()
    # 3 curves * 400 samples + 400 border points + header
    assert len(lines) == 3 * 400 + 400 + 1
    slope_rows = [l for l in lines if l.endswith("slope=1.5")]
    x, y, _ = slope_rows[0].split(",")
    assert float(y) == pytest.approx(1.5 * (math.exp(float(x)) - 1.0))


def test_orbit_cloud_covers_all_quadrants(tmp_path):
    orbit = enumerate_words(ex32_generators(), 8)
    tags = {quad for quad in
            (l.split(",")[2] for l in _csv_rows(orbit, tmp_path))}
    assert {"I", "II", "III", "IV"} <= tags


def _csv_rows(orbit, tmp_path):
    out = tmp_path / "cloud.csv"
    export_orbit_csv(orbit, out)
    return out.read_text().strip().splitlines()[1:]
