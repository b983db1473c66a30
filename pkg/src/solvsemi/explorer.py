"""Bounded word enumeration, the built-in example semigroups, and exports.

Words over a finite generator list are explored breadth-first by length,
deduplicating elements (exactly in exact mode, at 1e-12 rounding for
floats) and keeping the shortest witnessing word for each element.  The
built-in examples come with a product-closed predicate that holds on all
generators but fails on a named generator's inverse: the machine form of
"this semigroup is not a group".

The BFS frontier could be sharded across threads and merged; orderings are
canonical, so results are deterministic either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .groups import GroupElement, GroupShape, element, g1, inverse, product
from .scalars import Scalar, SymbolTable, rational
from .separation import decide_separation, quadrant_of

__all__ = [
    "WordOrbit", "OrbitEntry", "enumerate_words", "quadrant_witnesses",
    "SemigroupPredicate", "BuiltinExample", "builtin_example",
    "check_predicate", "PredicateReport", "export_orbit_csv",
    "export_boundary_curves_csv", "MAX_LENGTH_CAP",
]

MAX_LENGTH_CAP = 12


@dataclass
class OrbitEntry:
    element: GroupElement
    word: Tuple[int, ...]   # generator indices, shortest witness


@dataclass
class WordOrbit:
    generators: List[GroupElement]
    max_length: int
    entries: List[OrbitEntry]

    def elements(self) -> List[GroupElement]:
        return [e.element for e in self.entries]

    def __len__(self):
        return len(self.entries)


def enumerate_words(generators: Sequence[GroupElement], max_length: int,
                    cap: int = MAX_LENGTH_CAP) -> WordOrbit:
    """BFS over words by length with exact products and deduplication."""
    if max_length > cap:
        raise ValueError(f"max_length {max_length} exceeds the cap {cap}")
    generators = list(generators)
    seen: Dict[object, OrbitEntry] = {}
    entries: List[OrbitEntry] = []
    frontier: List[OrbitEntry] = []
    for i, gen in enumerate(generators):
        entry = OrbitEntry(gen, (i,))
        key = gen.key()
        if key not in seen:
            seen[key] = entry
            entries.append(entry)
            frontier.append(entry)
    length = 1
    while length < max_length and frontier:
        nxt: List[OrbitEntry] = []
        for entry in frontier:
            for i, gen in enumerate(generators):
                el = product(entry.element, gen)
                key = el.key()
                if key in seen:
                    continue
                new = OrbitEntry(el, entry.word + (i,))
                seen[key] = new
                entries.append(new)
                nxt.append(new)
        frontier = nxt
        length += 1
    return WordOrbit(generators, max_length, entries)


def quadrant_witnesses(generators: Sequence[GroupElement], y_threshold: float,
                       max_length: int, cap: int = MAX_LENGTH_CAP):
    """Words reaching each open G_1 quadrant with |y| above the threshold.

    The generator set must be nonseparated, otherwise some quadrant is
    provably unreachable and the search is refused.
    """
    generators = list(generators)
    if any(x.shape != GroupShape(1, 1) for x in generators):
        raise ValueError("quadrant witnesses are a G_1 notion")
    if decide_separation(generators).separated:
        raise ValueError("separated generator set: unbounded quadrant "
                         "occupation is not guaranteed")
    if max_length > cap:
        raise ValueError(f"max_length {max_length} exceeds the cap {cap}")
    found: Dict[str, Tuple[int, ...]] = {}

    def visit(entry: OrbitEntry) -> bool:
        q = quadrant_of(entry.element)
        if q != "boundary" and q not in found \
                and abs(entry.element.b[0].evaluate()) > y_threshold:
            found[q] = entry.word
        return len(found) == 4

    # incremental BFS: stop as soon as all four quadrants are witnessed
    seen = set()
    frontier: List[OrbitEntry] = []
    done = False
    for i, gen in enumerate(generators):
        key = gen.key()
        if key not in seen:
            seen.add(key)
            entry = OrbitEntry(gen, (i,))
            frontier.append(entry)
            done = done or visit(entry)
    length = 1
    while not done and length < max_length and frontier:
        nxt: List[OrbitEntry] = []
        for entry in frontier:
            if done:
                break
            for i, gen in enumerate(generators):
                el = product(entry.element, gen)
                key = el.key()
                if key in seen:
                    continue
                seen.add(key)
                new = OrbitEntry(el, entry.word + (i,))
                nxt.append(new)
                if visit(new):
                    done = True
                    break
        frontier = nxt
        length += 1
    return {q: found.get(q, "not found") for q in ("I", "II", "III", "IV")}


# -- predicates and built-in examples -----------------------------------------


@dataclass
class SemigroupPredicate:
    name: str
    holds: Callable[[GroupElement], bool]
    description: str = ""


@dataclass
class BuiltinExample:
    name: str
    generators: List[GroupElement]
    predicate: SemigroupPredicate
    excluded: GroupElement      # an inverse of a generator; fails the predicate
    table: SymbolTable
    model: str                  # "additive" | "multiplicative"


def _is_power_of(n: int, p: int) -> Optional[int]:
    if n < 1:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k if n == 1 else None


def _ex31() -> BuiltinExample:
    table = SymbolTable({"sqrt2": 1.4142135623730951})
    shape = GroupShape(1, 1)
    pairs = [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (3, 2)]
    ys = [1, -1, -2, 2, 3, -3]
    gens = []
    for (a, b), y in zip(pairs, ys):
        x = table.rational(-a) + table.rational(b) * table.symbol("sqrt2")
        gens.append(element(shape, a=x, b=(rational(y),)))

    def holds(el: GroupElement) -> bool:
        if el.a_add is None or not el.a_add.is_exact:
            return False
        return (el.a_add.coefficient("one") <= -1
                and el.a_add.coefficient("sqrt2") >= 1)

    pred = SemigroupPredicate(
        "additive-coordinate-pattern", holds,
        "the additive first coordinate is -a + b*sqrt2 with a, b >= 1")
    # a_mult is already a float, so the inverse exists directly; its exact
    # additive coordinate flips sign and breaks the pattern
    return BuiltinExample("ex31", gens, pred, inverse(gens[0]), table, "additive")


def _ex32() -> BuiltinExample:
    table = SymbolTable({})
    gens = [g1(a_mult=rational(1, 3), y=0), g1(a_mult=2, y=2), g1(a_mult=2, y=-2)]

    def holds(el: GroupElement) -> bool:
        if not el.a_mult.is_rational:
            return False
        r = el.a_mult.rational_value()
        p = _is_power_of(r.numerator, 2)
        q = _is_power_of(r.denominator, 3)
        return p is not None and q is not None and (p, q) != (0, 0)

    pred = SemigroupPredicate(
        "power-quotient-coordinate", holds,
        "a_mult = 2^p / 3^q with p, q >= 0 and (p, q) != (0, 0)")
    return BuiltinExample("ex32", gens, pred, inverse(gens[0]), table,
                          "multiplicative")


def _ex33() -> BuiltinExample:
    table = SymbolTable({"sqrt3": 1.7320508075688772})
    gens = [g1(a_mult=rational(1, 2), y=0),
            g1(a_mult=2, y=table.symbol("sqrt3")),
            g1(a_mult=2, y=-1),
            g1(a_mult=1, y=0)]

    def holds(el: GroupElement) -> bool:
        if not el.a_mult.is_rational or not el.b[0].is_exact:
            return False
        r = el.a_mult.rational_value()
        two_power = (_is_power_of(r.numerator, 2) is not None
                     and _is_power_of(r.denominator, 2) is not None)
        return two_power and el.b[0].coefficient("sqrt3") >= 0

    pred = SemigroupPredicate(
        "nonnegative-sqrt3-part", holds,
        "a_mult is a (possibly negative) power of 2 and the sqrt3 "
        "coefficient of y is >= 0; closed under products since a_mult > 0")
    return BuiltinExample("ex33", gens, pred, inverse(gens[1]), table,
                          "multiplicative")


_BUILTINS = {"ex31": _ex31, "ex32": _ex32, "ex33": _ex33}


def builtin_example(name: str) -> BuiltinExample:
    """The three stock nonseparated-but-not-group semigroups."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown example {name!r}; choose from "
                         f"{sorted(_BUILTINS)}") from None


@dataclass
class PredicateReport:
    predicate: str
    checked: int
    closure_pairs: int
    violations: List[Tuple[Tuple[int, ...], str]] = field(default_factory=list)
    excluded_fails: bool = False

    @property
    def all_pass(self) -> bool:
        return not self.violations and self.excluded_fails


def check_predicate(orbit: WordOrbit, predicate: SemigroupPredicate,
                    excluded: GroupElement, pair_cap: int = 20000) -> PredicateReport:
    """Verify the predicate on the orbit, its closure on pairs, and the
    failure of the excluded element; violations are report content."""
    report = PredicateReport(predicate.name, checked=len(orbit.entries),
                             closure_pairs=0)
    good: List[OrbitEntry] = []
    for entry in orbit.entries:
        if predicate.holds(entry.element):
            good.append(entry)
        else:
            report.violations.append((entry.word, "predicate fails on orbit element"))
    pairs = 0
    for x in good:
        if pairs >= pair_cap:
            break
        for y in good:
            if pairs >= pair_cap:
                break
            pairs += 1
            prod = product(x.element, y.element)
            if not predicate.holds(prod):
                report.violations.append(
                    (x.word + y.word, "closure fails on a product of orbit elements"))
    report.closure_pairs = pairs
    report.excluded_fails = not predicate.holds(excluded)
    return report


# -- CSV exports ---------------------------------------------------------------


def export_orbit_csv(orbit: WordOrbit, path) -> None:
    """Rows (x, y, tag, word) for G_1 orbits or 2-d projections.

    For higher shapes the (a_mult, b_1) projection is exported.
    """
    with open(path, "w") as fh:
        fh.write("x,y,tag,word\n")
        for entry in orbit.entries:
            el = entry.element
            x = el.a_mult.evaluate()
            y = el.b[0].evaluate()
            tag = quadrant_of(el) if el.shape == GroupShape(1, 1) else "projection"
            word = ".".join(str(i) for i in entry.word)
            fh.write(f"{x!r},{y!r},{tag},{word}\n")


def export_boundary_curves_csv(slopes: Sequence[float], path,
                               window: Tuple[float, float] = (-2.5, 0.9),
                               samples: int = 400) -> None:
    """Sample the border curves y = l (e^x - 1) plus the x = 0 border."""
    lo, hi = window
    if samples < 2:
        raise ValueError("need at least two samples")
    with open(path, "w") as fh:
        fh.write("x,y,tag\n")
        for l in slopes:
            for i in range(samples):
                x = lo + (hi - lo) * i / (samples - 1)
                y = float(l) * (math.exp(x) - 1.0)
                fh.write(f"{x!r},{y!r},slope={l}\n")
        span = max(abs(float(l)) for l in slopes) if len(slopes) else 1.0
        for i in range(samples):
            y = -span + 2 * span * i / (samples - 1)
            fh.write(f"0.0,{y!r},border\n")
