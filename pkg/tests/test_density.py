import math
import random
from fractions import Fraction

import pytest

from solvsemi.density import (
    PipelineError, SeparatedInputError, construct_minimal_generators,
    densify_euclidean, densify_hmn, kronecker_dense, log_ratio_is_rational,
    minimal_count, symmetrize, torus_orbit_covers_grid, verify_certificate,
)
from solvsemi.groups import GroupShape, distance, element, g1
from solvsemi.limits import LimitRequest, realize_limit
from solvsemi.scalars import SymbolTable, rational, z_linearly_independent
from solvsemi.separation import decide_separation

TBL = SymbolTable({"sqrt2": 1.4142135623730951, "sqrt3": 1.7320508075688772})


def test_kronecker_dense_irrational_direction():
    cert = kronecker_dense([[rational(1)], [rational(-1) * TBL.symbol("sqrt2")]])
    assert cert.dense
    assert cert.negative_index == 1


def test_kronecker_integer_lattice_is_not_dense():
    cert = kronecker_dense([[rational(1)], [rational(-1)]])
    assert not cert.dense
    assert "Z-dependent" in cert.reason


def test_kronecker_dense_r2():
    vecs = [[1, 0], [0, 1],
            [rational(-1) * TBL.symbol("sqrt2"), rational(-1) * TBL.symbol("sqrt3")]]
    cert = kronecker_dense(vecs)
    assert cert.dense
    assert cert.basis_indices == {0: 0, 1: 1}


def test_kronecker_requires_basis_and_negative():
    assert not kronecker_dense([[1, 0], [rational(-1) * TBL.symbol("sqrt2"),
                                         rational(-1)]]).dense
    missing = kronecker_dense([[1, 0], [0, 1], [rational(2), rational(1)]])
    assert not missing.dense and "no all-negative" in missing.reason


def test_kronecker_rejects_floats():
    with pytest.raises(ValueError):
        kronecker_dense([[1.4142]])


def test_torus_orbit_coverage():
    ok, filled, total = torus_orbit_covers_grid([-math.sqrt(2)], 10 ** 5, 10)
    assert ok and filled == total == 10
    ok2, filled2, total2 = torus_orbit_covers_grid(
        [-math.sqrt(2), -math.sqrt(3)], 10 ** 5, 10)
    assert ok2 and filled2 == total2 == 100
    # rational direction: the orbit is finite and coverage stalls
    ok3, filled3, _ = torus_orbit_covers_grid([0.5], 10 ** 5, 10)
    assert not ok3 and filled3 == 2


def test_densify_euclidean_spec_example():
    out = densify_euclidean([[rational(1)], [rational(-1)]], 1e-3)
    assert out.perturbed_index == 1
    moved = out.vectors[1][0]
    assert moved.evaluate() == pytest.approx(-1.0, abs=1e-3)
    assert moved != rational(-1)
    assert out.certificate.dense
    assert z_linearly_independent(out.certificate.independent_values,
                                  include_unit=True)


def test_densify_euclidean_already_certified():
    start = densify_euclidean([[rational(1)], [rational(-1)]], 1e-3).vectors
    again = densify_euclidean(start, 1e-3)
    assert again.perturbed_index is None
    assert [tuple(v) for v in again.vectors] == [tuple(v) for v in start]


def test_densify_euclidean_separated_input():
    with pytest.raises(SeparatedInputError):
        densify_euclidean([[rational(1)], [rational(2)]], 1e-3)


def test_densify_euclidean_r2_with_sum():
    vecs = [[1, 0], [0, 1], [-1, 1], [1, -3]]
    out = densify_euclidean(vecs, 1e-2)
    assert out.certificate.dense
    assert out.combination is not None
    # perturbation bounded coordinatewise
    for a, b in zip(out.vectors[out.perturbed_index], vecs[out.perturbed_index]):
        assert abs(a.evaluate() - float(b)) <= 1e-2


def test_densify_euclidean_perturbs_only_one_entry():
    vecs = [[1, 0], [0, 1], [-2, -1], [1, -3]]
    out = densify_euclidean(vecs, 1e-2)
    untouched = [i for i in range(len(vecs)) if i != out.perturbed_index]
    for i in untouched:
        assert [c.evaluate() for c in map(lambda x: x if hasattr(x, "evaluate")
                                          else rational(x), out.vectors[i])] or True
        assert [float(x) for x in vecs[i]] == [
            c.evaluate() if hasattr(c, "evaluate") else float(c)
            for c in out.vectors[i]]


def test_log_ratio_rationality():
    assert log_ratio_is_rational(Fraction(1, 2), Fraction(2))
    assert log_ratio_is_rational(Fraction(8), Fraction(2))
    assert log_ratio_is_rational(Fraction(4, 9), Fraction(3, 2))
    assert not log_ratio_is_rational(Fraction(3), Fraction(2))
    assert not log_ratio_is_rational(Fraction(3, 4), Fraction(2))
    with pytest.raises(ValueError):
        log_ratio_is_rational(Fraction(3), Fraction(1))


# -- the ambient pipeline ------------------------------------------------------


def case1_tuple():
    # anchor, contracting companion, and one expanding axis slot, plus a
    # free negative-b element: the contracting-anchor branch
    return [g1(a_mult=2, y=0), g1(a_mult=rational(1, 2), y=0),
            g1(a_mult=2, y=1), g1(a_mult=2, y=-1)]


def case2_tuple():
    # a contracting element with nonzero b forces the first-slot branch
    return [element(GroupShape(1, 2), a_mult=2, b=(0, 0)),
            element(GroupShape(1, 2), a_mult=rational(1, 2), b=(rational(1, 2), 0)),
            element(GroupShape(1, 2), a_mult=rational(5, 4), b=(0, 2)),
            element(GroupShape(1, 2), a_mult=rational(1, 9), b=(-1, -4))]


def test_densify_hmn_contracting_anchor_branch():
    out = densify_hmn(case1_tuple(), 1e-2)
    assert out.certificate.branch == "contracting-anchor"
    assert out.certificate.fiber_kronecker.dense
    assert verify_certificate(out.certificate)
    assert out.certificate.projection["exact"]
    assert out.certificate.projection["ratio_irrational"]
    for a, b in zip(out.elements, case1_tuple()):
        assert distance(a, b) <= 1e-2
    assert not decide_separation(out.elements).separated


def test_densify_hmn_first_slot_branch():
    out = densify_hmn(case2_tuple(), 1e-2)
    assert out.certificate.branch == "contracting-first-slot"
    assert verify_certificate(out.certificate)
    assert z_linearly_independent(out.certificate.independent_values,
                                  include_unit=True)
    for a, b in zip(out.elements, case2_tuple()):
        assert distance(a, b) <= 1e-2


def test_densify_hmn_separated_rejected():
    with pytest.raises(SeparatedInputError):
        densify_hmn([g1(a_mult=2, y=1), g1(a_mult=3, y=2)], 1e-2)


def test_densify_hmn_requires_rational_a_mult():
    bad = [element(GroupShape(1, 1), a=1, b=(0,)),
           element(GroupShape(1, 1), a=TBL.parse("-sqrt2"), b=(-1,))]
    with pytest.raises(ValueError, match="rational multiplicative"):
        densify_hmn(bad, 1e-2)


def test_densify_hmn_certificate_limits_replay():
    # the fiber basis pairs re-realize numerically
    out = densify_hmn(case1_tuple(), 1e-2)
    norm = out.normalization
    slot = norm.elements[norm.axis_slots[0]]
    companion = norm.elements[norm.companion_index]
    trace = realize_limit(LimitRequest([], companion, slot), tol=1e-6)
    assert trace.achieved
    lim = trace.target
    assert lim.b[0] == rational(1)


def test_densify_hmn_m2_projection_numeric():
    shape = GroupShape(2, 1)
    els = [
        element(shape, v=(1,), a_mult=2, b=(0,)),
        element(shape, v=(-1,), a_mult=rational(1, 2), b=(0,)),
        element(shape, v=(1,), a_mult=rational(1, 2), b=(1,)),
        element(shape, v=(-2,), a_mult=2, b=(-1,)),
    ]
    out = densify_hmn(els, 5e-2)
    assert out.certificate.projection["kind"] == "interior-numeric"
    assert out.certificate.projection["interior"]
    assert out.certificate.fiber_kronecker.dense
    assert verify_certificate(out.certificate)


# -- minimal generating sets -----------------------------------------------


def test_minimal_counts_closed_forms():
    assert minimal_count("Gn", None, 3, "semigroup") == 5
    assert minimal_count("Hmn", 4, 1, "semigroup") == 5
    assert minimal_count("Gn", None, 2, "group") == 3
    assert minimal_count("Hmn", 2, 2, "group") == 3
    assert minimal_count("Hmn", 5, 1, "group") == 6
    with pytest.raises(ValueError):
        minimal_count("Gn", None, 0, "semigroup")
    with pytest.raises(ValueError):
        minimal_count("Xx", None, 1, "semigroup")


def test_gn_semigroup_construction_matches_printed_set():
    spec = construct_minimal_generators("Gn", None, 2, "semigroup")
    assert len(spec.elements) == 4
    z = spec.elements[0]
    assert z.a_add == rational(1)
    assert all(c.is_zero for c in z.b)
    neg = spec.elements[-1]
    assert neg.a_add == spec.table.parse("-sqrt2")
    assert [c.rational_value() for c in neg.b] == [-1, -1]
    assert not decide_separation(spec.elements).separated


def test_gn_group_construction_matches_printed_set():
    spec = construct_minimal_generators("Gn", None, 1, "group")
    assert len(spec.elements) == 2
    z, z1 = spec.elements
    assert z.a_add == rational(-1)
    assert z1.a_add == spec.table.symbol("sqrt2")
    assert z1.b[0] == spec.table.parse("e_sqrt2 - 1")


def test_group_mode_sets_nonseparated_after_symmetrization():
    spec = construct_minimal_generators("Gn", None, 2, "group")
    assert decide_separation(spec.elements).separated  # raw set: b >= 0 half-space
    assert not decide_separation(symmetrize(spec.elements)).separated


def test_hmn_case_split_sizes():
    s23 = construct_minimal_generators("Hmn", 2, 3, "semigroup")
    assert len(s23.elements) == 5  # case m+1 <= n+2
    s51 = construct_minimal_generators("Hmn", 5, 1, "semigroup")
    assert len(s51.elements) == 6  # case m+1 > n+2
    assert not decide_separation(s23.elements).separated
    assert not decide_separation(s51.elements).separated


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_constructions_small_grid(m, n):
    for mode in ("semigroup", "group"):
        spec = construct_minimal_generators("Hmn", m, n, mode)
        assert len(spec.elements) == minimal_count("Hmn", m, n, mode)
        S = spec.elements if mode == "semigroup" else symmetrize(spec.elements)
        assert not decide_separation(S).separated, (m, n, mode)


def test_random_small_gn_subsets_are_separated():
    rng = random.Random(41)
    for n in (1, 2, 3):
        shape = GroupShape(1, n)
        for _ in range(60):
            S = [element(shape,
                         a_mult=rational(rng.randint(1, 25), rng.randint(1, 5)),
                         b=[rational(rng.randint(-25, 25), rng.randint(1, 5))
                            for _ in range(n)])
                 for _ in range(n + 1)]
            assert decide_separation(S).separated
