import random
from fractions import Fraction

import pytest

from solvsemi.automorphisms import (
    Composite, NormalizationError, TypeA, TypeB, TypeC, apply,
    inverse_automorphism, normalize_structure, normalizing_type_c,
)
from solvsemi.groups import (
    GroupElement, GroupShape, distance, element, g1, identity, product,
)
from solvsemi.scalars import SymbolTable, rational


def random_element(rng, shape):
    def q():
        return rational(rng.randint(-6, 6), rng.randint(1, 6))
    return GroupElement(shape, [q() for _ in range(shape.m - 1)],
                        rational(rng.randint(1, 8), rng.randint(1, 8)),
                        [q() for _ in range(shape.n)])


def random_automorphism(rng, shape):
    m, n = shape
    kind = rng.choice(["A", "B", "C"] if m > 1 else ["B", "C"])
    if kind == "A":
        while True:
            psi = [[rational(rng.randint(-3, 3)) for _ in range(m - 1)]
                   for _ in range(m - 1)]
            try:
                return TypeA(psi)
            except ValueError:
                continue
    if kind == "B":
        while True:
            psi = [[rational(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
            try:
                return TypeB(psi)
            except ValueError:
                continue
    return TypeC([rational(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(m - 1)],
                 [rational(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)])


def test_type_b_identity_fixes_everything():
    phi = TypeB([[1, 0], [0, 1]])
    x = element(GroupShape(1, 2), a_mult=rational(3, 2), b=(1, 2))
    assert apply(phi, x) == x


def test_type_a_permutation():
    phi = TypeA([[0, 1], [1, 0]])
    x = element(GroupShape(3, 1), v=(1, 2), a_mult=3, b=(5,))
    y = apply(phi, x)
    assert [s.rational_value() for s in y.v] == [2, 1]
    assert y.a_mult == x.a_mult and y.b == x.b


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        TypeB([[1, 2], [2, 4]])


def test_apply_is_homomorphism_exact():
    rng = random.Random(17)
    for shape in [GroupShape(1, 1), GroupShape(2, 2), GroupShape(3, 2)]:
        for _ in range(150):
            phi = random_automorphism(rng, shape)
            x, y = random_element(rng, shape), random_element(rng, shape)
            lhs = apply(phi, product(x, y))
            rhs = product(apply(phi, x), apply(phi, y))
            if lhs.is_exact and rhs.is_exact:
                assert lhs == rhs
            else:
                assert distance(lhs, rhs) < 1e-9


def test_composition_order():
    f = TypeB([[2]])
    g = TypeC((), [rational(1)])
    x = g1(a_mult=3, y=1)
    assert apply(Composite([f, g]), x) == apply(f, apply(g, x))


def test_normalizing_type_c_g1():
    z = g1(a_mult=2, y=3)
    phi = normalizing_type_c(z)
    assert phi.beta[0] == rational(-3)
    out = apply(phi, z)
    assert out.b[0].is_zero


def test_normalizing_type_c_zeroes_v_and_b():
    z = element(GroupShape(2, 1), v=(rational(3),), a_mult=2, b=(rational(5),))
    phi = normalizing_type_c(z)
    out = apply(phi, z)
    assert out.b[0].is_zero
    assert abs(out.v[0].evaluate()) < 1e-12
    assert out.a_mult == z.a_mult


def test_normalizing_type_c_identity_params_for_normalized_input():
    z = element(GroupShape(2, 1), v=(0,), a_mult=2, b=(0,))
    phi = normalizing_type_c(z)
    assert all(a.is_zero for a in phi.alpha)
    assert all(b.is_zero for b in phi.beta)


def test_normalizing_type_c_rejects_unit_a_mult():
    with pytest.raises(ValueError):
        normalizing_type_c(g1(a_mult=1, y=5))


def test_inverse_automorphism_roundtrip():
    rng = random.Random(29)
    shape = GroupShape(2, 2)
    for _ in range(100):
        phi = random_automorphism(rng, shape)
        x = random_element(rng, shape)
        back = apply(inverse_automorphism(phi), apply(phi, x))
        if back.is_exact:
            assert back == x
        else:
            assert distance(back, x) < 1e-9


# -- structure normalization -------------------------------------------------


def normalized_shape_ok(res, n):
    anchor = res.elements[res.anchor_index]
    assert all(s.is_zero for s in anchor.b)
    assert (anchor.a_mult - rational(1)).sign() > 0
    for i, k in enumerate(res.axis_slots, start=1):
        x = res.elements[k]
        c = x.a_mult
        scale = abs(c - rational(1))
        for j in range(n):
            expected = scale if j == i - 1 else rational(0)
            assert x.b[j] == expected or abs(x.b[j].evaluate() - expected.evaluate()) < 1e-12


def test_normalize_structure_already_normalized():
    S = [
        element(GroupShape(1, 2), a_mult=2, b=(0, 0)),
        element(GroupShape(1, 2), a_mult=rational(1, 2), b=(rational(1, 2), 0)),
        element(GroupShape(1, 2), a_mult=rational(1, 3), b=(0, rational(2, 3))),
    ]
    res = normalize_structure(S, 1e-3)
    normalized_shape_ok(res, 2)
    assert res.branch == "contracting-first-slot"
    assert not any(step.op == "perturb-mult-coordinate" for step in res.audit)
    # already of the normalized shape: the set is unchanged
    for x, y in zip(res.elements, S):
        assert x == y


def test_normalize_structure_perturbs_unit_slots():
    S = [
        element(GroupShape(1, 2), a_mult=2, b=(0, 0)),
        element(GroupShape(1, 2), a_mult=rational(1, 2), b=(0, 0)),
        element(GroupShape(1, 2), a_mult=1, b=(1, 0)),
        element(GroupShape(1, 2), a_mult=1, b=(0, 1)),
    ]
    res = normalize_structure(S, 1e-2)
    normalized_shape_ok(res, 2)
    assert res.branch == "contracting-anchor"
    perturbs = [s for s in res.audit if s.op == "perturb-mult-coordinate"]
    assert len(perturbs) == 2
    assert all(abs(s.detail["delta"]) <= Fraction(1, 100) for s in perturbs)
    # normalized output stays within epsilon of the unperturbed image
    for k in res.axis_slots:
        assert abs(res.elements[k].a_mult.evaluate() - 1.0) <= 1e-2


def test_normalize_structure_prop41_shape():
    tbl = SymbolTable({"sqrt2": 1.4142135623730951})
    S = [
        element(GroupShape(1, 2), a=1, b=(0, 0)),
        element(GroupShape(1, 2), a=0, b=(1, 0)),
        element(GroupShape(1, 2), a=0, b=(0, 1)),
        element(GroupShape(1, 2), a=tbl.parse("-sqrt2"), b=(-1, -1)),
    ]
    res = normalize_structure(S, 1e-3)
    # the negative element is the only b != 0 candidate with a_mult < 1,
    # so the first slot contracts
    assert res.branch == "contracting-first-slot"
    ops = [s.op for s in res.audit]
    assert ops.count("shear-normalize") == 1
    assert ops.count("axis-map") == 2


def test_normalize_structure_error_names_step():
    # every element inside the half-space b_1 >= 0, b confined to one axis
    S = [
        element(GroupShape(1, 2), a_mult=2, b=(1, 0)),
        element(GroupShape(1, 2), a_mult=rational(1, 2), b=(1, 0)),
    ]
    with pytest.raises(NormalizationError, match="axis step 2"):
        normalize_structure(S, 1e-3)


def test_normalize_structure_needs_expanding_element():
    S = [element(GroupShape(1, 1), a_mult=rational(1, 2), b=(1,))]
    with pytest.raises(NormalizationError, match="base step"):
        normalize_structure(S, 1e-3)


def test_perturbed_input_maps_onto_result():
    S = [
        element(GroupShape(1, 2), a_mult=2, b=(0, 0)),
        element(GroupShape(1, 2), a_mult=rational(1, 2), b=(0, 0)),
        element(GroupShape(1, 2), a_mult=1, b=(1, 2)),
        element(GroupShape(1, 2), a_mult=3, b=(0, 1)),
    ]
    res = normalize_structure(S, 1e-2)
    for orig, normed in zip(res.perturbed_input, res.elements):
        img = apply(res.automorphism, orig)
        assert distance(img, normed) < 1e-9
