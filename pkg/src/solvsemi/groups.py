"""Elements and operations of the solvable groups R^(m-1) x G_n.

The multiplicative model is primary: an element is (v, a_mult, b) with
v in R^(m-1), a_mult > 0 the multiplicative first coordinate of G_n and
b in R^n; the product is

    (v, a, b) . (v', a', b') = (v + v', a * a', b + a * b').

Elements built from an additive first coordinate keep that exact value in
``a_add`` alongside the float ``a_mult``; products and powers propagate it
exactly (sums), which keeps projections to the abelianization exact even
when a_mult is transcendental.

All values are immutable and operations are pure; everything here is safe
to share across threads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import qlinalg
from .scalars import Scalar, as_scalar, rational, LeavesSpanError


class GroupShape(NamedTuple):
    m: int
    n: int


def _check_shape(shape: GroupShape):
    if shape.m < 1 or shape.n < 1:
        raise ValueError(f"shape needs m >= 1 and n >= 1, got {shape}")


def _as_scalar_tuple(xs) -> tuple:
    return tuple(as_scalar(x) for x in xs)


class GroupElement:
    __slots__ = ("shape", "v", "a_mult", "b", "a_add")

    def __init__(self, shape: GroupShape, v, a_mult, b, a_add: Optional[Scalar] = None):
        shape = GroupShape(*shape)
        _check_shape(shape)
        v = _as_scalar_tuple(v)
        b = _as_scalar_tuple(b)
        a_mult = as_scalar(a_mult)
        if len(v) != shape.m - 1:
            raise ValueError(f"v has length {len(v)}, expected {shape.m - 1}")
        if len(b) != shape.n:
            raise ValueError(f"b has length {len(b)}, expected {shape.n}")
        if a_mult.sign() <= 0:
            raise ValueError("a_mult must be strictly positive")
        self.shape = shape
        self.v = v
        self.a_mult = a_mult
        self.b = b
        self.a_add = a_add

    def a_additive(self) -> float:
        """Additive first coordinate ln(a_mult), exact value preferred."""
        if self.a_add is not None:
            return self.a_add.evaluate()
        return math.log(self.a_mult.evaluate())

    @property
    def is_exact(self) -> bool:
        return self.a_mult.is_exact and all(s.is_exact for s in self.v + self.b)

    def demote_to_float(self) -> "GroupElement":
        return GroupElement(self.shape,
                            [s.to_float() for s in self.v],
                            self.a_mult.to_float(),
                            [s.to_float() for s in self.b])

    def key(self):
        """Hashable identity key; floats rounded to 1e-12 for dedup."""
        def skey(s: Scalar):
            if s.is_exact:
                return ("E", frozenset(s.coeffs.items()))
            return ("F", round(s.value, 12))
        return (self.shape, tuple(skey(s) for s in self.v), skey(self.a_mult),
                tuple(skey(s) for s in self.b))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return (self.shape == other.shape and self.v == other.v
                and self.a_mult == other.a_mult and self.b == other.b)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        vs = ", ".join(str(s) for s in self.v)
        bs = ", ".join(str(s) for s in self.b)
        return f"GroupElement(v=({vs}), a_mult={self.a_mult}, b=({bs}))"


class AlgebraElement:
    __slots__ = ("shape", "v", "a", "b")

    def __init__(self, shape: GroupShape, v, a, b):
        shape = GroupShape(*shape)
        _check_shape(shape)
        self.shape = shape
        self.v = _as_scalar_tuple(v)
        self.a = as_scalar(a)
        self.b = _as_scalar_tuple(b)
        if len(self.v) != shape.m - 1 or len(self.b) != shape.n:
            raise ValueError("vector lengths do not match shape")

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.shape == other.shape and self.v == other.v
                and self.a == other.a and self.b == other.b)

    def __repr__(self):
        vs = ", ".join(str(s) for s in self.v)
        bs = ", ".join(str(s) for s in self.b)
        return f"AlgebraElement(v=({vs}), a={self.a}, b=({bs}))"


def element(shape, v=(), a_mult=None, a=None, b=(), table=None) -> GroupElement:
    """Build an element from either first-coordinate convention.

    ``a_mult`` gives the multiplicative coordinate directly; ``a`` gives the
    additive one (kept exactly in ``a_add``, with a float a_mult = e^a).
    """
    shape = GroupShape(*shape)
    if (a_mult is None) == (a is None):
        raise ValueError("give exactly one of a_mult or a")
    if a_mult is not None:
        return GroupElement(shape, v, a_mult, b)
    a = as_scalar(a)
    if a.is_exact and a.is_zero:
        return GroupElement(shape, v, rational(1), b, a_add=a)
    return GroupElement(shape, v, Scalar.from_float(math.exp(a.evaluate())), b, a_add=a)


def identity(shape) -> GroupElement:
    shape = GroupShape(*shape)
    zero = rational(0)
    return GroupElement(shape, (zero,) * (shape.m - 1), rational(1),
                        (zero,) * shape.n, a_add=rational(0))


def g1(a_mult=None, y=0, a=None) -> GroupElement:
    """Convenience constructor for G_1 = H_11 elements."""
    return element(GroupShape(1, 1), v=(), a_mult=a_mult, a=a, b=(y,))


def _combine_a_add(x: GroupElement, y: GroupElement, op):
    if x.a_add is not None and y.a_add is not None:
        return op(x.a_add, y.a_add)
    return None


def product(x: GroupElement, y: GroupElement) -> GroupElement:
    """Group product (v + v', a*a', b + a*b')."""
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    v = tuple(p + q for p, q in zip(x.v, y.v))
    a_mult = x.a_mult * y.a_mult
    b = tuple(p + x.a_mult * q for p, q in zip(x.b, y.b))
    return GroupElement(x.shape, v, a_mult, b,
                        a_add=_combine_a_add(x, y, lambda p, q: p + q))


def inverse(x: GroupElement) -> GroupElement:
    """(-v, 1/a_mult, -b/a_mult); raises LeavesSpanError for span a_mult."""
    v = tuple(-s for s in x.v)
    a_mult = rational(1) / x.a_mult
    b = tuple(-(s / x.a_mult) for s in x.b)
    a_add = None if x.a_add is None else -x.a_add
    return GroupElement(x.shape, v, a_mult, b, a_add=a_add)


def power(x: GroupElement, t: int) -> GroupElement:
    """x^t by the closed form (t v, a^t, b (1 - a^t)/(1 - a)), exact t at a=1."""
    if not isinstance(t, int):
        raise TypeError("power takes an integer exponent")
    if t == 0:
        return identity(x.shape)
    tq = rational(t)
    v = tuple(tq * s for s in x.v)
    a_add = None if x.a_add is None else tq * x.a_add
    if x.a_mult == rational(1):
        return GroupElement(x.shape, v, x.a_mult, tuple(tq * s for s in x.b), a_add=a_add)
    a_t = x.a_mult ** t
    frac = (rational(1) - a_t) / (rational(1) - x.a_mult)
    b = tuple(frac * s for s in x.b)
    return GroupElement(x.shape, v, a_t, b, a_add=a_add)


def distance(x: GroupElement, y: GroupElement) -> float:
    """Max absolute coordinate difference (v..., a_mult, b...) in float."""
    if x.shape != y.shape:
        raise ValueError("shape mismatch")
    coords = list(zip(x.v, y.v)) + [(x.a_mult, y.a_mult)] + list(zip(x.b, y.b))
    return max(abs(p.evaluate() - q.evaluate()) for p, q in coords)


# -- exp / log -------------------------------------------------------------

_SERIES_CUT = 1e-4


def _expm1_over(a: float) -> float:
    """(e^a - 1)/a with the removable singularity handled by series.

    For |a| < 1e-4 the truncated series through a^6 has remainder below
    1e-28; otherwise math.expm1 is accurate.
    """
    if a == 0.0:
        return 1.0
    if abs(a) < _SERIES_CUT:
        return (1.0 + a * (1.0 / 2 + a * (1.0 / 6 + a * (1.0 / 24 + a *
                (1.0 / 120 + a * (1.0 / 720 + a / 5040))))))
    return math.expm1(a) / a


def exp_map(x: AlgebraElement) -> GroupElement:
    """Group exponential: (v, a, b) -> (v, e^a, b (e^a - 1)/a); b kept at a = 0."""
    if x.a.is_exact and x.a.is_zero:
        return GroupElement(x.shape, x.v, rational(1), x.b, a_add=rational(0))
    a = x.a.evaluate()
    scale = Scalar.from_float(_expm1_over(a))
    b = tuple(s * scale for s in x.b)
    return GroupElement(x.shape, x.v, Scalar.from_float(math.exp(a)), b, a_add=x.a)


def log_map(x: GroupElement) -> AlgebraElement:
    """Inverse of exp_map: (v, a_mult, y) -> (v, ln a_mult, y a/(e^a - 1))."""
    if x.a_mult == rational(1):
        return AlgebraElement(x.shape, x.v, rational(0), x.b)
    a = x.a_additive()
    scale = Scalar.from_float(1.0 / _expm1_over(a))
    b = tuple(s * scale for s in x.b)
    return AlgebraElement(x.shape, x.v, Scalar.from_float(a), b)


# -- structure isomorphism --------------------------------------------------


class StructureIsomorphism:
    """Change of coordinates from a raw semidirect presentation to the model.

    The raw presentation is pairs (w, b), w in R^m, b in R^n, with product
    (w, b)(w', b') = (w + w', b + e^{phi(w)} b') for a nonzero linear
    phi: R^m -> R.  The model coordinates are (v, a, b) with a = phi(w) and
    v the coefficients of w's kernel component in a chosen kernel basis.
    """

    def __init__(self, m: int, n: int, phi: Sequence):
        phi = [as_scalar(p) for p in phi]
        if len(phi) != m:
            raise ValueError(f"phi must have length m = {m}")
        if all(p.is_zero for p in phi):
            raise ValueError("phi = 0: the product is direct and the normalized "
                             "model is degenerate")
        self.shape = GroupShape(m, n)
        self.phi = tuple(phi)
        self._exact = all(p.is_rational for p in phi)
        if self._exact:
            row = [p.rational_value() for p in phi]
            kernel = qlinalg.nullspace([row])
            j = next(i for i, c in enumerate(row) if c != 0)
            h = [Fraction(0)] * m
            h[j] = Fraction(1) / row[j]  # phi(h) = 1
            cols = kernel + [h]
            self._basis_inv = qlinalg.invert([[cols[c][r] for c in range(m)]
                                              for r in range(m)])
            self.kernel_basis = [tuple(x) for x in kernel]
            self.h = tuple(h)
        else:
            row = np.array([p.evaluate() for p in phi])
            _, _, vt = np.linalg.svd(row.reshape(1, -1))
            kernel = vt[1:]
            h = row / float(row @ row)  # phi(h) = 1
            cols = np.column_stack(list(kernel) + [h])
            self._basis_inv = np.linalg.inv(cols)
            self.kernel_basis = [tuple(map(float, k)) for k in kernel]
            self.h = tuple(map(float, h))

    def phi_of(self, w) -> Scalar:
        w = _as_scalar_tuple(w)
        total = rational(0)
        for p, wi in zip(self.phi, w):
            total = total + p * wi
        return total

    def to_model(self, w, b) -> GroupElement:
        """Map a raw pair (w, b) to the normalized (v, a, b) element."""
        w = _as_scalar_tuple(w)
        m = self.shape.m
        a = self.phi_of(w)
        if self._exact and all(x.is_rational for x in w):
            we = [x.rational_value() for x in w]
            coords = [sum(self._basis_inv[r][c] * we[c] for c in range(m))
                      for r in range(m)]
            v = [rational(c) for c in coords[:m - 1]]
        else:
            we = np.array([x.evaluate() for x in w])
            coords = self._basis_inv @ we
            v = [Scalar.from_float(float(c)) for c in coords[:m - 1]]
        return element(self.shape, v=v, a=a, b=b)

    def raw_product(self, x, y):
        """Product in the raw presentation; x, y are (w, b) pairs."""
        wx, bx = _as_scalar_tuple(x[0]), _as_scalar_tuple(x[1])
        wy, by = _as_scalar_tuple(y[0]), _as_scalar_tuple(y[1])
        w = tuple(p + q for p, q in zip(wx, wy))
        scale = Scalar.from_float(math.exp(self.phi_of(wx).evaluate()))
        b = tuple(p + scale * q for p, q in zip(bx, by))
        return (w, b)


def structure_isomorphism(m: int, n: int, phi) -> StructureIsomorphism:
    return StructureIsomorphism(m, n, phi)
