"""Automorphisms of R^(m-1) x G_n and the structure normalization.

Three families act on the model coordinates (v, a, b):

* Type A: an invertible matrix on the v part;
* Type B: an invertible matrix on the b part;
* Type C: the shear (v, a, b) -> (v + a*alpha, a, b + (e^a - 1)*beta),
  the group-level form of the Lie algebra map fixing the v and b axes and
  shearing the a-axis direction into them.  It is a homomorphism (checked
  by the test suite on random pairs).

Matrices are stored with Scalar entries.  All exact pipelines keep them
rational; degraded paths may carry float entries and say so in audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import qlinalg
from .scalars import Scalar, as_scalar, rational
from .groups import GroupElement, GroupShape, element

__all__ = [
    "TypeA", "TypeB", "TypeC", "Composite", "apply", "inverse_automorphism",
    "normalizing_type_c", "normalize_structure", "StructureNormalization",
    "AuditStep", "NormalizationError",
]


class NormalizationError(ValueError):
    """A normalization step failed; the message names the step."""


def _matrix(entries):
    rows = tuple(tuple(as_scalar(x) for x in row) for row in entries)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square and nonempty")
    return rows


def _matrix_is_rational(psi) -> bool:
    return all(x.is_rational for row in psi for x in row)


def _check_invertible(psi):
    if _matrix_is_rational(psi):
        d = qlinalg.det([[x.rational_value() for x in row] for row in psi])
        if d == 0:
            raise ValueError("matrix is singular (exact determinant 0)")
    else:
        d = np.linalg.det(np.array([[x.evaluate() for x in row] for row in psi]))
        if abs(d) < 1e-12:
            raise ValueError("matrix is numerically singular")


def _mat_vec(psi, vec):
    out = []
    for row in psi:
        acc = rational(0)
        for c, x in zip(row, vec):
            acc = acc + c * x
        out.append(acc)
    return tuple(out)


def _mat_inverse(psi):
    if _matrix_is_rational(psi):
        inv = qlinalg.invert([[x.rational_value() for x in row] for row in psi])
        if inv is None:
            raise ValueError("matrix is singular")
        return _matrix([[rational(x) for x in row] for row in inv])
    arr = np.array([[x.evaluate() for x in row] for row in psi])
    return _matrix([[Scalar.from_float(float(x)) for x in row]
                    for row in np.linalg.inv(arr)])


class TypeA:
    """Acts by an invertible matrix on the v part, identity elsewhere."""

    def __init__(self, psi):
        self.psi = _matrix(psi)
        _check_invertible(self.psi)

    def __repr__(self):
        return f"TypeA({len(self.psi)}x{len(self.psi)})"


class TypeB:
    """Acts by an invertible matrix on the b part, identity elsewhere."""

    def __init__(self, psi):
        self.psi = _matrix(psi)
        _check_invertible(self.psi)

    def __repr__(self):
        return f"TypeB({len(self.psi)}x{len(self.psi)})"


class TypeC:
    """Shear (v, a, b) -> (v + a*alpha, a, b + (a_mult - 1)*beta)."""

    def __init__(self, alpha: Sequence = (), beta: Sequence = ()):
        self.alpha = tuple(as_scalar(x) for x in alpha)
        self.beta = tuple(as_scalar(x) for x in beta)

    def __repr__(self):
        return f"TypeC(alpha={[str(a) for a in self.alpha]}, beta={[str(b) for b in self.beta]})"


class Composite:
    """Composition; apply(Composite([f, g]), x) = apply(f, apply(g, x))."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("composite automorphism needs at least one part")
        self.parts = parts

    def __repr__(self):
        return f"Composite({self.parts!r})"


def apply(phi, x: GroupElement) -> GroupElement:
    """Apply an automorphism to a group element."""
    if isinstance(phi, Composite):
        for part in reversed(phi.parts):
            x = apply(part, x)
        return x
    if isinstance(phi, TypeA):
        if len(phi.psi) != x.shape.m - 1:
            raise ValueError("Type A matrix size does not match shape")
        return GroupElement(x.shape, _mat_vec(phi.psi, x.v), x.a_mult, x.b,
                            a_add=x.a_add)
    if isinstance(phi, TypeB):
        if len(phi.psi) != x.shape.n:
            raise ValueError("Type B matrix size does not match shape")
        return GroupElement(x.shape, x.v, x.a_mult, _mat_vec(phi.psi, x.b),
                            a_add=x.a_add)
    if isinstance(phi, TypeC):
        if len(phi.alpha) != x.shape.m - 1 or len(phi.beta) != x.shape.n:
            raise ValueError("Type C parameter lengths do not match shape")
        if all(s.is_zero for s in phi.alpha):
            v = x.v
        else:
            a_scalar = x.a_add if x.a_add is not None else Scalar.from_float(
                math.log(x.a_mult.evaluate()))
            v = tuple(vi + a_scalar * ai for vi, ai in zip(x.v, phi.alpha))
        shift = x.a_mult - rational(1)
        b = tuple(bi + shift * bj for bi, bj in zip(x.b, phi.beta))
        return GroupElement(x.shape, v, x.a_mult, b, a_add=x.a_add)
    raise TypeError(f"not an automorphism: {phi!r}")


def inverse_automorphism(phi):
    if isinstance(phi, Composite):
        return Composite([inverse_automorphism(p) for p in reversed(phi.parts)])
    if isinstance(phi, TypeA):
        return TypeA(_mat_inverse(phi.psi))
    if isinstance(phi, TypeB):
        return TypeB(_mat_inverse(phi.psi))
    if isinstance(phi, TypeC):
        return TypeC(tuple(-a for a in phi.alpha), tuple(-b for b in phi.beta))
    raise TypeError(f"not an automorphism: {phi!r}")


def normalizing_type_c(z: GroupElement) -> TypeC:
    """The Type C map sending z = (v, a, b) with a != 0 to (0, a, 0)."""
    shift = z.a_mult - rational(1)
    if shift.is_zero:
        raise ValueError("a_mult = 1: no Type C map normalizes this element "
                         "(the sheared direction has coefficient zero)")
    a = z.a_additive()
    alpha = tuple(-(vi / Scalar.from_float(a)) for vi in z.v)
    beta = tuple(-(bi / shift) for bi in z.b)
    return TypeC(alpha, beta)


# -- structure normalization -------------------------------------------------


@dataclass
class AuditStep:
    op: str
    detail: dict = field(default_factory=dict)


@dataclass
class StructureNormalization:
    automorphism: Composite
    elements: List[GroupElement]          # normalized set, within eps of Phi(S)
    perturbed_input: List[GroupElement]   # S' in the original coordinates
    audit: List[AuditStep]
    branch: str                           # "contracting-anchor" | "contracting-first-slot"
    anchor_index: int                     # index of the a_mult > 1, b = 0 element
    companion_index: Optional[int]        # a_mult < 1, b = 0 element (anchor branch)
    axis_slots: List[int]                 # slot i (1-based) -> element index


def _complete_basis_rational(fixed, w, n):
    """Columns e_1..e_{i-1}, w, then greedily independent unit vectors."""
    cols = [list(f) for f in fixed] + [list(w)]
    for j in range(n):
        if len(cols) == n:
            break
        e = [Fraction(int(k == j)) for k in range(n)]
        if qlinalg.rank(cols + [e]) > len(cols):
            cols.append(e)
    if len(cols) != n:
        return None
    return cols


def _axis_map(b_vec, i, n, audit):
    """Type B matrix fixing e_1..e_{i-1} and sending b_vec to e_i (1-based i)."""
    fixed = [[Fraction(int(k == j)) for k in range(n)] for j in range(i - 1)]
    if all(x.is_rational for x in b_vec):
        w = [x.rational_value() for x in b_vec]
        src = _complete_basis_rational(fixed, w, n)
        if src is None:
            return None
        src_mat = [[src[c][r] for c in range(n)] for r in range(n)]
        src_inv = qlinalg.invert(src_mat)
        # targets: e_1..e_{i-1}, e_i, remaining unit vectors in order
        rest = [j for j in range(n) if j != i - 1][i - 1:]
        tgt_cols = [[Fraction(int(k == j)) for k in range(n)] for j in range(i - 1)]
        tgt_cols.append([Fraction(int(k == i - 1)) for k in range(n)])
        tgt_cols += [[Fraction(int(k == j)) for k in range(n)] for j in rest]
        tgt = [[tgt_cols[c][r] for c in range(n)] for r in range(n)]
        psi = [[sum(tgt[r][k] * src_inv[k][c] for k in range(n)) for c in range(n)]
               for r in range(n)]
        return TypeB([[rational(x) for x in row] for row in psi])
    # float fallback for span-valued candidates
    audit.append(AuditStep("axis-map-float", {"axis": i}))
    w = np.array([x.evaluate() for x in b_vec])
    cols = [np.eye(n)[j] for j in range(i - 1)] + [w]
    for j in range(n):
        if len(cols) == n:
            break
        cand = np.eye(n)[j]
        if np.linalg.matrix_rank(np.column_stack(cols + [cand])) > len(cols):
            cols.append(cand)
    src = np.column_stack(cols)
    rest = [j for j in range(n) if j != i - 1][i - 1:]
    tgt = np.column_stack([np.eye(n)[j] for j in range(i - 1)]
                          + [np.eye(n)[i - 1]]
                          + [np.eye(n)[j] for j in rest])
    psi = tgt @ np.linalg.inv(src)
    return TypeB([[Scalar.from_float(float(x)) for x in row] for row in psi])


def _rational_epsilon(epsilon: float) -> Fraction:
    """Deterministic rational step below epsilon/2 (and below 1/8)."""
    k = 3
    while Fraction(1, 2 ** k) > Fraction(str(min(epsilon / 2, 0.25))):
        k += 1
        if k > 200:
            raise ValueError("epsilon too small")
    return Fraction(1, 2 ** k)


def normalize_structure(S: Sequence[GroupElement], epsilon: float):
    """Normalize a nonseparated set to the standard slot form.

    Produces an automorphism Phi and a perturbation S' of the input with
    Phi(S') containing an element (x, a, 0) with a_mult > 1, elements
    (x_i, c_i, |1 - c_i| e_i) for every b-axis i, and either a companion
    (x', a', 0) with a_mult < 1 or c_1 < 1 (the recorded branch).
    Multiplicative coordinates equal to 1 in an axis slot are perturbed by
    a rational step of at most epsilon.  Raises NormalizationError naming
    the failing step (this happens exactly when the input is separated in a
    way the step needs to exclude).
    """
    S = list(S)
    if not S:
        raise NormalizationError("empty input set")
    shape = S[0].shape
    n = shape.n
    audit: List[AuditStep] = []
    autos = []

    # step 1: shear the b part of an expanding element to zero
    anchor = next((i for i, x in enumerate(S)
                   if (x.a_mult - rational(1)).sign() > 0), None)
    if anchor is None:
        raise NormalizationError(
            "base step: no element with multiplicative coordinate > 1")
    z = S[anchor]
    beta = tuple(-(bi / (z.a_mult - rational(1))) for bi in z.b)
    shear = TypeC((rational(0),) * (shape.m - 1), beta)
    current = [apply(shear, x) for x in S]
    autos.append(shear)
    audit.append(AuditStep("shear-normalize", {"index": anchor}))

    # step 2: induction over b axes
    axis_slots: List[int] = []
    branch = None
    for i in range(1, n + 1):
        def eligible(x):
            return any(not x.b[j].is_zero for j in range(i - 1, n))
        candidates = [k for k, x in enumerate(current)
                      if k not in axis_slots and k != anchor and eligible(x)]
        if not candidates:
            raise NormalizationError(
                f"axis step {i}: every remaining element has its b part inside "
                f"the span of the first {i - 1} axes (separated input)")
        if i == 1:
            contracting = [k for k in candidates
                           if (current[k].a_mult - rational(1)).sign() < 0]
            if contracting:
                candidates = contracting
                branch = "contracting-first-slot"
        rational_first = sorted(
            candidates,
            key=lambda k: (not all(x.is_rational for x in current[k].b), k))
        chosen = rational_first[0]
        psi = _axis_map(current[chosen].b, i, n, audit)
        if psi is None:
            raise NormalizationError(f"axis step {i}: no completing basis")
        current = [apply(psi, x) for x in current]
        autos.append(psi)
        axis_slots.append(chosen)
        audit.append(AuditStep("axis-map", {"axis": i, "index": chosen}))

    companion = None
    if branch is None:
        companion = next(
            (k for k, x in enumerate(current)
             if k != anchor and k not in axis_slots
             and all(s.is_zero for s in x.b)
             and (x.a_mult - rational(1)).sign() < 0), None)
        if companion is None:
            raise NormalizationError(
                "branch step: no contracting element available (neither a "
                "first-axis slot with a_mult < 1 nor a contracting element "
                "with zero b part)")
        branch = "contracting-anchor"

    # step 3: rational perturbation of axis slots sitting at a_mult = 1
    delta = _rational_epsilon(epsilon)
    perturbed = list(current)
    for slot, k in enumerate(axis_slots, start=1):
        x = perturbed[k]
        if (x.a_mult - rational(1)).is_zero:
            new_a = x.a_mult * rational(1 + delta)
            perturbed[k] = GroupElement(x.shape, x.v, new_a, x.b)
            audit.append(AuditStep("perturb-mult-coordinate",
                                   {"index": k, "axis": slot, "delta": delta}))
    current = perturbed

    # step 4: rescale axis slots e_i -> |1 - c_i| e_i
    scales = []
    for slot, k in enumerate(axis_slots, start=1):
        scales.append(abs(current[k].a_mult - rational(1)))
    rescale = TypeB([[scales[r] if r == c else rational(0) for c in range(n)]
                     for r in range(n)])
    current = [apply(rescale, x) for x in current]
    autos.append(rescale)
    audit.append(AuditStep("axis-rescale", {"scales": [str(s) for s in scales]}))

    composite = Composite(list(reversed(autos)))

    # reconstruct the perturbed input in original coordinates
    inverse = inverse_automorphism(composite)
    perturbed_input = [apply(inverse, x) for x in current]

    return StructureNormalization(
        automorphism=composite,
        elements=current,
        perturbed_input=perturbed_input,
        audit=audit,
        branch=branch,
        anchor_index=anchor,
        companion_index=companion,
        axis_slots=axis_slots,
    )
