"""Deciding whether a finite subset lies in a maximal subsemigroup.

The maximal subsemigroups correspond to half-spaces whose boundary is a
hyperplane subalgebra.  The commutation relations leave exactly two
families of such hyperplanes:

* family (i): kernels of functionals on the abelianization coordinates
  (v, a) (the b directions are annihilated);
* family (ii): kernels supported on the (a, b) coordinates only, giving
  the membership inequality gamma.b + mu*(a_mult - 1) >= 0 in the
  multiplicative model (in G_1 these are the boundary curves
  y = l*(e^x - 1) together with x = 0).

A set is separated iff one family admits a nonzero functional that is
nonnegative on every element.  Each family reduces to "0 is NOT interior
to the convex hull" of the family's point set, tested as an exact rank
check plus LP feasibility of {sum(lam_p p) = 0, lam_p >= 1}.  The type
(ii) test runs on exact rationals whenever the inputs allow; type (i)
always goes through float logarithms, and any LP optimum within tolerance
of zero raises the ``marginal`` flag.

LP solver state is never shared; every decision builds its own tableaus,
so independent decisions may run in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from . import qlinalg, simplex
from .groups import GroupElement, GroupShape
from .scalars import LeavesSpanError, Scalar, as_scalar, rational

__all__ = [
    "TypeIFunctional", "TypeIIFunctional", "SeparationVerdict",
    "decide_separation", "g1_separation_oracle", "boundary_slope",
    "quadrant_of", "classify_hyperplane_subalgebras", "HyperplaneFamilies",
    "euclidean_interior", "InteriorResult",
]


@dataclass(frozen=True)
class TypeIFunctional:
    """g . (v, ln a_mult) >= 0 on every element; g has length m."""
    g: tuple

    def value(self, x: GroupElement) -> float:
        coords = [s.evaluate() for s in x.v] + [x.a_additive()]
        return float(sum(float(gi) * c for gi, c in zip(self.g, coords)))


@dataclass(frozen=True)
class TypeIIFunctional:
    """gamma . b + mu * (a_mult - 1) >= 0 on every element."""
    gamma: tuple
    mu: object

    def value(self, x: GroupElement) -> Scalar:
        acc = as_scalar(self.mu) * (x.a_mult - rational(1))
        for g, b in zip(self.gamma, x.b):
            acc = acc + as_scalar(g) * b
        return acc


@dataclass
class SeparationVerdict:
    separated: bool
    witness: Optional[object] = None          # TypeI/TypeIIFunctional when separated
    hull_certificates: Optional[Tuple] = None  # (type-i weights, type-ii weights)
    marginal: bool = False


@dataclass
class InteriorResult:
    interior: bool
    weights: Optional[list]    # lam >= 1 with sum(lam_p p) = 0 when interior
    witness: Optional[list]    # g with g.p >= 0 for all p when not interior
    marginal: bool
    exact: bool


# -- interior-of-hull tests --------------------------------------------------


def _supporting_functional_exact(points):
    """Exact g with g.p >= 0 for all p and sum_p g.p = 1."""
    d = len(points[0])
    k = len(points)
    nvars = 2 * d + k
    A = []
    b = []
    for i, p in enumerate(points):
        row = [Fraction(0)] * nvars
        for j in range(d):
            row[j] = p[j]
            row[d + j] = -p[j]
        row[2 * d + i] = Fraction(-1)
        A.append(row)
        b.append(Fraction(0))
    tot = [sum(p[j] for p in points) for j in range(d)]
    row = [Fraction(0)] * nvars
    for j in range(d):
        row[j] = tot[j]
        row[d + j] = -tot[j]
    A.append(row)
    b.append(Fraction(1))
    x = simplex.feasible_eq_nonneg(A, b)
    if x is None:
        return None
    return [x[j] - x[d + j] for j in range(d)]


def _interior_exact(points) -> InteriorResult:
    points = [[Fraction(c) for c in p] for p in points]
    d = len(points[0])
    if qlinalg.rank(points) < d:
        g = qlinalg.nullspace(points)
        witness = g[0] if g else [Fraction(int(j == 0)) for j in range(d)]
        return InteriorResult(False, None, witness, False, True)
    weights = simplex.interior_weights(points)
    if weights is not None:
        return InteriorResult(True, weights, None, False, True)
    witness = _supporting_functional_exact(points)
    return InteriorResult(False, None, witness, False, True)


def _interior_float(points, marginal_tol=1e-7, rank_tol=1e-9) -> InteriorResult:
    P = np.array(points, dtype=float)
    k, d = P.shape
    sing = np.linalg.svd(P, compute_uv=False) if k and d else np.array([])
    scale = float(sing[0]) if len(sing) and sing[0] > 0 else 1.0
    cutoff = rank_tol * max(1.0, scale)
    r = int(np.sum(sing > cutoff))
    if r < d:
        _, _, vt = np.linalg.svd(P)
        witness = [float(x) for x in vt[-1]]
        # borderline rank decision: the largest discarded singular value is
        # within two decades of the cutoff
        discarded = [float(s) for s in sing if s <= cutoff]
        marginal = bool(discarded) and max(discarded) > cutoff / 100.0
        return InteriorResult(False, None, witness, marginal, False)

    # max t s.t. P^T lam = 0, sum lam = 1, lam_p >= t >= 0
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_eq = np.zeros((d + 1, k + 1))
    A_eq[:d, :k] = P.T
    A_eq[d, :k] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    A_ub = np.zeros((k, k + 1))
    A_ub[:, :k] = -np.eye(k)
    A_ub[:, k] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(k), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * k + [(None, None)], method="highs")
    if res.status == 0:
        t_star = float(res.x[-1])
        marginal = abs(t_star) < marginal_tol
        if t_star > 0:
            lam = res.x[:k] / max(t_star, 1e-300)
            lam = np.maximum(lam, 1.0)
            return InteriorResult(True, [float(x) for x in lam], None, marginal, False)
        witness = _supporting_functional_float(P)
        return InteriorResult(False, None, witness, True, False)

    # 0 not in the hull at all; measure how close for the marginal flag
    marginal = _hull_distance_l1(P) < marginal_tol
    witness = _supporting_functional_float(P)
    return InteriorResult(False, None, witness, marginal, False)


def _hull_distance_l1(P) -> float:
    k, d = P.shape
    # min sum(u + w) s.t. P^T lam - u + w = 0, sum lam = 1
    nvars = k + 2 * d
    c = np.concatenate([np.zeros(k), np.ones(2 * d)])
    A_eq = np.zeros((d + 1, nvars))
    A_eq[:d, :k] = P.T
    A_eq[:d, k:k + d] = -np.eye(d)
    A_eq[:d, k + d:] = np.eye(d)
    A_eq[d, :k] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * nvars, method="highs")
    return float(res.fun) if res.status == 0 else math.inf


def _supporting_functional_float(P):
    k, d = P.shape
    tot = P.sum(axis=0)
    res = linprog(np.zeros(d), A_ub=-P, b_ub=np.zeros(k),
                  A_eq=tot.reshape(1, -1), b_eq=[1.0],
                  bounds=[(None, None)] * d, method="highs")
    if res.status == 0:
        return [float(x) for x in res.x]
    # marginal boundary case: best-margin direction with box normalization
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.zeros((k, d + 1))
    A_ub[:, :d] = -P
    A_ub[:, d] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(k),
                  bounds=[(-1, 1)] * d + [(None, None)], method="highs")
    if res.status == 0 and np.max(np.abs(res.x[:d])) > 1e-9:
        return [float(x) for x in res.x[:d]]
    return None


def euclidean_interior(vectors, marginal_tol=1e-7) -> InteriorResult:
    """0-in-interior-of-hull test for plain vectors (exact when rational)."""
    vecs = []
    exact = True
    for v in vectors:
        row = [as_scalar(c) for c in v]
        if not all(c.is_rational for c in row):
            exact = False
        vecs.append(row)
    if not vecs:
        raise ValueError("empty vector list")
    if exact:
        return _interior_exact([[c.rational_value() for c in row] for row in vecs])
    return _interior_float([[c.evaluate() for c in row] for row in vecs],
                           marginal_tol=marginal_tol)


# -- the decision -------------------------------------------------------------


def _type_i_result(S: Sequence[GroupElement], marginal_tol) -> InteriorResult:
    m = S[0].shape.m
    if m == 1:
        # exact 1-d fast path: sign(ln a_mult) = sign(a_mult - 1)
        signs = [(x.a_mult - rational(1)).sign() for x in S]
        if all(s >= 0 for s in signs):
            return InteriorResult(False, None, [Fraction(1)], False, True)
        if all(s <= 0 for s in signs):
            return InteriorResult(False, None, [Fraction(-1)], False, True)
        # interior; balance float log weights for the certificate
        logs = [x.a_additive() for x in S]
        lam = [1.0] * len(S)
        resid = sum(logs)
        j = min(range(len(S)), key=lambda i: logs[i] * resid)
        lam[j] += -resid / logs[j]
        return InteriorResult(True, lam, None, False, True)
    points = [[s.evaluate() for s in x.v] + [x.a_additive()] for x in S]
    return _interior_float(points, marginal_tol=marginal_tol)


def _type_ii_result(S: Sequence[GroupElement], marginal_tol) -> InteriorResult:
    exact = all(x.a_mult.is_rational and all(c.is_rational for c in x.b) for x in S)
    if exact:
        points = [[c.rational_value() for c in x.b]
                  + [(x.a_mult - rational(1)).rational_value()] for x in S]
        return _interior_exact(points)
    points = [[c.evaluate() for c in x.b] + [x.a_mult.evaluate() - 1.0] for x in S]
    return _interior_float(points, marginal_tol=marginal_tol)


def decide_separation(S: Sequence[GroupElement], marginal_tol: float = 1e-7) -> SeparationVerdict:
    """Separated iff some family (i) or (ii) functional is >= 0 on all of S.

    Nonseparated verdicts carry the two interior certificates (strictly
    positive weight vectors for each family's point set).  Separated
    verdicts carry a witness functional, type (i) preferred.
    """
    S = list(S)
    if not S:
        raise ValueError("decide_separation needs a nonempty set")
    shape = S[0].shape
    if any(x.shape != shape for x in S):
        raise ValueError("elements have mixed shapes")

    res_i = _type_i_result(S, marginal_tol)
    res_ii = _type_ii_result(S, marginal_tol)
    marginal = res_i.marginal or res_ii.marginal

    if not res_i.interior:
        witness = TypeIFunctional(tuple(res_i.witness)) if res_i.witness else None
        return SeparationVerdict(True, witness, None, marginal)
    if not res_ii.interior:
        if res_ii.witness:
            witness = TypeIIFunctional(tuple(res_ii.witness[:-1]), res_ii.witness[-1])
        else:
            witness = None
        return SeparationVerdict(True, witness, None, marginal)
    return SeparationVerdict(False, None, (res_i.weights, res_ii.weights), marginal)


# -- G_1 geometry -------------------------------------------------------------


def boundary_slope(x: GroupElement):
    """Slope l of the boundary curve through a G_1 point: l = y/(a_mult - 1).

    Returns math.inf for points on the a_mult = 1 border.  The identity
    lies on every curve and is rejected.
    """
    if x.shape != GroupShape(1, 1):
        raise ValueError("boundary_slope is defined on G_1 elements")
    y = x.b[0]
    denom = x.a_mult - rational(1)
    if denom.is_zero and y.is_zero:
        raise ValueError("the identity lies on every boundary curve")
    if denom.is_zero:
        return math.inf
    try:
        return y / denom
    except LeavesSpanError:
        return Scalar.from_float(y.evaluate() / denom.evaluate())


def quadrant_of(x: GroupElement) -> str:
    """Quadrant tag of a G_1 point; 'boundary' when y = 0 or a_mult = 1."""
    if x.shape != GroupShape(1, 1):
        raise ValueError("quadrant_of is defined on G_1 elements")
    sa = (x.a_mult - rational(1)).sign()
    sy = x.b[0].sign()
    if sa == 0 or sy == 0:
        return "boundary"
    if sa > 0:
        return "I" if sy > 0 else "IV"
    return "II" if sy > 0 else "III"


def g1_separation_oracle(S: Sequence[GroupElement]) -> SeparationVerdict:
    """Independent G_1 oracle by interval intersection in the slope l.

    S is separated iff all a_mult are on one side of 1, or one of the two
    slope-interval systems {y_s >= l (a_s - 1)} / {y_s <= l (a_s - 1)} is
    feasible.  Exact for rational inputs.  Verdicts from the oracle carry
    no hull certificates (it is deliberately independent of the LP path).
    """
    S = list(S)
    if not S:
        raise ValueError("empty set")
    if any(x.shape != GroupShape(1, 1) for x in S):
        raise ValueError("the oracle handles G_1 only")

    signs = [(x.a_mult - rational(1)).sign() for x in S]
    if all(s >= 0 for s in signs):
        return SeparationVerdict(True, TypeIFunctional((1,)))
    if all(s <= 0 for s in signs):
        return SeparationVerdict(True, TypeIFunctional((-1,)))

    def slope(x):
        try:
            return x.b[0] / (x.a_mult - rational(1))
        except LeavesSpanError:
            return Scalar.from_float(x.b[0].evaluate() / (x.a_mult.evaluate() - 1.0))

    for side in ("upper", "lower"):
        lowers, uppers = [], []
        ok = True
        for x, s in zip(S, signs):
            y = x.b[0]
            if s == 0:
                if (side == "upper" and y.sign() < 0) or (side == "lower" and y.sign() > 0):
                    ok = False
                    break
                continue
            l = slope(x)
            expanding = s > 0
            if side == "upper":
                (uppers if expanding else lowers).append(l)
            else:
                (lowers if expanding else uppers).append(l)
        if not ok:
            continue
        lo = max(lowers) if lowers else None
        hi = min(uppers) if uppers else None
        if lo is not None and hi is not None and (lo - hi).sign() > 0:
            continue
        l = lo if lo is not None else (hi if hi is not None else rational(0))
        if side == "upper":
            return SeparationVerdict(True, TypeIIFunctional((1,), -l))
        return SeparationVerdict(True, TypeIIFunctional((-1,), l))

    return SeparationVerdict(False)


# -- hyperplane subalgebra classification -------------------------------------


@dataclass
class HyperplaneFamilies:
    """The two families of hyperplane subalgebras for a given shape.

    A functional on the algebra is written (g_v | g_a | gamma) over the
    basis directions (v..., a, b...).  Its kernel is a subalgebra iff
    gamma = 0 (family i: pullbacks of hyperplanes in the abelianization)
    or g_v = 0 with gamma != 0 (family ii: supported on the (a, b) block).
    """
    shape: GroupShape

    def is_family_i(self, coeffs) -> bool:
        m, n = self.shape
        gamma = coeffs[m:]
        return all(Fraction(c) == 0 for c in gamma) and any(
            Fraction(c) != 0 for c in coeffs[:m])

    def is_family_ii(self, coeffs) -> bool:
        m, n = self.shape
        gv, gamma = coeffs[:m - 1], coeffs[m:]
        return (all(Fraction(c) == 0 for c in gv)
                and any(Fraction(c) != 0 for c in gamma))

    def predicts_subalgebra(self, coeffs) -> bool:
        return self.is_family_i(coeffs) or self.is_family_ii(coeffs)

    def kernel_is_subalgebra(self, coeffs) -> bool:
        """Brute-force check: bracket every pair of kernel basis vectors.

        The bracket of (v, a, c) and (v', a', c') is (0, 0, a c' - a' c),
        so the kernel of f = (g_v | g_a | gamma) is a subalgebra iff
        gamma . (a_x c_y - a_y c_x) = 0 for all kernel pairs.
        """
        m, n = self.shape
        coeffs = [Fraction(c) for c in coeffs]
        if all(c == 0 for c in coeffs):
            raise ValueError("zero functional")
        basis = qlinalg.nullspace([coeffs])
        gamma = coeffs[m:]
        for x in basis:
            for y in basis:
                ax, cx = x[m - 1], x[m:]
                ay, cy = y[m - 1], y[m:]
                val = sum(g * (ax * cyj - ay * cxj)
                          for g, cxj, cyj in zip(gamma, cx, cy))
                if val != 0:
                    return False
        return True

    def describe(self) -> str:
        return ("family (i): kernels of functionals on the (v, a) coordinates "
                "(all b directions annihilated); "
                "family (ii): kernels of functionals supported on (a, b) only, "
                "i.e. gamma.c = -mu a, giving the half-space inequality "
                "gamma.b + mu (a_mult - 1) >= 0; in G_1 these are the curves "
                "y = l (e^x - 1) and the border x = 0")


def classify_hyperplane_subalgebras(shape) -> HyperplaneFamilies:
    return HyperplaneFamilies(GroupShape(*shape))
