"""Mixed-sign product limits and their realization by integer powers.

Given z0 with a_mult < 1 and z with a_mult > 1 inside a set whose
abelianization projection is nonseparated, the closed subsemigroup
contains the element

    (0, 1, b0 / (1 - a_mult(z0)) + b1 / (a_mult(z) - 1)),

and :func:`realize_limit` reproduces it constructively: positive weights
alpha with sum(alpha_i * pi(z_i)) = 0 come from an LP, integer times t with
every t*alpha_i near an integer come from a linear scan over the torus
recurrence, and the actual group product at the rounded exponents is
recorded together with its distance to the target.

``realize_limit`` is long-running but pure; pass ``should_stop`` for
cooperative cancellation.  Independent requests can run in parallel.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .groups import GroupElement, distance, identity, power, product
from .scalars import LeavesSpanError, Scalar, rational
from .separation import euclidean_interior

__all__ = [
    "LimitRequest", "ConvergenceTrace", "TraceStep", "limit_element",
    "realize_limit", "trace_to_csv", "ProjectionSeparatedError",
]

WEIGHT_FLOOR = 1e-3       # delta: strictly positive lower bound on LP weights
SUPPORT_TOL = 1e-9        # weights below this are treated as absent
EXACT_BIT_BUDGET = 20000  # largest exact numerator/denominator bit size


class ProjectionSeparatedError(ValueError):
    """The abelianization projection admits no positive weight system."""


@dataclass
class LimitRequest:
    S: List[GroupElement]
    z0: GroupElement
    z: GroupElement

    def __post_init__(self):
        if (self.z0.a_mult - rational(1)).sign() >= 0:
            raise ValueError("z0 requires a_mult < 1")
        if (self.z.a_mult - rational(1)).sign() <= 0:
            raise ValueError("z requires a_mult > 1")
        shape = self.z0.shape
        if self.z.shape != shape or any(x.shape != shape for x in self.S):
            raise ValueError("mixed shapes in limit request")


@dataclass
class TraceStep:
    t: int
    exponents: tuple
    element: GroupElement
    dist: float


@dataclass
class ConvergenceTrace:
    target: GroupElement
    steps: List[TraceStep] = field(default_factory=list)
    achieved: bool = False
    weights: tuple = ()
    order: tuple = ()

    @property
    def final_distance(self) -> float:
        return self.steps[-1].dist if self.steps else math.inf


def limit_element(req: LimitRequest) -> GroupElement:
    """The closed-form limit (0, 1, b0/(1 - a0) + b1/(a1 - 1))."""
    shape = req.z0.shape
    d0 = rational(1) - req.z0.a_mult
    d1 = req.z.a_mult - rational(1)

    def div(s: Scalar, d: Scalar) -> Scalar:
        try:
            return s / d
        except LeavesSpanError:
            return Scalar.from_float(s.evaluate() / d.evaluate())

    b = tuple(div(p, d0) + div(q, d1) for p, q in zip(req.z0.b, req.z.b))
    zero = rational(0)
    return GroupElement(shape, (zero,) * (shape.m - 1), rational(1), b,
                        a_add=rational(0))


def _projection_point(x: GroupElement):
    return [s.evaluate() for s in x.v] + [x.a_additive()]


def _weight_lp(points, first: int, last: int):
    """min sum(lam), sum(lam_i p_i) = 0, lam_first/last >= delta, rest >= 0."""
    k = len(points)
    d = len(points[0])
    A_eq = np.array(points, dtype=float).T
    b_eq = np.zeros(d)
    bounds = []
    for i in range(k):
        lo = WEIGHT_FLOOR if i in (first, last) else 0.0
        bounds.append((lo, None))
    res = linprog(np.ones(k), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return res.x


def _exact_products_feasible(ordered, exps) -> bool:
    bits = 0
    for x, t in zip(ordered, exps):
        if not x.a_mult.is_rational:
            return False
        if not all(s.is_rational or s.is_exact for s in x.b):
            return False
        r = x.a_mult.rational_value()
        size = max(r.numerator.bit_length(), r.denominator.bit_length())
        bits = max(bits, size * abs(t))
    return bits <= EXACT_BIT_BUDGET


def _product_exact(ordered, exps) -> GroupElement:
    acc = identity(ordered[0].shape)
    for x, t in zip(ordered, exps):
        acc = product(acc, power(x, t))
    return acc


def _product_float(ordered, exps) -> GroupElement:
    """Telescoped evaluation that never forms an overflowing power.

    With partial additive sums s_i, the b part of the product is
    sum_i (e^{s_{i-1}} - e^{s_i}) / (1 - e^{a_i}) b_i  (t_i e^{s_{i-1}} b_i
    when a_i = 0); the partial sums stay below ~0 for the sorted ordering,
    so every exponential is tame.
    """
    shape = ordered[0].shape
    logs = [x.a_additive() for x in ordered]
    prefix = [0.0]
    for a, t in zip(logs, exps):
        prefix.append(prefix[-1] + t * a)

    def safe_exp(s):
        return math.exp(min(s, 700.0))

    v = [0.0] * (shape.m - 1)
    b = [0.0] * shape.n
    for i, (x, t) in enumerate(zip(ordered, exps)):
        for j, s in enumerate(x.v):
            v[j] += t * s.evaluate()
        a = logs[i]
        if a == 0.0:
            coef = t * safe_exp(prefix[i])
        else:
            coef = (safe_exp(prefix[i]) - safe_exp(prefix[i + 1])) / (1.0 - math.exp(a))
        for j, s in enumerate(x.b):
            b[j] += coef * s.evaluate()
    return GroupElement(shape,
                        [Scalar.from_float(c) for c in v],
                        Scalar.from_float(safe_exp(prefix[-1])),
                        [Scalar.from_float(c) for c in b])


def realize_limit(req: LimitRequest, tol: float = 1e-9, max_t: int = 10 ** 6,
                  should_stop: Optional[Callable[[], bool]] = None) -> ConvergenceTrace:
    """Drive the integer-power product toward the closed-form limit.

    Middle factors are ordered by nondecreasing additive coordinate, z0
    first and z last.  The scan evaluates the product whenever the maximal
    fractional distance of t*alpha to the integers matches or improves the
    running best, and stops once the distance to the target drops below
    ``tol``.  An exhausted scan returns the trace marked not achieved.
    """
    target = limit_element(req)

    middles = [x for x in req.S if x.key() not in (req.z0.key(), req.z.key())]
    middles.sort(key=lambda x: x.a_additive())
    ordered = [req.z0] + middles + [req.z]

    points = [_projection_point(x) for x in ordered]
    if not euclidean_interior(points).interior:
        raise ProjectionSeparatedError(
            "projection to the abelianization is separated; no positive "
            "weight system exists")
    lam = _weight_lp(points, 0, len(ordered) - 1)
    if lam is None:
        raise ProjectionSeparatedError("weight LP infeasible")

    keep = [i for i, w in enumerate(lam)
            if w > SUPPORT_TOL or i in (0, len(ordered) - 1)]
    ordered = [ordered[i] for i in keep]
    weights = np.array([max(lam[i], WEIGHT_FLOOR) for i in keep])
    weights = weights / weights.min()
    # snap away solver noise so rational weight systems scan exactly
    snapped = [Fraction(float(w)).limit_denominator(10 ** 6) for w in weights]
    weights = np.array([float(s) if abs(float(s) - w) < 1e-9 else float(w)
                        for s, w in zip(snapped, weights)])

    trace = ConvergenceTrace(target=target, weights=tuple(float(w) for w in weights),
                             order=tuple(ordered))
    t_cap = max(1, int(max_t / float(weights.max())))
    best = math.inf
    for t in range(1, t_cap + 1):
        if should_stop is not None and should_stop():
            break
        ta = t * weights
        frac = np.abs(ta - np.rint(ta)).max()
        if frac > best + 1e-12:
            continue
        best = min(best, frac)
        exps = [int(x) for x in np.rint(ta)]
        if any(e < 1 for e in exps):
            continue
        if _exact_products_feasible(ordered, exps):
            el = _product_exact(ordered, exps)
        else:
            el = _product_float(ordered, exps)
        d = distance(el, target)
        trace.steps.append(TraceStep(t, tuple(exps), el, d))
        if d < tol:
            trace.achieved = True
            break
    return trace


def trace_to_csv(trace: ConvergenceTrace, path) -> None:
    """Write the trace as CSV rows (t, coordinates..., distance)."""
    shape = trace.target.shape
    header = (["t"] + [f"v{i + 1}" for i in range(shape.m - 1)] + ["a_mult"]
              + [f"b{i + 1}" for i in range(shape.n)] + ["distance"])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for step in trace.steps:
            el = step.element
            row = ([str(step.t)] + [repr(s.evaluate()) for s in el.v]
                   + [repr(el.a_mult.evaluate())]
                   + [repr(s.evaluate()) for s in el.b] + [repr(step.dist)])
            fh.write(",".join(row) + "\n")
