"""Exact rational LP feasibility via a phase-1 simplex with Bland's rule.

Sized for the tiny systems this package produces (tens of variables).  The
two entry points used by the separation machinery are

* :func:`feasible_eq_nonneg` -- find x >= 0 with A x = b, or None;
* :func:`interior_weights` -- the hull-interior test: weights lam >= 1 with
  sum(lam_p * p) = 0, or None.
"""

from __future__ import annotations

from fractions import Fraction


def _phase1(A, b):
    """Phase-1 simplex: x >= 0 with A x = b, or None. A: rows, b: vector."""
    m = len(A)
    if m == 0:
        return []
    n = len(A[0])
    # normalize rhs nonnegative
    rows = []
    rhs = []
    for i in range(m):
        if b[i] < 0:
            rows.append([-x for x in A[i]])
            rhs.append(-b[i])
        else:
            rows.append(list(A[i]))
            rhs.append(Fraction(b[i]))
    # tableau with artificial basis; columns: n structural + m artificial
    T = [rows[i] + [Fraction(int(j == i)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    total = n + m
    # objective: minimize sum of artificials -> reduced cost row
    z = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            z[j] += T[i][j]

    while True:
        # Bland: entering = smallest index with positive reduced cost,
        # restricted to structural columns (artificials never re-enter)
        enter = next((j for j in range(n) if z[j] > 0), None)
        if enter is None:
            break
        # ratio test, Bland tie-break on basis index
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][total] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            # unbounded in phase 1 cannot happen (objective bounded below by 0)
            return None
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        if z[enter] != 0:
            f = z[enter]
            z = [x - f * y for x, y in zip(z, T[leave])]
        basis[leave] = enter

    if z[total] != 0:  # residual infeasibility
        return None
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i][total]
        elif T[i][total] != 0:
            return None  # artificial stuck at a positive level
    return x


def feasible_eq_nonneg(A, b):
    """Some x >= 0 with A x = b (exact), or None if infeasible."""
    A = [[Fraction(x) for x in row] for row in A]
    b = [Fraction(x) for x in b]
    return _phase1(A, b)


def interior_weights(points):
    """Weights lam >= 1 with sum(lam_p * p) = 0, or None.

    Existence of such weights, together with the points spanning the whole
    space, is the hull-interior criterion used by the separation decision.
    Substitutes lam = 1 + mu, mu >= 0.
    """
    points = [[Fraction(x) for x in p] for p in points]
    if not points:
        return None
    d = len(points[0])
    k = len(points)
    # columns indexed by points: A mu = -A 1
    A = [[points[p][c] for p in range(k)] for c in range(d)]
    b = [-sum(points[p][c] for p in range(k)) for c in range(d)]
    mu = _phase1(A, b)
    if mu is None:
        return None
    return [Fraction(1) + m for m in mu]


def nonneg_functional(points, coord: int, sigma: int):
    """Exact g with g . p >= 0 for all points and g[coord] = sigma, or None.

    Variables g = u - w with u, w >= 0 and one slack per point.
    """
    points = [[Fraction(x) for x in p] for p in points]
    if not points:
        return None
    d = len(points[0])
    k = len(points)
    nvars = 2 * d + k
    A = []
    b = []
    for p in points:
        row = [Fraction(0)] * nvars
        for j in range(d):
            row[j] = p[j]
            row[d + j] = -p[j]
        A.append(row)
        b.append(Fraction(0))
        A[-1][2 * d + len(A) - 1] = Fraction(-1)
    row = [Fraction(0)] * nvars
    row[coord] = Fraction(1)
    row[d + coord] = Fraction(-1)
    A.append(row)
    b.append(Fraction(sigma))
    x = _phase1(A, b)
    if x is None:
        return None
    return [x[j] - x[d + j] for j in range(d)]
