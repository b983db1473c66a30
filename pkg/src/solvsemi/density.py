"""Density certificates, densification pipelines, minimal generating sets.

Density of a subsemigroup is never observed by exhaustion; it is certified:

* an integer-orbit density certificate for vectors in R^n (contains the
  standard basis, an all-negative member, and Z-independence of that
  member's coordinates together with 1);
* for tuples in the ambient group, a pipeline certificate bundling the
  abelianization-projection density data with the density data for the
  closure's intersection with the R^n fiber, produced by the structure
  normalization, product-limit pairs and fresh-symbol perturbations.

Everything that claims exactness is exact: perturbations introduce fresh
declared irrationals in additive coordinates and fresh prime factors in
multiplicative ones, so every independence claim is a rational rank
computation and every log-ratio irrationality claim is a prime
factorization fact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import qlinalg, simplex
from .automorphisms import (AuditStep, StructureNormalization, apply,
                            inverse_automorphism, normalize_structure)
from .explorer import enumerate_words
from .groups import (GroupElement, GroupShape, distance, element, g1, inverse,
                     power, product)
from .limits import LimitRequest, limit_element
from .scalars import (LeavesSpanError, Scalar, SymbolTable, as_scalar,
                      fresh_symbols, rational, z_linearly_independent)
from .separation import decide_separation, euclidean_interior

__all__ = [
    "KroneckerCertificate", "kronecker_dense", "densify_euclidean",
    "EuclideanDensification", "densify_hmn", "HmnDensification",
    "DensityCertificate", "minimal_count", "construct_minimal_generators",
    "GeneratorSpec", "torus_orbit_covers_grid", "symmetrize",
    "SeparatedInputError", "PipelineError", "verify_certificate",
]


class SeparatedInputError(ValueError):
    """The input is separated; densification preconditions fail."""


class PipelineError(RuntimeError):
    """A densification step could not be completed; the message names it."""


# -- Kronecker certificates ----------------------------------------------------


@dataclass
class KroneckerCertificate:
    dense: bool
    basis_indices: Optional[Dict[int, int]] = None   # axis -> vector index
    negative_index: Optional[int] = None
    independent_values: Optional[list] = None
    reason: str = ""

    def __bool__(self):
        return self.dense


def _as_exact_vector(vec):
    row = [as_scalar(c) for c in vec]
    if any(c.is_float for c in row):
        raise ValueError("kronecker_dense needs exact vectors; no exact "
                         "certificate exists for floats")
    return row


def kronecker_dense(vectors: Sequence) -> KroneckerCertificate:
    """Certify density of the integer orbit of a vector set in R^n.

    True iff the set contains every standard basis vector, some member
    with all coordinates negative, and the unit together with that
    member's coordinates is Z-linearly independent (exact rank test).
    """
    vecs = [_as_exact_vector(v) for v in vectors]
    if not vecs:
        raise ValueError("empty vector set")
    n = len(vecs[0])
    if any(len(v) != n for v in vecs):
        raise ValueError("mixed dimensions")

    basis: Dict[int, int] = {}
    for idx, v in enumerate(vecs):
        for axis in range(n):
            if all(v[j] == rational(int(j == axis)) for j in range(n)):
                basis.setdefault(axis, idx)
    if len(basis) < n:
        missing = [a + 1 for a in range(n) if a not in basis]
        return KroneckerCertificate(False, reason=f"missing standard basis "
                                                  f"vectors for axes {missing}")
    for idx, v in enumerate(vecs):
        if all(c.sign() < 0 for c in v):
            if z_linearly_independent(v, include_unit=True):
                return KroneckerCertificate(True, dict(basis), idx, list(v))
    negatives = [i for i, v in enumerate(vecs) if all(c.sign() < 0 for c in v)]
    if not negatives:
        return KroneckerCertificate(False, dict(basis),
                                    reason="no all-negative member")
    return KroneckerCertificate(
        False, dict(basis), negatives[0],
        reason="coordinates of every all-negative member are Z-dependent "
               "with the unit (the orbit sits in a proper closed subgroup)")


def torus_orbit_covers_grid(v, t_max: int = 10 ** 5, cells: int = 10):
    """Numerical corroboration: does {t v mod 1 : t <= t_max} hit every cell?

    Returns (covered, filled, total) for the cells^n grid.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    t = np.arange(1, t_max + 1, dtype=float)
    orbit = np.mod(np.outer(t, v), 1.0)
    idx = np.minimum((orbit * cells).astype(int), cells - 1)
    filled = len(np.unique(idx, axis=0))
    total = cells ** len(v)
    return filled == total, filled, total


# -- euclidean densification -----------------------------------------------


@dataclass
class EuclideanDensification:
    vectors: list                     # the output tuple (one entry possibly moved)
    certificate: KroneckerCertificate  # on the normalized image of the output
    automorphism: Optional[list]      # rational matrix taking the tuple onto a basis
    perturbed_index: Optional[int]
    combination: Optional[Dict[int, int]]  # vector index -> multiplicity of the sum
    audit: List[AuditStep] = field(default_factory=list)


def _rational_matrix_apply(mat, vec):
    out = []
    for row in mat:
        acc = rational(0)
        for c, x in zip(row, vec):
            acc = acc + rational(c) * x
        out.append(acc)
    return out


def _select_rational_basis(vecs):
    """Indices of n members forming a rational basis of R^n, or None."""
    n = len(vecs[0])
    chosen = []
    rows = []
    for i, v in enumerate(vecs):
        if not all(c.is_rational for c in v):
            continue
        cand = rows + [[c.rational_value() for c in v]]
        if qlinalg.rank(cand) > len(rows):
            rows = cand
            chosen.append(i)
        if len(chosen) == n:
            return chosen
    return None


def _span_feasible_combination(vecs, rhs):
    """Nonnegative rational mu with sum(mu_i vecs_i) = rhs, exact.

    Span-valued coordinates are split per symbol label, so the system stays
    rational.  rhs is rational.
    """
    n = len(vecs[0])
    labels = set()
    for v in vecs:
        for c in v:
            labels.update(c.coeffs)
    labels = sorted(labels)
    A = []
    b = []
    for coord in range(n):
        for lbl in labels:
            A.append([v[coord].coefficient(lbl) for v in vecs])
            b.append(rhs[coord] if lbl == "one" else Fraction(0))
    return simplex.feasible_eq_nonneg(A, b)


def _merge_all_tables(vecs):
    table = SymbolTable({})
    for v in vecs:
        for c in v:
            if c.is_exact and not table.extends(c.table):
                table = c.table if c.table.extends(table) else table.extended(c.table.entries)
    return table


def densify_euclidean(vectors: Sequence, epsilon: float) -> EuclideanDensification:
    """Move one tuple entry by at most epsilon so the tuple is certified dense.

    Follows the constructive recipe: map a member basis onto the standard
    basis (exact rational matrix), locate an all-negative semigroup sum,
    and push one non-basis summand by per-coordinate fresh symbols until
    the sum's coordinates are Z-independent with the unit.
    """
    vecs = [_as_exact_vector(v) for v in vectors]
    if not vecs:
        raise ValueError("empty tuple")
    n = len(vecs[0])
    audit: List[AuditStep] = []

    if not euclidean_interior(vecs).interior:
        raise SeparatedInputError("separated tuple: 0 is not interior to its hull")

    basis_idx = _select_rational_basis(vecs)
    if basis_idx is None:
        raise PipelineError(
            "basis step: no rational member basis is available for the "
            "normalizing automorphism")
    B = [[vecs[i][j].rational_value() for j in range(n)] for i in basis_idx]
    psi = qlinalg.invert([[B[r][c] for r in range(n)] for c in range(n)])
    audit.append(AuditStep("basis-normalize", {"indices": basis_idx}))
    normed = [_rational_matrix_apply(psi, v) for v in vecs]

    cert = kronecker_dense(normed)
    if cert:
        audit.append(AuditStep("already-certified", {}))
        return EuclideanDensification(list(vectors), cert, psi, None, None, audit)

    # all-negative semigroup sum: direct member, else an exact combination
    target = next((i for i, v in enumerate(normed)
                   if all(c.sign() < 0 for c in v)), None)
    if target is not None:
        combo = {target: 1}
    else:
        mu = _span_feasible_combination(normed, [Fraction(-1)] * n)
        if mu is None:
            raise PipelineError("sum step: no nonnegative combination reaching "
                                "the negative orthant")
        scale = 1
        for m in mu:
            scale = scale * m.denominator // math.gcd(scale, m.denominator)
        combo = {i: int(m * scale) for i, m in enumerate(mu) if m != 0}
        target = next((i for i in combo if i not in basis_idx), None)
        if target is None:
            raise PipelineError("sum step: every summand is a basis member")
    audit.append(AuditStep("negative-sum", {"combination": dict(combo)}))

    # per-coordinate fresh-symbol perturbation of the chosen summand
    table = _merge_all_tables(normed)
    table, labels = fresh_symbols(table, n)
    mult = combo[target]
    inv_norm = max(sum(abs(x) for x in row) for row in
                   qlinalg.invert(psi))  # pullback amplification
    eps_frac = Fraction(str(epsilon))
    deltas = []
    for axis, lbl in enumerate(labels):
        bound = Fraction(math.ceil(table.approx(lbl)))
        coef = eps_frac / (2 * bound * mult * max(Fraction(1), Fraction(math.ceil(float(inv_norm)))))
        deltas.append(rational(-coef) * table.symbol(lbl))
    perturbed_norm = [list(v) for v in normed]
    perturbed_norm[target] = [c + d for c, d in zip(perturbed_norm[target], deltas)]
    audit.append(AuditStep("fresh-symbol-perturbation",
                           {"index": target, "labels": labels}))

    total = [rational(0)] * n
    for i, k in combo.items():
        for j in range(n):
            total[j] = total[j] + rational(k) * perturbed_norm[i][j]
    if not all(c.sign() < 0 for c in total):
        raise PipelineError("perturbation step: the perturbed sum left the "
                            "negative orthant")
    cert = kronecker_dense(perturbed_norm + [total])
    if not cert:
        raise PipelineError(f"certificate step: {cert.reason}")

    psi_inv = qlinalg.invert(psi)
    out = list(vectors)
    out[target] = _rational_matrix_apply(psi_inv, perturbed_norm[target])
    for a, b in zip(out[target], _as_exact_vector(vectors[target])):
        if abs(a.evaluate() - b.evaluate()) > epsilon:
            raise PipelineError("perturbation exceeded the requested bound")
    return EuclideanDensification(out, cert, psi, target, combo, audit)


# -- log-ratio irrationality over the primes ---------------------------------


def _factor(n: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    n = abs(n)
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _factor_rational(q: Fraction) -> Dict[int, int]:
    num = _factor(q.numerator)
    for p, e in _factor(q.denominator).items():
        num[p] = num.get(p, 0) - e
    return {p: e for p, e in num.items() if e}


def log_ratio_is_rational(c: Fraction, a: Fraction) -> bool:
    """Exact test whether ln(c)/ln(a) is rational for positive rationals.

    ln c / ln a = p/q iff c^q = a^p iff the prime exponent vectors are
    parallel (unique factorization).
    """
    if c <= 0 or a <= 0 or a == 1:
        raise ValueError("need positive rationals with a != 1")
    ec, ea = _factor_rational(c), _factor_rational(a)
    if not ec:   # c = 1: ratio 0
        return True
    primes = sorted(set(ec) | set(ea))
    vc = [Fraction(ec.get(p, 0)) for p in primes]
    va = [Fraction(ea.get(p, 0)) for p in primes]
    j = next((i for i, x in enumerate(va) if x != 0), None)
    if j is None:
        return False  # a has no prime content is impossible for a != 1
    r = vc[j] / va[j]
    return all(x == r * y for x, y in zip(vc, va))


def _next_fresh_prime(used: set, floor: int) -> int:
    cand = max(floor, 5)
    while True:
        cand += 1
        if all(cand % p for p in range(2, int(math.isqrt(cand)) + 1)):
            if cand not in used:
                return cand


# -- the ambient pipeline ------------------------------------------------------


@dataclass
class DensityCertificate:
    kind: str                       # "kronecker-euclidean" | "hmn-pipeline"
    basis_elements: list            # fiber basis data: (axis, pairing, element)
    independent_values: list        # pass z_linearly_independent with the unit
    audit: List[AuditStep]
    branch: str = ""
    negative_element: Optional[list] = None
    fiber_kronecker: Optional[KroneckerCertificate] = None
    projection: Optional[dict] = None


@dataclass
class HmnDensification:
    elements: List[GroupElement]    # perturbed tuple, original coordinates
    certificate: DensityCertificate
    normalization: StructureNormalization
    word: Tuple[int, ...]           # the all-negative product word (normalized indices)
    audit: List[AuditStep] = field(default_factory=list)


def _word_product(elements, word):
    acc = elements[word[0]]
    for i in word[1:]:
        acc = product(acc, elements[i])
    return acc


def _negative_word_ok(el: GroupElement) -> bool:
    if (el.a_mult - rational(1)).sign() >= 0:
        return False
    if any(c.sign() >= 0 for c in el.b):
        return False
    gap = rational(2) * (rational(1) - el.a_mult)
    for i in range(el.shape.n - 1):
        if (el.b[i + 1] - (el.b[i] - gap)).sign() >= 0:
            return False
    return True


def _find_negative_word(elements, protected, word_cap=8):
    orbit = enumerate_words(elements, word_cap)
    for entry in orbit.entries:   # BFS order: shortest first
        if len(entry.word) < 2:
            continue
        if not _negative_word_ok(entry.element):
            continue
        if all(i in protected for i in entry.word):
            continue
        return entry.word
    return None


def _amplification(norm: StructureNormalization) -> float:
    """Rough bound on how much the inverse normalization stretches coordinates."""
    amp = 1.0
    for part in inverse_automorphism(norm.automorphism).parts:
        psi = getattr(part, "psi", None)
        if psi is not None:
            amp *= max(sum(abs(x.evaluate()) for x in row) for row in psi)
        else:
            beta = getattr(part, "beta", ())
            amp *= 1.0 + max((abs(b.evaluate()) for b in beta), default=0.0)
    return max(1.0, amp)


def densify_hmn(elements: Sequence[GroupElement], epsilon: float,
                word_cap: int = 8) -> HmnDensification:
    """Perturb a nonseparated tuple into a certified multiplicatively dense one.

    Pipeline: structure normalization, an all-negative product word with its
    multiplicative coordinate's log-ratio against the expanding anchor made
    irrational by a fresh prime factor, per-coordinate fresh-symbol
    perturbation of one free word factor (giving exact Z-independence of
    {1 - c, b_1, ..., b_n}), fiber basis elements from product-limit pairs,
    and a projection density certificate (exact log-ratio data for m = 1,
    numerically checked interior data for m >= 2).

    Exact certificates require every multiplicative coordinate rational.
    """
    elements = list(elements)
    if not elements:
        raise ValueError("empty tuple")
    shape = elements[0].shape
    if not all(x.a_mult.is_rational for x in elements):
        raise ValueError("the exact pipeline requires rational multiplicative "
                         "coordinates; demote or reparametrize the tuple")
    verdict = decide_separation(elements)
    if verdict.separated:
        raise SeparatedInputError("separated tuple cannot be densified")

    audit: List[AuditStep] = []
    norm = normalize_structure(elements, epsilon / 4)
    amp = _amplification(norm)
    if amp > 1.0:
        norm = normalize_structure(elements, epsilon / (4 * amp))
    audit.extend(norm.audit)
    eps_stage = epsilon / (4 * amp)

    current = list(norm.elements)
    protected = set(norm.axis_slots) | {norm.anchor_index}
    if norm.companion_index is not None:
        protected.add(norm.companion_index)

    word = _find_negative_word(current, protected, word_cap)
    if word is None:
        raise PipelineError(
            "product-word step: no all-negative product with the gap "
            f"conditions found within length {word_cap}")
    free = next(i for i in word if i not in protected)
    audit.append(AuditStep("product-word", {"word": list(word), "free": free}))

    anchor_a = norm.elements[norm.anchor_index].a_mult.rational_value()
    z2 = _word_product(current, word)

    # fresh prime multiplier when the log ratio against the anchor is rational
    if log_ratio_is_rational(z2.a_mult.rational_value(), anchor_a):
        used = set(_factor_rational(anchor_a))
        for x in current:
            used |= set(_factor_rational(x.a_mult.rational_value()))
        a_max = max(x.a_mult.evaluate() for x in current)
        P = _next_fresh_prime(used, max(64, int(2 * max(1.0, a_max) / eps_stage)))
        f = current[free]
        current[free] = GroupElement(shape, f.v,
                                     f.a_mult * rational(P - 1, P), f.b)
        audit.append(AuditStep("fresh-prime-multiplier",
                               {"index": free, "prime": P}))
        z2 = _word_product(current, word)
        if not _negative_word_ok(z2):
            raise PipelineError("fresh-prime step: the multiplier broke the "
                                "gap conditions")
    if log_ratio_is_rational(z2.a_mult.rational_value(), anchor_a):
        raise PipelineError("ratio step: log ratio still rational")

    # per-coordinate fresh-symbol perturbation of the free factor's b part
    values = [rational(1) - z2.a_mult] + list(z2.b)
    if not z_linearly_independent(values, include_unit=False):
        table = _merge_all_tables([x.b for x in current])
        table, labels = fresh_symbols(table, shape.n)
        coef = Fraction(str(eps_stage)) if eps_stage < 0.25 else Fraction(1, 4)
        for _ in range(60):
            f = current[free]
            deltas = [rational(-coef / math.ceil(table.approx(lbl)))
                      * table.symbol(lbl) for lbl in labels]
            trial = list(current)
            trial[free] = GroupElement(shape, f.v, f.a_mult,
                                       tuple(b + d for b, d in zip(f.b, deltas)))
            z2_t = _word_product(trial, word)
            if _negative_word_ok(z2_t):
                current = trial
                z2 = z2_t
                break
            coef = coef / 2
        else:
            raise PipelineError("perturbation step: no admissible magnitude")
        audit.append(AuditStep("fresh-symbol-perturbation",
                               {"index": free, "labels": labels}))
        values = [rational(1) - z2.a_mult] + list(z2.b)
    if not z_linearly_independent(values, include_unit=False):
        raise PipelineError("independence step: {1 - c, b_1, ..., b_n} is "
                            "Z-dependent after perturbation")

    # fiber basis from product-limit pairs
    anchor = current[norm.anchor_index]
    companion = (current[norm.companion_index]
                 if norm.companion_index is not None else None)
    slot1 = current[norm.axis_slots[0]]
    basis_elements = []
    basis_vectors = []
    for axis, k in enumerate(norm.axis_slots, start=1):
        zi = current[k]
        contracting = (zi.a_mult - rational(1)).sign() < 0
        if contracting:
            lim = limit_element(LimitRequest([], zi, anchor))
            pairing = ("slot", k, "anchor", norm.anchor_index)
        elif norm.branch == "contracting-anchor":
            lim = limit_element(LimitRequest([], companion, zi))
            pairing = ("companion", norm.companion_index, "slot", k)
        else:
            lim = limit_element(LimitRequest([], slot1, zi))
            pairing = ("slot", norm.axis_slots[0], "slot", k)
            # the pair limit is e_axis + e_1; subtract the e_1 limit inside
            # the closed group generated by the tuple
            e1 = limit_element(LimitRequest([], slot1, anchor))
            lim = GroupElement(shape, lim.v, lim.a_mult,
                               tuple(p - q for p, q in zip(lim.b, e1.b)),
                               a_add=rational(0))
        expected = [rational(int(j == axis - 1)) for j in range(shape.n)]
        if list(lim.b) != expected:
            raise PipelineError(f"fiber basis step: axis {axis} limit is not "
                                f"the expected basis vector")
        basis_elements.append({"axis": axis, "pairing": pairing})
        basis_vectors.append(lim.b)

    w_neg = limit_element(LimitRequest([], z2, anchor))
    if any(c.sign() >= 0 for c in w_neg.b):
        raise PipelineError("fiber negative step: limit not all-negative")
    fiber = kronecker_dense(basis_vectors + [w_neg.b])
    if not fiber:
        raise PipelineError(f"fiber certificate step: {fiber.reason}")
    audit.append(AuditStep("fiber-kronecker", {"independent": True}))

    # projection density
    if shape.m == 1:
        proj = {
            "kind": "log-ratio",
            "exact": True,
            "positive": anchor.a_mult.rational_value(),
            "negative": z2.a_mult.rational_value(),
            "ratio_irrational": not log_ratio_is_rational(
                z2.a_mult.rational_value(), anchor_a),
        }
    else:
        pts = [[s.evaluate() for s in x.v] + [x.a_additive()] for x in current]
        proj = {
            "kind": "interior-numeric",
            "exact": False,
            "interior": euclidean_interior(pts).interior,
        }
    audit.append(AuditStep("projection-density", proj))

    # back to original coordinates
    inv = inverse_automorphism(norm.automorphism)
    out = [apply(inv, x) for x in current]
    for a, b in zip(out, elements):
        if distance(a, b) > epsilon:
            raise PipelineError("perturbation exceeded the requested bound")
    if decide_separation(out).separated:
        raise PipelineError("sanity step: the perturbed tuple turned separated")

    cert = DensityCertificate(
        kind="hmn-pipeline",
        basis_elements=basis_elements,
        independent_values=list(w_neg.b),
        audit=audit,
        branch=norm.branch,
        negative_element=list(w_neg.b),
        fiber_kronecker=fiber,
        projection=proj,
    )
    return HmnDensification(out, cert, norm, word, audit)


def verify_certificate(cert: DensityCertificate) -> bool:
    """Independent re-check of a pipeline certificate's exact claims."""
    if cert.fiber_kronecker is not None and not cert.fiber_kronecker.dense:
        return False
    if cert.independent_values is not None:
        if not z_linearly_independent(cert.independent_values, include_unit=True):
            return False
        if any(as_scalar(v).sign() >= 0 for v in cert.independent_values):
            return False
    proj = cert.projection or {}
    if proj.get("kind") == "log-ratio":
        if not proj.get("ratio_irrational"):
            return False
        if log_ratio_is_rational(proj["negative"], proj["positive"]):
            return False
    return True


# -- minimal generating sets -----------------------------------------------


VALID_GROUPS = ("Gn", "Hmn")
VALID_MODES = ("semigroup", "group")


def minimal_count(group: str, m: Optional[int], n: int, mode: str) -> int:
    """Smallest generating-set sizes as a closed semigroup / closed group."""
    if group not in VALID_GROUPS or mode not in VALID_MODES:
        raise ValueError(f"group in {VALID_GROUPS}, mode in {VALID_MODES}")
    if n < 1 or (group == "Hmn" and (m is None or m < 1)):
        raise ValueError("invalid shape")
    if group == "Gn":
        return n + 2 if mode == "semigroup" else n + 1
    if mode == "semigroup":
        return max(n + 2, m + 1)
    return max(m + 1, n + 1)


@dataclass
class GeneratorSpec:
    group: str
    m: int
    n: int
    mode: str
    elements: List[GroupElement]
    table: SymbolTable

    def __post_init__(self):
        want = minimal_count(self.group, self.m, self.n, self.mode)
        if len(self.elements) != want:
            raise ValueError(f"generator count {len(self.elements)} != "
                             f"claimed minimum {want}")


SQRT2 = 1.4142135623730951
E_SQRT2 = 4.113250378782928
E_MSQRT2 = 0.24311673443421421

_PERT = Fraction(1, 100)


def _unit_b(shape, axis, scale=None):
    scale = rational(1) if scale is None else scale
    return tuple(scale if j == axis else rational(0) for j in range(shape.n))


def _gn_semigroup(n: int) -> GeneratorSpec:
    table = SymbolTable({"sqrt2": SQRT2})
    shape = GroupShape(1, n)
    els = [element(shape, a=1, b=(rational(0),) * n)]
    for i in range(n):
        els.append(element(shape, a=0, b=_unit_b(shape, i)))
    els.append(element(shape, a=rational(-1) * table.symbol("sqrt2"),
                       b=(rational(-1),) * n))
    return GeneratorSpec("Gn", 1, n, "semigroup", els, table)


def _gn_group(n: int) -> GeneratorSpec:
    table = SymbolTable({"sqrt2": SQRT2, "e_sqrt2": E_SQRT2})
    shape = GroupShape(1, n)
    scale = table.symbol("e_sqrt2") - rational(1)
    els = [element(shape, a=-1, b=(rational(0),) * n)]
    for i in range(n):
        els.append(element(shape, a=table.symbol("sqrt2"),
                           b=_unit_b(shape, i, scale)))
    return GeneratorSpec("Gn", 1, n, "group", els, table)


def _hmn_semigroup(m: int, n: int) -> GeneratorSpec:
    if m == 1:
        spec = _gn_semigroup(n)
        return GeneratorSpec("Hmn", 1, n, "semigroup", spec.elements, spec.table)
    table, (pert,) = fresh_symbols(SymbolTable({}), 1)
    shape = GroupShape(m, n)
    half, two = rational(1, 2), rational(2)
    zero_v = (rational(0),) * (m - 1)
    irr = rational(1) + rational(_PERT) * table.symbol(pert)   # 1 + eps*s

    def unit_v(i):
        return tuple(rational(int(j == i)) for j in range(m - 1))

    els: List[GroupElement] = []
    if m + 1 <= n + 2:
        for i in range(m - 1):
            els.append(element(shape, v=unit_v(i), a_mult=half, b=_unit_b(shape, i)))
        els.append(element(shape, v=zero_v, a_mult=two, b=(rational(0),) * n))
        for i in range(m - 1, n):
            els.append(element(shape, v=zero_v, a_mult=half,
                               b=_unit_b(shape, i, half)))
    else:
        for i in range(n):
            els.append(element(shape, v=unit_v(i), a_mult=half,
                               b=_unit_b(shape, i, half)))
        els.append(element(shape, v=zero_v, a_mult=two, b=(rational(0),) * n))
        for i in range(n, m - 1):
            els.append(element(shape, v=unit_v(i), a_mult=rational(1),
                               b=(rational(0),) * n))
    # the all-negative combination: coefficients -(1 + eps*s) on the first
    # m-1 basis images, the expanding image's coefficient pinned so the
    # additive coordinate is exactly -ln 2 (multiplicative coordinate 1/2)
    neg_v = tuple(rational(-1) * irr for _ in range(m - 1))
    els.append(element(shape, v=neg_v, a_mult=half, b=(rational(-1, 2),) * n))
    return GeneratorSpec("Hmn", m, n, "semigroup", els, table)


def _hmn_group(m: int, n: int) -> GeneratorSpec:
    if m == 1:
        spec = _gn_group(n)
        return GeneratorSpec("Hmn", 1, n, "group", spec.elements, spec.table)
    if m > n:
        spec = _hmn_semigroup(m, n)
        return GeneratorSpec("Hmn", m, n, "group", spec.elements, spec.table)
    base = SymbolTable({"sqrt2": SQRT2, "e_msqrt2": E_MSQRT2})
    table, (pert,) = fresh_symbols(base, 1)
    shape = GroupShape(m, n)
    zero_v = (rational(0),) * (m - 1)
    msqrt2 = rational(-1) * table.symbol("sqrt2")
    scale = rational(1) - table.symbol("e_msqrt2")   # |1 - e^{-sqrt2}|

    def unit_v(i):
        return tuple(rational(int(j == i)) for j in range(m - 1))

    els = [element(shape, v=zero_v, a=1, b=(rational(0),) * n)]
    for i in range(m - 1):
        els.append(element(shape, v=unit_v(i), a=msqrt2, b=_unit_b(shape, i, scale)))
    for i in range(m - 1, n - 1):
        els.append(element(shape, v=zero_v, a=msqrt2, b=_unit_b(shape, i, scale)))
    # last element: negative irrational coordinates against the basis
    # (the fresh symbol lives in the v part; the additive coordinate keeps
    # rational span coefficients so the element stays exactly representable)
    irr = rational(1) + rational(_PERT) * table.symbol(pert)
    neg_v = tuple(rational(-1) * irr for _ in range(m - 1))
    a_val = rational(m - 1) * table.symbol("sqrt2") - rational(2 * m)
    b_scale = Scalar.from_float(abs(1.0 - math.exp(-a_val.evaluate())))
    els.append(element(shape, v=neg_v, a=a_val, b=_unit_b(shape, n - 1, b_scale)))
    return GeneratorSpec("Hmn", m, n, "group", els, table)


def construct_minimal_generators(group: str, m: Optional[int], n: int,
                                 mode: str) -> GeneratorSpec:
    """The explicit minimal generating sets, free parameters pinned.

    Contracting multiplicative coordinates are fixed at 1/2 and expanding
    ones at 2 wherever the construction leaves them free; all-negative
    combinations carry a small fresh-symbol multiple so their coordinates
    are irrational.  Semigroup-mode sets are nonseparated; group-mode sets
    become nonseparated after symmetrization.
    """
    if group not in VALID_GROUPS or mode not in VALID_MODES:
        raise ValueError(f"group in {VALID_GROUPS}, mode in {VALID_MODES}")
    if group == "Gn":
        return _gn_semigroup(n) if mode == "semigroup" else _gn_group(n)
    if m is None or m < 1:
        raise ValueError("Hmn needs m >= 1")
    return _hmn_semigroup(m, n) if mode == "semigroup" else _hmn_group(m, n)


def symmetrize(S: Sequence[GroupElement]) -> List[GroupElement]:
    """S together with inverses; span-leaving inverses demote to float."""
    out = list(S)
    for x in S:
        try:
            out.append(inverse(x))
        except LeavesSpanError:
            out.append(inverse(x.demote_to_float()))
    return out
