"""Exact scalars over a declared rational span, with a float fallback.

An exact scalar is a Q-linear combination of the rational unit and the
symbols of a :class:`SymbolTable`.  Symbols are user-declared irrational
constants carrying a float approximation; the library trusts the
declaration that the symbols together with 1 are Q-linearly independent
(it does not prove that sqrt2 is irrational).  Under that trust, equality
and Z-linear independence of exact scalars are decided exactly; signs of
genuinely mixed values are read off the float evaluation.

Products of two exact scalars are only defined when at least one factor is
rational, so the span is never left silently; use :meth:`Scalar.to_float`
to demote explicitly.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from . import qlinalg

ONE = "one"

_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class LeavesSpanError(ArithmeticError):
    """Raised when an exact operation would leave the declared rational span."""


class TableMismatchError(ValueError):
    """Raised when scalars over incompatible symbol tables are combined."""


class SymbolTable:
    """Declared irrational constants: label -> float approximation."""

    def __init__(self, entries=None):
        entries = dict(entries or {})
        for label, approx in entries.items():
            if label == ONE:
                raise ValueError("label 'one' is reserved for the rational unit")
            if not _LABEL_RE.match(label):
                raise ValueError(f"bad symbol label {label!r}")
            approx = float(approx)
            if not math.isfinite(approx) or approx == 0.0:
                raise ValueError(f"symbol {label!r} needs a finite nonzero approximation")
            entries[label] = approx
        self._entries = entries

    @property
    def entries(self):
        return dict(self._entries)

    def labels(self):
        return list(self._entries)

    def approx(self, label: str) -> float:
        if label == ONE:
            return 1.0
        return self._entries[label]

    def __contains__(self, label):
        return label in self._entries

    def __eq__(self, other):
        return isinstance(other, SymbolTable) and self._entries == other._entries

    def __repr__(self):
        return f"SymbolTable({self._entries!r})"

    def extends(self, other: "SymbolTable") -> bool:
        """True if this table contains every entry of ``other`` unchanged."""
        return all(self._entries.get(k) == v for k, v in other._entries.items())

    def extended(self, extra) -> "SymbolTable":
        merged = dict(self._entries)
        for label, approx in dict(extra).items():
            if label in merged and merged[label] != float(approx):
                raise ValueError(f"symbol {label!r} redeclared with a different value")
            merged[label] = approx
        return SymbolTable(merged)

    def symbol(self, label: str) -> "Scalar":
        if label not in self._entries:
            raise KeyError(f"symbol {label!r} not declared")
        return Scalar._exact(self, {label: Fraction(1)})

    def rational(self, p, q=1) -> "Scalar":
        return Scalar._exact(self, {ONE: Fraction(p, q)})

    def parse(self, text: str) -> "Scalar":
        return parse_scalar(text, self)


EMPTY_TABLE = SymbolTable({})

# Fresh perturbation symbols are square roots of successive primes not
# already used; distinct square-free roots are independent over Q.
_FRESH_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107)


def fresh_symbols(table: SymbolTable, count: int, prefix: str = "pert"):
    """Extend ``table`` with ``count`` new independent irrationals.

    Returns (extended table, list of new labels).  Values are sqrt(p) for
    primes p whose root value is not already declared.
    """
    used_values = set(table.entries.values())
    used_labels = set(table.labels())
    extra = {}
    labels = []
    idx = 1
    prime_iter = iter(_FRESH_PRIMES)
    while len(labels) < count:
        p = next(prime_iter)
        val = math.sqrt(p)
        if val in used_values:
            continue
        while f"{prefix}{idx}" in used_labels:
            idx += 1
        label = f"{prefix}{idx}"
        idx += 1
        extra[label] = val
        used_values.add(val)
        used_labels.add(label)
        labels.append(label)
    return table.extended(extra), labels


def _merge_tables(x: "Scalar", y: "Scalar") -> SymbolTable:
    tx, ty = x.table, y.table
    if tx is ty or tx == ty:
        return tx
    if tx.extends(ty):
        return tx
    if ty.extends(tx):
        return ty
    # purely rational scalars are table-agnostic
    if x.is_rational:
        return ty
    if y.is_rational:
        return tx
    raise TableMismatchError("scalars declared over incompatible symbol tables")


class Scalar:
    """Exact span element (coefficient map) or binary64 fallback."""

    __slots__ = ("table", "coeffs", "value")

    def __init__(self, *_args, **_kw):
        raise TypeError("use rational()/from_float()/SymbolTable.symbol()")

    @classmethod
    def _exact(cls, table, coeffs) -> "Scalar":
        self = object.__new__(cls)
        self.table = table
        self.coeffs = {k: Fraction(v) for k, v in coeffs.items() if v != 0}
        self.value = None
        return self

    @classmethod
    def from_float(cls, value) -> "Scalar":
        value = float(value)
        if not math.isfinite(value):
            raise ValueError("float scalar must be finite")
        self = object.__new__(cls)
        self.table = EMPTY_TABLE
        self.coeffs = None
        self.value = value
        return self

    # -- predicates -------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.coeffs is not None

    @property
    def is_float(self) -> bool:
        return self.coeffs is None

    @property
    def is_rational(self) -> bool:
        return self.coeffs is not None and all(k == ONE for k in self.coeffs)

    @property
    def is_zero(self) -> bool:
        if self.is_exact:
            return not self.coeffs
        return self.value == 0.0

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not a rational scalar")
        return self.coeffs.get(ONE, Fraction(0))

    def coefficient(self, label: str) -> Fraction:
        if not self.is_exact:
            raise ValueError("float scalar has no exact coefficients")
        return self.coeffs.get(label, Fraction(0))

    def evaluate(self) -> float:
        if self.is_float:
            return self.value
        return float(sum(float(c) * self.table.approx(k) for k, c in self.coeffs.items()))

    def to_float(self) -> "Scalar":
        """Explicit demotion to the float fallback."""
        return Scalar.from_float(self.evaluate())

    def sign(self) -> int:
        """Sign of the value: exact for rationals, via evaluation otherwise."""
        if self.is_rational:
            r = self.rational_value()
            return (r > 0) - (r < 0)
        v = self.evaluate()
        return (v > 0) - (v < 0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = as_scalar(other)
        if self.is_exact and other.is_exact:
            table = _merge_tables(self, other)
            coeffs = dict(self.coeffs)
            for k, v in other.coeffs.items():
                coeffs[k] = coeffs.get(k, Fraction(0)) + v
            return Scalar._exact(table, coeffs)
        return Scalar.from_float(self.evaluate() + other.evaluate())

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact:
            return Scalar._exact(self.table, {k: -v for k, v in self.coeffs.items()})
        return Scalar.from_float(-self.value)

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        if self.is_exact and other.is_exact:
            table = _merge_tables(self, other)
            if self.is_rational:
                r = self.rational_value()
                return Scalar._exact(table, {k: r * v for k, v in other.coeffs.items()})
            if other.is_rational:
                r = other.rational_value()
                return Scalar._exact(table, {k: r * v for k, v in self.coeffs.items()})
            raise LeavesSpanError(
                "product of two irrational span elements leaves span; "
                "demote one factor with to_float() if a float result is acceptable")
        return Scalar.from_float(self.evaluate() * other.evaluate())

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_scalar(other)
        if other.is_zero:
            raise ZeroDivisionError("scalar division by zero")
        if self.is_exact and other.is_exact:
            if other.is_rational:
                r = other.rational_value()
                return Scalar._exact(_merge_tables(self, other),
                                     {k: v / r for k, v in self.coeffs.items()})
            raise LeavesSpanError("division by an irrational span element leaves span")
        return Scalar.from_float(self.evaluate() / other.evaluate())

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, t: int):
        if not isinstance(t, int):
            raise TypeError("scalar powers take integer exponents")
        if t == 0:
            return rational(1)
        if t == 1:
            return self
        if self.is_rational:
            return Scalar._exact(self.table, {ONE: self.rational_value() ** t})
        if self.is_float:
            return Scalar.from_float(self.value ** t)
        raise LeavesSpanError("integer power of an irrational span element leaves span")

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparisons ------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, (Scalar, int, Fraction, float)):
            return NotImplemented
        other = as_scalar(other)
        if self.is_exact and other.is_exact:
            try:
                _merge_tables(self, other)
            except TableMismatchError:
                return False
            return self.coeffs == other.coeffs
        return self.evaluate() == other.evaluate()

    def __hash__(self):
        if self.is_exact:
            return hash(frozenset(self.coeffs.items()))
        return hash(self.value)

    def _cmp(self, other) -> int:
        return (self - as_scalar(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        return f"Scalar({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


def rational(p, q=1) -> Scalar:
    return Scalar._exact(EMPTY_TABLE, {ONE: Fraction(p, q)})


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return rational(x)
    if isinstance(x, float):
        return Scalar.from_float(x)
    raise TypeError(f"cannot interpret {x!r} as a scalar")


# -- text syntax ----------------------------------------------------------
#
#   "p/q", "p/q*sqrt2 + r/s", "float:1.25"; terms joined by + or -,
#   each term a rational, a symbol, or rational*symbol.

_TERM_RE = re.compile(
    r"^\s*(?:(?P<coef>[+-]?\d+(?:/\d+)?)\s*(?:\*\s*(?P<sym1>[A-Za-z_][A-Za-z0-9_]*))?"
    r"|(?P<sym2>[A-Za-z_][A-Za-z0-9_]*))\s*$")


def parse_scalar(text: str, table: SymbolTable = EMPTY_TABLE) -> Scalar:
    text = text.strip()
    if not text:
        raise ValueError("empty scalar literal")
    if text.startswith("float:"):
        return Scalar.from_float(float(text[len("float:"):]))
    # split into signed terms at top level
    terms = []
    buf = ""
    sign = 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "+-" and buf.strip():
            terms.append((sign, buf))
            sign = 1 if ch == "+" else -1
            buf = ""
        elif ch in "+-" and not buf.strip():
            if ch == "-":
                sign = -sign
        else:
            buf += ch
        i += 1
    if buf.strip():
        terms.append((sign, buf))
    if not terms:
        raise ValueError(f"cannot parse scalar literal {text!r}")
    coeffs: dict = {}
    for sgn, term in terms:
        m = _TERM_RE.match(term)
        if not m:
            raise ValueError(f"cannot parse scalar term {term.strip()!r}")
        if m.group("sym2"):
            label, coef = m.group("sym2"), Fraction(1)
        else:
            coef = Fraction(m.group("coef"))
            label = m.group("sym1") or ONE
        if label != ONE and label not in table:
            raise ValueError(f"symbol {label!r} not declared in the symbol table")
        coeffs[label] = coeffs.get(label, Fraction(0)) + sgn * coef
    return Scalar._exact(table, coeffs)


def format_scalar(x: Scalar) -> str:
    if x.is_float:
        return f"float:{x.value!r}"
    if not x.coeffs:
        return "0"
    parts = []
    for label in sorted(x.coeffs, key=lambda k: (k != ONE, k)):
        c = x.coeffs[label]
        term = str(c) if label == ONE else f"{c}*{label}"
        if not parts:
            parts.append(term)
        elif term.startswith("-"):
            parts.append(f"- {term[1:]}")
        else:
            parts.append(f"+ {term}")
    return " ".join(parts)


# -- Z-linear independence -------------------------------------------------


def z_linearly_independent(values, include_unit: bool = True) -> bool:
    """Exact Z-linear independence of the given exact scalars.

    With ``include_unit`` the unit 1 is prepended to the list.  For finitely
    many reals in the declared span, Z-independence coincides with
    Q-independence, which is the full row rank of the rational coefficient
    matrix over the basis {1} + symbols.  Float scalars are rejected: no
    exact certificate is possible for them.
    """
    values = [as_scalar(v) for v in values]
    if any(v.is_float for v in values):
        raise ValueError("z_linearly_independent needs exact scalars")
    table = EMPTY_TABLE
    for v in values:
        if not table.extends(v.table):
            if v.table.extends(table):
                table = v.table
            else:
                raise TableMismatchError("values declared over incompatible symbol tables")
    labels = [ONE] + table.labels()
    rows = []
    if include_unit:
        rows.append([Fraction(int(lbl == ONE)) for lbl in labels])
    for v in values:
        rows.append([v.coeffs.get(lbl, Fraction(0)) for lbl in labels])
    return qlinalg.rank(rows) == len(rows)
