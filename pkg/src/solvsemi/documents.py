"""The JSON input-document format shared by every CLI command.

A document declares the shape once, a symbol table once, the coordinate
model for first coordinates ("multiplicative" uses ``a_mult``, "additive"
uses ``a``), named element sets, and options.  Scalars are strings in the
scalar text syntax ("1/2", "1/2*sqrt2 + 1", "float:1.25").

    {
      "shape": {"m": 1, "n": 1},
      "model": "multiplicative",
      "symbols": {"sqrt3": 1.7320508075688772},
      "sets": {"S": [{"a_mult": "2", "b": ["sqrt3"]}]},
      "options": {"tol": 1e-9}
    }

Serialization normalizes ordering, so serialize(parse(text)) is a fixed
point after one pass.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .groups import GroupElement, GroupShape, element
from .scalars import SymbolTable, format_scalar, parse_scalar

__all__ = ["InputDocument", "DocumentError", "parse_document", "load_document",
           "serialize_document", "element_ref"]

MODELS = ("multiplicative", "additive")


class DocumentError(ValueError):
    """Malformed input document; the message carries location context."""


@dataclass
class InputDocument:
    shape: GroupShape
    table: SymbolTable
    model: str
    sets: Dict[str, List[GroupElement]]
    options: dict = field(default_factory=dict)


def _parse_element(raw: dict, shape: GroupShape, table: SymbolTable,
                   model: str, where: str) -> GroupElement:
    if not isinstance(raw, dict):
        raise DocumentError(f"{where}: element must be an object")
    key = "a_mult" if model == "multiplicative" else "a"
    other = "a" if model == "multiplicative" else "a_mult"
    if key not in raw:
        raise DocumentError(f"{where}: missing {key!r} (model is {model})")
    if other in raw:
        raise DocumentError(f"{where}: {other!r} not allowed in {model} model")
    try:
        v = [parse_scalar(s, table) for s in raw.get("v", [])]
        b = [parse_scalar(s, table) for s in raw.get("b", [])]
        first = parse_scalar(raw[key], table)
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from exc
    try:
        if model == "multiplicative":
            return element(shape, v=v, a_mult=first, b=b)
        return element(shape, v=v, a=first, b=b)
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def parse_document(text: str) -> InputDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise DocumentError("document root must be an object")
    try:
        shape = GroupShape(int(raw["shape"]["m"]), int(raw["shape"]["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"shape: {exc}") from exc
    model = raw.get("model", "multiplicative")
    if model not in MODELS:
        raise DocumentError(f"model must be one of {MODELS}")
    try:
        table = SymbolTable(raw.get("symbols", {}))
    except ValueError as exc:
        raise DocumentError(f"symbols: {exc}") from exc
    sets_raw = raw.get("sets", {})
    if not isinstance(sets_raw, dict):
        raise DocumentError("sets: must be an object of named element lists")
    sets = {}
    for name, items in sets_raw.items():
        if not isinstance(items, list):
            raise DocumentError(f"sets.{name}: must be a list")
        sets[name] = [
            _parse_element(it, shape, table, model, f"sets.{name}[{i}]")
            for i, it in enumerate(items)
        ]
    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise DocumentError("options: must be an object")
    return InputDocument(shape, table, model, sets, options)


def load_document(path) -> InputDocument:
    with open(path) as fh:
        return parse_document(fh.read())


def _element_to_raw(x: GroupElement, model: str) -> dict:
    out: dict = {}
    if x.v:
        out["v"] = [format_scalar(s) for s in x.v]
    if model == "additive":
        if x.a_add is None:
            raise DocumentError("element has no additive coordinate; "
                                "serialize with the multiplicative model")
        out["a"] = format_scalar(x.a_add)
    else:
        out["a_mult"] = format_scalar(x.a_mult)
    out["b"] = [format_scalar(s) for s in x.b]
    return out


def serialize_document(doc: InputDocument) -> str:
    raw = {
        "shape": {"m": doc.shape.m, "n": doc.shape.n},
        "model": doc.model,
        "symbols": dict(sorted(doc.table.entries.items())),
        "sets": {name: [_element_to_raw(x, doc.model) for x in els]
                 for name, els in sorted(doc.sets.items())},
        "options": dict(sorted(doc.options.items())),
    }
    return json.dumps(raw, indent=2, sort_keys=False) + "\n"


_REF_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\[(\d+)\]$")


def element_ref(doc: InputDocument, ref: str) -> GroupElement:
    """Resolve a "SET[index]" reference into a document element."""
    m = _REF_RE.match(ref.strip())
    if not m:
        raise DocumentError(f"bad element reference {ref!r}; use NAME[i]")
    name, idx = m.group(1), int(m.group(2))
    if name not in doc.sets:
        raise DocumentError(f"no set named {name!r}")
    items = doc.sets[name]
    if idx >= len(items):
        raise DocumentError(f"{name} has {len(items)} elements; index {idx} "
                            "out of range")
    return items[idx]
