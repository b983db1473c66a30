"""Batch command line front end.

One command per process.  Exit codes: 0 nonseparated (or plain success),
2 separated (or a failed example check), 3 marginal verdict, 1 usage or
parse errors.  ``--format structured`` emits a versioned JSON envelope
instead of text.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import density, explorer, limits
from .documents import (DocumentError, InputDocument, element_ref,
                        load_document, serialize_document)
from .groups import GroupShape
from .scalars import format_scalar, z_linearly_independent
from .separation import (SeparationVerdict, TypeIFunctional, TypeIIFunctional,
                         decide_separation)

SCHEMA = "solvsemi/1"
DEFAULT_SEED = 20130831

EXIT_NONSEPARATED = 0
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SEPARATED = 2
EXIT_MARGINAL = 3


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if hasattr(x, "evaluate"):
        return format_scalar(x)
    return x


def _verdict_payload(v: SeparationVerdict) -> dict:
    payload = {"separated": v.separated, "marginal": v.marginal}
    if v.witness is not None:
        if isinstance(v.witness, TypeIFunctional):
            payload["witness"] = {"type": "abelianization",
                                  "g": _jsonable(list(v.witness.g))}
        elif isinstance(v.witness, TypeIIFunctional):
            payload["witness"] = {"type": "fiber-halfspace",
                                  "gamma": _jsonable(list(v.witness.gamma)),
                                  "mu": _jsonable(v.witness.mu)}
    if v.hull_certificates is not None:
        w1, w2 = v.hull_certificates
        payload["hull_certificates"] = {
            "abelianization_weights": _jsonable(list(w1)),
            "fiber_weights": _jsonable(list(w2)),
        }
    return payload


def _emit(args, command: str, payload: dict, code: int, text_lines) -> int:
    if args.format == "structured":
        print(json.dumps({"schema": SCHEMA, "command": command,
                          "exit_code": code, "result": _jsonable(payload)},
                         indent=2))
    else:
        for line in text_lines:
            print(line)
    return code


def _verdict_exit(v: SeparationVerdict) -> int:
    if v.marginal:
        return EXIT_MARGINAL
    return EXIT_SEPARATED if v.separated else EXIT_NONSEPARATED


def cmd_check(args) -> int:
    doc = load_document(args.file)
    if args.set not in doc.sets:
        raise DocumentError(f"no set named {args.set!r}")
    v = decide_separation(doc.sets[args.set], marginal_tol=args.tol * 100)
    code = _verdict_exit(v)
    lines = [f"{'separated' if v.separated else 'nonseparated'}"
             + (" (marginal)" if v.marginal else "")]
    payload = _verdict_payload(v)
    if v.witness is not None:
        lines.append(f"witness: {payload['witness']}")
    if v.hull_certificates is not None:
        lines.append("hull certificates: strictly positive weights for both "
                     "functional families")
    return _emit(args, "check", payload, code, lines)


def cmd_limit(args) -> int:
    doc = load_document(args.file)
    z0 = element_ref(doc, args.z0)
    z = element_ref(doc, args.z)
    S = doc.sets.get(args.set, []) if args.set else []
    req = limits.LimitRequest(S, z0, z)
    target = limits.limit_element(req)
    trace = limits.realize_limit(req, tol=args.tol, max_t=args.max_t)
    if args.out:
        limits.trace_to_csv(trace, args.out)
    payload = {
        "target": {"a_mult": format_scalar(target.a_mult),
                   "b": [format_scalar(s) for s in target.b]},
        "achieved": trace.achieved,
        "final_distance": trace.final_distance,
        "steps": len(trace.steps),
        "weights": list(trace.weights),
    }
    lines = [
        "target: (" + ", ".join(format_scalar(s) for s in target.b) + ")",
        f"achieved distance {trace.final_distance:.3e} in {len(trace.steps)} "
        f"recorded steps" + ("" if trace.achieved else " (tolerance not reached)"),
    ]
    if args.out:
        lines.append(f"trace written to {args.out}")
    return _emit(args, "limit", payload, EXIT_OK if trace.achieved else EXIT_SEPARATED,
                 lines)


def cmd_densify(args) -> int:
    doc = load_document(args.file)
    if args.set not in doc.sets:
        raise DocumentError(f"no set named {args.set!r}")
    els = doc.sets[args.set]
    if args.kind == "euclidean":
        out = density.densify_euclidean([x.b for x in els], args.epsilon)
        payload = {
            "perturbed_index": out.perturbed_index,
            "certificate": {
                "dense": out.certificate.dense,
                "independent_values": _jsonable(out.certificate.independent_values),
            },
            "audit": [{"op": s.op, **_jsonable(s.detail)} for s in out.audit],
        }
        lines = [f"dense: {out.certificate.dense}",
                 f"perturbed index: {out.perturbed_index}"]
        return _emit(args, "densify", payload, EXIT_OK, lines)
    out = density.densify_hmn(els, args.epsilon)
    payload = {
        "branch": out.certificate.branch,
        "word": list(out.word),
        "independent_values": _jsonable(out.certificate.independent_values),
        "projection": _jsonable(out.certificate.projection),
        "verified": density.verify_certificate(out.certificate),
        "audit": [{"op": s.op, **_jsonable(s.detail)} for s in out.audit],
    }
    lines = [f"branch: {out.certificate.branch}",
             f"certificate verified: {payload['verified']}"]
    return _emit(args, "densify", payload, EXIT_OK, lines)


def cmd_kronecker(args) -> int:
    doc = load_document(args.file)
    if args.set not in doc.sets:
        raise DocumentError(f"no set named {args.set!r}")
    el = doc.sets[args.set][args.element]
    values = list(el.b)
    dense = z_linearly_independent(values, include_unit=True)
    payload = {"dense": dense, "values": _jsonable(values)}
    return _emit(args, "kronecker", payload, EXIT_OK if dense else EXIT_SEPARATED,
                 [f"dense: {str(dense).lower()}"])


def cmd_generators(args) -> int:
    spec = density.construct_minimal_generators(args.group, args.m, args.n, args.mode)
    S = spec.elements if args.mode == "semigroup" else density.symmetrize(spec.elements)
    verdict = decide_separation(S)
    payload = {
        "group": args.group, "m": spec.m, "n": spec.n, "mode": args.mode,
        "count": len(spec.elements),
        "minimal_count": density.minimal_count(args.group, args.m, args.n, args.mode),
        "nonseparated": not verdict.separated,
        "elements": [{"v": [format_scalar(s) for s in x.v],
                      "a_mult": format_scalar(x.a_mult),
                      "a": None if x.a_add is None else format_scalar(x.a_add),
                      "b": [format_scalar(s) for s in x.b]}
                     for x in spec.elements],
    }
    lines = [f"{len(spec.elements)} generators "
             f"(minimum {payload['minimal_count']}) for {args.group} "
             f"m={spec.m} n={spec.n} as closed {args.mode}"]
    for el in payload["elements"]:
        a_part = el["a"] if el["a"] is not None else f"a_mult={el['a_mult']}"
        lines.append(f"  ({', '.join(el['v'])}; {a_part}; {', '.join(el['b'])})")
    lines.append(f"verified nonseparated ({'symmetrized' if args.mode == 'group' else 'as is'}): "
                 f"{payload['nonseparated']}")
    if args.out:
        model = ("additive" if all(x.a_add is not None for x in spec.elements)
                 else "multiplicative")
        doc = InputDocument(GroupShape(spec.m, spec.n), spec.table, model,
                            {"generators": spec.elements}, {})
        with open(args.out, "w") as fh:
            fh.write(serialize_document(doc))
        lines.append(f"document written to {args.out}")
    code = EXIT_OK if payload["nonseparated"] else EXIT_SEPARATED
    return _emit(args, "generators", payload, code, lines)


def cmd_explore(args) -> int:
    doc = load_document(args.file)
    if args.set not in doc.sets:
        raise DocumentError(f"no set named {args.set!r}")
    gens = doc.sets[args.set]
    orbit = explorer.enumerate_words(gens, args.max_length)
    payload = {"elements": len(orbit), "max_length": args.max_length}
    lines = [f"{len(orbit)} distinct elements at word length <= {args.max_length}"]
    if args.witnesses:
        wit = explorer.quadrant_witnesses(gens, args.threshold, args.max_length)
        payload["quadrant_witnesses"] = {
            q: (list(w) if w != "not found" else w) for q, w in wit.items()}
        for q, w in wit.items():
            word = ".".join(str(i) for i in w) if w != "not found" else w
            lines.append(f"quadrant {q}: {word}")
    if args.out:
        explorer.export_orbit_csv(orbit, args.out)
        lines.append(f"cloud written to {args.out}")
    return _emit(args, "explore", payload, EXIT_OK, lines)


def cmd_examples(args) -> int:
    ex = explorer.builtin_example(args.name)
    verdict = decide_separation(ex.generators)
    orbit = explorer.enumerate_words(ex.generators, args.max_length)
    report = explorer.check_predicate(orbit, ex.predicate, ex.excluded)
    payload = {
        "example": args.name,
        "model": ex.model,
        "nonseparated": not verdict.separated,
        "orbit_size": len(orbit),
        "predicate": report.predicate,
        "violations": [{"word": list(w), "reason": r} for w, r in report.violations],
        "excluded_inverse_fails": report.excluded_fails,
        "all_pass": report.all_pass,
    }
    lines = [
        f"{args.name} ({ex.model} model): "
        f"{'nonseparated' if payload['nonseparated'] else 'separated'}",
        f"orbit: {len(orbit)} elements at length <= {args.max_length}",
        f"predicate {report.predicate}: "
        f"{'all pass' if not report.violations else f'{len(report.violations)} violations'}",
        f"excluded inverse fails predicate: {report.excluded_fails}",
    ]
    ok = payload["nonseparated"] and report.all_pass
    return _emit(args, "examples", payload, EXIT_OK if ok else EXIT_SEPARATED, lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="solvsemi",
        description="separation, limits and density computations in "
                    "R^(m-1) x G_n")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="seed for randomized operations (fixed default)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide separation of a named set")
    c.add_argument("file")
    c.add_argument("--set", required=True)
    c.add_argument("--tol", type=float, default=1e-9)
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("limit", help="limit element and its realization trace")
    c.add_argument("file")
    c.add_argument("--z0", required=True, metavar="SET[i]")
    c.add_argument("--z", required=True, metavar="SET[i]")
    c.add_argument("--set", default=None)
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--max-t", type=int, default=10 ** 6, dest="max_t")
    c.add_argument("--out", default=None)
    c.set_defaults(fn=cmd_limit)

    c = sub.add_parser("densify", help="perturb a set into a certified dense one")
    c.add_argument("file")
    c.add_argument("--set", required=True)
    c.add_argument("--epsilon", type=float, default=1e-3)
    c.add_argument("--kind", choices=("hmn", "euclidean"), default="hmn")
    c.set_defaults(fn=cmd_densify)

    c = sub.add_parser("kronecker", help="torus-orbit density of an element's "
                                         "fiber vector")
    c.add_argument("file")
    c.add_argument("--set", required=True)
    c.add_argument("--element", type=int, default=0)
    c.set_defaults(fn=cmd_kronecker)

    c = sub.add_parser("generators", help="emit a minimal generating set")
    c.add_argument("--group", choices=("Gn", "Hmn"), required=True)
    c.add_argument("--m", type=int, default=None)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--mode", choices=("semigroup", "group"), required=True)
    c.add_argument("--out", default=None)
    c.set_defaults(fn=cmd_generators)

    c = sub.add_parser("explore", help="bounded word enumeration and export")
    c.add_argument("file")
    c.add_argument("--set", required=True)
    c.add_argument("--max-length", type=int, default=12, dest="max_length")
    c.add_argument("--threshold", type=float, default=10.0)
    c.add_argument("--witnesses", action="store_true")
    c.add_argument("--out", default=None)
    c.set_defaults(fn=cmd_explore)

    c = sub.add_parser("examples", help="run a built-in example semigroup")
    c.add_argument("name", choices=("ex31", "ex32", "ex33"))
    c.add_argument("--max-length", type=int, default=8, dest="max_length")
    c.set_defaults(fn=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (DocumentError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, density.SeparatedInputError,
            density.PipelineError, limits.ProjectionSeparatedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
