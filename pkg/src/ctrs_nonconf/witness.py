"""Checking and (de)serializing non-confluence witnesses.

The checker trusts nothing the prover computed: removed rules are
re-justified one by one, both rewrite sequences are replayed against the
original system, and the non-joinability evidence is re-established.  It
uses only term operations, sequence validation, normal-form checks and
tcap; none of the prover's search code.

Structured documents are JSON (schema version 1).  Terms are nested
arrays ``[symbol, [args...]]``; variables are ``["var", name]``.
"""

from __future__ import annotations

import json
from typing import Any

from .analysis import (
    EvidenceKind,
    InfeasibilityCheck,
    NonJoinabilityEvidence,
    RemovedRule,
    tcap,
)
from .cops import CopsError, parse_cops, print_cops
from .ctrs import (
    Ctrs,
    Diagnosis,
    RewriteSequence,
    RewriteStep,
    is_normal_form,
    step_target,
    underlying_trs,
    validate_sequence,
)
from .nonconfluence import Method, Witness
from .terms import App, Term, Var, fresh_scope, unify, var_set

SCHEMA_VERSION = 1
REMOVAL_KIND = "infeasible-condition"


class WitnessFormatError(ValueError):
    def __init__(self, message: str, location: str = "$") -> None:
        self.location = location
        super().__init__(f"{location}: {message}")


class SchemaVersionError(WitnessFormatError):
    pass


# -- checking ----------------------------------------------------------------


def _root_symbols_reachable(start: str, U: Ctrs) -> set[str] | None:
    edges: dict[str, list[Term]] = {}
    for rule in U.rules:
        edges.setdefault(rule.lhs.symbol, []).append(rule.rhs)  # type: ignore[union-attr]
    seen = {start}
    todo = [start]
    while todo:
        for rhs in edges.get(todo.pop(), []):
            if isinstance(rhs, Var):
                return None
            if rhs.symbol not in seen:
                seen.add(rhs.symbol)
                todo.append(rhs.symbol)
    return seen


def _recheck_removal(R: Ctrs, alive: list[int], entry: RemovedRule) -> str | None:
    if entry.index not in alive:
        return f"removed rule {entry.index} does not exist or was already removed"
    rule = R.rules[entry.index]
    if not 0 <= entry.condition < len(rule.conditions):
        return f"rule {entry.index} has no condition {entry.condition}"
    s, t = rule.conditions[entry.condition]
    U = underlying_trs(Ctrs(tuple(R.rules[i] for i in alive)))
    if entry.check is InfeasibilityCheck.TCAP:
        if unify(tcap(s, U, avoid=var_set(s, t)), t) is not None:
            return f"rule {entry.index} condition {entry.condition}: tcap of {s} unifies with {t}"
        return None
    if entry.check is InfeasibilityCheck.ROOT_REACHABILITY:
        if not (isinstance(s, App) and isinstance(t, App)):
            return f"rule {entry.index} condition {entry.condition}: root check needs non-variable sides"
        closure = _root_symbols_reachable(s.symbol, U)
        if closure is None or t.symbol in closure:
            return f"rule {entry.index} condition {entry.condition}: {t.symbol} is root-reachable from {s.symbol}"
        return None
    return f"unknown infeasibility check {entry.check!r}"


def _method_shape(R: Ctrs, w: Witness) -> str | None:
    if w.method is Method.NARROWING:
        return None
    if len(w.left.steps) != 1 or len(w.right.steps) != 1:
        return f"{w.method.value} witness must consist of two single steps"
    ls, rs = w.left.steps[0], w.right.steps[0]
    if R.rules[ls.rule_index].conditions or R.rules[rs.rule_index].conditions:
        return f"{w.method.value} witness must use unconditional rules"
    if w.method is Method.URNF:
        if ls.position or rs.position or ls.rule_index != rs.rule_index:
            return "URNF witness must apply one rule twice at the root"
        if not R.rules[ls.rule_index].extra_variables():
            return "URNF rule has no extra variable"
        if w.evidence.kind is not EvidenceKind.DISTINCT_NORMAL_FORMS:
            return "URNF witness needs distinct-normal-form evidence"
        return None
    if rs.position:
        return "UCP witness: right step must be at the root"
    if ls.rule_index == rs.rule_index and not ls.position:
        return "UCP witness: root overlap of a rule with itself"
    return None


def check_witness(R: Ctrs, w: Witness) -> Diagnosis:
    """Independently verify that ``w`` proves ``R`` non-confluent."""
    with fresh_scope():
        return _check(R, w)


def _check(R: Ctrs, w: Witness) -> Diagnosis:
    if w.system != R:
        return Diagnosis(False, "witness refers to a different system")
    alive = list(range(len(R.rules)))
    for entry in w.removed_rules:
        problem = _recheck_removal(R, alive, entry)
        if problem:
            return Diagnosis(False, f"removed rules: {problem}")
        alive.remove(entry.index)
    for side, seq in (("left", w.left), ("right", w.right)):
        if seq.start != w.peak:
            return Diagnosis(False, f"{side} sequence starts at {seq.start}, not at the peak {w.peak}")
        verdict = validate_sequence(R, seq)
        if not verdict:
            return Diagnosis(False, f"{side} sequence: {verdict.reason}")
    if not w.left.steps and not w.right.steps:
        return Diagnosis(False, "both sequences are empty")
    left_end, right_end = w.left.end(R), w.right.end(R)
    if left_end == right_end:
        return Diagnosis(False, f"endpoints coincide: {left_end}")
    if (w.evidence.left, w.evidence.right) != (left_end, right_end):
        return Diagnosis(
            False,
            f"evidence endpoints {w.evidence.left}, {w.evidence.right} differ from "
            f"sequence endpoints {left_end}, {right_end}",
        )
    U = underlying_trs(Ctrs(tuple(R.rules[i] for i in alive)))
    if w.evidence.kind is EvidenceKind.DISTINCT_NORMAL_FORMS:
        for t in (left_end, right_end):
            if not is_normal_form(t, U):
                return Diagnosis(False, f"evidence: {t} is not a normal form")
    elif w.evidence.kind is EvidenceKind.TCAP_NON_UNIFIABLE:
        capped_l = tcap(left_end, U)
        capped_r = tcap(right_end, U, avoid=var_set(capped_l))
        if unify(capped_l, capped_r) is not None:
            return Diagnosis(False, f"evidence: tcaps {capped_l} and {capped_r} unify")
    else:
        return Diagnosis(False, f"unknown evidence kind {w.evidence.kind!r}")
    problem = _method_shape(R, w)
    if problem:
        return Diagnosis(False, problem)
    return Diagnosis(True)


# -- JSON encoding -----------------------------------------------------------


def term_to_json(t: Term) -> list:
    if isinstance(t, Var):
        return ["var", t.name]
    return [t.symbol, [term_to_json(a) for a in t.args]]


def term_from_json(data: Any, where: str = "$") -> Term:
    if not isinstance(data, list) or len(data) != 2 or not isinstance(data[0], str):
        raise WitnessFormatError("term must be a two-element array", where)
    head, body = data
    if isinstance(body, str):
        if head != "var":
            raise WitnessFormatError(f"unexpected string argument for {head!r}", where)
        return Var(body)
    if not isinstance(body, list):
        raise WitnessFormatError("term arguments must be an array", where)
    return App(head, tuple(term_from_json(a, f"{where}[1][{k}]") for k, a in enumerate(body)))


def _sequence_to_json(seq: RewriteSequence) -> dict:
    return {
        "start": term_to_json(seq.start),
        "steps": [
            {
                "position": list(step.position),
                "rule": step.rule_index,
                "subst": [[x, term_to_json(step.substitution[x])] for x in sorted(step.substitution)],
                "conditions": [_sequence_to_json(c) for c in step.condition_justifications],
            }
            for step in seq.steps
        ],
    }


def _field(data: dict, key: str, kind: type | tuple[type, ...], where: str) -> Any:
    if not isinstance(data, dict):
        raise WitnessFormatError("expected an object", where)
    if key not in data:
        raise WitnessFormatError(f"missing key {key!r}", where)
    value = data[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise WitnessFormatError(f"{key!r} has the wrong type", f"{where}.{key}")
    return value


def _sequence_from_json(data: Any, where: str) -> RewriteSequence:
    start = term_from_json(_field(data, "start", list, where), f"{where}.start")
    steps = []
    for k, raw in enumerate(_field(data, "steps", list, where)):
        at = f"{where}.steps[{k}]"
        position = _field(raw, "position", list, at)
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in position):
            raise WitnessFormatError("positions are integer arrays", f"{at}.position")
        subst = {}
        for b, pair in enumerate(_field(raw, "subst", list, at)):
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                raise WitnessFormatError("bindings are [name, term] pairs", f"{at}.subst[{b}]")
            subst[pair[0]] = term_from_json(pair[1], f"{at}.subst[{b}][1]")
        conditions = tuple(
            _sequence_from_json(c, f"{at}.conditions[{c_i}]")
            for c_i, c in enumerate(_field(raw, "conditions", list, at))
        )
        steps.append(RewriteStep(tuple(position), _field(raw, "rule", int, at), subst, conditions))
    return RewriteSequence(start, tuple(steps))


def witness_to_json(w: Witness, system_text: str | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "system": system_text if system_text is not None else print_cops(w.system),
        "method": w.method.value,
        "removed_rules": [
            {
                "index": r.index,
                "justification": {
                    "kind": REMOVAL_KIND,
                    "details": {"condition": r.condition, "check": r.check.value},
                },
            }
            for r in w.removed_rules
        ],
        "peak": term_to_json(w.peak),
        "left": _sequence_to_json(w.left),
        "right": _sequence_to_json(w.right),
        "evidence": {
            "kind": w.evidence.kind.value,
            "endpoints": [term_to_json(w.evidence.left), term_to_json(w.evidence.right)],
        },
    }


def witness_from_json(data: Any) -> Witness:
    if not isinstance(data, dict):
        raise WitnessFormatError("witness document must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema version {version!r}", "$.schema_version")
    text = _field(data, "system", str, "$")
    try:
        system = parse_cops(text)
    except CopsError as exc:
        raise WitnessFormatError(f"embedded system does not parse: {exc}", "$.system") from None
    try:
        method = Method(_field(data, "method", str, "$"))
    except ValueError:
        raise WitnessFormatError(f"unknown method {data['method']!r}", "$.method") from None
    removed = []
    for k, raw in enumerate(_field(data, "removed_rules", list, "$")):
        at = f"$.removed_rules[{k}]"
        just = _field(raw, "justification", dict, at)
        if _field(just, "kind", str, f"{at}.justification") != REMOVAL_KIND:
            raise WitnessFormatError(f"unknown justification kind {just['kind']!r}", f"{at}.justification.kind")
        details = _field(just, "details", dict, f"{at}.justification")
        try:
            check = InfeasibilityCheck(_field(details, "check", str, f"{at}.justification.details"))
        except ValueError:
            raise WitnessFormatError("unknown infeasibility check", f"{at}.justification.details.check") from None
        removed.append(
            RemovedRule(
                _field(raw, "index", int, at),
                _field(details, "condition", int, f"{at}.justification.details"),
                check,
            )
        )
    ev = _field(data, "evidence", dict, "$")
    try:
        kind = EvidenceKind(_field(ev, "kind", str, "$.evidence"))
    except ValueError:
        raise WitnessFormatError(f"unknown evidence kind {ev['kind']!r}", "$.evidence.kind") from None
    endpoints = _field(ev, "endpoints", list, "$.evidence")
    if len(endpoints) != 2:
        raise WitnessFormatError("evidence needs two endpoints", "$.evidence.endpoints")
    evidence = NonJoinabilityEvidence(
        kind,
        term_from_json(endpoints[0], "$.evidence.endpoints[0]"),
        term_from_json(endpoints[1], "$.evidence.endpoints[1]"),
    )
    return Witness(
        system=system,
        peak=term_from_json(_field(data, "peak", list, "$"), "$.peak"),
        left=_sequence_from_json(_field(data, "left", dict, "$"), "$.left"),
        right=_sequence_from_json(_field(data, "right", dict, "$"), "$.right"),
        evidence=evidence,
        method=method,
        removed_rules=tuple(removed),
    )


# -- text narration ----------------------------------------------------------


def _narrate_sequence(R: Ctrs, seq: RewriteSequence, indent: str) -> list[str]:
    lines = [f"{indent}{seq.start}"]
    current = seq.start
    for step in seq.steps:
        rule = R.rules[step.rule_index]
        target = step_target(R, current, step)
        where = "root" if not step.position else ".".join(map(str, step.position))
        lines.append(f"{indent}  -> {target}    [rule {step.rule_index + 1}: {rule} at {where}]")
        for j, just in enumerate(step.condition_justifications):
            s, t = rule.conditions[j]
            lines.append(f"{indent}     condition {j + 1} ({s} == {t}):")
            lines.extend(_narrate_sequence(R, just, indent + "       "))
        current = target
    return lines


def witness_to_text(w: Witness) -> str:
    R = w.system
    left_end, right_end = w.endpoints
    lines = [f"Non-confluence witness found by {w.method.value}."]
    for r in w.removed_rules:
        s, t = R.rules[r.index].conditions[r.condition]
        lines.append(
            f"Removed rule {r.index + 1} ({R.rules[r.index]}): condition {s} == {t} "
            f"is infeasible ({r.check.value})."
        )
    lines.append(f"Peak: {w.peak}")
    lines.append("Left sequence:")
    lines += _narrate_sequence(R, w.left, "  ")
    lines.append("Right sequence:")
    lines += _narrate_sequence(R, w.right, "  ")
    if w.evidence.kind is EvidenceKind.DISTINCT_NORMAL_FORMS:
        reason = "are distinct normal forms of the underlying TRS"
    else:
        reason = "have non-unifiable tcaps with respect to the underlying TRS"
    lines.append(f"Endpoints {left_end} and {right_end} {reason}, so they are not joinable.")
    return "\n".join(lines) + "\n"


def emit_witness(w: Witness, format: str = "structured", system_text: str | None = None) -> bytes:
    """Serialize ``w`` as a JSON document (``structured``) or a readable proof (``text``)."""
    if format == "structured":
        doc = witness_to_json(w, system_text)
        return (json.dumps(doc, indent=1, ensure_ascii=False) + "\n").encode("utf-8")
    if format == "text":
        return witness_to_text(w).encode("utf-8")
    raise ValueError(f"unknown witness format {format!r}")


def parse_witness(data: bytes | str) -> Witness:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WitnessFormatError(f"not UTF-8 at byte {exc.start}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise WitnessFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return witness_from_json(doc)
