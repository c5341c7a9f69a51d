"""Oriented conditional rewrite systems and level-bounded conditional rewriting.

Level accounting follows the usual hierarchy ``R_0 = ∅``: an unconditional
rule fires at every level ``>= 1``; a conditional rule fires at level ``l``
when each condition ``s ≈ t`` has ``sσ ->* tσ`` at level ``l - 1``.  At
level 0 nothing rewrites, so conditions evaluated there hold only when both
sides are syntactically equal.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import IntEnum

from .terms import (
    App,
    Position,
    PositionError,
    Substitution,
    Term,
    Var,
    apply,
    function_positions,
    match_term,
    rename,
    replace_at,
    subterm_at,
    var_set,
    variables,
)

Condition = tuple[Term, Term]


class ArityError(ValueError):
    """A symbol is used with two different arities."""


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    conditions: tuple[Condition, ...] = ()
    label: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if isinstance(self.lhs, Var):
            raise ValueError(f"left-hand side of a rule must not be a variable: {self.lhs}")
        object.__setattr__(self, "conditions", tuple(tuple(c) for c in self.conditions))

    @property
    def is_conditional(self) -> bool:
        return bool(self.conditions)

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self.terms():
            for x in variables(t):
                seen.setdefault(x)
        return list(seen)

    def terms(self) -> list[Term]:
        out = [self.lhs, self.rhs]
        for s, t in self.conditions:
            out += [s, t]
        return out

    def rename(self, renaming: Mapping[str, str]) -> Rule:
        return self.apply({x: Var(y) for x, y in renaming.items()})

    def apply(self, sigma: Mapping[str, Term]) -> Rule:
        return Rule(
            apply(self.lhs, sigma),
            apply(self.rhs, sigma),
            tuple((apply(s, sigma), apply(t, sigma)) for s, t in self.conditions),
            self.label,
        )

    def unconditional(self) -> Rule:
        return Rule(self.lhs, self.rhs, (), self.label)

    def extra_variables(self) -> list[str]:
        """Variables of the rhs that do not occur in the lhs."""
        left = var_set(self.lhs)
        return [x for x in variables(self.rhs) if x not in left]

    def __str__(self) -> str:
        text = f"{self.lhs} -> {self.rhs}"
        if self.conditions:
            text += " | " + ", ".join(f"{s} == {t}" for s, t in self.conditions)
        return text


def _signature(rules: Iterable[Rule]) -> dict[str, int]:
    sig: dict[str, int] = {}

    def visit(t: Term) -> None:
        if isinstance(t, App):
            known = sig.setdefault(t.symbol, len(t.args))
            if known != len(t.args):
                raise ArityError(f"symbol {t.symbol!r} used with arities {known} and {len(t.args)}")
            for a in t.args:
                visit(a)

    for rule in rules:
        for t in rule.terms():
            visit(t)
    return sig


@dataclass(frozen=True)
class Ctrs:
    rules: tuple[Rule, ...] = ()
    signature: dict[str, int] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "signature", _signature(self.rules))

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def is_unconditional(self) -> bool:
        return not any(r.conditions for r in self.rules)

    def without(self, indices: Iterable[int]) -> Ctrs:
        drop = set(indices)
        return Ctrs(tuple(r for i, r in enumerate(self.rules) if i not in drop))


class CtrsType(IntEnum):
    ONE = 1
    TWO = 2
    THREE = 3
    FOUR = 4


def rule_type(rule: Rule) -> CtrsType:
    lhs = var_set(rule.lhs)
    rhs = var_set(rule.rhs)
    conds = var_set(*[t for c in rule.conditions for t in c])
    if rhs | conds <= lhs:
        return CtrsType.ONE
    if rhs <= lhs:
        return CtrsType.TWO
    if rhs <= lhs | conds:
        return CtrsType.THREE
    return CtrsType.FOUR


def classify(R: Ctrs) -> CtrsType:
    """Least type whose variable condition every rule of ``R`` satisfies."""
    return max((rule_type(r) for r in R.rules), default=CtrsType.ONE)


def underlying_trs(R: Ctrs) -> Ctrs:
    return Ctrs(tuple(r.unconditional() for r in R.rules))


# -- rewrite steps and sequences ---------------------------------------------


@dataclass(frozen=True)
class RewriteStep:
    position: Position
    rule_index: int
    substitution: Substitution
    condition_justifications: tuple[RewriteSequence, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", tuple(self.position))
        object.__setattr__(self, "condition_justifications", tuple(self.condition_justifications))


@dataclass(frozen=True)
class RewriteSequence:
    start: Term
    steps: tuple[RewriteStep, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def terms(self, R: Ctrs) -> list[Term]:
        """The chain of terms visited; does not check conditions."""
        out = [self.start]
        for step in self.steps:
            out.append(step_target(R, out[-1], step))
        return out

    def end(self, R: Ctrs) -> Term:
        return self.terms(R)[-1]


def step_target(R: Ctrs, source: Term, step: RewriteStep) -> Term:
    rule = R.rules[step.rule_index]
    return replace_at(source, step.position, apply(rule.rhs, step.substitution))


@dataclass(frozen=True)
class Diagnosis:
    """Outcome of a check; falsy when the check failed."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_sequence(R: Ctrs, seq: RewriteSequence, _path: str = "") -> Diagnosis:
    """Check every step of ``seq`` against ``R``, recursing into condition justifications."""
    current = seq.start
    for k, step in enumerate(seq.steps):
        where = f"{_path}step {k}"
        if not 0 <= step.rule_index < len(R.rules):
            return Diagnosis(False, f"{where}: rule index {step.rule_index} out of range")
        rule = R.rules[step.rule_index]
        try:
            redex = subterm_at(current, step.position)
        except PositionError:
            return Diagnosis(False, f"{where}: invalid position {list(step.position)} in {current}")
        sigma = step.substitution
        if apply(rule.lhs, sigma) != redex:
            return Diagnosis(
                False, f"{where}: lhs mismatch, {apply(rule.lhs, sigma)} is not {redex}"
            )
        if len(step.condition_justifications) != len(rule.conditions):
            return Diagnosis(
                False,
                f"{where}: {len(step.condition_justifications)} condition justifications "
                f"for {len(rule.conditions)} conditions",
            )
        for j, ((s, t), just) in enumerate(zip(rule.conditions, step.condition_justifications)):
            cwhere = f"{where} condition {j}"
            if just.start != apply(s, sigma):
                return Diagnosis(
                    False, f"{cwhere}: condition chain broken, starts at {just.start}, "
                    f"expected {apply(s, sigma)}"
                )
            inner = validate_sequence(R, just, f"{cwhere}: ")
            if not inner:
                return inner
            end = just.end(R)
            if end != apply(t, sigma):
                return Diagnosis(
                    False, f"{cwhere}: condition chain broken, ends at {end}, "
                    f"expected {apply(t, sigma)}"
                )
        current = replace_at(current, step.position, apply(rule.rhs, sigma))
    return Diagnosis(True)


# -- bounded conditional rewriting -------------------------------------------


class Rewriter:
    """Level- and budget-bounded conditional rewriting over a fixed system.

    ``step_budget`` bounds the length of every condition-justifying
    derivation and of :meth:`reachable` searches.  Results are memoized per
    ``(term, level)``.
    """

    def __init__(self, R: Ctrs, step_budget: int = 4) -> None:
        if step_budget < 1:
            raise ValueError("step_budget must be positive")
        self.R = R
        self.step_budget = step_budget
        self._succ: dict[tuple[Term, int], list[tuple[Term, RewriteStep]]] = {}
        self._reach: dict[tuple[Term, int], dict[Term, RewriteSequence]] = {}

    def successors(self, t: Term, level: int) -> list[tuple[Term, RewriteStep]]:
        """One-step reducts of ``t``, leftmost-outermost position first, then rule order."""
        if level <= 0:
            return []
        key = (t, level)
        cached = self._succ.get(key)
        if cached is not None:
            return cached
        out: list[tuple[Term, RewriteStep]] = []
        seen: set[tuple[Term, Position, int]] = set()
        for p in function_positions(t):
            redex = subterm_at(t, p)
            for i, rule in enumerate(self.R.rules):
                sigma = match_term(rule.lhs, redex)
                if sigma is None:
                    continue
                for theta, justs in self._solve(rule.conditions, sigma, level - 1):
                    target = replace_at(t, p, apply(rule.rhs, theta))
                    if (target, p, i) in seen:
                        continue
                    seen.add((target, p, i))
                    theta = {v: u for v, u in theta.items() if u != Var(v)}
                    out.append((target, RewriteStep(p, i, theta, tuple(justs))))
        self._succ[key] = out
        return out

    def _solve(self, conditions, sigma, level):
        if not conditions:
            yield sigma, []
            return
        (s, t), rest = conditions[0], conditions[1:]
        # unbound variables of s were reduced as they stand, so they stay fixed
        sigma = {v: Var(v) for v in var_set(s)} | sigma
        for w, seq in self.reducts(apply(s, sigma), level).items():
            theta = match_term(t, w, sigma)
            if theta is None:
                continue
            for final, justs in self._solve(rest, theta, level):
                yield final, [seq, *justs]

    def reducts(self, s: Term, level: int) -> dict[Term, RewriteSequence]:
        """Every term reachable from ``s`` within the budget, mapped to a shortest sequence.

        Iteration order is breadth-first discovery order.
        """
        key = (s, level)
        cached = self._reach.get(key)
        if cached is not None:
            return cached
        found: dict[Term, list[RewriteStep]] = {s: []}
        frontier = [s]
        for _ in range(self.step_budget):
            nxt = []
            for u in frontier:
                for v, step in self.successors(u, level):
                    if v not in found:
                        found[v] = found[u] + [step]
                        nxt.append(v)
            frontier = nxt
            if not frontier:
                break
        out = {u: RewriteSequence(s, tuple(steps)) for u, steps in found.items()}
        self._reach[key] = out
        return out

    def reachable(self, s: Term, t: Term, level: int) -> RewriteSequence | None:
        if s == t:
            return RewriteSequence(s)
        found: dict[Term, list[RewriteStep]] = {s: []}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if len(found[u]) >= self.step_budget:
                continue
            for v, step in self.successors(u, level):
                if v in found:
                    continue
                found[v] = found[u] + [step]
                if v == t:
                    return RewriteSequence(s, tuple(found[v]))
                queue.append(v)
        return None


def successors(
    t: Term, R: Ctrs, max_level: int, step_budget: int = 4
) -> list[tuple[Term, RewriteStep]]:
    return Rewriter(R, step_budget).successors(t, max_level)


def reachable(
    s: Term, t: Term, R: Ctrs, max_level: int, step_budget: int = 4
) -> RewriteSequence | None:
    """A shortest justified ``s ->* t`` within the bounds, or ``None`` (not found, not disproved)."""
    return Rewriter(R, step_budget).reachable(s, t, max_level)


def is_normal_form(t: Term, U: Ctrs) -> bool:
    if not U.is_unconditional:
        raise ValueError("normal-form check needs an unconditional system")
    lhss = [r.lhs for r in U.rules]
    for p in function_positions(t):
        redex = subterm_at(t, p)
        if any(match_term(lhs, redex) is not None for lhs in lhss):
            return False
    return True


def rename_rules(seq: RewriteSequence, mapping: Mapping[int, int]) -> RewriteSequence:
    """Re-index every rule reference in ``seq`` (recursively) through ``mapping``."""
    return RewriteSequence(
        seq.start,
        tuple(
            RewriteStep(
                s.position,
                mapping[s.rule_index],
                s.substitution,
                tuple(rename_rules(j, mapping) for j in s.condition_justifications),
            )
            for s in seq.steps
        ),
    )


def rename_sequence_vars(seq: RewriteSequence, renaming: Mapping[str, str]) -> RewriteSequence:
    return RewriteSequence(
        rename(seq.start, renaming),
        tuple(
            RewriteStep(
                s.position,
                s.rule_index,
                {x: rename(v, renaming) for x, v in s.substitution.items()},
                tuple(rename_sequence_vars(j, renaming) for j in s.condition_justifications),
            )
            for s in seq.steps
        ),
    )
