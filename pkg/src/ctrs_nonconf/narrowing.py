"""Bounded conditional narrowing and its translation to rewrite sequences.

A narrowing step starts from an mgu of the redex and a fresh rule variant
and extends it while solving the rule's conditions left to right: each
condition ``u ≈ v`` is solved by narrowing ``uθ`` (one level lower, at most
``condition_max_length`` steps) to some ``w`` and unifying ``w`` with the
correspondingly instantiated ``v``.

Every rule variant is renamed to fresh ``_v`` names, so variables stay
disjoint across a whole derivation as long as the fresh-name counter is
not reset in the middle of one.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass

from .ctrs import Ctrs, RewriteSequence, RewriteStep, Rule
from .terms import (
    App,
    Position,
    Renaming,
    Substitution,
    Term,
    Var,
    apply,
    compose,
    function_positions,
    invert,
    rename,
    rename_fresh,
    replace_at,
    subterm_at,
    substitution_vars,
    unify,
    var_set,
)

Tick = Callable[[], None]


@dataclass(frozen=True)
class NarrowConfig:
    max_length: int = 3
    max_level: int = 2
    condition_max_length: int = 3

    def __post_init__(self) -> None:
        for name in ("max_length", "max_level", "condition_max_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


@dataclass(frozen=True)
class NarrowStep:
    position: Position
    rule_index: int
    rule_variant: Renaming
    variant: Rule
    unifier: Substitution
    condition_solutions: tuple[NarrowSequence, ...]
    condition_unifiers: tuple[Substitution, ...]
    target: Term


@dataclass(frozen=True)
class NarrowSequence:
    start: Term
    steps: tuple[NarrowStep, ...] = ()
    composed_substitution: Substitution | None = None

    def __post_init__(self) -> None:
        if self.composed_substitution is None:
            object.__setattr__(self, "composed_substitution", {})

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def end(self) -> Term:
        return self.steps[-1].target if self.steps else self.start

    @property
    def instantiated_start(self) -> Term:
        return apply(self.start, self.composed_substitution)

    def terms(self) -> list[Term]:
        return [self.start] + [s.target for s in self.steps]


def narrow_step(
    s: Term,
    R: Ctrs,
    cfg: NarrowConfig,
    avoid: Iterable[str] = (),
    remaining_level: int | None = None,
    tick: Tick | None = None,
) -> list[tuple[Term, NarrowStep]]:
    """All one-step conditional narrowings of ``s``.

    Ordered by position (pre-order), rule index, then condition solutions
    by total number of condition-narrowing steps.
    """
    level = cfg.max_level if remaining_level is None else remaining_level
    if level < 1:
        return []
    avoid = frozenset(avoid) | var_set(s)
    out: list[tuple[Term, NarrowStep]] = []
    for p in function_positions(s):
        redex = subterm_at(s, p)
        assert isinstance(redex, App)
        for i, rule in enumerate(R.rules):
            lhs = rule.lhs
            if lhs.symbol != redex.symbol or len(lhs.args) != len(redex.args):
                continue
            variant, renaming = rename_fresh(rule, avoid)
            theta = unify(redex, variant.lhs)
            if theta is None:
                continue
            for sigma, sols, unifiers in solve_conditions(
                variant.conditions, theta, R, cfg, avoid, level - 1, tick
            ):
                target = apply(replace_at(s, p, variant.rhs), sigma)
                step = NarrowStep(
                    p, i, renaming, variant, sigma, tuple(sols), tuple(unifiers), target
                )
                out.append((target, step))
    return out


def solve_conditions(
    conditions: Iterable[tuple[Term, Term]],
    theta: Substitution,
    R: Ctrs,
    cfg: NarrowConfig,
    avoid: Iterable[str],
    level: int,
    tick: Tick | None = None,
) -> list[tuple[Substitution, list[NarrowSequence], list[Substitution]]]:
    """Extensions of ``theta`` under which every condition narrows to its target.

    Returns ``(substitution, condition sequences, closing unifiers)``
    triples, fewest total condition steps first.  At ``level`` 0 only
    zero-step solutions (plain unification) exist.
    """
    avoid = frozenset(avoid)
    partial: list[tuple[Substitution, list[NarrowSequence], list[Substitution]]] = [
        (theta, [], [])
    ]
    for u, v in conditions:
        extended = []
        for sigma, sols, unifiers in partial:
            start = apply(u, sigma)
            for seq in _sequences(start, R, cfg, cfg.condition_max_length, level, avoid, tick):
                goal = apply(apply(v, sigma), seq.composed_substitution)
                mu = unify(seq.end, goal)
                if mu is None:
                    continue
                extended.append(
                    (
                        compose(compose(sigma, seq.composed_substitution), mu),
                        sols + [seq],
                        unifiers + [mu],
                    )
                )
        partial = extended
        if not partial:
            return []
    partial.sort(key=lambda item: sum(len(seq) for seq in item[1]))
    return partial


def _sequences(
    start: Term,
    R: Ctrs,
    cfg: NarrowConfig,
    max_length: int,
    level: int,
    avoid: frozenset[str],
    tick: Tick | None,
) -> list[NarrowSequence]:
    avoid = avoid | var_set(start)
    layer = [NarrowSequence(start)]
    out = list(layer)
    if level < 1:
        return out
    for _ in range(max_length):
        nxt = []
        for seq in layer:
            if tick is not None:
                tick()
            for _target, step in narrow_step(seq.end, R, cfg, avoid, level, tick):
                nxt.append(
                    NarrowSequence(
                        seq.start,
                        seq.steps + (step,),
                        compose(seq.composed_substitution, step.unifier),
                    )
                )
        out += nxt
        layer = nxt
        if not layer:
            break
    return out


def narrow_sequences(
    start: Term,
    R: Ctrs,
    cfg: NarrowConfig = NarrowConfig(),
    avoid: Iterable[str] = (),
    tick: Tick | None = None,
) -> list[NarrowSequence]:
    """Every narrowing sequence from ``start`` of length ``0..cfg.max_length``.

    Shorter sequences come first; the empty sequence is always included.
    """
    return _sequences(start, R, cfg, cfg.max_length, cfg.max_level, frozenset(avoid), tick)


def to_rewrite_sequence(seq: NarrowSequence, closing: Mapping[str, Term] | None = None) -> RewriteSequence:
    """Instantiate a narrowing sequence into a justified rewrite sequence.

    The k-th term is ``s_k σ_k ⋯ σ_{n-1}`` followed by ``closing``; each
    rewrite step reuses the rule and position of its narrowing step, and
    condition sequences are translated recursively.
    """
    closing = dict(closing or {})
    n = len(seq.steps)
    suffix: list[Substitution] = [closing] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = compose(seq.steps[k].unifier, suffix[k + 1])
    steps = []
    for k, step in enumerate(seq.steps):
        back = invert(step.rule_variant)
        tau: Substitution = {}
        for v in step.variant.variables():
            original = back.get(v, v)
            value = apply(Var(v), suffix[k])
            if value != Var(original):
                tau[original] = value
        justs: list[RewriteSequence] = [RewriteSequence(Var("_"))] * len(step.condition_solutions)
        after = suffix[k + 1]
        for j in range(len(step.condition_solutions) - 1, -1, -1):
            sol = step.condition_solutions[j]
            closing_j = compose(step.condition_unifiers[j], after)
            justs[j] = to_rewrite_sequence(sol, closing_j)
            after = compose(sol.composed_substitution, closing_j)
        steps.append(RewriteStep(step.position, step.rule_index, tau, tuple(justs)))
    return RewriteSequence(apply(seq.start, suffix[0]), tuple(steps))


def sequence_variables(seq: NarrowSequence) -> set[str]:
    """Every variable mentioned anywhere in the derivation."""
    out = var_set(seq.start) | substitution_vars(seq.composed_substitution)
    for step in seq.steps:
        out |= set(step.variant.variables())
        out |= substitution_vars(step.unifier)
        out |= var_set(step.target)
        for sol, mu in zip(step.condition_solutions, step.condition_unifiers):
            out |= sequence_variables(sol) | substitution_vars(mu)
    return out


def rename_narrow_sequence(seq: NarrowSequence, renaming: Mapping[str, str]) -> NarrowSequence:
    """Apply a variable renaming uniformly to a whole derivation."""

    def subst(sigma: Mapping[str, Term]) -> Substitution:
        return {renaming.get(x, x): rename(t, renaming) for x, t in sigma.items()}

    steps = tuple(
        NarrowStep(
            step.position,
            step.rule_index,
            {x: renaming.get(y, y) for x, y in step.rule_variant.items()},
            step.variant.rename(renaming),
            subst(step.unifier),
            tuple(rename_narrow_sequence(s, renaming) for s in step.condition_solutions),
            tuple(subst(mu) for mu in step.condition_unifiers),
            rename(step.target, renaming),
        )
        for step in seq.steps
    )
    return NarrowSequence(rename(seq.start, renaming), steps, subst(seq.composed_substitution))


def remap_rule_indices(seq: NarrowSequence, mapping: Mapping[int, int]) -> NarrowSequence:
    steps = tuple(
        NarrowStep(
            step.position,
            mapping[step.rule_index],
            step.rule_variant,
            step.variant,
            step.unifier,
            tuple(remap_rule_indices(s, mapping) for s in step.condition_solutions),
            step.condition_unifiers,
            step.target,
        )
        for step in seq.steps
    )
    return NarrowSequence(seq.start, steps, seq.composed_substitution)


def rename_fresh_sequence(seq: NarrowSequence, avoid: Iterable[str]) -> tuple[NarrowSequence, Renaming]:
    """A variant of the derivation whose variables are all fresh and outside ``avoid``."""
    names = sorted(sequence_variables(seq), key=_var_order)
    _, renaming = rename_fresh(_Names(names), avoid)
    return rename_narrow_sequence(seq, renaming), renaming


def _var_order(name: str) -> tuple[int, int, str]:
    if name.startswith("_v") and name[2:].isdigit():
        return (0, int(name[2:]), "")
    return (1, 0, name)


class _Names:
    def __init__(self, names: list[str]) -> None:
        self.names = names

    def variables(self) -> list[str]:
        return self.names

    def rename(self, renaming: Mapping[str, str]) -> _Names:
        return _Names([renaming.get(x, x) for x in self.names])
