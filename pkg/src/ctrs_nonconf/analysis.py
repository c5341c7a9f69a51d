"""Critical pairs, the tcap approximation, non-joinability evidence and
infeasible-rule removal.

Infeasibility uses two sound approximations of ``sσ ->* tσ``:

* tcap: every reduct of an instance of ``s`` is an instance of
  ``tcap(s)``, so if ``tcap(s)`` does not unify with ``t`` no instance of
  the condition can hold.
* root reachability: the root symbol of ``sσ`` only changes through root
  steps, and a root step with ``l -> r`` leaves ``root(r)`` on top (or
  anything, when ``r`` is a variable).  If ``root(t)`` is not reachable
  from ``root(s)`` along these edges, the condition never holds.

Both approximations are computed over the underlying TRS, which contains
every step of the conditional system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .ctrs import Ctrs, Rule, is_normal_form, underlying_trs
from .terms import (
    App,
    Position,
    Renaming,
    Substitution,
    Term,
    Var,
    apply,
    fresh_var,
    function_positions,
    rename_apart,
    replace_at,
    subterm_at,
    unify,
    var_set,
)


@dataclass(frozen=True)
class Overlap:
    outer_index: int
    inner_index: int
    outer: Rule
    inner: Rule
    inner_renaming: Renaming
    position: Position
    mgu: Substitution


@dataclass(frozen=True)
class CriticalPair:
    left: Term
    right: Term
    conditions: tuple[tuple[Term, Term], ...]
    source: Overlap

    @property
    def is_unconditional(self) -> bool:
        return not self.conditions

    def peak(self) -> Term:
        return apply(self.source.outer.lhs, self.source.mgu)


def overlaps(R: Ctrs) -> list[Overlap]:
    """Every overlap of a renamed inner rule into the lhs of an outer rule.

    The outer rule keeps its variables; the inner rule is renamed apart
    from it.  Root overlaps of a rule with its own variant are excluded.
    Ordered by outer index, inner index, position (pre-order).
    """
    out = []
    for i, outer in enumerate(R.rules):
        outer_vars = outer.variables()
        fpos = function_positions(outer.lhs)
        for j, rule in enumerate(R.rules):
            inner, renaming = rename_apart(rule, outer_vars)
            for p in fpos:
                if i == j and not p:
                    continue
                mgu = unify(subterm_at(outer.lhs, p), inner.lhs)
                if mgu is not None:
                    out.append(Overlap(i, j, outer, inner, renaming, p, mgu))
    return out


def critical_pair(o: Overlap) -> CriticalPair:
    mu = o.mgu
    left = apply(replace_at(o.outer.lhs, o.position, o.inner.rhs), mu)
    right = apply(o.outer.rhs, mu)
    conds = tuple(
        (apply(s, mu), apply(t, mu)) for s, t in (*o.outer.conditions, *o.inner.conditions)
    )
    return CriticalPair(left, right, conds, o)


def critical_pairs(R: Ctrs) -> list[CriticalPair]:
    return [critical_pair(o) for o in overlaps(R)]


def tcap(t: Term, U: Ctrs, avoid: set[str] | frozenset[str] = frozenset()) -> Term:
    """Linear generalization of the part of ``t`` no reduct can change.

    Every variable of the result is fresh and outside ``avoid``.
    """
    if not U.is_unconditional:
        raise ValueError("tcap needs an unconditional system")
    used = set(avoid)
    lhss = [r.lhs for r in U.rules]

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            v = fresh_var(used)
            used.add(v.name)
            return v
        capped = App(u.symbol, tuple(go(a) for a in u.args))
        for lhs in lhss:
            if not isinstance(lhs, App) or lhs.symbol != capped.symbol:
                continue
            renamed, _ = rename_apart(lhs, used)
            if unify(capped, renamed) is not None:
                v = fresh_var(used | var_set(renamed))
                used.add(v.name)
                return v
        return capped

    return go(t)


class EvidenceKind(str, Enum):
    DISTINCT_NORMAL_FORMS = "distinct-normal-forms"
    TCAP_NON_UNIFIABLE = "tcap-non-unifiable"


@dataclass(frozen=True)
class NonJoinabilityEvidence:
    kind: EvidenceKind
    left: Term
    right: Term

    @property
    def endpoints(self) -> tuple[Term, Term]:
        return self.left, self.right


def tcaps_unify(t: Term, u: Term, U: Ctrs) -> bool:
    capped_t = tcap(t, U)
    capped_u = tcap(u, U, avoid=var_set(capped_t))
    return unify(capped_t, capped_u) is not None


def non_joinability_evidence(t: Term, u: Term, U: Ctrs) -> NonJoinabilityEvidence | None:
    """Fast proof that ``t`` and ``u`` have no common reduct under ``U``."""
    if t == u:
        return None
    if is_normal_form(t, U) and is_normal_form(u, U):
        return NonJoinabilityEvidence(EvidenceKind.DISTINCT_NORMAL_FORMS, t, u)
    if not tcaps_unify(t, u, U):
        return NonJoinabilityEvidence(EvidenceKind.TCAP_NON_UNIFIABLE, t, u)
    return None


# -- infeasible rules --------------------------------------------------------


class InfeasibilityCheck(str, Enum):
    TCAP = "tcap"
    ROOT_REACHABILITY = "root-reachability"


@dataclass(frozen=True)
class RemovedRule:
    """A rule dropped because condition ``condition`` can never hold."""

    index: int
    condition: int
    check: InfeasibilityCheck


TOP = None  # closure marker: every symbol reachable


def root_closure(symbol: str, U: Ctrs) -> set[str] | None:
    """Root symbols reachable from ``symbol`` by root steps; ``None`` means all."""
    edges: dict[str, set[str | None]] = {}
    for rule in U.rules:
        assert isinstance(rule.lhs, App)
        target = rule.rhs.symbol if isinstance(rule.rhs, App) else TOP
        edges.setdefault(rule.lhs.symbol, set()).add(target)
    seen = {symbol}
    todo = [symbol]
    while todo:
        f = todo.pop()
        for g in edges.get(f, ()):
            if g is TOP:
                return None
            if g not in seen:
                seen.add(g)
                todo.append(g)
    return seen


def condition_infeasible(s: Term, t: Term, U: Ctrs) -> InfeasibilityCheck | None:
    capped = tcap(s, U, avoid=var_set(s, t))
    if unify(capped, t) is None:
        return InfeasibilityCheck.TCAP
    if isinstance(s, App) and isinstance(t, App):
        closure = root_closure(s.symbol, U)
        if closure is not None and t.symbol not in closure:
            return InfeasibilityCheck.ROOT_REACHABILITY
    return None


def remove_infeasible_rules(R: Ctrs) -> tuple[Ctrs, list[RemovedRule]]:
    """Drop rules with a provably unsatisfiable condition, to a fixpoint.

    Removed indices refer to ``R``; the list is in removal order, and each
    entry's check holds against the underlying TRS of the rules still
    present at that point.
    """
    alive = list(range(len(R.rules)))
    removed: list[RemovedRule] = []
    changed = True
    while changed:
        changed = False
        U = underlying_trs(Ctrs(tuple(R.rules[i] for i in alive)))
        for i in alive:
            for j, (s, t) in enumerate(R.rules[i].conditions):
                check = condition_infeasible(s, t, U)
                if check is not None:
                    removed.append(RemovedRule(i, j, check))
                    alive.remove(i)
                    changed = True
                    break
            if changed:
                break
    return Ctrs(tuple(R.rules[i] for i in alive)), removed
