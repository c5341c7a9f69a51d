"""Non-confluence methods and the driver that runs them.

Three ways to find a non-joinable fork, cheapest first:

URNF
    an unconditional rule whose rhs is a normal form of the underlying TRS
    and carries a variable absent from the lhs; renaming that variable
    gives two distinct normal forms of the same lhs.
UCP
    an unconditional critical pair whose two sides are provably
    non-joinable in the underlying TRS.
NARROWING
    two conditional narrowing sequences whose instantiated start terms
    unify; Property-1 translation turns them into a rewrite fork.
"""

from __future__ import annotations

import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

from .analysis import (
    NonJoinabilityEvidence,
    RemovedRule,
    critical_pairs,
    non_joinability_evidence,
    remove_infeasible_rules,
)
from .ctrs import (
    Ctrs,
    RewriteSequence,
    RewriteStep,
    is_normal_form,
    rename_rules,
    underlying_trs,
)
from .narrowing import (
    NarrowConfig,
    NarrowSequence,
    Tick,
    narrow_sequences,
    rename_fresh_sequence,
    sequence_variables,
    to_rewrite_sequence,
)
from .terms import Term, Var, apply, fresh_name, fresh_scope, rename, rename_fresh, unify


class Method(str, Enum):
    URNF = "URNF"
    UCP = "UCP"
    NARROWING = "NARROWING"


class SearchTimeout(TimeoutError):
    """The wall-clock budget ran out before the search finished."""


class CertificationError(RuntimeError):
    """A witness produced by the prover was rejected by the checker."""


@dataclass(frozen=True)
class Witness:
    """A peak with two justified rewrite sequences and proof that their ends never join.

    Rule indices in the sequences refer to ``system``; ``removed_rules``
    lists the infeasible rules whose absence the evidence relies on.
    """

    system: Ctrs
    peak: Term
    left: RewriteSequence
    right: RewriteSequence
    evidence: NonJoinabilityEvidence
    method: Method
    removed_rules: tuple[RemovedRule, ...] = ()

    @property
    def endpoints(self) -> tuple[Term, Term]:
        return self.left.end(self.system), self.right.end(self.system)


@dataclass(frozen=True)
class Options:
    methods: tuple[Method, ...] = (Method.URNF, Method.UCP, Method.NARROWING)
    preprocess: bool = True
    narrowing: NarrowConfig = field(default_factory=NarrowConfig)
    # budget for condition-justifying rewrite searches; unused by the three methods
    step_budget: int = 4
    timeout: float | None = None
    jobs: int = 1


class _Deadline:
    def __init__(self, seconds: float | None) -> None:
        self.at = None if seconds is None else time.monotonic() + seconds

    def __call__(self) -> None:
        if self.at is not None and time.monotonic() > self.at:
            raise SearchTimeout("search budget exhausted")


def _lift(w: Witness | None, R: Ctrs, removed: Sequence[RemovedRule]) -> Witness | None:
    """Re-express a witness over a reduced system in terms of the original ``R``."""
    if w is None:
        return None
    gone = {r.index for r in removed}
    kept = [i for i in range(len(R.rules)) if i not in gone]
    mapping = dict(enumerate(kept))
    return replace(
        w,
        system=R,
        left=rename_rules(w.left, mapping),
        right=rename_rules(w.right, mapping),
        removed_rules=tuple(removed) + w.removed_rules,
    )


def _preprocessed(R: Ctrs, preprocess: bool) -> tuple[Ctrs, list[RemovedRule]]:
    if not preprocess:
        return R, []
    return remove_infeasible_rules(R)


# -- URNF --------------------------------------------------------------------


def method_urnf(R: Ctrs) -> Witness | None:
    U = underlying_trs(R)
    for i, rule in enumerate(R.rules):
        if rule.conditions:
            continue
        extra = rule.extra_variables()
        if not extra or not is_normal_form(rule.rhs, U):
            continue
        x = extra[0]
        y = Var(fresh_name(set(rule.variables())))
        left = RewriteSequence(rule.lhs, (RewriteStep((), i, {}),))
        right = RewriteSequence(rule.lhs, (RewriteStep((), i, {x: y}),))
        evidence = non_joinability_evidence(rule.rhs, apply(rule.rhs, {x: y}), U)
        assert evidence is not None
        return Witness(R, rule.lhs, left, right, evidence, Method.URNF)
    return None


# -- UCP ---------------------------------------------------------------------


def method_ucp(R: Ctrs, preprocess: bool = True) -> Witness | None:
    system, removed = _preprocessed(R, preprocess)
    return _lift(_ucp(system), R, removed)


def _ucp(R: Ctrs) -> Witness | None:
    U = underlying_trs(R)
    for cp in critical_pairs(R):
        if not cp.is_unconditional:
            continue
        evidence = non_joinability_evidence(cp.left, cp.right, U)
        if evidence is None:
            continue
        o = cp.source
        mu = o.mgu
        outer_rule = R.rules[o.outer_index]
        inner_rule = R.rules[o.inner_index]
        inner_sub = {}
        for x in inner_rule.variables():
            value = apply(Var(o.inner_renaming.get(x, x)), mu)
            if value != Var(x):
                inner_sub[x] = value
        outer_sub = {}
        for x in outer_rule.variables():
            value = apply(Var(x), mu)
            if value != Var(x):
                outer_sub[x] = value
        peak = cp.peak()
        left = RewriteSequence(peak, (RewriteStep(o.position, o.inner_index, inner_sub),))
        right = RewriteSequence(peak, (RewriteStep((), o.outer_index, outer_sub),))
        return Witness(R, peak, left, right, evidence, Method.UCP)
    return None


# -- narrowing ---------------------------------------------------------------


def _start_sequences(R: Ctrs, index: int, cfg: NarrowConfig, tick: Tick | None) -> list[NarrowSequence]:
    with fresh_scope():
        start, _ = rename_fresh(R.rules[index].lhs)
        return narrow_sequences(start, R, cfg, tick=tick)


def _shadow(seq: NarrowSequence) -> tuple[Term, Term]:
    """Instantiated start and end with every ``_vN`` moved to ``_wN``.

    Pairing a sequence with a shadowed one needs no fresh names; only a
    successful pair is renamed properly.
    """
    names = sequence_variables(seq)
    assert all(x.startswith("_v") for x in names), names
    renaming = {x: "_w" + x[2:] for x in names}
    return rename(seq.instantiated_start, renaming), rename(seq.end, renaming)


def method_narrowing(
    R: Ctrs,
    cfg: NarrowConfig = NarrowConfig(),
    preprocess: bool = True,
    *,
    jobs: int = 1,
    tick: Tick | None = None,
) -> Witness | None:
    system, removed = _preprocessed(R, preprocess)
    return _lift(_narrowing(system, cfg, jobs, tick), R, removed)


def _narrowing(R: Ctrs, cfg: NarrowConfig, jobs: int, tick: Tick | None) -> Witness | None:
    U = underlying_trs(R)
    indices = range(len(R.rules))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_start = list(pool.map(lambda i: _start_sequences(R, i, cfg, tick), indices))
    else:
        per_start = [_start_sequences(R, i, cfg, tick) for i in indices]

    plain = [[(s.instantiated_start, s.end) for s in seqs] for seqs in per_start]
    shadows = [[_shadow(s) for s in seqs] for seqs in per_start]
    n = len(per_start)
    for i in range(n):
        for j in range(i, n):
            for a, (ua, ea) in enumerate(plain[i]):
                first_b = a if i == j else 0
                for b in range(first_b, len(plain[j])):
                    if tick is not None and b % 64 == 0:
                        tick()
                    seq_a, seq_b = per_start[i][a], per_start[j][b]
                    if not seq_a.steps and not seq_b.steps:
                        continue
                    ub, eb = shadows[j][b]
                    if ua.symbol != ub.symbol:  # type: ignore[union-attr]
                        continue
                    mu = unify(ua, ub)
                    if mu is None:
                        continue
                    s_end, t_end = apply(ea, mu), apply(eb, mu)
                    if s_end == t_end:
                        continue
                    if non_joinability_evidence(s_end, t_end, U) is None:
                        continue
                    return _narrowing_witness(R, U, seq_a, seq_b)
    return None


def _narrowing_witness(R: Ctrs, U: Ctrs, seq_a: NarrowSequence, seq_b: NarrowSequence) -> Witness:
    with fresh_scope():
        seq_b, _ = rename_fresh_sequence(seq_b, sequence_variables(seq_a))
    mu = unify(seq_a.instantiated_start, seq_b.instantiated_start)
    assert mu is not None
    left = to_rewrite_sequence(seq_a, mu)
    right = to_rewrite_sequence(seq_b, mu)
    evidence = non_joinability_evidence(apply(seq_a.end, mu), apply(seq_b.end, mu), U)
    assert evidence is not None
    return Witness(R, left.start, left, right, evidence, Method.NARROWING)


# -- driver ------------------------------------------------------------------


def prove_nonconfluence(R: Ctrs, options: Options = Options()) -> Witness | None:
    """First witness found by the enabled methods, in URNF, UCP, NARROWING order.

    Every returned witness has been accepted by the independent checker.
    Raises :class:`SearchTimeout` when ``options.timeout`` elapses.
    """
    from .witness import check_witness

    tick = _Deadline(options.timeout)
    with fresh_scope():
        system, removed = _preprocessed(R, options.preprocess)
        tick()
        witness = None
        for method in Method:
            if method not in options.methods:
                continue
            if method is Method.URNF:
                found = method_urnf(system)
            elif method is Method.UCP:
                found = _ucp(system)
            else:
                found = _narrowing(system, options.narrowing, options.jobs, tick)
            tick()
            if found is not None:
                witness = _lift(found, R, removed)
                break
    if witness is None:
        return None
    verdict = check_witness(R, witness)
    if not verdict:
        raise CertificationError(f"{witness.method.value} witness rejected: {verdict.reason}")
    return witness
