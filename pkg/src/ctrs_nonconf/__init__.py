"""Non-confluence proofs for oriented conditional term rewriting systems."""

from .analysis import (
    CriticalPair,
    EvidenceKind,
    NonJoinabilityEvidence,
    RemovedRule,
    critical_pairs,
    non_joinability_evidence,
    overlaps,
    remove_infeasible_rules,
    tcap,
)
from .cops import parse_cops, print_cops
from .ctrs import (
    Ctrs,
    CtrsType,
    RewriteSequence,
    RewriteStep,
    Rule,
    classify,
    is_normal_form,
    reachable,
    successors,
    underlying_trs,
    validate_sequence,
)
from .narrowing import NarrowConfig, narrow_sequences, narrow_step, to_rewrite_sequence
from .nonconfluence import (
    Method,
    Options,
    Witness,
    method_narrowing,
    method_ucp,
    method_urnf,
    prove_nonconfluence,
)
from .terms import App, Var, match_term, unify
from .witness import check_witness, emit_witness, parse_witness

__all__ = [
    "App",
    "CriticalPair",
    "Ctrs",
    "CtrsType",
    "EvidenceKind",
    "Method",
    "NarrowConfig",
    "NonJoinabilityEvidence",
    "Options",
    "RemovedRule",
    "RewriteSequence",
    "RewriteStep",
    "Rule",
    "Var",
    "Witness",
    "check_witness",
    "classify",
    "critical_pairs",
    "emit_witness",
    "is_normal_form",
    "match_term",
    "method_narrowing",
    "method_ucp",
    "method_urnf",
    "narrow_sequences",
    "narrow_step",
    "non_joinability_evidence",
    "overlaps",
    "parse_cops",
    "parse_witness",
    "print_cops",
    "prove_nonconfluence",
    "reachable",
    "remove_infeasible_rules",
    "successors",
    "tcap",
    "to_rewrite_sequence",
    "underlying_trs",
    "unify",
    "validate_sequence",
]
