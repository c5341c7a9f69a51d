"""First-order terms, positions, substitutions, matching and unification.

Terms are immutable values.  Variables and substitutions are keyed by the
variable *name*; a substitution is a plain ``dict[str, Term]`` that never
stores an identity binding.

Fresh variables are named ``_v0, _v1, ...`` from a thread-local counter.
The Cops parser refuses user variables with that prefix, so generated names
cannot capture user names.  Drivers wrap their work in :func:`fresh_scope`
to make generated names reproducible.
"""

from __future__ import annotations

import threading
from collections.abc import Iterable, Iterator, Mapping
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Union

FRESH_PREFIX = "_v"


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    symbol: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(map(str, self.args))})"


Term = Union[Var, App]
Position = tuple[int, ...]
Substitution = dict[str, Term]
Renaming = dict[str, str]


class PositionError(ValueError):
    """Raised when a position does not address a subterm."""


def const(symbol: str) -> App:
    return App(symbol, ())


def fn(symbol: str, *args: Term) -> App:
    return App(symbol, tuple(args))


# -- traversal ---------------------------------------------------------------


def variables(t: Term) -> list[str]:
    """Variable names of ``t`` in left-to-right first-occurrence order."""
    seen: dict[str, None] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            seen.setdefault(u.name)
        else:
            stack.extend(reversed(u.args))
    return list(seen)


def var_set(*terms: Term) -> set[str]:
    out: set[str] = set()
    for t in terms:
        _collect(t, out)
    return out


def _collect(t: Term, out: set[str]) -> None:
    if isinstance(t, Var):
        out.add(t.name)
    else:
        for a in t.args:
            _collect(a, out)


def occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    return any(occurs(name, a) for a in t.args)


def is_ground(t: Term) -> bool:
    return not var_set(t)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def positions(t: Term) -> list[Position]:
    """All positions of ``t`` in pre-order (leftmost-outermost first)."""
    out: list[Position] = []

    def walk(u: Term, p: Position) -> None:
        out.append(p)
        if isinstance(u, App):
            for i, a in enumerate(u.args, 1):
                walk(a, p + (i,))

    walk(t, ())
    return out


def function_positions(t: Term) -> list[Position]:
    """Positions addressing non-variable subterms, pre-order."""
    out: list[Position] = []

    def walk(u: Term, p: Position) -> None:
        if isinstance(u, App):
            out.append(p)
            for i, a in enumerate(u.args, 1):
                walk(a, p + (i,))

    walk(t, ())
    return out


def is_position(t: Term, p: Position) -> bool:
    for i in p:
        if isinstance(t, Var) or not 1 <= i <= len(t.args):
            return False
        t = t.args[i - 1]
    return True


def subterm_at(t: Term, p: Position) -> Term:
    u = t
    for depth_, i in enumerate(p):
        if isinstance(u, Var) or not 1 <= i <= len(u.args):
            raise PositionError(f"position {list(p)} invalid for {t} at index {depth_}")
        u = u.args[i - 1]
    return u


def replace_at(t: Term, p: Position, u: Term) -> Term:
    if not p:
        return u
    i = p[0]
    if isinstance(t, Var) or not 1 <= i <= len(t.args):
        raise PositionError(f"position {list(p)} invalid for {t}")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], p[1:], u)
    return App(t.symbol, tuple(args))


# -- substitutions -----------------------------------------------------------


def apply(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Simultaneous replacement of the variables of ``t``."""
    if not sigma:
        return t
    return _apply(t, sigma)


def _apply(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.symbol, tuple(_apply(a, sigma) for a in t.args))


def compose(first: Mapping[str, Term], second: Mapping[str, Term]) -> Substitution:
    """The substitution ``first`` followed by ``second``.

    ``apply(t, compose(a, b)) == apply(apply(t, a), b)`` for every term.
    """
    out: Substitution = {}
    for x, v in first.items():
        w = apply(v, second)
        if w != Var(x):
            out[x] = w
    for x, v in second.items():
        if x not in first and v != Var(x):
            out[x] = v
    return out


def restrict(sigma: Mapping[str, Term], names: Iterable[str]) -> Substitution:
    return {x: sigma[x] for x in names if x in sigma}


def is_idempotent(sigma: Mapping[str, Term]) -> bool:
    return all(not (var_set(v) & sigma.keys()) for v in sigma.values())


def substitution_vars(sigma: Mapping[str, Term]) -> set[str]:
    out = set(sigma)
    for v in sigma.values():
        _collect(v, out)
    return out


# -- matching and unification ------------------------------------------------


def match_term(
    pattern: Term, subject: Term, sigma: Mapping[str, Term] | None = None
) -> Substitution | None:
    """One-sided matching: ``sigma' ⊇ sigma`` with ``apply(pattern, sigma') == subject``.

    Bindings already present in ``sigma`` are fixed; only variables of the
    pattern outside its domain may be bound.  Every pattern variable ends up
    in the result, identity bindings included, so that a chained call treats
    it as fixed.
    """
    out: dict[str, Term] = dict(sigma) if sigma else {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = out.get(p.name)
            if bound is None:
                out[p.name] = s
            elif bound != s:
                return None
            continue
        if isinstance(s, Var) or p.symbol != s.symbol or len(p.args) != len(s.args):
            return None
        stack.extend(zip(p.args, s.args))
    return out


def unify(s: Term, t: Term, sigma: Mapping[str, Term] | None = None) -> Substitution | None:
    """Idempotent most general unifier of ``s`` and ``t``, or ``None``.

    With ``sigma`` given (assumed idempotent), returns an idempotent mgu of
    ``apply(s, sigma)`` and ``apply(t, sigma)`` composed after ``sigma``.
    Equations are solved in left-to-right traversal order and a variable is
    always bound in favour of the left-hand side, so results are
    deterministic.
    """
    return unify_all([(s, t)], sigma)


def unify_all(
    pairs: Iterable[tuple[Term, Term]], sigma: Mapping[str, Term] | None = None
) -> Substitution | None:
    subst: Substitution = dict(sigma) if sigma else {}
    todo = list(pairs)
    todo.reverse()
    while todo:
        a, b = todo.pop()
        a = apply(a, subst)
        b = apply(b, subst)
        if a == b:
            continue
        if isinstance(a, Var):
            var, val = a, b
        elif isinstance(b, Var):
            var, val = b, a
        else:
            if a.symbol != b.symbol or len(a.args) != len(b.args):
                return None
            todo.extend(reversed(list(zip(a.args, b.args))))
            continue
        if occurs(var.name, val):
            return None
        one = {var.name: val}
        subst = {x: apply(v, one) for x, v in subst.items()}
        subst[var.name] = val
    return subst


# -- fresh names and renaming ------------------------------------------------


class _FreshState(threading.local):
    def __init__(self) -> None:
        self.next = 0


_fresh = _FreshState()


@contextmanager
def fresh_scope(start: int = 0) -> Iterator[None]:
    """Restart the calling thread's fresh-name counter for the block."""
    saved = _fresh.next
    _fresh.next = start
    try:
        yield
    finally:
        _fresh.next = saved


def fresh_name(avoid: Iterable[str] | set[str] = ()) -> str:
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    while True:
        name = f"{FRESH_PREFIX}{_fresh.next}"
        _fresh.next += 1
        if name not in avoid:
            return name


def fresh_var(avoid: Iterable[str] | set[str] = ()) -> Var:
    return Var(fresh_name(avoid))


def rename(t: Term, renaming: Mapping[str, str]) -> Term:
    return apply(t, {x: Var(y) for x, y in renaming.items()})


def invert(renaming: Mapping[str, str]) -> Renaming:
    inverse = {y: x for x, y in renaming.items()}
    if len(inverse) != len(renaming):
        raise ValueError("renaming is not injective")
    return inverse


def _object_vars(obj: Any) -> list[str]:
    if isinstance(obj, (Var, App)):
        return variables(obj)
    return list(obj.variables())


def _rename_object(obj: Any, renaming: Mapping[str, str]) -> Any:
    if isinstance(obj, (Var, App)):
        return rename(obj, renaming)
    return obj.rename(renaming)


def rename_apart(obj: Any, avoid: Iterable[str]) -> tuple[Any, Renaming]:
    """Rename the variables of ``obj`` that clash with ``avoid``.

    ``obj`` is a term or anything exposing ``variables()`` and
    ``rename(mapping)`` (rules, for instance).  Non-clashing variables keep
    their names; the returned renaming only lists the renamed ones.
    """
    avoid = set(avoid)
    own = _object_vars(obj)
    taken = avoid | set(own)
    renaming: Renaming = {}
    for x in own:
        if x in avoid:
            y = fresh_name(taken)
            taken.add(y)
            renaming[x] = y
    if not renaming:
        return obj, {}
    return _rename_object(obj, renaming), renaming


def rename_fresh(obj: Any, avoid: Iterable[str] = ()) -> tuple[Any, Renaming]:
    """Rename every variable of ``obj`` to a fresh name outside ``avoid``."""
    avoid = set(avoid)
    own = _object_vars(obj)
    taken = avoid | set(own)
    renaming: Renaming = {}
    for x in own:
        y = fresh_name(taken)
        taken.add(y)
        renaming[x] = y
    return _rename_object(obj, renaming), renaming


def variant_of(s: Term, t: Term) -> bool:
    """True iff ``s`` and ``t`` are equal up to a bijective variable renaming."""
    m = match_term(s, t)
    if m is None or not all(isinstance(v, Var) for v in m.values()):
        return False
    targets = [v.name for v in m.values()]  # type: ignore[union-attr]
    return len(set(targets)) == len(targets) and not (
        set(targets) & (var_set(s) - m.keys())
    )


def canonical(*terms: Term, prefix: str = "x") -> tuple[Term, ...]:
    """Rename the variables of ``terms`` jointly to ``x0, x1, ...`` by first occurrence."""
    order: dict[str, None] = {}
    for t in terms:
        for x in variables(t):
            order.setdefault(x)
    renaming = {x: f"{prefix}{i}" for i, x in enumerate(order)}
    return tuple(rename(t, renaming) for t in terms)
