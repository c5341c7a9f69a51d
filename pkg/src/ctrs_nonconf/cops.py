"""Reading and writing oriented CTRSs in the Cops text format.

    (CONDITIONTYPE ORIENTED)
    (VAR x y z z')
    (RULES
      +(0,y) -> y
      f(x,y) -> z | +(x,y) == +(z,z')
    )

Sections may appear in any order; ``(COMMENT ...)`` is skipped.  An
identifier is a variable iff it is declared in ``VAR``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ctrs import Ctrs, Rule
from .terms import FRESH_PREFIX, App, Term, Var, variables

_DELIMS = set('(),|"')


class CopsError(ValueError):
    """Base class for Cops input errors; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class CopsSyntaxError(CopsError):
    pass


class CopsArityError(CopsError):
    pass


class VariableLhsError(CopsError):
    pass


class UnsupportedConditionType(CopsError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str  # "(" ")" "," "|" "->" "==" "id" "str" "eof"
    text: str
    line: int
    column: int
    offset: int = 0


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c in "(),|":
            tokens.append(_Token(c, c, line, col, i))
            i += 1
            col += 1
            continue
        if c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise CopsSyntaxError("unterminated string", line, col)
            body = text[i + 1 : j]
            tokens.append(_Token("str", body, line, col, i))
            nl = body.count("\n")
            if nl:
                line += nl
                col = len(body) - body.rfind("\n") + 1
            else:
                col += j - i + 1
            i = j + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _DELIMS:
            j += 1
        word = text[i:j]
        kind = word if word in ("->", "==") else "id"
        tokens.append(_Token(kind, word, line, col, i))
        col += j - i
        i = j
    tokens.append(_Token("eof", "", line, col, n))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables: set[str] = set()
        self.arity: dict[str, int] = {}
        self.has_var_section = True

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise CopsSyntaxError(f"expected {kind!r}, found {found!r}", tok.line, tok.column)
        return tok

    def document(self) -> tuple[str | None, list[str], list[tuple[Rule, _Token]], str | None]:
        sections: dict[str, _Token] = {}
        condition_type = None
        declared: list[str] = []
        raw_rules: list[tuple[Rule, _Token]] = []
        rules_start = None
        comment = None
        while self.peek().kind != "eof":
            self.expect("(")
            head = self.expect("id")
            name = head.text
            if name in sections:
                raise CopsSyntaxError(f"duplicate section {name}", head.line, head.column)
            sections[name] = head
            if name == "CONDITIONTYPE":
                tok = self.expect("id")
                condition_type = tok.text
                if condition_type != "ORIENTED":
                    raise UnsupportedConditionType(
                        f"condition type {condition_type} is not supported (only ORIENTED)",
                        tok.line,
                        tok.column,
                    )
                self.expect(")")
            elif name == "VAR":
                while self.peek().kind == "id":
                    tok = self.next()
                    if tok.text.startswith(FRESH_PREFIX):
                        raise CopsSyntaxError(
                            f"variable names starting with {FRESH_PREFIX!r} are reserved",
                            tok.line,
                            tok.column,
                        )
                    if tok.text not in declared:
                        declared.append(tok.text)
                self.expect(")")
            elif name == "RULES":
                # parsed once VAR is known, which may come later
                rules_start = self.i
                self._skip_balanced()
            elif name == "COMMENT":
                start_tok = self.peek()
                self._skip_balanced()
                closing = self.toks[self.i - 1]
                comment = self.text[start_tok.offset : closing.offset].strip()
            else:
                raise CopsSyntaxError(f"unknown section {name}", head.line, head.column)
        if rules_start is not None:
            end = self.i
            self.i = rules_start
            self.variables = set(declared)
            self.has_var_section = "VAR" in sections
            raw_rules = self.rules()
            self.i = end
        return condition_type, declared, raw_rules, comment

    def _skip_balanced(self) -> None:
        depth = 1
        while depth:
            tok = self.next()
            if tok.kind == "eof":
                raise CopsSyntaxError("unbalanced parentheses", tok.line, tok.column)
            if tok.kind == "(":
                depth += 1
            elif tok.kind == ")":
                depth -= 1

    def rules(self) -> list[tuple[Rule, _Token]]:
        out = []
        while self.peek().kind != ")":
            first = self.peek()
            bare = self.toks[self.i + 1].kind != "("
            lhs = self.term()
            if bare and not self.has_var_section:
                # without VAR a bare lhs identifier cannot be told from a variable
                raise VariableLhsError(
                    f"left-hand side {lhs} is an undeclared bare identifier; "
                    "declare variables in a (VAR ...) section",
                    first.line,
                    first.column,
                )
            if isinstance(lhs, Var):
                raise VariableLhsError(
                    f"left-hand side {lhs} is a variable", first.line, first.column
                )
            self.expect("->")
            rhs = self.term()
            conditions = []
            if self.peek().kind == "|":
                self.next()
                conditions.append(self.condition())
                while self.peek().kind == ",":
                    self.next()
                    conditions.append(self.condition())
            out.append((Rule(lhs, rhs, tuple(conditions)), first))
        self.expect(")")
        return out

    def condition(self) -> tuple[Term, Term]:
        s = self.term()
        self.expect("==")
        return s, self.term()

    def term(self) -> Term:
        tok = self.next()
        if tok.kind != "id":
            found = tok.text or "end of input"
            raise CopsSyntaxError(f"expected a term, found {found!r}", tok.line, tok.column)
        name = tok.text
        args: list[Term] = []
        if self.peek().kind == "(":
            self.next()
            if self.peek().kind != ")":
                args.append(self.term())
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
            if name in self.variables:
                raise CopsSyntaxError(f"variable {name} applied to arguments", tok.line, tok.column)
        elif name in self.variables:
            return Var(name)
        known = self.arity.setdefault(name, len(args))
        if known != len(args):
            raise CopsArityError(
                f"symbol {name!r} used with arity {len(args)}, earlier {known}",
                tok.line,
                tok.column,
            )
        return App(name, tuple(args))


@dataclass(frozen=True)
class CopsDocument:
    condition_type: str
    declared_variables: tuple[str, ...]
    system: Ctrs
    comment: str | None = None


def parse_document(text: bytes | str) -> CopsDocument:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = text[: exc.start]
            line = prefix.count(b"\n") + 1
            col = exc.start - (prefix.rfind(b"\n") + 1) + 1
            raise CopsSyntaxError("input is not valid UTF-8", line, col) from None
    parser = _Parser(text)
    try:
        condition_type, declared, raw_rules, comment = parser.document()
    except RecursionError:
        tok = parser.peek()
        raise CopsSyntaxError("terms nested too deeply", tok.line, tok.column) from None
    rules = [r for r, _ in raw_rules]
    if condition_type is None:
        conditional = next(((r, tok) for r, tok in raw_rules if r.conditions), None)
        if conditional is not None:
            tok = conditional[1]
            raise CopsSyntaxError(
                "conditional rules require a (CONDITIONTYPE ...) section", tok.line, tok.column
            )
        condition_type = "ORIENTED"
    return CopsDocument(condition_type, tuple(declared), Ctrs(tuple(rules)), comment)


def parse_cops(text: bytes | str) -> Ctrs:
    """Parse a Cops oriented-CTRS problem into a :class:`Ctrs`."""
    return parse_document(text).system


def print_cops(R: Ctrs) -> str:
    declared: dict[str, None] = {}
    for rule in R.rules:
        for t in rule.terms():
            for x in variables(t):
                declared.setdefault(x)
    lines = ["(CONDITIONTYPE ORIENTED)", f"(VAR {' '.join(declared)})", "(RULES"]
    lines += [f"  {rule}" for rule in R.rules]
    lines.append(")")
    return "\n".join(lines)
