"""Concrete syntax for dynamic formulas and sequent files, and printers.

Grammar (ASCII; Unicode connectives are accepted as aliases)::

    sequent     ::= { formula NEWLINE } "|=" formula
    formula     ::= disjunction [ "->" formula ]
    disjunction ::= conjunction { "|" conjunction }
    conjunction ::= unary { "&" unary }
    unary       ::= "~" unary
                  | ("forall" | "exists" | "?") IDENT unary
                  | "(" formula ")"
                  | IDENT [ "(" IDENT { "," IDENT } ")" ]

Quantifiers and ``?`` scope over the following unary formula, so
``exists x (p(x)) & q`` is a conjunction.  An argument identifier bound by an
enclosing ``forall``/``exists`` is a variable, one bound by ``?`` a pronoun,
anything else a constant.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    And, Atom, Clause, Const, Exists, Forall, Implies, Literal, Not, Or, Pro,
    Pron, Sequent, Skolem, Substitution, Var, check_binder_disjointness,
)


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int

    def __post_init__(self):
        if self.begin > self.end:
            raise ValueError("span begin must not exceed end")


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan | None = None, line: int | None = None):
        self.message = message
        self.span = span
        self.line = line
        where = ""
        if line is not None:
            where = f"line {line}: "
        if span is not None:
            where += f"[{span.begin}:{span.end}] "
        super().__init__(where + message)


ALIASES = {"∀": "forall", "∃": "exists", "∧": "&", "∨": "|", "→": "->", "¬": "~", "⊨": "|="}
KEYWORDS = {"forall", "exists"}
_TOKEN = re.compile(r"\s*(?:(?P<op>\|=|->|[()&|~?,])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<uni>[∀∃∧∨→¬⊨]))")


def _tokenize(text: str, offset: int = 0):
    pos = 0
    toks = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            rest = text[pos:]
            if rest.strip():
                bad = pos + len(rest) - len(rest.lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}",
                                 SourceSpan(offset + bad, offset + bad + 1))
            break
        if m.group("op"):
            kind, val = m.group("op"), m.group("op")
        elif m.group("uni"):
            kind = val = ALIASES[m.group("uni")]
        else:
            val = m.group("ident")
            kind = val if val in KEYWORDS else "ident"
        toks.append((kind, val, SourceSpan(offset + m.start(m.lastgroup), offset + m.end())))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text, offset, pron_ids):
        self.toks = _tokenize(text, offset)
        self.i = 0
        self.end = offset + len(text)
        self.pron_ids = pron_ids
        self.scope: dict = {}

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def span(self):
        if self.i < len(self.toks):
            return self.toks[self.i][2]
        return SourceSpan(self.end, self.end)

    def take(self, kind=None):
        if self.i >= len(self.toks):
            raise ParseError(f"unexpected end of input, expected {kind or 'token'}", self.span())
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        f = self.formula()
        if self.i != len(self.toks):
            raise ParseError(f"unexpected {self.toks[self.i][1]!r}", self.span())
        return f

    def formula(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind in ("forall", "exists", "?"):
            self.take()
            _, name, span = self.take("ident")
            if name in self.scope:
                raise ParseError(f"{name!r} is already bound in this scope", span)
            if kind == "?":
                pid = name
                k = 2
                while pid in self.pron_ids:
                    pid = f"{name}_{k}"
                    k += 1
                self.pron_ids.add(pid)
                self.scope[name] = ("pron", pid)
                try:
                    return Pro(pid, self.unary())
                finally:
                    del self.scope[name]
            self.scope[name] = ("var", name)
            try:
                body = self.unary()
            finally:
                del self.scope[name]
            return (Forall if kind == "forall" else Exists)(name, body)
        if kind == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if kind == "ident":
            _, pred, _ = self.take()
            args = []
            if self.peek() == "(":
                self.take()
                args.append(self.argument())
                while self.peek() == ",":
                    self.take()
                    args.append(self.argument())
                self.take(")")
            return Atom(pred, tuple(args))
        raise ParseError("expected a formula", self.span())

    def argument(self):
        _, name, _ = self.take("ident")
        bound = self.scope.get(name)
        if bound is None:
            return Const(name)
        if bound[0] == "var":
            return Var(name)
        return Pron(bound[1])


def parse_formula(text: str, *, _offset: int = 0, _pron_ids: set | None = None):
    """Parse one dynamic formula."""
    return _Parser(text, _offset, set() if _pron_ids is None else _pron_ids).parse()


def parse_sequent(text: str) -> Sequent:
    """Parse a sequent file: premise lines, then a final ``|=`` line."""
    premises = []
    conclusion = None
    pron_ids: set = set()
    offset = 0
    for lineno, raw in enumerate(text.splitlines(keepends=True), start=1):
        line = raw.split("#", 1)[0]
        start = offset
        offset += len(raw)
        stripped = line.strip()
        if not stripped:
            continue
        lead = len(line) - len(line.lstrip())
        try:
            if stripped.startswith("|=") or stripped.startswith("⊨"):
                if conclusion is not None:
                    raise ParseError("duplicate conclusion",
                                     SourceSpan(start + lead, start + len(line.rstrip())))
                cut = lead + (2 if stripped.startswith("|=") else 1)
                conclusion = parse_formula(line[cut:], _offset=start + cut, _pron_ids=pron_ids)
            else:
                if conclusion is not None:
                    raise ParseError("the conclusion must be the final line",
                                     SourceSpan(start + lead, start + len(line.rstrip())))
                premises.append(parse_formula(line, _offset=start, _pron_ids=pron_ids))
        except ParseError as e:
            if e.line is None:
                raise ParseError(e.message, e.span, lineno) from None
            raise
    if conclusion is None:
        raise ParseError("missing conclusion line '|= ...'", SourceSpan(len(text), len(text)))
    seq = Sequent(tuple(premises), conclusion)
    reused = check_binder_disjointness(seq)
    if reused:
        raise ParseError("variables bound more than once: " + ", ".join(reused))
    return seq


# ---------------------------------------------------------------------------
# printing

_PREC = {Implies: 1, Or: 2, And: 3}


def _fterm(t) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return str(t)


def _fmt(f, ctx: int) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(_fterm(a) for a in f.args)})"
    if isinstance(f, Not):
        return "~" + _fmt(f.body, 4)
    if isinstance(f, (Forall, Exists)):
        kw = "forall" if isinstance(f, Forall) else "exists"
        return f"{kw} {f.var} {_fmt(f.body, 4)}"
    if isinstance(f, Pro):
        return f"?{f.pid} {_fmt(f.body, 4)}"
    prec = _PREC[type(f)]
    op = {Implies: "->", Or: "|", And: "&"}[type(f)]
    if isinstance(f, Implies):
        s = f"{_fmt(f.left, prec + 1)} -> {_fmt(f.right, prec)}"
    else:
        s = f"{_fmt(f.left, prec)} {op} {_fmt(f.right, prec + 1)}"
    return f"({s})" if prec < ctx else s


def pretty_print(x) -> str:
    """Render a formula, clause, literal, term, substitution or sequent."""
    if isinstance(x, Clause):
        return str(x)
    if isinstance(x, (Literal, Substitution, Var, Const, Skolem, Pron)):
        return str(x)
    if isinstance(x, Sequent):
        lines = [pretty_print(p) for p in x.premises]
        lines.append("|= " + pretty_print(x.conclusion))
        return "\n".join(lines)
    if isinstance(x, (list, tuple)):
        return "\n".join(pretty_print(y) for y in x)
    return _fmt(x, 0)
