"""Shared data model: labeled terms, pronoun variables, formulas, clauses and
substitutions.

Every term carries a *tag*, the source-level variable (or constant) name it
originated from.  Renaming changes a variable's name but never its tag, and
skolemization replaces an existential variable by a term that keeps the
variable's name as tag.  Pronoun variables carry a *label*: the set of source
names they may be bound to.

A pronoun occurrence produced by the clausifier additionally carries an
*environment*, mapping every name in its label to the term that realizes that
antecedent inside the occurrence's own clause.  Binding a pronoun to a name
replaces each occurrence by its own environment entry, so an antecedent that
is a universally quantified variable of the clause is instantiated together
with the clause.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class SubstitutionError(ValueError):
    """A pronoun entry would violate accessibility or label shrinking."""


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str
    tag: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")
        if not self.tag:
            object.__setattr__(self, "tag", self.name)

    def __str__(self):
        return f"{self.name}^{self.tag}"


@dataclass(frozen=True)
class Const:
    name: str
    tag: str = ""

    def __post_init__(self):
        if not self.tag:
            object.__setattr__(self, "tag", self.name)

    def __str__(self):
        return f"{self.name}^{self.tag}"


@dataclass(frozen=True)
class Skolem:
    fname: str
    args: tuple
    tag: str

    def __str__(self):
        inner = ",".join(str(a) for a in self.args)
        return f"{self.fname}({inner})^{self.tag}"


@dataclass(frozen=True)
class Pron:
    """Pronoun variable.  ``label`` is None before annotation."""

    id: str
    label: frozenset | None = None
    env: tuple | None = None  # sorted ((name, term), ...), keys == label

    def __str__(self):
        if self.label is None:
            return self.id
        return "{" + ",".join(sorted(self.label)) + "}:" + self.id

    @property
    def key(self):
        return (self.id, self.label)

    def env_map(self) -> dict:
        return dict(self.env) if self.env is not None else {}

    def restrict(self, new_id: str, label: frozenset) -> "Pron":
        env = None
        if self.env is not None:
            env = tuple((n, t) for n, t in self.env if n in label)
        return Pron(new_id, frozenset(label), env)


Term = Union[Var, Const, Skolem, Pron]


def make_env(mapping: Mapping[str, Term]) -> tuple:
    return tuple(sorted(mapping.items()))


def tag_of(t: Term) -> str | None:
    return None if isinstance(t, Pron) else t.tag


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Skolem):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, Pron):
        return False
    return True


def term_vars(t: Term, acc: set | None = None) -> set:
    """Proper variable names in ``t``, looking through pronoun environments."""
    acc = set() if acc is None else acc
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, Skolem):
        for a in t.args:
            term_vars(a, acc)
    elif isinstance(t, Pron) and t.env:
        for _, e in t.env:
            term_vars(e, acc)
    return acc


def term_prons(t: Term, acc: dict | None = None) -> dict:
    """Map pronoun id -> an occurrence, for every pronoun in ``t``."""
    acc = {} if acc is None else acc
    if isinstance(t, Pron):
        acc.setdefault(t.id, t)
        if t.env:
            for _, e in t.env:
                term_prons(e, acc)
    elif isinstance(t, Skolem):
        for a in t.args:
            term_prons(a, acc)
    return acc


# ---------------------------------------------------------------------------
# literals and clauses


@dataclass(frozen=True)
class Literal:
    positive: bool
    pred: str
    args: tuple = ()

    def negate(self) -> "Literal":
        return Literal(not self.positive, self.pred, self.args)

    def atom_str(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(str(a) for a in self.args)})"

    def __str__(self):
        return ("" if self.positive else "~") + self.atom_str()


def literal_sort_key(lit: Literal):
    return (lit.pred, lit.atom_str(), not lit.positive)


class Clause(frozenset):
    """A set of literals read as a disjunction."""

    def sorted(self) -> list:
        return sorted(self, key=literal_sort_key)

    def __str__(self):
        if not self:
            return "□"
        return "{" + ", ".join(str(l) for l in self.sorted()) + "}"

    def __repr__(self):
        return f"Clause({str(self)})"


def clause_vars(c: Iterable[Literal]) -> set:
    acc: set = set()
    for lit in c:
        for a in lit.args:
            term_vars(a, acc)
    return acc


def clause_prons(c: Iterable[Literal]) -> dict:
    acc: dict = {}
    for lit in c:
        for a in lit.args:
            term_prons(a, acc)
    return acc


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Pro:
    """The pronoun binder ``?u``: marks where pronoun ``pid`` is introduced."""

    pid: str
    body: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Forall, Exists, Pro]
BINARY = (And, Or, Implies)
QUANT = (Forall, Exists)


def conj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction, in sequence order."""
    it = iter(formulas)
    result = next(it)
    for f in it:
        result = And(result, f)
    return result


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Not,)):
        yield from subformulas(f.body)
    elif isinstance(f, (Forall, Exists, Pro)):
        yield from subformulas(f.body)


def formula_prons(f: Formula) -> dict:
    acc: dict = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            for a in g.args:
                term_prons(a, acc)
    return acc


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` with every atom replaced by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(map_atoms(f.body, fn))
    if isinstance(f, BINARY):
        return type(f)(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, QUANT):
        return type(f)(f.var, map_atoms(f.body, fn))
    if isinstance(f, Pro):
        return Pro(f.pid, map_atoms(f.body, fn))
    raise TypeError(f)


def binder_names(f: Formula) -> list:
    return [g.var for g in subformulas(f) if isinstance(g, QUANT)]


@dataclass(frozen=True)
class Sequent:
    premises: tuple
    conclusion: Formula

    def formulas(self) -> list:
        return [*self.premises, self.conclusion]


def check_binder_disjointness(s: Sequent) -> list:
    """Names bound by more than one quantifier anywhere in the sequent."""
    seen: set = set()
    reused: list = []
    for f in s.formulas():
        for name in binder_names(f):
            if name in seen and name not in reused:
                reused.append(name)
            seen.add(name)
    return reused


# ---------------------------------------------------------------------------
# substitutions


@dataclass(frozen=True)
class Substitution:
    """Proper-variable part plus pronoun part.

    ``pron`` maps a pronoun id to a term (binding) or to a pronoun (merge or
    label restriction).  ``choice`` records, for bound pronouns, the antecedent
    name that was selected; occurrences carrying an environment are replaced by
    their own environment entry for that name.
    """

    proper: dict = field(default_factory=dict)
    pron: dict = field(default_factory=dict)
    choice: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.proper or self.pron)

    def pronoun_part(self) -> "Substitution":
        return Substitution({}, dict(self.pron), dict(self.choice))

    def __str__(self):
        parts = [f"{k} -> {v}" for k, v in sorted(self.proper.items())]
        for k, v in sorted(self.pron.items()):
            extra = f" [{self.choice[k]}]" if k in self.choice else ""
            parts.append(f"{k} -> {v}{extra}")
        return "[" + ", ".join(parts) + "]"


EMPTY = Substitution()


def _apply_term(s: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        return s.proper.get(t.name, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, Skolem):
        if not t.args:
            return t
        return Skolem(t.fname, tuple(_apply_term(s, a) for a in t.args), t.tag)
    if isinstance(t, Pron):
        if t.env:
            t = Pron(t.id, t.label, tuple((n, _apply_term(s, e)) for n, e in t.env))
        if t.id not in s.pron:
            return t
        img = s.pron[t.id]
        if isinstance(img, Pron):
            if t.label is not None and img.label is not None and not img.label <= t.label:
                raise SubstitutionError(f"label of {t} would grow to {img}")
            if t.label is None:
                return img
            return t.restrict(img.id, img.label)
        name = s.choice.get(t.id, tag_of(img))
        if t.label is not None and name not in t.label:
            raise SubstitutionError(f"{img} is not accessible from {t}")
        if t.env is not None and name in dict(t.env):
            return dict(t.env)[name]
        return img
    raise TypeError(f"not a term: {t!r}")


def apply_substitution(s: Substitution, x):
    """Apply ``s`` to a term, literal, clause, formula or sequence thereof."""
    if isinstance(x, (Var, Const, Skolem, Pron)):
        return _apply_term(s, x)
    if isinstance(x, Literal):
        return Literal(x.positive, x.pred, tuple(_apply_term(s, a) for a in x.args))
    if isinstance(x, Clause):
        return Clause(apply_substitution(s, l) for l in x)
    if isinstance(x, Atom):
        return Atom(x.pred, tuple(_apply_term(s, a) for a in x.args))
    if isinstance(x, Not):
        return Not(apply_substitution(s, x.body))
    if isinstance(x, BINARY):
        return type(x)(apply_substitution(s, x.left), apply_substitution(s, x.right))
    if isinstance(x, QUANT):
        if x.var in s.proper:
            inner = Substitution({k: v for k, v in s.proper.items() if k != x.var},
                                 s.pron, s.choice)
            return type(x)(x.var, apply_substitution(inner, x.body))
        return type(x)(x.var, apply_substitution(s, x.body))
    if isinstance(x, Pro):
        return Pro(x.pid, apply_substitution(s, x.body))
    if isinstance(x, (list, tuple)):
        return type(x)(apply_substitution(s, y) for y in x)
    raise TypeError(f"cannot apply substitution to {x!r}")


def _is_identity(k: str, v: Term) -> bool:
    return isinstance(v, Var) and v.name == k


def compose_substitutions(s1: Substitution, s2: Substitution) -> Substitution:
    """The substitution applying ``s1`` first, then ``s2``."""
    proper = {}
    for k, v in s1.proper.items():
        img = _apply_term(s2, v)
        if not _is_identity(k, img):
            proper[k] = img
    for k, v in s2.proper.items():
        if k not in s1.proper:
            proper[k] = v
    pron = {}
    choice = dict(s1.choice)
    for k, v in s1.pron.items():
        img = _apply_term(s2, v)
        pron[k] = img
        if isinstance(v, Pron) and not isinstance(img, Pron) and v.id in s2.choice:
            choice[k] = s2.choice[v.id]
    for k, v in s2.pron.items():
        if k not in s1.pron:
            pron[k] = v
            if k in s2.choice:
                choice[k] = s2.choice[k]
    return Substitution(proper, pron, choice)


# ---------------------------------------------------------------------------
# renaming


def fresh_name(base: str, taken: set) -> str:
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def renaming_apart(c: Iterable[Literal], avoid: set) -> dict:
    """Map each proper variable of ``c`` clashing with ``avoid`` to a fresh Var."""
    own = clause_vars(c)
    taken = set(avoid) | own
    ren = {}
    for name in sorted(own & set(avoid)):
        tag = _var_tag(c, name) or name
        new = fresh_name(tag, taken)
        taken.add(new)
        ren[name] = Var(new, tag)
    return ren


def _var_tag(c: Iterable[Literal], name: str) -> str | None:
    def walk(t):
        if isinstance(t, Var):
            return t.tag if t.name == name else None
        if isinstance(t, Skolem):
            for a in t.args:
                r = walk(a)
                if r:
                    return r
        if isinstance(t, Pron) and t.env:
            for _, e in t.env:
                r = walk(e)
                if r:
                    return r
        return None

    for lit in c:
        for a in lit.args:
            r = walk(a)
            if r:
                return r
    return None


def rename_apart(c: Clause, avoid: set) -> Clause:
    """Rename proper variables of ``c`` away from ``avoid``; pronouns stay."""
    ren = renaming_apart(c, avoid)
    if not ren:
        return c
    return apply_substitution(Substitution(ren), c)
