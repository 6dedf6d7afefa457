"""Clause form: negation normal form, tag-preserving skolemization and
distributive CNF."""
from __future__ import annotations

from itertools import product

from .annotate import annotate_sequent
from .core import (
    And, Atom, Clause, Const, Exists, Forall, Implies, Literal, Not, Or, Pro,
    Pron, Sequent, Skolem, Var, make_env, subformulas, term_vars,
)


def to_nnf(f):
    """Push negations down to atoms; rewrite implications."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Implies):
        return Or(_neg(f.left), to_nnf(f.right))
    if isinstance(f, (And, Or)):
        return type(f)(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, to_nnf(f.body))
    if isinstance(f, Not):
        return _neg(f.body)
    if isinstance(f, Pro):
        raise ValueError("annotate the formula before clausifying")
    raise TypeError(f)


def _neg(f):
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.body)
    if isinstance(f, And):
        return Or(_neg(f.left), _neg(f.right))
    if isinstance(f, Or):
        return And(_neg(f.left), _neg(f.right))
    if isinstance(f, Implies):
        return And(to_nnf(f.left), _neg(f.right))
    if isinstance(f, Forall):
        return Exists(f.var, _neg(f.body))
    if isinstance(f, Exists):
        return Forall(f.var, _neg(f.body))
    raise TypeError(f)


class SymbolPool:
    """Fresh skolem symbols, shared across one sequent."""

    def __init__(self, taken=()):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name, k = base, 1
        while name in self.taken:
            k += 1
            name = f"{base}_{k}"
        self.taken.add(name)
        return name


def _constants(f) -> set:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.add(g.pred)
            out.update(a.name for a in g.args if isinstance(a, Const))
    return out


def _labels_below(f) -> set:
    names = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            for a in g.args:
                if isinstance(a, Pron) and a.label:
                    names |= a.label
    return names


class _Skolemizer:
    def __init__(self, pool: SymbolPool):
        self.pool = pool
        self.terms: dict = {}  # binder name -> realizing term
        self.order: dict = {}  # universal name -> binding order

    def collect(self, f, scope: tuple):
        """Assign a realizing term to every binder of ``f`` (preorder)."""
        if isinstance(f, Forall):
            self.order[f.var] = len(self.order)
            self.terms[f.var] = Var(f.var)
            self.collect(f.body, scope + (f.var,))
        elif isinstance(f, Exists):
            deps = set(scope)
            # universals reachable through antecedents of pronouns in the body
            for n in _labels_below(f.body):
                if n in self.terms:
                    deps |= term_vars(self.terms[n])
            args = tuple(Var(v) for v in sorted(deps, key=self.order.__getitem__))
            if args:
                self.terms[f.var] = Skolem(self.pool.fresh(f"f_{f.var}"), args, f.var)
            else:
                self.terms[f.var] = Const(self.pool.fresh(f"c_{f.var}"), f.var)
            self.collect(f.body, scope)
        elif isinstance(f, (And, Or)):
            self.collect(f.left, scope)
            self.collect(f.right, scope)
        elif isinstance(f, Not):
            self.collect(f.body, scope)

    def term(self, t, bound):
        if isinstance(t, Var) and t.name in bound:
            return self.terms[t.name]
        if isinstance(t, Pron) and t.label is not None:
            env = {n: self.terms.get(n, Const(n)) for n in t.label}
            return Pron(t.id, t.label, make_env(env))
        return t

    def strip(self, f, bound):
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(self.term(a, bound) for a in f.args))
        if isinstance(f, Not):
            return Not(self.strip(f.body, bound))
        if isinstance(f, (And, Or)):
            return type(f)(self.strip(f.left, bound), self.strip(f.right, bound))
        if isinstance(f, (Forall, Exists)):
            return self.strip(f.body, bound | {f.var})
        raise TypeError(f)


def skolemize_all(nnfs, pool: SymbolPool | None = None):
    """Skolemize several NNF formulas with one sequent-wide term table."""
    if pool is None:
        taken = set()
        for f in nnfs:
            taken |= _constants(f)
        pool = SymbolPool(taken)
    sk = _Skolemizer(pool)
    for f in nnfs:
        sk.collect(f, ())
    bound = frozenset(sk.terms)
    return [sk.strip(f, bound) for f in nnfs]


def skolemize(f, pool: SymbolPool | None = None):
    """Quantifier-free matrix of an NNF formula.

    An existential under universals becomes a skolem function of them (plus
    any universal its body's pronouns can refer to); a top-level existential
    becomes a fresh constant.  Either way the new term is tagged with the
    existential's variable name.
    """
    return skolemize_all([f], pool)[0]


def _cnf(f) -> list:
    if isinstance(f, Atom):
        return [(Literal(True, f.pred, f.args),)]
    if isinstance(f, Not):
        a = f.body
        return [(Literal(False, a.pred, a.args),)]
    if isinstance(f, And):
        return _cnf(f.left) + _cnf(f.right)
    if isinstance(f, Or):
        return [l + r for l, r in product(_cnf(f.left), _cnf(f.right))]
    raise TypeError(f"not quantifier-free NNF: {f!r}")


def to_cnf_clauses(f) -> list:
    """Distribute to CNF; returns clauses in generation order, deduplicated."""
    out = []
    seen = set()
    for lits in _cnf(f):
        c = Clause(lits)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def nonempty_domain_predicates(s: Sequent) -> list:
    """Restrictor predicates of universally quantified conditionals.

    For ``forall x (R(x) & ... -> ...)`` the domain of ``R`` is assumed
    nonempty when the caller asks for it.
    """
    preds = []
    for f in s.formulas():
        for g in subformulas(f):
            if isinstance(g, Forall) and isinstance(g.body, Implies):
                a = g.body.left
                while isinstance(a, And):
                    a = a.left
                if (isinstance(a, Atom) and len(a.args) == 1 and isinstance(a.args[0], Var)
                        and a.args[0].name == g.var and a.pred not in preds):
                    preds.append(a.pred)
    return preds


def clausify_annotated(formulas, extra_units=()):
    nnfs = [to_nnf(f) for f in formulas]
    taken = set()
    for f in nnfs:
        taken |= _constants(f)
    pool = SymbolPool(taken)
    clauses = []
    seen = set()
    for pred in extra_units:
        c = Clause([Literal(True, pred, (Const(pool.fresh(f"d_{pred}")),))])
        seen.add(c)
        clauses.append(c)
    for matrix in skolemize_all(nnfs, pool):
        for c in to_cnf_clauses(matrix):
            if c not in seen:
                seen.add(c)
                clauses.append(c)
    return clauses


def clausify_sequent(s: Sequent, nonempty_domain: bool = False):
    """Annotate, then clausify premises and negated conclusion.

    Returns ``(clauses, diagnostics)``.
    """
    formulas, diags = annotate_sequent(s)
    extra = nonempty_domain_predicates(s) if nonempty_domain else ()
    return clausify_annotated(formulas, extra), diags
