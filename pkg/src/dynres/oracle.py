"""Eager reference decision procedure.

Every total disambiguation of a sequent is turned into a classical formula in
normal binding form and checked by a plain first-order resolution prover that
shares nothing with the labeled engine except clause-form conversion.  The
labeled engine must find exactly the bindings this oracle finds.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .annotate import annotate_sequent, pronoun_labels
from .clausify import (
    SymbolPool, nonempty_domain_predicates, skolemize_all, to_cnf_clauses, to_nnf,
)
from .core import (
    And, Atom, Const, Exists, Forall, Implies, Literal, Not, Or, Pro, Pron,
    Skolem, Var, binder_names, conj, formula_prons, subformulas,
)


def enumerate_disambiguations(labels: dict) -> list:
    """All total disambiguations: one antecedent per pronoun.

    ``labels`` maps pronoun id to its label.  A pronoun with an empty label
    makes the list empty.
    """
    ids = sorted(labels)
    choices = [sorted(labels[i] or ()) for i in ids]
    return [dict(zip(ids, pick)) for pick in product(*choices)]


# ---------------------------------------------------------------------------
# normal binding form


def _substitute(f, delta: dict, binders: set):
    def term(t):
        if isinstance(t, Pron):
            if t.id not in delta:
                raise ValueError(f"no antecedent chosen for pronoun {t.id}")
            n = delta[t.id]
            return Var(n) if n in binders else Const(n)
        return t

    if isinstance(f, Atom):
        return Atom(f.pred, tuple(term(a) for a in f.args))
    if isinstance(f, Pro):
        return _substitute(f.body, delta, binders)
    if isinstance(f, Not):
        return Not(_substitute(f.body, delta, binders))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_substitute(f.left, delta, binders), _substitute(f.right, delta, binders))
    return type(f)(f.var, _substitute(f.body, delta, binders))


def _rewrite(f):
    """One bottom-up pass of the quantifier-movement rules."""
    if isinstance(f, Atom):
        return f, False
    if isinstance(f, Not):
        b, ch = _rewrite(f.body)
        return Not(b), ch
    if isinstance(f, (Forall, Exists)):
        b, ch = _rewrite(f.body)
        return type(f)(f.var, b), ch
    left, c1 = _rewrite(f.left)
    right, c2 = _rewrite(f.right)
    if isinstance(f, And) and isinstance(left, Exists):
        return Exists(left.var, And(left.body, right)), True
    if isinstance(f, And) and isinstance(right, Exists):
        return Exists(right.var, And(left, right.body)), True
    if isinstance(f, Implies) and isinstance(left, Exists):
        return Forall(left.var, Implies(left.body, right)), True
    return type(f)(left, right), c1 or c2


def free_vars(f, bound=frozenset()) -> set:
    if isinstance(f, Atom):
        return {a.name for a in f.args if isinstance(a, Var) and a.name not in bound}
    if isinstance(f, Not):
        return free_vars(f.body, bound)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body, bound | {f.var})
    return free_vars(f.left, bound) | free_vars(f.right, bound)


def normal_binding_form(f, delta: dict):
    """Classical formula whose quantifiers bind every resolved pronoun."""
    binders = set(binder_names(f))
    g = _substitute(f, delta, binders)
    changed = True
    while changed:
        g, changed = _rewrite(g)
    loose = free_vars(g)
    if loose:
        raise ValueError(f"antecedents out of reach: {', '.join(sorted(loose))}")
    return g


# ---------------------------------------------------------------------------
# alpha-equivalence


def _canon(f, env: dict, depth: int):
    if isinstance(f, Atom):
        return ("atom", f.pred, tuple(env.get(a.name, ("free", a.name)) if isinstance(a, Var)
                                      else ("const", str(a)) for a in f.args))
    if isinstance(f, Not):
        return ("not", _canon(f.body, env, depth))
    if isinstance(f, (Forall, Exists)):
        return (type(f).__name__, _canon(f.body, {**env, f.var: ("bound", depth)}, depth + 1))
    if isinstance(f, (And, Or)):
        parts = []

        def flat(g):
            if type(g) is type(f):
                flat(g.left)
                flat(g.right)
            else:
                parts.append(_canon(g, env, depth))

        flat(f)
        return (type(f).__name__, tuple(parts))
    return ("imp", _canon(f.left, env, depth), _canon(f.right, env, depth))


def alpha_equal(f, g) -> bool:
    """Equal up to bound-variable renaming and ∧/∨ re-association."""
    return _canon(f, {}, 0) == _canon(g, {}, 0)


# ---------------------------------------------------------------------------
# classical resolution


# Terms here are tuples: ("v", name), ("c", name), ("f", name, args).


def _walk(t, s):
    while t[0] == "v" and t[1] in s:
        t = s[t[1]]
    return t


def _occurs(name, t, s) -> bool:
    t = _walk(t, s)
    if t[0] == "v":
        return t[1] == name
    return t[0] == "f" and any(_occurs(name, a, s) for a in t[2])


def _unify(a, b, s):
    a, b = _walk(a, s), _walk(b, s)
    if a == b:
        return s
    if a[0] == "v":
        return None if _occurs(a[1], b, s) else {**s, a[1]: b}
    if b[0] == "v":
        return _unify(b, a, s)
    if a[0] != "f" or b[0] != "f" or a[1] != b[1] or len(a[2]) != len(b[2]):
        return None
    for x, y in zip(a[2], b[2]):
        s = _unify(x, y, s)
        if s is None:
            return None
    return s


def _resolve_term(t, s):
    t = _walk(t, s)
    if t[0] == "f":
        return ("f", t[1], tuple(_resolve_term(a, s) for a in t[2]))
    return t


def _plain(t):
    if isinstance(t, Var):
        return ("v", t.name)
    if isinstance(t, Skolem):
        return ("f", t.fname, tuple(_plain(a) for a in t.args))
    if isinstance(t, Pron):
        raise ValueError("the classical prover does not accept pronouns")
    return ("c", t.name)


def _vars(p, acc):
    if p[0] == "v":
        acc.add(p[1])
    elif p[0] == "f":
        for a in p[2]:
            _vars(a, acc)
    return acc


def _rename(p, m):
    if p[0] == "v":
        return ("v", m.get(p[1], p[1]))
    if p[0] == "f":
        return ("f", p[1], tuple(_rename(a, m) for a in p[2]))
    return p


def _canonical(clause):
    """Order literals and number variables to detect variants."""
    lits = sorted(clause, key=lambda l: repr(_rename_all(l, {})))
    m: dict = {}
    for _, _, args in lits:
        for a in args:
            for v in sorted(_vars(a, set())):
                m.setdefault(v, f"V{len(m)}")
    return frozenset((sign, pred, tuple(_rename(a, m) for a in args)) for sign, pred, args in lits)


def _rename_all(lit, m):
    sign, pred, args = lit
    return sign, pred, tuple(_rename(a, {v: "_" for v in _vars(a, set())}) for a in args)


def _lit_unify(l1, l2, s):
    for a, b in zip(l1[2], l2[2]):
        s = _unify(a, b, s)
        if s is None:
            return None
    return s


def _apply(clause, s):
    return frozenset((sign, pred, tuple(_resolve_term(a, s) for a in args))
                     for sign, pred, args in clause)


def _factors(c):
    out = [c]
    lits = sorted(c, key=repr)
    for l1, l2 in combinations(lits, 2):
        if l1[0] == l2[0] and l1[1] == l2[1] and len(l1[2]) == len(l2[2]):
            s = _lit_unify(l1, l2, {})
            if s is not None:
                out.append(_canonical(_apply(c, s)))
    return out


def _resolvents(c, d):
    ren = {v: v + "'" for l in d for a in l[2] for v in _vars(a, set())}
    d = frozenset((sg, p, tuple(_rename(a, ren) for a in args)) for sg, p, args in d)
    for l1 in c:
        for l2 in d:
            if l1[0] != l2[0] and l1[1] == l2[1] and len(l1[2]) == len(l2[2]):
                s = _lit_unify(l1, l2, {})
                if s is not None:
                    yield _canonical(_apply((c - {l1}) | (d - {l2}), s))


def _taut(c):
    return any((not sg, p, a) in c for sg, p, a in c)


def _weight(c):
    return sum(len(repr(l)) for l in c)


def refute_clauses(clauses, max_steps: int = 20_000):
    """Given-clause saturation; True if refuted, False if saturated, None if
    the step budget runs out."""
    todo = []
    for c in clauses:
        lits = frozenset((l.positive, l.pred, tuple(_plain(a) for a in l.args)) for l in c)
        todo.append(_canonical(lits))
    seen = set(todo)
    if frozenset() in seen:
        return True
    active: list = []
    steps = 0
    while todo:
        todo.sort(key=_weight)
        given = todo.pop(0)
        active.append(given)
        fresh = list(_factors(given)[1:])
        for other in active:
            fresh.extend(_resolvents(given, other))
        for r in fresh:
            steps += 1
            if not r:
                return True
            if r not in seen and not _taut(r):
                seen.add(r)
                todo.append(r)
            if steps > max_steps:
                return None
    return False


def classical_refute(formulas, extra_units=(), max_steps: int = 20_000):
    """Is the conjunction of the classical ``formulas`` unsatisfiable?

    ``extra_units`` are predicates asserted nonempty.
    """
    nnfs = [to_nnf(f) for f in formulas]
    taken = set()
    for f in nnfs:
        for g in subformulas(f):
            if isinstance(g, Atom):
                taken.add(g.pred)
                taken.update(a.name for a in g.args if isinstance(a, Const))
    pool = SymbolPool(taken)
    clauses = [[Literal(True, p, (Const(pool.fresh(f"d_{p}")),))] for p in extra_units]
    for m in skolemize_all(nnfs, pool):
        clauses.extend(to_cnf_clauses(m))
    return refute_clauses(clauses, max_steps)


def classically_valid(f, extra_units=(), max_steps: int = 20_000):
    return classical_refute([Not(f)], extra_units, max_steps)


# ---------------------------------------------------------------------------
# comparison with the labeled engine


def sequent_formula(s):
    """The sequent as one dynamic implication, premises binding into the
    conclusion."""
    if not s.premises:
        return s.conclusion
    return Implies(conj(list(s.premises)), s.conclusion)


def oracle_bindings(s, nonempty_domain: bool = False, max_steps: int = 20_000):
    """Returns ``(valid disambiguations, undecided disambiguations)`` as sets
    of frozensets of ``(pronoun, antecedent)`` pairs."""
    formulas, _ = annotate_sequent(s)
    labels = pronoun_labels(formulas)
    extra = nonempty_domain_predicates(s) if nonempty_domain else ()
    f = sequent_formula(s)
    valid, unknown = set(), set()
    for delta in enumerate_disambiguations(labels):
        verdict = classically_valid(normal_binding_form(f, delta), extra, max_steps)
        key = frozenset(delta.items())
        if verdict:
            valid.add(key)
        elif verdict is None:
            unknown.add(key)
    return valid, unknown


@dataclass
class Comparison:
    oracle_bindings: set
    labeled_bindings: set
    undecided: set

    @property
    def agree(self) -> bool:
        return not self.undecided and self.oracle_bindings == self.labeled_bindings


def labeled_bindings(s, nonempty_domain: bool = False, limits=None) -> set:
    from .clausify import clausify_sequent
    from .resolve import Limits, enumerate_bindings

    clauses, _ = clausify_sequent(s, nonempty_domain)
    formulas, _ = annotate_sequent(s)
    labels = pronoun_labels(formulas)
    out = set()
    for rep in enumerate_bindings(clauses, limits or Limits()):
        missing = {p: l for p, l in labels.items() if p not in rep}
        for d in rep.expand():
            for extra in enumerate_disambiguations(missing):
                out.add(frozenset(d | frozenset(extra.items())))
    return out


def compare_with_labeled(s, nonempty_domain: bool = False, limits=None) -> Comparison:
    valid, unknown = oracle_bindings(s, nonempty_domain)
    return Comparison(valid, labeled_bindings(s, nonempty_domain, limits), unknown)


__all__ = [
    "Comparison", "alpha_equal", "classical_refute", "classically_valid",
    "compare_with_labeled", "enumerate_disambiguations", "formula_prons",
    "labeled_bindings", "normal_binding_form", "oracle_bindings", "refute_clauses",
    "sequent_formula",
]
