"""Labeled unification: rule-based rewriting of equation sets, extended to
labeled pronoun variables.

Equations are ``(lhs, rhs)`` pairs of terms.  ``unify_star`` rewrites an
equation set to solved form or raises :class:`UnificationFailure`.

Rule priority is fixed: equations with at most one pronoun side are processed
before pronoun-pronoun equations, leftmost first, so that environments of
pronoun occurrences are as instantiated as possible when labels are compared.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Const, Literal, Pron, Skolem, Substitution, Var, apply_substitution,
    tag_of, term_prons, term_vars,
)


class UnificationFailure(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass
class SolvedSet:
    equations: list
    choice: dict = field(default_factory=dict)
    steps: int = 0

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)


def term_size(t) -> int:
    if isinstance(t, Skolem):
        return 1 + sum(term_size(a) for a in t.args)
    if isinstance(t, Pron) and t.env:
        return 1 + sum(term_size(e) for _, e in t.env)
    return 1


def step_ceiling(equations) -> int:
    """Upper bound on rule applications used to detect non-termination."""
    size = sum(term_size(s) + term_size(t) for s, t in equations)
    prons: dict = {}
    for s, t in equations:
        term_prons(s, prons)
        term_prons(t, prons)
    return 4 * size * size + 8 * (len(prons) + 1) * size + 16


def _is_pp(eq) -> bool:
    return isinstance(eq[0], Pron) and isinstance(eq[1], Pron)


def _apply_all(sub, todo, solved):
    todo[:] = [(apply_substitution(sub, s), apply_substitution(sub, t)) for s, t in todo]
    solved[:] = [(s, apply_substitution(sub, t)) for s, t in solved]


def _shared_label(p: Pron, q: Pron) -> frozenset:
    common = p.label & q.label
    if p.env is None or q.env is None:
        return common
    pe, qe = p.env_map(), q.env_map()
    return frozenset(n for n in common if pe.get(n) == qe.get(n))


def unify_star(equations, max_steps: int | None = None) -> SolvedSet:
    todo = list(equations)
    solved: list = []
    choice: dict = {}
    steps = 0
    limit = step_ceiling(todo) if max_steps is None else max_steps

    while todo:
        steps += 1
        if steps > limit:
            raise RuntimeError(f"labeled unification exceeded {limit} steps")
        idx = next((i for i, eq in enumerate(todo) if not _is_pp(eq)), 0)
        s, t = todo.pop(idx)

        if s == t:  # trivial
            continue
        if isinstance(t, Var) and not isinstance(s, Var):  # orient
            s, t = t, s
        if isinstance(s, Var):
            if s.name in term_vars(t):  # occurs check
                raise UnificationFailure("occurs", f"{s} in {t}")
            solved.append((s, t))  # eliminate
            _apply_all(Substitution({s.name: t}), todo, solved)
            continue
        if isinstance(t, Pron) and not isinstance(s, Pron):
            s, t = t, s
        if isinstance(s, Pron) and not isinstance(t, Pron):  # bind pronoun to antecedent
            name = tag_of(t)
            if s.label is not None and name not in s.label:
                raise UnificationFailure("inaccessible", f"{t} from {s}")
            if s.id in term_prons(t):
                raise UnificationFailure("occurs", f"{s} in {t}")
            env = s.env_map()
            if name in env and env[name] != t:
                todo.append((env[name], t))
            for lhs, rhs in solved:
                if isinstance(lhs, Pron) and isinstance(rhs, Pron) and rhs.id == s.id:
                    choice[lhs.id] = name
            choice[s.id] = name
            solved.append((s, t))
            _apply_all(Substitution({}, {s.id: t}, {s.id: name}), todo, solved)
            continue
        if isinstance(s, Pron):  # both pronouns
            if s.label is None or t.label is None:
                raise UnificationFailure("disjoint-labels", "unannotated pronoun")
            shared = _shared_label(s, t)
            if not shared:
                raise UnificationFailure("disjoint-labels", f"{s} and {t}")
            if s.id == t.id:
                solved.append((s, s.restrict(s.id, shared)))
                _apply_all(Substitution({}, {s.id: Pron(s.id, shared)}), todo, solved)
            elif shared == t.label:
                solved.append((s, t))
                _apply_all(Substitution({}, {s.id: Pron(t.id, shared)}), todo, solved)
            elif shared == s.label:
                solved.append((t, s))
                _apply_all(Substitution({}, {t.id: Pron(s.id, shared)}), todo, solved)
            else:  # merge onto shared label
                merged = t.restrict(t.id, shared)
                solved.append((s, merged))
                solved.append((t, merged))
                _apply_all(Substitution({}, {s.id: Pron(t.id, shared), t.id: Pron(t.id, shared)}),
                           todo, solved)
            continue
        # both non-variable, non-pronoun terms
        if isinstance(s, Const) and isinstance(t, Const):
            if s.name != t.name:
                raise UnificationFailure("clash", f"{s} vs {t}")  # clash
            continue
        if isinstance(s, Skolem) and isinstance(t, Skolem):
            if s.fname != t.fname or len(s.args) != len(t.args):
                raise UnificationFailure("clash", f"{s} vs {t}")
            todo[0:0] = list(zip(s.args, t.args))  # decompose
            continue
        raise UnificationFailure("clash", f"{s} vs {t}")

    return SolvedSet(solved, choice, steps)


def _key(t):
    if isinstance(t, Var):
        return ("v", t.name)
    if isinstance(t, Pron):
        return ("p",) + t.key
    return None


def _occurrence_keys(t, acc):
    if isinstance(t, Var):
        acc.add(("v", t.name))
    elif isinstance(t, Pron):
        acc.add(("p",) + t.key)
        if t.env:
            for _, e in t.env:
                _occurrence_keys(e, acc)
    elif isinstance(t, Skolem):
        for a in t.args:
            _occurrence_keys(a, acc)
    return acc


def is_solved_set(equations) -> bool:
    lhs_keys = []
    for s, _ in equations:
        k = _key(s)
        if k is None:
            return False
        lhs_keys.append(k)
    if len(set(lhs_keys)) != len(lhs_keys):
        return False
    rhs_keys: set = set()
    for _, t in equations:
        _occurrence_keys(t, rhs_keys)
    return not (set(lhs_keys) & rhs_keys)


def solved_to_substitution(solved) -> Substitution:
    eqs = list(solved)
    if not is_solved_set(eqs):
        raise ValueError("equation set is not in solved form")
    proper, pron = {}, {}
    for s, t in eqs:
        if isinstance(s, Var):
            proper[s.name] = t
        else:
            pron[s.id] = t
    choice = dict(getattr(solved, "choice", {}))
    choice = {k: v for k, v in choice.items() if k in pron and not isinstance(pron[k], Pron)}
    return Substitution(proper, pron, choice)


def literal_equations(lits) -> list:
    lits = list(lits)
    if not lits:
        return []
    first = lits[0]
    eqs = []
    for other in lits[1:]:
        if other.pred != first.pred or len(other.args) != len(first.args):
            raise ValueError(f"cannot unify {first.atom_str()} with {other.atom_str()}")
        eqs.extend(zip(first.args, other.args))
    return eqs


def mgu_star(lits) -> Substitution:
    """Most general labeled unifier of a set of literals (signs ignored)."""
    return solved_to_substitution(unify_star(literal_equations(lits)))


def unify_atoms(a: Literal, b: Literal) -> Substitution:
    return mgu_star([a, b])
