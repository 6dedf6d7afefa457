"""Accessibility of antecedents: actively quantifying variables and the
annotation of pronoun occurrences with labels."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from .core import (
    And, Atom, Const, Exists, Forall, Implies, Not, Or, Pro, Pron, Sequent,
    conj, formula_prons, map_atoms,
)

log = logging.getLogger(__name__)


def aqv(f) -> frozenset:
    """Names a formula exports as antecedents to its right.

    Atoms export the constants occurring in them, so proper names stay
    available across sentences.
    """
    if isinstance(f, Atom):
        return frozenset(a.name for a in f.args if isinstance(a, Const))
    if isinstance(f, And):
        return aqv(f.left) | aqv(f.right)
    if isinstance(f, Exists):
        return aqv(f.body) | {f.var}
    if isinstance(f, Pro):
        return aqv(f.body)
    # negation, implication, disjunction and universal quantification are
    # barriers to external binding
    return frozenset()


def _label_pronoun(f, pid, label):
    def fix(atom):
        args = tuple(Pron(pid, label) if isinstance(a, Pron) and a.id == pid and a.label is None
                     else a for a in atom.args)
        return Atom(atom.pred, args)

    return map_atoms(f, fix)


def annot(V, f):
    """Replace every ``?u`` binder by labeled occurrences of ``u``."""
    V = frozenset(V)
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(annot(V, f.body))
    if isinstance(f, And):
        return And(annot(V, f.left), annot(V | aqv(f.left), f.right))
    if isinstance(f, Implies):
        return Implies(annot(V, f.left), annot(V | aqv(f.left), f.right))
    if isinstance(f, Or):
        return Or(annot(V, f.left), annot(V, f.right))
    if isinstance(f, Forall):
        return Forall(f.var, annot(V | {f.var}, f.body))
    if isinstance(f, Exists):
        return Exists(f.var, annot(V | {f.var}, f.body))
    if isinstance(f, Pro):
        return annot(V, _label_pronoun(f.body, f.pid, V))
    raise TypeError(f)


@dataclass(frozen=True)
class Diagnostic:
    pronoun: str
    message: str

    def __str__(self):
        return f"warning: pronoun {self.pronoun}: {self.message}"


def _split(f, n):
    """Undo the left-nested conjunction of ``n`` formulas."""
    out = []
    for _ in range(n - 1):
        out.append(f.right)
        f = f.left
    out.append(f)
    return out[::-1]


def annotate_sequent(s: Sequent):
    """Annotate premises and the negated conclusion as one discourse.

    Returns ``(formulas, diagnostics)``; the last formula is the negated
    conclusion.
    """
    parts = [*s.premises, Not(s.conclusion)]
    whole = annot(frozenset(), conj(parts))
    formulas = _split(whole, len(parts))
    diags = []
    prons = {}
    for f in formulas:
        prons.update(formula_prons(f))
    for pid in sorted(prons):
        if not prons[pid].label:
            d = Diagnostic(pid, "no accessible antecedent (empty label)")
            log.warning(str(d))
            diags.append(d)
    return formulas, diags


def pronoun_labels(formulas) -> dict:
    """pronoun id -> label over a list of annotated formulas."""
    out = {}
    for f in formulas:
        for pid, p in formula_prons(f).items():
            out[pid] = p.label
    return out
