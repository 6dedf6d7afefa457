"""Labeled resolution with global pronoun instantiation.

Search works over *pronoun contexts*.  A context fixes which pronouns have
been bound, merged or had their labels restricted; those decisions apply to
every clause, input and derived.  Inside a context the engine saturates level
by level using only steps whose unifier touches no pronoun.  A step whose
unifier would bind or merge pronouns is not performed; its pronoun part
becomes a candidate decision, and the search descends into the context where
that decision holds, re-running saturation there.  Descending undoes nothing
in the parent, so backtracking is free.

Candidates are tried in order: merges before bindings, then explicit
specialization of a pronoun to each name in its label (needed when the
antecedent is realized by a clause-local variable, where tags alone cannot
drive unification).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Union

from .core import (
    Clause, Const, Literal, Pron, Skolem, Substitution, Var, apply_substitution,
    clause_prons, clause_vars, renaming_apart,
)
from .unify import UnificationFailure, mgu_star

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Limits:
    max_depth: int = 8  # saturation levels per context
    max_steps: int = 50_000  # resolvents generated over the whole search

    def __post_init__(self):
        if self.max_depth < 1 or self.max_steps < 1:
            raise ValueError("limits must be positive")


# ---------------------------------------------------------------------------
# global pronoun decisions


@dataclass(frozen=True)
class Bind:
    pron: str
    name: str

    def __str__(self):
        return f"{self.pron} := {self.name}"


@dataclass(frozen=True)
class Merge:
    pron: str
    into: str
    label: frozenset

    def __str__(self):
        return f"{self.pron} := {{{','.join(sorted(self.label))}}}:{self.into}"


Decision = Union[Bind, Merge]


def ops_from_substitution(s: Substitution) -> tuple:
    ops = []
    for pid, img in sorted(s.pron.items()):
        if isinstance(img, Pron):
            ops.append(Merge(pid, img.id, frozenset(img.label)))
        else:
            ops.append(Bind(pid, s.choice[pid]))
    return tuple(ops)


def op_substitution(ops) -> Substitution:
    pron, choice = {}, {}
    for op in ops:
        if isinstance(op, Bind):
            pron[op.pron] = Const(op.name)
            choice[op.pron] = op.name
        else:
            pron[op.pron] = Pron(op.into, op.label)
    return Substitution({}, pron, choice)


def apply_ops(ops, clause: Clause) -> Clause:
    return apply_substitution(op_substitution(ops), clause)


# ---------------------------------------------------------------------------
# binding reports


@dataclass(frozen=True)
class Bound:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Underspecified:
    label: frozenset
    group: str

    def __str__(self):
        return "{" + ",".join(sorted(self.label)) + "}"


class BindingReport(dict):
    """pronoun id -> Bound | Underspecified (with its merge group)."""

    def expand(self) -> set:
        """All total disambiguations consistent with the report."""
        groups: dict = {}
        fixed = {}
        for pid, v in self.items():
            if isinstance(v, Bound):
                fixed[pid] = v.name
            else:
                groups.setdefault(v.group, (v.label, []))[1].append(pid)
        out = [dict(fixed)]
        for label, members in groups.values():
            out = [{**d, **{m: n for m in members}} for d in out for n in sorted(label)]
        return {frozenset(d.items()) for d in out}

    def key(self):
        return frozenset((k, ("b", v.name) if isinstance(v, Bound) else ("u", v.label))
                         for k, v in self.items())

    def __str__(self):
        parts = []
        for pid in sorted(self):
            v = self[pid]
            if isinstance(v, Bound):
                parts.append(f"{pid} -> {v.name}")
            else:
                mates = sorted(k for k, w in self.items()
                               if isinstance(w, Underspecified) and w.group == v.group)
                shared = f" (shared with {','.join(m for m in mates if m != pid)})" if len(mates) > 1 else ""
                parts.append(f"{pid} in {v}{shared}")
        return "; ".join(parts) if parts else "(no pronouns)"


# ---------------------------------------------------------------------------
# clause bookkeeping


@dataclass
class ProofStep:
    kind: str  # "input" | "resolve" | "instantiate"
    result: int
    parents: tuple = ()
    neg: tuple = ()  # selected negative literals of the first parent
    pos: tuple = ()  # selected positive literals of the second parent
    renaming: dict = field(default_factory=dict)  # applied to the second parent
    sigma: Substitution = field(default_factory=Substitution)
    normalize: dict = field(default_factory=dict)  # applied to the resolvent
    ops: tuple = ()


class ClauseStore:
    def __init__(self):
        self.clauses: list = []
        self.steps: list = []

    def add(self, clause: Clause, step: ProofStep) -> int:
        cid = len(self.clauses)
        self.clauses.append(clause)
        step.result = cid
        self.steps.append(step)
        return cid

    def __getitem__(self, cid):
        return self.clauses[cid]

    def trace(self, cid: int) -> list:
        need, stack = set(), [cid]
        while stack:
            c = stack.pop()
            if c in need:
                continue
            need.add(c)
            stack.extend(self.steps[c].parents)
        return [self.steps[c] for c in sorted(need)]


def _masked(lit: Literal) -> str:
    def t(a):
        if isinstance(a, Var):
            return "_^" + a.tag
        if isinstance(a, Skolem):
            return f"{a.fname}({','.join(t(x) for x in a.args)})"
        if isinstance(a, Pron) and a.env:
            return f"{a}[{';'.join(t(e) for _, e in a.env)}]"
        return str(a)
    return ("" if lit.positive else "~") + lit.pred + "(" + ",".join(t(a) for a in lit.args) + ")"


def _walk_vars(t, out):
    if isinstance(t, Var):
        if t not in out:
            out.append(t)
    elif isinstance(t, Skolem):
        for a in t.args:
            _walk_vars(a, out)
    elif isinstance(t, Pron) and t.env:
        for _, e in t.env:
            _walk_vars(e, out)


def normalizing_renaming(clause) -> dict:
    """Rename variables to tag-based names in a canonical order."""
    order: list = []
    for lit in sorted(clause, key=_masked):
        for a in lit.args:
            _walk_vars(a, order)
    ren, used = {}, set()
    for v in order:
        name, k = v.tag, 0
        while name in used:
            k += 1
            name = f"{v.tag}{k}"
        used.add(name)
        if name != v.name:
            ren[v.name] = Var(name, v.tag)
    return ren


def _tautology(clause) -> bool:
    return any(l.positive and l.negate() in clause for l in clause)


def _subsets(lits):
    for r in range(1, len(lits) + 1):
        yield from combinations(lits, r)


def _resolve(c: Clause, neg, d: Clause, pos):
    ren = renaming_apart(d, clause_vars(c))
    pi = Substitution(ren)
    d2 = apply_substitution(pi, d) if ren else d
    pos2 = tuple(apply_substitution(pi, l) for l in pos) if ren else tuple(pos)
    sigma = mgu_star([*neg, *pos2])
    rest = [l for l in c if l not in neg] + [l for l in d2 if l not in pos2]
    resolvent = Clause(apply_substitution(sigma, l) for l in rest)
    return resolvent, sigma, ren


def resolve_step(c: Clause, neg, d: Clause, pos, state=None):
    """One application of the resolution rule.

    ``neg`` are negative literals of ``c``, ``pos`` positive literals of
    ``d`` with the same predicate.  Returns ``(resolvent, sigma)``; raises
    :class:`UnificationFailure` when the atoms are not unifiable.  The pronoun
    part of ``sigma`` is meant for global application.
    """
    if not neg or not pos or any(l.positive for l in neg) or any(not l.positive for l in pos):
        raise ValueError("need negative literals from c and positive ones from d")
    resolvent, sigma, _ = _resolve(c, neg, d, pos)
    return resolvent, sigma


def replay_step(step: ProofStep, store_clauses) -> Clause:
    """Recompute the clause a recorded step derived."""
    if step.kind == "input":
        return store_clauses[step.result]
    if step.kind == "instantiate":
        return apply_ops(step.ops, store_clauses[step.parents[0]])
    c, d = (store_clauses[p] for p in step.parents)
    pi = Substitution(step.renaming)
    d2 = apply_substitution(pi, d)
    pos2 = tuple(apply_substitution(pi, l) for l in step.pos)
    rest = [l for l in c if l not in step.neg] + [l for l in d2 if l not in pos2]
    out = Clause(apply_substitution(step.sigma, l) for l in rest)
    if step.normalize:
        out = apply_substitution(Substitution(step.normalize), out)
    return out


# ---------------------------------------------------------------------------
# search


@dataclass
class ProofState:
    clause_ids: list
    decisions: dict  # original pronoun id -> ("bound", name) | ("free", current id, label)
    taken: tuple = ()  # decisions applied on the way here

    @property
    def global_pron(self) -> Substitution:
        return op_substitution(self.taken)

    def key(self):
        groups: dict = {}
        for pid, st in self.decisions.items():
            if st[0] == "free":
                groups.setdefault(st[1], []).append(pid)
        rep = {cur: min(m) for cur, m in groups.items()}
        return frozenset((pid, st if st[0] == "bound" else ("free", rep[st[1]], st[2]))
                         for pid, st in self.decisions.items())

    def report(self) -> BindingReport:
        rep = BindingReport()
        for pid, st in self.decisions.items():
            rep[pid] = Bound(st[1]) if st[0] == "bound" else Underspecified(st[2], st[1])
        return rep


@dataclass
class Refuted:
    trace: list
    report: BindingReport
    empty_clause: int
    status: str = "Refuted"


@dataclass
class Saturated:
    status: str = "Saturated"


@dataclass
class DepthExhausted:
    status: str = "DepthExhausted"


ProofResult = Union[Refuted, Saturated, DepthExhausted]


def _apply_decisions(decisions: dict, ops) -> dict:
    out = dict(decisions)
    for op in ops:
        for pid, st in list(out.items()):
            if st[0] != "free" or st[1] != op.pron:
                continue
            if isinstance(op, Bind):
                out[pid] = ("bound", op.name)
            else:
                out[pid] = ("free", op.into, op.label)
    return out


class _Search:
    def __init__(self, clauses, limits: Limits, global_instantiation: bool):
        self.limits = limits
        self.global_instantiation = global_instantiation
        self.store = ClauseStore()
        self.steps = 0
        self.exhausted = False
        self.visited: set = set()
        self.contexts = 0
        ids, seen = [], set()
        for c in clauses:
            c = Clause(c)
            if c in seen:
                continue
            seen.add(c)
            ids.append(self.store.add(c, ProofStep("input", 0)))
        decisions = {}
        for cid in ids:
            for pid, p in clause_prons(self.store[cid]).items():
                decisions.setdefault(pid, ("free", pid, p.label))
        self.root = ProofState(ids, decisions)

    # -- contexts --------------------------------------------------------

    def child(self, state: ProofState, ops) -> ProofState:
        ids, seen = [], set()
        for cid in state.clause_ids:
            c = self.store[cid]
            new = apply_ops(ops, c)
            if new != c:
                cid = self.store.add(new, ProofStep("instantiate", 0, (cid,), ops=tuple(ops)))
            if new not in seen:
                seen.add(new)
                ids.append(cid)
        return ProofState(ids, _apply_decisions(state.decisions, ops), state.taken + tuple(ops))

    def specializations(self, state: ProofState) -> list:
        present = {}
        for cid in state.clause_ids:
            present.update(clause_prons(self.store[cid]))
        out = []
        for pid in sorted(present):
            for name in sorted(present[pid].label or ()):
                out.append((Bind(pid, name),))
        return out

    # -- saturation ------------------------------------------------------

    def saturate(self, state: ProofState):
        """Returns (empty clause id or None, candidate decision tuples)."""
        all_ids = list(state.clause_ids)
        seen = {self.store[c] for c in all_ids}
        candidates: list = []
        cand_seen: set = set()
        for c in all_ids:
            if not self.store[c]:
                return c, []
        new = list(all_ids)
        for _level in range(self.limits.max_depth):
            produced = []
            new_set = set(new)
            for b in new:
                for a in all_ids:
                    if a in new_set and a > b:
                        continue
                    for x, y in ((a, b), (b, a)) if a != b else ((a, a),):
                        hit = self._pair(x, y, seen, produced, candidates, cand_seen)
                        if hit is not None:
                            return hit, candidates
                        if self.steps >= self.limits.max_steps:
                            self.exhausted = True
                            return None, candidates
            if not produced:
                return None, candidates
            all_ids.extend(produced)
            new = produced
        self.exhausted = True
        return None, candidates

    def _pair(self, x, y, seen, produced, candidates, cand_seen):
        c, d = self.store[x], self.store[y]
        for pred_key in {(l.pred, len(l.args)) for l in c if not l.positive}:
            negs = [l for l in c.sorted() if not l.positive and (l.pred, len(l.args)) == pred_key]
            poss = [l for l in d.sorted() if l.positive and (l.pred, len(l.args)) == pred_key]
            if not poss:
                continue
            for neg in _subsets(negs):
                for pos in _subsets(poss):
                    try:
                        resolvent, sigma, ren = _resolve(c, neg, d, pos)
                    except UnificationFailure:
                        continue
                    if sigma.pron and self.global_instantiation:
                        ops = ops_from_substitution(sigma)
                        if ops not in cand_seen:
                            cand_seen.add(ops)
                            candidates.append(ops)
                        continue
                    self.steps += 1
                    norm = normalizing_renaming(resolvent)
                    if norm:
                        resolvent = apply_substitution(Substitution(norm), resolvent)
                    if resolvent in seen or _tautology(resolvent):
                        continue
                    seen.add(resolvent)
                    cid = self.store.add(resolvent, ProofStep(
                        "resolve", 0, (x, y), tuple(neg), tuple(pos), ren, sigma, norm))
                    if not resolvent:
                        return cid
                    produced.append(cid)
                    if self.steps >= self.limits.max_steps:
                        return None
        return None

    # -- depth-first over contexts --------------------------------------

    def run(self, state: ProofState, found: list, stop_at_first: bool):
        key = state.key()
        if key in self.visited:
            return
        self.visited.add(key)
        self.contexts += 1
        if any(st[0] == "free" and not st[2] for st in state.decisions.values()):
            return  # a pronoun without antecedents admits no disambiguation
        empty, candidates = self.saturate(state)
        if empty is not None:
            found.append(Refuted(self.store.trace(empty), state.report(), empty))
            return
        if self.steps >= self.limits.max_steps:
            return
        merges = [o for o in candidates if all(isinstance(x, Merge) for x in o)]
        binds = [o for o in candidates if o not in merges]
        for ops in merges + binds + self.specializations(state):
            self.run(self.child(state, ops), found, stop_at_first)
            if found and stop_at_first:
                return
            if self.steps >= self.limits.max_steps:
                return


def prf_search(clauses, limits: Limits = Limits(), *, global_instantiation: bool = True,
               stats: dict | None = None) -> ProofResult:
    """Search for a refutation of ``clauses``."""
    search = _Search(clauses, limits, global_instantiation)
    found: list = []
    search.run(search.root, found, stop_at_first=True)
    if stats is not None:
        stats.update(contexts=search.contexts, steps=search.steps)
    if found:
        found[0].store = search.store
        return found[0]
    return DepthExhausted() if search.exhausted else Saturated()


def enumerate_bindings(clauses, limits: Limits = Limits(), stats: dict | None = None) -> list:
    """Binding reports of every refuting context, deduplicated."""
    search = _Search(clauses, limits, True)
    found: list = []
    search.run(search.root, found, stop_at_first=False)
    if stats is not None:
        stats.update(contexts=search.contexts, steps=search.steps,
                     exhausted=search.exhausted)
    out, keys = [], set()
    for r in found:
        k = r.report.key()
        if k not in keys:
            keys.add(k)
            out.append(r.report)
    return out


# ---------------------------------------------------------------------------
# trace export


def term_to_json(t):
    if isinstance(t, Var):
        return {"var": t.name, "tag": t.tag}
    if isinstance(t, Const):
        return {"const": t.name, "tag": t.tag}
    if isinstance(t, Skolem):
        return {"fun": t.fname, "tag": t.tag, "args": [term_to_json(a) for a in t.args]}
    return {"pron": t.id,
            "label": None if t.label is None else sorted(t.label),
            "env": None if t.env is None else [[n, term_to_json(e)] for n, e in t.env]}


def term_from_json(d):
    if "var" in d:
        return Var(d["var"], d["tag"])
    if "const" in d:
        return Const(d["const"], d["tag"])
    if "fun" in d:
        return Skolem(d["fun"], tuple(term_from_json(a) for a in d["args"]), d["tag"])
    env = d["env"]
    return Pron(d["pron"], None if d["label"] is None else frozenset(d["label"]),
                None if env is None else tuple((n, term_from_json(e)) for n, e in env))


def literal_to_json(l: Literal):
    return {"positive": l.positive, "pred": l.pred, "args": [term_to_json(a) for a in l.args]}


def literal_from_json(d) -> Literal:
    return Literal(d["positive"], d["pred"], tuple(term_from_json(a) for a in d["args"]))


def _sub_to_json(s: Substitution):
    return {"proper": {k: term_to_json(v) for k, v in sorted(s.proper.items())},
            "pron": {k: term_to_json(v) for k, v in sorted(s.pron.items())},
            "choice": dict(sorted(s.choice.items()))}


def _sub_from_json(d) -> Substitution:
    return Substitution({k: term_from_json(v) for k, v in d["proper"].items()},
                        {k: term_from_json(v) for k, v in d["pron"].items()},
                        dict(d["choice"]))


def _op_to_json(op):
    if isinstance(op, Bind):
        return {"bind": op.pron, "name": op.name}
    return {"merge": op.pron, "into": op.into, "label": sorted(op.label)}


def _op_from_json(d):
    if "bind" in d:
        return Bind(d["bind"], d["name"])
    return Merge(d["merge"], d["into"], frozenset(d["label"]))


def trace_records(result: Refuted) -> list:
    """One JSON-serializable record per step of a refutation."""
    out = []
    for st in result.trace:
        out.append({
            "id": st.result,
            "kind": st.kind,
            "parents": list(st.parents),
            "neg": [literal_to_json(l) for l in st.neg],
            "pos": [literal_to_json(l) for l in st.pos],
            "renaming": {k: term_to_json(v) for k, v in sorted(st.renaming.items())},
            "sigma": _sub_to_json(st.sigma),
            "normalize": {k: term_to_json(v) for k, v in sorted(st.normalize.items())},
            "ops": [_op_to_json(o) for o in st.ops],
            "clause": [literal_to_json(l) for l in result.store[st.result].sorted()],
        })
    return out


def step_from_record(r) -> ProofStep:
    return ProofStep(
        r["kind"], r["id"], tuple(r["parents"]),
        tuple(literal_from_json(l) for l in r["neg"]),
        tuple(literal_from_json(l) for l in r["pos"]),
        {k: term_from_json(v) for k, v in r["renaming"].items()},
        _sub_from_json(r["sigma"]),
        {k: term_from_json(v) for k, v in r["normalize"].items()},
        tuple(_op_from_json(o) for o in r["ops"]),
    )


def replay_records(records) -> Clause:
    """Re-derive every recorded clause; returns the last one.

    Raises ``ValueError`` if a step does not reproduce its recorded clause or
    the resolved literals are not unified by the recorded unifier.
    """
    clauses: dict = {}
    last = None
    for r in records:
        st = step_from_record(r)
        recorded = Clause(literal_from_json(l) for l in r["clause"])
        if st.kind == "input":
            clauses[st.result] = recorded
            last = recorded
            continue
        for p in st.parents:
            if p not in clauses:
                raise ValueError(f"step {st.result} uses unknown clause {p}")
        if st.kind == "resolve":
            c, d = clauses[st.parents[0]], clauses[st.parents[1]]
            if not set(st.neg) <= c or not set(st.pos) <= d:
                raise ValueError(f"step {st.result}: selected literals not in parents")
            pi = Substitution(st.renaming)
            atoms = {apply_substitution(st.sigma, l).args for l in st.neg}
            atoms |= {apply_substitution(st.sigma, apply_substitution(pi, l)).args
                      for l in st.pos}
            if len(atoms) != 1:
                raise ValueError(f"step {st.result}: unifier does not unify the literals")
        got = replay_step(st, clauses)
        if got != recorded:
            raise ValueError(f"step {st.result}: replay gives {got}, recorded {recorded}")
        clauses[st.result] = got
        last = got
    return last
