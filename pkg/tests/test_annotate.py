import logging

from hypothesis import given, settings
from hypothesis import strategies as st

from dynres.annotate import annot, annotate_sequent, aqv, pronoun_labels
from dynres.core import And, Atom, Const, Exists, Forall, Implies, Not, Or, Pro, Pron
from dynres.parser import parse_formula, parse_sequent, pretty_print
from strategies import formulas

BUK = ("p(b)\nforall x (m(x) -> exists y (w(y) & ?u h(y,u)))\n"
       "|= exists z (w(z) & ?v h(z,v))\n")


def labels_of(f):
    return pronoun_labels([f])


def test_aqv_examples():
    assert aqv(parse_formula("exists x man(x)")) == {"x"}
    assert aqv(parse_formula("exists x p(x) -> exists y q(y)")) == frozenset()
    assert aqv(parse_formula("p(b)")) == {"b"}
    assert aqv(parse_formula("~exists x p(x)")) == frozenset()
    assert aqv(parse_formula("exists x p(x) | exists y q(y)")) == frozenset()
    assert aqv(parse_formula("forall x exists y p(x,y)")) == frozenset()


def test_annotate_donkey_suffers():
    f = annot(frozenset(), parse_formula(
        "forall x (f(x) & exists y (d(y) & o(x,y)) -> ?z b(x,z)) & ?u s(u)"))
    assert pretty_print(f) == "forall x (f(x) & exists y (d(y) & o(x,y)) -> b(x,{x,y}:z)) & s({}:u)"


def test_annotate_lone_pronoun():
    assert annot(frozenset(), parse_formula("?u p(u)")) == Atom("p", (Pron("u", frozenset()),))


def test_annotate_buk_premises():
    f = annot(frozenset(), parse_formula("p(b) & forall x (m(x) -> exists y (w(y) & ?u h(y,u)))"))
    assert labels_of(f) == {"u": frozenset({"b", "x", "y"})}


def test_annotate_buk_sequent():
    formulas_, diags = annotate_sequent(parse_sequent(BUK))
    assert len(formulas_) == 3 and isinstance(formulas_[-1], Not)
    assert pronoun_labels(formulas_) == {"u": {"b", "x", "y"}, "v": {"b", "z"}}
    assert diags == []


def test_empty_label_diagnostic(caplog):
    s = parse_sequent("forall x (f(x) & exists y (d(y) & o(x,y)) -> ?z b(x,z)) & ?u s(u)\n"
                      "|= exists w s(w)\n")
    with caplog.at_level(logging.WARNING):
        formulas_, diags = annotate_sequent(s)
    assert pronoun_labels(formulas_) == {"z": {"x", "y"}, "u": frozenset()}
    assert [d.pronoun for d in diags] == ["u"]
    assert "empty label" in caplog.text


def test_pronoun_under_negation():
    formulas_, _ = annotate_sequent(parse_sequent("exists x q(x)\n~?u p(u)\n|= r\n"))
    assert pronoun_labels(formulas_) == {"u": {"x"}}


def test_barriers():
    for text in ["~exists x (car(x) & own(j,x)) & ?u front(u)",
                 "forall x (f(x) -> exists y (d(y) & o(x,y))) & ?u grey(u)",
                 "(exists x p(x) | exists y q(y)) & ?u r(u)",
                 "(exists x p(x) -> exists y q(y)) & ?u r(u)"]:
        got = labels_of(annot(frozenset(), parse_formula(text)))["u"]
        assert not got & {"x", "y"}, text


# reference accessibility: a binder (or constant) is accessible from ?u when
# ?u lies in its scope, or when it sits in the left operand of a conjunction or
# implication whose right operand contains ?u, reached from that operand through
# conjunctions, existentials and pronoun binders only.

def _walk(f, path=()):
    yield path, f
    if isinstance(f, (And, Or, Implies)):
        yield from _walk(f.left, path + (0,))
        yield from _walk(f.right, path + (1,))
    elif isinstance(f, (Not, Forall, Exists, Pro)):
        yield from _walk(f.body, path + (0,))


def _node(f, path):
    for step in path:
        if isinstance(f, (And, Or, Implies)):
            f = f.left if step == 0 else f.right
        else:
            f = f.body
    return f


def reference_labels(f):
    nodes = dict(_walk(f))
    sources = []
    for path, g in nodes.items():
        if isinstance(g, (Forall, Exists)):
            sources.append((path, g.var, isinstance(g, Exists)))
        elif isinstance(g, Atom):
            sources.extend((path, a.name, True) for a in g.args if isinstance(a, Const))
    out = {}
    for ppath, g in nodes.items():
        if not isinstance(g, Pro):
            continue
        label = set()
        for spath, name, exports in sources:
            if ppath[:len(spath)] == spath and isinstance(nodes[spath], (Forall, Exists)):
                label.add(name)  # in scope
                continue
            k = 0
            while k < min(len(spath), len(ppath)) and spath[k] == ppath[k]:
                k += 1
            if k >= len(spath) or k >= len(ppath) or spath[k] != 0 or ppath[k] != 1:
                continue
            lca = nodes[spath[:k]]
            if not isinstance(lca, (And, Implies)) or not exports:
                continue
            ok = all(isinstance(nodes[spath[:j]], (And, Exists, Pro)) for j in range(k + 1, len(spath)))
            if ok:
                label.add(name)
        out[g.pid] = frozenset(label)
    return out


@settings(max_examples=400, deadline=None)
@given(formulas(max_depth=5))
def test_labels_match_reference_walk(f):
    got = labels_of(annot(frozenset(), f))
    ref = reference_labels(f)
    for pid, label in got.items():
        assert label == ref[pid], (pretty_print(f), pid)


@settings(max_examples=200, deadline=None)
@given(formulas(max_depth=4), st.sets(st.sampled_from(["n1", "n2", "n3"])),
       st.sets(st.sampled_from(["n1", "n2", "n3"])))
def test_labels_monotone_in_context(f, v1, v2):
    small = labels_of(annot(frozenset(v1), f))
    big = labels_of(annot(frozenset(v1 | v2), f))
    for pid in small:
        assert frozenset(v1) <= small[pid] <= big[pid]
