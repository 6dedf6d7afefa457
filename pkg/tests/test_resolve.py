import json

import pytest

from dynres.clausify import clausify_sequent
from dynres.core import Clause, Const, Literal, Pron, Skolem, Var
from dynres.parser import parse_sequent
from dynres.resolve import (
    Bind, Bound, DepthExhausted, Limits, Merge, Underspecified, enumerate_bindings,
    ops_from_substitution, prf_search, replay_records, replay_step, resolve_step, trace_records,
)
from dynres.unify import UnificationFailure

BUK = ("p(b)\nforall x (m(x) -> exists y (w(y) & ?u h(y,u)))\n"
       "|= exists z (w(z) & ?v h(z,v))\n")
INVALID = "exists x exists y ((A(x) | A(y)) & (?z A(z) -> (B & C)))\n|= B | C\n"


def clauses_of(text, nonempty=False):
    return clausify_sequent(parse_sequent(text), nonempty)[0]


def L(pred, *args, positive=True):
    return Literal(positive, pred, args)


def test_resolve_on_hate_literals():
    fy = Skolem("f_y", (Var("x"),), "y")
    c = Clause([L("w", Var("z"), positive=False),
                L("h", Var("z"), Pron("v", frozenset({"b"})), positive=False)])
    d = Clause([L("m", Var("x"), positive=False), L("h", fy, Pron("u", frozenset({"b", "x"})))])
    res, sigma = resolve_step(c, [L("h", Var("z"), Pron("v", frozenset({"b"})), positive=False)],
                              d, [L("h", fy, Pron("u", frozenset({"b", "x"})))])
    assert res == Clause([L("m", Var("x"), positive=False), L("w", fy, positive=False)])
    assert sigma.pron == {"u": Pron("v", frozenset({"b"}))}
    assert ops_from_substitution(sigma) == (Merge("u", "v", frozenset({"b"})),)


def test_resolve_propositional():
    res, sigma = resolve_step(Clause([L("p", positive=False)]), [L("p", positive=False)],
                              Clause([L("p")]), [L("p")])
    assert res == Clause() and not sigma


def test_resolve_binds_pronoun():
    z = Pron("z", frozenset({"x", "y"}))
    fx = Const("f", "x")
    res, sigma = resolve_step(Clause([L("A", z, positive=False), L("B")]), [L("A", z, positive=False)],
                              Clause([L("A", fx), L("A", Const("g", "y"))]), [L("A", fx)])
    assert sigma.pron == {"z": fx} and sigma.choice == {"z": "x"}
    assert res == Clause([L("B"), L("A", Const("g", "y"))])


def test_resolve_step_rejects_bad_selection():
    with pytest.raises(ValueError):
        resolve_step(Clause([L("p")]), [L("p")], Clause([L("p")]), [L("p")])
    with pytest.raises(UnificationFailure):
        resolve_step(Clause([L("p", Const("a"), positive=False)]), [L("p", Const("a"), positive=False)],
                     Clause([L("p", Const("b"))]), [L("p", Const("b"))])


def test_buk_refuted_without_proper_name():
    r = prf_search(clauses_of(BUK, nonempty=True))
    assert r.status == "Refuted"
    assert r.report.expand() == {frozenset({("u", "b"), ("v", "b")})}
    assert isinstance(r.report["u"], Underspecified) and r.report["u"].label == {"b"}
    used = {str(r.store[s.result]) for s in r.trace}
    assert "{p(b^b)}" not in used


def test_buk_needs_nonempty_domain():
    assert prf_search(clauses_of(BUK)).status == "Saturated"


def test_invalid_not_refuted_but_local_variant_is():
    cl = clauses_of(INVALID)
    assert prf_search(cl, Limits(max_depth=20)).status in ("Saturated", "DepthExhausted")
    assert prf_search(cl, Limits(max_depth=20), global_instantiation=False).status == "Refuted"


def test_trivial_refutation():
    r = prf_search([Clause([L("p")]), Clause([L("p", positive=False)])])
    assert r.status == "Refuted" and len(r.trace) == 3


def test_step_budget_reports_exhaustion():
    # successor chain: saturation never terminates
    x = Var("x")
    chain = [Clause([L("n", x, positive=False), L("n", Skolem("s", (x,), "s"))]),
             Clause([L("n", Const("o"))]), Clause([L("q", positive=False)])]
    assert isinstance(prf_search(chain, Limits(max_depth=3)), DepthExhausted)
    assert isinstance(prf_search(chain, Limits(max_steps=5)), DepthExhausted)


def test_enumerate_man_boy():
    text = "exists x (man(x) & exists y (boy(y) & see(x,y))) & ?u whistle(u)\n|= exists w whistle(w)\n"
    reports = enumerate_bindings(clauses_of(text))
    expanded = set().union(*(r.expand() for r in reports))
    assert expanded == {frozenset({("u", "x")}), frozenset({("u", "y")})}


def test_enumerate_buk():
    reports = enumerate_bindings(clauses_of(BUK, nonempty=True))
    expanded = set().union(*(r.expand() for r in reports))
    assert expanded == {frozenset({("u", "b"), ("v", "b")}), frozenset({("u", "y"), ("v", "z")})}


def test_enumerate_unprovable():
    assert enumerate_bindings(clauses_of(INVALID)) == []


def test_report_rendering():
    rep = prf_search(clauses_of(BUK, nonempty=True)).report
    assert str(rep) == "u in {b} (shared with v); v in {b} (shared with u)"
    text = "exists x (man(x) & exists y (boy(y) & see(x,y))) & ?u whistle(u)\n|= exists z (boy(z) & whistle(z))\n"
    assert prf_search(clauses_of(text)).report == {"u": Bound("y")}


def test_trace_replays():
    r = prf_search(clauses_of(BUK, nonempty=True))
    store = dict(enumerate(r.store.clauses))
    for st in r.trace:
        assert replay_step(st, store) == r.store[st.result]
    records = json.loads(json.dumps(trace_records(r)))
    assert replay_records(records) == Clause()


def test_tampered_trace_is_rejected():
    r = prf_search(clauses_of(BUK, nonempty=True))
    records = trace_records(r)
    bad = [rec for rec in records if rec["kind"] == "resolve"][0]
    bad["clause"] = []
    with pytest.raises(ValueError):
        replay_records(records)


def test_limits_must_be_positive():
    with pytest.raises(ValueError):
        Limits(max_depth=0)


def test_universal_antecedent_binding():
    text = "forall x (knight(x) -> exists y (horse(y) & ?u carry(y,u)))\nknight(k)\n|= exists z (horse(z) & carry(z,k))\n"
    r = prf_search(clauses_of(text))
    assert r.status == "Refuted" and r.report == {"u": Bound("x")}
    assert any(isinstance(o, Bind) for s in r.trace for o in s.ops)
