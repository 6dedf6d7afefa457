from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynres.annotate import annotate_sequent, pronoun_labels
from dynres.core import Clause, Implies, Literal
from dynres.oracle import (
    alpha_equal, classical_refute, classically_valid, compare_with_labeled,
    enumerate_disambiguations, normal_binding_form, oracle_bindings, refute_clauses,
)
from dynres.parser import parse_formula, parse_sequent

DONKEY = "exists x (f(x) & exists y (d(y) & o(x,y))) -> ?u ?v b(u,v)"
NINE = "forall x forall y (f(x) & d(y) & o(x,y) -> b(x,y))"


def test_enumerate_counts():
    formulas, _ = annotate_sequent(parse_sequent(
        "exists x (man(x) & exists y (boy(y) & see(x,y))) & ?u whistle(u)\n|= q\n"))
    labels = pronoun_labels(formulas)
    assert enumerate_disambiguations(labels) == [{"u": "x"}, {"u": "y"}]
    assert enumerate_disambiguations({"u": {"x"}, "v": {"y"}}) == [{"u": "x", "v": "y"}]
    assert enumerate_disambiguations({"u": frozenset(), "v": {"y"}}) == []
    assert enumerate_disambiguations({}) == [{}]


def test_donkey_normal_form():
    g = normal_binding_form(parse_formula(DONKEY), {"u": "x", "v": "y"})
    assert alpha_equal(g, parse_formula(NINE))
    assert not alpha_equal(g, parse_formula("forall x forall y (f(x) & d(y) & o(x,y) -> b(y,x))"))


def test_man_boy_normal_form():
    f = parse_formula("exists x (man(x) & exists y (boy(y) & see(x,y))) & ?u whistle(u)")
    g = normal_binding_form(f, {"u": "y"})
    assert alpha_equal(g, parse_formula("exists x exists y (man(x) & boy(y) & see(x,y) & whistle(y))"))


def test_normal_form_rejects_unreachable_antecedent():
    f = parse_formula("~exists x p(x) & ?u q(u)")
    with pytest.raises(ValueError):
        normal_binding_form(f, {"u": "x"})


def test_alpha_equal_renaming():
    assert alpha_equal(parse_formula("forall a p(a)"), parse_formula("forall b p(b)"))
    assert not alpha_equal(parse_formula("forall a p(a)"), parse_formula("exists b p(b)"))


def test_donkey_biconditional():
    donkey = normal_binding_form(parse_formula(DONKEY), {"u": "x", "v": "y"})
    nine = parse_formula("forall p forall q (f(p) & d(q) & o(p,q) -> b(p,q))")
    assert classically_valid(Implies(donkey, nine)) is True
    assert classically_valid(Implies(nine, donkey)) is True
    assert classically_valid(Implies(nine, parse_formula("b(c,e)"))) is False


def test_classical_refute_basics():
    assert classical_refute([parse_formula("p & ~p")]) is True
    assert classical_refute([parse_formula("p | q")]) is False
    assert classical_refute([parse_formula("forall x (p(x) -> q(x))"), parse_formula("p(a)"),
                             parse_formula("~q(a)")]) is True


def test_oracle_bindings_man_boy():
    s = parse_sequent("exists x (man(x) & exists y (boy(y) & see(x,y))) & ?u whistle(u)\n"
                      "|= exists w whistle(w)\n")
    valid, unknown = oracle_bindings(s)
    assert valid == {frozenset({("u", "x")}), frozenset({("u", "y")})} and not unknown


def test_compare_buk():
    s = parse_sequent("p(b)\nforall x (m(x) -> exists y (w(y) & ?u h(y,u)))\n"
                      "|= exists z (w(z) & ?v h(z,v))\n")
    cmp = compare_with_labeled(s, nonempty_domain=True)
    assert cmp.agree
    assert cmp.oracle_bindings == {frozenset({("u", "b"), ("v", "b")}),
                                   frozenset({("u", "y"), ("v", "z")})}


ATOMS = ("p", "q", "r")


def _satisfiable(clauses):
    for vals in product([False, True], repeat=len(ATOMS)):
        env = dict(zip(ATOMS, vals))
        if all(any(env[l.pred] == l.positive for l in c) for c in clauses):
            return True
    return False


lit = st.builds(Literal, st.booleans(), st.sampled_from(ATOMS), st.just(()))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.frozensets(lit, max_size=3), max_size=8))
def test_classical_prover_matches_truth_tables(raw):
    clauses = [Clause(c) for c in raw]
    assert refute_clauses(clauses) is (not _satisfiable(clauses))
