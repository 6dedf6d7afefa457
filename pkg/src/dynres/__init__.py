"""Resolution with pronoun binding for dynamic first-order logic."""
from .annotate import annotate_sequent, annot, aqv
from .clausify import clausify_sequent
from .parser import ParseError, parse_formula, parse_sequent, pretty_print
from .resolve import Limits, enumerate_bindings, prf_search, resolve_step
from .unify import UnificationFailure, mgu_star, unify_star

__all__ = [
    "Limits", "ParseError", "UnificationFailure", "annot", "annotate_sequent", "aqv",
    "clausify_sequent", "enumerate_bindings", "mgu_star", "parse_formula",
    "parse_sequent", "pretty_print", "prf_search", "resolve_step", "unify_star",
]
