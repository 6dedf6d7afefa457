"""Command-line front end.

Exit status: 0 when a refutation (or oracle agreement) is found, 1 when not,
2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import oracle
from .annotate import annotate_sequent
from .clausify import clausify_sequent
from .core import Sequent
from .parser import ParseError, parse_sequent, pretty_print
from .resolve import Limits, enumerate_bindings, prf_search, trace_records

TRACE_FORMATS = ("text", "records", "none")


@dataclass(frozen=True)
class RunConfig:
    command: str
    path: str | None = None
    max_depth: int = 8
    max_steps: int = 50_000
    all_bindings: bool = False
    nonempty_domain: bool = False
    trace: str = "none"
    ks: tuple = (20,)

    def __post_init__(self):
        if self.max_depth < 1 or self.max_steps < 1:
            raise ValueError("limits must be positive")
        if self.trace not in TRACE_FORMATS:
            raise ValueError(f"unknown trace format {self.trace!r}")

    @property
    def limits(self) -> Limits:
        return Limits(self.max_depth, self.max_steps)


def corpus_path(name: str) -> Path | None:
    """Locate a bundled sequent by file name, with or without ``.seq``."""
    base = resources.files("dynres") / "corpus"
    for cand in (name, name + ".seq"):
        p = base / cand
        if p.is_file():
            return Path(str(p))
    return None


def corpus_files() -> list:
    base = resources.files("dynres") / "corpus"
    return sorted(Path(str(p)) for p in base.iterdir() if p.name.endswith(".seq"))


def load_sequent(path: str) -> Sequent:
    p = Path(path)
    if not p.is_file():
        alt = corpus_path(p.name)
        if alt is None:
            raise FileNotFoundError(path)
        p = alt
    return parse_sequent(p.read_text())


def _binding_sets(bindings) -> str:
    if not bindings:
        return "{}"
    rows = ["{" + ", ".join(f"{k} -> {v}" for k, v in sorted(b)) + "}" for b in bindings]
    return " ".join(sorted(rows))


def format_trace(result) -> str:
    lines = []
    store = result.store
    for st in result.trace:
        c = store[st.result]
        if st.kind == "input":
            how = "input"
        elif st.kind == "instantiate":
            how = f"instantiate {st.parents[0]} with " + ", ".join(str(o) for o in st.ops)
        else:
            how = f"resolve {st.parents[0]}, {st.parents[1]}"
            if st.sigma.proper:
                how += f" by {st.sigma}"
        lines.append(f"{st.result:>4}  {c}    [{how}]")
    return "\n".join(lines)


def _prove(cfg: RunConfig, s: Sequent, out) -> int:
    clauses, diags = clausify_sequent(s, cfg.nonempty_domain)
    for d in diags:
        print(d, file=out)
    if cfg.all_bindings:
        return _bindings(cfg, s, out)
    result = prf_search(clauses, cfg.limits)
    print(result.status, file=out)
    if result.status != "Refuted":
        return 1
    print("bindings: " + str(result.report), file=out)
    if cfg.trace == "text":
        print(format_trace(result), file=out)
    elif cfg.trace == "records":
        for r in trace_records(result):
            print(json.dumps(r, sort_keys=True), file=out)
    return 0


def _bindings(cfg: RunConfig, s: Sequent, out) -> int:
    clauses, _ = clausify_sequent(s, cfg.nonempty_domain)
    reports = enumerate_bindings(clauses, cfg.limits)
    if not reports:
        print("no bindings", file=out)
        return 1
    for rep in sorted(reports, key=str):
        print(rep, file=out)
    return 0


def _oracle(cfg: RunConfig, s: Sequent, out) -> int:
    cmp = oracle.compare_with_labeled(s, cfg.nonempty_domain, cfg.limits)
    print("oracle:  " + _binding_sets(cmp.oracle_bindings), file=out)
    print("labeled: " + _binding_sets(cmp.labeled_bindings), file=out)
    if cmp.undecided:
        print("undecided: " + _binding_sets(cmp.undecided), file=out)
    print("agree: " + ("yes" if cmp.agree else "no"), file=out)
    return 0 if cmp.agree else 1


# ---------------------------------------------------------------------------
# benchmark


def bench_sequent(k: int) -> Sequent:
    """k indefinites, two pronouns, and a conclusion that only the binding of
    the first pronoun to the first indefinite and the second pronoun to the
    last one makes valid."""
    if k < 1:
        raise ValueError("k must be at least 1")
    lines = [f"exists x{i} a{i}(x{i})" for i in range(1, k + 1)]
    lines.append("?u ?v r(u,v)")
    lines.append(f"|= exists z (a1(z) & exists w (a{k}(w) & r(z,w)))")
    return parse_sequent("\n".join(lines) + "\n")


def bench(k: int, limits: Limits = Limits()) -> dict:
    s = bench_sequent(k)
    t0 = time.perf_counter()
    eager, unknown = oracle.oracle_bindings(s)
    formulas, _ = annotate_sequent(s)
    eager_instances = len(oracle.enumerate_disambiguations(oracle.pronoun_labels(formulas)))
    t1 = time.perf_counter()
    clauses, _ = clausify_sequent(s)
    stats: dict = {}
    result = prf_search(clauses, limits, stats=stats)
    t2 = time.perf_counter()
    labeled = result.report.expand() if result.status == "Refuted" else set()
    return {
        "k": k,
        "eager_instances": eager_instances,
        "labeled_instances": stats["contexts"],
        "eager_time": t1 - t0,
        "labeled_time": t2 - t1,
        "agree": not unknown and labeled <= eager and bool(eager) == bool(labeled),
    }


BENCH_COLUMNS = ("k", "eager_instances", "labeled_instances", "eager_time", "labeled_time")


def _bench(cfg: RunConfig, out) -> int:
    print("\t".join(BENCH_COLUMNS), file=out)
    ok = True
    for k in cfg.ks:
        row = bench(k, cfg.limits)
        ok = ok and row["agree"]
        print("\t".join(f"{row[c]:.4f}" if isinstance(row[c], float) else str(row[c])
                        for c in BENCH_COLUMNS), file=out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def run(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    if cfg.command == "bench":
        return _bench(cfg, out)
    try:
        s = load_sequent(cfg.path)
    except FileNotFoundError:
        print(f"error: no such file: {cfg.path}", file=sys.stderr)
        return 2
    except ParseError as e:
        print(f"error: {cfg.path}: {e}", file=sys.stderr)
        return 2
    if cfg.command == "annotate":
        formulas, diags = annotate_sequent(s)
        for f in formulas:
            print(pretty_print(f), file=out)
        for d in diags:
            print(d, file=out)
        return 0
    if cfg.command == "clausify":
        clauses, diags = clausify_sequent(s, cfg.nonempty_domain)
        for c in clauses:
            print(c, file=out)
        for d in diags:
            print(d, file=out)
        return 0
    if cfg.command == "prove":
        return _prove(cfg, s, out)
    if cfg.command == "bindings":
        return _bindings(cfg, s, out)
    if cfg.command == "oracle":
        return _oracle(cfg, s, out)
    raise ValueError(f"unknown command {cfg.command!r}")


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynres",
                                 description="Resolution with pronoun binding for dynamic logic.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=_positive, default=8, help="saturation levels per context")
    common.add_argument("--steps", type=_positive, default=50_000, help="resolvent budget")
    common.add_argument("--nonempty-domain", action="store_true",
                        help="assume restrictor predicates of universals are nonempty")
    for name, help_ in [("annotate", "print annotated formulas"),
                        ("clausify", "print clause form"),
                        ("prove", "search for a refutation"),
                        ("bindings", "list every binding that yields a refutation"),
                        ("oracle", "compare with the eager reference procedure")]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("path", help="sequent file (or name of a bundled example)")
        if name == "prove":
            p.add_argument("--all-bindings", action="store_true")
            p.add_argument("--trace", choices=TRACE_FORMATS, default="none")
    b = sub.add_parser("bench", parents=[common], help="compare eager and labeled search")
    b.add_argument("k", type=_positive, nargs="*", default=[20], help="numbers of indefinites")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        path=getattr(ns, "path", None),
        max_depth=ns.depth,
        max_steps=ns.steps,
        all_bindings=getattr(ns, "all_bindings", False),
        nonempty_domain=ns.nonempty_domain,
        trace=getattr(ns, "trace", "none"),
        ks=tuple(getattr(ns, "k", ()) or ()),
    )


def main(argv=None) -> int:
    # diagnostics are printed with the command output
    logging.getLogger("dynres").setLevel(logging.ERROR)
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
