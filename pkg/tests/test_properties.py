"""Property tests over randomly generated programs."""
from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from smarttaint.catalog import Catalog
from smarttaint.cloning import clone_methods
from smarttaint.frontend import parse_source, render
from smarttaint.frontend.nodes import Assignment, walk
from smarttaint.pathgen import PathConfig, enumerate_paths
from smarttaint.ssa import to_ssa
from smarttaint.taint import analyze, mark_sinks, trace_backward

CAT = oracle.ORACLE_CATALOG


def sink_lines(p, cat=CAT) -> set:
    return {f.sink_line for f in analyze(p, cat).flows}


@st.composite
def models(draw, max_ifs=0, helper=None):
    rng = draw(st.randoms(use_true_random=False))
    use_helper = draw(st.booleans()) if helper is None else helper
    m = oracle.random_model(rng, max_stmts=25, max_ifs=max_ifs, helper=use_helper)
    return m, parse_source(oracle.render_model(m))


@given(models())
def test_core_matches_kill_free_oracle(mp):
    m, p = mp
    assert sink_lines(p) == oracle.kill_free_sinks(oracle.flatten(m.body))


@given(models())
def test_ssa_clone_match_precise_oracle(mp):
    m, p = mp
    assert sink_lines(to_ssa(clone_methods(p))) == oracle.precise_sinks(oracle.flatten(m.body))


@settings(max_examples=40)
@given(models(max_ifs=4))
def test_paths_union_matches_oracle(mp):
    m, p = mp
    variants = enumerate_paths(p, PathConfig("whole_program"), CAT)
    assert len(variants) == len(oracle.reachable_vectors(m))
    union = set().union(*(sink_lines(v.program) for v in variants))
    assert union == oracle.union_over_vectors(m, oracle.kill_free_sinks)
    assert union <= sink_lines(p)


@given(st.integers(0, 8), st.randoms(use_true_random=False))
def test_sibling_ifs_double_variants(k, rng):
    body = []
    for i in range(k):
        body.append(f"  if (c{i}) {{\n    x = {i}\n  }}\n")
        if rng.random() < 0.5:
            body[-1] = body[-1][:-1] + " else {\n    x = 0\n  }\n"
    p = parse_source("def t() {\n" + "".join(body) + "}\n")
    variants = enumerate_paths(p, PathConfig("whole_program"))
    assert len(variants) == 2 ** k
    assert len({v.id for v in variants}) == 2 ** k


@given(models(max_ifs=3))
def test_ssa_single_assignment(mp):
    _, p = mp
    q = to_ssa(p)
    defined = Counter(n.target.name for n in walk(q.method("run")) if isinstance(n, Assignment))
    assert all(c == 1 for c in defined.values())
    assert to_ssa(q) is q


@given(models(helper=False))
def test_ssa_preserves_behavior(mp):
    _, p = mp
    assert oracle.Interpreter(to_ssa(p)).run("run") == oracle.Interpreter(p).run("run")


@given(models(helper=True))
def test_cloning_preserves_behavior(mp):
    _, p = mp
    assert oracle.Interpreter(clone_methods(p)).run("run") == oracle.Interpreter(p).run("run")


@given(models(max_ifs=2))
def test_rewrites_preserve_line_count(mp):
    _, p = mp
    lines = render(p).count("\n")
    assert render(to_ssa(p)).count("\n") == lines
    for v in enumerate_paths(p, PathConfig("whole_program"), CAT):
        assert render(v.program).count("\n") == lines


@given(models(), st.sets(st.sampled_from(oracle.SINKS)), st.sets(st.sampled_from(oracle.SOURCES)))
def test_catalog_monotonic(mp, sinks, sources):
    _, p = mp
    small = Catalog(frozenset(sinks), CAT.source_kinds, frozenset(sources))
    assert sink_lines(p, small) <= sink_lines(p, CAT)
    assert sink_lines(p, CAT) <= sink_lines(p, CAT.with_sinks(oracle.HELPER))


@given(models(max_ifs=3))
def test_trace_terminates_with_bounded_rounds(mp):
    _, p = mp
    m = trace_backward(p, mark_sinks(p, CAT), CAT)
    assert m.rounds <= len(m.sites) + 1
    assert all(t in m.sites for targets in m.edges.values() for t in targets)


@given(models(max_ifs=3))
def test_analysis_is_deterministic(mp):
    _, p = mp
    a, b = analyze(p, CAT), analyze(parse_source(render(p)), CAT)
    assert (a.slice_text, [f.chain for f in a.flows]) == (b.slice_text, [f.chain for f in b.flows])
