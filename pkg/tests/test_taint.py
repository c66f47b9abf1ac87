import pytest

from smarttaint.catalog import default_catalog, load_catalog
from smarttaint.frontend import parse_source
from smarttaint.taint import ProgramIndex, Site, Tracer, analyze, mark_sinks, trace_backward

SECRET = load_catalog("sources:\n    secret\n")


def flows(src: str, cat=SECRET) -> list:
    return [(f.text(), f.sink, f.origin_kind) for f in analyze(parse_source(src), cat).flows]


def test_motion_markup(listing):
    p = listing("motion")
    cat = default_catalog()
    t = Tracer(p, cat, ProgramIndex.build(p))
    m = t.trace(t.mark_sinks())
    assert {s.line for s in m.sink_tags} == {38}
    assert {(s.line, k) for s, k in m.source_tags.items()} == {(33, "user_input")}
    assert sorted((s.line, s.kind, sorted(v)) for s, v in m.forward_tags.items()) == [
        (33, "stmt", [36]), (36, "param", [37]), (37, "stmt", [38])]
    assert m.sink_names == {Site(38, "stmt", (13,)): "sendPush"}
    assert trace_backward(p, mark_sinks(p, cat), cat).sites == m.sites


def test_motion_report(listing):
    r = analyze(listing("motion"), default_catalog())
    f = r.flows[0]
    assert (f.chain, f.origin_kind, f.sink, f.sink_line) == ((33, 36, 37, 38), "user_input", "sendPush", 38)
    assert r.verdict == "leaking" and r.tainted_sinks == {38} and r.summary == ["33 36 37 38"]
    assert r.slice_text == "33 36 37 38\n\n" + r.body_text


@pytest.mark.parametrize("src, expected", [
    ('def m = secret\nsendSms(m, "x")\n', []),
    ('def m = secret\nsendSms("555", m)\n', [("1 2", "sendSms", "declared")]),
    ("def m = secret\nfoo.sendPush(m)\n", []),
    ("def m = secret\nthis.sendPush(m)\n", [("1 2", "sendPush", "declared")]),
    ('def m = secret\nm = "clean"\nsendPush(m)\n', [("1 3", "sendPush", "declared")]),
    ("def l = []\nl.add(secret)\nsendPush(l)\n", [("2 3", "sendPush", "declared")]),
    ("[1].each { sendPush(secret) }\n", [("1", "sendPush", "declared")]),
    ('def m = "$secret"\nif (m) {\n    sendPush(m)\n}\n', [("1 3", "sendPush", "declared")]),
])
def test_local_flows(src, expected):
    assert flows(src) == expected


def test_interprocedural_implicit_return():
    src = 'def h(x) {\n    "v $x"\n}\ndef m = h(secret)\nsendPush(m)\n'
    assert flows(src) == [("4 1 2 4 5", "sendPush", "declared")]


def test_state_crosses_methods():
    src = "state.v = secret\ndef f() {\n    sendPush(state.v)\n}\n"
    assert flows(src) == [("3", "sendPush", "state_variable")]


def test_globals_cross_scopes():
    src = "def f() {\n    g = secret\n}\ndef k() {\n    sendPush(g)\n}\n"
    assert flows(src) == [("2 5", "sendPush", "declared")]


def test_later_definition_does_not_reach_earlier_use():
    assert flows('def m = "a"\nsendPush(m)\nm = secret\n') == []


def test_loop_carried_definition_reaches():
    src = 'def m = "a"\nfor (i in [1, 2]) {\n    sendPush(m)\n    m = secret\n}\n'
    assert flows(src) == [("4 3", "sendPush", "declared")]


def test_benign_slice_keeps_sinks():
    r = analyze(parse_source('def m = secret\nsendPush("hi")\n'), SECRET)
    assert r.verdict == "benign" and r.summary == ["benign"]
    assert r.slice_text == 'benign\n\n< sink > sendPush("hi") < / >\n'


def test_identical_chains_collapse():
    src = "def m = secret\nsendPush(m); sendPush(m)\n"
    assert [f.text() for f in analyze(parse_source(src), SECRET).flows] == ["1 2"]


def test_custom_sink():
    src = "def m = secret\nexfiltrate(m)\n"
    assert flows(src) == []
    assert flows(src, SECRET.with_sinks("exfiltrate")) == [("1 2", "exfiltrate", "declared")]
