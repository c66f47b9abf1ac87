import pytest

from smarttaint.catalog import load_catalog
from smarttaint.frontend import parse_source, render
from smarttaint.frontend.nodes import Assignment, If, find_ifs, walk
from smarttaint.pathgen import (
    CapExceeded, PathConfig, UnknownIf, enumerate_paths, false_path, flow_affecting_refs, if_stats, resolve_ifs,
    true_path,
)
from smarttaint.taint import analyze

SECRET = load_catalog("sources:\n    secret\n")
SRC = """def f() {
  if (a) {
    x = 1
  } else {
    x = 2
  }
}
def g() {
  def m = "a"
  if (b) {
    m = secret
  }
  if (c) {
    y = 3
  }
  sendPush(m)
}
"""


@pytest.fixture(scope="module")
def program():
    return parse_source(SRC)


@pytest.mark.parametrize("mode, labels", [
    ("whole_program", ["TTT", "TTF", "TFT", "TFF", "FTT", "FTF", "FFT", "FFF"]),
    ("per_method", ["TT", "TF", "FT", "FF"]),
    ("flow_affecting", ["T", "F"]),
])
def test_modes(program, mode, labels):
    variants = enumerate_paths(program, PathConfig(mode), SECRET)
    assert [v.label for v in variants] == labels
    assert all(not find_ifs(v.program) for v in variants if mode == "whole_program")


def test_stats(program):
    s = if_stats(program, SECRET)
    assert (s.total_ifs, s.max_ifs_per_method, s.flow_affecting_ifs) == (3, 2, 1)
    assert flow_affecting_refs(program, SECRET) == {find_ifs(program)[1].ref}


def test_branch_splice_keeps_lines(program):
    ref = find_ifs(program)[0].ref
    t, f = true_path(program, ref), false_path(program, ref)
    assert render(t).count("\n") == render(program).count("\n")
    assert [n.line for n in walk(t.method("f")) if isinstance(n, Assignment)] == [3]
    assert [n.line for n in walk(f.method("f")) if isinstance(n, Assignment)] == [5]
    assert resolve_ifs(program, {ref: True}) == t


def test_missing_else_resolves_to_nothing(program):
    ref = find_ifs(program)[1].ref
    g = false_path(program, ref).method("g")
    assert "secret" not in render(false_path(program, ref)) and not any(
        isinstance(n, If) and n.ref == ref for n in walk(g))


def test_no_ifs_gives_one_unnamed_variant():
    [v] = enumerate_paths(parse_source("x = 1\n"))
    assert (v.id, v.label) == ("", "-")


def test_config_validation():
    with pytest.raises(ValueError):
        PathConfig("bogus")
    with pytest.raises(ValueError):
        PathConfig(cap=0)


def test_cap(program):
    with pytest.raises(CapExceeded) as e:
        enumerate_paths(program, PathConfig("whole_program", cap=2), SECRET)
    assert (e.value.count, e.value.cap, e.value.mode) == (3, 2, "whole_program")
    assert len(enumerate_paths(program, PathConfig("whole_program", cap=3), SECRET)) == 8


def test_unknown_if(program):
    with pytest.raises(UnknownIf):
        resolve_ifs(program, {(99, 1): True})


def test_path_listing_leak_only_on_true(listing, sensitive):
    variants = enumerate_paths(listing("path_listing"), PathConfig(), sensitive)
    assert [(v.label, analyze(v.program, sensitive).verdict) for v in variants] == [
        ("T", "leaking"), ("F", "benign")]
