import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import LISTINGS
from smarttaint.catalog import (
    DECLARED, DEFAULT_SINKS, SOURCE_KINDS, Catalog, ConfigError, SourceContext, classify, default_catalog,
    load_catalog, render_catalog,
)
from smarttaint.frontend import parse_file, parse_source


@pytest.fixture(scope="module")
def motion():
    return parse_file(LISTINGS / "motion.groovy")


def value(src: str):
    return parse_source(f"x = {src}\n").items[0].value


def test_defaults():
    cat = default_catalog()
    assert cat.is_sink("sendPush") and cat.is_sink("httpPost") and not cat.is_sink("log")
    assert cat.source_kinds == frozenset(SOURCE_KINDS)
    assert cat.extra_source_idents == frozenset()


def test_context_from_program(motion):
    ctx = SourceContext.of(motion)
    assert ctx.inputs == ctx.devices == {"themotion", "theswitch"}
    assert ctx.handler_params == {("motionDetectedHandler", "evt")}


@pytest.mark.parametrize("src, kind", [
    ("state.foo", "state_variable"),
    ("atomicState.a", "state_variable"),
    ("location.name", "location"),
    ("themotion.currentMotion", "device_state"),
    ("themotion.displayName", "device_info"),
    ("settings.x", "user_input"),
    ("theswitch", "user_input"),
    ('"literal"', None),
    ("foo()", None),
    ("x.y", None),
])
def test_classify_expressions(motion, src, kind):
    assert classify(value(src), default_catalog(), SourceContext.of(motion)) == kind


def test_handler_param_is_event_source(motion):
    evt = motion.method("motionDetectedHandler").params[0]
    ctx = SourceContext.of(motion)
    assert classify(evt, default_catalog(), ctx, "motionDetectedHandler") == "event_param"
    assert classify(evt, default_catalog(), ctx, "other") is None


def test_local_shadows_input(motion):
    ctx = SourceContext.of(motion)
    assert classify(value("themotion"), default_catalog(), ctx, local_names={"themotion"}) is None


def test_disabled_kind_is_not_a_source():
    cat = load_catalog("source_kinds:\n    -location\n")
    assert classify(value("location.name"), cat) is None
    assert classify(value("state.x"), cat) == "state_variable"


def test_declared_sources():
    cat = load_catalog("sources:\n    sensitiveData\n")
    assert classify(value("sensitiveData"), cat) == DECLARED
    assert classify(value("sensitiveData.field"), cat) == DECLARED


def test_sink_edits():
    cat = load_catalog("# custom\nsinks:\n    exfiltrate   # new\n    -httpHead\n")
    assert cat.is_sink("exfiltrate") and not cat.is_sink("httpHead") and cat.is_sink("sendSms")


def test_listing_catalog_file(sensitive):
    assert sensitive.extra_source_idents == {"sensitiveData"}


@pytest.mark.parametrize("text, line", [
    ("sinks:\n  bad name\n", 2),
    ("foo:\n", 1),
    ("source_kinds:\n  nope\n", 2),
    ("sendPush\n", 1),
])
def test_config_errors(text, line):
    with pytest.raises(ConfigError) as e:
        load_catalog(text)
    assert e.value.line == line


names = st.from_regex(r"[a-z][A-Za-z0-9]{0,8}", fullmatch=True)


@given(sinks=st.sets(names | st.sampled_from(sorted(DEFAULT_SINKS))),
       kinds=st.sets(st.sampled_from(SOURCE_KINDS)),
       extra=st.sets(names))
def test_render_load_round_trip(sinks, kinds, extra):
    cat = Catalog(frozenset(sinks), frozenset(kinds), frozenset(extra))
    assert load_catalog(render_catalog(cat)) == cat
