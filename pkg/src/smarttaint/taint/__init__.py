"""Backward taint analysis: sink marking, cascaded tracing, flow extraction."""
from __future__ import annotations

from typing import Optional

from ..catalog import Catalog, default_catalog
from ..frontend.nodes import Program
from .flows import Flow, FlowReport, extract_flows, render_slice
from .index import TOP, ProgramIndex
from .trace import Markup, Site, Tracer, mark_sinks, trace_backward


def analyze(p: Program, cat: Optional[Catalog] = None) -> FlowReport:
    """Mark sinks, trace to a fixed point and extract source-to-sink flows."""
    cat = cat or default_catalog()
    ix = ProgramIndex.build(p)
    tracer = Tracer(p, cat, ix)
    m = tracer.trace(tracer.mark_sinks())
    return extract_flows(p, m, ix)


__all__ = [
    "Flow", "FlowReport", "Markup", "ProgramIndex", "Site", "TOP", "Tracer",
    "analyze", "extract_flows", "mark_sinks", "render_slice", "trace_backward",
]
