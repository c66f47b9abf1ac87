"""Tainted-flow extraction and the annotated security slice."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend.nodes import Block, If, MethodDecl, Program
from ..frontend.render import expr_text, statement_text
from .index import ProgramIndex
from .trace import Markup, Site

MAX_CHAINS_PER_SINK = 1000
MAX_DFS_STEPS = 200_000


@dataclass(frozen=True)
class Flow:
    chain: tuple  # line numbers, origin first, sink last
    origin_kind: Optional[str]
    sink: str = ""
    sites: tuple = field(default=(), compare=False, repr=False)

    @property
    def tainted(self) -> bool:
        return self.origin_kind is not None

    @property
    def sink_line(self) -> int:
        return self.chain[-1]

    def text(self) -> str:
        return " ".join(map(str, self.chain))


@dataclass
class FlowReport:
    flows: list
    slice_text: str = ""
    body_text: str = ""  # the tagged statements without the summary lines
    markup: Optional[Markup] = field(default=None, repr=False, compare=False)
    truncated: bool = False

    @property
    def verdict(self) -> str:
        return "leaking" if self.flows else "benign"

    @property
    def tainted_sinks(self) -> set:
        return {f.sink_line for f in self.flows}

    @property
    def summary(self) -> list:
        return [f.text() for f in self.flows] or ["benign"]


def _chain_lines(sites) -> tuple:
    out: list = []
    for s in sites:
        if not out or out[-1] != s.line:
            out.append(s.line)
    return tuple(out)


def extract_flows(p: Program, m: Markup, index: Optional[ProgramIndex] = None) -> FlowReport:
    """Enumerate source-to-sink chains through the markup and build the report."""
    preds = {k: sorted(v) for k, v in m.preds().items()}
    flows: dict = {}
    truncated = False
    for sink in sorted(m.sink_tags):
        found = 0
        steps = 0
        # iterative DFS over simple paths, walking from the sink toward sources
        stack = [(sink, (sink,))]
        while stack:
            site, path = stack.pop()
            steps += 1
            if steps > MAX_DFS_STEPS:
                truncated = True
                break
            if site in m.source_tags:
                sites = tuple(reversed(path))
                chain = _chain_lines(sites)
                key = (chain, m.source_tags[site])
                if key not in flows:
                    flows[key] = Flow(chain, m.source_tags[site], m.sink_names.get(sink, ""), sites)
                found += 1
                if found >= MAX_CHAINS_PER_SINK:
                    truncated = True
                    break
            for q in reversed(preds.get(site, ())):
                if q not in path:
                    stack.append((q, path + (q,)))
    ordered = sorted(flows.values(), key=lambda f: (f.chain, f.origin_kind, f.sink))
    # identical chains reached from different source kinds collapse to one flow
    unique: list = []
    for f in ordered:
        if not unique or unique[-1].chain != f.chain:
            unique.append(f)
    report = FlowReport(unique, markup=m, truncated=truncated)
    report.body_text = render_body(p, m, index)
    report.slice_text = _compose(report.summary, report.body_text)
    return report


# --------------------------------------------------------------------------
# slice rendering

INDENT = "    "


def _tag(entry) -> str:
    sink, lines, source = entry
    parts = (["sink"] if sink else []) + [str(n) for n in sorted(lines)] + (["source"] if source else [])
    return "< " + " ".join(parts) + " >"


def render_slice(p: Program, m: Markup, r: FlowReport, index: Optional[ProgramIndex] = None) -> str:
    """Summary chains (or ``benign``), a blank line, then the tagged statements."""
    return _compose(r.summary, render_body(p, m, index))


def _compose(summary: list, body: str) -> str:
    text = "\n".join(summary) + "\n"
    return text + "\n" + body if body else text


def render_body(p: Program, m: Markup, index: Optional[ProgramIndex] = None) -> str:
    """Tagged statements grouped by method, untagged ones left out."""
    ix = index or ProgramIndex.build(p)
    units: dict = {}
    params: dict = {}
    for site in m.sites:
        key = site.ref if site.kind == "param" else _unit_of(site, ix)
        table = params if site.kind == "param" else units
        entry = table.setdefault(key, [False, set(), False])
        entry[0] |= site in m.sink_tags
        entry[2] |= site in m.source_tags
    for site, targets in m.edges.items():
        key = site.ref if site.kind == "param" else _unit_of(site, ix)
        table = params if site.kind == "param" else units
        for t in targets:
            if site.kind == "param" or t.kind == "param" or _unit_of(t, ix) != key:
                table[key][1].add(t.line)
    groups = _SliceWriter(ix, units, params).program(p)
    return "\n\n".join(groups) + "\n" if groups else ""


def _unit_of(site: Site, ix: ProgramIndex) -> int:
    if site.kind == "bind":
        return ix.stmts[ix.closures[site.ref[0]].stmt].unit
    return ix.stmts[site.ref[0]].unit


class _SliceWriter:
    def __init__(self, ix: ProgramIndex, units: dict, params: dict):
        self.ix = ix
        self.units = units
        self.params = params
        # statements that are, or contain, tagged units
        self.keep = set()
        for sid in units:
            s = sid
            while s is not None:
                self.keep.add(s)
                s = ix.stmts[s].parent

    def program(self, p: Program) -> list:
        groups: list = []
        loose: list = []
        cursor = 0
        for item in p.items:
            if isinstance(item, MethodDecl):
                if loose:
                    groups.append("\n".join(loose))
                    loose = []
                text = self.method(item)
                if text:
                    groups.append(text)
            else:
                sid = self._sid(item, "<top>", cursor)
                cursor = sid + 1 if sid is not None else cursor
                loose.extend(self.statement(item, sid, 0))
        if loose:
            groups.append("\n".join(loose))
        return groups

    def _sid(self, node, scope, start=0) -> Optional[int]:
        for info in self.ix.stmts[start:]:
            if info.node is node and info.scope == scope:
                return info.sid
        return None

    def method(self, m: MethodDecl) -> str:
        tagged_params = {i for (name, i) in self.params if name == m.name}
        lines = []
        cursor = 0
        for s in m.body:
            sid = self._sid(s, m.name, cursor)
            if sid is None:
                continue
            cursor = sid + 1
            lines.extend(self.statement(s, sid, 1))
        if not lines and not tagged_params:
            return ""
        params = []
        for i, prm in enumerate(m.params):
            text = prm.name if prm.type_name is None else f"{prm.type_name} {prm.name}"
            if prm.default is not None:
                text += " = " + expr_text(prm.default)
            if (m.name, i) in self.params:
                text = f"{_tag(self.params[(m.name, i)])} {text} < / >"
            params.append(text)
        head = " ".join(m.modifiers + ((m.return_type,) if m.return_type else ())) or "def"
        return "\n".join([f"{head} {m.name}({', '.join(params)}) {{"] + lines + ["}"])

    def _child_sid(self, node, parent: int) -> Optional[int]:
        for info in self.ix.stmts[parent + 1:]:
            if info.node is node and info.parent == parent:
                return info.sid
        return None

    def statement(self, s, sid: Optional[int], depth: int) -> list:
        if sid is None or sid not in self.keep:
            return []
        pad = INDENT * depth
        tag = self.units.get(sid)
        if isinstance(s, If) and self._has_tagged_child(sid):
            return self._if(s, sid, depth, tag)
        if isinstance(s, Block) and self._has_tagged_child(sid):
            return self._block(s, sid, depth, tag)
        if tag is None:
            return []
        return [f"{pad}{_tag(tag)} {statement_text(s)} < / >"]

    def _has_tagged_child(self, sid: int) -> bool:
        return any(self.ix.stmts[k].parent == sid and not self.ix.stmts[k].header for k in self.keep if k != sid)

    def _body(self, stmts, parent: int, depth: int) -> list:
        out = []
        for s in stmts:
            out.extend(self.statement(s, self._child_sid(s, parent), depth))
        return out

    def _if(self, s: If, sid: int, depth: int, tag) -> list:
        pad = INDENT * depth
        prefix = f"{_tag(tag)} " if tag else ""
        out = [f"{pad}{prefix}if ({expr_text(s.cond)}) {{"]
        out += self._body(s.then_body, sid, depth + 1)
        else_lines = self._body(s.else_body, sid, depth + 1)
        if else_lines:
            out.append(f"{pad}}} else {{")
            out += else_lines
        out.append(f"{pad}}}")
        return out

    def _block(self, s: Block, sid: int, depth: int, tag) -> list:
        pad = INDENT * depth
        prefix = f"{_tag(tag)} " if tag else ""
        full = statement_text(s)
        header = full[:full.index("{") + 1] if "{" in full else full
        out = [f"{pad}{prefix}{header}"]
        for c in s.clauses:
            lines = self._body(c.body, sid, depth + 1)
            if c.kind in ("case", "default", "catch", "finally") and lines:
                label = {"case": lambda: f"case {expr_text(c.exprs[0])}:", "default": lambda: "default:",
                         "catch": lambda: "} catch {", "finally": lambda: "} finally {"}[c.kind]()
                out.append(f"{pad}{label}")
            out += lines
        out.append(f"{pad}}}")
        return out
