"""Cascaded markup: tag sinks, then trace their inputs backward to sources.

The tracer is a worklist over ``(site, demand)`` pairs. A site is a place a
value can be attributed to:

* ``stmt``  a statement (demands: ``sink``, ``value``, ``handler``)
* ``param`` a method parameter
* ``arg``   one argument of a call to a user-defined method
* ``bind``  the implicit binding of a closure's parameters to the receiver of
  the call it is passed to

Each expansion step finds the sites whose value flows into the current one and
records an edge; a subexpression that the catalog classifies as a source tags
the current site instead of being traced further.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..catalog import RECIPIENT_ARG, Catalog, SourceContext, classify
from ..frontend.nodes import (
    Closure, Identifier, If, MethodCall, NamedArg, Program, ReflectiveCall, Return, StringLiteral,
    Subscribe, children, walk_own,
)
from .index import ProgramIndex, StmtInfo, defined_name, written_values


@dataclass(frozen=True, order=True)
class Site:
    line: int
    kind: str  # stmt, param, arg, bind
    ref: tuple  # stmt: (sid,)  param: (method, i)  arg: (sid, call_no, i)  bind: (cid,)

    def __str__(self) -> str:
        return f"{self.kind}{self.ref}@{self.line}"


@dataclass
class Markup:
    sink_tags: set = field(default_factory=set)
    source_tags: dict = field(default_factory=dict)  # Site -> source kind
    edges: dict = field(default_factory=dict)  # Site -> set of Sites its value flows into
    sink_names: dict = field(default_factory=dict)  # sink Site -> called sink name
    history: list = field(default_factory=list)  # marked-site count after each round

    @property
    def sites(self) -> set:
        out = set(self.sink_tags) | set(self.source_tags) | set(self.edges)
        for targets in self.edges.values():
            out |= targets
        return out

    @property
    def forward_tags(self) -> dict:
        """Site -> line numbers its value flows into."""
        return {s: {t.line for t in targets} for s, targets in self.edges.items()}

    @property
    def rounds(self) -> int:
        return len(self.history)

    def preds(self) -> dict:
        rev: dict = {}
        for s, targets in self.edges.items():
            for t in targets:
                rev.setdefault(t, set()).add(s)
        return rev


class Tracer:
    """Backward taint tracer bound to one program and catalog."""

    def __init__(self, p: Program, cat: Catalog, index: Optional[ProgramIndex] = None):
        self.p = p
        self.cat = cat
        self.ix = index or ProgramIndex.build(p)
        self.ctx = SourceContext.of(p)
        self._locals: dict = {}

    # ---- site constructors ---------------------------------------------
    def stmt_site(self, sid: int) -> Site:
        return Site(self.ix.stmts[sid].line, "stmt", (sid,))

    def param_site(self, method: str, i: int) -> Site:
        return Site(self.ix.methods[method].params[i].line, "param", (method, i))

    def arg_site(self, sid: int, call_no: int, i: int) -> Site:
        return Site(self.ix.stmts[sid].line, "arg", (sid, call_no, i))

    def bind_site(self, cid: int) -> Site:
        return Site(self.ix.stmts[self.ix.closures[cid].stmt].line, "bind", (cid,))

    # ---- sinks ---------------------------------------------------------
    def sink_calls(self, info: StmtInfo) -> list:
        return [n for n in walk_own(info.node)
                if isinstance(n, MethodCall) and self.cat.is_sink(n.name)
                and (n.receiver is None or isinstance(n.receiver, Identifier) and n.receiver.name == "this")]

    def mark_sinks(self) -> Markup:
        m = Markup()
        for info in self.ix.stmts:
            calls = self.sink_calls(info)
            if calls:
                site = self.stmt_site(info.sid)
                m.sink_tags.add(site)
                m.sink_names[site] = calls[0].name
        return m

    @staticmethod
    def sink_args(call: MethodCall) -> list:
        """Arguments of a sink call that carry message data."""
        positional = [a for a in call.args if not isinstance(a, (NamedArg, Closure))]
        skip = RECIPIENT_ARG.get(call.name)
        if skip is not None and len(positional) >= 2:
            positional = positional[:skip] + positional[skip + 1:]
        named = [a.value for a in call.args if isinstance(a, NamedArg) and not isinstance(a.value, Closure)]
        return positional + named

    # ---- tracing -------------------------------------------------------
    def local_names(self, info: StmtInfo) -> set:
        key = (info.scope, info.closures)
        if key not in self._locals:
            self._locals[key] = self.ix.local_names(info)
        return self._locals[key]

    def trace_expr(self, expr, info: StmtInfo, preds: list, sources: list) -> None:
        """Collect the sites and sources an expression's value depends on."""
        ix = self.ix
        local = self.local_names(info)
        stack = [expr]
        while stack:
            e = stack.pop()
            if e is None or isinstance(e, Closure):
                continue
            kind = classify(e, self.cat, self.ctx, info.scope, local)
            if kind is not None:
                sources.append(kind)
                continue
            if isinstance(e, Identifier):
                defs, param, cid = ix.resolve(e.name, info)
                preds.extend((self.stmt_site(d), "value") for d in defs)
                if param is not None:
                    preds.append((self.param_site(info.scope, param), "param"))
                if cid is not None:
                    preds.append((self.bind_site(cid), "bind"))
                continue
            if ix.is_user_call(e):
                preds.extend((self.stmt_site(r), "value") for r in ix.return_sites(e.name))
                if e.receiver is not None:
                    stack.append(e.receiver)
                continue
            if isinstance(e, ReflectiveCall):
                for name in sorted(ix.methods):
                    preds.extend((self.stmt_site(r), "value") for r in ix.return_sites(name))
                stack.append(e.target)
                continue
            if isinstance(e, StringLiteral) and e.is_plain:
                continue
            stack.extend(reversed(list(children(e))))

    def expand(self, site: Site, demand: str) -> tuple:
        """(predecessor (site, demand) pairs, source kinds) for one work item."""
        ix = self.ix
        preds: list = []
        sources: list = []
        if site.kind == "stmt":
            info = ix.stmts[site.ref[0]]
            node = info.node
            if demand == "sink":
                for call in self.sink_calls(info):
                    for a in self.sink_args(call):
                        self.trace_expr(a, info, preds, sources)
            elif demand == "handler":
                kind = classify(node.device, self.cat, self.ctx, info.scope, self.local_names(info))
                kind = kind or self.cat.enabled("event_param")
                if kind is not None:
                    sources.append(kind)
            elif isinstance(node, Return):
                self.trace_expr(node.value, info, preds, sources)
            elif defined_name(node) is not None:
                for v in written_values(node):
                    self.trace_expr(v, info, preds, sources)
            else:  # implicit return of a trailing expression statement
                for e in walk_value(node):
                    self.trace_expr(e, info, preds, sources)
        elif site.kind == "param":
            method, i = site.ref
            decl = ix.methods[method]
            for sid, no, call in ix.calls.get(method, ()):
                positional = [a for a in call.args if not isinstance(a, NamedArg)]
                if i < len(positional):
                    preds.append((self.arg_site(sid, no, i), "arg"))
            for sid, no, call in ix.reflective:
                positional = [a for a in call.args if not isinstance(a, NamedArg)]
                if i < len(positional):
                    preds.append((self.arg_site(sid, no, i), "arg"))
            if i == 0:
                preds.extend((self.stmt_site(sid), "handler") for sid in ix.subscribes.get(method, ()))
            prm = decl.params[i]
            if prm.default is not None:
                info = self._method_info(method)
                if info is not None:
                    self.trace_expr(prm.default, info, preds, sources)
        elif site.kind == "arg":
            sid, no, i = site.ref
            info = ix.stmts[sid]
            call = self._call(sid, no)
            positional = [a for a in call.args if not isinstance(a, NamedArg)]
            self.trace_expr(positional[i], info, preds, sources)
        elif site.kind == "bind":
            c = ix.closures[site.ref[0]]
            if c.owner_call is not None and c.owner_call.receiver is not None:
                self.trace_expr(c.owner_call.receiver, ix.stmts[c.stmt], preds, sources)
        return preds, sources

    def _call(self, sid: int, no: int):
        for n in walk_own(self.ix.stmts[sid].node):
            if self.ix.call_numbers.get((sid, id(n))) == no:
                return n
        raise KeyError((sid, no))

    def _method_info(self, method: str) -> Optional[StmtInfo]:
        for info in self.ix.stmts:
            if info.scope == method and not info.closures:
                return info
        return None

    def trace(self, m: Markup) -> Markup:
        """Propagate ``m`` backward to its fixed point (returns a new Markup)."""
        out = Markup(set(m.sink_tags), dict(m.source_tags), {k: set(v) for k, v in m.edges.items()},
                     dict(m.sink_names))
        seen = set()
        frontier = []
        for s in sorted(m.sink_tags):
            seen.add((s, "sink"))
            frontier.append((s, "sink"))
        while frontier:
            nxt = []
            for site, demand in frontier:
                preds, sources = self.expand(site, demand)
                if sources and site not in out.source_tags:
                    out.source_tags[site] = sources[0]
                for p, d in preds:
                    out.edges.setdefault(p, set()).add(site)
                    if (p, d) not in seen:
                        seen.add((p, d))
                        nxt.append((p, d))
            out.history.append(len(out.sites))
            frontier = nxt
        return out


def walk_value(node) -> list:
    """Expressions evaluated by a statement, used when it acts as an implicit return."""
    if isinstance(node, (If, Subscribe)):
        return []
    return [c for c in children(node)]


def mark_sinks(p: Program, cat: Catalog, index: Optional[ProgramIndex] = None) -> Markup:
    return Tracer(p, cat, index).mark_sinks()


def trace_backward(p: Program, m: Markup, cat: Catalog, index: Optional[ProgramIndex] = None) -> Markup:
    return Tracer(p, cat, index).trace(m)
