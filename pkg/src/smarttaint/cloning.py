"""Context sensitivity by per-call-site method cloning.

Each call to a user-defined method is redirected to a private copy of the
callee named ``<callee><n>``, appended after the last line of the file. Calls
inside a copy are redirected in turn, so every call site ends up with its own
chain of copies. Methods on a call-graph cycle are left alone, as are calls
below the depth limit; both produce warnings.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .frontend.nodes import (
    CloneSpan, Identifier, MethodCall, MethodDecl, Program, Transformer, shift_lines, walk,
)

DEFAULT_MAX_DEPTH = 8


@dataclass
class CloneMap:
    entries: dict = field(default_factory=dict)  # (callee, (caller, call index)) -> clone name
    warnings: list = field(default_factory=list)

    def clones_of(self, callee: str) -> list:
        return [v for (name, _), v in self.entries.items() if name == callee]


def _is_local_call(n, methods) -> bool:
    return isinstance(n, MethodCall) and n.name in methods and (
        n.receiver is None or isinstance(n.receiver, Identifier) and n.receiver.name == "this")


def call_graph(p: Program) -> dict:
    """Caller name -> set of user-defined callees."""
    methods = {m.name for m in p.methods}
    graph: dict = {name: set() for name in methods}
    for m in p.methods:
        for n in walk(m):
            if _is_local_call(n, methods):
                graph[m.name].add(n.name)
    return graph


def recursive_methods(graph: dict) -> set:
    """Methods that lie on a call-graph cycle (self-calls included)."""
    # Tarjan's SCC algorithm, iterative
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: set = set()
    counter = 0
    for root in sorted(graph):
        if root in index:
            continue
        work = [(root, iter(sorted(graph[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(graph[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == v:
                        break
                if len(scc) > 1 or v in graph[v]:
                    out.update(scc)
    return out


class _Redirect(Transformer):
    """Renames the user-method calls of one method body, outermost call first."""

    def __init__(self, cloner: "_Cloner", caller: str, depth: int):
        self.cloner = cloner
        self.caller = caller
        self.depth = depth
        self.count = 0

    def visit_MethodCall(self, node: MethodCall):
        new_name = None
        if _is_local_call(node, self.cloner.originals) and node.name not in self.cloner.recursive:
            new_name = self.cloner.clone(node.name, self.caller, self.count, self.depth + 1)
            self.count += 1
        node = self.generic_visit(node)
        return dataclasses.replace(node, name=new_name) if new_name else node


class _Cloner:
    def __init__(self, p: Program, max_depth: int):
        self.p = p
        self.max_depth = max_depth
        self.originals = {}
        for m in p.methods:
            self.originals.setdefault(m.name, m)
        self.recursive = recursive_methods(call_graph(p))
        self.taken = {n.name for n in walk(p) if isinstance(n, Identifier)} | set(self.originals)
        self.counters: dict = {}
        self.map = CloneMap()
        self.queue: list = []  # (clone decl, depth) still to be redirected
        self.line = p.line_count
        self.spans: list = []

    def fresh(self, callee: str) -> str:
        k = self.counters.get(callee, 0)
        while True:
            k += 1
            name = f"{callee}{k}"
            if name not in self.taken:
                self.counters[callee] = k
                self.taken.add(name)
                return name

    def clone(self, callee: str, caller: str, site: int, depth: int) -> str:
        name = self.fresh(callee)
        self.map.entries[(callee, (caller, site))] = name
        src = self.originals[callee]
        start = self.line + 1
        offset = start - src.line
        decl = shift_lines(dataclasses.replace(src, name=name, origin=callee), offset)
        self.line = max(decl.end_line, decl.line)
        self.spans.append(CloneSpan(start, self.line, offset, name, callee))
        self.queue.append((decl, depth))
        return name

    def redirect(self, m: MethodDecl, depth: int) -> MethodDecl:
        if depth >= self.max_depth:
            if any(_is_local_call(n, self.originals) for n in walk(m)):
                self.map.warnings.append(
                    f"clone depth limit {self.max_depth} reached in {m.name}; its calls are not cloned")
            return m
        return _Redirect(self, m.name, depth).visit(m)

    def run(self) -> Program:
        for name in sorted(self.recursive):
            self.map.warnings.append(f"{name} is recursive; calls to it are not cloned")
        items = []
        top = _Redirect(self, "<top>", 0)
        for item in self.p.items:
            if isinstance(item, MethodDecl):
                items.append(self.redirect(item, 0))
            else:
                items.append(top.visit(item))
        done = 0
        while done < len(self.queue):
            decl, depth = self.queue[done]
            items.append(self.redirect(decl, depth))
            done += 1
        return dataclasses.replace(
            self.p, items=tuple(items), line_count=self.line,
            clone_spans=self.p.clone_spans + tuple(self.spans),
            warnings=self.p.warnings + tuple(self.map.warnings))


def clone_with_map(p: Program, max_depth: int = DEFAULT_MAX_DEPTH) -> tuple:
    """(cloned program, clone map)."""
    c = _Cloner(p, max_depth)
    out = c.run()
    return out, c.map


def clone_methods(p: Program, max_depth: int = DEFAULT_MAX_DEPTH) -> Program:
    """Give every call site of a non-recursive user method its own copy of the callee."""
    return clone_with_map(p, max_depth)[0]
