"""Static single assignment renaming.

Every assignment to a variable ``V`` gets a fresh name ``V<k>`` from a counter
C(V), and each later use is rewritten to the newest version. Method
parameters are version 0 and keep their name. Locals (``def``/typed
declarations, parameters, for-in variables) count per method; undeclared
variables share one program-wide counter, except that a global read or
written in more than one scope is left alone because the order in which
methods run is unknown.

There are no phi nodes. Each branch of an ``if`` starts from the versions
visible before it; afterwards the versions from the later branch win for
names both assign. The path generator normally removes branches first.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .frontend.nodes import (
    Assignment, Binary, Block, Closure, ExprStmt, Identifier, If, MethodDecl, Node, Param, Program,
    Return, Subscribe, field_names, walk,
)
from .taint.index import TOP, ProgramIndex


class SsaError(ValueError):
    def __init__(self, name: str, line: int, scope: str):
        where = "script body" if scope == TOP else f"method {scope!r}"
        super().__init__(f"line {line}: local {name!r} used before any assignment in {where}")
        self.name = name
        self.line = line
        self.scope = scope


@dataclass
class RenameState:
    counters: dict = field(default_factory=dict)  # counter key -> C(V)
    scope_stack: list = field(default_factory=list)  # name -> current SSA name, innermost last
    taken: set = field(default_factory=set)  # names in the input program, never reused
    generated: dict = field(default_factory=dict)  # counter scope -> names already handed out

    @property
    def current(self) -> dict:
        return self.scope_stack[-1]

    def fresh(self, key: tuple, name: str) -> str:
        k = self.counters.get(key, 0)
        while True:
            k += 1
            candidate = f"{name}{k}"
            used = self.generated.setdefault(key[0], set())
            if candidate not in self.taken and candidate not in used:
                self.counters[key] = k
                used.add(candidate)
                return candidate


def _identifiers(p: Program) -> set:
    names = set()
    for n in walk(p):
        if isinstance(n, Identifier):
            names.add(n.name)
        elif isinstance(n, MethodDecl):
            names.add(n.name)
            names.update(prm.name for prm in n.params)
        elif isinstance(n, Closure):
            names.update(n.params)
    return names


def _shared_globals(p: Program, ix: ProgramIndex) -> set:
    """Undeclared names touched from more than one scope."""
    scopes: dict = {}
    for info in ix.stmts:
        local = ix.declared.get(info.scope, set())
        for n in walk(info.node) if info.parent is None and not info.closures else ():
            if isinstance(n, Identifier) and n.name not in local:
                scopes.setdefault(n.name, set()).add(info.scope)
    return {name for name, s in scopes.items() if len(s) > 1}


class _Renamer:
    def __init__(self, p: Program):
        self.p = p
        self.ix = ProgramIndex.build(p)
        self.shared = _shared_globals(p, self.ix)
        self.methods = {m.name for m in p.methods}
        self.state = RenameState(scope_stack=[{}], taken=_identifiers(p))
        self.globals: dict = {}  # global name -> current version, program wide
        self.scope = TOP
        self.latest: dict = {}  # newest version in document order, ignoring branch forks
        self.shadow: list = []  # closure parameter names, innermost last

    # ---- scope bookkeeping -------------------------------------------------
    def is_local(self, name: str) -> bool:
        return name in self.ix.declared.get(self.scope, ())

    def params(self) -> set:
        m = self.ix.methods.get(self.scope)
        return {prm.name for prm in m.params} if m is not None else set()

    def shadowed(self, name: str) -> bool:
        return any(name in s for s in self.shadow)

    def renames(self, name: str) -> bool:
        if self.shadowed(name):
            return False
        return self.is_local(name) or name not in self.shared and name not in self.methods

    # ---- names -------------------------------------------------------------
    def use(self, name: str, line: int) -> str:
        if not self.renames(name):
            return name
        if self.is_local(name):
            if name in self.state.current:
                return self.state.current[name]
            if name in self.latest:
                return self.latest[name]
            if name in self.params():
                return name
            raise SsaError(name, line, self.scope)
        return self.state.current.get(name, self.globals.get(name, name))

    def define(self, name: str) -> str:
        if not self.renames(name):
            return name
        key = (self.scope, name) if self.is_local(name) else ("", name)
        new = self.state.fresh(key, name)
        self.state.current[name] = new
        self.latest[name] = new
        if not self.is_local(name):
            self.globals[name] = new
        return new

    # ---- program -----------------------------------------------------------
    def program(self) -> Program:
        items = []
        for item in self.p.items:
            if isinstance(item, MethodDecl):
                items.append(self.method(item))
            else:
                items.extend(self.statement(item))
        return dataclasses.replace(self.p, items=tuple(items), ssa_form=True)

    def method(self, m: MethodDecl) -> MethodDecl:
        top_state = (self.state.scope_stack, self.latest)
        self.scope = m.name
        self.state.scope_stack = [{}]
        self.latest = {}
        params = tuple(dataclasses.replace(prm, default=self.expr(prm.default)) if prm.default else prm
                       for prm in m.params)
        body = self.body(m.body)
        self.scope = TOP
        self.state.scope_stack, self.latest = top_state
        return dataclasses.replace(m, params=params, body=body)

    def body(self, stmts) -> tuple:
        out: list = []
        for s in stmts:
            out.extend(self.statement(s))
        return tuple(out)

    # ---- statements --------------------------------------------------------
    def statement(self, s) -> list:
        if isinstance(s, Assignment):
            return [self.assignment(s)]
        if isinstance(s, ExprStmt):
            return [dataclasses.replace(s, expr=self.expr(s.expr))]
        if isinstance(s, Subscribe):
            return [dataclasses.replace(s, call=self.expr(s.call))]
        if isinstance(s, Return):
            return [dataclasses.replace(s, value=self.expr(s.value))]
        if isinstance(s, If):
            return [self.if_stmt(s)]
        if isinstance(s, Block):
            return [self.block(s)]
        return [s]

    def assignment(self, s: Assignment) -> Assignment:
        if s.op == "in":  # for-in header
            value = self.expr(s.value)
            return dataclasses.replace(s, target=self.target(s.target), value=value)
        if not isinstance(s.target, Identifier):
            return dataclasses.replace(s, target=self.expr(s.target), value=self.expr(s.value))
        name = s.target.name
        if s.op == "=" or s.value is None:
            value = self.expr(s.value)
        else:
            old = Identifier(self.use(name, s.line), line=s.target.line, col=s.target.col)
            value = Binary(old, s.op[:-1], self.expr(s.value), line=s.target.line, col=s.target.col)
        local = self.is_local(name)
        target = self.target(s.target)
        if target.name == name:
            return dataclasses.replace(s, value=value)
        return dataclasses.replace(s, target=target, value=value, op="=",
                                   declares=s.declares or local)

    def target(self, t: Identifier) -> Identifier:
        return dataclasses.replace(t, name=self.define(t.name))

    def if_stmt(self, s: If) -> If:
        cond = self.expr(s.cond)
        before = dict(self.state.current)
        self.state.scope_stack.append(dict(before))
        then_body = self.body(s.then_body)
        after_then = self.state.scope_stack.pop()
        self.state.scope_stack.append(dict(before))
        else_body = self.body(s.else_body)
        after_else = self.state.scope_stack.pop()
        merged = dict(before)
        for name, v in after_then.items():
            if before.get(name) != v:
                merged[name] = v
        for name, v in after_else.items():
            if before.get(name) != v:
                merged[name] = v
        self.state.scope_stack[-1] = merged
        return dataclasses.replace(s, cond=cond, then_body=then_body, else_body=else_body)

    def block(self, s: Block) -> Block:
        if s.kind == "for":  # the update runs after the body, so rename it last
            init, cond, update = s.header
            init = self.statement(init)[0] if init is not None else None
            cond = self.expr(cond)
            clauses = tuple(self.clause(c) for c in s.clauses)
            update = self.statement(update)[0] if update is not None else None
            return dataclasses.replace(s, header=(init, cond, update), clauses=clauses)
        header = tuple(self.statement(h)[0] if isinstance(h, (Assignment, ExprStmt)) else self.expr(h)
                       for h in s.header)
        clauses = tuple(self.clause(c) for c in s.clauses)
        return dataclasses.replace(s, header=header, clauses=clauses)

    def clause(self, c):
        exprs = tuple(e if isinstance(e, Param) else self.expr(e) for e in c.exprs)
        return dataclasses.replace(c, exprs=exprs, body=self.body(c.body))

    # ---- expressions -------------------------------------------------------
    def expr(self, e):
        if e is None:
            return None
        if isinstance(e, Identifier):
            new = self.use(e.name, e.line)
            return e if new == e.name else dataclasses.replace(e, name=new)
        if isinstance(e, Closure):
            self.shadow.append(set(e.param_names))
            body = self.body(e.body)
            self.shadow.pop()
            return dataclasses.replace(e, body=body)
        changes = {}
        for name in field_names(type(e)):
            v = getattr(e, name)
            if isinstance(v, Node):
                nv = self.expr(v)
                if nv is not v:
                    changes[name] = nv
            elif isinstance(v, tuple) and any(isinstance(x, Node) for x in v):
                nv = tuple(self.expr(x) if isinstance(x, Node) else x for x in v)
                if any(a is not b for a, b in zip(nv, v)):
                    changes[name] = nv
        return dataclasses.replace(e, **changes) if changes else e


def to_ssa(p: Program) -> Program:
    """Rename ``p`` into single-assignment form (a no-op on SSA output)."""
    if p.ssa_form:
        return p
    return _Renamer(p).program()


def assigned_names(p: Program) -> list:
    """Identifier targets of every Assignment, in document order."""
    return [n.target.name for n in walk(p) if isinstance(n, Assignment) and isinstance(n.target, Identifier)]
