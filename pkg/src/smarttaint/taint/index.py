"""Statement table and name resolution over one Program.

Every statement gets a sequence number (``sid``) in document order. The index
records, per statement, its scope (method name or ``TOP`` for script-level
code), enclosing loops and closures, and the block-level statement it is
printed under in a slice. Name resolution follows the analysis' deliberately
kill-free rule: a definition reaches a use if it comes earlier in the same
scope or shares a loop with it; a global additionally receives every
definition made in other scopes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend.nodes import (
    Assignment, Binary, Block, Closure, ExprStmt, Identifier, If, Index, MethodCall, MethodDecl,
    Program, PropertyAccess, ReflectiveCall, Return, Subscribe, walk_own,
)
from ..catalog import STATE_OBJECTS

TOP = "<top>"
MUTATORS = {"add", "addAll", "put", "putAll", "push", "leftShift", "offer", "set", "setAt", "putAt", "append"}


@dataclass
class StmtInfo:
    sid: int
    node: object
    scope: str
    parent: Optional[int]
    loops: frozenset
    closures: tuple  # enclosing closure numbers, innermost last
    unit: int  # block-level statement this one is printed under
    header: bool = False  # part of a loop header

    @property
    def line(self) -> int:
        return self.node.line


@dataclass
class ClosureInfo:
    cid: int
    node: Closure
    owner_call: Optional[MethodCall]
    stmt: int  # statement whose expression contains the closure


@dataclass
class ProgramIndex:
    program: Program
    stmts: list = field(default_factory=list)
    closures: list = field(default_factory=list)
    methods: dict = field(default_factory=dict)  # name -> MethodDecl (first declaration wins)
    declared: dict = field(default_factory=dict)  # scope -> names declared with def/type/params
    defs: dict = field(default_factory=dict)  # (scope, name) -> [sid]
    global_defs: dict = field(default_factory=dict)  # name -> [sid] for undeclared writes
    calls: dict = field(default_factory=dict)  # method name -> [(sid, call_no, MethodCall)]
    reflective: list = field(default_factory=list)  # [(sid, call_no, ReflectiveCall)]
    call_numbers: dict = field(default_factory=dict)  # (sid, id(call)) -> call_no
    subscribes: dict = field(default_factory=dict)  # handler name -> [sid]
    _cid_of: dict = field(default_factory=dict)  # (sid, id(closure)) -> closure number

    # ---- construction --------------------------------------------------
    @classmethod
    def build(cls, p: Program) -> "ProgramIndex":
        ix = cls(p)
        for m in p.methods:
            ix.methods.setdefault(m.name, m)
        ix.declared[TOP] = set()
        for item in p.items:
            if isinstance(item, MethodDecl):
                ix.declared.setdefault(item.name, set()).update(prm.name for prm in item.params)
                ix._visit(item.body, item.name, None, frozenset(), (), None)
            else:
                ix._visit((item,), TOP, None, frozenset(), (), None)
        ix._collect_defs()
        return ix

    def _visit(self, stmts, scope, parent, loops, closures, unit) -> None:
        for s in stmts:
            self._visit_stmt(s, scope, parent, loops, closures, unit)

    def _visit_stmt(self, s, scope, parent, loops, closures, unit, header=False) -> int:
        sid = len(self.stmts)
        info = StmtInfo(sid, s, scope, parent, loops, closures, sid if unit is None else unit, header)
        self.stmts.append(info)
        if isinstance(s, Assignment) and (s.declares or s.op == "in") and s.name:
            self.declared.setdefault(scope, set()).add(s.name)
        own_unit = info.unit
        # calls and closures evaluated by this statement itself
        for n in walk_own(s):
            if isinstance(n, MethodCall):
                self._record_call(sid, n)
                for a in n.args:
                    if isinstance(a, Closure):
                        self._visit_closure(a, n, sid, scope, loops, closures, own_unit)
            elif isinstance(n, ReflectiveCall) and (sid, id(n)) not in self.call_numbers:
                no = self.call_numbers[(sid, id(n))] = len(self.call_numbers)
                self.reflective.append((sid, no, n))
            elif isinstance(n, Closure) and (sid, id(n)) not in self._cid_of:
                self._visit_closure(n, None, sid, scope, loops, closures, own_unit)
        if isinstance(s, Subscribe) and s.handler:
            self.subscribes.setdefault(s.handler, []).append(sid)
        if isinstance(s, If):
            self._visit(s.then_body, scope, sid, loops, closures, None if unit is None else unit)
            self._visit(s.else_body, scope, sid, loops, closures, None if unit is None else unit)
        elif isinstance(s, Block):
            inner_loops = loops | {sid} if s.is_loop else loops
            for h in s.header:
                if isinstance(h, (Assignment, ExprStmt)):
                    self._visit_stmt(h, scope, sid, inner_loops, closures, own_unit, header=True)
            for c in s.clauses:
                self._visit(c.body, scope, sid, inner_loops, closures, None if unit is None else unit)
        return sid

    def _record_call(self, sid: int, call: MethodCall) -> None:
        if (sid, id(call)) in self.call_numbers:
            return
        no = len(self.call_numbers)
        self.call_numbers[(sid, id(call))] = no
        if call.receiver is None or isinstance(call.receiver, Identifier) and call.receiver.name == "this":
            self.calls.setdefault(call.name, []).append((sid, no, call))

    def _visit_closure(self, c: Closure, owner, sid, scope, loops, closures, unit) -> None:
        cid = len(self.closures)
        self._cid_of[(sid, id(c))] = cid
        self.closures.append(ClosureInfo(cid, c, owner, sid))
        self._visit(c.body, scope, sid, loops, closures + (cid,), unit)

    def _collect_defs(self) -> None:
        for info in self.stmts:
            name = defined_name(info.node)
            if name is None:
                continue
            scope_decl = self.declared.get(info.scope, set())
            if self.closure_param_owner(name, info) is not None:
                continue
            self.defs.setdefault((info.scope, name), []).append(info.sid)
            if name not in scope_decl:
                self.global_defs.setdefault(name, []).append(info.sid)

    # ---- queries -------------------------------------------------------
    def closure_param_owner(self, name: str, info: StmtInfo) -> Optional[int]:
        for cid in reversed(info.closures):
            if name in self.closures[cid].node.param_names:
                return cid
        return None

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when statement ``a`` (transitively) contains statement ``b``."""
        p = self.stmts[b].parent
        while p is not None:
            if p == a:
                return True
            p = self.stmts[p].parent
        return False

    def reaches(self, d: int, u: int) -> bool:
        """Kill-free reaching rule between a definition and a use site."""
        if self.stmts[d].loops & self.stmts[u].loops:
            return True
        return d < u and not self.is_ancestor(d, u)

    def local_names(self, info: StmtInfo) -> set:
        names = set(self.declared.get(info.scope, ()))
        for cid in info.closures:
            names.update(self.closures[cid].node.param_names)
        return names

    def is_local(self, name: str, scope: str) -> bool:
        return name in self.declared.get(scope, ())

    def param_index(self, scope: str, name: str) -> Optional[int]:
        m = self.methods.get(scope)
        if m is None:
            return None
        for k, prm in enumerate(m.params):
            if prm.name == name:
                return k
        return None

    def resolve(self, name: str, info: StmtInfo) -> tuple:
        """(definition sids, param index or None, closure number or None) for a use of ``name``."""
        cid = self.closure_param_owner(name, info)
        if cid is not None:
            return (), None, cid
        same = [d for d in self.defs.get((info.scope, name), ()) if self.reaches(d, info.sid)]
        if self.is_local(name, info.scope):
            return tuple(same), self.param_index(info.scope, name), None
        others = [d for d in self.global_defs.get(name, ()) if self.stmts[d].scope != info.scope]
        return tuple(sorted(set(same) | set(others))), None, None

    def return_sites(self, method: str) -> list:
        m = self.methods.get(method)
        if m is None:
            return []
        out = [i.sid for i in self.stmts
               if i.scope == method and not i.closures and isinstance(i.node, Return) and i.node.value is not None]
        top = [i.sid for i in self.stmts if i.scope == method and i.parent is None and not i.closures]
        if top and isinstance(self.stmts[top[-1]].node, ExprStmt):
            out.append(top[-1])
        return sorted(set(out))

    def is_user_call(self, call) -> bool:
        return isinstance(call, MethodCall) and call.name in self.methods and (
            call.receiver is None or isinstance(call.receiver, Identifier) and call.receiver.name == "this")


def defined_name(s) -> Optional[str]:
    """Variable a statement (possibly weakly) writes, or None."""
    if isinstance(s, Assignment):
        t = s.target
        if isinstance(t, Identifier):
            return t.name
        while isinstance(t, (Index, PropertyAccess)):
            t = t.base
        if isinstance(t, Identifier) and t.name not in STATE_OBJECTS and t.name not in ("location", "settings"):
            return t.name
        return None
    if isinstance(s, ExprStmt):
        e = s.expr
        if isinstance(e, MethodCall) and e.name in MUTATORS and isinstance(e.receiver, Identifier):
            return e.receiver.name if e.receiver.name not in STATE_OBJECTS else None
        if isinstance(e, Binary) and e.op == "<<" and isinstance(e.left, Identifier):
            return e.left.name if e.left.name not in STATE_OBJECTS else None
    return None


def written_values(s) -> tuple:
    """Expressions whose value a defining statement stores."""
    if isinstance(s, Assignment):
        vals = (s.value,) if s.value is not None else ()
        if s.op not in ("=", "in") and isinstance(s.target, Identifier):
            vals = (s.target,) + vals
        return vals
    if isinstance(s, ExprStmt):
        e = s.expr
        if isinstance(e, MethodCall):
            return tuple(a for a in e.args if not isinstance(a, Closure))
        if isinstance(e, Binary):
            return (e.right,)
    return ()
