"""Reference models used to check the analysis.

Random programs are built in a small model of their own (assignments, sink
calls, ifs, calls to one identity helper) and rendered to Groovy text with
known line numbers. Tainted sinks are then computed directly on the model:

* ``kill_free_sinks``: any earlier definition reaches a use, the helper is
  shared by all call sites (what the bare core promises);
* ``precise_sinks``: the last definition wins and every call is evaluated
  with its own argument (what clone + paths + SSA promise, per path).

Both work by forward evaluation over a straight-line statement list, which is
unrelated to the backward worklist of the implementation. Programs with ifs
are checked by enumerating every decision vector.

A concrete interpreter over the parsed AST gives the values passed to sinks,
for behavior-preservation checks of the rewriting passes.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional

from smarttaint.catalog import load_catalog
from smarttaint.frontend.nodes import (
    Assignment, Binary, ExprStmt, Identifier, If, Interp, Literal, MethodCall, MethodDecl, Paren,
    Program, Return, StringLiteral,
)

SOURCES = ("src0", "src1")
VARS = ("a", "b", "c", "d")
SINKS = ("sendSms", "sendPush")
HELPER = "relay"
ORACLE_CATALOG = load_catalog("sources:\n" + "".join(f"    {s}\n" for s in SOURCES))

# --------------------------------------------------------------------------
# program model


@dataclass
class Atom:
    kind: str  # var, src, lit, call (helper applied to a variable)
    name: str


@dataclass
class MStmt:
    kind: str  # assign, sink, if
    target: str = ""
    atoms: list = field(default_factory=list)
    interp: bool = False
    sink: str = ""
    then: list = field(default_factory=list)
    orelse: Optional[list] = None
    line: int = 0
    ident: int = 0  # pre-order number among ifs


@dataclass
class Model:
    body: list
    helper: bool
    lines: int = 0

    def ifs(self) -> list:
        out = []

        def visit(stmts):
            for s in stmts:
                if s.kind == "if":
                    out.append(s)
                    visit(s.then)
                    visit(s.orelse or [])
        visit(self.body)
        return out

    def sinks(self) -> list:
        out = []

        def visit(stmts):
            for s in stmts:
                if s.kind == "sink":
                    out.append(s)
                elif s.kind == "if":
                    visit(s.then)
                    visit(s.orelse or [])
        visit(self.body)
        return out


def random_model(rng: random.Random, max_stmts: int = 30, max_ifs: int = 0, helper: bool = False,
                 else_rate: float = 0.5, nest: bool = True) -> Model:
    budget = [rng.randint(1, max_stmts)]
    ifs = [max_ifs]

    def atoms() -> list:
        out = []
        for _ in range(rng.randint(1, 3)):
            r = rng.random()
            if r < 0.25:
                out.append(Atom("src", rng.choice(SOURCES)))
            elif r < 0.35:
                out.append(Atom("lit", f"k{rng.randint(0, 9)}"))
            elif helper and r < 0.55:
                out.append(Atom("call", rng.choice(VARS)))
            else:
                out.append(Atom("var", rng.choice(VARS)))
        return out

    def block(depth: int) -> list:
        stmts = []
        while budget[0] > 0:
            r = rng.random()
            if depth > 0 and r < 0.2:
                break
            budget[0] -= 1
            if r < 0.2 and ifs[0] > 0 and (nest or depth == 0):
                ifs[0] -= 1
                s = MStmt("if", then=block(depth + 1))
                if rng.random() < else_rate:
                    s.orelse = block(depth + 1)
                stmts.append(s)
            elif r < 0.45:
                stmts.append(MStmt("sink", atoms=atoms()[:1], sink=rng.choice(SINKS)))
            else:
                stmts.append(MStmt("assign", target=rng.choice(VARS), atoms=atoms(), interp=rng.random() < 0.4))
        return stmts

    m = Model(block(0), helper)
    number_ifs(m)
    return m


def number_ifs(m: Model) -> None:
    for k, s in enumerate(m.ifs()):
        s.ident = k


# --------------------------------------------------------------------------
# rendering


def _expr(atoms: list, interp: bool) -> str:
    def one(a: Atom) -> str:
        if a.kind == "lit":
            return f'"{a.name}"'
        if a.kind == "call":
            return f"{HELPER}({a.name})"
        return a.name
    if interp and all(a.kind != "lit" for a in atoms):
        return '"' + " ".join("${" + one(a) + "}" for a in atoms) + '"'
    return " + ".join(one(a) for a in atoms)


def render_model(m: Model) -> str:
    """Groovy text; assigns ``line`` on every model statement."""
    out = ["def run() {"]
    for v in VARS:
        out.append(f'    def {v} = "init"')

    def emit(stmts, depth):
        pad = "    " * depth
        for s in stmts:
            if s.kind == "assign":
                out.append(f"{pad}{s.target} = {_expr(s.atoms, s.interp)}")
                s.line = len(out)
            elif s.kind == "sink":
                out.append(f"{pad}{s.sink}({_expr(s.atoms, False)})")
                s.line = len(out)
            else:
                out.append(f"{pad}if (flag{s.ident}) {{")
                s.line = len(out)
                emit(s.then, depth + 1)
                if s.orelse is not None:
                    out.append(f"{pad}}} else {{")
                    emit(s.orelse, depth + 1)
                out.append(f"{pad}}}")
    emit(m.body, 1)
    out.append("}")
    if m.helper:
        out.append(f"def {HELPER}(x) {{")
        out.append("    return x")
        out.append("}")
    m.lines = len(out)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# oracles


def flatten(stmts: list, decisions: Optional[dict] = None) -> list:
    """Straight-line statements; with ``decisions`` only the chosen branches."""
    out = []
    for s in stmts:
        if s.kind != "if":
            out.append(s)
        elif decisions is None:
            out.extend(flatten(s.then))
            out.extend(flatten(s.orelse or []))
        elif decisions[s.ident]:
            out.extend(flatten(s.then, decisions))
        else:
            out.extend(flatten(s.orelse or [], decisions))
    return out


def kill_free_sinks(straight: list) -> set:
    """Lines of tainted sinks when every earlier definition reaches each use."""
    relay = False
    while True:
        ever: set = set()  # variables with some tainted definition so far
        relay_next = False
        sinks = set()

        def value(atoms) -> bool:
            nonlocal relay_next
            t = False
            for a in atoms:
                if a.kind == "src" or a.kind == "var" and a.name in ever:
                    t = True
                elif a.kind == "call":
                    relay_next |= a.name in ever
                    t |= relay
            return t
        for s in straight:
            if s.kind == "assign":
                if value(s.atoms):
                    ever.add(s.target)
            elif value(s.atoms):
                sinks.add(s.line)
        if relay_next == relay:
            return sinks
        relay = relay_next


def precise_sinks(straight: list) -> set:
    """Lines of tainted sinks when the last definition wins."""
    env: dict = {}
    sinks = set()

    def value(atoms) -> bool:
        return any(a.kind == "src" or a.kind in ("var", "call") and env.get(a.name, False) for a in atoms)
    for s in straight:
        if s.kind == "assign":
            env[s.target] = value(s.atoms)
        elif value(s.atoms):
            sinks.add(s.line)
    return sinks


def decision_vectors(m: Model):
    ifs = m.ifs()
    for bits in itertools.product((True, False), repeat=len(ifs)):
        yield dict(zip((s.ident for s in ifs), bits))


def union_over_vectors(m: Model, oracle) -> set:
    out = set()
    for d in decision_vectors(m):
        out |= oracle(flatten(m.body, d))
    return out


def reachable_vectors(m: Model) -> set:
    """Decision strings (document order, unexecuted ifs skipped) of every path."""
    out = set()
    for d in decision_vectors(m):
        word = []

        def visit(stmts):
            for s in stmts:
                if s.kind == "if":
                    word.append("T" if d[s.ident] else "F")
                    visit(s.then if d[s.ident] else (s.orelse or []))
        visit(m.body)
        out.add("".join(word))
    return out


# --------------------------------------------------------------------------
# concrete interpreter


class _Returned(Exception):
    def __init__(self, value):
        self.value = value


class Interpreter:
    """Runs assignments, string building, user calls and sink calls.

    Unknown names evaluate to ``<name>``; values are strings; every sink call
    is recorded as (line, argument values).
    """

    def __init__(self, p: Program, sinks=SINKS + ("sendNotification", "sendPushMessage")):
        self.p = p
        self.sinks = set(sinks)
        self.calls: list = []
        self.methods = {m.name: m for m in p.methods}

    def run(self, entry: str, *args) -> list:
        self.call(entry, list(args))
        return self.calls

    def call(self, name: str, args: list):
        m = self.methods[name]
        env = {prm.name: (args[i] if i < len(args) else "<missing>") for i, prm in enumerate(m.params)}
        try:
            last = self.block(m.body, env)
        except _Returned as r:
            return r.value
        return last

    def block(self, stmts, env):
        last = None
        for s in stmts:
            last = self.stmt(s, env)
        return last

    def stmt(self, s, env):
        if isinstance(s, Assignment):
            v = self.eval(s.value, env) if s.value is not None else "null"
            if s.op != "=":
                v = env.get(s.name, f"<{s.name}>") + v
            env[s.target.name] = v
            return None
        if isinstance(s, ExprStmt):
            return self.eval(s.expr, env)
        if isinstance(s, Return):
            raise _Returned(self.eval(s.value, env) if s.value is not None else None)
        if isinstance(s, If):
            raise ValueError("interpreter handles branch-free code only")
        return None

    def eval(self, e, env) -> str:
        if isinstance(e, Identifier):
            return env.get(e.name, f"<{e.name}>")
        if isinstance(e, Literal):
            return e.text
        if isinstance(e, StringLiteral):
            return "".join(self.eval(p.expr, env) if isinstance(p, Interp) else p for p in e.parts)
        if isinstance(e, Binary) and e.op == "+":
            return self.eval(e.left, env) + self.eval(e.right, env)
        if isinstance(e, Paren):
            return self.eval(e.expr, env)
        if isinstance(e, MethodCall) and e.receiver is None:
            args = [self.eval(a, env) for a in e.args]
            if e.name in self.sinks:
                self.calls.append((e.line, tuple(args)))
                return "null"
            if e.name in self.methods:
                return self.call(e.name, args)
        raise ValueError(f"unsupported expression {type(e).__name__} at line {e.line}")
