"""AST for the SmartApp Groovy subset.

Nodes are frozen dataclasses. ``line`` is the 1-based line of the node's
first token in the original file; layout-only fields (columns, closing-brace
lines) are excluded from equality so that two programs compare equal when
they have the same structure at the same lines.
"""
from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True, kw_only=True)
class Node:
    line: int = 0
    col: int = field(default=0, compare=False, repr=False)


# --------------------------------------------------------------------------
# expressions

@dataclass(frozen=True)
class Identifier(Node):
    name: str


@dataclass(frozen=True)
class Literal(Node):
    text: str  # numbers, true/false/null


@dataclass(frozen=True)
class Interp(Node):
    expr: "Expr"
    braced: bool = False


@dataclass(frozen=True)
class StringLiteral(Node):
    quote: str
    parts: tuple = ()  # str and Interp, in textual order

    @property
    def slots(self) -> tuple:
        return tuple(p.expr for p in self.parts if isinstance(p, Interp))

    @property
    def is_plain(self) -> bool:
        return not any(isinstance(p, Interp) for p in self.parts)

    @property
    def value(self) -> str:
        """Literal text with interpolations shown as ``$?``."""
        return "".join(p if isinstance(p, str) else "$?" for p in self.parts)


@dataclass(frozen=True)
class NamedArg(Node):
    name: str
    value: "Expr"
    quoted: bool = False


@dataclass(frozen=True)
class MethodCall(Node):
    receiver: Optional["Expr"]
    name: str
    args: tuple = ()
    op: str = "."


@dataclass(frozen=True)
class ReflectiveCall(Node):
    target: "Expr"
    args: tuple = ()


@dataclass(frozen=True)
class New(Node):
    type_name: str
    args: tuple = ()


@dataclass(frozen=True)
class PropertyAccess(Node):
    base: "Expr"
    member: str
    op: str = "."


@dataclass(frozen=True)
class Index(Node):
    base: "Expr"
    index: tuple = ()


@dataclass(frozen=True)
class ListLiteral(Node):
    items: tuple = ()


@dataclass(frozen=True)
class MapLiteral(Node):
    entries: tuple = ()  # NamedArg


@dataclass(frozen=True)
class Closure(Node):
    params: tuple = ()  # parameter names; empty means implicit ``it``
    body: tuple = ()
    arrow: bool = False
    end_line: int = field(default=0, compare=False)

    @property
    def param_names(self) -> tuple:
        return self.params if (self.params or self.arrow) else ("it",)


@dataclass(frozen=True)
class Binary(Node):
    left: "Expr"
    op: str
    right: "Expr"


@dataclass(frozen=True)
class Unary(Node):
    op: str
    operand: "Expr"
    postfix: bool = False


@dataclass(frozen=True)
class Ternary(Node):
    cond: "Expr"
    then: Optional["Expr"]  # None for the elvis operator
    orelse: "Expr"


@dataclass(frozen=True)
class Paren(Node):
    expr: "Expr"


Expr = Union[Identifier, Literal, StringLiteral, MethodCall, ReflectiveCall, New, PropertyAccess,
             Index, ListLiteral, MapLiteral, Closure, Binary, Unary, Ternary, Paren, NamedArg]


# --------------------------------------------------------------------------
# statements

@dataclass(frozen=True)
class Assignment(Node):
    target: Expr
    value: Optional[Expr]
    op: str = "="
    declares: bool = False
    type_name: Optional[str] = None

    @property
    def name(self) -> Optional[str]:
        """Variable written by this assignment, or None for field/element writes."""
        return self.target.name if isinstance(self.target, Identifier) else None


@dataclass(frozen=True)
class ExprStmt(Node):
    expr: Expr


@dataclass(frozen=True)
class Subscribe(Node):
    call: MethodCall

    @property
    def device(self) -> Expr:
        return self.call.args[0]

    @property
    def event(self) -> Optional[str]:
        pos = [a for a in self.call.args if not isinstance(a, NamedArg)]
        if len(pos) >= 3 and isinstance(pos[1], StringLiteral):
            return pos[1].value
        return None

    @property
    def handler(self) -> Optional[str]:
        pos = [a for a in self.call.args if not isinstance(a, NamedArg)]
        h = pos[-1]
        if isinstance(h, Identifier):
            return h.name
        if isinstance(h, StringLiteral) and h.is_plain:
            return h.value
        return None


@dataclass(frozen=True)
class If(Node):
    cond: Expr
    then_body: tuple = ()
    else_body: tuple = ()
    then_end: int = field(default=0, compare=False)
    else_line: int = field(default=0, compare=False)
    end_line: int = field(default=0, compare=False)

    @property
    def ref(self) -> tuple:
        return (self.line, self.col)


@dataclass(frozen=True)
class Return(Node):
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Jump(Node):
    kind: str  # break / continue


@dataclass(frozen=True)
class Import(Node):
    path: str


@dataclass(frozen=True)
class Clause(Node):
    kind: str  # body, case, default, catch, finally
    exprs: tuple = ()
    body: tuple = ()
    end_line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Block(Node):
    """Loops, switch, try and bare blocks; analysed without path splitting."""
    kind: str  # for, forin, while, do, switch, try, block
    header: tuple = ()
    clauses: tuple = ()
    end_line: int = field(default=0, compare=False)

    @property
    def is_loop(self) -> bool:
        return self.kind in ("for", "forin", "while", "do")


Stmt = Union[Assignment, ExprStmt, Subscribe, If, Return, Jump, Import, Block]


@dataclass(frozen=True)
class Param(Node):
    name: str
    type_name: Optional[str] = None
    default: Optional[Expr] = None


@dataclass(frozen=True)
class MethodDecl(Node):
    name: str
    params: tuple = ()
    body: tuple = ()
    modifiers: tuple = ("def",)
    return_type: Optional[str] = None
    end_line: int = field(default=0, compare=False)
    origin: Optional[str] = field(default=None, compare=False)

    @property
    def visibility(self) -> str:
        return "private" if "private" in self.modifiers else "default"


@dataclass(frozen=True)
class InputDecl:
    name: str
    capability: Optional[str]
    options: tuple
    line: int


@dataclass(frozen=True)
class Section:
    title: Optional[str]
    inputs: tuple
    line: int


@dataclass(frozen=True)
class CloneSpan:
    start: int
    end: int
    offset: int  # original line = clone line - offset
    name: str
    origin: str


@dataclass(frozen=True)
class Program:
    items: tuple = ()  # MethodDecl and top-level statements in document order
    line_count: int = 0
    ssa_form: bool = field(default=False, compare=False)
    clone_spans: tuple = field(default=(), compare=False)
    warnings: tuple = field(default=(), compare=False)

    @property
    def methods(self) -> tuple:
        return tuple(i for i in self.items if isinstance(i, MethodDecl))

    @property
    def top_statements(self) -> tuple:
        return tuple(i for i in self.items if not isinstance(i, MethodDecl))

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    @property
    def definition(self) -> Optional[MethodCall]:
        for s in self.top_statements:
            if isinstance(s, ExprStmt) and isinstance(s.expr, MethodCall) and s.expr.name == "definition":
                return s.expr
        return None

    @property
    def preferences(self) -> list:
        """Sections declared in the ``preferences`` block (including pages)."""
        out: list = []
        for s in self.top_statements:
            if isinstance(s, ExprStmt) and isinstance(s.expr, MethodCall) and s.expr.name == "preferences":
                for node in walk(s):
                    if isinstance(node, MethodCall) and node.name == "section" and node.receiver is None:
                        out.append(_section(node))
        return out

    @property
    def inputs(self) -> list:
        """Every ``input`` declaration in the file, dynamic pages included."""
        return [d for d in (_input(n) for n in walk(self) if _is_input(n)) if d is not None]

    def origin_line(self, line: int) -> int:
        """Map a line inside a cloned method back to its original declaration."""
        for span in self.clone_spans:
            if span.start <= line <= span.end:
                return line - span.offset
        return line

    def handler(self, sub: Subscribe) -> Optional[MethodDecl]:
        return self.method(sub.handler) if sub.handler else None


def _is_input(n) -> bool:
    return isinstance(n, MethodCall) and n.name == "input" and n.receiver is None


def _input(call: MethodCall) -> Optional[InputDecl]:
    pos = [a for a in call.args if not isinstance(a, NamedArg)]
    named = {a.name: a.value for a in call.args if isinstance(a, NamedArg)}
    name_expr = pos[0] if pos else named.get("name")
    if not (isinstance(name_expr, StringLiteral) and name_expr.is_plain):
        return None
    cap_expr = pos[1] if len(pos) > 1 else named.get("type")
    cap = cap_expr.value if isinstance(cap_expr, StringLiteral) else None
    opts = tuple(a for a in call.args if isinstance(a, NamedArg))
    return InputDecl(name_expr.value, cap, opts, call.line)


def _section(call: MethodCall) -> Section:
    title = None
    for a in call.args:
        if isinstance(a, StringLiteral):
            title = a.value
            break
    inputs = []
    for a in call.args:
        if isinstance(a, Closure):
            for n in walk(a):
                if _is_input(n):
                    d = _input(n)
                    if d is not None:
                        inputs.append(d)
    return Section(title, tuple(inputs), call.line)


# --------------------------------------------------------------------------
# traversal

@functools.lru_cache(maxsize=None)
def field_names(cls) -> tuple:
    """Dataclass field names of a node class, cached."""
    return tuple(f.name for f in dataclasses.fields(cls))


def _child_list(node) -> list:
    if isinstance(node, Program):
        return list(node.items)
    out = []
    for name in field_names(type(node)):
        v = getattr(node, name)
        if isinstance(v, Node):
            out.append(v)
        elif isinstance(v, tuple):
            out.extend(x for x in v if isinstance(x, Node))
    return out


def children(node) -> Iterator:
    """Direct child nodes in document order."""
    return iter(_child_list(node))


def walk(node) -> Iterator:
    """Pre-order traversal including ``node`` itself."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        kids = _child_list(n)
        kids.reverse()
        stack.extend(kids)


def walk_own(node) -> Iterator:
    """Pre-order traversal that does not descend into nested statements.

    Stops at closure bodies and at the bodies of compound statements, so it
    visits exactly the expressions a single statement evaluates itself.
    """
    yield node
    if isinstance(node, Closure):
        return
    if isinstance(node, If):
        yield from walk_own(node.cond)
        return
    if isinstance(node, Block):
        for h in node.header:
            if isinstance(h, Node) and not isinstance(h, (Assignment, ExprStmt)):
                yield from walk_own(h)
        for c in node.clauses:
            for e in c.exprs:
                if isinstance(e, Node):
                    yield from walk_own(e)
        return
    if isinstance(node, MethodDecl):
        return
    for c in children(node):
        yield from walk_own(c)


class Transformer:
    """Rebuilds frozen nodes bottom-up.

    ``visit_<Class>`` methods may return a replacement node; inside statement
    tuples they may also return a tuple/list, which is spliced in place.
    """

    def visit(self, node):
        meth = getattr(self, "visit_" + type(node).__name__, None)
        if meth is not None:
            return meth(node)
        return self.generic_visit(node)

    def visit_tuple(self, items: tuple) -> tuple:
        out = []
        for x in items:
            if isinstance(x, (Node, Program)):
                r = self.visit(x)
                if isinstance(r, (tuple, list)):
                    out.extend(r)
                elif r is not None:
                    out.append(r)
            else:
                out.append(x)
        return tuple(out)

    def generic_visit(self, node):
        if isinstance(node, Program):
            return dataclasses.replace(node, items=self.visit_tuple(node.items))
        changes = {}
        for name in field_names(type(node)):
            v = getattr(node, name)
            if isinstance(v, Node):
                nv = self.visit(v)
                if nv is not v:
                    changes[name] = nv
            elif isinstance(v, tuple) and any(isinstance(x, Node) for x in v):
                nv = self.visit_tuple(v)
                if nv != v or any(a is not b for a, b in zip(nv, v)):
                    changes[name] = nv
        return dataclasses.replace(node, **changes) if changes else node


_LINE_FIELDS = ("line", "end_line", "then_end", "else_line")


class _Shift(Transformer):
    def __init__(self, offset: int):
        self.offset = offset

    def generic_visit(self, node):
        node = super().generic_visit(node)
        if isinstance(node, Node):
            changes = {f: getattr(node, f) + self.offset
                       for f in _LINE_FIELDS if getattr(node, f, 0)}
            node = dataclasses.replace(node, **changes)
        return node


def shift_lines(node, offset: int):
    return _Shift(offset).visit(node) if offset else node


def statements(node) -> Iterator:
    """Every statement inside ``node`` (closure bodies included), pre-order."""
    for n in walk(node):
        if isinstance(n, (Assignment, ExprStmt, Subscribe, If, Return, Jump, Import, Block)):
            yield n


def find_ifs(node) -> list:
    return [n for n in walk(node) if isinstance(n, If)]
