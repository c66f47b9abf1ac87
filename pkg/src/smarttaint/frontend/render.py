"""Pretty-printer for Programs.

In line-preserving mode every node is emitted on its recorded line, padding
with newlines as needed, so anything removed by a transformation simply
leaves blank lines behind. Compact mode prints expressions on one line and is
used by report renderers.
"""
from __future__ import annotations

from .nodes import (
    Assignment, Binary, Block, Closure, ExprStmt, Identifier, If, Import, Index, Interp, Jump,
    ListLiteral, Literal, MapLiteral, MethodCall, MethodDecl, NamedArg, New, Param, Paren, Program,
    PropertyAccess, ReflectiveCall, Return, StringLiteral, Subscribe, Ternary, Unary,
)

INDENT = "    "


class Printer:
    def __init__(self, preserve_lines: bool = True):
        self.preserve = preserve_lines
        self.out: list[str] = []
        self.line = 1
        self.depth = 0
        self.need_sep = False  # a statement ended on the current line

    # ---- low level -----------------------------------------------------
    def emit(self, text: str) -> None:
        self.out.append(text)
        self.line += text.count("\n")

    def goto(self, line: int) -> None:
        if self.preserve and line > self.line:
            self.emit("\n" * (line - self.line) + INDENT * self.depth)
            self.need_sep = False

    def text(self) -> str:
        return "".join(self.out)

    def begin_statement(self, line: int) -> None:
        self.goto(line)
        if self.need_sep:
            self.emit("; ")
            self.need_sep = False
        elif self.out and self.out[-1].endswith(("{", "->")):
            self.emit(" ")

    def close_brace(self, end_line: int) -> None:
        self.goto(end_line)
        self.emit(" }" if self.out and not self.out[-1].endswith((" ", "\n", "{")) else "}")
        self.need_sep = True

    # ---- program / declarations -----------------------------------------
    def program(self, p: Program) -> None:
        for item in p.items:
            if isinstance(item, MethodDecl):
                self.method(item)
            else:
                self.statement(item)
        if p.line_count:
            self.goto(p.line_count)
            self.emit("\n")

    def method(self, m: MethodDecl) -> None:
        self.begin_statement(m.line)
        head = " ".join(m.modifiers + ((m.return_type,) if m.return_type else ())) or "def"
        self.emit(f"{head} {m.name}(")
        for k, prm in enumerate(m.params):
            if k:
                self.comma(prm.line)
            self.param(prm)
        self.emit(") {")
        self.body(m.body)
        self.close_brace(m.end_line)

    def param(self, prm: Param) -> None:
        self.goto(prm.line)
        if prm.type_name:
            self.emit(prm.type_name + " ")
        self.emit(prm.name)
        if prm.default is not None:
            self.emit(" = ")
            self.expr(prm.default)

    def body(self, stmts: tuple) -> None:
        self.depth += 1
        self.need_sep = False
        for s in stmts:
            self.statement(s)
        self.depth -= 1

    # ---- statements ----------------------------------------------------
    def statement(self, s) -> None:
        self.begin_statement(s.line)
        if isinstance(s, Assignment):
            self.assignment(s)
        elif isinstance(s, ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, Subscribe):
            self.expr(s.call)
        elif isinstance(s, If):
            self.if_stmt(s)
        elif isinstance(s, Return):
            self.emit("return")
            if s.value is not None:
                self.emit(" ")
                self.expr(s.value)
        elif isinstance(s, Jump):
            self.emit(s.kind)
        elif isinstance(s, Import):
            self.emit("import " + s.path)
        elif isinstance(s, Block):
            self.block(s)
        else:
            raise TypeError(f"not a statement: {type(s).__name__}")
        self.need_sep = True

    def assignment(self, s: Assignment) -> None:
        if s.declares:
            self.emit((s.type_name or "def") + " ")
        self.expr(s.target)
        if s.value is not None:
            self.emit(f" {s.op} ")
            self.expr(s.value)

    def if_stmt(self, s: If) -> None:
        self.emit("if (")
        self.expr(s.cond)
        self.emit(") {")
        self.body(s.then_body)
        self.close_brace(s.then_end)
        if s.else_body:
            self.goto(s.else_line)
            self.emit(" else " if not self.out[-1].endswith((" ", "\n")) else "else ")
            self.need_sep = False
            if len(s.else_body) == 1 and isinstance(s.else_body[0], If):
                inner = s.else_body[0]
                self.goto(inner.line)
                self.if_stmt(inner)
            else:
                self.emit("{")
                self.body(s.else_body)
                self.close_brace(s.end_line)

    def block(self, s: Block) -> None:
        if s.kind == "forin":
            a = s.header[0]
            self.emit("for (")
            if a.declares:
                self.emit((a.type_name or "def") + " ")
            self.expr(a.target)
            self.emit(" in ")
            self.expr(a.value)
            self.emit(") {")
            self.clause_body(s.clauses[0])
        elif s.kind == "for":
            init, cond, update = s.header
            self.emit("for (")
            if init is not None:
                self.assignment(init) if isinstance(init, Assignment) else self.expr(init.expr)
            self.emit("; ")
            if cond is not None:
                self.expr(cond)
            self.emit("; ")
            if update is not None:
                self.assignment(update) if isinstance(update, Assignment) else self.expr(update.expr)
            self.emit(") {")
            self.clause_body(s.clauses[0])
        elif s.kind == "while":
            self.emit("while (")
            self.expr(s.header[0])
            self.emit(") {")
            self.clause_body(s.clauses[0])
        elif s.kind == "do":
            self.emit("do {")
            self.clause_body(s.clauses[0])
            self.goto(s.clauses[1].line)
            self.emit(" while (")
            self.expr(s.clauses[1].exprs[0])
            self.emit(")")
        elif s.kind == "switch":
            self.emit("switch (")
            self.expr(s.header[0])
            self.emit(") {")
            self.depth += 1
            for c in s.clauses:
                self.goto(c.line)
                if self.need_sep:
                    self.emit("; ")
                elif not self.out[-1].endswith(("\n", " ")):
                    self.emit(" ")
                if c.kind == "case":
                    self.emit("case ")
                    self.expr(c.exprs[0])
                    self.emit(":")
                else:
                    self.emit("default:")
                self.need_sep = False
                for st in c.body:
                    self.statement(st)
            self.depth -= 1
            self.close_brace(s.end_line)
        elif s.kind == "try":
            self.emit("try {")
            self.clause_body(s.clauses[0])
            for c in s.clauses[1:]:
                self.goto(c.line)
                self.emit(" " + c.kind + " ")
                if c.kind == "catch":
                    self.emit("(")
                    self.param(c.exprs[0])
                    self.emit(") ")
                self.emit("{")
                self.clause_body(c)
        else:
            raise TypeError(f"unknown block kind {s.kind}")

    def clause_body(self, c) -> None:
        self.body(c.body)
        self.close_brace(c.end_line)

    # ---- expressions ---------------------------------------------------
    def comma(self, next_line: int) -> None:
        self.emit(",")
        if not (self.preserve and next_line > self.line):
            self.emit(" ")

    def args(self, args: tuple) -> None:
        for k, a in enumerate(args):
            if k:
                self.comma(a.line)
            self.expr(a)

    def expr(self, e) -> None:
        self.goto(e.line)
        if isinstance(e, Identifier):
            self.emit(e.name)
        elif isinstance(e, Literal):
            self.emit(e.text)
        elif isinstance(e, StringLiteral):
            self.string(e)
        elif isinstance(e, MethodCall):
            self.call(e)
        elif isinstance(e, PropertyAccess):
            self.expr(e.base)
            self.emit(e.op + e.member)
        elif isinstance(e, Binary):
            self.expr(e.left)
            self.emit(f" {e.op} ")
            self.expr(e.right)
        elif isinstance(e, Unary):
            if e.postfix:
                self.expr(e.operand)
                self.emit(e.op)
            else:
                spaced = e.op.isalpha() or isinstance(e.operand, Unary) and not e.operand.postfix \
                    or isinstance(e.operand, Literal) and e.operand.text[:1] in "+-"
                self.emit(e.op + (" " if spaced else ""))
                self.expr(e.operand)
        elif isinstance(e, Paren):
            self.emit("(")
            self.expr(e.expr)
            self.emit(")")
        elif isinstance(e, Ternary):
            self.expr(e.cond)
            if e.then is None:
                self.emit(" ?: ")
            else:
                self.emit(" ? ")
                self.expr(e.then)
                self.emit(" : ")
            self.expr(e.orelse)
        elif isinstance(e, NamedArg):
            self.emit((f'"{e.name}"' if e.quoted else e.name) + ": ")
            self.expr(e.value)
        elif isinstance(e, ListLiteral):
            self.emit("[")
            self.args(e.items)
            self.emit("]")
        elif isinstance(e, MapLiteral):
            self.emit("[")
            if e.entries:
                self.args(e.entries)
            else:
                self.emit(":")
            self.emit("]")
        elif isinstance(e, Index):
            self.expr(e.base)
            self.emit("[")
            self.args(e.index)
            self.emit("]")
        elif isinstance(e, Closure):
            self.closure(e)
        elif isinstance(e, New):
            self.emit(f"new {e.type_name}(")
            self.args(e.args)
            self.emit(")")
        elif isinstance(e, ReflectiveCall):
            if isinstance(e.target, Identifier):
                self.emit("$" + e.target.name)
                if e.args:
                    self.emit("(")
                    self.args(e.args)
                    self.emit(")")
            else:
                self.expr(e.target)
                self.emit("(")
                self.args(e.args)
                self.emit(")")
        else:
            raise TypeError(f"not an expression: {type(e).__name__}")

    def call(self, e: MethodCall) -> None:
        if e.receiver is not None:
            self.expr(e.receiver)
            self.emit(e.op)
        self.emit(e.name)
        args = e.args
        trailing: tuple = ()
        while args and isinstance(args[-1], Closure):
            trailing = (args[-1],) + trailing
            args = args[:-1]
        if args or not trailing:
            self.emit("(")
            self.args(args)
            self.emit(")")
        for c in trailing:
            self.emit(" ")
            self.closure(c)

    def closure(self, c: Closure) -> None:
        self.goto(c.line)
        self.emit("{")
        if c.params:
            self.emit(" " + ", ".join(c.params) + " ->")
        elif c.arrow:
            self.emit(" ->")
        if not self.preserve:
            for k, s in enumerate(c.body):
                self.emit("; " if k else " ")
                sub = Printer(preserve_lines=False)
                sub.statement(s)
                self.emit(sub.text())
            self.emit(" }")
            return
        self.body(c.body)
        self.close_brace(c.end_line)
        self.need_sep = False

    def string(self, e: StringLiteral) -> None:
        q = e.quote
        self.emit(q)
        for p in e.parts:
            if isinstance(p, Interp):
                self.emit(interp_text(p))
            else:
                self.emit(p)
        self.emit(q)


def interp_text(p: Interp) -> str:
    inner = expr_text(p.expr)
    return "${" + inner + "}" if p.braced else "$" + inner


def expr_text(e) -> str:
    """One-line rendering of an expression."""
    pr = Printer(preserve_lines=False)
    pr.expr(e)
    return pr.text()


def statement_text(s) -> str:
    """One-line rendering of a statement (compound bodies included)."""
    pr = Printer(preserve_lines=False)
    pr.statement(s)
    return pr.text()


def render(p: Program) -> str:
    """Source text for ``p`` with every node on its recorded line."""
    pr = Printer(preserve_lines=True)
    pr.program(p)
    return pr.text()
