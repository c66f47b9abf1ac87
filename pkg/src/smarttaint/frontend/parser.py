"""Recursive-descent parser for the SmartApp Groovy subset.

Statements end at a newline or ``;``. Inside parentheses and brackets line
breaks are insignificant; inside braces (blocks and closures) they terminate
statements unless the line ends with an operator or the next line starts
with a member access.
"""
from __future__ import annotations

import dataclasses
from typing import Optional

from .lexer import SourceFile, Slot, Token, tokenize
from .nodes import (
    Assignment, Binary, Block, Clause, Closure, ExprStmt, Identifier, If, Import, Index, Interp,
    Jump, ListLiteral, Literal, MapLiteral, MethodCall, MethodDecl, NamedArg, New, Param, Paren,
    Program, PropertyAccess, ReflectiveCall, Return, StringLiteral, Subscribe, Ternary, Unary,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, expected: Optional[str] = None, found: Optional[str] = None):
        detail = message
        if expected is not None:
            detail = f"expected {expected}, found {found!r}"
            if message:
                detail = f"{message}: {detail}"
        super().__init__(f"{detail} at line {line}")
        self.line = line
        self.expected = expected
        self.found = found


MODIFIERS = {"def", "private", "public", "protected", "static", "final", "synchronized", "abstract"}
PRIMITIVES = {"int", "long", "short", "byte", "boolean", "char", "float", "double", "void"}
ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=", "**="}
WORD_OPS = {"in", "instanceof", "as"}
LITERAL_WORDS = {"true", "false", "null"}
STATEMENT_WORDS = {"if", "else", "for", "while", "do", "switch", "case", "default", "try", "catch",
                   "finally", "return", "break", "continue", "throw", "import", "assert"}
BINARY_LEVELS = [
    {"||"}, {"&&"}, {"|"}, {"^"}, {"&"},
    {"==", "!=", "<=>", "===", "!==", "=~", "==~"},
    {"<", ">", "<=", ">=", "in", "instanceof", "as"},
    {"<<", ">>", ">>>"},
    {"..", "..<"},
    {"+", "-"},
    {"*", "/", "%"},
    {"**"},
]
PREFIX_OPS = {"!", "-", "+", "~", "++", "--"}
MEMBER_OPS = {".", "?.", "*."}


def _is_type_name(text: str) -> bool:
    return text in PRIMITIVES or text[:1].isupper()


class _Parser:
    def __init__(self, tokens: list[Token]):
        if not tokens or tokens[-1].kind != "EOF":
            raise ParseError("token stream must end with EOF", tokens[-1].line if tokens else 1)
        self.toks = tokens + [tokens[-1]] * 8  # lookahead never runs off the end
        self.i = 0
        self.nl_stack = [True]

    # ---- token helpers -------------------------------------------------
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.text == text and t.kind in ("OP", "IDENT")

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise ParseError("", t.line, repr(text), t.text or "end of file")
        return self.advance()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "IDENT":
            raise ParseError("", t.line, "identifier", t.text or "end of file")
        return self.advance()

    @property
    def nl_sensitive(self) -> bool:
        return self.nl_stack[-1]

    def breaks(self, t: Token) -> bool:
        """True when ``t`` starts a new statement because of a line break."""
        return self.nl_sensitive and t.nl

    def at_stmt_end(self) -> bool:
        t = self.peek()
        return t.kind == "EOF" or t.text in (";", "}") and t.kind == "OP" or t.nl

    def skip_annotations(self) -> None:
        while self.at("@") and self.peek(1).kind == "IDENT":
            self.advance()
            self.advance()
            while self.at(".") and self.peek(1).kind == "IDENT":
                self.advance()
                self.advance()
            if self.at("(") and not self.peek().nl:
                self.skip_balanced("(", ")")

    def skip_balanced(self, open_: str, close: str) -> None:
        depth = 0
        while True:
            t = self.advance()
            if t.kind == "EOF":
                raise ParseError("", t.line, repr(close), "end of file")
            if t.text == open_:
                depth += 1
            elif t.text == close:
                depth -= 1
                if depth == 0:
                    return

    # ---- program -------------------------------------------------------
    def program(self, line_count: int) -> Program:
        items: list = []
        while True:
            while self.accept(";"):
                pass
            t = self.peek()
            if t.kind == "EOF":
                break
            if self.method_ahead():
                items.append(self.method_decl())
            else:
                items.extend(self.statement())
            self.check_stmt_end()
        return Program(items=tuple(items), line_count=line_count)

    def check_stmt_end(self) -> None:
        t = self.peek()
        if t.kind == "EOF" or t.nl or t.text in (";", "}"):
            return
        raise ParseError("", t.line, "end of statement", t.text)

    # ---- declarations --------------------------------------------------
    def type_len(self, j: int) -> int:
        """Length of a type reference starting at token ``j`` (0 if none)."""
        t = self.toks[j]
        if t.kind != "IDENT" or t.text in STATEMENT_WORDS or t.text in MODIFIERS or t.text in WORD_OPS:
            return 0
        n = 1
        while self.toks[j + n].text == "." and self.toks[j + n + 1].kind == "IDENT":
            n += 2
        if self.toks[j + n].text == "<" and not self.toks[j + n].pre:
            depth = 0
            k = j + n
            while self.toks[k].kind != "EOF":
                if self.toks[k].text == "<":
                    depth += 1
                elif self.toks[k].text == ">":
                    depth -= 1
                elif self.toks[k].text == ">>":
                    depth -= 2
                elif self.toks[k].text not in (",", ".", "?") and self.toks[k].kind != "IDENT":
                    return 0
                k += 1
                if depth <= 0:
                    break
            n = k - j
        while self.toks[j + n].text == "[" and self.toks[j + n + 1].text == "]":
            n += 2
        return n

    def method_ahead(self) -> bool:
        j = self.i
        while self.toks[j].text == "@" and self.toks[j + 1].kind == "IDENT":
            j += 2
            if self.toks[j].text == "(":
                depth = 0
                while self.toks[j].kind != "EOF":
                    depth += {"(": 1, ")": -1}.get(self.toks[j].text, 0)
                    j += 1
                    if depth == 0:
                        break
        mods = 0
        while self.toks[j].kind == "IDENT" and self.toks[j].text in MODIFIERS:
            j += 1
            mods += 1
        n = self.type_len(j)
        typed = n > 0 and self.toks[j + n].kind == "IDENT" and self.toks[j + n + 1].text == "("
        if typed:
            j += n
        elif not (mods and self.toks[j].kind == "IDENT" and self.toks[j + 1].text == "("):
            return False
        j += 1  # name
        depth = 0
        while self.toks[j].kind != "EOF":
            depth += {"(": 1, ")": -1}.get(self.toks[j].text, 0)
            j += 1
            if depth == 0:
                break
        if self.toks[j].text == "throws":
            j += 1
            while self.toks[j].kind == "IDENT" or self.toks[j].text in (",", "."):
                j += 1
        return self.toks[j].text == "{"

    def method_decl(self) -> MethodDecl:
        self.skip_annotations()
        first = self.peek()
        mods = []
        while self.peek().kind == "IDENT" and self.peek().text in MODIFIERS:
            mods.append(self.advance().text)
        ret = None
        n = self.type_len(self.i)
        if n and self.toks[self.i + n].kind == "IDENT" and self.toks[self.i + n + 1].text == "(":
            ret = "".join(t.text for t in self.toks[self.i:self.i + n])
            self.i += n
        name = self.expect_ident().text
        self.expect("(")
        self.nl_stack.append(False)
        params = []
        while not self.at(")"):
            params.append(self.param())
            if not self.accept(","):
                break
        self.expect(")")
        self.nl_stack.pop()
        if self.accept("throws"):
            while self.peek().kind == "IDENT" or self.at(",") or self.at("."):
                self.advance()
        body, end = self.brace_body()
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate parameter in {name}", first.line)
        return MethodDecl(name, tuple(params), body, tuple(mods), ret, end_line=end, line=first.line, col=first.col)

    def param(self) -> Param:
        first = self.peek()
        while self.peek().kind == "IDENT" and self.peek().text in ("final", "def"):
            self.advance()
        type_name = None
        n = self.type_len(self.i)
        if n and self.toks[self.i + n].kind == "IDENT":
            type_name = "".join(t.text for t in self.toks[self.i:self.i + n])
            self.i += n
        name = self.expect_ident().text
        default = None
        if self.accept("="):
            default = self.expression()
        return Param(name, type_name, default, line=first.line, col=first.col)

    def decl_ahead(self) -> Optional[tuple]:
        """(type tokens, declares) when a local declaration starts here."""
        j = self.i
        declares = False
        while self.toks[j].kind == "IDENT" and self.toks[j].text in MODIFIERS:
            declares = True
            j += 1
        n = self.type_len(j)
        if n and _is_type_name(self.toks[j].text) or (n and declares):
            name = self.toks[j + n]
            if name.kind == "IDENT" and name.text not in WORD_OPS and not name.nl:
                after = self.toks[j + n + 1]
                if after.text in ("=", ";", "}", ",") or after.kind == "EOF" or after.nl:
                    return (j, n)
        if declares and self.toks[j].kind == "IDENT" and self.toks[j].text not in WORD_OPS:
            return (j, 0)
        return None

    def declaration(self, start: int, n: int) -> tuple:
        first = self.peek()
        self.i = start
        type_name = "".join(t.text for t in self.toks[self.i:self.i + n]) or None
        self.i += n
        out = []
        while True:
            name_tok = self.expect_ident()
            value = None
            if self.accept("="):
                value = self.expression()
            line, col = (first.line, first.col) if not out else (name_tok.line, name_tok.col)
            out.append(Assignment(Identifier(name_tok.text, line=name_tok.line, col=name_tok.col), value,
                                  "=", True, type_name, line=line, col=col))
            if not (self.at(",") and not self.peek().nl):
                break
            self.advance()
        return tuple(out)

    # ---- statements ----------------------------------------------------
    def statement(self) -> tuple:
        self.skip_annotations()
        t = self.peek()
        if t.kind == "IDENT":
            kw = t.text
            if kw == "if":
                return (self.if_stmt(),)
            if kw == "for":
                return (self.for_stmt(),)
            if kw == "while":
                return (self.while_stmt(),)
            if kw == "do":
                return (self.do_stmt(),)
            if kw == "switch":
                return (self.switch_stmt(),)
            if kw == "try":
                return (self.try_stmt(),)
            if kw == "return":
                self.advance()
                value = None if self.at_stmt_end() else self.expression()
                return (Return(value, line=t.line, col=t.col),)
            if kw in ("break", "continue"):
                self.advance()
                if self.peek().kind == "IDENT" and not self.peek().nl:
                    self.advance()  # label
                return (Jump(kw, line=t.line, col=t.col),)
            if kw == "throw":
                self.advance()
                return (ExprStmt(Unary("throw", self.expression(), line=t.line, col=t.col), line=t.line, col=t.col),)
            if kw == "import":
                self.advance()
                parts = []
                while not self.at_stmt_end() or not parts:
                    parts.append(self.advance().text)
                    if self.peek().kind == "EOF":
                        break
                return (Import("".join(parts), line=t.line, col=t.col),)
            if kw in ("else", "case", "default", "catch", "finally"):
                raise ParseError("", t.line, "statement", kw)
            if self.peek(1).text == ":" and self.peek(1).kind == "OP" and kw not in LITERAL_WORDS:
                self.advance()
                self.advance()  # statement label
                return self.statement()
            decl = self.decl_ahead()
            if decl is not None:
                return self.declaration(*decl)
        return (self.expression_statement(),)

    def expression_statement(self):
        first = self.peek()
        expr = self.expression(command=True)
        t = self.peek()
        if t.kind == "OP" and t.text in ASSIGN_OPS and not self.breaks(t):
            if not isinstance(expr, (Identifier, PropertyAccess, Index)):
                raise ParseError("invalid assignment target", t.line)
            self.advance()
            value = self.expression()
            return Assignment(expr, value, t.text, False, None, line=first.line, col=first.col)
        if isinstance(expr, MethodCall) and expr.receiver is None and expr.name == "subscribe":
            if sum(1 for a in expr.args if not isinstance(a, NamedArg)) >= 2:
                return Subscribe(expr, line=expr.line, col=expr.col)
        return ExprStmt(expr, line=first.line, col=first.col)

    def brace_body(self) -> tuple:
        """Parse ``{ statements }``; returns (statements, closing line)."""
        self.expect("{")
        return self.statements_until_close()

    def branch_body(self) -> tuple:
        if self.at("{"):
            return self.brace_body()
        self.nl_stack.append(True)
        stmts = self.statement()
        self.nl_stack.pop()
        return stmts, self.toks[self.i - 1].line

    def paren_expr(self):
        self.expect("(")
        self.nl_stack.append(False)
        e = self.expression()
        self.nl_stack.pop()
        self.expect(")")
        return e

    def if_stmt(self) -> If:
        t = self.advance()
        cond = self.paren_expr()
        then_body, then_end = self.branch_body()
        else_body: tuple = ()
        else_line = 0
        end = then_end
        j = self.i
        while self.toks[j].text == ";":
            j += 1
        if self.toks[j].text == "else" and self.toks[j].kind == "IDENT":
            self.i = j
            else_line = self.advance().line
            if self.at("if"):
                inner = self.if_stmt()
                else_body, end = (inner,), inner.end_line
            else:
                else_body, end = self.branch_body()
        return If(cond, then_body, else_body, then_end=then_end, else_line=else_line, end_line=end,
                  line=t.line, col=t.col)

    def for_stmt(self) -> Block:
        t = self.advance()
        self.expect("(")
        self.nl_stack.append(False)
        j = self.i
        declares = False
        while self.toks[j].kind == "IDENT" and self.toks[j].text in ("def", "final"):
            declares = True
            j += 1
        n = self.type_len(j)
        var_at = None
        if self.toks[j].kind == "IDENT" and self.toks[j + 1].text in ("in", ":"):
            var_at = j
        elif n and self.toks[j + n].kind == "IDENT" and self.toks[j + n + 1].text in ("in", ":"):
            var_at, declares = j + n, True
        if var_at is not None:
            first = self.peek()
            type_name = "".join(x.text for x in self.toks[j:var_at]) or None
            self.i = var_at
            var = self.advance()
            self.advance()  # in / :
            iterable = self.expression()
            header = (Assignment(Identifier(var.text, line=var.line, col=var.col), iterable, "in", declares,
                                 type_name, line=first.line, col=first.col),)
            kind = "forin"
        else:
            init = cond = update = None
            if not self.at(";"):
                decl = self.decl_ahead()
                init = self.declaration(*decl)[0] if decl else self.expression_statement()
            self.expect(";")
            if not self.at(";"):
                cond = self.expression()
            self.expect(";")
            if not self.at(")"):
                update = self.expression_statement()
            header = (init, cond, update)
            kind = "for"
        self.nl_stack.pop()
        self.expect(")")
        line = self.peek().line
        body, end = self.branch_body()
        return Block(kind, header, (Clause("body", (), body, end_line=end, line=line),), end_line=end,
                     line=t.line, col=t.col)

    def while_stmt(self) -> Block:
        t = self.advance()
        cond = self.paren_expr()
        line = self.peek().line
        body, end = self.branch_body()
        return Block("while", (cond,), (Clause("body", (), body, end_line=end, line=line),), end_line=end,
                     line=t.line, col=t.col)

    def do_stmt(self) -> Block:
        t = self.advance()
        line = self.peek().line
        body, end = self.branch_body()
        w = self.expect("while")
        cond = self.paren_expr()
        clauses = (Clause("body", (), body, end_line=end, line=line),
                   Clause("while", (cond,), (), end_line=w.line, line=w.line))
        return Block("do", (), clauses, end_line=self.toks[self.i - 1].line, line=t.line, col=t.col)

    def switch_stmt(self) -> Block:
        t = self.advance()
        subject = self.paren_expr()
        self.expect("{")
        self.nl_stack.append(True)
        clauses = []
        while not self.at("}"):
            c = self.peek()
            if c.kind == "EOF":
                raise ParseError("", c.line, "'}'", "end of file")
            if self.accept("case"):
                self.nl_stack.append(False)
                exprs = (self.expression(),)
                self.nl_stack.pop()
            elif self.accept("default"):
                exprs = ()
            else:
                raise ParseError("", c.line, "'case' or 'default'", c.text)
            self.expect(":")
            body = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                if self.accept(";"):
                    continue
                if self.peek().kind == "EOF":
                    raise ParseError("", self.peek().line, "'}'", "end of file")
                body.extend(self.statement())
                self.check_stmt_end()
            end = self.toks[self.i - 1].line
            clauses.append(Clause(c.text, exprs, tuple(body), end_line=end, line=c.line, col=c.col))
        self.nl_stack.pop()
        close = self.expect("}")
        return Block("switch", (subject,), tuple(clauses), end_line=close.line, line=t.line, col=t.col)

    def try_stmt(self) -> Block:
        t = self.advance()
        line = self.peek().line
        body, end = self.brace_body()
        clauses = [Clause("body", (), body, end_line=end, line=line)]
        while self.at("catch") or self.at("finally"):
            c = self.advance()
            exprs: tuple = ()
            if c.text == "catch":
                self.expect("(")
                self.nl_stack.append(False)
                p = self.param()
                while self.accept("|"):
                    self.param()
                self.nl_stack.pop()
                self.expect(")")
                exprs = (p,)
            body, end = self.brace_body()
            clauses.append(Clause(c.text, exprs, body, end_line=end, line=c.line, col=c.col))
        return Block("try", (), tuple(clauses), end_line=end, line=t.line, col=t.col)

    # ---- expressions ---------------------------------------------------
    def expression(self, command: bool = False):
        return self.ternary(command)

    def ternary(self, command: bool = False):
        cond = self.binary(0, command)
        t = self.peek()
        if t.kind == "OP" and t.text == "?" and not self.breaks(t):
            self.advance()
            then = self.ternary()
            self.expect(":")
            return Ternary(cond, then, self.ternary(), line=cond.line, col=cond.col)
        if t.kind == "OP" and t.text == "?:" and not self.breaks(t):
            self.advance()
            return Ternary(cond, None, self.ternary(), line=cond.line, col=cond.col)
        return cond

    def binary(self, level: int, command: bool = False):
        if level == len(BINARY_LEVELS):
            return self.unary(command)
        ops = BINARY_LEVELS[level]
        left = self.binary(level + 1, command)
        while True:
            t = self.peek()
            is_op = (t.kind == "OP" and t.text in ops) or (t.kind == "IDENT" and t.text in ops and t.text in WORD_OPS)
            if not is_op or self.breaks(t):
                return left
            self.advance()
            if t.text in ("as", "instanceof"):
                n = self.type_len(self.i)
                if not n:
                    raise ParseError("", self.peek().line, "type name", self.peek().text)
                tt = self.peek()
                right = Identifier("".join(x.text for x in self.toks[self.i:self.i + n]), line=tt.line, col=tt.col)
                self.i += n
            else:
                right = self.binary(level + 1)
            left = Binary(left, t.text, right, line=left.line, col=left.col)

    def unary(self, command: bool = False):
        t = self.peek()
        if t.kind == "OP" and t.text in PREFIX_OPS:
            self.advance()
            return Unary(t.text, self.unary(), line=t.line, col=t.col)
        return self.postfix(self.primary(), command)

    def args_until(self, close: str) -> tuple:
        """Comma-separated arguments (named or positional) up to ``close``."""
        self.nl_stack.append(False)
        args = []
        while not self.at(close):
            args.append(self.argument())
            if not self.accept(","):
                break
        self.nl_stack.pop()
        self.expect(close)
        return tuple(args)

    def named_ahead(self) -> bool:
        t, nxt = self.peek(), self.peek(1)
        return t.kind in ("IDENT", "STRING", "NUMBER") and nxt.kind == "OP" and nxt.text == ":"

    def argument(self):
        if self.named_ahead():
            k = self.advance()
            self.advance()
            name = k.text
            quoted = k.kind == "STRING"
            if quoted:
                name = k.text[len(k.quote):-len(k.quote)]
            return NamedArg(name, self.expression(), quoted, line=k.line, col=k.col)
        return self.expression()

    def call_tail(self, receiver, name: str, op: str, line: int, col: int):
        """After a method name: ``(args)`` and/or trailing closures."""
        args: tuple = ()
        if self.at("(") and not self.peek().nl:
            self.advance()
            args = self.args_until(")")
        while self.at("{") and not self.peek().nl:
            args = args + (self.closure(),)
        return MethodCall(receiver, name, args, op, line=line, col=col)

    def command_ahead(self) -> bool:
        t = self.peek()
        if t.nl or t.kind == "EOF":
            return False
        if t.kind in ("STRING", "NUMBER"):
            return True
        return t.kind == "IDENT" and t.text not in WORD_OPS and t.text not in STATEMENT_WORDS

    def postfix(self, expr, command: bool = False):
        while True:
            t = self.peek()
            if t.kind == "OP" and t.text in MEMBER_OPS:
                self.advance()
                m = self.peek()
                if m.kind != "IDENT":
                    raise ParseError("", m.line, "member name", m.text or "end of file")
                self.advance()
                if (self.at("(") or self.at("{")) and not self.peek().nl:
                    expr = self.call_tail(expr, m.text, t.text, expr.line, expr.col)
                else:
                    expr = PropertyAccess(expr, m.text, t.text, line=expr.line, col=expr.col)
            elif t.text == "(" and t.kind == "OP" and not t.nl:
                if isinstance(expr, Identifier):
                    expr = self.call_tail(None, expr.name, ".", expr.line, expr.col)
                elif isinstance(expr, StringLiteral):
                    self.advance()
                    expr = ReflectiveCall(expr, self.args_until(")"), line=expr.line, col=expr.col)
                else:
                    expr = self.call_tail(expr, "call", ".", expr.line, expr.col)
            elif t.text == "{" and t.kind == "OP" and not t.nl and isinstance(expr, Identifier):
                expr = self.call_tail(None, expr.name, ".", expr.line, expr.col)
            elif t.text == "[" and t.kind == "OP" and not t.nl:
                self.advance()
                expr = Index(expr, self.args_until("]"), line=expr.line, col=expr.col)
            elif t.text in ("++", "--") and t.kind == "OP" and not t.nl:
                self.advance()
                expr = Unary(t.text, expr, True, line=expr.line, col=expr.col)
            elif command and isinstance(expr, (Identifier, PropertyAccess)) and self.command_ahead():
                args = [self.argument()]
                while self.at(","):
                    self.advance()
                    args.append(self.argument())
                if isinstance(expr, Identifier):
                    expr = MethodCall(None, expr.name, tuple(args), ".", line=expr.line, col=expr.col)
                else:
                    expr = MethodCall(expr.base, expr.member, tuple(args), expr.op, line=expr.line, col=expr.col)
                return expr
            else:
                return expr
            command = command and isinstance(expr, (Identifier, PropertyAccess))

    def primary(self):
        t = self.peek()
        if t.kind == "IDENT":
            self.advance()
            if t.text in LITERAL_WORDS:
                return Literal(t.text, line=t.line, col=t.col)
            if t.text == "new":
                return self.new_expr(t)
            if t.text.startswith("$") and len(t.text) > 1:
                target = Identifier(t.text[1:], line=t.line, col=t.col + 1)
                args: tuple = ()
                if self.at("(") and not self.peek().nl:
                    self.advance()
                    args = self.args_until(")")
                return ReflectiveCall(target, args, line=t.line, col=t.col)
            if t.text in STATEMENT_WORDS and t.text not in ("assert",):
                raise ParseError("", t.line, "expression", t.text)
            return Identifier(t.text, line=t.line, col=t.col)
        if t.kind == "NUMBER":
            self.advance()
            return Literal(t.text, line=t.line, col=t.col)
        if t.kind == "STRING":
            self.advance()
            return self.string(t)
        if t.kind == "OP":
            if t.text == "(":
                self.advance()
                self.nl_stack.append(False)
                e = self.expression()
                self.nl_stack.pop()
                self.expect(")")
                return Paren(e, line=t.line, col=t.col)
            if t.text == "[":
                return self.list_or_map()
            if t.text == "{":
                return self.closure()
        raise ParseError("", t.line, "expression", t.text or "end of file")

    def new_expr(self, t: Token) -> New:
        n = self.type_len(self.i)
        if not n:
            raise ParseError("", self.peek().line, "type name", self.peek().text)
        name = "".join(x.text for x in self.toks[self.i:self.i + n])
        self.i += n
        args: tuple = ()
        if self.at("(") and not self.peek().nl:
            self.advance()
            args = self.args_until(")")
        return New(name, args, line=t.line, col=t.col)

    def list_or_map(self):
        t = self.expect("[")
        if self.at(":") and self.peek(1).text == "]":
            self.advance()
            self.advance()
            return MapLiteral((), line=t.line, col=t.col)
        if self.named_ahead():
            return MapLiteral(self.args_until("]"), line=t.line, col=t.col)
        return ListLiteral(self.args_until("]"), line=t.line, col=t.col)

    def closure(self) -> Closure:
        t = self.expect("{")
        params: list = []
        arrow = False
        j = self.i
        if self.toks[j].text == "->":
            arrow, self.i = True, j + 1
        else:
            names = []
            while self.toks[j].kind == "IDENT":
                n = self.type_len(j)
                if n and self.toks[j + n].kind == "IDENT":
                    j += n
                names.append(self.toks[j].text)
                j += 1
                if self.toks[j].text == "->":
                    arrow, params, self.i = True, names, j + 1
                    break
                if self.toks[j].text != ",":
                    break
                j += 1
        body, end = self.statements_until_close()
        return Closure(tuple(params), body, arrow, end_line=end, line=t.line, col=t.col)

    def statements_until_close(self) -> tuple:
        """Statements up to and including the closing ``}``; returns (statements, closing line)."""
        self.nl_stack.append(True)
        body = []
        while True:
            while self.accept(";"):
                pass
            t = self.peek()
            if t.text == "}" and t.kind == "OP":
                break
            if t.kind == "EOF":
                raise ParseError("", t.line, "'}'", "end of file")
            body.extend(self.statement())
            self.check_stmt_end()
        self.nl_stack.pop()
        end = self.expect("}")
        return tuple(body), end.line

    def string(self, t: Token) -> StringLiteral:
        if t.quote == "/":
            return StringLiteral("/", tuple(t.parts), line=t.line, col=t.col)
        parts = []
        for p in t.parts:
            if isinstance(p, Slot):
                parts.append(Interp(_slot_expr(p), p.braced, line=p.line))
            else:
                parts.append(p)
        return StringLiteral(t.quote, tuple(parts), line=t.line, col=t.col)


def _slot_expr(slot: Slot):
    if not slot.braced:
        names = slot.source.split(".")
        expr = Identifier(names[0], line=slot.line)
        for n in names[1:]:
            expr = PropertyAccess(expr, n, line=slot.line)
        return expr
    if not slot.source.strip():
        return Literal("", line=slot.line)
    offset = slot.line - 1
    toks = [dataclasses.replace(t, line=t.line + offset) for t in tokenize(slot.source)]
    p = _Parser(toks)
    p.nl_stack = [False]
    expr = p.expression()
    if p.peek().kind != "EOF":
        raise ParseError("in string interpolation", p.peek().line, "'}'", p.peek().text)
    return expr


def _line_count(tokens: list[Token]) -> int:
    eof = tokens[-1]
    if len(tokens) == 1 and not eof.pre:
        return 0
    return eof.line - 1 if eof.pre.endswith("\n") else eof.line


def parse(tokens: list[Token]) -> Program:
    """Build a Program from a token list produced by ``tokenize``."""
    return _Parser(tokens).program(_line_count(tokens))


def parse_source(src) -> Program:
    """Tokenize and parse text or a SourceFile."""
    return parse(tokenize(src))


def parse_file(path) -> Program:
    return parse_source(SourceFile.read(path))
