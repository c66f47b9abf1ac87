"""Tokenizer for the SmartApp Groovy subset.

Every token keeps the whitespace and comments that precede it (``pre``), so
``"".join(t.pre + t.text for t in tokens)`` reproduces the input exactly.
String tokens additionally carry their decoded interpolation layout.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field


class LexError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


def count_lines(text: str) -> int:
    """Number of newline-delimited lines (a trailing newline does not open a new one)."""
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


@dataclass(frozen=True)
class SourceFile:
    path: str
    content: str

    @property
    def line_count(self) -> int:
        return count_lines(self.content)

    @classmethod
    def read(cls, path) -> "SourceFile":
        with open(path, encoding="utf-8") as fh:
            return cls(str(path), fh.read())


@dataclass(frozen=True)
class Slot:
    """A ``$name`` / ``${expr}`` occurrence inside a string literal."""
    source: str
    line: int
    braced: bool


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, STRING, OP, EOF
    text: str
    line: int
    col: int
    pre: str = ""
    quote: str = ""
    parts: tuple = field(default=(), compare=False)

    @property
    def nl(self) -> bool:
        """True when a line break separates this token from the previous one."""
        return "\n" in self.pre

    def __repr__(self) -> str:
        return f"Token({self.kind} {self.text!r} @{self.line})"


OPERATORS = sorted(
    """>>>= <=> === !== **= ..< ==~ >>> <<= >>= ?. *. .& .. =~ == != <= >= && || ++ --
    += -= *= /= %= &= |= ^= << >> -> ?: ** :: + - * / % = < > ! & | ^ ~ ? : . , ; ( ) [ ] { } @""".split(),
    key=len,
    reverse=True,
)

_NUMBER = re.compile(r"0[xX][0-9a-fA-F_]+[lLgG]?|\d[\d_]*(?:\.\d+)?(?:[eE][+-]?\d+)?[lLgGdDfFiI]?")
_SPACE = re.compile(r"[ \t\r\n\f]+")
# tokens after which a '/' starts a slashy string rather than a division
_OPERAND_END = {")", "]", "}"}
_KEYWORD_BEFORE_OPERAND = {"return", "in", "case", "assert", "throw"}


def _ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.line_start = 0
        self.tokens: list[Token] = []

    def col(self, pos: int | None = None) -> int:
        return (self.pos if pos is None else pos) - self.line_start + 1

    def advance_to(self, end: int) -> str:
        chunk = self.text[self.pos:end]
        nl = chunk.count("\n")
        if nl:
            self.line += nl
            self.line_start = self.pos + chunk.rindex("\n") + 1
        self.pos = end
        return chunk

    def trivia(self) -> str:
        start = self.pos
        text = self.text
        if start == 0 and text.startswith("#!"):
            end = text.find("\n")
            self.advance_to(len(text) if end < 0 else end)
        while self.pos < len(text):
            m = _SPACE.match(text, self.pos)
            if m:
                self.advance_to(m.end())
                continue
            if text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self.advance_to(len(text) if end < 0 else end)
                continue
            if text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise LexError("unterminated comment", self.line, self.col())
                self.advance_to(end + 2)
                continue
            break
        return text[start:self.pos]

    def slashy_allowed(self) -> bool:
        if not self.tokens:
            return True
        prev = self.tokens[-1]
        if prev.kind == "OP":
            return prev.text not in _OPERAND_END
        return prev.kind == "IDENT" and prev.text in _KEYWORD_BEFORE_OPERAND

    def run(self) -> list[Token]:
        text = self.text
        while True:
            pre = self.trivia()
            line, col = self.line, self.col()
            if self.pos >= len(text):
                self.tokens.append(Token("EOF", "", line, col, pre))
                return self.tokens
            ch = text[self.pos]
            if _ident_start(ch):
                end = self.pos + 1
                while end < len(text) and _ident_part(text[end]):
                    end += 1
                self.tokens.append(Token("IDENT", self.advance_to(end), line, col, pre))
            elif ch.isdigit():
                m = _NUMBER.match(text, self.pos)
                self.tokens.append(Token("NUMBER", self.advance_to(m.end()), line, col, pre))
            elif ch in "\"'":
                self.tokens.append(self.string(pre))
            elif ch == "/" and self.slashy_allowed():
                self.tokens.append(self.slashy(pre))
            else:
                for op in OPERATORS:
                    if text.startswith(op, self.pos):
                        self.tokens.append(Token("OP", self.advance_to(self.pos + len(op)), line, col, pre))
                        break
                else:
                    raise LexError(f"illegal character {ch!r}", line, col)

    def string(self, pre: str) -> Token:
        text = self.text
        line, col, start = self.line, self.col(), self.pos
        quote = text[start:start + 3] if text.startswith(('"""', "'''"), start) else text[start]
        interpolate = quote[0] == '"'
        multiline = len(quote) == 3
        i = start + len(quote)
        parts: list = []
        buf_start = i
        cur_line = line

        def flush(upto: int) -> None:
            if upto > buf_start:
                parts.append(text[buf_start:upto])

        while True:
            if i >= len(text):
                raise LexError("unterminated string", line, col)
            c = text[i]
            if text.startswith(quote, i):
                flush(i)
                end = i + len(quote)
                break
            if c == "\n":
                if not multiline:
                    raise LexError("unterminated string", line, col)
                cur_line += 1
                i += 1
            elif c == "\\":
                if i + 1 < len(text) and text[i + 1] == "\n":
                    cur_line += 1
                i += 2
            elif c == "$" and interpolate and i + 1 < len(text) and text[i + 1] == "{":
                flush(i)
                j = self._balanced(i + 2, line, col)
                src = text[i + 2:j]
                parts.append(Slot(src, cur_line, True))
                cur_line += src.count("\n")
                i = j + 1
                buf_start = i
            elif c == "$" and interpolate and i + 1 < len(text) and _ident_start(text[i + 1]) and text[i + 1] != "$":
                flush(i)
                j = i + 1
                while True:
                    while j < len(text) and _ident_part(text[j]) and text[j] != "$":
                        j += 1
                    if j + 1 < len(text) and text[j] == "." and _ident_start(text[j + 1]) and text[j + 1] != "$":
                        j += 1
                        continue
                    break
                parts.append(Slot(text[i + 1:j], cur_line, False))
                i = j
                buf_start = i
            else:
                i += 1
        lexeme = self.advance_to(end)
        return Token("STRING", lexeme, line, col, pre, quote=quote, parts=tuple(parts))

    def _balanced(self, i: int, line: int, col: int) -> int:
        """Index of the '}' closing a ``${`` whose body starts at ``i``."""
        text = self.text
        depth = 0
        while i < len(text):
            c = text[i]
            if c in "\"'":
                q = c
                i += 1
                while i < len(text) and text[i] != q:
                    if text[i] == "\n":
                        raise LexError("unterminated string", line, col)
                    i += 2 if text[i] == "\\" else 1
            elif c == "{":
                depth += 1
            elif c == "}":
                if depth == 0:
                    return i
                depth -= 1
            i += 1
        raise LexError("unterminated string", line, col)

    def slashy(self, pre: str) -> Token:
        text = self.text
        line, col, start = self.line, self.col(), self.pos
        i = start + 1
        while i < len(text) and text[i] != "/":
            if text[i] == "\n":
                raise LexError("unterminated slashy string", line, col)
            i += 2 if text[i] == "\\" else 1
        if i >= len(text):
            raise LexError("unterminated slashy string", line, col)
        lexeme = self.advance_to(i + 1)
        return Token("STRING", lexeme, line, col, pre, quote="/", parts=(lexeme[1:-1],) if len(lexeme) > 2 else ())


def tokenize(src: SourceFile | str) -> list[Token]:
    """Split source text into tokens; the last token is always EOF."""
    text = src.content if isinstance(src, SourceFile) else src
    return _Lexer(text).run()
