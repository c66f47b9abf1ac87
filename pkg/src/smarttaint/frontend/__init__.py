"""Lexer, parser and line-preserving renderer for SmartApp Groovy."""
from .lexer import LexError, SourceFile, Token, count_lines, tokenize
from .nodes import *  # noqa: F401,F403
from .parser import ParseError, parse, parse_file, parse_source
from .render import expr_text, render, statement_text

__all__ = [
    "LexError", "ParseError", "SourceFile", "Token", "count_lines", "expr_text", "parse", "parse_file",
    "parse_source", "render", "statement_text", "tokenize",
]
