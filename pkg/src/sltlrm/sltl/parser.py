"""Recursive-descent parser for the formula text syntax.

Precedence, loosest first::

    ;   then   (left-assoc)
    |   or
    &   and
    U   until  (right-assoc)
    !  X  F    unary
    true  false  identifiers  ( ... )
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    FALSE,
    TRUE,
    And,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    Then,
    Until,
    normalize,
)

_PUNCT = {"(": "(", ")": ")", ";": ";", "|": "|", "&": "&", "!": "!"}
_KEYWORDS = {"true", "false", "U", "X", "F"}


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset[str]):
        self.line = line
        self.column = column
        self.expected = expected
        exp = ", ".join(sorted(expected))
        super().__init__(f"{line}:{column}: {message} (expected one of: {exp})")


@dataclass(frozen=True)
class _Tok:
    kind: str  # punctuation char, keyword, "ident" or "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            toks.append(_Tok(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "ident"
            toks.append(_Tok(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise FormulaSyntaxError(
            f"unexpected character {ch!r}",
            line,
            col,
            frozenset({"identifier", "true", "false", "(", "!", "X", "F"}),
        )
    toks.append(_Tok("eof", "", line, col))
    return toks


_ATOM_START = frozenset({"identifier", "true", "false", "(", "!", "X", "F"})


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected) -> FormulaSyntaxError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return FormulaSyntaxError(f"unexpected {found}", tok.line, tok.col, frozenset(expected))

    def parse(self) -> Formula:
        f = self.then_expr()
        if self.tok.kind != "eof":
            raise self.fail({";", "|", "&", "U", "end of input"})
        return f

    def then_expr(self) -> Formula:
        f = self.or_expr()
        while self.tok.kind == ";":
            self.advance()
            f = Then(f, self.or_expr())
        return f

    def or_expr(self) -> Formula:
        ops = [self.and_expr()]
        while self.tok.kind == "|":
            self.advance()
            ops.append(self.and_expr())
        return ops[0] if len(ops) == 1 else Or(ops)

    def and_expr(self) -> Formula:
        ops = [self.until_expr()]
        while self.tok.kind == "&":
            self.advance()
            ops.append(self.until_expr())
        return ops[0] if len(ops) == 1 else And(ops)

    def until_expr(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "U":
            self.advance()
            return Until(left, self.until_expr())
        return left

    def unary(self) -> Formula:
        kind = self.tok.kind
        if kind == "!":
            self.advance()
            return Not(self.unary())
        if kind == "X":
            self.advance()
            return Next(self.unary())
        if kind == "F":
            self.advance()
            return Eventually(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.tok
        if tok.kind == "true":
            self.advance()
            return TRUE
        if tok.kind == "false":
            self.advance()
            return FALSE
        if tok.kind == "ident":
            self.advance()
            return Prop(tok.text)
        if tok.kind == "(":
            self.advance()
            f = self.then_expr()
            if self.tok.kind != ")":
                raise self.fail({")", ";", "|", "&", "U"})
            self.advance()
            return f
        raise self.fail(_ATOM_START)


def parse_raw(text: str) -> Formula:
    """Parse without normalizing (keeps the tree exactly as written)."""
    return _Parser(text).parse()


def parse(text: str) -> Formula:
    """Parse ``text`` into a normalized formula.

    Raises FormulaSyntaxError carrying line, column and the set of tokens
    that would have been accepted at the failure point.
    """
    return normalize(parse_raw(text))
