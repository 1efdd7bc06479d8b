"""Tokenizer shared by the product-spec and product-line-definition parsers.

Keywords are case-sensitive uppercase words and each lexes as its own token
kind; every other word matching [A-Za-z][A-Za-z0-9_]* is an IDENT. Numbers
are optionally signed decimals. // starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

IDENT = "IDENT"
NUMBER = "NUMBER"
EOF = "end of input"

SPEC_KEYWORDS = frozenset({
    "CREATE", "ENTITY", "MAP", "GIS", "LAYER", "AS", "FOR", "WITH",
    "FEATURES", "LAYERS", "STYLES", "CENTER",
    "IDENTIFIER", "DISPLAY_STRING", "REQUIRED",
    "RELATIONSHIP", "MAPPED_BY", "BIDIRECTIONAL",
    "DEFAULT", "IS_BASE_LAYER", "DEFAULT_BASE_LAYER",
})

DEFINITION_KEYWORDS = frozenset({
    "VIEWPOINT", "FEATUREMODEL", "LOCAL", "APPLIED", "TO", "DEFAULTS",
    "MANDATORY", "OPTIONAL", "XOR", "OR", "ABSTRACT",
    "REQUIRES", "EXCLUDES",
})

_PUNCT = ("..", "(", ")", "[", "]", "{", "}", ",", ";", ".", "*")

_WORD_START = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz")
_WORD_CHARS = _WORD_START | frozenset("0123456789_")
_DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int
    end: int


def tokenize(source: str, keywords: frozenset[str]) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)

    while pos < n:
        ch = source[pos]
        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch in " \t\r":
            pos += 1
            continue
        if source.startswith("//", pos):
            nl = source.find("\n", pos)
            pos = n if nl < 0 else nl
            continue

        col = pos - line_start + 1
        if ch in _WORD_START:
            end = pos + 1
            while end < n and source[end] in _WORD_CHARS:
                end += 1
            text = source[pos:end]
            kind = text if text in keywords else IDENT
            tokens.append(Token(kind, text, line, col, pos, end))
            pos = end
            continue
        if ch in _DIGITS or (ch == "-" and pos + 1 < n and source[pos + 1] in _DIGITS):
            end = pos + 1
            while end < n and source[end] in _DIGITS:
                end += 1
            # a fraction needs a digit after the dot; "1..2" is 1 .. 2
            if end + 1 < n and source[end] == "." and source[end + 1] in _DIGITS:
                end += 2
                while end < n and source[end] in _DIGITS:
                    end += 1
            tokens.append(Token(NUMBER, source[pos:end], line, col, pos, end))
            pos = end
            continue
        for punct in _PUNCT:
            if source.startswith(punct, pos):
                tokens.append(Token(punct, punct, line, col, pos, pos + len(punct)))
                pos += len(punct)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)

    tokens.append(Token(EOF, "", line, n - line_start + 1, n, n))
    return tokens


class TokenStream:
    """Cursor over a token list, with positioned errors on mismatch."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._index = 0

    @property
    def current(self) -> Token:
        return self._tokens[self._index]

    def at(self, *kinds: str) -> bool:
        return self._tokens[self._index].kind in kinds

    def advance(self) -> Token:
        tok = self._tokens[self._index]
        if tok.kind is not EOF:
            self._index += 1
        return tok

    def match(self, kind: str) -> Token | None:
        if self._tokens[self._index].kind == kind:
            return self.advance()
        return None

    def expect(self, *kinds: str) -> Token:
        tok = self._tokens[self._index]
        if tok.kind in kinds:
            return self.advance()
        return self.fail(*kinds)

    def fail(self, *expected: str) -> Token:
        tok = self._tokens[self._index]
        shown = tok.kind if tok.kind == EOF else f"{tok.text!r}"
        raise ParseError(f"unexpected {shown}", tok.line, tok.column,
                         expected=tuple(expected))
