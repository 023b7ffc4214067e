"""Tokenizer for MiniMod source text."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError

KEYWORDS = {
    "let", "function", "return", "if", "else", "while", "class", "new", "this",
    "true", "false", "null", "import", "export", "from", "as", "default",
}

PUNCT = [
    "==", "!=", "<=", ">=", "&&", "||",
    "(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "=",
    "+", "-", "*", "/", "<", ">", "!",
]

DIRECTIVE = "// @stub:ignore"

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


@dataclass
class Token:
    kind: str  # ident | keyword | num | str | punct | eof
    value: object
    line: int
    col: int
    offset: int
    end_line: int
    end_col: int
    end_offset: int

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def is_ident_start(c: str) -> bool:
    return c.isascii() and (c.isalpha() or c in "_$")


def is_ident_part(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c in "_$")


def is_identifier(s: str) -> bool:
    return bool(s) and is_ident_start(s[0]) and all(is_ident_part(c) for c in s[1:])


def tokenize(text: str, path: str = "<input>") -> tuple[list[Token], set[int]]:
    """Return the token list and the set of line numbers holding a stub:ignore directive."""
    tokens: list[Token] = []
    directives: set[int] = set()
    i, line, col = 0, 1, 0
    n = len(text)

    def err(msg: str) -> ParseError:
        return ParseError(msg, path, line, col)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 0
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            if j < 0:
                j = n
            comment = text[i:j].rstrip("\r")
            if comment.strip() == DIRECTIVE:
                # the directive must be the only thing on its line
                line_start = text.rfind("\n", 0, i) + 1
                if text[line_start:i].strip() == "":
                    directives.add(line)
            col += j - i
            i = j
            continue
        start, sline, scol = i, line, col
        if is_ident_start(c):
            j = i + 1
            while j < n and is_ident_part(text[j]):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            col += j - i
            i = j
            tokens.append(Token(kind, word, sline, scol, start, line, col, i))
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and is_ident_start(text[j]):
                raise err(f"malformed number {text[i:j + 1]!r}")
            value = float(text[i:j])
            col += j - i
            i = j
            tokens.append(Token("num", value, sline, scol, start, line, col, i))
            continue
        if c == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    raise err("unterminated string literal")
                ch = text[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\\":
                    if j + 1 >= n or text[j + 1] not in _ESCAPES:
                        raise err("unsupported escape sequence")
                    buf.append(_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                buf.append(ch)
                j += 1
            col += j - i
            i = j
            tokens.append(Token("str", "".join(buf), sline, scol, start, line, col, i))
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                i += len(p)
                col += len(p)
                tokens.append(Token("punct", p, sline, scol, start, line, col, i))
                break
        else:
            raise err(f"unexpected character {c!r}")
    tokens.append(Token("eof", None, line, col, n, line, col, n))
    return tokens, directives
