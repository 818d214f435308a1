"""Tokenizer shared by program text and probability assertions. Comments run from '#' to the end of the line."""
import re
from dataclasses import dataclass

from .exceptions import LexicalError

KEYWORDS = frozenset({
    'var', 'bit', 'qbit', 'qunit', 'skip', 'new', 'discard', 'if', 'then', 'else', 'fi',
    'measure', 'case', 'while', 'do', 'od',
})

TOKEN_SPEC = [
    ('WS', r"[ \t\r]+"),
    ('NEWLINE', r"\n"),
    ('COMMENT', r"#[^\n]*"),
    ('ASSIGN', r":="),
    ('APPLY', r"\*="),
    ('COMPARE', r"<=|>="),
    ('REAL', r"[0-9]+\.[0-9]*(?:[eE][-+]?[0-9]+)?|\.[0-9]+(?:[eE][-+]?[0-9]+)?|[0-9]+[eE][-+]?[0-9]+"),
    ('INT', r"[0-9]+"),
    ('IDENT', r"[A-Za-z_][A-Za-z0-9_']*"),
    ('PUNCT', r"[;:,()\[\]{}=&+]"),
]
TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    @property
    def pos(self):
        return self.line, self.column

    def is_(self, text):
        return self.kind in ('KEYWORD', 'PUNCT', 'ASSIGN', 'APPLY', 'COMPARE') and self.text == text


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, index = 1, 0, 0
    while index < len(text):
        match = TOKEN_RE.match(text, index)
        if match is None:
            raise LexicalError(f"unexpected character {text[index]!r}", line, index - line_start + 1)
        kind, value = match.lastgroup, match.group()
        column = index - line_start + 1
        if kind == 'NEWLINE':
            line += 1
            line_start = match.end()
        elif kind == 'IDENT' and value in KEYWORDS:
            tokens.append(Token('KEYWORD', value, line, column))
        elif kind not in ('WS', 'COMMENT'):
            tokens.append(Token(kind, value, line, column))
        index = match.end()
    tokens.append(Token('EOF', '', line, index - line_start + 1))
    return tokens
