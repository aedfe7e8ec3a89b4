"""Minimal S-expression reader used by the grammar and rule file formats.

Expressions are nested lists of symbols.  A symbol is any run of
characters other than whitespace, parentheses, double quotes and ``#``;
double-quoted symbols may contain those characters (with ``\\`` escapes
for ``"`` and ``\\``).  ``#`` starts a comment running to end of line.
"""

from dataclasses import dataclass


class SexprError(Exception):
    """Raised on malformed input, carrying a 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Symbol:
    """An atom plus the line it started on (for diagnostics)."""

    text: str
    line_no: int
    quoted: bool = False


def tokenize(text: str):
    """Yield '(' / ')' markers and Symbol atoms with line numbers."""
    i = 0
    line_no = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line_no += 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line_no
            i += 1
        elif ch == '"':
            start = line_no
            i += 1
            out = []
            while True:
                if i >= n:
                    raise SexprError("unterminated quoted symbol", start)
                c = text[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise SexprError("dangling escape", line_no)
                    out.append(text[i + 1])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    if c == "\n":
                        line_no += 1
                    out.append(c)
                    i += 1
            yield Symbol("".join(out), start, quoted=True), start
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in '()"#':
                i += 1
            yield Symbol(text[start:i], line_no), line_no


def read_all(text: str) -> list:
    """Parse every top-level expression in *text*.

    Returns a list whose elements are Symbol atoms or nested lists of
    them.  Raises SexprError on unbalanced parentheses.
    """
    stack: list[list] = []
    top: list = []
    open_lines: list[int] = []
    for token, line_no in tokenize(text):
        if token == "(":
            stack.append([])
            open_lines.append(line_no)
        elif token == ")":
            if not stack:
                raise SexprError("unbalanced ')'", line_no)
            done = stack.pop()
            open_lines.pop()
            if stack:
                stack[-1].append(done)
            else:
                top.append(done)
        else:
            if stack:
                stack[-1].append(token)
            else:
                top.append(token)
    if stack:
        raise SexprError("unclosed '('", open_lines[-1])
    return top


def quote_if_needed(word: str) -> str:
    """Render *word* as a symbol, quoting when it contains delimiters."""
    if word and not any(c.isspace() or c in '()"#' for c in word):
        return word
    escaped = word.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'
