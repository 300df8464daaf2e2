"""Shared plumbing for the line-oriented text documents.

Every document starts with a version header (``ontology-v1``, ``fsf-stream-v1``,
``scenario-v1``, ``engine-v1``). Parsers collect line-numbered diagnostics and
raise a single :class:`DocumentError` carrying all of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

HEADERS = ("ontology-v1", "fsf-stream-v1", "scenario-v1", "engine-v1")


@dataclass(frozen=True)
class Diagnostic:
    line: int | None
    message: str

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


class DocumentError(ValueError):
    def __init__(self, diagnostics: Iterable[Diagnostic] | str, line: int | None = None):
        if isinstance(diagnostics, str):
            diagnostics = [Diagnostic(line, diagnostics)]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def content_lines(text: str) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, stripped_line)`` skipping blanks and comment lines.

    Only whole-line comments are recognised; ``#`` inside a value (``building#12``)
    is ordinary text.
    """
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def detect_header(text: str) -> str:
    for _, line in content_lines(text):
        if line in HEADERS:
            return line
        break
    raise DocumentError("unrecognized document type", line=1)


def expect_header(text: str, header: str) -> Iterator[tuple[int, str]]:
    lines = content_lines(text)
    first = next(lines, None)
    if first is None or first[1] != header:
        found = "empty document" if first is None else repr(first[1])
        raise DocumentError(f"expected header {header!r}, found {found}", line=first[0] if first else 1)
    return lines
