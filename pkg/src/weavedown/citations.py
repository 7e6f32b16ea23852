"""Bibliography subset: @type{key, field = {...}} entries and [@key] markers.

Inline markers become "(Surname Year)" and a References section is
appended listing cited entries in first-citation order. Unresolved keys
are left verbatim and reported as warnings (errors under --strict).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BibParseError, IoError, Warnings
from .nodes import (
    Block, Heading, Paragraph, Text, inline_lists, walk_blocks, walk_inlines,
)

CITE_RE = re.compile(r"\[@(?P<key>[A-Za-z0-9][A-Za-z0-9_:.-]*)\]")


@dataclass
class BibEntry:
    key: str
    kind: str  # article, book, misc, ...
    fields: dict[str, str]

    def surname(self) -> str:
        author = self.fields.get("author", "").strip()
        if not author:
            return self.key
        first = author.split(" and ")[0].strip()
        if "," in first:
            return first.split(",")[0].strip()
        parts = first.split()
        return parts[-1] if parts else self.key

    def year(self) -> str:
        return self.fields.get("year", "n.d.").strip() or "n.d."

    def title(self) -> str:
        return self.fields.get("title", "").strip()

    def inline_text(self) -> str:
        return f"({self.surname()} {self.year()})"

    def reference_text(self) -> str:
        text = f"{self.surname()} {self.year()}."
        if self.title():
            text += f" {self.title()}."
        return text


def parse_bib_text(text: str) -> dict[str, BibEntry]:
    """Parse the supported bibliography subset; raises BibParseError."""
    entries: dict[str, BibEntry] = {}
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "%":  # comment to end of line
            i = text.find("\n", i)
            i = n if i < 0 else i + 1
            continue
        if c != "@":
            if not c.isspace():
                raise BibParseError(f"unexpected character {c!r} outside an entry")
            i += 1
            continue
        entry, i = _parse_entry(text, i)
        if entry.key in entries:
            raise BibParseError(f"duplicate entry key {entry.key!r}")
        entries[entry.key] = entry
    return entries


def _parse_entry(text: str, i: int) -> tuple[BibEntry, int]:
    brace = text.find("{", i)
    if brace < 0:
        raise BibParseError("entry lacks an opening brace")
    kind = text[i + 1 : brace].strip().lower()
    if not kind:
        raise BibParseError("entry lacks a type")
    comma = text.find(",", brace)
    if comma < 0:
        raise BibParseError(f"@{kind} entry lacks a key")
    key = text[brace + 1 : comma].strip()
    if not key:
        raise BibParseError(f"@{kind} entry has an empty key")
    fields: dict[str, str] = {}
    i = comma + 1
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            raise BibParseError(f"entry {key!r} is not closed")
        if text[i] == "}":
            return BibEntry(key, kind, fields), i + 1
        if text[i] == ",":
            i += 1
            continue
        name, value, i = _parse_field(text, i, key)
        fields[name.lower()] = value


def _parse_field(text: str, i: int, key: str) -> tuple[str, str, int]:
    eq = text.find("=", i)
    if eq < 0:
        raise BibParseError(f"field without '=' in entry {key!r}")
    name = text[i:eq].strip()
    if not re.match(r"^[A-Za-z][A-Za-z0-9_-]*$", name):
        raise BibParseError(f"bad field name {name!r} in entry {key!r}")
    i = eq + 1
    while i < len(text) and text[i].isspace():
        i += 1
    if i >= len(text):
        raise BibParseError(f"field {name!r} in entry {key!r} has no value")
    if text[i] == "{":
        depth = 0
        j = i
        while j < len(text):
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
                if depth == 0:
                    return name, text[i + 1 : j].strip(), j + 1
            j += 1
        raise BibParseError(f"unbalanced braces in field {name!r} of {key!r}")
    if text[i] == '"':
        j = text.find('"', i + 1)
        if j < 0:
            raise BibParseError(f"unterminated string in field {name!r} of {key!r}")
        return name, text[i + 1 : j].strip(), j + 1
    # bare value (typically a year) up to comma or closing brace
    j = i
    while j < len(text) and text[j] not in ",}":
        j += 1
    value = text[i:j].strip()
    if not value:
        raise BibParseError(f"field {name!r} in entry {key!r} has no value")
    return name, value, j


def load_bibliography(path: str) -> dict[str, BibEntry]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise IoError(path, str(err)) from None
    return parse_bib_text(text)


def process_citations(
    blocks: list[Block],
    entries: dict[str, BibEntry],
    warnings: Warnings | None = None,
) -> list[BibEntry]:
    """Rewrite [@key] markers in place; returns cited entries in first-use
    order. Unknown keys stay verbatim and produce an UnresolvedCitation
    warning."""
    cited: list[BibEntry] = []
    seen: set[str] = set()

    def replace(match: re.Match) -> str:
        key = match.group("key")
        entry = entries.get(key)
        if entry is None:
            if warnings is not None:
                warnings.warn("UnresolvedCitation",
                              f"citation key {key!r} not found in bibliography")
            return match.group(0)
        if key not in seen:
            seen.add(key)
            cited.append(entry)
        return entry.inline_text()

    for block in walk_blocks(blocks):
        for inlines in inline_lists(block):
            for node in walk_inlines(inlines):
                if isinstance(node, Text) and "[@" in node.text:
                    node.text = CITE_RE.sub(replace, node.text)
    return cited


def references_blocks(cited: list[BibEntry]) -> list[Block]:
    if not cited:
        return []
    blocks: list[Block] = [Heading(1, [Text("References")], attrs=["references"])]
    for entry in cited:
        blocks.append(Paragraph([Text(entry.reference_text())]))
    return blocks
