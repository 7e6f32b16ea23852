"""Chunk option headers: ```{lang name, key=value, ...} parsing and merge.

Three layers resolve into the options a chunk runs with: built-in defaults,
the document's global layer (set by a globals=TRUE chunk, replaced wholesale
by the next one), and the chunk's own header.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import BadValue, DuplicateKey, UnknownLanguage, UnknownOption

RESULTS_MODES = ("markup", "hide")

BOOL_KEYS = frozenset({
    "echo", "include", "message", "warning", "error", "defer_output", "globals",
})
NUMBER_KEYS = frozenset({"fig_width", "fig_height"})
KNOWN_KEYS = BOOL_KEYS | NUMBER_KEYS | {"results"}

_KEY_RE = re.compile(r"^[A-Za-z][A-Za-z0-9._]*$")
_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")
_NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?$")


@dataclass
class ChunkOptions:
    lang: str
    name: str | None = None
    echo: bool = True
    include: bool = True
    message: bool = True
    warning: bool = True
    error: bool = False
    results: str = "markup"
    fig_width: float | None = None  # None: inherit the output spec default
    fig_height: float | None = None
    defer_output: bool = False
    set_globals: bool = False
    # keys given explicitly in this header, for the global layer
    explicit: dict = field(default_factory=dict, compare=False, repr=False)

    def show_code(self) -> bool:
        return self.include and self.echo

    def show_output(self) -> bool:
        return self.include and self.results == "markup"

    def show_messages(self) -> bool:
        return self.show_output() and self.message

    def show_warnings(self) -> bool:
        return self.show_output() and self.warning

    def label(self, index: int) -> str:
        return self.name if self.name else f"chunk-{index + 1}"


def _split_commas(raw: str) -> list[str]:
    parts: list[str] = []
    buf: list[str] = []
    quote = None
    for ch in raw:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _parse_value(key: str, raw: str, line: int):
    if raw in ("TRUE", "true"):
        return True
    if raw in ("FALSE", "false"):
        return False
    if len(raw) >= 2 and raw[0] in "'\"" and raw[-1] == raw[0]:
        return raw[1:-1]
    if _NUMBER_RE.match(raw):
        return float(raw) if "." in raw else int(raw)
    if _KEY_RE.match(raw):
        return raw  # bare identifier, e.g. results=hide
    raise BadValue(key, raw, line)


def _check(key: str, value, line: int):
    if key in BOOL_KEYS:
        if not isinstance(value, bool):
            raise BadValue(key, value, line)
    elif key in NUMBER_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise BadValue(key, value, line)
        value = float(value)
    elif key == "results":
        if value not in RESULTS_MODES:
            raise BadValue(key, value, line)
    return value


def parse_chunk_options(options_raw: str, line: int) -> ChunkOptions:
    """Parse one ```{...} header; raises UnknownLanguage, UnknownOption,
    BadValue, or DuplicateKey on a malformed header."""
    segments = _split_commas(options_raw)
    head = segments[0].split()
    if not head:
        raise UnknownLanguage("", line)
    lang = head[0]
    name = None
    if len(head) == 2:
        name = head[1]
        if not _NAME_RE.match(name):
            raise BadValue("name", name, line)
    elif len(head) > 2:
        raise BadValue("name", " ".join(head[1:]), line)

    opts = ChunkOptions(lang=lang, name=name)
    seen: set[str] = set()
    for segment in segments[1:]:
        if "=" not in segment:
            raise BadValue(segment.strip() or "option", "", line)
        raw_key, raw_value = segment.split("=", 1)
        key = raw_key.strip().replace(".", "_")
        if not _KEY_RE.match(key) or key not in KNOWN_KEYS:
            raise UnknownOption(raw_key.strip(), line)
        if key in seen:
            raise DuplicateKey(key, line)
        seen.add(key)
        value = _check(key, _parse_value(key, raw_value.strip(), line), line)
        if key == "globals":
            opts.set_globals = bool(value)
            continue
        opts.explicit[key] = value
        setattr(opts, key, value)
    return opts


def effective_options(parsed: ChunkOptions, global_layer: dict) -> ChunkOptions:
    """Overlay the global layer under the chunk's own explicit keys."""
    merged = replace(parsed)
    merged.explicit = dict(parsed.explicit)
    for key, value in global_layer.items():
        if key not in parsed.explicit:
            setattr(merged, key, value)
    return merged
