"""Document header parsing: the YAML-subset block between --- fences.

The subset is deliberately bounded (see docs/header.md): scalar values at
the top level, plus one nested map level under `output:` naming output
kinds, each optionally carrying its own scalar option map. Unknown keys
are kept in FrontMatter.extras and reported at --verbose, never dropped
silently.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, replace

from .errors import MalformedHeader, Warnings

OUTPUT_KINDS = ("html_document", "html_slides")
TRANSITIONS = ("default", "slower", "faster")

# top-level keys that fold into every output spec as a base layer
SPEC_KEYS = {
    "toc", "theme", "fig_width", "fig_height",
    "widescreen", "transition", "text_size", "bullet",
}
SLIDE_ONLY_KEYS = {"widescreen", "transition", "text_size", "bullet"}
TEXT_KEYS = {"title", "author", "date", "bibliography", "logo"}

SHARED_HEADER_NAME = "_header.yml"


@dataclass
class OutputSpec:
    kind: str = "html_document"
    toc: bool = False
    theme: str = "default"
    fig_width: float = 7.0
    fig_height: float = 5.0
    widescreen: bool = False
    transition: str = "default"
    # reserved slide keys, mapped to CSS variables only
    text_size: str | None = None
    bullet: str | None = None


@dataclass
class FrontMatter:
    title: str | None = None
    author: str | None = None
    date: str | None = None
    outputs: list[OutputSpec] = field(default_factory=lambda: [OutputSpec()])
    bibliography: str | None = None
    logo: str | None = None
    extras: dict[str, str] = field(default_factory=dict)

    def primary_output(self) -> OutputSpec:
        return self.outputs[0]


_BOOL_WORDS = {"true": True, "yes": True, "false": False, "no": False}
_NUMBER_RE = re.compile(r"-?\d+(\.\d+)?$")


def _parse_scalar(raw: str):
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    low = raw.lower()
    if low in _BOOL_WORDS:
        return _BOOL_WORDS[low]
    if _NUMBER_RE.match(raw):
        return float(raw) if "." in raw else int(raw)
    return raw


def _as_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


@dataclass
class _Line:
    indent: int
    key: str
    value: str  # raw text after the colon, may be empty
    number: int  # 1-based source line


_KEY_RE = re.compile(r"^(?P<key>[A-Za-z_][\w.-]*)\s*:(?P<rest>.*)$")


def _scan_header_lines(lines: list[str], first_number: int) -> list[_Line]:
    out = []
    for offset, raw in enumerate(lines):
        number = first_number + offset
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        m = _KEY_RE.match(raw.strip())
        if not m:
            raise MalformedHeader(f"expected 'key: value', got {raw.strip()!r}", number)
        out.append(_Line(indent, m.group("key"), m.group("rest").strip(), number))
    return out


def _apply_spec_option(spec: OutputSpec, key: str, value, line: int) -> OutputSpec:
    if key == "toc":
        if not isinstance(value, bool):
            raise MalformedHeader(f"toc wants true/false, got {value!r}", line)
        return replace(spec, toc=value)
    if key == "widescreen":
        if not isinstance(value, bool):
            raise MalformedHeader(f"widescreen wants true/false, got {value!r}", line)
        return replace(spec, widescreen=value)
    if key == "theme":
        return replace(spec, theme=_as_text(value))
    if key in ("fig_width", "fig_height"):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise MalformedHeader(f"{key} wants a positive number, got {value!r}", line)
        return replace(spec, **{key: float(value)})
    if key == "transition":
        name = _as_text(value)
        if name not in TRANSITIONS:
            raise MalformedHeader(
                f"transition must be one of {', '.join(TRANSITIONS)}; got {name!r}", line
            )
        return replace(spec, transition=name)
    if key in ("text_size", "bullet"):
        return replace(spec, **{key: _as_text(value)})
    raise MalformedHeader(f"unknown output option '{key}'", line)


def _normalize_key(key: str) -> str:
    return key.replace(".", "_")


def parse_header_lines(
    lines: list[str], first_number: int = 1, warnings: Warnings | None = None
) -> FrontMatter:
    """Parse the raw lines of a header body into a FrontMatter."""
    scanned = _scan_header_lines(lines, first_number)
    fm = FrontMatter()
    seen: set[str] = set()
    base_options: list[tuple[str, object, int]] = []
    outputs: list[OutputSpec] | None = None

    i = 0
    while i < len(scanned):
        line = scanned[i]
        if line.indent != 0:
            raise MalformedHeader(f"unexpected indented key '{line.key}'", line.number)
        key = _normalize_key(line.key)
        if key in seen:
            raise MalformedHeader(f"duplicate top-level key '{line.key}'", line.number)
        seen.add(key)

        # collect the indented block under this key, if any
        j = i + 1
        block: list[_Line] = []
        while j < len(scanned) and scanned[j].indent > 0:
            block.append(scanned[j])
            j += 1

        if key == "output":
            outputs, i = _parse_output(line, block), j
            continue
        if block:
            raise MalformedHeader(
                f"'{line.key}' takes a single value, not a nested map", block[0].number
            )
        if not line.value:
            raise MalformedHeader(f"missing value for '{line.key}'", line.number)
        value = _parse_scalar(line.value)
        if key in TEXT_KEYS:
            setattr(fm, key, _as_text(value))
        elif key in SPEC_KEYS:
            base_options.append((key, value, line.number))
        else:
            fm.extras[line.key] = _as_text(value)
            if warnings is not None:
                warnings.warn(
                    "unknown-header-key",
                    f"unknown header key '{line.key}' preserved but unused",
                    verbose_only=True,
                )
        i = j

    if outputs is None:
        outputs = [OutputSpec()]
    for key, value, number in base_options:
        outputs = [_apply_spec_option(s, key, value, number) for s in outputs]
    fm.outputs = outputs
    _warn_slide_only(fm, warnings)
    return fm


def _parse_output(line: _Line, block: list[_Line]) -> list[OutputSpec]:
    if line.value:
        if block:
            raise MalformedHeader(
                "output has both an inline value and a nested map", block[0].number
            )
        kind = _as_text(_parse_scalar(line.value))
        return [_make_spec(kind, line.number)]
    if not block:
        raise MalformedHeader("output: needs a format name or a nested map", line.number)

    kind_indent = block[0].indent
    specs: list[OutputSpec] = []
    seen_kinds: set[str] = set()
    i = 0
    while i < len(block):
        entry = block[i]
        if entry.indent != kind_indent:
            raise MalformedHeader(
                f"bad indentation under output: for '{entry.key}'", entry.number
            )
        if entry.value:
            raise MalformedHeader(
                f"output format '{entry.key}' takes options, not a value", entry.number
            )
        kind = entry.key
        if kind in seen_kinds:
            raise MalformedHeader(f"duplicate output format '{kind}'", entry.number)
        seen_kinds.add(kind)
        spec = _make_spec(kind, entry.number)
        i += 1
        opt_seen: set[str] = set()
        while i < len(block) and block[i].indent > kind_indent:
            opt = block[i]
            if not opt.value:
                raise MalformedHeader(
                    f"output option '{opt.key}' needs a scalar value", opt.number
                )
            opt_key = _normalize_key(opt.key)
            if opt_key in opt_seen:
                raise MalformedHeader(f"duplicate output option '{opt.key}'", opt.number)
            opt_seen.add(opt_key)
            spec = _apply_spec_option(spec, opt_key, _parse_scalar(opt.value), opt.number)
            i += 1
        specs.append(spec)
    return specs


def _make_spec(kind: str, number: int) -> OutputSpec:
    if kind not in OUTPUT_KINDS:
        raise MalformedHeader(
            f"unknown output format '{kind}' (expected one of {', '.join(OUTPUT_KINDS)})",
            number,
        )
    return OutputSpec(kind=kind)


def _warn_slide_only(fm: FrontMatter, warnings: Warnings | None) -> None:
    if warnings is None:
        return
    defaults = OutputSpec()
    for spec in fm.outputs:
        if spec.kind != "html_document":
            continue
        for key in SLIDE_ONLY_KEYS:
            if getattr(spec, key) != getattr(defaults, key):
                warnings.warn(
                    "slide-only-option",
                    f"'{key}' only applies to html_slides; ignored for html_document",
                )
    if fm.logo and not any(s.kind == "html_slides" for s in fm.outputs):
        warnings.warn("slide-only-option", "'logo' only applies to html_slides")


def parse_front_matter(
    source_text: str, warnings: Warnings | None = None
) -> tuple[FrontMatter, str, int]:
    """Split header from body.

    Returns (front_matter, body_text, body_start_line). Total: inputs with
    no --- fence yield an all-defaults header and the full text as body.
    """
    lines = source_text.split("\n")
    open_idx = None
    for idx, raw in enumerate(lines):
        if not raw.strip():
            continue
        if raw.rstrip() == "---":
            open_idx = idx
        break
    if open_idx is None:
        return FrontMatter(), source_text, 1

    close_idx = None
    for idx in range(open_idx + 1, len(lines)):
        if lines[idx].rstrip() == "---":
            close_idx = idx
            break
    if close_idx is None:
        raise MalformedHeader("header opened with --- but never closed", open_idx + 1)

    fm = parse_header_lines(lines[open_idx + 1 : close_idx], open_idx + 2, warnings)
    body = "\n".join(lines[close_idx + 1 :])
    return fm, body, close_idx + 2


def load_shared_header(directory, warnings: Warnings | None = None) -> FrontMatter | None:
    """Parse `_header.yml` next to the document, if present (no --- fences)."""
    path = os.path.join(str(directory), SHARED_HEADER_NAME)
    if not os.path.isfile(path):
        return None
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_header_lines(text.split("\n"), 1, warnings)


def merge_headers(shared: FrontMatter, local: FrontMatter) -> FrontMatter:
    """Field-wise merge; local non-default values win over shared.

    `outputs` is all-or-nothing: a locally specified output list replaces the
    shared one entirely.
    """
    defaults = FrontMatter()
    merged = FrontMatter()
    for key in ("title", "author", "date", "bibliography", "logo"):
        local_val = getattr(local, key)
        setattr(merged, key, local_val if local_val != getattr(defaults, key)
                else getattr(shared, key))
    merged.outputs = local.outputs if local.outputs != defaults.outputs else shared.outputs
    merged.extras = {**shared.extras, **local.extras}
    return merged


def header_text(fm: FrontMatter) -> str:
    """Serialize back to header-body text (round-trips through the parser)."""
    out = []
    for key in ("title", "author", "date", "bibliography", "logo"):
        value = getattr(fm, key)
        if value is not None:
            out.append(f'{key}: "{value}"')
    out.append("output:")
    defaults = OutputSpec()
    for spec in fm.outputs:
        out.append(f"  {spec.kind}:")
        for key in ("toc", "theme", "fig_width", "fig_height",
                    "widescreen", "transition", "text_size", "bullet"):
            value = getattr(spec, key)
            if value != getattr(defaults, key):
                out.append(f"    {key}: {_as_text(value)}")
    for key, value in fm.extras.items():
        out.append(f'{key}: "{value}"')
    return "\n".join(out) + "\n"
