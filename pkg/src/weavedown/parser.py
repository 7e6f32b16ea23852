"""Markdown dialect parser: body text to typed blocks and inlines.

The parser is total: unrecognized constructs degrade to plain paragraphs
or literal text, and the only raised errors are UnterminatedFence (from
an unclosed ``` fence) and MalformedHeader (propagated from the header).

Block rules fire in a fixed priority order; see docs/output.md for the
full dialect reference.
"""

from __future__ import annotations

import re

from .errors import UnterminatedFence, Warnings
from .frontmatter import parse_front_matter
from .nodes import (
    Block, BlockQuote, BulletList, CodeChunk, CodeLiteral, Emph, FencedCode,
    Heading, Image, Inline, InlineEval, Link, Math, OrderedList, Paragraph,
    RawHtml, SourceDocument, Strikeout, Strong, Subscript, Superscript, Table,
    Text, child_block_lists, inline_lists,
)

# Languages recognized in inline code spans; actual kernel registration is
# checked at validate time, not here.
DEFAULT_INLINE_LANGS = frozenset({"calc", "r", "py", "python", "js"})

HTML_TAGS = frozenset({
    "a", "article", "aside", "audio", "b", "blockquote", "br", "button",
    "canvas", "caption", "center", "code", "col", "colgroup", "dd", "details",
    "div", "dl", "dt", "em", "embed", "fieldset", "figcaption", "figure",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "i",
    "iframe", "img", "input", "label", "legend", "li", "link", "main", "map",
    "mark", "meta", "nav", "noscript", "object", "ol", "optgroup", "option",
    "p", "param", "picture", "pre", "progress", "q", "script", "section",
    "select", "small", "source", "span", "strong", "style", "sub", "summary",
    "sup", "table", "tbody", "td", "template", "textarea", "tfoot", "th",
    "thead", "tr", "track", "u", "ul", "video",
})

_CHUNK_OPEN_RE = re.compile(r"^```+\s*\{(?P<opts>[^}]*)\}\s*$")
_SETEXT_H1_RE = re.compile(r"^={3,}\s*$")
_SETEXT_H2_RE = re.compile(r"^-{3,}\s*$")
_ATX_RE = re.compile(r"^(?P<hashes>#{1,6}) (?P<text>.*)$")
_ATX_ATTRS_RE = re.compile(r"^(?P<text>.*?)\s*\{(?P<attrs>[^{}]*)\}\s*$")
_ORDERED_RE = re.compile(r"^(?:\d+|#)\. (?P<text>.*)$")
_BULLET_RE = re.compile(r"^[*+-] (?P<text>.*)$")
_QUOTE_RE = re.compile(r"^>\s?(?P<text>.*)$")
_TABLE_RULE_RE = re.compile(r"^ *-+( +-+)+ *$")
_HTML_OPEN_RE = re.compile(r"^<\s*/?(?P<tag>[A-Za-z][A-Za-z0-9]*)|^<!--")
_HYPHEN_RUN_RE = re.compile(r"-+")
_IDENT_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*) +(?P<rest>.+)$", re.DOTALL)


def _is_blank(line: str) -> bool:
    return not line.strip()


def _setext_level(line: str) -> int | None:
    if _SETEXT_H1_RE.match(line):
        return 1
    if _SETEXT_H2_RE.match(line):
        return 2
    return None


def _is_fence(line: str) -> bool:
    return line.startswith("```")


def _is_html_open(line: str) -> bool:
    m = _HTML_OPEN_RE.match(line)
    if not m:
        return False
    if m.group(0) == "<!--":
        return True
    return m.group("tag").lower() in HTML_TAGS


def _starts_block(line: str) -> bool:
    """Lines a paragraph never swallows."""
    return (
        _is_blank(line)
        or _is_fence(line)
        or _ATX_RE.match(line) is not None
        or _ORDERED_RE.match(line) is not None
        or _BULLET_RE.match(line) is not None
        or line.startswith(">")
        or _is_html_open(line)
    )


def parse_blocks(body_text: str, start_line: int = 1, inline_langs=None) -> list[Block]:
    """Segment body text into blocks; prose contexts are inline-parsed."""
    langs = DEFAULT_INLINE_LANGS if inline_langs is None else frozenset(inline_langs)
    lines = body_text.split("\n")
    blocks: list[Block] = []
    pos = 0
    n = len(lines)

    def lineno(i: int) -> int:
        return start_line + i

    while pos < n:
        line = lines[pos]
        if _is_blank(line):
            pos += 1
            continue

        if _is_fence(line):
            blocks.append(_parse_fence(lines, pos, lineno(pos)))
            pos = _fence_end(lines, pos)
            continue

        # setext heading: any non-fence line underlined by === or ---
        if pos + 1 < n and (level := _setext_level(lines[pos + 1])) is not None:
            blocks.append(Heading(level, parse_inlines(line.strip(), langs),
                                  line=lineno(pos)))
            pos += 2
            continue

        if m := _ATX_RE.match(line):
            blocks.append(_atx_heading(m, langs, lineno(pos)))
            pos += 1
            continue

        if _ORDERED_RE.match(line):
            items, pos = _take_list_items(lines, pos, _ORDERED_RE, langs, lineno)
            blocks.append(OrderedList(1, items, line=items[0][0].line))
            continue

        if _BULLET_RE.match(line):
            items, pos = _take_list_items(lines, pos, _BULLET_RE, langs, lineno)
            blocks.append(BulletList(items, line=items[0][0].line))
            continue

        if line.startswith(">"):
            blocks.append(_parse_quote(lines, pos, lineno, langs))
            pos = _quote_end(lines, pos)
            continue

        if pos + 1 < n and _TABLE_RULE_RE.match(lines[pos + 1]):
            table, pos = _parse_table(lines, pos, lineno, langs)
            blocks.append(table)
            continue

        if _is_html_open(line):
            end = pos
            while end < n and not _is_blank(lines[end]):
                end += 1
            blocks.append(RawHtml("\n".join(lines[pos:end]), line=lineno(pos)))
            pos = end
            continue

        # paragraph: swallow plain lines, stopping before a line that a
        # following underline or table rule would turn into a new block
        end = pos + 1
        while end < n and not _starts_block(lines[end]):
            nxt = lines[end + 1] if end + 1 < n else ""
            if _setext_level(nxt) is not None or _TABLE_RULE_RE.match(nxt):
                break
            end += 1
        text = "\n".join(lines[pos:end])
        blocks.append(Paragraph(parse_inlines(text, langs), line=lineno(pos)))
        pos = end

    return blocks


def _fence_end(lines: list[str], pos: int) -> int:
    for i in range(pos + 1, len(lines)):
        if lines[i].strip() == "```":
            return i + 1
    return len(lines)  # unreachable: _parse_fence raised


def _parse_fence(lines: list[str], pos: int, lineno: int) -> Block:
    opener = lines[pos]
    close = None
    for i in range(pos + 1, len(lines)):
        if lines[i].strip() == "```":
            close = i
            break
    if close is None:
        raise UnterminatedFence(lineno)
    body = "\n".join(lines[pos + 1 : close])
    if m := _CHUNK_OPEN_RE.match(opener):
        return CodeChunk(options_raw=m.group("opts").strip(), code=body, line=lineno)
    return FencedCode(body, line=lineno)  # any other info string is dropped


def _atx_heading(m: re.Match, langs, lineno: int) -> Heading:
    level = len(m.group("hashes"))
    text = m.group("text").strip()
    attrs: list[str] = []
    if am := _ATX_ATTRS_RE.match(text):
        tokens = am.group("attrs").split()
        if tokens and all(t.startswith(".") for t in tokens):
            attrs = [t[1:] for t in tokens]
            text = am.group("text").strip()
    return Heading(level, parse_inlines(text, langs), attrs=attrs, line=lineno)


def _take_list_items(lines, pos, marker_re, langs, lineno):
    items = []
    while pos < len(lines) and (m := marker_re.match(lines[pos])):
        para = Paragraph(parse_inlines(m.group("text").strip(), langs),
                         line=lineno(pos))
        items.append([para])
        pos += 1
    return items, pos


def _quote_end(lines: list[str], pos: int) -> int:
    while pos < len(lines) and lines[pos].startswith(">"):
        pos += 1
    return pos


def _parse_quote(lines, pos, lineno, langs) -> BlockQuote:
    end = _quote_end(lines, pos)
    inner = [_QUOTE_RE.match(lines[i]).group("text") for i in range(pos, end)]
    inner_blocks = parse_blocks("\n".join(inner), lineno(pos), langs)
    return BlockQuote(inner_blocks, line=lineno(pos))


def _parse_table(lines, pos, lineno, langs) -> tuple[Table, int]:
    header_line = lines[pos]
    rule = lines[pos + 1]
    starts = [m.start() for m in _HYPHEN_RUN_RE.finditer(rule)]
    starts[0] = 0  # first column always reaches the left edge
    bounds = list(zip(starts, starts[1:] + [None]))

    def cells(line: str) -> list[str]:
        return [line[s:e].strip() for s, e in bounds]

    header = [parse_inlines(c, langs) for c in cells(header_line)]
    rows = []
    i = pos + 2
    while i < len(lines) and not _is_blank(lines[i]):
        if _TABLE_RULE_RE.match(lines[i]):
            i += 1  # terminating rule
            break
        rows.append([parse_inlines(c, langs) for c in cells(lines[i])])
        i += 1
    return Table(header, rows, line=lineno(pos)), i


# -- inlines --------------------------------------------------------------------


def parse_inlines(text: str, langs=None) -> list[Inline]:
    """Left-to-right scan with longest-match delimiters; total."""
    langs = DEFAULT_INLINE_LANGS if langs is None else frozenset(langs)
    out: list[Inline] = []
    literal: list[str] = []
    i, n = 0, len(text)

    def flush():
        if literal:
            out.append(Text("".join(literal)))
            literal.clear()

    while i < n:
        c = text[i]
        node = end = None
        if c == "`":
            node, end = _scan_code(text, i, langs)
        elif c == "$":
            node, end = _scan_math(text, i)
        elif c == "!":
            node, end = _scan_image(text, i)
        elif c == "[":
            node, end = _scan_link(text, i, langs)
        elif c in "*_":
            node, end = _scan_emphasis(text, i, c, langs)
        elif c == "^":
            node, end = _scan_tight(text, i, "^", Superscript, langs)
        elif c == "~":
            node, end = _scan_tilde(text, i, langs)
        if node is None:
            literal.append(c)
            i += 1
        else:
            flush()
            out.append(node)
            i = end
    flush()
    return out


def _scan_code(text, i, langs):
    j = text.find("`", i + 1)
    if j < 0 or j == i + 1:
        return None, None
    content = text[i + 1 : j]
    if m := _IDENT_RE.match(content):
        lang = m.group(1)
        if lang in langs:
            return InlineEval(lang, m.group("rest").strip()), j + 1
    return CodeLiteral(content), j + 1


def _scan_math(text, i):
    j = text.find("$", i + 1)
    if j < 0 or j == i + 1:
        return None, None
    content = text[i + 1 : j]
    if "\n" in content:
        return None, None
    return Math(content), j + 1


def _scan_image(text, i):
    if not text.startswith("![", i):
        return None, None
    j = text.find("]", i + 2)
    if j < 0 or j + 1 >= len(text) or text[j + 1] != "(":
        return None, None
    k = text.find(")", j + 2)
    if k < 0:
        return None, None
    return Image(alt=text[i + 2 : j], source=text[j + 2 : k].strip()), k + 1


def _scan_link(text, i, langs):
    j = text.find("]", i + 1)
    if j < 0 or j + 1 >= len(text) or text[j + 1] != "(":
        return None, None
    k = text.find(")", j + 2)
    if k < 0:
        return None, None
    label = parse_inlines(text[i + 1 : j], langs)
    return Link(label, url=text[j + 2 : k].strip()), k + 1


def _flanked(content: str) -> bool:
    return bool(content) and not content[0].isspace() and not content[-1].isspace()


def _scan_emphasis(text, i, c, langs):
    # underscores never open mid-word (keeps snake_case intact)
    if c == "_" and i > 0 and (text[i - 1].isalnum() or text[i - 1] == "_"):
        return None, None
    double = c * 2
    if text.startswith(double, i):
        j = text.find(double, i + 2)
        if j > 0 and _flanked(text[i + 2 : j]):
            return Strong(parse_inlines(text[i + 2 : j], langs)), j + 2
        return None, None
    j = text.find(c, i + 1)
    while j > 0 and c == "_" and j + 1 < len(text) and text[j + 1].isalnum():
        j = text.find(c, j + 1)  # closer may not sit mid-word either
    if j > 0 and _flanked(text[i + 1 : j]):
        return Emph(parse_inlines(text[i + 1 : j], langs)), j + 1
    return None, None


def _scan_tight(text, i, delim, ctor, langs):
    # superscript/subscript content is short and whitespace-free
    j = text.find(delim, i + 1)
    if j < 0:
        return None, None
    content = text[i + 1 : j]
    if not content or any(ch.isspace() for ch in content):
        return None, None
    return ctor(parse_inlines(content, langs)), j + 1


def _scan_tilde(text, i, langs):
    if text.startswith("~~", i):
        j = text.find("~~", i + 2)
        if j > 0 and _flanked(text[i + 2 : j]):
            return Strikeout(parse_inlines(text[i + 2 : j], langs)), j + 2
        return None, None
    return _scan_tight(text, i, "~", Subscript, langs)


# -- whole document -----------------------------------------------------------------


def parse_document(
    source_text: str,
    inline_langs=None,
    warnings: Warnings | None = None,
) -> SourceDocument:
    """Front matter + blocks, with chunk and inline-eval nodes numbered in
    document order (CRLF input is normalized to LF first)."""
    text = source_text.replace("\r\n", "\n")
    front, body, body_start = parse_front_matter(text, warnings)
    blocks = parse_blocks(body, body_start, inline_langs)
    _number_executables(blocks)
    return SourceDocument(front=front, blocks=blocks, body_start_line=body_start)


def _number_executables(blocks: list[Block]) -> None:
    chunk_index = 0
    span = 0
    for block, node in iter_executables(blocks):
        if isinstance(node, CodeChunk):
            node.index = chunk_index
            chunk_index += 1
        else:
            node.span = span
            node.line = block.line
            span += 1


def iter_executables(blocks: list[Block]):
    """Yield (containing_block, CodeChunk | InlineEval) in document order.

    The order defines execution order: an inline between two chunks runs
    after the one before it and before the one after it.
    """
    for block in blocks:
        if isinstance(block, CodeChunk):
            yield block, block
            continue
        for inline_list in inline_lists(block):
            for node in _walk_inline(inline_list):
                if isinstance(node, InlineEval):
                    yield block, node
        for sub in child_block_lists(block):
            yield from iter_executables(sub)


def _walk_inline(inlines):
    for node in inlines:
        yield node
        sub = getattr(node, "inlines", None)
        if sub is not None:
            yield from _walk_inline(sub)
