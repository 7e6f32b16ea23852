"""AST node families for parsed and woven documents.

Blocks and inlines are plain dataclasses; a document is a flat list of
blocks, each carrying the source line it started on. Woven node types
(echoed code, output, figures, tables) extend the same block family so
the HTML renderer sees one vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# -- inlines ------------------------------------------------------------------


@dataclass
class Text:
    text: str


@dataclass
class Emph:
    inlines: list[Inline]


@dataclass
class Strong:
    inlines: list[Inline]


@dataclass
class Link:
    inlines: list[Inline]
    url: str


@dataclass
class Image:
    alt: str
    source: str


@dataclass
class CodeLiteral:
    text: str


@dataclass
class InlineEval:
    """A backtick span `lang expr` whose value replaces it at weave time."""

    lang: str
    expr: str
    span: int = -1  # document-order id, assigned by parse_document
    line: int = 0


@dataclass
class Superscript:
    inlines: list[Inline]


@dataclass
class Subscript:
    inlines: list[Inline]


@dataclass
class Strikeout:
    inlines: list[Inline]


@dataclass
class Math:
    tex: str


Inline = Union[
    Text, Emph, Strong, Link, Image, CodeLiteral, InlineEval,
    Superscript, Subscript, Strikeout, Math,
]

# -- blocks -------------------------------------------------------------------


@dataclass
class Heading:
    level: int  # 1..6
    inlines: list[Inline]
    attrs: list[str] = field(default_factory=list)
    line: int = 0


@dataclass
class Paragraph:
    inlines: list[Inline]
    line: int = 0


@dataclass
class BulletList:
    items: list[list[Block]]
    line: int = 0


@dataclass
class OrderedList:
    # Numbering is regenerated 1..n at render time; start kept for the record.
    start: int
    items: list[list[Block]]
    line: int = 0


@dataclass
class BlockQuote:
    blocks: list[Block]
    line: int = 0


@dataclass
class FencedCode:
    text: str
    line: int = 0


@dataclass
class CodeChunk:
    options_raw: str
    code: str
    line: int = 0
    index: int = -1  # document-order id, assigned by parse_document


@dataclass
class Table:
    header_row: list[list[Inline]]
    rows: list[list[list[Inline]]]
    line: int = 0


@dataclass
class RawHtml:
    text: str
    line: int = 0


# -- woven-only blocks ----------------------------------------------------------


@dataclass
class EchoedCode:
    lang: str
    text: str
    line: int = 0


@dataclass
class OutputBlock:
    """A run of consecutive text segments from one chunk, stream-tagged."""

    segments: list  # list[kernel.Segment]
    line: int = 0


@dataclass
class FigureBlock:
    ref: object  # kernel.FigureRef
    width: float  # display units
    height: float
    line: int = 0


@dataclass
class TableBlock:
    table: object  # kernel.StructuredTable
    line: int = 0


Block = Union[
    Heading, Paragraph, BulletList, OrderedList, BlockQuote, FencedCode,
    CodeChunk, Table, RawHtml,
    EchoedCode, OutputBlock, FigureBlock, TableBlock,
]


@dataclass
class SourceDocument:
    front: object  # frontmatter.FrontMatter
    blocks: list[Block]
    body_start_line: int = 1


def child_block_lists(block: Block) -> list[list[Block]]:
    """Nested block lists of a container block (lists, quotes)."""
    if isinstance(block, (BulletList, OrderedList)):
        return block.items
    if isinstance(block, BlockQuote):
        return [block.blocks]
    return []


def inline_lists(block: Block) -> list[list[Inline]]:
    """Direct inline lists of a block, in source order."""
    if isinstance(block, (Heading, Paragraph)):
        return [block.inlines]
    if isinstance(block, Table):
        return list(block.header_row) + [cell for row in block.rows for cell in row]
    return []


def walk_blocks(blocks: list[Block]):
    """Yield every block depth-first, containers before their children."""
    for block in blocks:
        yield block
        for sub in child_block_lists(block):
            yield from walk_blocks(sub)


def walk_inlines(inlines: list[Inline]):
    """Yield every inline depth-first."""
    for node in inlines:
        yield node
        sub = getattr(node, "inlines", None)
        if sub is not None:
            yield from walk_inlines(sub)
