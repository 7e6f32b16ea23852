"""HTML rendering for woven documents: single-page reports and slideshows.

Output is deterministic byte for byte: styles are embedded, section ids
come from a stable slugifier, and figures are referenced from the
sibling figures directory at 96 pixels per display unit. The MathJax
script tag (the one external reference) appears only when the document
actually contains math.
"""

from __future__ import annotations

import html
from dataclasses import dataclass

from .errors import NoSlides, Warnings
from .frontmatter import OutputSpec
from .nodes import (
    Block, BlockQuote, BulletList, CodeLiteral, EchoedCode, Emph, FencedCode,
    FigureBlock, Heading, Image, Link, Math, OrderedList, OutputBlock,
    Paragraph, RawHtml, Strikeout, Strong, Subscript, Superscript, Table,
    TableBlock, Text, walk_blocks, inline_lists, walk_inlines,
)

PX_PER_UNIT = 96

MATHJAX_URL = "https://cdn.jsdelivr.net/npm/mathjax@3/es5/tex-chtml-full.js"

TRANSITION_SECONDS = {"default": 0.4, "slower": 0.8, "faster": 0.2}


def escape_text(text: str) -> str:
    return html.escape(text, quote=False)


def escape_attr(text: str) -> str:
    return html.escape(text, quote=True)


def slugify(text: str) -> str:
    out = []
    for ch in text.lower():
        if ch.isalnum():
            out.append(ch)
        elif ch in " -_":
            out.append("-")
    slug = "".join(out)
    while "--" in slug:
        slug = slug.replace("--", "-")
    return slug.strip("-") or "section"


class _Slugs:
    """Stable unique ids: repeats get -1, -2, ... suffixes."""

    def __init__(self):
        self.used: dict[str, int] = {}

    def unique(self, text: str) -> str:
        base = slugify(text)
        count = self.used.get(base, 0)
        self.used[base] = count + 1
        return base if count == 0 else f"{base}-{count}"


def inline_text(inlines) -> str:
    """Plain text of an inline list, for slugs and <title>."""
    parts = []
    for node in walk_inlines(inlines):
        if isinstance(node, (Text, CodeLiteral)):
            parts.append(node.text)
        elif isinstance(node, Math):
            parts.append(node.tex)
        elif isinstance(node, Image):
            parts.append(node.alt)
    return "".join(parts)


def inlines_html(inlines) -> str:
    return "".join(_inline_html(node) for node in inlines)


def _inline_html(node) -> str:
    if isinstance(node, Text):
        return escape_text(node.text)
    if isinstance(node, Emph):
        return f"<em>{inlines_html(node.inlines)}</em>"
    if isinstance(node, Strong):
        return f"<strong>{inlines_html(node.inlines)}</strong>"
    if isinstance(node, Link):
        return (f'<a href="{escape_attr(node.url)}">'
                f"{inlines_html(node.inlines)}</a>")
    if isinstance(node, Image):
        return (f'<img src="{escape_attr(node.source)}" '
                f'alt="{escape_attr(node.alt)}" />')
    if isinstance(node, CodeLiteral):
        return f"<code>{escape_text(node.text)}</code>"
    if isinstance(node, Superscript):
        return f"<sup>{inlines_html(node.inlines)}</sup>"
    if isinstance(node, Subscript):
        return f"<sub>{inlines_html(node.inlines)}</sub>"
    if isinstance(node, Strikeout):
        return f"<del>{inlines_html(node.inlines)}</del>"
    if isinstance(node, Math):
        return f'<span class="math">\\({escape_text(node.tex)}\\)</span>'
    # InlineEval nodes are substituted away during weaving
    return escape_text(getattr(node, "text", ""))


@dataclass
class _RenderContext:
    figure_dir_name: str | None
    heading_ids: dict[int, str]


def _heading_ids(blocks: list[Block]) -> dict[int, str]:
    slugs = _Slugs()
    ids: dict[int, str] = {}
    for block in walk_blocks(blocks):
        if isinstance(block, Heading):
            ids[id(block)] = slugs.unique(inline_text(block.inlines))
    return ids


def _has_math(blocks: list[Block]) -> bool:
    for block in walk_blocks(blocks):
        for inlines in inline_lists(block):
            for node in walk_inlines(inlines):
                if isinstance(node, Math):
                    return True
    return False


def block_html(block: Block, ctx: _RenderContext) -> str:
    if isinstance(block, Heading):
        hid = ctx.heading_ids.get(id(block), "")
        classes = f' class="{escape_attr(" ".join(block.attrs))}"' if block.attrs else ""
        return (f'<h{block.level} id="{escape_attr(hid)}"{classes}>'
                f"{inlines_html(block.inlines)}</h{block.level}>")
    if isinstance(block, Paragraph):
        return f"<p>{inlines_html(block.inlines)}</p>"
    if isinstance(block, BulletList):
        items = "".join(f"<li>{_item_html(item, ctx)}</li>" for item in block.items)
        return f"<ul>{items}</ul>"
    if isinstance(block, OrderedList):
        items = "".join(f"<li>{_item_html(item, ctx)}</li>" for item in block.items)
        return f"<ol>{items}</ol>"
    if isinstance(block, BlockQuote):
        inner = "\n".join(block_html(b, ctx) for b in block.blocks)
        return f"<blockquote>\n{inner}\n</blockquote>"
    if isinstance(block, FencedCode):
        return f'<pre class="code"><code>{escape_text(block.text)}</code></pre>'
    if isinstance(block, EchoedCode):
        return (f'<pre class="chunk-code"><code class="language-'
                f'{escape_attr(block.lang)}">{escape_text(block.text)}</code></pre>')
    if isinstance(block, OutputBlock):
        lines = []
        for seg in block.segments:
            text = seg.text
            if seg.kind == "warning":
                text = f"Warning: {text}"
            elif seg.kind == "error":
                text = f"Error: {text}"
            lines.append(text)
        body = escape_text("\n".join(lines))
        return f'<pre class="chunk-output"><code>{body}</code></pre>'
    if isinstance(block, FigureBlock):
        src = block.ref.path
        if ctx.figure_dir_name:
            src = f"{ctx.figure_dir_name}/{src}"
        width = round(block.width * PX_PER_UNIT)
        height = round(block.height * PX_PER_UNIT)
        return (f'<p class="figure"><img src="{escape_attr(src)}" '
                f'width="{width}" height="{height}" alt="" /></p>')
    if isinstance(block, TableBlock):
        head = "".join(f"<th>{escape_text(c)}</th>" for c in block.table.header)
        rows = "".join(
            "<tr>" + "".join(f"<td>{escape_text(c)}</td>" for c in row) + "</tr>"
            for row in block.table.rows
        )
        return (f'<table class="chunk-table"><thead><tr>{head}</tr></thead>'
                f"<tbody>{rows}</tbody></table>")
    if isinstance(block, Table):
        head = "".join(f"<th>{inlines_html(c)}</th>" for c in block.header_row)
        rows = "".join(
            "<tr>" + "".join(f"<td>{inlines_html(c)}</td>" for c in row) + "</tr>"
            for row in block.rows
        )
        return (f"<table><thead><tr>{head}</tr></thead>"
                f"<tbody>{rows}</tbody></table>")
    if isinstance(block, RawHtml):
        return block.text
    return ""


def _item_html(item: list[Block], ctx: _RenderContext) -> str:
    # single-paragraph items render tight, without the <p> wrapper
    if len(item) == 1 and isinstance(item[0], Paragraph):
        return inlines_html(item[0].inlines)
    return "\n".join(block_html(b, ctx) for b in item)


def _toc_html(blocks: list[Block], ctx: _RenderContext) -> str:
    entries = [
        (block.level, ctx.heading_ids[id(block)], inlines_html(block.inlines))
        for block in blocks
        if isinstance(block, Heading) and block.level <= 3
    ]
    if not entries:
        return ""
    items = "".join(
        f'<li class="toc-level-{level}"><a href="#{escape_attr(hid)}">{text}</a></li>'
        for level, hid, text in entries
    )
    return f'<nav id="toc"><ul>{items}</ul></nav>\n'


def _mathjax_html(blocks: list[Block]) -> str:
    if not _has_math(blocks):
        return ""
    return (
        "<script>window.MathJax = {tex: {inlineMath: [['$', '$'], "
        "['\\\\(', '\\\\)']]}};</script>\n"
        f'<script async src="{MATHJAX_URL}"></script>\n'
    )


def _title_block(front) -> str:
    if not (front.title or front.author or front.date):
        return ""
    parts = ['<header id="title-block">']
    if front.title:
        parts.append(f"<h1>{escape_text(front.title)}</h1>")
    if front.author:
        parts.append(f'<p class="author">{escape_text(front.author)}</p>')
    if front.date:
        parts.append(f'<p class="date">{escape_text(front.date)}</p>')
    parts.append("</header>")
    return "\n".join(parts) + "\n"


def render_document(woven, source_stem: str,
                    warnings: Warnings | None = None) -> str:
    """One self-contained HTML page for an html_document output."""
    spec = woven.spec
    theme = spec.theme
    if theme not in DOCUMENT_THEMES:
        if warnings is not None:
            warnings.warn("UnknownTheme",
                          f"unknown theme {theme!r}, using default")
        theme = "default"
    ctx = _RenderContext(woven.figure_dir_name, _heading_ids(woven.blocks))
    title = woven.front.title or source_stem
    body = "\n".join(block_html(b, ctx) for b in woven.blocks)
    toc = _toc_html(woven.blocks, ctx) if spec.toc else ""
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "<head>\n"
        '<meta charset="utf-8" />\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1" />\n'
        f"<title>{escape_text(title)}</title>\n"
        f"<style>\n{BASE_CSS}{DOCUMENT_THEMES[theme]}</style>\n"
        f"{_mathjax_html(woven.blocks)}"
        "</head>\n"
        "<body>\n"
        f"{_title_block(woven.front)}"
        f"{toc}"
        '<main id="content">\n'
        f"{body}\n"
        "</main>\n"
        "</body>\n"
        "</html>\n"
    )


# -- slides ---------------------------------------------------------------------


@dataclass
class Slide:
    heading: Heading | None
    blocks: list[Block]


def split_slides(blocks: list[Block]) -> tuple[list[Block], list[Slide]]:
    """Partition: preamble (before the first level-2 heading) and one slide
    per level-2 heading. Every block lands in exactly one part."""
    preamble: list[Block] = []
    slides: list[Slide] = []
    for block in blocks:
        if isinstance(block, Heading) and block.level == 2:
            slides.append(Slide(block, []))
        elif slides:
            slides[-1].blocks.append(block)
        else:
            preamble.append(block)
    return preamble, slides


def render_slides(woven, source_stem: str, source_path: str = "",
                  warnings: Warnings | None = None) -> str:
    """A keyboard-driven slideshow; slides are demarcated by ## headings."""
    spec = woven.spec
    preamble, slides = split_slides(woven.blocks)
    if not slides:
        raise NoSlides(source_path or None)
    ctx = _RenderContext(woven.figure_dir_name, _heading_ids(woven.blocks))
    front = woven.front
    title = front.title or source_stem
    seconds = TRANSITION_SECONDS.get(spec.transition, 0.4)
    width = 1210 if spec.widescreen else 910

    logo_html = ""
    footer_logo = ""
    if front.logo:
        logo_html = (f'<img class="logo" src="{escape_attr(front.logo)}" '
                     'alt="logo" />')
        footer_logo = (f'<img class="footer-logo" src="{escape_attr(front.logo)}"'
                       ' alt="" />')

    sections = []
    title_bits = [f"<h1>{escape_text(title)}</h1>"]
    if front.author:
        title_bits.append(f'<p class="author">{escape_text(front.author)}</p>')
    if front.date:
        title_bits.append(f'<p class="date">{escape_text(front.date)}</p>')
    sections.append(
        '<section class="slide title-slide">' + logo_html
        + "".join(title_bits) + "</section>"
    )
    if preamble:
        inner = "\n".join(block_html(b, ctx) for b in preamble)
        sections.append(f'<section class="slide">\n{inner}\n</section>')
    for slide in slides:
        classes = ["slide"] + list(slide.heading.attrs)
        heading = (f'<h2 id="{escape_attr(ctx.heading_ids[id(slide.heading)])}">'
                   f"{inlines_html(slide.heading.inlines)}</h2>")
        inner = "\n".join(block_html(b, ctx) for b in slide.blocks)
        body = f"{heading}\n{inner}" if inner else heading
        sections.append(
            f'<section class="{escape_attr(" ".join(classes))}">\n{body}\n</section>'
        )

    extra_vars = []
    if spec.text_size:
        extra_vars.append(f"  --slide-text-size: {spec.text_size};")
    if spec.bullet:
        extra_vars.append(f"  --slide-bullet: {spec.bullet};")
    vars_css = (
        ":root {\n"
        f"  --slide-transition: {seconds:g}s;\n"
        f"  --slide-width: {width}px;\n"
        + ("\n".join(extra_vars) + "\n" if extra_vars else "")
        + "}\n"
    )

    footer = (f'<footer id="slide-footer">{footer_logo}'
              '<span id="slide-counter"></span></footer>')
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "<head>\n"
        '<meta charset="utf-8" />\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1" />\n'
        f"<title>{escape_text(title)}</title>\n"
        f"<style>\n{vars_css}{SLIDES_CSS}</style>\n"
        f"{_mathjax_html(woven.blocks)}"
        "</head>\n"
        "<body>\n"
        '<div id="deck">\n'
        + "\n".join(sections) + "\n"
        "</div>\n"
        f"{footer}\n"
        f"<script>\n{NAV_JS}</script>\n"
        "</body>\n"
        "</html>\n"
    )


# -- styles and script --------------------------------------------------------------

BASE_CSS = """\
body {
  margin: 0 auto;
  max-width: 46rem;
  padding: 0 1.25rem 3rem;
  font-family: Georgia, "Times New Roman", serif;
  line-height: 1.55;
}
header#title-block { margin: 2.5rem 0 2rem; }
header#title-block h1 { margin-bottom: 0.25rem; }
header#title-block .author, header#title-block .date {
  margin: 0.1rem 0;
  font-style: italic;
}
nav#toc { border-left: 3px solid; padding-left: 1rem; margin: 1.5rem 0; }
nav#toc ul { list-style: none; margin: 0; padding: 0; }
nav#toc li.toc-level-2 { padding-left: 1.25rem; }
nav#toc li.toc-level-3 { padding-left: 2.5rem; }
pre { padding: 0.6rem 0.8rem; overflow-x: auto; border-radius: 4px; }
pre, code { font-family: "DejaVu Sans Mono", Menlo, Consolas, monospace; }
pre.chunk-output { border-left: 3px solid; }
blockquote { margin: 1rem 0 1rem 1rem; padding-left: 1rem; border-left: 3px solid; }
table { border-collapse: collapse; margin: 1rem 0; }
th, td { padding: 0.3rem 0.8rem; border-bottom: 1px solid; text-align: left; }
thead th { border-bottom: 2px solid; }
p.figure img { max-width: 100%; height: auto; }
h1.appendix, h1.references { margin-top: 3rem; }
"""

DOCUMENT_THEMES = {
    "default": """\
body { background: #ffffff; color: #1a1a1a; }
a { color: #2c6e9b; }
pre { background: #f5f5f5; }
pre.chunk-code { background: #eef3f7; }
pre.chunk-output { background: #fafafa; border-color: #c8c8c8; }
blockquote { border-color: #d0d0d0; color: #444444; }
nav#toc { border-color: #2c6e9b; }
""",
    "dark": """\
body { background: #1d2127; color: #d8dee9; }
a { color: #7fb4d8; }
pre { background: #272c34; }
pre.chunk-code { background: #2a3039; }
pre.chunk-output { background: #23272e; border-color: #4a515c; }
blockquote { border-color: #4a515c; color: #aab2bf; }
nav#toc { border-color: #7fb4d8; }
""",
}

SLIDES_CSS = """\
html, body { margin: 0; padding: 0; background: #11151a; }
body { font-family: "Helvetica Neue", Arial, sans-serif; }
#deck { position: relative; }
section.slide {
  position: absolute;
  inset: 0;
  margin: 2.5vh auto;
  max-width: var(--slide-width);
  padding: 2.2rem 3rem;
  background: #ffffff;
  color: #1a1a1a;
  border-radius: 6px;
  opacity: 0;
  visibility: hidden;
  transform: translateX(2rem);
  transition: opacity var(--slide-transition), transform var(--slide-transition),
    visibility var(--slide-transition);
  overflow: auto;
  height: 90vh;
  box-sizing: border-box;
  font-size: var(--slide-text-size, 1.15rem);
  line-height: 1.5;
}
section.slide.current {
  opacity: 1;
  visibility: visible;
  transform: translateX(0);
}
section.slide h2 { margin-top: 0; color: #2c6e9b; }
section.slide ul { list-style-type: var(--slide-bullet, disc); }
section.title-slide { text-align: center; }
section.title-slide h1 { margin-top: 18vh; font-size: 2.2em; }
section.title-slide .author, section.title-slide .date { font-style: italic; }
section.slide.flexbox { display: none; }
section.slide.flexbox.current { display: flex; flex-direction: column; }
section.slide.vcenter.current { justify-content: center; }
img.logo { max-height: 18vh; display: block; margin: 4vh auto 0; }
img.footer-logo { height: 1.4rem; vertical-align: middle; margin-right: 0.6rem; }
pre { background: #f5f5f5; padding: 0.5rem 0.7rem; overflow-x: auto; }
pre, code { font-family: "DejaVu Sans Mono", Menlo, Consolas, monospace; }
pre.chunk-output { border-left: 3px solid #c8c8c8; }
table { border-collapse: collapse; }
th, td { padding: 0.25rem 0.7rem; border-bottom: 1px solid #cccccc; }
p.figure img { max-width: 100%; height: auto; }
#slide-footer {
  position: fixed;
  bottom: 0.6rem;
  right: 1rem;
  color: #9aa5b1;
  font-family: "Helvetica Neue", Arial, sans-serif;
  font-size: 0.85rem;
}
"""

NAV_JS = """\
(function () {
  var slides = Array.prototype.slice.call(
    document.querySelectorAll("section.slide"));
  var counter = document.getElementById("slide-counter");
  var index = 0;
  function clamp(i) {
    return Math.max(0, Math.min(slides.length - 1, i));
  }
  function show(i) {
    index = clamp(i);
    slides.forEach(function (slide, k) {
      slide.classList.toggle("current", k === index);
    });
    if (counter) {
      counter.textContent = (index + 1) + " / " + slides.length;
    }
    if (window.history.replaceState) {
      window.history.replaceState(null, "", "#" + (index + 1));
    }
  }
  document.addEventListener("keydown", function (ev) {
    if (ev.key === "ArrowRight" || ev.key === " " || ev.key === "PageDown") {
      show(index + 1);
      ev.preventDefault();
    } else if (ev.key === "ArrowLeft" || ev.key === "PageUp") {
      show(index - 1);
      ev.preventDefault();
    } else if (ev.key === "Home") {
      show(0);
    } else if (ev.key === "End") {
      show(slides.length - 1);
    }
  });
  document.addEventListener("click", function () {
    show(index + 1);
  });
  var fromHash = parseInt(window.location.hash.slice(1), 10);
  show(isNaN(fromHash) ? 0 : fromHash - 1);
})();
"""
