"""Weaving: run a parsed document's code and fold results back into blocks.

Each call works on one (document, output spec) pair and starts fresh
kernel sessions, so every render sees a clean workspace. Chunk and inline
evaluations happen strictly in document order; the chunk that carries
globals=TRUE replaces the global option layer for everything after it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .chunks import ChunkOptions, effective_options, parse_chunk_options
from .citations import load_bibliography, process_citations, references_blocks
from .errors import (
    ChunkExecutionError, DuplicateChunkName, InlineEvalError,
    MultilineInlineResult, Warnings,
)
from .frontmatter import FrontMatter, OutputSpec
from .kernel import (
    DEFAULT_EXEC_TIMEOUT, ChunkResult, FigureRef, KernelRegistry,
    OutputSegment, TableData,
)
from .nodes import (
    Block, CodeChunk, EchoedCode, FigureBlock, Heading, InlineEval,
    OutputBlock, SourceDocument, TableBlock, Text, child_block_lists,
    inline_lists,
)
from .parser import iter_executables


@dataclass
class WovenDocument:
    """Executed document, ready for rendering."""

    front: FrontMatter
    spec: OutputSpec
    blocks: list[Block]
    figure_dir_name: str | None = None  # e.g. "report_files", None if unused


@dataclass
class _Execution:
    options: ChunkOptions
    result: ChunkResult
    fig_width: float  # sizes resolved against the output spec at exec time
    fig_height: float


@dataclass
class _Workspaces:
    """Lazy kernel sessions for one render."""

    registry: KernelRegistry
    figure_dir: str
    exec_timeout: float
    sessions: dict = field(default_factory=dict)
    started: bool = False

    def session(self, lang: str, line: int):
        if lang not in self.sessions:
            os.makedirs(self.figure_dir, exist_ok=True)
            self.started = True
            self.sessions[lang] = self.registry.create(
                lang, self.figure_dir, self.exec_timeout, line)
        return self.sessions[lang]

    def shutdown(self) -> None:
        for session in self.sessions.values():
            session.shutdown()
        self.sessions.clear()


def collect_chunk_options(doc: SourceDocument) -> dict[int, ChunkOptions]:
    """Parse every chunk header; duplicate chunk names are an error."""
    parsed: dict[int, ChunkOptions] = {}
    names: dict[str, int] = {}
    for block, node in iter_executables(doc.blocks):
        if not isinstance(node, CodeChunk):
            continue
        opts = parse_chunk_options(node.options_raw, node.line)
        if opts.name is not None:
            if opts.name in names:
                raise DuplicateChunkName(opts.name, names[opts.name], node.line)
            names[opts.name] = node.line
        parsed[node.index] = opts
    return parsed


def weave_document(
    doc: SourceDocument,
    spec: OutputSpec,
    registry: KernelRegistry,
    figure_dir: str,
    figure_dir_name: str,
    source_dir: str,
    warnings: Warnings | None = None,
    exec_timeout: float = DEFAULT_EXEC_TIMEOUT,
) -> WovenDocument:
    parsed = collect_chunk_options(doc)
    workspaces = _Workspaces(registry, figure_dir, exec_timeout)
    executions: dict[int, _Execution] = {}
    inline_values: dict[int, str] = {}
    global_layer: dict = {}
    try:
        for block, node in iter_executables(doc.blocks):
            if isinstance(node, CodeChunk):
                opts = effective_options(parsed[node.index], global_layer)
                if parsed[node.index].set_globals:
                    global_layer = dict(parsed[node.index].explicit)
                session = workspaces.session(opts.lang, node.line)
                fig_w = opts.fig_width or spec.fig_width
                fig_h = opts.fig_height or spec.fig_height
                result = session.exec_chunk(
                    node.code, fig_w, fig_h, opts.label(node.index))
                if not result.ok and not opts.error:
                    _raise_chunk_error(node, opts, result)
                executions[node.index] = _Execution(opts, result, fig_w, fig_h)
            else:
                session = workspaces.session(node.lang, node.line)
                ok, text = session.eval_inline(node.expr)
                if not ok:
                    raise InlineEvalError(node.expr, text, node.line)
                if "\n" in text:
                    raise MultilineInlineResult(node.expr, node.line)
                inline_values[node.span] = text
    finally:
        workspaces.shutdown()

    blocks = _substitute_inlines(doc.blocks, inline_values)
    blocks, appendix = _weave_blocks(blocks, executions)
    if appendix:
        blocks.append(Heading(1, [Text("Appendix")], attrs=["appendix"]))
        for label, deferred in appendix:
            blocks.append(Heading(2, [Text(label)]))
            blocks.extend(deferred)

    if doc.front.bibliography:
        entries = load_bibliography(os.path.join(source_dir, doc.front.bibliography))
        cited = process_citations(blocks, entries, warnings)
        blocks.extend(references_blocks(cited))

    dir_name = figure_dir_name if workspaces.started else None
    return WovenDocument(front=doc.front, spec=spec, blocks=blocks,
                         figure_dir_name=dir_name)


def _raise_chunk_error(node: CodeChunk, opts: ChunkOptions, result: ChunkResult):
    text = result.error_text() or "kernel reported failure"
    line = node.line
    for seg in result.segments:
        if seg.kind == "error" and seg.line is not None:
            line = node.line + seg.line  # fence line + cell-relative line
            break
    raise ChunkExecutionError(opts.label(node.index), text, line)


def _substitute_inlines(blocks: list[Block], values: dict[int, str]) -> list[Block]:
    """Replace InlineEval nodes with their result text, in place."""
    for block in blocks:
        for inlines in inline_lists(block):
            _substitute_list(inlines, values)
        for sub in child_block_lists(block):
            _substitute_inlines(sub, values)
    return blocks


def _substitute_list(inlines: list, values: dict[int, str]) -> None:
    for i, node in enumerate(inlines):
        if isinstance(node, InlineEval):
            inlines[i] = Text(values[node.span])
        else:
            sub = getattr(node, "inlines", None)
            if sub is not None:
                _substitute_list(sub, values)


def _weave_blocks(blocks: list[Block], executions: dict[int, _Execution]):
    """Expand chunks into echo/output blocks; deferred outputs come back
    separately for the appendix."""
    woven: list[Block] = []
    appendix: list[tuple[str, list[Block]]] = []
    for block in blocks:
        if not isinstance(block, CodeChunk):
            for sub in child_block_lists(block):
                replaced, deferred = _weave_blocks(sub, executions)
                sub[:] = replaced
                appendix.extend(deferred)
            woven.append(block)
            continue
        exec_ = executions[block.index]
        opts = exec_.options
        if opts.show_code():
            woven.append(EchoedCode(opts.lang, block.code, line=block.line))
        if not opts.show_output():
            continue
        rendered = _render_result(exec_, block.line)
        if opts.defer_output:
            if rendered:
                appendix.append((opts.label(block.index), rendered))
        else:
            woven.extend(rendered)
    return woven, appendix


def _render_result(exec_: _Execution, line: int) -> list[Block]:
    """Turn kernel items into display blocks, preserving emission order."""
    opts = exec_.options
    out: list[Block] = []
    pending: list[OutputSegment] = []

    def flush():
        if pending:
            out.append(OutputBlock(list(pending), line=line))
            pending.clear()

    for item in exec_.result.items:
        if isinstance(item, OutputSegment):
            if item.kind == "message" and not opts.message:
                continue
            if item.kind == "warning" and not opts.warning:
                continue
            if item.kind == "error" and not opts.error:
                continue
            pending.append(item)
        elif isinstance(item, TableData):
            flush()
            out.append(TableBlock(item, line=line))
        elif isinstance(item, FigureRef):
            flush()
            out.append(FigureBlock(item, exec_.fig_width, exec_.fig_height,
                                   line=line))
    flush()
    return out
