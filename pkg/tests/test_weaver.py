"""Weaving semantics: visibility, globals layering, deferral, inlines."""

from __future__ import annotations

import pytest

from weavedown.errors import (
    ChunkExecutionError, DuplicateChunkName, InlineEvalError,
    MultilineInlineResult, UnknownLanguage,
)
from weavedown.frontmatter import OutputSpec
from weavedown.kernel import ChunkResult, KernelRegistry
from weavedown.nodes import (
    EchoedCode, FigureBlock, Heading, OutputBlock, Paragraph, TableBlock,
    Text, walk_blocks,
)
from weavedown.parser import parse_document
from weavedown.weaver import collect_chunk_options, weave_document


def weave(text, tmp_path, spec=None, registry=None, warnings=None):
    doc = parse_document(text)
    spec = spec or doc.front.primary_output()
    registry = registry or KernelRegistry()
    return weave_document(doc, spec, registry, str(tmp_path / "doc_files"),
                          "doc_files", str(tmp_path), warnings)


def blocks_of(woven, kind):
    return [b for b in walk_blocks(woven.blocks) if isinstance(b, kind)]


def test_chunk_expands_to_echo_then_output(tmp_path):
    woven = weave("```{calc}\nprint(3)\n2 + 2\n```\n", tmp_path)
    echo, output = woven.blocks
    assert isinstance(echo, EchoedCode)
    assert echo.lang == "calc" and echo.text == "print(3)\n2 + 2"
    assert isinstance(output, OutputBlock)
    assert [(s.kind, s.text) for s in output.segments] == \
        [("stdout", "3"), ("value", "4")]


def test_echo_false_keeps_output_only(tmp_path):
    woven = weave("```{calc, echo=FALSE}\n1 + 1\n```\n", tmp_path)
    assert not blocks_of(woven, EchoedCode)
    assert len(blocks_of(woven, OutputBlock)) == 1


def test_include_false_still_executes(tmp_path):
    text = ("```{calc, include=FALSE}\nn = 21\n```\n\n"
            "Total: `calc n * 2`.\n")
    woven = weave(text, tmp_path)
    assert not blocks_of(woven, EchoedCode)
    assert not blocks_of(woven, OutputBlock)
    para = blocks_of(woven, Paragraph)[0]
    assert "".join(t.text for t in para.inlines) == "Total: 42."


def test_results_hide_drops_streams_figures_tables(tmp_path):
    text = '```{calc, results="hide"}\nprint(1)\nplot(1, 2)\ntable("a"; 1)\n```\n'
    woven = weave(text, tmp_path)
    assert len(blocks_of(woven, EchoedCode)) == 1
    assert not blocks_of(woven, OutputBlock)
    assert not blocks_of(woven, FigureBlock)
    assert not blocks_of(woven, TableBlock)


def test_message_and_warning_toggles(tmp_path):
    code = '```{calc, message=FALSE}\nwarn("w")\nmessage("m")\nprint("p")\n```\n'
    woven = weave(code, tmp_path)
    segs = blocks_of(woven, OutputBlock)[0].segments
    assert [s.kind for s in segs] == ["warning", "stdout"]

    code = '```{calc, warning=FALSE}\nwarn("w")\nprint("p")\n```\n'
    woven = weave(code, tmp_path)
    segs = blocks_of(woven, OutputBlock)[0].segments
    assert [s.kind for s in segs] == ["stdout"]


def test_error_false_raises_with_document_line(tmp_path):
    text = "# T\n\n```{calc fit}\nx = 1\nboom\n```\n"
    with pytest.raises(ChunkExecutionError) as err:
        weave(text, tmp_path)
    # fence on line 3, failure on the second cell line
    assert err.value.line == 5
    assert "fit" in str(err.value)
    assert "boom" in str(err.value)


def test_error_true_shows_segment_and_continues(tmp_path):
    text = ("```{calc, error=TRUE}\nboom\n```\n\n"
            "```{calc}\n1 + 1\n```\n")
    woven = weave(text, tmp_path)
    outputs = blocks_of(woven, OutputBlock)
    assert [s.kind for s in outputs[0].segments] == ["error"]
    assert [s.text for s in outputs[1].segments] == ["2"]


def test_globals_layer_applies_only_to_later_chunks(tmp_path):
    text = ("```{calc, echo=FALSE, globals=TRUE}\nx = 1\n```\n\n"
            "```{calc}\nx\n```\n")
    woven = weave(text, tmp_path)
    # both chunks end up silent on the code side: the first by its own
    # option, the second through the inherited layer
    assert not blocks_of(woven, EchoedCode)
    assert len(blocks_of(woven, OutputBlock)) == 1


def test_globals_replacement_is_wholesale(tmp_path):
    text = ("```{calc, echo=FALSE, globals=TRUE}\nx = 1\n```\n\n"
            "```{calc, globals=TRUE, message=FALSE}\nx = 2\n```\n\n"
            "```{calc}\nmessage(\"m\")\nx\n```\n")
    woven = weave(text, tmp_path)
    # second globals chunk dropped echo=FALSE, so chunk three echoes again
    echoes = blocks_of(woven, EchoedCode)
    assert [e.text for e in echoes] == ['message("m")\nx']
    segs = blocks_of(woven, OutputBlock)[-1].segments
    assert [s.kind for s in segs] == ["value"]  # message filtered by layer


def test_explicit_option_beats_global_layer(tmp_path):
    text = ("```{calc, echo=FALSE, globals=TRUE}\nx = 1\n```\n\n"
            "```{calc, echo=TRUE}\nx\n```\n")
    woven = weave(text, tmp_path)
    assert len(blocks_of(woven, EchoedCode)) == 1


def test_defer_moves_output_to_appendix(tmp_path):
    text = ("```{calc setup, defer_output=TRUE}\nplot(1, 2)\nprint(9)\n```\n\n"
            "done\n")
    woven = weave(text, tmp_path)
    kinds = [type(b).__name__ for b in woven.blocks]
    assert kinds == ["EchoedCode", "Paragraph", "Heading", "Heading",
                     "FigureBlock", "OutputBlock"]
    h1, h2 = woven.blocks[2], woven.blocks[3]
    assert h1.level == 1 and h1.attrs == ["appendix"]
    assert h2.level == 2 and h2.inlines == [Text("setup")]


def test_defer_conserves_output_blocks(tmp_path):
    plain = weave("```{calc}\nplot(1, 2)\n1 + 1\n```\n", tmp_path / "a")
    deferred = weave("```{calc, defer_output=TRUE}\nplot(1, 2)\n1 + 1\n```\n",
                     tmp_path / "b")
    def shape(woven):
        return sorted(
            (type(b).__name__ for b in walk_blocks(woven.blocks)
             if isinstance(b, (OutputBlock, FigureBlock))))
    assert shape(plain) == shape(deferred)


def test_defer_with_nothing_to_show_adds_no_appendix(tmp_path):
    text = '```{calc, defer_output=TRUE, results="hide"}\nplot(1, 2)\n```\n'
    woven = weave(text, tmp_path)
    assert not blocks_of(woven, Heading)


def test_figure_sizes_resolve_chunk_over_spec(tmp_path):
    spec = OutputSpec(fig_width=6.0, fig_height=4.0)
    text = ("```{calc}\nplot(1, 2)\n```\n\n"
            "```{calc, fig.width=3, fig.height=2}\nplot(1, 2)\n```\n")
    woven = weave(text, tmp_path, spec=spec)
    figures = blocks_of(woven, FigureBlock)
    assert [(f.width, f.height) for f in figures] == [(6.0, 4.0), (3.0, 2.0)]
    assert (tmp_path / "doc_files" / "chunk-1-1.svg").is_file()


def test_fresh_workspace_every_weave(tmp_path):
    weave("```{calc}\nx = 1\n```\n", tmp_path)
    with pytest.raises(ChunkExecutionError):
        weave("```{calc}\nx\n```\n", tmp_path)


def test_figure_dir_name_only_when_code_ran(tmp_path):
    assert weave("plain text\n", tmp_path).figure_dir_name is None
    assert weave("`calc 1`\n", tmp_path).figure_dir_name == "doc_files"


def test_inline_substitution_inside_emphasis(tmp_path):
    woven = weave("*total `calc 2 + 3`*\n", tmp_path)
    emph = blocks_of(woven, Paragraph)[0].inlines[0]
    assert emph.inlines == [Text("total "), Text("5")]


def test_chunk_inside_quote_is_woven_in_place(tmp_path):
    woven = weave("> before\n>\n> ```{calc}\n> 1 + 1\n> ```\n", tmp_path)
    quote = woven.blocks[0]
    assert [type(b).__name__ for b in quote.blocks] == \
        ["Paragraph", "EchoedCode", "OutputBlock"]


def test_unknown_chunk_language(tmp_path):
    with pytest.raises(UnknownLanguage) as err:
        weave("```{py}\n1\n```\n", tmp_path)
    assert err.value.line == 1


def test_duplicate_chunk_names_rejected(tmp_path):
    doc = parse_document("```{calc one}\n1\n```\n\n```{calc one}\n2\n```\n")
    with pytest.raises(DuplicateChunkName):
        collect_chunk_options(doc)


def test_bibliography_appends_references_after_appendix(tmp_path):
    (tmp_path / "refs.bib").write_text(
        "@misc{a, author = {Jo Field}, year = 2001, title = {T}}\n",
        encoding="utf-8")
    text = ("---\ntitle: x\nbibliography: refs.bib\n---\n\n"
            "cite [@a]\n\n"
            "```{calc, defer_output=TRUE}\nprint(1)\n```\n")
    woven = weave(text, tmp_path)
    heads = [(h.level, h.attrs) for h in blocks_of(woven, Heading)]
    assert heads == [(1, ["appendix"]), (2, []), (1, ["references"])]
    para = blocks_of(woven, Paragraph)[0]
    assert para.inlines == [Text("cite (Field 2001)")]


# -- stubbed sessions for inline failure modes -----------------------------------


class StubSession:
    langs = ["calc"]

    def __init__(self, eval_reply):
        self.eval_reply = eval_reply

    def exec_chunk(self, code, w, h, stem):
        return ChunkResult(True, [])

    def eval_inline(self, expr):
        return self.eval_reply

    def shutdown(self):
        pass


class StubRegistry:
    def __init__(self, session):
        self._session = session

    def create(self, lang, figure_dir, timeout, line=0):
        return self._session


def test_inline_eval_error_carries_line(tmp_path):
    registry = StubRegistry(StubSession((False, "no such name")))
    with pytest.raises(InlineEvalError) as err:
        weave("line one\n\nbad `calc ghost` here\n", tmp_path,
              registry=registry)
    assert err.value.line == 3
    assert "ghost" in str(err.value)


def test_multiline_inline_result_rejected(tmp_path):
    registry = StubRegistry(StubSession((True, "two\nlines")))
    with pytest.raises(MultilineInlineResult):
        weave("v: `calc 1`\n", tmp_path, registry=registry)
