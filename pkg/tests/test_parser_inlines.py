"""Inline scanning: delimiters, spans, degradation to literal text."""

from __future__ import annotations

from hypothesis import given, settings, strategies as st

from weavedown.nodes import (
    CodeLiteral, Emph, Image, InlineEval, Link, Math, Strikeout, Strong,
    Subscript, Superscript, Text,
)
from weavedown.parser import parse_inlines


def test_strong_and_emph_both_delimiters():
    assert parse_inlines("**bold**") == [Strong([Text("bold")])]
    assert parse_inlines("__bold__") == [Strong([Text("bold")])]
    assert parse_inlines("*it*") == [Emph([Text("it")])]
    assert parse_inlines("_it_") == [Emph([Text("it")])]


def test_emphasis_needs_tight_flanks():
    assert parse_inlines("a * b * c") == [Text("a * b * c")]
    assert parse_inlines("* spaced*") == [Text("* spaced*")]
    assert parse_inlines("**") == [Text("**")]


def test_underscore_stays_literal_inside_words():
    assert parse_inlines("snake_case_name") == [Text("snake_case_name")]


def test_nested_emphasis_one_level():
    (strong,) = parse_inlines("**really *very* bold**")
    assert strong == Strong([Text("really "), Emph([Text("very")]),
                             Text(" bold")])


def test_link_and_image():
    link, _, image = parse_inlines(
        "[docs](https://example.org/a) and ![alt text](fig.png)")
    assert link == Link([Text("docs")], "https://example.org/a")
    assert image == Image("alt text", "fig.png")


def test_unclosed_link_is_literal():
    assert parse_inlines("[no close](oops") == [Text("[no close](oops")]


def test_backtick_code_literal():
    assert parse_inlines("`x + 1`") == [CodeLiteral("x + 1")]


def test_backtick_with_known_language_is_inline_eval():
    (ev,) = parse_inlines("`calc n + 1`")
    assert isinstance(ev, InlineEval)
    assert ev.lang == "calc"
    assert ev.expr == "n + 1"


def test_r_style_inline_marker_parses_without_a_kernel():
    (ev,) = parse_inlines("`r nrow(cars)`")
    assert isinstance(ev, InlineEval)
    assert ev.lang == "r"
    assert ev.expr == "nrow(cars)"


def test_unknown_first_word_stays_code():
    (code,) = parse_inlines("`zsh echo hi`")
    assert isinstance(code, CodeLiteral)


def test_extra_langs_extend_inline_vocabulary():
    (ev,) = parse_inlines("`lua x`", langs={"lua"})
    assert isinstance(ev, InlineEval) and ev.lang == "lua"


def test_superscript_subscript_strikeout():
    assert parse_inlines("x^2^") == [Text("x"), Superscript([Text("2")])]
    assert parse_inlines("H~2~O") == [Text("H"), Subscript([Text("2")]),
                                      Text("O")]
    assert parse_inlines("~~gone~~") == [Strikeout([Text("gone")])]


def test_tight_marks_reject_whitespace():
    assert parse_inlines("a ~5 or ~6") == [Text("a ~5 or ~6")]
    assert parse_inlines("2^ 2^") == [Text("2^ 2^")]


def test_math_is_verbatim():
    (math,) = parse_inlines("$e = mc^2$")
    assert math == Math("e = mc^2")
    # no superscript parsed inside, and $ needs a closer
    assert parse_inlines("price is $5") == [Text("price is $5")]


def test_unmatched_delimiters_are_literal():
    assert parse_inlines("**open") == [Text("**open")]
    assert parse_inlines("`tick") == [Text("`tick")]
    assert parse_inlines("~tilde") == [Text("~tilde")]


_inline_alphabet = st.sampled_from(list("ax *_`^~$[]()!@#\\\"1."))


@settings(max_examples=400, deadline=None)
@given(st.text(alphabet=_inline_alphabet, max_size=32))
def test_inline_scan_is_total_and_lossless_for_plain_text(text):
    nodes = parse_inlines(text)
    assert isinstance(nodes, list)
    # a scan of pure letters must round-trip exactly
    if text and all(c.isalnum() or c == " " for c in text):
        assert nodes == [Text(text)]
