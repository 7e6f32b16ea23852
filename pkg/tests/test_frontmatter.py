"""Front-matter subset: parsing, defaults, merge, round-trip."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from weavedown.errors import MalformedHeader, Warnings
from weavedown.frontmatter import (
    FrontMatter, OutputSpec, header_text, merge_headers, parse_front_matter,
    parse_header_lines,
)


def parse(text: str):
    return parse_front_matter(text, Warnings())


def test_no_header_gives_defaults():
    fm, body, start = parse("Just a paragraph.\n")
    assert fm == FrontMatter()
    assert body == "Just a paragraph.\n"
    assert start == 1


def test_scalar_fields_and_scalar_output():
    fm, body, start = parse(
        "---\n"
        'title: "Homework 1"\n'
        "author: Frida Gomam\n"
        "date: 2015-01-15\n"
        "output: html_document\n"
        "---\n"
        "Body here.\n"
    )
    assert fm.title == "Homework 1"
    assert fm.author == "Frida Gomam"
    assert fm.date == "2015-01-15"
    assert fm.outputs == [OutputSpec(kind="html_document")]
    assert body == "Body here.\n"
    assert start == 7


def test_body_lines_keep_absolute_numbers():
    text = "---\ntitle: x\n---\n\nFirst body line\n"
    _, body, start = parse(text)
    lines = text.split("\n")
    assert lines[start - 1 + 1] == "First body line"


def test_nested_output_options():
    fm, _, _ = parse(
        "---\n"
        "output:\n"
        "  html_document:\n"
        "    toc: true\n"
        "    theme: dark\n"
        "  html_slides:\n"
        "    widescreen: true\n"
        "    transition: slower\n"
        "---\n"
    )
    doc, slides = fm.outputs
    assert doc.kind == "html_document" and doc.toc and doc.theme == "dark"
    assert slides.kind == "html_slides" and slides.widescreen
    assert slides.transition == "slower"


def test_top_level_figure_defaults_fold_into_outputs():
    fm, _, _ = parse("---\nfig_width: 4\nfig_height: 3.5\n---\n")
    spec = fm.primary_output()
    assert spec.fig_width == 4.0
    assert spec.fig_height == 3.5


def test_unknown_keys_collect_as_extras():
    warnings = Warnings()
    fm, _, _ = parse_front_matter("---\nkeywords: alpha\n---\n", warnings)
    assert fm.extras == {"keywords": "alpha"}
    assert warnings.messages(verbose=True)
    assert not warnings.messages(verbose=False)  # advisory only


@pytest.mark.parametrize(
    "header",
    [
        "---\ntitle: a\ntitle: b\n---\n",      # duplicate key
        "---\ntitle: x\n",                      # unterminated header
        "---\noutput: pdf_document\n---\n",     # unknown output kind
        "---\noutput:\n  html_document:\n    toc: maybe\n---\n",
        "---\noutput:\n  html_document:\n    fig_width: -2\n---\n",
        "---\noutput:\n  html_slides:\n    transition: sideways\n---\n",
        "---\ntitle:\n  nested: no\n---\n",     # nesting under a text key
        "---\noutput:\n  html_document:\n    toc: true\n    toc: true\n---\n",
    ],
)
def test_malformed_headers_raise(header):
    with pytest.raises(MalformedHeader):
        parse(header)


def test_malformed_header_reports_line():
    with pytest.raises(MalformedHeader) as err:
        parse("---\ntitle: a\nbroken line without colon\n---\n")
    assert err.value.line == 3


def test_quoted_and_bare_scalars_agree():
    a, _, _ = parse('---\ntitle: "Plain"\n---\n')
    b, _, _ = parse("---\ntitle: Plain\n---\n")
    assert a.title == b.title == "Plain"


def test_parse_header_lines_without_fences():
    fm = parse_header_lines(["toc: true", "author: Shared"], 1, Warnings())
    assert fm.author == "Shared"
    assert all(spec.toc for spec in fm.outputs)


# -- merge ---------------------------------------------------------------------


def test_local_nondefault_wins():
    shared = parse_header_lines(["title: Shared", "author: Team"], 1)
    local = parse_header_lines(["title: Mine"], 1)
    merged = merge_headers(shared, local)
    assert merged.title == "Mine"
    assert merged.author == "Team"


def test_outputs_merge_all_or_nothing():
    shared = parse_header_lines(
        ["output:", "  html_document:", "    toc: true"], 1)
    local = parse_header_lines(
        ["output:", "  html_slides:", "    widescreen: true"], 1)
    merged = merge_headers(shared, local)
    assert [s.kind for s in merged.outputs] == ["html_slides"]

    merged_default = merge_headers(shared, parse_header_lines(["title: x"], 1))
    assert [s.kind for s in merged_default.outputs] == ["html_document"]
    assert merged_default.primary_output().toc


_scalar_text = st.text(
    st.characters(whitelist_categories=("L", "N"), whitelist_characters=" -_."),
    min_size=1, max_size=20,
).map(str.strip).filter(bool)

_specs = st.builds(
    OutputSpec,
    kind=st.sampled_from(["html_document", "html_slides"]),
    toc=st.booleans(),
    theme=st.sampled_from(["default", "dark"]),
    fig_width=st.sampled_from([4.0, 5.5, 7.0, 10.0]),
    fig_height=st.sampled_from([3.0, 5.0, 7.25]),
    widescreen=st.booleans(),
    transition=st.sampled_from(["default", "slower", "faster"]),
)

_fronts = st.builds(
    FrontMatter,
    title=st.none() | _scalar_text,
    author=st.none() | _scalar_text,
    date=st.none() | _scalar_text,
    bibliography=st.none() | _scalar_text,
    logo=st.none() | _scalar_text,
    outputs=st.lists(_specs, min_size=1, max_size=2,
                     unique_by=lambda s: s.kind),
)


@given(_fronts)
def test_header_round_trips(fm):
    text = header_text(fm)
    reparsed = parse_header_lines(text.split("\n"), 1, Warnings())
    assert reparsed == fm


@given(_fronts)
def test_merge_is_idempotent(fm):
    assert merge_headers(fm, fm) == fm


@given(_fronts)
def test_merge_with_defaults_is_identity(fm):
    assert merge_headers(FrontMatter(), fm) == fm
    merged = merge_headers(fm, FrontMatter())
    assert merged == fm
