"""Chunk option headers: grammar, validation, layered resolution."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from weavedown.chunks import (
    ChunkOptions, effective_options, parse_chunk_options,
)
from weavedown.errors import (
    BadValue, DuplicateKey, UnknownLanguage, UnknownOption,
)


def test_lang_only():
    opts = parse_chunk_options("calc", 1)
    assert opts.lang == "calc"
    assert opts.name is None
    assert opts == ChunkOptions(lang="calc")


def test_lang_and_name():
    opts = parse_chunk_options("calc setup", 1)
    assert opts.name == "setup"


def test_key_values_r_style_booleans():
    opts = parse_chunk_options(
        "calc fit, echo=FALSE, message=false, warning=TRUE, error=true", 3)
    assert not opts.echo and not opts.message
    assert opts.warning and opts.error


def test_dot_and_underscore_spellings_agree():
    a = parse_chunk_options("calc, fig.width=4, fig.height=3", 1)
    b = parse_chunk_options("calc, fig_width=4, fig_height=3", 1)
    assert (a.fig_width, a.fig_height) == (b.fig_width, b.fig_height) == (4.0, 3.0)


def test_results_accepts_quoted_and_bare():
    assert parse_chunk_options("calc, results='hide'", 1).results == "hide"
    assert parse_chunk_options("calc, results=hide", 1).results == "hide"
    assert parse_chunk_options('calc, results="markup"', 1).results == "markup"


def test_globals_pseudo_option():
    opts = parse_chunk_options("calc, globals=TRUE, echo=FALSE", 1)
    assert opts.set_globals
    assert "globals" not in opts.explicit
    assert opts.explicit == {"echo": False}


@pytest.mark.parametrize(
    "raw, err",
    [
        ("", UnknownLanguage),
        ("calc two words here", BadValue),
        ("calc, mystery=1", UnknownOption),
        ("calc, echo=5", BadValue),
        ("calc, results=both", BadValue),
        ("calc, fig.width=0", BadValue),
        ("calc, fig.width=-3", BadValue),
        ("calc, fig.width=TRUE", BadValue),
        ("calc, echo", BadValue),
        ("calc, echo=TRUE, echo=TRUE", DuplicateKey),
        ("calc, fig.width=1, fig_width=2", DuplicateKey),
    ],
)
def test_malformed_headers(raw, err):
    with pytest.raises(err):
        parse_chunk_options(raw, 7)


def test_errors_carry_the_header_line():
    with pytest.raises(UnknownOption) as err:
        parse_chunk_options("calc, nope=1", 42)
    assert err.value.line == 42


def test_effective_options_layering():
    layer = {"echo": False, "fig_width": 4.0}
    own = parse_chunk_options("calc mine, fig.width=9", 1)
    merged = effective_options(own, layer)
    assert merged.echo is False          # from the layer
    assert merged.fig_width == 9.0       # own key wins
    assert merged.lang == "calc" and merged.name == "mine"


def test_empty_layer_is_identity():
    own = parse_chunk_options("calc, echo=FALSE, results=hide", 1)
    assert effective_options(own, {}) == own


# -- visibility truth table --------------------------------------------------

@pytest.mark.parametrize("echo", [True, False])
@pytest.mark.parametrize("include", [True, False])
@pytest.mark.parametrize("results", ["markup", "hide"])
@pytest.mark.parametrize("message", [True, False])
def test_visibility_rules(echo, include, results, message):
    opts = ChunkOptions(lang="calc", echo=echo, include=include,
                        results=results, message=message)
    assert opts.show_code() == (include and echo)
    assert opts.show_output() == (include and results == "markup")
    assert opts.show_messages() == (opts.show_output() and message)


@given(
    st.booleans(), st.booleans(), st.booleans(),
    st.sampled_from(["markup", "hide"]),
)
def test_hidden_chunks_show_nothing(echo, include, warning, results):
    opts = ChunkOptions(lang="calc", echo=echo, include=include,
                        warning=warning, results=results)
    if not include:
        assert not opts.show_code()
        assert not opts.show_output()
        assert not opts.show_warnings()
