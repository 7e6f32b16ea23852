"""Command line front end: `weave render` and `weave check`.

Exit codes: 0 success, 1 parse or configuration problems, 2 execution
failures inside a kernel, 3 I/O failures. Usage errors follow the
argparse convention and exit 2 before any work starts.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .citations import load_bibliography
from .errors import IoError, UnknownLanguage, WeaveError, Warnings
from .frontmatter import OutputSpec, load_shared_header, merge_headers
from .htmlgen import render_document, render_slides
from .kernel import DEFAULT_EXEC_TIMEOUT, KernelRegistry
from .nodes import CodeChunk
from .parser import DEFAULT_INLINE_LANGS, iter_executables, parse_document
from .weaver import collect_chunk_options, weave_document

# output file stem suffix per output kind; figure dirs share the stem
KIND_SUFFIX = {"html_document": "", "html_slides": "-slides"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weave",
        description="Render literate documents to HTML pages and slideshows.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("sources", nargs="+", metavar="SOURCE",
                       help="input document(s)")
        p.add_argument("--kernel", action="append", default=[],
                       metavar="LANG=CMD",
                       help="register a kernel command for a language "
                            "(repeatable; overrides WEAVE_KERNEL_<LANG>)")
        p.add_argument("--strict", action="store_true",
                       help="treat warnings as errors")
        p.add_argument("--verbose", action="store_true",
                       help="also report advisory warnings")

    render = sub.add_parser("render", help="execute and render documents")
    common(render)
    render.add_argument("--output-dir", default=None,
                        help="directory for rendered files "
                             "(default: next to each source)")
    render.add_argument("--format", choices=("html", "slides", "all"),
                        default="all",
                        help="which output kinds to render (default: all "
                             "kinds named in the document header)")
    render.add_argument("--timeout-secs", type=float,
                        default=DEFAULT_EXEC_TIMEOUT, metavar="N",
                        help="per-chunk execution timeout")

    check = sub.add_parser("check",
                           help="parse and validate documents without executing")
    common(check)
    return parser


def make_registry(kernel_args: list[str]) -> KernelRegistry:
    registry = KernelRegistry()
    registry.register_from_env()
    for arg in kernel_args:
        lang, _, command = arg.partition("=")
        if not lang.strip() or not command.strip():
            raise WeaveError(f"--kernel expects LANG=CMD, got {arg!r}")
        registry.register(lang.strip(), command)
    return registry


def _read_source(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise IoError(path, str(err)) from None


def _parse_with_shared_header(path: str, registry: KernelRegistry,
                              warnings: Warnings):
    text = _read_source(path)
    langs = DEFAULT_INLINE_LANGS | set(registry.langs())
    doc = parse_document(text, inline_langs=langs, warnings=warnings)
    shared = load_shared_header(os.path.dirname(os.path.abspath(path)), warnings)
    if shared is not None:
        doc.front = merge_headers(shared, doc.front)
    return doc


def _specs_to_render(front, fmt: str) -> list[OutputSpec]:
    if fmt == "all":
        return list(front.outputs)
    kind = "html_document" if fmt == "html" else "html_slides"
    for spec in front.outputs:
        if spec.kind == kind:
            return [spec]
    return [OutputSpec(kind=kind)]  # not named in the header: use defaults


def render_file(path: str, args, registry: KernelRegistry) -> list[str]:
    """Render one source to every requested output; returns written paths."""
    warnings = Warnings()
    source_dir = os.path.dirname(os.path.abspath(path))
    out_dir = os.path.abspath(args.output_dir) if args.output_dir else source_dir
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(path))[0]

    front = _parse_with_shared_header(path, registry, warnings).front
    pages: list[tuple[str, str]] = []
    for spec in _specs_to_render(front, args.format):
        # fresh parse per output: weaving mutates the tree, and every
        # render must start from a clean workspace anyway
        doc = _parse_with_shared_header(path, registry, warnings)
        out_stem = stem + KIND_SUFFIX[spec.kind]
        figure_dir_name = f"{out_stem}_files"
        woven = weave_document(
            doc, spec, registry,
            figure_dir=os.path.join(out_dir, figure_dir_name),
            figure_dir_name=figure_dir_name,
            source_dir=source_dir,
            warnings=warnings,
            exec_timeout=args.timeout_secs,
        )
        if spec.kind == "html_slides":
            page = render_slides(woven, stem, path, warnings)
        else:
            page = render_document(woven, stem, warnings)
        pages.append((os.path.join(out_dir, out_stem + ".html"), page))

    for message in warnings.messages(args.verbose):
        print(f"{path}: {message}", file=sys.stderr)
    if args.strict:
        warnings.raise_if_strict()

    written = []
    for out_path, page in pages:
        try:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(page)
        except OSError as err:
            raise IoError(out_path, str(err)) from None
        written.append(out_path)
    return written


def check_file(path: str, args, registry: KernelRegistry) -> None:
    """Validate structure, chunk headers, languages, and bibliography."""
    warnings = Warnings()
    doc = _parse_with_shared_header(path, registry, warnings)
    options = collect_chunk_options(doc)
    known = set(registry.langs())
    for _, node in iter_executables(doc.blocks):
        lang = options[node.index].lang if isinstance(node, CodeChunk) else node.lang
        if lang not in known:
            raise UnknownLanguage(lang, node.line)
    if doc.front.bibliography:
        source_dir = os.path.dirname(os.path.abspath(path))
        load_bibliography(os.path.join(source_dir, doc.front.bibliography))
    for message in warnings.messages(args.verbose):
        print(f"{path}: {message}", file=sys.stderr)
    if args.strict:
        warnings.raise_if_strict()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        registry = make_registry(args.kernel)
    except WeaveError as err:
        print(f"error: {err.diagnostic()}", file=sys.stderr)
        return err.exit_class
    for path in args.sources:
        try:
            if args.command == "render":
                for out_path in render_file(path, args, registry):
                    print(f"wrote {out_path}")
            else:
                check_file(path, args, registry)
                print(f"{path}: ok")
        except WeaveError as err:
            print(f"error: {err.diagnostic(path)}", file=sys.stderr)
            return err.exit_class
    return 0


if __name__ == "__main__":
    sys.exit(main())
