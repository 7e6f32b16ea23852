"""Shared fixtures: in-process CLI driver and document scratch dirs."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass

import pytest

sys.path.insert(0, os.path.dirname(__file__))  # refcalc, htmlcheck

from weavedown import cli


@dataclass
class RenderOutcome:
    code: int
    out: str
    err: str
    out_dir: str

    def page(self, name: str) -> str:
        path = os.path.join(self.out_dir, name)
        with open(path, encoding="utf-8") as fh:
            return fh.read()

    def files(self) -> list[str]:
        found = []
        for root, _, names in os.walk(self.out_dir):
            for name in names:
                full = os.path.join(root, name)
                found.append(os.path.relpath(full, self.out_dir))
        return sorted(found)


@pytest.fixture
def run_weave(tmp_path, capsys):
    """Write a document, run the CLI in process, capture everything."""

    def run(text: str, *extra: str, name: str = "doc.rmd",
            command: str = "render", aux: dict[str, str] | None = None,
            subdir: str = "out") -> RenderOutcome:
        src_dir = tmp_path / "src"
        src_dir.mkdir(exist_ok=True)
        source = src_dir / name
        source.write_text(text, encoding="utf-8")
        for aux_name, aux_text in (aux or {}).items():
            (src_dir / aux_name).write_text(aux_text, encoding="utf-8")
        out_dir = tmp_path / subdir
        argv = [command, str(source)]
        if command == "render":
            argv += ["--output-dir", str(out_dir)]
        argv += list(extra)
        code = cli.main(argv)
        captured = capsys.readouterr()
        return RenderOutcome(code, captured.out, captured.err, str(out_dir))

    return run
