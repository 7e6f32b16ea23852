#!/usr/bin/env python3
"""Rebuild the expected/ directory of every corpus case.

Run after an intentional output change, then review the diff like any
other code change:

    python3 scripts/regen_corpus.py [case-name ...]
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

from weavedown import cli

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"


def regen_case(case_dir: Path) -> None:
    sources = [p for p in case_dir.iterdir() if p.is_file()]
    with tempfile.TemporaryDirectory() as scratch:
        src_dir = Path(scratch) / "src"
        out_dir = Path(scratch) / "out"
        src_dir.mkdir()
        for source in sources:
            shutil.copy(source, src_dir / source.name)
        code = cli.main(["render", str(src_dir / "input.rmd"),
                         "--output-dir", str(out_dir)])
        if code != 0:
            raise SystemExit(f"{case_dir.name}: render failed with exit {code}")
        expected = case_dir / "expected"
        if expected.exists():
            shutil.rmtree(expected)
        # keep only files; empty directories carry no expectations
        for path in sorted(out_dir.rglob("*")):
            if path.is_file():
                target = expected / path.relative_to(out_dir)
                target.parent.mkdir(parents=True, exist_ok=True)
                shutil.copy(path, target)


def main(argv: list[str]) -> int:
    wanted = set(argv)
    cases = sorted(p for p in CORPUS.iterdir() if p.is_dir())
    if wanted:
        cases = [c for c in cases if c.name in wanted]
        missing = wanted - {c.name for c in cases}
        if missing:
            raise SystemExit(f"no such corpus case: {', '.join(sorted(missing))}")
    for case_dir in cases:
        regen_case(case_dir)
        print(f"regenerated {case_dir.name}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
