#!/usr/bin/env python3
"""Render every document in demo/ to demo-build/.

A smoke run over real documents: homework page, dark slide deck, and a
cited analysis with a deferred appendix. Pass --open to print file://
URLs ready to paste into a browser.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from weavedown import cli  # noqa: E402


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(REPO / "demo-build"),
                    help="output directory (default: demo-build/)")
    ap.add_argument("--open", action="store_true",
                    help="print file:// URLs for the rendered pages")
    args = ap.parse_args(argv)

    sources = sorted((REPO / "demo").glob("*.rmd"))
    if not sources:
        print("no demo documents found", file=sys.stderr)
        return 3
    code = cli.main(["render", *map(str, sources), "--output-dir", args.out])
    if code != 0:
        return code
    if args.open:
        for page in sorted(Path(args.out).glob("*.html")):
            print(f"file://{page.resolve()}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
