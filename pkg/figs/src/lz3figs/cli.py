"""Batch renderer: ``lz3-render <csv>... --out <dir>``.

Each input CSV becomes ``<dir>/<stem>.png``.  Any malformed input aborts
with a nonzero exit code before an image is written for it.
"""

from __future__ import annotations

import os
import sys

from .csvio import TableFormatError
from .render import FigureJob, render


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out_dir = "."
    paths = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token == "--out":
            if i + 1 >= len(argv):
                print("error: --out expects a directory", file=sys.stderr)
                return 1
            out_dir = argv[i + 1]
            i += 1
        elif token.startswith("-"):
            print(f"error: unknown flag {token!r}", file=sys.stderr)
            return 1
        else:
            paths.append(token)
        i += 1
    if not paths:
        print("usage: lz3-render <csv>... --out <dir>", file=sys.stderr)
        return 1
    os.makedirs(out_dir, exist_ok=True)
    for path in paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        out_path = os.path.join(out_dir, f"{stem}.png")
        try:
            result = render(FigureJob(csv_path=path, out_path=out_path))
        except (TableFormatError, OSError, ValueError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {result.out_path} ({result.kind})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
