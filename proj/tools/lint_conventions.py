#!/usr/bin/env python3
"""Fails if a sign convention is hard-coded outside the conventions module.

Flags, in src/, include/ and tools/:
  * numeric literals of the circle constant (3.14159..., M_PI)
  * Levi-Civita entries assigned a literal +-1
  * parity matrices written out entry by entry
  * the frozen epsilon orientation used outside conventions and the symbol table
"""

import pathlib
import re
import sys

ROOT = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".").resolve()

RULES = [
    (re.compile(r"\b3\.14159|\b6\.28318|\b1\.57079|\bM_PI\b"), "numeric circle constant", set()),
    (re.compile(r"\beps\w*\s*(\[[^\]]*\]|\([^)]*\))+\s*=\s*[-+]?\s*1\b"), "literal Levi-Civita entry", set()),
    (re.compile(r"\b(parity|pi)\s*=\s*CMat::from_rows"), "parity matrix written out", set()),
    (re.compile(r"\bkEpsilonLower\b"), "epsilon orientation used directly",
     {"include/topo/conventions.hpp", "src/conventions.cpp", "src/algebra.cpp"}),
]

EXTS = {".cpp", ".hpp", ".h", ".cc"}


def main() -> int:
    problems = []
    for sub in ("src", "include", "tools"):
        for path in sorted((ROOT / sub).rglob("*")):
            if path.suffix not in EXTS:
                continue
            rel = path.relative_to(ROOT).as_posix()
            for n, line in enumerate(path.read_text().splitlines(), 1):
                code = line.split("//", 1)[0]
                for rx, what, allowed in RULES:
                    if rel in allowed:
                        continue
                    if rx.search(code):
                        problems.append(f"{rel}:{n}: {what}: {line.strip()}")
    for p in problems:
        print(p)
    print(f"lint: {len(problems)} problem(s)")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
