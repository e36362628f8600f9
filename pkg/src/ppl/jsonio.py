"""Canonical JSON writing.

Reports must be byte-identical across runs, so documents are built with a
fixed key order everywhere and serialized with one formatting convention
(two-space indent, no key sorting, trailing newline).
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_json_bytes(doc) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n").encode("utf-8")


def write_json(path: str | Path, doc) -> None:
    Path(path).write_bytes(canonical_json_bytes(doc))


def read_json(path: str | Path):
    raw = Path(path).read_text(encoding="utf-8")
    return json.loads(raw)


def write_csv_lines(path: str | Path, lines: list[str]) -> None:
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
