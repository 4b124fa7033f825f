"""Plain ``key=value`` config files: one pair per line, ``#`` comments."""

from __future__ import annotations

import os

from .errors import ParseError


def parse_kv(text: str) -> dict[str, str]:
    """Parse key=value lines; later duplicates of a key win."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ParseError("empty key", line=lineno)
        out[key] = value.strip()
    return out


def load_kv(path: str | os.PathLike) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return parse_kv(fh.read())


def format_kv(pairs: dict[str, str]) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs.items())


def save_kv(pairs: dict[str, str], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_kv(pairs))
