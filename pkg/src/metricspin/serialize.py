"""Deterministic text output: CSV rows, manifests, checksums.

Floats are rendered as shortest round-trip decimals (Python ``repr``)
so re-running a manifest reproduces files byte for byte on any platform
with IEEE-754 doubles.
"""

from __future__ import annotations

import hashlib
from pathlib import Path


def fmt(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def render_csv(header: str, rows) -> str:
    """Join a header line and pre-rendered row strings with newlines."""
    lines = [header]
    lines.extend(rows)
    return "\n".join(lines) + "\n"


def sha256_hex(text: str | bytes) -> str:
    data = text.encode("utf-8") if isinstance(text, str) else text
    return hashlib.sha256(data).hexdigest()


def render_manifest(pairs) -> str:
    """Flat key=value text, one pair per line."""
    return "".join(f"{k}={v}\n" for k, v in pairs)


def write_text(path, text: str) -> Path:
    """Write with unix newlines regardless of platform."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path
