"""Atomic text/bytes file writes: write to a temp file, then rename."""
from __future__ import annotations

from pathlib import Path

from .errors import PipelineError


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise PipelineError("io", f"cannot write {path}: {exc}") from exc


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_bytes(data)
        tmp.replace(path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise PipelineError("io", f"cannot write {path}: {exc}") from exc
