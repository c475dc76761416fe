"""Atomic file output: write to a sibling temp file, then rename over the target."""
from __future__ import annotations

import logging
import os
from pathlib import Path
import tempfile
from typing import Union

from .errors import IoFailure

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write ``text`` to ``path`` so readers never observe a truncated file."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    except OSError as exc:
        raise IoFailure(target, f"cannot create output: {exc}") from exc

    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except OSError as exc:
        Path(tmp_name).unlink(missing_ok=True)
        raise IoFailure(target, f"write failed: {exc}") from exc

    logger.debug("wrote %d bytes to %s", len(text.encode("utf-8")), target)
    return target


def read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(path, f"cannot read: {exc}") from exc


__all__ = ["atomic_write_text", "read_bytes"]
