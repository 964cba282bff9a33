"""Shared helpers: stable seed derivation and atomic file writes."""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path


def derive_seed(*parts: object) -> int:
    """Return a stable 63-bit seed mixed from the given parts.

    Unlike ``hash()``, the result does not depend on interpreter
    randomization, so derived seeds are reproducible across runs and
    machines.
    """
    blob = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(blob).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write text to ``path`` via a temp file + rename.

    The target never holds partial output: on error the temp file is
    removed and the destination is untouched.
    """
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
