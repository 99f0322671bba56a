"""Staged file output: write next to the target, then rename into place."""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator


@contextmanager
def atomic_output(path: str | Path, mode: str = "w", **kwargs) -> Iterator[IO]:
    """Open a staged temporary file that replaces ``path`` only on success.

    If the ``with`` body raises, the staged file is removed and ``path`` is
    left untouched.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode=mode,
        dir=str(target.parent),
        prefix=f".{target.name}.",
        suffix=".staged",
        delete=False,
        **kwargs,
    )
    staged = Path(handle.name)
    try:
        with handle:
            yield handle
        os.replace(staged, target)
    except BaseException:
        staged.unlink(missing_ok=True)
        raise
