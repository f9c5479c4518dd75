"""Worker-thread count from the environment."""

from __future__ import annotations

import os

THREADS_ENV = "ENSKOG_RIGID_THREADS"


def thread_count() -> int:
    """Positive integer from ``ENSKOG_RIGID_THREADS``; 0, unset or junk -> CPU count."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n > 0:
        return n
    return max(1, os.cpu_count() or 1)
