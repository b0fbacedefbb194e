"""Deterministic parallel map capped by the TRANSVERSAL_THREADS variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("TRANSVERSAL_THREADS", "1")))
    except ValueError:
        return 1


def pmap(func, items):
    """``[func(x) for x in items]``, possibly on a thread pool; order is preserved."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
