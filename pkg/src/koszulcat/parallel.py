"""Ordered parallel map, capped by ``KOSZULCAT_THREADS`` (default 1)."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("KOSZULCAT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"KOSZULCAT_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def pmap(fn, items):
    """``[fn(x) for x in items]``, possibly on threads; order is preserved."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))
