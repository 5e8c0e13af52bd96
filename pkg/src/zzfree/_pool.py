"""Worker pool helper; ``ZZFREE_THREADS`` sets the default worker count."""

import os
from concurrent.futures import ThreadPoolExecutor


def n_workers(workers=None):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("ZZFREE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def parallel_map(fn, items, workers=None):
    """Map preserving input order."""
    items = list(items)
    w = n_workers(workers)
    if w == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))
