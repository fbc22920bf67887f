from collections import Counter
from concurrent.futures import ThreadPoolExecutor


def map_sessions(fn, sessions, threads=1):
    """``[fn(s) for s in sessions]``, optionally on a thread pool.

    Results come back in session order whatever the completion order, and
    callers only merge them with commutative integer addition.
    """
    sessions = list(sessions)
    if threads <= 1 or len(sessions) < 2:
        return [fn(s) for s in sessions]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, sessions))


def count_sessions(fn, sessions, threads=1) -> Counter:
    """Merge the per-session Counters from ``fn`` in place (``sum`` would copy each time)."""
    total = Counter()
    for part in map_sessions(fn, sessions, threads):
        total.update(part)
    return total
