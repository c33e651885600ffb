"""Order-preserving parallel map for verification sweeps."""
from concurrent.futures import ThreadPoolExecutor

_jobs = 1


def set_default_jobs(n: int) -> None:
    global _jobs
    _jobs = max(1, int(n))


def sweep(fn, items, jobs=None):
    """``[fn(x) for x in items]``, possibly on a thread pool; order is kept."""
    items = list(items)
    jobs = _jobs if jobs is None else jobs
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
