"""In-process world construction: one thread per rank over loopback TCP."""

import threading

from mmpi import runtime
from mmpi.transport import ClusterConfig, WorldHandle, bind_head, head_start, worker_join


def make_world(nranks, timeout=15.0):
    """Spin up a head plus nranks-1 workers; returns handles ordered by rank."""
    listener = bind_head(ClusterConfig(head_address="127.0.0.1:0",
                                       expected_workers=nranks - 1,
                                       connect_timeout=timeout))
    port = listener.getsockname()[1]
    config = ClusterConfig(head_address=f"127.0.0.1:{port}",
                           expected_workers=nranks - 1,
                           connect_timeout=timeout)
    out = {}
    errors = []

    def head():
        try:
            out[0] = head_start(config, listener=listener)
        except BaseException as exc:
            errors.append(exc)

    def worker():
        try:
            handle = worker_join(config)
            out[handle.my_rank] = handle
        except BaseException as exc:
            errors.append(exc)

    threads = [threading.Thread(target=head)]
    threads += [threading.Thread(target=worker) for _ in range(nranks - 1)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=timeout + 5)
    if errors:
        raise errors[0]
    assert sorted(out) == list(range(nranks))
    return [out[r] for r in range(nranks)]


def run_on_ranks(worlds, fn):
    """Call fn(world) concurrently on every rank; returns {rank: result}."""
    results = {}
    errors = {}

    def wrap(world: WorldHandle):
        try:
            results[world.my_rank] = fn(world)
        except BaseException as exc:
            errors[world.my_rank] = exc

    threads = [threading.Thread(target=wrap, args=(w,)) for w in worlds]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=60)
    if errors:
        raise errors[min(errors)]
    return results


def close_world(worlds):
    run_on_ranks(worlds, runtime.shutdown)
