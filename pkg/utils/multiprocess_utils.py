import os
import platform
import traceback
from multiprocessing import Manager, Process, get_context


def resolve_num_workers(num_workers: int) -> int:
    """
    0 or negative means one worker per available core.
    """
    if num_workers is None or num_workers <= 0:
        return os.cpu_count() or 1
    return num_workers


def chunked_worker_run(map_func, args, results_queue=None):
    for a in args:
        # noinspection PyBroadException
        try:
            res = map_func(*a)
            results_queue.put(res)
        except KeyboardInterrupt:
            break
        except Exception:
            traceback.print_exc()
            results_queue.put(None)


def chunked_multiprocess_run(map_func, args, num_workers, q_max_size=1000):
    """
    Run map_func over args on num_workers processes and yield the results in the order of args.
    A failed item yields None after its traceback is printed.
    """
    num_jobs = len(args)
    if num_jobs == 0:
        return
    if num_jobs < num_workers:
        num_workers = num_jobs

    manager = Manager()
    queues = [manager.Queue(maxsize=max(q_max_size // num_workers, 1)) for _ in range(num_workers)]
    if platform.system().lower() != 'windows':
        process_creation_func = get_context('spawn').Process
    else:
        process_creation_func = Process

    workers = []
    for i in range(num_workers):
        worker = process_creation_func(
            target=chunked_worker_run, args=(map_func, args[i::num_workers], queues[i]), daemon=True
        )
        workers.append(worker)
        worker.start()

    for i in range(num_jobs):
        yield queues[i % num_workers].get()

    for worker in workers:
        worker.join()
        worker.close()
    manager.shutdown()


def ordered_map(map_func, args, num_workers):
    """
    Sequential fallback when one worker is enough, the process pool otherwise.
    """
    if num_workers <= 1 or len(args) <= 1:
        for a in args:
            yield map_func(*a)
    else:
        yield from chunked_multiprocess_run(map_func, args, num_workers)
