import sys
import os
import traceback
import pickle
from itertools import islice
from tempfile import NamedTemporaryFile

from xyz_tradeoff.exception import WorkerFailure, TradeoffExceptionWrapper
from xyz_tradeoff.tradeoff_config import THREADS

# Fork-based map used by sweeps and audits. Results travel back through
# pickled temporary files, so there is no size limit on them, and closures
# work as tasks.


def _spawn(func, arg, dir):
    with NamedTemporaryFile(prefix='xyz_tradeoff_',
                            dir=dir,
                            delete=False) as tmpfile:
        output_file = tmpfile.name

    # flush before forking, otherwise buffered output is printed twice
    sys.stderr.flush()
    sys.stdout.flush()
    pid = os.fork()
    if pid:
        return pid, output_file
    else:
        exit_code = 1
        try:
            try:
                payload = (True, func(arg))
            except Exception as ex:
                payload = (False, TradeoffExceptionWrapper(ex))
            with open(output_file, 'wb') as f:
                pickle.dump(payload, f, protocol=pickle.HIGHEST_PROTOCOL)
            exit_code = 0
        except:
            traceback.print_exc()
        finally:
            sys.stderr.flush()
            sys.stdout.flush()
            # os._exit skips finally blocks and atexit hooks of the parent
            os._exit(exit_code)


def _collect(pid, output_file):
    try:
        if os.waitpid(pid, 0)[1]:
            raise WorkerFailure('Worker process %d exited abnormally.' % pid)
        with open(output_file, 'rb') as f:
            ok, value = pickle.load(f)
    finally:
        if os.path.exists(output_file):
            os.remove(output_file)
    if not ok:
        raise WorkerFailure('A task raised an exception:\n%s' % value)
    return value


def parallel_imap_unordered(func, iterable, max_parallel=None, dir=None):
    if max_parallel is None:
        max_parallel = THREADS

    args_iter = iter(iterable)
    pids = [_spawn(func, arg, dir)
            for arg in islice(args_iter, max_parallel)]

    while pids:
        pid, output_file = pids.pop()
        try:
            result = _collect(pid, output_file)
        except WorkerFailure:
            for other_pid, other_file in pids:
                os.waitpid(other_pid, 0)
                if os.path.exists(other_file):
                    os.remove(other_file)
            raise
        yield result

        arg = list(islice(args_iter, 1))
        if arg:
            pids.insert(0, _spawn(func, arg[0], dir))


def parallel_map(func, iterable, max_parallel=None, dir=None):
    """
    Apply func to every item and return the results in input order.

    With max_parallel <= 1, or a single item, the map runs in-process and
    exceptions propagate unchanged. Otherwise up to max_parallel forked
    children run at once and any failure surfaces as WorkerFailure.
    """
    items = list(iterable)
    if max_parallel is None:
        max_parallel = THREADS
    if max_parallel <= 1 or len(items) <= 1 or not hasattr(os, 'fork'):
        return [func(item) for item in items]

    def wrapper(arg_with_idx):
        idx, arg = arg_with_idx
        return idx, func(arg)

    res = parallel_imap_unordered(wrapper,
                                  enumerate(items),
                                  max_parallel=max_parallel,
                                  dir=dir)
    return [r for idx, r in sorted(res, key=lambda x: x[0])]
