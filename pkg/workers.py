import logging
import multiprocessing
import os

import psutil

from errors import ConfigError

THREADS_ENV = "AIRY_SPECTRAL_THREADS"


def thread_count():
    """Worker count: AIRY_SPECTRAL_THREADS, else the physical core count"""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            count = int(env)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer") from exc
        if count < 1:
            raise ConfigError(f"{THREADS_ENV}={env!r} must be >= 1")
        return count
    return psutil.cpu_count(logical=False) or multiprocessing.cpu_count()


def parallel_map(func, items):
    """func over items in a process pool, results in input order"""
    items = list(items)
    n_threads = min(thread_count(), len(items))
    if n_threads <= 1:
        return [func(item) for item in items]
    logging.debug("Mapping %d items over %d processes", len(items), n_threads)
    with multiprocessing.Pool(n_threads) as pool:
        return pool.map(func, items)
