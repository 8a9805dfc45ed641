"""
Module for small helpers which are used across consensus_lab but don't belong to
any of the graph, spectral, stability, scaling or sim modules.
"""
from concurrent.futures import ThreadPoolExecutor

from .config import config

FLOAT_FORMAT = "%.17g"
"""str: printf style format used for every float written to CSV (round-trip exact)"""


def resolve_seed(seed=None):
    """
    Get the seed to use for randomised graph families and initial conditions

    Parameters
    ----------
    seed : int, optional
        Explicit seed. If ``None``, ``config["SEED"]`` is used which can be set
        with the ``CONSENSUS_LAB_SEED`` environment variable.

    Returns
    -------
    int
    """
    if seed is None:
        seed = config["SEED"]

    return int(seed)


def resolve_jobs(jobs=None):
    """
    Get the number of worker threads, falling back to ``config["JOBS"]``
    """
    if jobs is None:
        jobs = config["JOBS"]
    jobs = int(jobs)
    if jobs < 1:
        raise ValueError("jobs must be >= 1, got {}".format(jobs))

    return jobs


def map_jobs(func, items, jobs=1):
    """
    Apply ``func`` to every item, optionally in a thread pool

    The output order always matches the order of ``items``, whatever the number
    of workers.

    Parameters
    ----------
    func : callable
        Function of one argument

    items : iterable
        Arguments

    jobs : int
        Number of worker threads. ``1`` runs everything in the calling thread.

    Returns
    -------
    list
    """
    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, items))


def format_float(value):
    """
    Format a float with 17 significant digits, matching the CSV output
    """
    return FLOAT_FORMAT % value
