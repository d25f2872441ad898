#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the tools used to run independent tasks (EM starts, bootstrap replicates, scan cells) in parallel.
    Tasks are picklable tuples given to a module-level function, and results are always returned in task order.
    Hence, the number of workers never changes the results.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import multiprocessing
import os
import tqdm
import numpy
from typing import *
from typing_extensions import *

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Environment variable giving the default number of workers.
"""

THREADS_VARIABLE = "PYCBP_THREADS"

#####################################################################################################################################################
################################################################## MULTIPROCESSING ##################################################################
#####################################################################################################################################################

def default_threads () -> int:

    """
        Returns the default number of workers, as given by the environment (1 if unset or invalid).
        In:
            * None.
        Out:
            * threads: Number of workers.
    """

    # Read the environment
    try:
        threads = max(1, int(os.environ.get(THREADS_VARIABLE, "1")))
    except ValueError:
        threads = 1
    return threads

#####################################################################################################################################################

def parallel_map ( function:    Callable[[Any], Any],
                   tasks:       List[Any],
                   threads:     Union[None, int] = None,
                   description: Union[None, str] = None,
                   progress:    bool = False
                 ) ->           List[Any]:

    """
        Applies a function to every task, possibly using a pool of processes.
        In:
            * function:    Module-level function taking a single task.
            * tasks:       List of tasks.
            * threads:     Number of workers (None for the environment default).
            * description: Text shown next to the progress bar.
            * progress:    Indicates if a progress bar is displayed.
        Out:
            * results: Results, in the same order as the tasks.
    """

    # Sequential mode avoids the cost of forking
    threads = default_threads() if threads is None else max(1, threads)
    threads = min(threads, max(1, len(tasks)))
    if threads == 1:
        return [function(task) for task in tqdm.tqdm(tasks, desc=description, leave=False, disable=not progress)]

    # Ordered imap keeps the reduction order fixed
    with multiprocessing.Pool(processes=threads) as pool:
        results = list(tqdm.tqdm(pool.imap(function, tasks), total=len(tasks), desc=description, leave=False, disable=not progress))
    return results

#####################################################################################################################################################

def spawn_seeds ( master_seed: Union[None, int, numpy.random.SeedSequence],
                  count:       int
                ) ->           List[numpy.random.SeedSequence]:

    """
        Derives independent child seeds from a master seed.
        Child i only depends on (master_seed, i), so scheduling cannot change the streams.
        In:
            * master_seed: Master seed, or seed sequence to spawn from.
            * count:       Number of children.
        Out:
            * seeds: Child seed sequences.
    """

    # Spawn from a single root
    root = master_seed if isinstance(master_seed, numpy.random.SeedSequence) else numpy.random.SeedSequence(master_seed)
    seeds = root.spawn(count)
    return seeds

#####################################################################################################################################################
#####################################################################################################################################################
