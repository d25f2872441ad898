#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the combinatorics of transition trees.
    Given a number of progenitors phi* and a number of children z', a transition tree is the set of vectors (z(0), ..., z(s_max)) such that:
        * sum_k z(k) = phi*.
        * sum_k k * z(k) = z'.
    These sets are the hidden data of the EM algorithms, and their sizes drive the cost of the E-steps.
    Enumeration is lexicographic, ascending in (z(0), z(1), ...).
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import functools
import threading
import numpy
import pandas
import scipy.special as special
from typing import *
from typing_extensions import *

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Maximum number of transition trees kept in memory.
    When full, the cache is emptied.
"""

CACHE_SIZE = 4096

#####################################################################################################################################################

# Memoized transition trees, protected by a lock
_cache = {}
_cache_lock = threading.Lock()

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class Configuration (tuple):

    """
        Vector (z(0), ..., z(s_max)) of numbers of progenitors having k children.
        Behaves as a tuple of integers.
    """

    #############################################################################################################################################
    #                                                                 PROPERTIES                                                                #
    #############################################################################################################################################

    @property
    def progenitors ( self: Self
                    ) ->    int:

        # sum_k z(k)
        return sum(self)

    #############################################################################################################################################

    @property
    def offspring ( self: Self
                  ) ->    int:

        # sum_k k * z(k)
        return sum([k * count for k, count in enumerate(self)])

#####################################################################################################################################################

class TransitionTree ():

    """
        Materialized transition tree, as used by the E-steps.
        Rows of the matrix are the configurations, in enumeration order.
        Each row comes with the logarithm of its multinomial coefficient phi*! / prod_k z(k)!.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:      Self,
                   phi_star:  int,
                   z_next:    int,
                   s_max:     int
                 ) ->         Self:

        """
            This function is the constructor of the class.
            In:
                * self:     Reference to the current object.
                * phi_star: Number of progenitors.
                * z_next:   Number of children.
                * s_max:    Maximum number of children per progenitor.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(TransitionTree, self).__init__()

        # Enumerate once
        self.phi_star = phi_star
        self.z_next = z_next
        self.s_max = s_max
        configurations = enumerate_fixed(phi_star, z_next, s_max)
        self.matrix = numpy.array(configurations, dtype=numpy.int64).reshape(len(configurations), s_max + 1)
        self.log_multinomial = special.gammaln(phi_star + 1) - special.gammaln(self.matrix + 1).sum(axis=1)
        self.matrix.setflags(write=False)
        self.log_multinomial.setflags(write=False)

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def __len__ ( self: Self
                ) ->    int:

        # Number of configurations
        return self.matrix.shape[0]

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def enumerate_fixed ( phi_star: int,
                      z_next:   int,
                      s_max:    int
                    ) ->        List[Configuration]:

    """
        Lists all configurations with exactly phi_star progenitors and z_next children.
        In:
            * phi_star: Number of progenitors.
            * z_next:   Number of children.
            * s_max:    Maximum number of children per progenitor.
        Out:
            * configurations: Configurations in lexicographic order (empty if infeasible).
    """

    # Infeasible cases
    if phi_star < 0 or z_next < 0 or z_next > s_max * phi_star:
        return []

    # Fill the vector from z(0) to z(s_max)
    configurations = []
    _fill(0, phi_star, z_next, s_max, [], configurations)
    return configurations

#####################################################################################################################################################

def enumerate_ranged ( z_l:    int,
                       z_next: int,
                       s_max:  int
                     ) ->      List[Tuple[int, Configuration]]:

    """
        Lists all configurations with 1 to z_l progenitors and z_next children, tagged with their number of progenitors.
        When z_next is 0, the configuration without progenitors is appended at the end, since a control may select nobody.
        In:
            * z_l:    Size of the generation.
            * z_next: Size of the next generation.
            * s_max:  Maximum number of children per progenitor.
        Out:
            * configurations: Pairs (phi_star, configuration).
    """

    # Union over the numbers of progenitors
    configurations = []
    for phi_star in range(1, z_l + 1):
        configurations += [(phi_star, configuration) for configuration in enumerate_fixed(phi_star, z_next, s_max)]

    # Nobody selected
    if z_next == 0:
        configurations.append((0, Configuration([0] * (s_max + 1))))
    return configurations

#####################################################################################################################################################

@functools.lru_cache(maxsize=64)
def counting_table ( phi_max: int,
                     s_max:   int
                   ) ->       numpy.ndarray:

    """
        Counts the configurations of all transition trees with up to phi_max progenitors.
        Entry [phi_star, z_next] is the number of configurations with phi_star progenitors and z_next children.
        The table is filled by adding one number of children k at a time, with as many progenitors as wanted.
        In:
            * phi_max: Maximum number of progenitors.
            * s_max:   Maximum number of children per progenitor.
        Out:
            * table: Integer matrix of shape (phi_max + 1, s_max * phi_max + 1), read-only.
    """

    # Only the empty configuration at first
    width = s_max * phi_max + 1
    table = numpy.zeros((phi_max + 1, width), dtype=numpy.int64)
    table[0, 0] = 1

    # Rows are updated in increasing order so that k can be used several times
    for k in range(s_max + 1):
        for phi_star in range(1, phi_max + 1):
            table[phi_star, k:] += table[phi_star - 1, :width - k]

    # Shared between callers
    table.setflags(write=False)
    return table

#####################################################################################################################################################

def count_b ( phi_star: int,
              z_next:   int,
              s_max:    int
            ) ->        int:

    """
        Counts the configurations with exactly phi_star progenitors and z_next children.
        In:
            * phi_star: Number of progenitors.
            * z_next:   Number of children.
            * s_max:    Maximum number of children per progenitor.
        Out:
            * count: Size of the transition tree.
    """

    # Outside the table
    if phi_star < 0 or z_next < 0 or z_next > s_max * phi_star:
        return 0
    count = int(counting_table(phi_star, s_max)[phi_star, z_next])
    return count

#####################################################################################################################################################

def count_b_star ( z_l:    int,
                   z_next: int,
                   s_max:  int
                 ) ->      int:

    """
        Counts the configurations with 1 to z_l progenitors and z_next children.
        The configuration without progenitors is not counted.
        In:
            * z_l:    Size of the generation.
            * z_next: Size of the next generation.
            * s_max:  Maximum number of children per progenitor.
        Out:
            * count: Size of the ranged transition tree.
    """

    # Sum over the numbers of progenitors
    if z_l < 1 or z_next < 0 or z_next > s_max * z_l:
        return 0
    count = int(counting_table(z_l, s_max)[1:, z_next].sum())
    return count

#####################################################################################################################################################

def b_max ( z_l:   int,
            s_max: int
          ) ->     int:

    # Largest tree with z_l progenitors, over all possible next sizes
    return int(counting_table(z_l, s_max)[z_l].max())

#####################################################################################################################################################

def b_star_max ( z_l:   int,
                 s_max: int
               ) ->     int:

    # Largest ranged tree for a generation of size z_l, over all possible next sizes
    return int(counting_table(z_l, s_max)[1:].sum(axis=0).max())

#####################################################################################################################################################

def complexity_table ( z_max:      int,
                       s_max_grid: List[int]
                     ) ->          pandas.DataFrame:

    """
        Computes the largest tree sizes for all generation sizes 1..z_max.
        In:
            * z_max:      Largest generation size.
            * s_max_grid: Maximum numbers of children to consider.
        Out:
            * table: One row per generation size, with columns b_max_<s> and b_star_max_<s> for each s in the grid.
    """

    # A single table per s_max gives all rows
    table = pandas.DataFrame({"z": numpy.arange(1, z_max + 1)})
    for s_max in s_max_grid:
        counts = counting_table(z_max, s_max)
        cumulated = numpy.cumsum(counts[1:], axis=0)
        table["b_max_%d" % s_max] = counts[1:].max(axis=1)
        table["b_star_max_%d" % s_max] = cumulated.max(axis=1)
    return table

#####################################################################################################################################################

def growth_exponents ( z_values: List[int],
                       s_max:    int
                     ) ->        Tuple[float, float]:

    """
        Fits log b_max and log b_star_max as affine functions of log z_l.
        The slopes estimate the polynomial growth orders of the tree sizes.
        In:
            * z_values: Generation sizes used for the fit.
            * s_max:    Maximum number of children per progenitor.
        Out:
            * slope_b:      Growth order of b_max.
            * slope_b_star: Growth order of b_star_max.
    """

    # Least squares in log-log scale
    log_z = numpy.log(numpy.array(z_values, dtype=float))
    log_b = numpy.log([b_max(z, s_max) for z in z_values])
    log_b_star = numpy.log([b_star_max(z, s_max) for z in z_values])
    slope_b = float(numpy.polyfit(log_z, log_b, 1)[0])
    slope_b_star = float(numpy.polyfit(log_z, log_b_star, 1)[0])
    return slope_b, slope_b_star

#####################################################################################################################################################

def transition_tree ( phi_star: int,
                      z_next:   int,
                      s_max:    int
                    ) ->        TransitionTree:

    """
        Returns the materialized transition tree, memoized.
        Trees are immutable, so concurrent readers may share them.
        In:
            * phi_star: Number of progenitors.
            * z_next:   Number of children.
            * s_max:    Maximum number of children per progenitor.
        Out:
            * tree: Transition tree.
    """

    # Look in the cache
    key = (phi_star, z_next, s_max)
    with _cache_lock:
        if key in _cache:
            return _cache[key]

    # Build outside the lock, the first writer wins
    tree = TransitionTree(phi_star, z_next, s_max)
    with _cache_lock:
        if len(_cache) >= CACHE_SIZE:
            _cache.clear()
        tree = _cache.setdefault(key, tree)
    return tree

#####################################################################################################################################################

def _fill ( k:              int,
            remaining:      int,
            children:       int,
            s_max:          int,
            prefix:         List[int],
            configurations: List[Configuration]
          ) ->              None:

    """
        Recursively chooses z(k), z(k+1), ... for the remaining progenitors and children.
        In:
            * k:              Current number of children.
            * remaining:      Progenitors left to place.
            * children:       Children left to produce.
            * s_max:          Maximum number of children per progenitor.
            * prefix:         Values z(0), ..., z(k-1) already chosen.
            * configurations: List where complete configurations are appended.
        Out:
            * None.
    """

    # Last coordinate is forced
    if k == s_max:
        if s_max * remaining == children:
            configurations.append(Configuration(prefix + [remaining]))
        return

    # Keep z(k) such that the rest stays feasible
    for count in range(remaining + 1):
        left = remaining - count
        produced = children - k * count
        if produced < 0:
            break
        if (k + 1) * left <= produced <= s_max * left:
            _fill(k + 1, left, produced, s_max, prefix + [count], configurations)

#####################################################################################################################################################
#####################################################################################################################################################
