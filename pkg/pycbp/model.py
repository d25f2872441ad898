#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the probability model of a controlled branching process (CBP).
    A CBP evolves as follows: at generation l, a random control function decides how many progenitors phi_l(Z_l) reproduce among the Z_l individuals.
    Then, each progenitor independently has k children with probability p_k, for k in 0..s_max.
    Control laws belong to a power series family: P[phi(k) = j] = a_k(j) * theta^j / A_k(theta), with A_k = A_1^k.
    Three families are provided (binomial, Poisson and negative binomial).
    The file also defines the three observation schemes (full tree, progenitors, sizes) and their CSV representation.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import logging
import os
import numpy
import pandas
import scipy.special as special
import scipy.stats as stats
from typing import *
from typing_extensions import *

# Internal imports
from pycbp.errors import *

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Tolerance used to check that probability vectors sum to one.
"""

PROBABILITY_TOLERANCE = 1e-12

#####################################################################################################################################################

"""
    Default tail mass neglected when truncating unbounded control laws.
"""

DEFAULT_TAIL = 1e-12

#####################################################################################################################################################

"""
    Offspring law and control parameter of the simulated example shipped with the package.
    The control is binomial with q = 0.6, i.e., theta = 1.5.
"""

REFERENCE_OFFSPRING = [0.1084, 0.2709, 0.3386, 0.2822]
REFERENCE_KIND = "binomial"
REFERENCE_THETA = 1.5

#####################################################################################################################################################

"""
    Location of the shipped sample.
"""

REFERENCE_SAMPLE_PATH = os.path.join(os.path.dirname(os.path.realpath(__file__)), "data", "simulated_z30.csv")

#####################################################################################################################################################

# Module logger
logger = logging.getLogger(__name__)

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class OffspringDistribution ():

    """
        Law of the number of children of a progenitor, with finite support 0..s_max.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:  Self,
                   probs: Union[List[float], numpy.ndarray]
                 ) ->     Self:

        """
            This function is the constructor of the class.
            In:
                * self:  Reference to the current object.
                * probs: Probabilities p_0..p_s_max.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(OffspringDistribution, self).__init__()

        # Check the vector is a probability vector
        probs = numpy.array(probs, dtype=float)
        if probs.ndim != 1 or probs.size < 2:
            raise ParameterDomainError("Offspring law needs at least two probabilities (s_max >= 1), got %s" % str(probs.tolist()))
        if not numpy.all(numpy.isfinite(probs)) or numpy.any(probs < 0.0) or numpy.any(probs > 1.0):
            raise ParameterDomainError("Offspring probabilities must lie in [0, 1], got %s" % str(probs.tolist()))
        if abs(probs.sum() - 1.0) > PROBABILITY_TOLERANCE:
            raise ParameterDomainError("Offspring probabilities must sum to 1, got sum %.17g" % probs.sum())

        # Store
        self.probs = probs
        self.probs.setflags(write=False)
        self.s_max = probs.size - 1

    #############################################################################################################################################
    #                                                               STATIC METHODS                                                              #
    #############################################################################################################################################

    @staticmethod
    def from_weights ( weights: Union[List[float], numpy.ndarray]
                     ) ->       Self:

        """
            Creates an offspring law from nonnegative weights, normalized to sum to one.
            This is useful for rounded values such as the ones printed in tables.
            In:
                * weights: Nonnegative weights, one per number of children.
            Out:
                * offspring: Normalized offspring law.
        """

        # Normalize
        weights = numpy.array(weights, dtype=float)
        if weights.ndim != 1 or numpy.any(weights < 0.0) or weights.sum() <= 0.0:
            raise ParameterDomainError("Weights must be nonnegative with a positive sum, got %s" % str(weights.tolist()))
        offspring = OffspringDistribution(weights / weights.sum())
        return offspring

    #############################################################################################################################################

    @staticmethod
    def uniform ( s_max: int
                ) ->     Self:

        """
            Creates the uniform offspring law on 0..s_max.
            In:
                * s_max: Maximum number of children.
            Out:
                * offspring: Uniform offspring law.
        """

        # Same mass everywhere
        offspring = OffspringDistribution(numpy.full(s_max + 1, 1.0 / (s_max + 1)))
        return offspring

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def mean ( self: Self
             ) ->    float:

        """
            Returns the offspring mean m.
            In:
                * self: Reference to the current object.
            Out:
                * m: Mean number of children.
        """

        # Weighted sum
        m = float(numpy.dot(numpy.arange(self.s_max + 1), self.probs))
        return m

    #############################################################################################################################################

    def central_moment ( self:  Self,
                         order: int
                       ) ->     float:

        """
            Returns a central moment of the offspring law.
            In:
                * self:  Reference to the current object.
                * order: Order of the moment.
            Out:
                * moment: Central moment of the given order.
        """

        # Weighted sum of powers of the deviations
        deviations = numpy.arange(self.s_max + 1) - self.mean()
        moment = float(numpy.dot(deviations ** order, self.probs))
        return moment

    #############################################################################################################################################

    def variance ( self: Self
                 ) ->    float:

        """
            Returns the offspring variance sigma^2.
            In:
                * self: Reference to the current object.
            Out:
                * sigma2: Variance of the number of children.
        """

        # Second central moment
        sigma2 = self.central_moment(2)
        return sigma2

    #############################################################################################################################################

    def fourth_central_moment ( self: Self
                              ) ->    float:

        # Used by the confidence intervals of the variance
        return self.central_moment(4)

    #############################################################################################################################################

    def padded ( self:  Self,
                 s_max: int
               ) ->     Self:

        """
            Returns the same law, seen with a larger maximum number of children.
            In:
                * self:  Reference to the current object.
                * s_max: New maximum number of children (at least the current one).
            Out:
                * offspring: Law with s_max + 1 probabilities.
        """

        # Append zeros
        if s_max < self.s_max:
            raise ParameterDomainError("Cannot pad an offspring law with s_max=%d down to s_max=%d" % (self.s_max, s_max))
        offspring = OffspringDistribution(numpy.concatenate((self.probs, numpy.zeros(s_max - self.s_max))))
        return offspring

    #############################################################################################################################################

    def __eq__ ( self:  Self,
                 other: Any
               ) ->     bool:

        # Same vector
        return isinstance(other, OffspringDistribution) and numpy.array_equal(self.probs, other.probs)

    #############################################################################################################################################

    def __repr__ ( self: Self
                 ) ->    str:

        # Short description
        return "OffspringDistribution(%s)" % ", ".join(["%.6g" % value for value in self.probs])

#####################################################################################################################################################

class ControlFamily ():

    """
        Power series control law with parameter theta.
        Subclasses define the family through the functions a_k(j), A_k(theta), and the migration parameter mu(theta) = theta * A_1'(theta) / A_1(theta).
        Instances are created with ControlFamily.create, giving the name of the family.
    """

    # Name of the family, and open range of mu(theta) over the parameter space
    kind = None
    mu_range = (0.0, numpy.inf)

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:  Self,
                   theta: float
                 ) ->     Self:

        """
            This function is the constructor of the class.
            In:
                * self:  Reference to the current object.
                * theta: Control parameter.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(ControlFamily, self).__init__()

        # Check the parameter belongs to the family's space
        theta = float(theta)
        if not self.theta_is_valid(theta):
            raise ParameterDomainError("Invalid control parameter theta=%.17g for the %s family" % (theta, self.kind))
        self.theta = theta

    #############################################################################################################################################
    #                                                               STATIC METHODS                                                              #
    #############################################################################################################################################

    @staticmethod
    def create ( kind:  str,
                 theta: float
               ) ->     Self:

        """
            Creates a control law from the name of its family.
            In:
                * kind:  Name of the family (binomial, poisson, negative_binomial).
                * theta: Control parameter.
            Out:
                * family: Control law.
        """

        # Find the class
        family = FAMILIES[control_kind(kind)](theta)
        return family

    #############################################################################################################################################

    @staticmethod
    def from_mu ( kind: str,
                  mu:   float
                ) ->    Self:

        """
            Creates a control law from its migration parameter mu(theta).
            In:
                * kind: Name of the family.
                * mu:   Migration parameter.
            Out:
                * family: Control law.
        """

        # Invert mu
        family_class = FAMILIES[control_kind(kind)]
        family = family_class(family_class.mu_inverse(mu))
        return family

    #############################################################################################################################################
    #                                                               CLASS METHODS                                                               #
    #############################################################################################################################################

    @classmethod
    def theta_is_valid ( cls:   Type[Self],
                         theta: float
                       ) ->     bool:

        # Overridden when the space is bounded above
        return bool(numpy.isfinite(theta) and theta > 0.0)

    #############################################################################################################################################

    @classmethod
    def mu_inverse ( cls: Type[Self],
                     mu:  float
                   ) ->   float:

        """
            Returns the parameter theta such that mu(theta) = mu.
            In:
                * cls: Class of the family.
                * mu:  Migration parameter, in the open interval mu_range.
            Out:
                * theta: Control parameter.
        """

        # Only values inside the range can be inverted
        if not (cls.mu_range[0] < mu < cls.mu_range[1]):
            raise BoundaryError("Migration parameter mu=%.17g is outside the range (%g, %g) of the %s family" % (mu, cls.mu_range[0], cls.mu_range[1], cls.kind), cls.kind)
        theta = cls._mu_inverse(mu)
        return theta

    #############################################################################################################################################

    @classmethod
    def random_theta ( cls: Type[Self],
                       rng: numpy.random.Generator
                     ) ->   float:

        """
            Draws a starting value for theta: q is uniform on (0, 1), and theta = q / (1 - q).
            In:
                * cls: Class of the family.
                * rng: Random number generator.
            Out:
                * theta: Random control parameter.
        """

        # Avoid the closed end of the interval
        q = 0.0
        while q == 0.0:
            q = rng.random()
        theta = q / (1.0 - q)
        return theta

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def mu ( self: Self
           ) ->    float:

        """
            Returns the migration parameter mu(theta), i.e., the mean number of progenitors per individual.
            In:
                * self: Reference to the current object.
            Out:
                * mu: Migration parameter.
        """

        # Depends on the family
        raise NotImplementedError()

    #############################################################################################################################################

    def mu_prime ( self: Self
                 ) ->    float:

        # Derivative of mu at theta
        raise NotImplementedError()

    #############################################################################################################################################

    def log_a ( self: Self,
                k:    Union[int, numpy.ndarray],
                j:    Union[int, numpy.ndarray]
              ) ->    numpy.ndarray:

        """
            Returns log a_k(j), -inf outside the support.
            In:
                * self: Reference to the current object.
                * k:    Number of individuals.
                * j:    Number of progenitors.
            Out:
                * log_a: Logarithm of the coefficients.
        """

        # Depends on the family
        raise NotImplementedError()

    #############################################################################################################################################

    def log_A ( self: Self,
                k:    Union[int, numpy.ndarray]
              ) ->    numpy.ndarray:

        # log A_k(theta) = k * log A_1(theta)
        return numpy.asarray(k, dtype=float) * self._log_A1()

    #############################################################################################################################################

    def log_pmf ( self: Self,
                  k:    Union[int, numpy.ndarray],
                  j:    Union[int, numpy.ndarray]
                ) ->    numpy.ndarray:

        """
            Returns log P[phi(k) = j].
            In:
                * self: Reference to the current object.
                * k:    Number of individuals.
                * j:    Number of progenitors.
            Out:
                * log_pmf: Log-probabilities, -inf outside the support.
        """

        # Power series form
        j = numpy.asarray(j)
        with numpy.errstate(invalid="ignore", divide="ignore"):
            log_pmf = self.log_a(k, j) + j * numpy.log(self.theta) - self.log_A(k)
        log_pmf = numpy.where(numpy.isnan(log_pmf), -numpy.inf, log_pmf)
        return log_pmf

    #############################################################################################################################################

    def pmf ( self: Self,
              k:    Union[int, numpy.ndarray],
              j:    Union[int, numpy.ndarray]
            ) ->    numpy.ndarray:

        # Exponential of the log version
        return numpy.exp(self.log_pmf(k, j))

    #############################################################################################################################################

    def control_mean ( self: Self,
                       k:    int
                     ) ->    float:

        # epsilon(k, theta) = k * mu(theta)
        return k * self.mu()

    #############################################################################################################################################

    def control_variance ( self: Self,
                           k:    int
                         ) ->    float:

        # sigma^2(k, theta) = k * theta * mu'(theta)
        return k * self.theta * self.mu_prime()

    #############################################################################################################################################

    def support_max ( self: Self,
                      k:    int,
                      tail: float = DEFAULT_TAIL
                    ) ->    int:

        """
            Returns the smallest j such that P[phi(k) <= j] >= 1 - tail.
            For bounded laws, this is the end of the support.
            In:
                * self: Reference to the current object.
                * k:    Number of individuals.
                * tail: Neglected mass.
            Out:
                * j_max: Truncation point.
        """

        # Depends on the family
        raise NotImplementedError()

    #############################################################################################################################################

    def sample ( self: Self,
                 k:    int,
                 rng:  numpy.random.Generator
               ) ->    int:

        # Depends on the family
        raise NotImplementedError()

    #############################################################################################################################################

    def with_theta ( self:  Self,
                     theta: float
                   ) ->     Self:

        # Same family, other parameter
        return type(self)(theta)

    #############################################################################################################################################

    def __eq__ ( self:  Self,
                 other: Any
               ) ->     bool:

        # Same family and parameter
        return isinstance(other, ControlFamily) and self.kind == other.kind and self.theta == other.theta

    #############################################################################################################################################

    def __repr__ ( self: Self
                 ) ->    str:

        # Short description
        return "ControlFamily(%s, theta=%.6g)" % (self.kind, self.theta)

    #############################################################################################################################################
    #                                                              PRIVATE METHODS                                                              #
    #############################################################################################################################################

    @classmethod
    def _mu_inverse ( cls: Type[Self],
                      mu:  float
                    ) ->   float:

        # Depends on the family
        raise NotImplementedError()

    #############################################################################################################################################

    def _log_A1 ( self: Self
                ) ->    float:

        # Depends on the family
        raise NotImplementedError()

#####################################################################################################################################################

class BinomialControl (ControlFamily):

    """
        Each individual becomes a progenitor with probability q = theta / (1 + theta).
        a_k(j) = C(k, j), A_k(theta) = (1 + theta)^k, mu(theta) = theta / (1 + theta).
    """

    kind = "binomial"
    mu_range = (0.0, 1.0)

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def mu ( self: Self
           ) ->    float:

        # Probability of becoming a progenitor
        return self.theta / (1.0 + self.theta)

    #############################################################################################################################################

    def mu_prime ( self: Self
                 ) ->    float:

        # Derivative
        return 1.0 / (1.0 + self.theta) ** 2

    #############################################################################################################################################

    def log_a ( self: Self,
                k:    Union[int, numpy.ndarray],
                j:    Union[int, numpy.ndarray]
              ) ->    numpy.ndarray:

        # Binomial coefficients, zero outside 0..k
        k = numpy.asarray(k, dtype=float)
        j = numpy.asarray(j, dtype=float)
        inside = (j >= 0) & (j <= k)
        with numpy.errstate(invalid="ignore"):
            log_a = special.gammaln(k + 1) - special.gammaln(j + 1) - special.gammaln(k - j + 1)
        return numpy.where(inside, log_a, -numpy.inf)

    #############################################################################################################################################

    def support_max ( self: Self,
                      k:    int,
                      tail: float = DEFAULT_TAIL
                    ) ->    int:

        # Bounded support
        return int(k)

    #############################################################################################################################################

    def sample ( self: Self,
                 k:    int,
                 rng:  numpy.random.Generator
               ) ->    int:

        # Each individual is kept independently
        return int(rng.binomial(k, self.mu()))

    #############################################################################################################################################
    #                                                              PRIVATE METHODS                                                              #
    #############################################################################################################################################

    @classmethod
    def _mu_inverse ( cls: Type[Self],
                      mu:  float
                    ) ->   float:

        # Odds
        return mu / (1.0 - mu)

    #############################################################################################################################################

    def _log_A1 ( self: Self
                ) ->    float:

        # log(1 + theta)
        return numpy.log1p(self.theta)

#####################################################################################################################################################

class PoissonControl (ControlFamily):

    """
        The number of progenitors follows a Poisson law with mean k * theta.
        a_k(j) = k^j / j!, A_k(theta) = exp(k * theta), mu(theta) = theta.
    """

    kind = "poisson"

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def mu ( self: Self
           ) ->    float:

        # Identity
        return self.theta

    #############################################################################################################################################

    def mu_prime ( self: Self
                 ) ->    float:

        # Constant
        return 1.0

    #############################################################################################################################################

    def log_a ( self: Self,
                k:    Union[int, numpy.ndarray],
                j:    Union[int, numpy.ndarray]
              ) ->    numpy.ndarray:

        # xlogy handles k = 0
        k = numpy.asarray(k, dtype=float)
        j = numpy.asarray(j, dtype=float)
        log_a = special.xlogy(j, k) - special.gammaln(j + 1)
        return numpy.where(j >= 0, log_a, -numpy.inf)

    #############################################################################################################################################

    def support_max ( self: Self,
                      k:    int,
                      tail: float = DEFAULT_TAIL
                    ) ->    int:

        # Quantile of the Poisson law
        if k == 0:
            return 0
        return int(stats.poisson.isf(tail, k * self.theta))

    #############################################################################################################################################

    def sample ( self: Self,
                 k:    int,
                 rng:  numpy.random.Generator
               ) ->    int:

        # Poisson sampler
        return int(rng.poisson(k * self.theta))

    #############################################################################################################################################
    #                                                              PRIVATE METHODS                                                              #
    #############################################################################################################################################

    @classmethod
    def _mu_inverse ( cls: Type[Self],
                      mu:  float
                    ) ->   float:

        # Identity
        return mu

    #############################################################################################################################################

    def _log_A1 ( self: Self
                ) ->    float:

        # log(exp(theta))
        return self.theta

#####################################################################################################################################################

class NegativeBinomialControl (ControlFamily):

    """
        The number of progenitors counts the failures before k successes, with failure probability theta (0 < theta < 1).
        a_k(j) = C(j + k - 1, j), A_k(theta) = (1 - theta)^(-k), mu(theta) = theta / (1 - theta).
    """

    kind = "negative_binomial"

    #############################################################################################################################################
    #                                                               CLASS METHODS                                                               #
    #############################################################################################################################################

    @classmethod
    def theta_is_valid ( cls:   Type[Self],
                         theta: float
                       ) ->     bool:

        # Failure probability
        return bool(0.0 < theta < 1.0)

    #############################################################################################################################################

    @classmethod
    def random_theta ( cls: Type[Self],
                       rng: numpy.random.Generator
                     ) ->   float:

        # theta is directly a probability here
        theta = 0.0
        while theta == 0.0:
            theta = rng.random()
        return theta

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def mu ( self: Self
           ) ->    float:

        # Odds of a failure
        return self.theta / (1.0 - self.theta)

    #############################################################################################################################################

    def mu_prime ( self: Self
                 ) ->    float:

        # Derivative
        return 1.0 / (1.0 - self.theta) ** 2

    #############################################################################################################################################

    def log_a ( self: Self,
                k:    Union[int, numpy.ndarray],
                j:    Union[int, numpy.ndarray]
              ) ->    numpy.ndarray:

        # C(j + k - 1, j), with the degenerate law at 0 when k = 0
        k, j = numpy.broadcast_arrays(numpy.asarray(k, dtype=float), numpy.asarray(j, dtype=float))
        with numpy.errstate(invalid="ignore", divide="ignore"):
            log_a = special.gammaln(j + k) - special.gammaln(j + 1) - special.gammaln(k)
        log_a = numpy.where(k == 0, numpy.where(j == 0, 0.0, -numpy.inf), log_a)
        return numpy.where(j >= 0, log_a, -numpy.inf)

    #############################################################################################################################################

    def support_max ( self: Self,
                      k:    int,
                      tail: float = DEFAULT_TAIL
                    ) ->    int:

        # Quantile of the negative binomial law with success probability 1 - theta
        if k == 0:
            return 0
        return int(stats.nbinom.isf(tail, k, 1.0 - self.theta))

    #############################################################################################################################################

    def sample ( self: Self,
                 k:    int,
                 rng:  numpy.random.Generator
               ) ->    int:

        # Numpy counts failures before k successes
        if k == 0:
            return 0
        return int(rng.negative_binomial(k, 1.0 - self.theta))

    #############################################################################################################################################
    #                                                              PRIVATE METHODS                                                              #
    #############################################################################################################################################

    @classmethod
    def _mu_inverse ( cls: Type[Self],
                      mu:  float
                    ) ->   float:

        # Inverse of the odds
        return mu / (1.0 + mu)

    #############################################################################################################################################

    def _log_A1 ( self: Self
                ) ->    float:

        # -log(1 - theta)
        return -numpy.log1p(-self.theta)

#####################################################################################################################################################

"""
    Families indexed by name.
"""

FAMILIES = {BinomialControl.kind: BinomialControl,
            PoissonControl.kind: PoissonControl,
            NegativeBinomialControl.kind: NegativeBinomialControl}

#####################################################################################################################################################

class FullTreeSample ():

    """
        Entire family tree up to generation n: counts[l][k] is the number of progenitors of generation l that had k children.
        Generation sizes and numbers of progenitors are derived from the counts.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:   Self,
                   z0:     int,
                   counts: Union[List[List[int]], numpy.ndarray]
                 ) ->      Self:

        """
            This function is the constructor of the class.
            In:
                * self:   Reference to the current object.
                * z0:     Initial population size.
                * counts: Matrix with one row per generation 0..n-1 and one column per number of children 0..s_max.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(FullTreeSample, self).__init__()

        # Check the shape and signs
        counts = numpy.array(counts, dtype=numpy.int64)
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 2:
            raise SchemaError("Counts must be a matrix with at least one generation and two columns, got shape %s" % str(counts.shape))
        if z0 < 0 or numpy.any(counts < 0):
            raise SchemaError("Counts and initial size must be nonnegative")

        # Store
        self.z0 = int(z0)
        self.counts = counts
        self.counts.setflags(write=False)
        self.n_generations = counts.shape[0]
        self.s_max = counts.shape[1] - 1

        # An empty generation has no progenitors
        sizes = self.sizes()
        for l in range(self.n_generations):
            if sizes[l] == 0 and counts[l].sum() > 0:
                raise InconsistentSampleError("Generation %d is empty but has %d progenitors" % (l, counts[l].sum()))

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def progenitors ( self: Self
                    ) ->    numpy.ndarray:

        # phi_l = sum_k z_l(k)
        return self.counts.sum(axis=1)

    #############################################################################################################################################

    def sizes ( self: Self
              ) ->    numpy.ndarray:

        """
            Returns the generation sizes Z_0..Z_n.
            In:
                * self: Reference to the current object.
            Out:
                * z: Sizes, Z_{l+1} = sum_k k * z_l(k).
        """

        # Offspring of each generation
        offspring = self.counts @ numpy.arange(self.s_max + 1)
        z = numpy.concatenate(([self.z0], offspring)).astype(numpy.int64)
        return z

    #############################################################################################################################################

    def cumulative_sizes ( self: Self
                         ) ->    numpy.ndarray:

        # Y_l
        return numpy.cumsum(self.sizes())

    #############################################################################################################################################

    def cumulative_progenitors ( self: Self
                               ) ->    numpy.ndarray:

        # Delta_l
        return numpy.cumsum(self.progenitors())

    #############################################################################################################################################

    def cumulative_counts ( self: Self
                          ) ->    numpy.ndarray:

        # Y_l(k)
        return numpy.cumsum(self.counts, axis=0)

    #############################################################################################################################################

    def prefix ( self: Self,
                 n:    int
               ) ->    Self:

        # First n generations
        if not 1 <= n <= self.n_generations:
            raise SchemaError("Prefix length must lie in 1..%d, got %d" % (self.n_generations, n))
        return FullTreeSample(self.z0, self.counts[:n])

    #############################################################################################################################################

    def __eq__ ( self:  Self,
                 other: Any
               ) ->     bool:

        # Same data
        return isinstance(other, FullTreeSample) and self.z0 == other.z0 and numpy.array_equal(self.counts, other.counts)

#####################################################################################################################################################

class ProgenitorSample ():

    """
        Sample made of the generation sizes Z_0..Z_n and of the numbers of progenitors phi_0..phi_{n-1}.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self: Self,
                   z:    Union[List[int], numpy.ndarray],
                   phi:  Union[List[int], numpy.ndarray]
                 ) ->    Self:

        """
            This function is the constructor of the class.
            In:
                * self: Reference to the current object.
                * z:    Generation sizes, n + 1 entries.
                * phi:  Numbers of progenitors, n entries.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(ProgenitorSample, self).__init__()

        # Check the shapes and signs
        z = numpy.array(z, dtype=numpy.int64)
        phi = numpy.array(phi, dtype=numpy.int64)
        if z.ndim != 1 or phi.ndim != 1 or z.size < 2 or z.size != phi.size + 1:
            raise SchemaError("Expected n + 1 sizes and n progenitor counts with n >= 1, got %d and %d" % (z.size, phi.size))
        if numpy.any(z < 0) or numpy.any(phi < 0):
            raise SchemaError("Sizes and progenitor counts must be nonnegative")

        # Check the transitions that are impossible whatever the model
        for l in range(phi.size):
            if z[l] == 0 and phi[l] > 0:
                raise InconsistentSampleError("Generation %d is empty but has %d progenitors" % (l, phi[l]))
            if phi[l] == 0 and z[l + 1] > 0:
                raise InconsistentSampleError("Generation %d has no progenitors but generation %d has size %d" % (l, l + 1, z[l + 1]))

        # Store
        self.z = z
        self.phi = phi
        self.z.setflags(write=False)
        self.phi.setflags(write=False)
        self.n_generations = phi.size

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def parents_total ( self: Self
                      ) ->    int:

        # Y_{n-1}
        return int(self.z[:-1].sum())

    #############################################################################################################################################

    def offspring_total ( self: Self
                        ) ->    int:

        # Y_n - Z_0
        return int(self.z[1:].sum())

    #############################################################################################################################################

    def progenitors_total ( self: Self
                          ) ->    int:

        # Delta_{n-1}
        return int(self.phi.sum())

    #############################################################################################################################################

    def n_observations ( self: Self
                       ) ->    int:

        # n + 1 sizes and n progenitor counts
        return 2 * self.n_generations + 1

    #############################################################################################################################################

    def prefix ( self: Self,
                 n:    int
               ) ->    Self:

        # First n generations
        if not 1 <= n <= self.n_generations:
            raise SchemaError("Prefix length must lie in 1..%d, got %d" % (self.n_generations, n))
        return ProgenitorSample(self.z[:n + 1], self.phi[:n])

    #############################################################################################################################################

    def validate_against ( self:  Self,
                           kind:  str,
                           s_max: int
                         ) ->     None:

        """
            Checks that every transition is possible for a control family and a maximum number of children.
            In:
                * self:  Reference to the current object.
                * kind:  Name of the control family.
                * s_max: Maximum number of children.
            Out:
                * None.
        """

        # Progenitors of a binomial control are individuals of the generation
        kind = control_kind(kind)
        for l in range(self.n_generations):
            if kind == BinomialControl.kind and self.phi[l] > self.z[l]:
                raise InconsistentSampleError("Generation %d has %d progenitors among %d individuals, impossible with a binomial control" % (l, self.phi[l], self.z[l]))
            if self.z[l + 1] > s_max * self.phi[l]:
                raise InconsistentSampleError("Generation %d has size %d, more than %d progenitors can produce with s_max=%d" % (l + 1, self.z[l + 1], self.phi[l], s_max))

    #############################################################################################################################################

    def __eq__ ( self:  Self,
                 other: Any
               ) ->     bool:

        # Same data
        return isinstance(other, ProgenitorSample) and numpy.array_equal(self.z, other.z) and numpy.array_equal(self.phi, other.phi)

#####################################################################################################################################################

class SizesSample ():

    """
        Sample made of the generation sizes Z_0..Z_n only.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self: Self,
                   z:    Union[List[int], numpy.ndarray]
                 ) ->    Self:

        """
            This function is the constructor of the class.
            In:
                * self: Reference to the current object.
                * z:    Generation sizes, n + 1 entries.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(SizesSample, self).__init__()

        # Check the shape and signs
        z = numpy.array(z, dtype=numpy.int64)
        if z.ndim != 1 or z.size < 2:
            raise SchemaError("Expected at least two generation sizes, got %d" % z.size)
        if numpy.any(z < 0):
            raise SchemaError("Sizes must be nonnegative")

        # Zero is absorbing
        for l in range(z.size - 1):
            if z[l] == 0 and z[l + 1] > 0:
                raise InconsistentSampleError("Generation %d is empty but generation %d has size %d" % (l, l + 1, z[l + 1]))

        # Store
        self.z = z
        self.z.setflags(write=False)
        self.n_generations = z.size - 1

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def parents_total ( self: Self
                      ) ->    int:

        # Y_{n-1}
        return int(self.z[:-1].sum())

    #############################################################################################################################################

    def offspring_total ( self: Self
                        ) ->    int:

        # Y_n - Z_0
        return int(self.z[1:].sum())

    #############################################################################################################################################

    def n_observations ( self: Self
                       ) ->    int:

        # n + 1 sizes
        return self.n_generations + 1

    #############################################################################################################################################

    def prefix ( self: Self,
                 n:    int
               ) ->    Self:

        # First n generations
        if not 1 <= n <= self.n_generations:
            raise SchemaError("Prefix length must lie in 1..%d, got %d" % (self.n_generations, n))
        return SizesSample(self.z[:n + 1])

    #############################################################################################################################################

    def validate_against ( self:  Self,
                           kind:  str,
                           s_max: int
                         ) ->     None:

        """
            Checks that every transition is possible for a control family and a maximum number of children.
            Only the binomial family bounds the number of progenitors.
            In:
                * self:  Reference to the current object.
                * kind:  Name of the control family.
                * s_max: Maximum number of children.
            Out:
                * None.
        """

        # At most z_l progenitors with s_max children each
        if control_kind(kind) == BinomialControl.kind:
            for l in range(self.n_generations):
                if self.z[l + 1] > s_max * self.z[l]:
                    raise InconsistentSampleError("Generation %d has size %d, more than %d individuals can produce with s_max=%d under a binomial control" % (l + 1, self.z[l + 1], self.z[l], s_max))

    #############################################################################################################################################

    def __eq__ ( self:  Self,
                 other: Any
               ) ->     bool:

        # Same data
        return isinstance(other, SizesSample) and numpy.array_equal(self.z, other.z)

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def control_kind ( name: str
                 ) ->    str:

    """
        Normalizes the name of a control family.
        Case, spaces, dashes and underscores are ignored, so that "NegativeBinomial" and "negative_binomial" are the same.
        In:
            * name: Name given by the user.
        Out:
            * kind: Canonical name.
    """

    # Compare simplified names
    simplified = "".join([character for character in str(name).lower() if character.isalnum()])
    for kind in FAMILIES:
        if kind.replace("_", "") == simplified:
            return kind
    raise SchemaError("Unknown control family '%s', expected one of %s" % (name, ", ".join(FAMILIES)))

#####################################################################################################################################################

def control_pmf ( family: ControlFamily,
                  k:      int,
                  j:      int
                ) ->      float:

    """
        Returns P[phi(k) = j] for a control law.
        In:
            * family: Control law.
            * k:      Number of individuals.
            * j:      Number of progenitors.
        Out:
            * probability: Probability of having j progenitors.
    """

    # Check arguments
    if k < 0 or j < 0:
        raise ParameterDomainError("Arguments of the control law must be nonnegative, got k=%d and j=%d" % (k, j))
    probability = float(family.pmf(k, j))
    return probability

#####################################################################################################################################################

def make_rng ( seed: Union[None, int, numpy.random.SeedSequence, numpy.random.Generator]
             ) ->    numpy.random.Generator:

    """
        Creates the random number generator used everywhere in the package (PCG64).
        In:
            * seed: Seed, seed sequence, or an existing generator.
        Out:
            * rng: Random number generator.
    """

    # Generators are used as they are
    if isinstance(seed, numpy.random.Generator):
        return seed
    rng = numpy.random.Generator(numpy.random.PCG64(seed))
    return rng

#####################################################################################################################################################

def simulate ( offspring:     OffspringDistribution,
               family:        ControlFamily,
               z0:            int,
               n_generations: int,
               seed:          Union[None, int, numpy.random.SeedSequence, numpy.random.Generator] = None
             ) ->             FullTreeSample:

    """
        Simulates the entire family tree of a controlled branching process.
        In:
            * offspring:     Offspring law.
            * family:        Control law.
            * z0:            Initial population size.
            * n_generations: Number of generations to simulate.
            * seed:          Seed of the random number generator.
        Out:
            * sample: Simulated family tree.
    """

    # Check arguments
    if n_generations < 1 or z0 < 0:
        raise ParameterDomainError("Simulation needs n_generations >= 1 and z0 >= 0, got %d and %d" % (n_generations, z0))

    # Each generation draws the progenitors, then tabulates their numbers of children
    rng = make_rng(seed)
    counts = numpy.zeros((n_generations, offspring.s_max + 1), dtype=numpy.int64)
    z = z0
    for l in range(n_generations):
        phi = family.sample(z, rng) if z > 0 else 0
        counts[l] = rng.multinomial(phi, offspring.probs)
        z = int(counts[l] @ numpy.arange(offspring.s_max + 1))

    # Done
    sample = FullTreeSample(z0, counts)
    return sample

#####################################################################################################################################################

def project_progenitors ( sample: FullTreeSample
                        ) ->      ProgenitorSample:

    # Sizes and numbers of progenitors
    return ProgenitorSample(sample.sizes(), sample.progenitors())

#####################################################################################################################################################

def project_sizes ( sample: FullTreeSample
                  ) ->      SizesSample:

    # Sizes only
    return SizesSample(sample.sizes())

#####################################################################################################################################################

def true_parameters () -> Tuple[OffspringDistribution, ControlFamily]:

    """
        Returns the parameters used to simulate the shipped sample.
        The printed offspring probabilities are rounded, they are normalized here.
        In:
            * None.
        Out:
            * offspring: Offspring law.
            * family:    Control law.
    """

    # Binomial control with q = 0.6
    offspring = OffspringDistribution.from_weights(REFERENCE_OFFSPRING)
    family = ControlFamily.create(REFERENCE_KIND, REFERENCE_THETA)
    return offspring, family

#####################################################################################################################################################

def write_sample ( sample:   Union[FullTreeSample, ProgenitorSample, SizesSample],
                   path:     Union[str, TextIO],
                   metadata: Union[None, Dict[str, Any]] = None
                 ) ->        None:

    """
        Writes a sample as a CSV file with columns n, Z, phi, Z0..Zs_max (subsets for incomplete samples).
        The last generation has no progenitors recorded, its cells are left blank.
        Metadata are written first as "# key=value" lines, sorted by key.
        In:
            * sample:   Sample to write.
            * path:     Destination file, or open text stream.
            * metadata: Lines to write in the header.
        Out:
            * None.
    """

    # Columns common to all schemes
    table = sample_to_dataframe(sample)

    # Write the header and the table
    text = format_metadata(metadata) + table.to_csv(index=False, na_rep="", lineterminator="\n")
    if isinstance(path, str):
        with open(path, "w", newline="") as file:
            file.write(text)
    else:
        path.write(text)

#####################################################################################################################################################

def sample_to_dataframe ( sample: Union[FullTreeSample, ProgenitorSample, SizesSample]
                        ) ->      pandas.DataFrame:

    """
        Converts a sample to a table in the layout of the CSV files.
        In:
            * sample: Sample to convert.
        Out:
            * table: Table with nullable integer columns.
    """

    # Sizes are always there
    z = sample.sizes() if isinstance(sample, FullTreeSample) else sample.z
    n = z.size - 1
    table = pandas.DataFrame({"n": numpy.arange(n + 1), "Z": z})

    # Progenitors and counts have no value for the last generation
    if isinstance(sample, (FullTreeSample, ProgenitorSample)):
        phi = sample.progenitors() if isinstance(sample, FullTreeSample) else sample.phi
        table["phi"] = pandas.array(list(phi) + [None], dtype="Int64")
    if isinstance(sample, FullTreeSample):
        for k in range(sample.s_max + 1):
            table["Z%d" % k] = pandas.array(list(sample.counts[:, k]) + [None], dtype="Int64")
    return table

#####################################################################################################################################################

def format_metadata ( metadata: Union[None, Dict[str, Any]]
                    ) ->        str:

    # One comment line per key, sorted
    if not metadata:
        return ""
    return "".join(["# %s=%s\n" % (key, metadata[key]) for key in sorted(metadata)])

#####################################################################################################################################################

def read_sample ( path: Union[str, TextIO]
                ) ->    Union[FullTreeSample, ProgenitorSample, SizesSample]:

    """
        Reads a sample from a CSV file, detecting the scheme from the columns.
        Lines starting with "#" are ignored.
        In:
            * path: File to read, or open text stream.
        Out:
            * sample: Sample of the scheme found in the file.
    """

    # Parse the table
    try:
        table = pandas.read_csv(path, comment="#", skipinitialspace=True)
    except (pandas.errors.ParserError, pandas.errors.EmptyDataError, UnicodeDecodeError) as error:
        raise SchemaError("Cannot parse sample file: %s" % str(error))
    table.columns = [str(column).strip() for column in table.columns]
    if "n" not in table.columns or "Z" not in table.columns:
        raise SchemaError("Sample files need columns 'n' and 'Z', got %s" % ", ".join(table.columns))
    if table.shape[0] < 2:
        raise SchemaError("Sample files need at least two generations")
    if not numpy.array_equal(_integer_column(table, "n"), numpy.arange(table.shape[0])):
        raise SchemaError("Column 'n' must list generations 0, 1, 2, ... in order")
    z = _integer_column(table, "Z")

    # Counts columns make a full tree
    count_columns = sorted([column for column in table.columns if column[0] == "Z" and column[1:].isdigit()], key=lambda column: int(column[1:]))
    if len(count_columns) > 0:
        if [int(column[1:]) for column in count_columns] != list(range(len(count_columns))) or len(count_columns) < 2:
            raise SchemaError("Count columns must be Z0, Z1, ..., Zs_max with s_max >= 1, got %s" % ", ".join(count_columns))
        counts = numpy.stack([_integer_column(table.iloc[:-1], column) for column in count_columns], axis=1)
        sample = FullTreeSample(z[0], counts)
        if not numpy.array_equal(sample.sizes(), z):
            generation = int(numpy.nonzero(sample.sizes() != z)[0][0])
            raise InconsistentSampleError("Column 'Z' at generation %d does not match the offspring counted in the previous generation" % generation)
        if "phi" in table.columns and not numpy.array_equal(_integer_column(table.iloc[:-1], "phi"), sample.progenitors()):
            raise InconsistentSampleError("Column 'phi' does not match the row sums of the counts")
        return sample

    # Progenitors without counts
    if "phi" in table.columns:
        sample = ProgenitorSample(z, _integer_column(table.iloc[:-1], "phi"))
        return sample

    # Sizes only
    sample = SizesSample(z)
    return sample

#####################################################################################################################################################

def read_full_tree ( path: Union[str, TextIO]
                   ) ->    FullTreeSample:

    # Needs the counts
    sample = read_sample(path)
    if not isinstance(sample, FullTreeSample):
        raise SchemaError("This operation needs a full family tree (columns Z0..Zs_max), got a %s" % type(sample).__name__)
    return sample

#####################################################################################################################################################

def read_progenitors ( path: Union[str, TextIO]
                     ) ->    ProgenitorSample:

    """
        Reads a sample with sizes and progenitors.
        A full tree is accepted and projected.
        In:
            * path: File to read.
        Out:
            * sample: Sample with sizes and progenitors.
    """

    # Needs at least the progenitors
    sample = read_sample(path)
    if isinstance(sample, FullTreeSample):
        sample = project_progenitors(sample)
    if not isinstance(sample, ProgenitorSample):
        raise SchemaError("This operation needs the numbers of progenitors (column phi), got a %s" % type(sample).__name__)
    return sample

#####################################################################################################################################################

def read_sizes ( path: Union[str, TextIO]
               ) ->    SizesSample:

    # Any sample has sizes
    sample = read_sample(path)
    if isinstance(sample, FullTreeSample):
        return project_sizes(sample)
    if isinstance(sample, ProgenitorSample):
        return SizesSample(sample.z)
    return sample

#####################################################################################################################################################

def load_reference_sample () -> FullTreeSample:

    """
        Returns the family tree shipped with the package: 30 generations simulated with the parameters of true_parameters.
        In:
            * None.
        Out:
            * sample: Full family tree.
    """

    # Read package data
    sample = read_full_tree(REFERENCE_SAMPLE_PATH)
    return sample

#####################################################################################################################################################

def _integer_column ( table:  pandas.DataFrame,
                      column: str
                    ) ->      numpy.ndarray:

    # Non-empty, integral, nonnegative values
    values = table[column]
    if values.isna().any():
        raise SchemaError("Column '%s' has missing values" % column)
    try:
        numbers = pandas.to_numeric(values).to_numpy(dtype=float)
    except (ValueError, TypeError):
        raise SchemaError("Column '%s' must contain integers" % column)
    if numpy.any(numbers != numpy.round(numbers)) or numpy.any(numbers < 0):
        raise SchemaError("Column '%s' must contain nonnegative integers" % column)
    return numbers.astype(numpy.int64)

#####################################################################################################################################################
#####################################################################################################################################################
