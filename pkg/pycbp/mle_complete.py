#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the maximum likelihood estimators based on the entire family tree, and their asymptotic confidence intervals.
    All estimators are ratios of cumulative counts:
        * p_k = Y_{n-1}(k) / Delta_{n-1}.
        * mu = Delta_{n-1} / Y_{n-1}.
        * m = (Y_n - Z_0) / Delta_{n-1}.
        * tau = (Y_n - Z_0) / Y_{n-1}.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import logging
import numpy
import scipy.stats as stats
from typing import *
from typing_extensions import *

# Internal imports
from pycbp.errors import *
from pycbp.model import *

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

# Module logger
logger = logging.getLogger(__name__)

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class CompleteMle ():

    """
        Estimates obtained from an entire family tree.
        The totals used by the confidence intervals are kept with the estimates.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:      Self,
                   p_hat:     OffspringDistribution,
                   m_hat:     float,
                   mu_hat:    float,
                   theta_hat: float,
                   tau_hat:   float,
                   kind:      str,
                   delta:     int,
                   parents:   int
                 ) ->         Self:

        """
            This function is the constructor of the class.
            In:
                * self:      Reference to the current object.
                * p_hat:     Estimated offspring law.
                * m_hat:     Estimated offspring mean.
                * mu_hat:    Estimated migration parameter.
                * theta_hat: Estimated control parameter.
                * tau_hat:   Estimated asymptotic mean growth rate.
                * kind:      Name of the control family.
                * delta:     Total number of progenitors Delta_{n-1}.
                * parents:   Total number of individuals Y_{n-1}.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(CompleteMle, self).__init__()

        # Store
        self.p_hat = p_hat
        self.m_hat = m_hat
        self.sigma2_hat = float(numpy.dot((numpy.arange(p_hat.s_max + 1) - m_hat) ** 2, p_hat.probs))
        self.mu_hat = mu_hat
        self.theta_hat = theta_hat
        self.tau_hat = tau_hat
        self.kind = kind
        self.delta = delta
        self.parents = parents

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def as_dict ( self: Self
                ) ->    Dict[str, float]:

        """
            Returns the estimates by name: p0..p<s_max>, m, sigma2, theta, mu, tau.
            In:
                * self: Reference to the current object.
            Out:
                * estimates: Estimates by name.
        """

        # Offspring law first
        estimates = {"p%d" % k: float(value) for k, value in enumerate(self.p_hat.probs)}
        estimates.update({"m": self.m_hat, "sigma2": self.sigma2_hat, "theta": self.theta_hat, "mu": self.mu_hat, "tau": self.tau_hat})
        return estimates

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def estimate ( sample: FullTreeSample,
               kind:   str
             ) ->      CompleteMle:

    """
        Computes the maximum likelihood estimators from the entire family tree.
        The estimator of p does not depend on the control, the family is only needed for theta.
        In:
            * sample: Entire family tree.
            * kind:   Name of the control family.
        Out:
            * mle: Estimates.
    """

    # Cumulative totals
    counts = sample.counts.sum(axis=0)
    delta = int(counts.sum())
    sizes = sample.sizes()
    parents = int(sizes[:-1].sum())
    offspring = int(sizes[1:].sum())
    if delta == 0 or parents == 0:
        raise DegenerateSampleError("The family tree has no progenitors (Delta=%d, Y=%d), nothing can be estimated" % (delta, parents))

    # Ratios
    p_hat = OffspringDistribution(counts / delta)
    mu_hat = delta / parents
    theta_hat = FAMILIES[control_kind(kind)].mu_inverse(mu_hat)
    mle = CompleteMle(p_hat, offspring / delta, mu_hat, theta_hat, offspring / parents, control_kind(kind), delta, parents)
    return mle

#####################################################################################################################################################

def normal_quantile ( level: float
                    ) ->     float:

    """
        Returns z such that 1 - Phi(z) = (1 - level) / 2, Phi being the standard normal distribution function.
        In:
            * level: Confidence level.
        Out:
            * z: Two-sided standard normal quantile.
    """

    # Check arguments
    if not 0.0 < level < 1.0:
        raise ParameterDomainError("Confidence level must lie in (0, 1), got %s" % str(level))
    z = float(stats.norm.isf((1.0 - level) / 2.0))
    return z

#####################################################################################################################################################

def confidence_intervals ( mle:    CompleteMle,
                           sample: FullTreeSample,
                           level:  float = 0.95
                         ) ->      Dict[str, Tuple[float, float]]:

    """
        Asymptotic confidence intervals of the parameters.
        Standard deviations are:
            * p_k: (p_k (1 - p_k) / Delta_{n-1})^(1/2).
            * m: (sigma2 / Delta_{n-1})^(1/2).
            * sigma2: (V / Delta_{n-1})^(1/2), with V = sum_k (k - m)^4 p_k - sigma2^2.
            * mu: (theta mu'(theta) / Y_{n-1})^(1/2).
            * tau: ((sigma2 mu + m^2 theta mu'(theta)) / Y_{n-1})^(1/2).
        In:
            * mle:    Estimates.
            * sample: Family tree the estimates come from.
            * level:  Confidence level.
        Out:
            * intervals: Pairs (low, high) for p0..p<s_max>, m, sigma2, mu, tau.
    """

    # Totals from the sample
    z = normal_quantile(level)
    delta = int(sample.counts.sum())
    parents = int(sample.sizes()[:-1].sum())
    if delta == 0 or parents == 0:
        raise DegenerateSampleError("The family tree has no progenitors, no interval can be computed")

    # Variances of the estimators
    family = ControlFamily.create(mle.kind, mle.theta_hat)
    control_term = mle.theta_hat * family.mu_prime()
    fourth = mle.p_hat.fourth_central_moment()
    variances = {"p%d" % k: value * (1.0 - value) / delta for k, value in enumerate(mle.p_hat.probs)}
    variances["m"] = mle.sigma2_hat / delta
    variances["sigma2"] = max(fourth - mle.sigma2_hat ** 2, 0.0) / delta
    variances["mu"] = control_term / parents
    variances["tau"] = (mle.sigma2_hat * mle.mu_hat + mle.m_hat ** 2 * control_term) / parents

    # Symmetric intervals
    estimates = mle.as_dict()
    intervals = {}
    for name in variances:
        half_width = z * numpy.sqrt(max(variances[name], 0.0))
        intervals[name] = (estimates[name] - half_width, estimates[name] + half_width)
    return intervals

#####################################################################################################################################################

def evolve ( sample: FullTreeSample,
             kind:   str,
             level:  float = 0.95
           ) ->      List[Dict[str, Any]]:

    """
        Estimates and intervals computed on every prefix of the family tree, to follow them over the generations.
        Prefixes without progenitors or with an estimate of mu outside the family's range are skipped.
        In:
            * sample: Entire family tree.
            * kind:   Name of the control family.
            * level:  Confidence level.
        Out:
            * rows: Dictionaries (n, parameter, estimate, ci_low, ci_high).
    """

    # One block of rows per prefix
    rows = []
    for n in range(1, sample.n_generations + 1):
        prefix = sample.prefix(n)
        try:
            mle = estimate(prefix, kind)
            intervals = confidence_intervals(mle, prefix, level)
        except (DegenerateSampleError, BoundaryError) as error:
            logger.warning("Skipping prefix n=%d: %s" % (n, str(error)))
            continue
        estimates = mle.as_dict()
        for name in estimates:
            low, high = intervals.get(name, (None, None))
            rows.append({"n": n, "parameter": name, "estimate": estimates[name], "ci_low": low, "ci_high": high})
    return rows

#####################################################################################################################################################
#####################################################################################################################################################
