#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the exact observed-data log-likelihood of the two incomplete observation schemes.
    Both rely on the l-fold convolutions P^{*l} of the offspring law, i.e., the coefficients of the polynomial (sum_k p_k s^k)^l.
    It also provides the Akaike criterion and the scan over control families and maximum numbers of children.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import logging
import math
import numpy
import pandas
from typing import *
from typing_extensions import *

# Internal imports
from pycbp.errors import *
from pycbp.model import *
from pycbp.parallel import *

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

# Module logger
logger = logging.getLogger(__name__)

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class ScanRow ():

    """
        Result of one cell of a scan: a control family, a maximum number of children, and the fit obtained.
        Failed cells keep the error message instead of a fit.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:       Self,
                   kind:       str,
                   s_max:      int,
                   fit:        Union[None, Any],
                   aic:        Union[None, float],
                   error:      Union[None, str] = None
                 ) ->          Self:

        """
            This function is the constructor of the class.
            In:
                * self:  Reference to the current object.
                * kind:  Name of the control family.
                * s_max: Maximum number of children.
                * fit:   Fit obtained by the EM algorithm, or None if the cell failed.
                * aic:   Criterion value, or None if the cell failed.
                * error: Description of the failure, if any.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(ScanRow, self).__init__()

        # Store
        self.kind = kind
        self.s_max = s_max
        self.fit = fit
        self.aic = aic
        self.error = error

    #############################################################################################################################################
    #                                                                 PROPERTIES                                                                #
    #############################################################################################################################################

    @property
    def loglik ( self: Self
               ) ->    Union[None, float]:

        # Exact log-likelihood at the fit
        return None if self.fit is None else self.fit.loglik

    #############################################################################################################################################

    @property
    def iterations ( self: Self
                   ) ->    Union[None, int]:

        # EM iterations needed
        return None if self.fit is None else self.fit.iterations

#####################################################################################################################################################

class ScanResult ():

    """
        Results of a scan over control families and maximum numbers of children.
        Rows are stored in grid order: s_max first, then family.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self: Self,
                   rows: List[ScanRow]
                 ) ->    Self:

        """
            This function is the constructor of the class.
            In:
                * self: Reference to the current object.
                * rows: One row per cell of the grid.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(ScanResult, self).__init__()

        # Store
        self.rows = rows

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def get ( self:  Self,
              kind:  str,
              s_max: int
            ) ->     ScanRow:

        # Find the cell
        kind = control_kind(kind)
        for row in self.rows:
            if row.kind == kind and row.s_max == s_max:
                return row
        raise KeyError((kind, s_max))

    #############################################################################################################################################

    def best ( self: Self
             ) ->    Union[None, ScanRow]:

        """
            Returns the cell with minimum criterion over the whole grid.
            In:
                * self: Reference to the current object.
            Out:
                * row: Best cell, or None if every cell failed.
        """

        # Ignore failed cells, keep the first of ties
        candidates = [row for row in self.rows if row.aic is not None and numpy.isfinite(row.aic)]
        if len(candidates) == 0:
            return None
        row = min(candidates, key=lambda candidate: candidate.aic)
        return row

    #############################################################################################################################################

    def best_per_s_max ( self: Self
                       ) ->    Dict[int, ScanRow]:

        # Minimum criterion among families, for each s_max
        best = {}
        for row in self.rows:
            if row.aic is None or not numpy.isfinite(row.aic):
                continue
            if row.s_max not in best or row.aic < best[row.s_max].aic:
                best[row.s_max] = row
        return best

    #############################################################################################################################################

    def to_rows ( self: Self
                ) ->    List[Dict[str, Any]]:

        """
            Formats the scan as a table with one line per s_max.
            For each family, columns give the iterations, log-likelihood and criterion.
            In:
                * self: Reference to the current object.
            Out:
                * rows: Lines of the table, as dictionaries.
        """

        # Group by s_max
        best = self.best_per_s_max()
        lines = {}
        for row in self.rows:
            line = lines.setdefault(row.s_max, {"s_max": row.s_max})
            line["iterations_%s" % row.kind] = row.iterations
            line["loglik_%s" % row.kind] = row.loglik
            line["aic_%s" % row.kind] = row.aic
        for s_max in lines:
            lines[s_max]["best"] = best[s_max].kind if s_max in best else None
        rows = [lines[s_max] for s_max in sorted(lines)]
        return rows

    #############################################################################################################################################

    def to_dataframe ( self: Self
                     ) ->    pandas.DataFrame:

        # Same as to_rows
        return pandas.DataFrame(self.to_rows())

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def log_add_rows ( terms: numpy.ndarray
                 ) ->     numpy.ndarray:

    """
        Computes log(sum(exp(terms))) along the first axis, with -inf for columns without finite terms.
        In:
            * terms: Matrix of log values.
        Out:
            * result: Log of the column sums.
    """

    # Shift by the column maxima
    shift = terms.max(axis=0)
    finite = numpy.isfinite(shift)
    safe_shift = numpy.where(finite, shift, 0.0)
    with numpy.errstate(invalid="ignore", divide="ignore"):
        result = safe_shift + numpy.log(numpy.exp(terms - safe_shift).sum(axis=0))
    result = numpy.where(finite, result, -numpy.inf)
    return result

#####################################################################################################################################################

def log_convolution_powers ( p:     OffspringDistribution,
                             l_max: int
                           ) ->     numpy.ndarray:

    """
        Computes log P^{*l} for l = 0..l_max in log space.
        Entry [l, t] is the log-probability that l progenitors have t children in total.
        In:
            * p:     Offspring law.
            * l_max: Largest number of progenitors.
        Out:
            * log_powers: Matrix of shape (l_max + 1, s_max * l_max + 1), -inf where the probability is zero.
    """

    # Point mass at zero for l = 0
    s_max = p.s_max
    width = s_max * l_max + 1
    with numpy.errstate(divide="ignore"):
        log_p = numpy.log(p.probs)
    log_powers = numpy.full((l_max + 1, width), -numpy.inf)
    log_powers[0, 0] = 0.0

    # Each row adds one progenitor to the previous one
    terms = numpy.empty((s_max + 1, width))
    for l in range(1, l_max + 1):
        terms.fill(-numpy.inf)
        support = s_max * (l - 1) + 1
        for k in range(s_max + 1):
            terms[k, k:k + support] = log_p[k] + log_powers[l - 1, :support]
        log_powers[l] = log_add_rows(terms)
    return log_powers

#####################################################################################################################################################

def convolution_powers ( p:     OffspringDistribution,
                         l_max: int
                       ) ->     numpy.ndarray:

    """
        Computes P^{*l} for l = 0..l_max in linear space.
        In:
            * p:     Offspring law.
            * l_max: Largest number of progenitors.
        Out:
            * powers: Matrix of shape (l_max + 1, s_max * l_max + 1), row l has support 0..l * s_max.
    """

    # Point mass at zero for l = 0
    width = p.s_max * l_max + 1
    powers = numpy.zeros((l_max + 1, width))
    powers[0, 0] = 1.0

    # Polynomial products
    for l in range(1, l_max + 1):
        row = numpy.convolve(powers[l - 1, :p.s_max * (l - 1) + 1], p.probs)
        powers[l, :row.size] = row
    return powers

#####################################################################################################################################################

def phi_upper_bound ( family: ControlFamily,
                      z_l:    int,
                      z_next: int,
                      s_max:  int,
                      tail:   float = DEFAULT_TAIL
                    ) ->      int:

    """
        Returns the largest number of progenitors considered for a transition from z_l to z_next individuals.
        Bounded laws use their support, unbounded laws are truncated where the neglected mass is below the tail, but never below ceil(z_next / s_max).
        In:
            * family: Control law.
            * z_l:    Size of the generation.
            * z_next: Size of the next generation.
            * s_max:  Maximum number of children.
            * tail:   Neglected mass for unbounded laws.
        Out:
            * phi_max: Largest number of progenitors.
    """

    # Bounded support
    if isinstance(family, BinomialControl):
        return z_l

    # Truncation
    phi_max = max(family.support_max(z_l, tail), int(math.ceil(z_next / s_max)))
    logger.debug("Truncating the %s control at %d progenitors for the transition %d -> %d", family.kind, phi_max, z_l, z_next)
    return phi_max

#####################################################################################################################################################

def transition_logliks_progenitors ( sample: ProgenitorSample,
                                     p:      OffspringDistribution,
                                     family: ControlFamily
                                   ) ->      numpy.ndarray:

    """
        Computes the log-probability of each transition (z_l, phi_l) -> z_{l+1}.
        In:
            * sample: Sample with sizes and progenitors.
            * p:      Offspring law.
            * family: Control law.
        Out:
            * terms: One log-probability per generation, -inf for impossible transitions.
    """

    # Convolutions up to the largest number of progenitors
    log_powers = log_convolution_powers(p, int(sample.phi.max()))
    width = log_powers.shape[1]

    # Control term plus offspring term
    terms = numpy.empty(sample.n_generations)
    for l in range(sample.n_generations):
        z_next = sample.z[l + 1]
        offspring_term = log_powers[sample.phi[l], z_next] if z_next < width else -numpy.inf
        terms[l] = float(family.log_pmf(sample.z[l], sample.phi[l])) + offspring_term
    return terms

#####################################################################################################################################################

def transition_logliks_sizes ( sample: SizesSample,
                               p:      OffspringDistribution,
                               family: ControlFamily,
                               tail:   float = DEFAULT_TAIL
                             ) ->      numpy.ndarray:

    """
        Computes the log-probability of each transition z_l -> z_{l+1}, summing over the hidden numbers of progenitors.
        In:
            * sample: Sample with sizes only.
            * p:      Offspring law.
            * family: Control law.
            * tail:   Neglected mass for unbounded control laws.
        Out:
            * terms: One log-probability per generation, -inf for impossible transitions.
    """

    # Convolutions up to the largest number of progenitors needed
    bounds = [phi_upper_bound(family, sample.z[l], sample.z[l + 1], p.s_max, tail) for l in range(sample.n_generations)]
    log_powers = log_convolution_powers(p, max(bounds))

    # Mix over the number of progenitors
    terms = numpy.empty(sample.n_generations)
    for l in range(sample.n_generations):
        if sample.z[l + 1] >= log_powers.shape[1]:
            terms[l] = -numpy.inf
            continue
        phis = numpy.arange(bounds[l] + 1)
        mixture = family.log_pmf(sample.z[l], phis) + log_powers[phis, sample.z[l + 1]]
        terms[l] = log_add_rows(mixture[:, None])[0]
    return terms

#####################################################################################################################################################

def loglik_progenitors ( sample: ProgenitorSample,
                         p:      OffspringDistribution,
                         family: ControlFamily
                       ) ->      float:

    """
        Exact log-likelihood of the parameters given sizes and progenitors.
        In:
            * sample: Sample with sizes and progenitors.
            * p:      Offspring law.
            * family: Control law.
        Out:
            * loglik: Log-likelihood, -inf if some transition is impossible.
    """

    # Sum of the transitions
    terms = transition_logliks_progenitors(sample, p, family)
    return _total(terms)

#####################################################################################################################################################

def loglik_sizes ( sample: SizesSample,
                   p:      OffspringDistribution,
                   family: ControlFamily,
                   tail:   float = DEFAULT_TAIL
                 ) ->      float:

    """
        Exact log-likelihood of the parameters given the generation sizes only.
        In:
            * sample: Sample with sizes only.
            * p:      Offspring law.
            * family: Control law.
            * tail:   Neglected mass for unbounded control laws.
        Out:
            * loglik: Log-likelihood, -inf if some transition is impossible.
    """

    # Sum of the transitions
    terms = transition_logliks_sizes(sample, p, family, tail)
    return _total(terms)

#####################################################################################################################################################

def loglik ( sample: Union[ProgenitorSample, SizesSample],
             p:      OffspringDistribution,
             family: ControlFamily,
             tail:   float = DEFAULT_TAIL
           ) ->      float:

    # Dispatch on the scheme
    if isinstance(sample, ProgenitorSample):
        return loglik_progenitors(sample, p, family)
    return loglik_sizes(sample, p, family, tail)

#####################################################################################################################################################

def aic ( loglik:    float,
          n_params:  int,
          n_obs:     int,
          corrected: bool = True
        ) ->         float:

    """
        Akaike information criterion.
        The corrected version is -2 * loglik + 2 * k * n / (n - k - 1), the plain one is -2 * loglik + 2 * k.
        In:
            * loglik:    Log-likelihood at the fit.
            * n_params:  Number of free parameters k.
            * n_obs:     Number of observations n.
            * corrected: Indicates if the small-sample correction is applied.
        Out:
            * value: Criterion, lower is better.
    """

    # Plain version
    if not corrected:
        return -2.0 * loglik + 2.0 * n_params

    # Corrected version needs enough observations
    denominator = n_obs - n_params - 1
    if denominator <= 0:
        raise ParameterDomainError("The corrected criterion needs more than %d observations for %d parameters, got %d" % (n_params + 1, n_params, n_obs))
    value = -2.0 * loglik + 2.0 * n_params * n_obs / denominator
    return value

#####################################################################################################################################################

def scan ( sample:      Union[ProgenitorSample, SizesSample],
           families:    List[str],
           s_max_grid:  List[int],
           cfg:         Any,
           n_starts:    int = 10,
           master_seed: Union[None, int] = None,
           corrected:   bool = True,
           threads:     Union[None, int] = None,
           progress:    bool = False
         ) ->           ScanResult:

    """
        Fits the model for every control family and maximum number of children, and compares the fits with the Akaike criterion.
        Samples with progenitors use a single EM run from the uniform law, samples with sizes only use a multi-start EM.
        The number of parameters is s_max (free offspring probabilities) plus one (control parameter).
        In:
            * sample:      Sample to fit.
            * families:    Names of the control families.
            * s_max_grid:  Maximum numbers of children.
            * cfg:         EM configuration, whose family and s_max are replaced for each cell.
            * n_starts:    Number of starts for samples with sizes only.
            * master_seed: Seed of the starts.
            * corrected:   Indicates if the small-sample correction of the criterion is applied.
            * threads:     Number of workers.
            * progress:    Indicates if a progress bar is displayed.
        Out:
            * result: One row per cell, failures recorded in the rows.
    """

    # Check arguments
    if len(families) == 0 or len(s_max_grid) == 0:
        raise SchemaError("Scan grids must be nonempty")

    # Cells are independent
    tasks = [(sample, control_kind(kind), s_max, cfg, n_starts, master_seed, corrected) for s_max in s_max_grid for kind in families]
    rows = parallel_map(_scan_cell, tasks, threads, "Scan", progress)
    result = ScanResult(rows)

    # Report
    best = result.best()
    if best is not None:
        logger.info("Minimum criterion %.4f for the %s family with s_max=%d" % (best.aic, best.kind, best.s_max))
    return result

#####################################################################################################################################################

def _scan_cell ( task: Tuple[Any, ...]
               ) ->    ScanRow:

    """
        Fits one cell of a scan.
        In:
            * task: Tuple (sample, kind, s_max, cfg, n_starts, master_seed, corrected).
        Out:
            * row: Result of the cell.
    """

    # Local import, the EM module depends on this one
    from pycbp import em

    # Fit with the EM matching the scheme
    sample, kind, s_max, cfg, n_starts, master_seed, corrected = task
    cell_cfg = cfg.replace(kind=kind, s_max=s_max)
    try:
        if isinstance(sample, ProgenitorSample):
            fit = em.em_fit_progenitors(sample, OffspringDistribution.uniform(s_max), 0.5, cell_cfg)
        else:
            fit, _ = em.multi_start(sample, n_starts, master_seed, cell_cfg, threads=1)
        value = aic(fit.loglik, s_max + 1, sample.n_observations(), corrected)
        row = ScanRow(kind, s_max, fit, value)
    except PyCBPError as error:
        logger.warning("Scan cell (%s, s_max=%d) failed: %s" % (kind, s_max, str(error)))
        row = ScanRow(kind, s_max, None, None, str(error))
    return row

#####################################################################################################################################################

def _total ( terms: numpy.ndarray
           ) ->     float:

    # Report impossible transitions
    impossible = numpy.nonzero(~numpy.isfinite(terms))[0]
    if impossible.size > 0:
        logger.warning("Zero-probability transition at generation(s) %s" % ", ".join([str(l) for l in impossible]))
        return -numpy.inf
    return float(terms.sum())

#####################################################################################################################################################
#####################################################################################################################################################
