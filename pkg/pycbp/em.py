#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the two EM algorithms estimating the offspring law p and the control parameter theta from incomplete samples.
    The hidden data are the numbers Z_l(k) of progenitors of generation l having k children.
    With sizes and progenitors observed, the E-step averages over the transition trees with phi_l progenitors.
    With sizes only, the E-step also averages over the number of progenitors, which requires knowing the control family.
    The M-step is the same for both: p_k = sum_l E[Z_l(k)] / E[Delta_{n-1}] and theta = mu^{-1}(E[Delta_{n-1}] / Y_{n-1}).
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import copy
import logging
import numpy
import scipy.special as special
from typing import *
from typing_extensions import *

# Internal imports
from pycbp.errors import *
from pycbp.model import *
from pycbp.likelihood import *
from pycbp.parallel import *
from pycbp.trees import transition_tree

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Ways of computing the E-step.
    "convolution" uses E[Z(k) | phi*, z'] = phi* * p_k * P^{*(phi*-1)}_{z'-k} / P^{*phi*}_{z'}, since the phi* numbers of children are exchangeable.
    "enumerate" sums over the configurations of the transition trees.
"""

METHODS = ["convolution", "enumerate"]

#####################################################################################################################################################

"""
    Names of the incomplete observation schemes.
"""

SCHEMES = ["progenitors", "sizes"]

#####################################################################################################################################################

"""
    Iterations between two debug messages.
"""

LOG_EVERY = 1000

#####################################################################################################################################################

"""
    Convergence points whose log-likelihoods differ by less than FLAT_LOGLIK from the best one are indistinguishable.
    A warning is issued when their offspring means spread over more than FLAT_SPREAD.
"""

FLAT_LOGLIK = 1e-6
FLAT_SPREAD = 1e-2

#####################################################################################################################################################

# Module logger
logger = logging.getLogger(__name__)

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class EmConfig ():

    """
        Settings of the EM algorithms.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:         Self,
                   tol:          float = 1e-6,
                   max_iters:    int = 50000,
                   kind:         str = "binomial",
                   s_max:        int = 3,
                   method:       str = "convolution",
                   boundary_eps: float = 1e-9,
                   trace:        bool = False,
                   tail:         float = DEFAULT_TAIL
                 ) ->            Self:

        """
            This function is the constructor of the class.
            In:
                * self:         Reference to the current object.
                * tol:          Iterations stop when p and theta move less than this value (maximum absolute difference).
                * max_iters:    Maximum number of iterations.
                * kind:         Name of the control family.
                * s_max:        Maximum number of children.
                * method:       Way of computing the E-step ("convolution" or "enumerate").
                * boundary_eps: A migration target on the boundary of the family's range is moved inside by this amount.
                * trace:        Indicates if parameters and log-likelihood are recorded at every iteration.
                * tail:         Neglected mass when truncating unbounded control laws.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(EmConfig, self).__init__()

        # Check arguments
        if not tol > 0.0:
            raise SchemaError("EM tolerance must be positive, got %s" % str(tol))
        if max_iters < 1:
            raise SchemaError("EM needs at least one iteration, got %s" % str(max_iters))
        if s_max < 1:
            raise SchemaError("s_max must be at least 1, got %s" % str(s_max))
        if method not in METHODS:
            raise SchemaError("Unknown E-step method '%s', expected one of %s" % (method, ", ".join(METHODS)))
        if boundary_eps < 0.0 or not 0.0 < tail < 1.0:
            raise SchemaError("boundary_eps must be nonnegative and tail in (0, 1)")

        # Store
        self.tol = float(tol)
        self.max_iters = int(max_iters)
        self.kind = control_kind(kind)
        self.s_max = int(s_max)
        self.method = method
        self.boundary_eps = float(boundary_eps)
        self.trace = bool(trace)
        self.tail = float(tail)

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def replace ( self:    Self,
                  **kwargs: Any
                ) ->       Self:

        """
            Returns a copy with some settings changed.
            In:
                * self:   Reference to the current object.
                * kwargs: Settings to change.
            Out:
                * cfg: New configuration.
        """

        # Rebuild to validate again
        settings = dict(tol=self.tol, max_iters=self.max_iters, kind=self.kind, s_max=self.s_max, method=self.method, boundary_eps=self.boundary_eps, trace=self.trace, tail=self.tail)
        settings.update(kwargs)
        cfg = EmConfig(**settings)
        return cfg

#####################################################################################################################################################

class EmFit ():

    """
        Convergence point of an EM algorithm.
        The offspring mean m, variance sigma2 and migration parameter mu are derived from p and theta.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:        Self,
                   p:           OffspringDistribution,
                   theta:       float,
                   kind:        str,
                   iterations:  int,
                   converged:   bool,
                   loglik:      float,
                   trace:       Union[None, List[Tuple[int, numpy.ndarray, float, float]]] = None,
                   start_index: Union[None, int] = None
                 ) ->           Self:

        """
            This function is the constructor of the class.
            In:
                * self:        Reference to the current object.
                * p:           Estimated offspring law.
                * theta:       Estimated control parameter.
                * kind:        Name of the control family.
                * iterations:  Number of iterations performed.
                * converged:   Indicates if the stopping criterion was met.
                * loglik:      Exact observed-data log-likelihood at the fit.
                * trace:       Rows (iteration, p, theta, loglik), if recorded.
                * start_index: Index of the start in a multi-start run, if any.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(EmFit, self).__init__()

        # Store
        self.p = p
        self.theta = float(theta)
        self.kind = control_kind(kind)
        self.iterations = iterations
        self.converged = converged
        self.loglik = loglik
        self.trace = trace
        self.start_index = start_index

        # Derived quantities
        self.family = ControlFamily.create(self.kind, self.theta)
        self.m = p.mean()
        self.sigma2 = p.variance()
        self.mu = self.family.mu()

    #############################################################################################################################################
    #                                                                 PROPERTIES                                                                #
    #############################################################################################################################################

    @property
    def tau ( self: Self
            ) ->    float:

        # Asymptotic mean growth rate
        return self.m * self.mu

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def as_dict ( self: Self
                ) ->    Dict[str, float]:

        """
            Returns the estimated parameters by name: p0..p<s_max>, m, sigma2, theta, mu, tau.
            In:
                * self: Reference to the current object.
            Out:
                * parameters: Parameters by name.
        """

        # Offspring law first
        parameters = {"p%d" % k: float(value) for k, value in enumerate(self.p.probs)}
        parameters.update({"m": self.m, "sigma2": self.sigma2, "theta": self.theta, "mu": self.mu, "tau": self.tau})
        return parameters

    #############################################################################################################################################

    def __repr__ ( self: Self
                 ) ->    str:

        # Short description
        return "EmFit(p=%s, theta=%.6g, loglik=%.6g, iterations=%d, converged=%s)" % (str(numpy.round(self.p.probs, 6).tolist()), self.theta, self.loglik, self.iterations, self.converged)

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def e_step_progenitors ( sample: ProgenitorSample,
                         p:      OffspringDistribution,
                         method: str = "convolution"
                       ) ->      numpy.ndarray:

    """
        Expected hidden counts given sizes and progenitors: E[Z_l(k) | phi_l, Z_{l+1}].
        Given phi_l and z_{l+1}, the counts follow a multinomial law restricted to the transition tree, which does not depend on theta.
        In:
            * sample: Sample with sizes and progenitors.
            * p:      Current offspring law.
            * method: Way of computing the expectations.
        Out:
            * expected: Matrix with one row per generation and one column per number of children.
    """

    # Convolutions are shared by all generations
    expected = numpy.zeros((sample.n_generations, p.s_max + 1))
    log_powers = log_convolution_powers(p, int(sample.phi.max())) if method == "convolution" else None

    # Generations are independent
    for l in range(sample.n_generations):
        phi_star, z_next = int(sample.phi[l]), int(sample.z[l + 1])
        if z_next > p.s_max * phi_star:
            raise InconsistentSampleError("Generation %d: %d progenitors cannot have %d children with s_max=%d" % (l, phi_star, z_next, p.s_max))
        if phi_star == 0:
            continue
        if method == "convolution":
            expected[l] = _fixed_expectation(log_powers, p, phi_star, z_next, l)
        else:
            tree = transition_tree(phi_star, z_next, p.s_max)
            weights = _normalized(tree.log_multinomial + special.xlogy(tree.matrix, p.probs).sum(axis=1), l)
            expected[l] = weights @ tree.matrix
    return expected

#####################################################################################################################################################

def e_step_sizes ( sample: SizesSample,
                   p:      OffspringDistribution,
                   family: ControlFamily,
                   method: str = "convolution",
                   tail:   float = DEFAULT_TAIL
                 ) ->      Tuple[numpy.ndarray, float]:

    """
        Expected hidden counts given sizes only: E[Z_l(k) | Z_l, Z_{l+1}] and E[Delta_{n-1} | sizes].
        The hidden pairs (phi_l, configuration) are weighted by the control law and the multinomial law of the configuration.
        In:
            * sample: Sample with sizes only.
            * p:      Current offspring law.
            * family: Current control law.
            * method: Way of computing the expectations.
            * tail:   Neglected mass when truncating unbounded control laws.
        Out:
            * expected: Matrix with one row per generation and one column per number of children.
            * delta:    Expected total number of progenitors.
    """

    # Drop the log-likelihood
    expected, delta, _ = _e_step_sizes(sample, p, family, method, tail)
    return expected, delta

#####################################################################################################################################################

def m_step ( expected_counts: numpy.ndarray,
             delta_expected:  float,
             parents_total:   float,
             kind:            str,
             boundary_eps:    float = 0.0
           ) ->               Tuple[OffspringDistribution, float]:

    """
        Maximizes the expected complete-data log-likelihood.
        In:
            * expected_counts: Expected hidden counts, one row per generation.
            * delta_expected:  Expected total number of progenitors.
            * parents_total:   Total number of individuals Y_{n-1} in generations 0..n-1.
            * kind:            Name of the control family.
            * boundary_eps:    A migration target on the boundary of the family's range is moved inside by this amount (0 to forbid).
        Out:
            * p_next:     Updated offspring law.
            * theta_next: Updated control parameter.
    """

    # Check arguments
    if not delta_expected > 0.0 or not parents_total > 0.0:
        raise DegenerateSampleError("The M-step needs a positive number of progenitors and individuals, got %.17g and %.17g" % (delta_expected, parents_total))

    # Offspring law, cleaned from rounding errors
    counts = numpy.atleast_2d(numpy.asarray(expected_counts, dtype=float))
    probs = numpy.maximum(counts.sum(axis=0) / delta_expected, 0.0)
    if abs(probs.sum() - 1.0) < 1e-9:
        probs = probs / probs.sum()
    p_next = OffspringDistribution(probs)

    # Migration parameter, moved away from a closed boundary if allowed
    family_class = FAMILIES[control_kind(kind)]
    target = delta_expected / parents_total
    if boundary_eps > 0.0:
        for bound, direction in zip(family_class.mu_range, [1.0, -1.0]):
            if numpy.isfinite(bound) and abs(target - bound) <= 1e-12 * max(1.0, abs(bound)):
                target = bound + direction * boundary_eps
    theta_next = family_class.mu_inverse(target)
    return p_next, theta_next

#####################################################################################################################################################

def em_fit_progenitors ( sample:     ProgenitorSample,
                         init_p:     Union[None, OffspringDistribution],
                         init_theta: Union[None, float],
                         cfg:        EmConfig
                       ) ->          EmFit:

    """
        EM algorithm based on sizes and progenitors.
        Since the total number of progenitors is observed, theta reaches its final value at the first iteration.
        In:
            * sample:     Sample with sizes and progenitors.
            * init_p:     Initial offspring law (uniform if None).
            * init_theta: Initial control parameter (0.5 if None).
            * cfg:        EM configuration.
        Out:
            * fit: Convergence point.
    """

    # Totals do not change over iterations
    sample.validate_against(cfg.kind, cfg.s_max)
    delta = sample.progenitors_total()
    parents = sample.parents_total()

    # E-step ignores theta, log-likelihood only computed for the trace
    def step ( p:      OffspringDistribution,
               family: ControlFamily
             ) ->      Tuple[numpy.ndarray, float, Union[None, float]]:
        expected = e_step_progenitors(sample, p, cfg.method)
        current = loglik_progenitors(sample, p, family) if cfg.trace else None
        return expected, delta, current

    # Run the loop
    fit = _run_em(step, lambda p, family: loglik_progenitors(sample, p, family), parents, init_p, init_theta, cfg, "progenitors")
    return fit

#####################################################################################################################################################

def em_fit_sizes ( sample:     SizesSample,
                   init_p:     Union[None, OffspringDistribution],
                   init_theta: Union[None, float],
                   cfg:        EmConfig
                 ) ->          EmFit:

    """
        EM algorithm based on the generation sizes only.
        In:
            * sample:     Sample with sizes only.
            * init_p:     Initial offspring law (uniform if None).
            * init_theta: Initial control parameter (0.5 if None).
            * cfg:        EM configuration.
        Out:
            * fit: Convergence point.
    """

    # Totals do not change over iterations
    sample.validate_against(cfg.kind, cfg.s_max)
    parents = sample.parents_total()

    # The E-step gives the log-likelihood at the current parameters for free
    def step ( p:      OffspringDistribution,
               family: ControlFamily
             ) ->      Tuple[numpy.ndarray, float, Union[None, float]]:
        return _e_step_sizes(sample, p, family, cfg.method, cfg.tail)

    # Run the loop
    fit = _run_em(step, lambda p, family: loglik_sizes(sample, p, family, cfg.tail), parents, init_p, init_theta, cfg, "sizes")
    return fit

#####################################################################################################################################################

def em_fit ( sample:     Union[ProgenitorSample, SizesSample],
             init_p:     Union[None, OffspringDistribution],
             init_theta: Union[None, float],
             cfg:        EmConfig
           ) ->          EmFit:

    # Dispatch on the scheme
    if isinstance(sample, ProgenitorSample):
        return em_fit_progenitors(sample, init_p, init_theta, cfg)
    return em_fit_sizes(sample, init_p, init_theta, cfg)

#####################################################################################################################################################

def multi_start ( sample:      Union[ProgenitorSample, SizesSample],
                  n_starts:    int,
                  master_seed: Union[None, int],
                  cfg:         EmConfig,
                  threads:     Union[None, int] = None,
                  progress:    bool = False
                ) ->           Tuple[EmFit, List[EmFit]]:

    """
        Runs the EM algorithm from random initial values and keeps the convergence point with the largest exact log-likelihood.
        Initial offspring laws are uniform on the simplex (Dirichlet with unit parameters), and initial control parameters come from ControlFamily.random_theta.
        Start i only depends on (master_seed, i).
        A warning is logged when starts with the same log-likelihood as the best one disagree on the offspring mean.
        In:
            * sample:      Sample to fit.
            * n_starts:    Number of starts.
            * master_seed: Seed from which the starts are derived.
            * cfg:         EM configuration.
            * threads:     Number of workers.
            * progress:    Indicates if a progress bar is displayed.
        Out:
            * best: Selected convergence point.
            * fits: Convergence points of all starts that did not fail, in start order.
    """

    # Check arguments
    if n_starts < 1:
        raise SchemaError("Multi-start needs at least one start, got %d" % n_starts)

    # Starts are independent
    seeds = spawn_seeds(master_seed, n_starts)
    tasks = [(index, seeds[index], sample, cfg) for index in range(n_starts)]
    results = parallel_map(_multi_start_task, tasks, threads, "EM starts", progress)

    # Separate failures
    fits = [result for result in results if isinstance(result, EmFit)]
    diagnostics = [result for result in results if not isinstance(result, EmFit)]
    for index, message in diagnostics:
        logger.warning("EM start %d failed: %s" % (index, message))
    if len(fits) == 0:
        raise MultiStartError("All %d EM starts failed" % n_starts, diagnostics)

    # Best converged fit, lowest index among ties
    candidates = [fit for fit in fits if fit.converged and numpy.isfinite(fit.loglik)]
    if len(candidates) == 0:
        logger.warning("No EM start converged, selecting among the %d unconverged fits" % len(fits))
        candidates = fits
    best = candidates[0]
    for fit in candidates[1:]:
        if fit.loglik > best.loglik:
            best = fit
    logger.info("Best of %d starts is start %d with log-likelihood %.6f" % (n_starts, best.start_index, best.loglik))

    # Starts that cannot be told apart from the best one
    ties = [fit for fit in candidates if fit is best or best.loglik - fit.loglik < FLAT_LOGLIK]
    means = [fit.m for fit in ties]
    if max(means) - min(means) > FLAT_SPREAD:
        logger.warning("Flat log-likelihood: %d starts within %.0e of the best one have offspring means from %.4f to %.4f (growth rates from %.4f to %.4f)" % (len(ties), FLAT_LOGLIK, min(means), max(means), min([fit.tau for fit in ties]), max([fit.tau for fit in ties])))
    return best, fits

#####################################################################################################################################################

def evolve_em ( sample:      Union[ProgenitorSample, SizesSample],
                cfg:         EmConfig,
                n_starts:    int = 10,
                master_seed: Union[None, int] = None,
                threads:     Union[None, int] = None
              ) ->           List[Dict[str, Any]]:

    """
        Fits the EM algorithm on every prefix of the sample, to follow the estimates over the generations.
        Samples with progenitors use a single run from the uniform law, samples with sizes only use a multi-start.
        Prefixes for which the fit fails are skipped.
        In:
            * sample:      Sample to fit.
            * cfg:         EM configuration.
            * n_starts:    Number of starts for samples with sizes only.
            * master_seed: Seed of the starts.
            * threads:     Number of workers for the starts.
        Out:
            * rows: Dictionaries (n, parameter, estimate, ci_low, ci_high), one per prefix and parameter, without intervals.
    """

    # Fit each prefix
    rows = []
    for n in range(1, sample.n_generations + 1):
        prefix = sample.prefix(n)
        try:
            if isinstance(prefix, ProgenitorSample):
                fit = em_fit_progenitors(prefix, None, None, cfg)
            else:
                fit, _ = multi_start(prefix, n_starts, master_seed, cfg, threads)
        except PyCBPError as error:
            logger.warning("Skipping prefix n=%d: %s" % (n, str(error)))
            continue
        rows += [{"n": n, "parameter": name, "estimate": value, "ci_low": None, "ci_high": None} for name, value in fit.as_dict().items()]
    return rows

#####################################################################################################################################################

def _run_em ( step:       Callable[[OffspringDistribution, ControlFamily], Tuple[numpy.ndarray, float, Union[None, float]]],
              evaluate:   Callable[[OffspringDistribution, ControlFamily], float],
              parents:    int,
              init_p:     Union[None, OffspringDistribution],
              init_theta: Union[None, float],
              cfg:        EmConfig,
              scheme:     str
            ) ->          EmFit:

    """
        Alternates E-steps and M-steps until p and theta stop moving.
        In:
            * step:       E-step, returning the expected counts, expected number of progenitors and log-likelihood at the current parameters (or None).
            * evaluate:   Exact log-likelihood.
            * parents:    Total number of individuals Y_{n-1}.
            * init_p:     Initial offspring law (uniform if None).
            * init_theta: Initial control parameter (0.5 if None).
            * cfg:        EM configuration.
            * scheme:     Name of the scheme, for messages.
        Out:
            * fit: Convergence point.
    """

    # Initial values
    p = OffspringDistribution.uniform(cfg.s_max) if init_p is None else init_p
    if p.s_max != cfg.s_max:
        raise SchemaError("Initial offspring law has s_max=%d, configuration has s_max=%d" % (p.s_max, cfg.s_max))
    family = ControlFamily.create(cfg.kind, 0.5 if init_theta is None else init_theta)
    trace = [] if cfg.trace else None

    # Iterate
    converged = False
    iteration = 0
    while iteration < cfg.max_iters:
        expected, delta, current = step(p, family)
        if trace is not None:
            trace.append((iteration, p.probs.copy(), family.theta, current))
        p_next, theta_next = m_step(expected, delta, parents, cfg.kind, cfg.boundary_eps)
        difference = max(numpy.abs(p_next.probs - p.probs).max(), abs(theta_next - family.theta))
        p, family = p_next, family.with_theta(theta_next)
        iteration += 1
        if iteration % LOG_EVERY == 0:
            logger.debug("EM (%s) iteration %d, difference %.3e", scheme, iteration, difference)
        if difference < cfg.tol:
            converged = True
            break

    # Exact log-likelihood at the final point
    value = evaluate(p, family)
    if trace is not None:
        trace.append((iteration, p.probs.copy(), family.theta, value))
    if converged:
        logger.info("EM (%s) converged after %d iterations" % (scheme, iteration))
    else:
        logger.warning("EM (%s) did not converge within %d iterations" % (scheme, cfg.max_iters))
    fit = EmFit(p, family.theta, cfg.kind, iteration, converged, value, trace)
    return fit

#####################################################################################################################################################

def _e_step_sizes ( sample: SizesSample,
                    p:      OffspringDistribution,
                    family: ControlFamily,
                    method: str,
                    tail:   float
                  ) ->      Tuple[numpy.ndarray, float, float]:

    """
        E-step for sizes only, also returning the exact log-likelihood at the current parameters.
        For each generation, the posterior law of the number of progenitors is proportional to P[phi(z_l) = phi*] * P^{*phi*}_{z_{l+1}}.
        In:
            * sample: Sample with sizes only.
            * p:      Current offspring law.
            * family: Current control law.
            * method: Way of computing the expectations.
            * tail:   Neglected mass when truncating unbounded control laws.
        Out:
            * expected: Matrix with one row per generation and one column per number of children.
            * delta:    Expected total number of progenitors.
            * loglik:   Log-likelihood of the sample at (p, theta).
    """

    # Convolutions up to the largest number of progenitors needed
    expected = numpy.zeros((sample.n_generations, p.s_max + 1))
    bounds = [phi_upper_bound(family, int(sample.z[l]), int(sample.z[l + 1]), p.s_max, tail) for l in range(sample.n_generations)]
    log_powers = log_convolution_powers(p, max(bounds)) if method == "convolution" else None

    # Generations are independent
    delta = 0.0
    loglik = 0.0
    for l in range(sample.n_generations):
        z_l, z_next = int(sample.z[l]), int(sample.z[l + 1])
        if isinstance(family, BinomialControl) and z_next > p.s_max * z_l:
            raise InconsistentSampleError("Generation %d: %d individuals cannot have %d children with s_max=%d under a binomial control" % (l, z_l, z_next, p.s_max))
        if z_l == 0:
            continue
        if method == "convolution":
            row, progenitors, normalizer = _ranged_expectation(log_powers, p, family, z_l, z_next, bounds[l], l)
        else:
            row, progenitors, normalizer = _ranged_enumeration(p, family, z_l, z_next, bounds[l], l)
        expected[l] = row
        delta += progenitors
        loglik += normalizer
    return expected, delta, loglik

#####################################################################################################################################################

def _fixed_expectation ( log_powers: numpy.ndarray,
                         p:          OffspringDistribution,
                         phi_star:   int,
                         z_next:     int,
                         generation: int
                       ) ->          numpy.ndarray:

    """
        Expected counts E[Z(k) | phi*, z'] = phi* * p_k * P^{*(phi*-1)}_{z'-k} / P^{*phi*}_{z'}.
        In:
            * log_powers: Log convolution powers, at least up to phi_star.
            * p:          Offspring law.
            * phi_star:   Number of progenitors (at least 1).
            * z_next:     Number of children.
            * generation: Index of the generation, for messages.
        Out:
            * row: Expected counts, one per number of children.
    """

    # Normalizer
    denominator = log_powers[phi_star, z_next]
    if not numpy.isfinite(denominator):
        raise DegenerateParameterError("Generation %d: the offspring law gives zero probability to %d progenitors having %d children" % (generation, phi_star, z_next))

    # One term per number of children
    k = numpy.arange(p.s_max + 1)
    valid = k <= z_next
    numerators = numpy.full(p.s_max + 1, -numpy.inf)
    numerators[valid] = log_powers[phi_star - 1, z_next - k[valid]]
    with numpy.errstate(divide="ignore"):
        row = phi_star * numpy.exp(numpy.log(p.probs) + numerators - denominator)
    return row

#####################################################################################################################################################

def _ranged_expectation ( log_powers: numpy.ndarray,
                          p:          OffspringDistribution,
                          family:     ControlFamily,
                          z_l:        int,
                          z_next:     int,
                          phi_max:    int,
                          generation: int
                        ) ->          Tuple[numpy.ndarray, float, float]:

    """
        Expected counts for one generation when the number of progenitors is hidden, using convolutions.
        In:
            * log_powers: Log convolution powers, at least up to phi_max.
            * p:          Offspring law.
            * family:     Control law.
            * z_l:        Size of the generation.
            * z_next:     Size of the next generation.
            * phi_max:    Largest number of progenitors considered.
            * generation: Index of the generation, for messages.
        Out:
            * row:         Expected counts, one per number of children.
            * progenitors: Expected number of progenitors.
            * normalizer:  Log-probability of the transition.
    """

    # Posterior law of the number of progenitors
    phis = numpy.arange(phi_max + 1)
    log_weights = family.log_pmf(z_l, phis) + log_powers[phis, z_next]
    normalizer = log_add_rows(log_weights[:, None])[0]
    if not numpy.isfinite(normalizer):
        raise DegenerateParameterError("Generation %d: the parameters give zero probability to the transition %d -> %d" % (generation, z_l, z_next))
    weights = numpy.exp(log_weights - normalizer)

    # Fixed expectations for all possible numbers of progenitors at once
    used = phis[(weights > 0.0) & (phis > 0)]
    k = numpy.arange(p.s_max + 1)
    valid = k <= z_next
    numerators = numpy.full((used.size, p.s_max + 1), -numpy.inf)
    numerators[:, valid] = log_powers[used[:, None] - 1, z_next - k[valid][None, :]]
    with numpy.errstate(divide="ignore"):
        ratios = numpy.exp(numpy.log(p.probs)[None, :] + numerators - log_powers[used, z_next][:, None])
    row = (weights[used] * used) @ ratios
    progenitors = float(weights @ phis)
    return row, progenitors, float(normalizer)

#####################################################################################################################################################

def _ranged_enumeration ( p:          OffspringDistribution,
                          family:     ControlFamily,
                          z_l:        int,
                          z_next:     int,
                          phi_max:    int,
                          generation: int
                        ) ->          Tuple[numpy.ndarray, float, float]:

    """
        Expected counts for one generation when the number of progenitors is hidden, summing over the transition trees.
        Each pair (phi*, configuration) has weight P[phi(z_l) = phi*] * phi*! / prod_k z(k)! * prod_k p_k^z(k).
        In:
            * p:          Offspring law.
            * family:     Control law.
            * z_l:        Size of the generation.
            * z_next:     Size of the next generation.
            * phi_max:    Largest number of progenitors considered.
            * generation: Index of the generation, for messages.
        Out:
            * row:         Expected counts, one per number of children.
            * progenitors: Expected number of progenitors.
            * normalizer:  Log-probability of the transition.
    """

    # Gather all pairs
    matrices = []
    log_weights = []
    for phi_star in range(phi_max + 1):
        tree = transition_tree(phi_star, z_next, p.s_max)
        if len(tree) > 0:
            matrices.append(tree.matrix)
            log_weights.append(float(family.log_pmf(z_l, phi_star)) + tree.log_multinomial + special.xlogy(tree.matrix, p.probs).sum(axis=1))
    if len(matrices) == 0:
        raise InconsistentSampleError("Generation %d: no configuration leads from %d to %d individuals with s_max=%d" % (generation, z_l, z_next, p.s_max))
    matrix = numpy.concatenate(matrices)
    log_weights = numpy.concatenate(log_weights)

    # Normalize
    normalizer = log_add_rows(log_weights[:, None])[0]
    weights = _normalized(log_weights, generation)
    row = weights @ matrix
    progenitors = float(weights @ matrix.sum(axis=1))
    return row, progenitors, float(normalizer)

#####################################################################################################################################################

def _normalized ( log_weights: numpy.ndarray,
                  generation:  int
                ) ->           numpy.ndarray:

    # Max-shift before exponentiation
    if len(log_weights) == 0:
        raise InconsistentSampleError("Generation %d has no feasible configuration" % generation)
    shift = log_weights.max()
    if not numpy.isfinite(shift):
        raise DegenerateParameterError("Generation %d: the offspring law gives zero probability to every feasible configuration" % generation)
    weights = numpy.exp(log_weights - shift)
    return weights / weights.sum()

#####################################################################################################################################################

def _multi_start_task ( task: Tuple[int, numpy.random.SeedSequence, Union[ProgenitorSample, SizesSample], EmConfig]
                      ) ->    Union[EmFit, Tuple[int, str]]:

    """
        Runs one start of a multi-start EM.
        In:
            * task: Tuple (index, seed, sample, cfg).
        Out:
            * result: Convergence point, or pair (index, error message) if the start failed.
    """

    # Random initial values
    index, seed, sample, cfg = task
    rng = make_rng(seed)
    init_p = OffspringDistribution(rng.dirichlet(numpy.ones(cfg.s_max + 1)))
    init_theta = FAMILIES[cfg.kind].random_theta(rng)

    # Failures are reported, not raised
    try:
        fit = em_fit(sample, init_p, init_theta, cfg)
    except PyCBPError as error:
        return index, str(error)
    fit.start_index = index
    return fit

#####################################################################################################################################################
#####################################################################################################################################################
