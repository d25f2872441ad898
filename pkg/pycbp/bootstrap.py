#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the parametric bootstrap of the EM estimators.
    Replicates are simulated from a fitted model, then re-fitted with the EM algorithm of the same observation scheme.
    Extinct replicates (Z_n = 0) carry no information on the asymptotic behavior, they are excluded and counted.
    The summary gives the sampling distribution of each estimator and its mean squared error against reference values.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import logging
import numpy
from typing import *
from typing_extensions import *

# Internal imports
from pycbp.errors import *
from pycbp.model import *
from pycbp.parallel import *
from pycbp.em import EmConfig, EmFit, SCHEMES, em_fit_progenitors, multi_start

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Policy applied to extinct replicates, written in the metadata of the outputs.
"""

EXTINCT_POLICY = "excluded"

#####################################################################################################################################################

# Module logger
logger = logging.getLogger(__name__)

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class BootstrapSummary ():

    """
        Re-fitted estimates of all successful replicates, and their mean squared errors.
        Parameters are p0..p<s_max>, m, sigma2, mu and tau.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:          Self,
                   replicate_ids: List[int],
                   replicates:    Dict[str, numpy.ndarray],
                   truth:         Dict[str, float],
                   n_failed:      int,
                   extinct:       int,
                   metadata:      Dict[str, Any]
                 ) ->             Self:

        """
            This function is the constructor of the class.
            In:
                * self:          Reference to the current object.
                * replicate_ids: Indices of the successful replicates.
                * replicates:    Estimates of each parameter, one entry per successful replicate.
                * truth:         Reference values of the parameters.
                * n_failed:      Number of replicates excluded (extinct or failed fit).
                * extinct:       Number of extinct replicates among the excluded ones.
                * metadata:      Settings of the run.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(BootstrapSummary, self).__init__()

        # Store
        self.replicate_ids = list(replicate_ids)
        self.replicates = {name: numpy.asarray(values, dtype=float) for name, values in replicates.items()}
        self.truth = dict(truth)
        self.n_success = len(self.replicate_ids)
        self.n_failed = n_failed
        self.extinct = extinct
        self.metadata = dict(metadata)

        # Mean squared deviation from the reference values
        self.mse = {name: float(numpy.mean((self.replicates[name] - self.truth[name]) ** 2)) for name in self.replicates}

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def means ( self: Self
              ) ->    Dict[str, float]:

        # Bootstrap means
        return {name: float(numpy.mean(values)) for name, values in self.replicates.items()}

    #############################################################################################################################################

    def to_long_rows ( self: Self
                     ) ->    List[Dict[str, Any]]:

        """
            Formats the replicates as a long table.
            In:
                * self: Reference to the current object.
            Out:
                * rows: Dictionaries (replicate_id, parameter, value).
        """

        # One row per replicate and parameter
        rows = []
        for position, replicate_id in enumerate(self.replicate_ids):
            for name in self.replicates:
                rows.append({"replicate_id": replicate_id, "parameter": name, "value": float(self.replicates[name][position])})
        return rows

    #############################################################################################################################################

    def to_summary_rows ( self:       Self,
                          efficiency: Union[None, Dict[str, float]] = None
                        ) ->          List[Dict[str, Any]]:

        # One row per parameter
        rows = []
        for name in self.replicates:
            row = {"parameter": name, "truth": self.truth[name], "mean": float(numpy.mean(self.replicates[name])), "mse": self.mse[name]}
            if efficiency is not None:
                row["eff"] = efficiency[name]
            rows.append(row)
        return rows

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def bootstrap ( fit:           Union[EmFit, Tuple[OffspringDistribution, float]],
                kind:          str,
                scheme:        str,
                n_reps:        int,
                n_generations: int,
                z0:            int,
                truth:         Union[None, Dict[str, float]],
                master_seed:   Union[None, int],
                cfg:           EmConfig,
                n_starts:      int = 10,
                threads:       Union[None, int] = None,
                progress:      bool = False
              ) ->             BootstrapSummary:

    """
        Parametric bootstrap of an EM estimator.
        Replicate i is simulated with a seed derived from (master_seed, i), so results do not depend on the number of workers.
        Samples with progenitors are re-fitted from the uniform law, samples with sizes only with a small multi-start.
        In:
            * fit:           Model to simulate from, as an EM fit or a pair (offspring law, theta).
            * kind:          Name of the control family.
            * scheme:        Observation scheme, "progenitors" or "sizes".
            * n_reps:        Number of replicates.
            * n_generations: Number of generations of each replicate.
            * z0:            Initial population size.
            * truth:         Reference values for the mean squared errors (parameters of the model if None).
            * master_seed:   Seed from which the replicates are derived.
            * cfg:           EM configuration, whose family and s_max are replaced by the ones of the model.
            * n_starts:      Number of starts of the multi-start re-fits (sizes only).
            * threads:       Number of workers.
            * progress:      Indicates if a progress bar is displayed.
        Out:
            * summary: Bootstrap summary.
    """

    # Check arguments
    if n_reps < 1:
        raise BootstrapError("The bootstrap needs at least one replicate, got %d" % n_reps)
    if scheme not in SCHEMES:
        raise SchemaError("Unknown scheme '%s', expected one of %s" % (scheme, ", ".join(SCHEMES)))

    # Generating model
    p, theta = (fit.p, fit.theta) if isinstance(fit, EmFit) else fit
    family = ControlFamily.create(kind, theta)
    cfg = cfg.replace(kind=family.kind, s_max=p.s_max)
    if truth is None:
        truth = model_parameters(p, family)

    # Replicates are independent
    seeds = spawn_seeds(master_seed, n_reps)
    tasks = [(index, seeds[index], p, family, scheme, n_generations, z0, cfg, n_starts) for index in range(n_reps)]
    results = parallel_map(_replicate_task, tasks, threads, "Bootstrap (%s)" % scheme, progress)

    # Reduce in replicate order
    replicate_ids = []
    replicates = {}
    extinct = 0
    failed = 0
    for index, status, estimates in results:
        if status == "extinct":
            extinct += 1
        elif status != "ok":
            failed += 1
            logger.warning("Bootstrap replicate %d failed: %s" % (index, status))
        else:
            replicate_ids.append(index)
            for name in estimates:
                replicates.setdefault(name, []).append(estimates[name])
    if len(replicate_ids) == 0:
        raise BootstrapError("All %d bootstrap replicates were extinct or failed (%d extinct)" % (n_reps, extinct))
    logger.info("Bootstrap (%s): %d replicates kept, %d extinct, %d failed" % (scheme, len(replicate_ids), extinct, failed))

    # Summary
    metadata = {"scheme": scheme, "kind": family.kind, "theta": family.theta, "n_reps": n_reps, "n_generations": n_generations, "z0": z0, "master_seed": master_seed, "extinct_policy": EXTINCT_POLICY, "n_extinct": extinct, "n_failed": extinct + failed}
    if scheme == "sizes":
        metadata["n_starts"] = n_starts
    summary = BootstrapSummary(replicate_ids, replicates, {name: truth[name] for name in replicates}, extinct + failed, extinct, metadata)
    return summary

#####################################################################################################################################################

def efficiency ( a: BootstrapSummary,
                 b: BootstrapSummary
               ) ->  Dict[str, float]:

    """
        Relative efficiency of the estimator of a with respect to the one of b: eff = mse(b) / mse(a).
        Values above 1 mean that a is better.
        In:
            * a: Summary of the first estimator.
            * b: Summary of the second estimator.
        Out:
            * eff: Efficiency per parameter, 1 when both mean squared errors are 0, infinite when only mse(a) is 0.
    """

    # Check arguments
    if set(a.mse) != set(b.mse):
        raise SchemaError("Efficiency needs the same parameters in both summaries, got %s and %s" % (sorted(a.mse), sorted(b.mse)))

    # Ratios
    eff = {}
    for name in a.mse:
        if a.mse[name] == 0.0 and b.mse[name] == 0.0:
            eff[name] = 1.0
        elif a.mse[name] == 0.0:
            logger.warning("Zero mean squared error for parameter %s, efficiency set to infinity" % name)
            eff[name] = numpy.inf
        else:
            eff[name] = b.mse[name] / a.mse[name]
    return eff

#####################################################################################################################################################

def paired_bootstrap ( progenitors_fit: Union[EmFit, Tuple[OffspringDistribution, float]],
                       sizes_fit:       Union[EmFit, Tuple[OffspringDistribution, float]],
                       kind:            str,
                       n_reps:          int,
                       n_generations:   int,
                       z0:              int,
                       truth:           Union[None, Dict[str, float]],
                       master_seed:     Union[None, int],
                       cfg:             EmConfig,
                       n_starts:        int = 10,
                       threads:         Union[None, int] = None,
                       progress:        bool = False
                     ) ->               Tuple[BootstrapSummary, BootstrapSummary, Dict[str, float]]:

    """
        Bootstraps both incomplete schemes from their own fits, and compares them.
        In:
            * progenitors_fit: Model fitted on sizes and progenitors.
            * sizes_fit:       Model fitted on sizes only.
            * kind:            Name of the control family.
            * n_reps:          Number of replicates per scheme.
            * n_generations:   Number of generations of each replicate.
            * z0:              Initial population size.
            * truth:           Reference values (each fit's own parameters if None).
            * master_seed:     Seed from which the replicates are derived.
            * cfg:             EM configuration.
            * n_starts:        Number of starts of the multi-start re-fits (sizes only).
            * threads:         Number of workers.
            * progress:        Indicates if a progress bar is displayed.
        Out:
            * progenitors: Summary for sizes and progenitors.
            * sizes:       Summary for sizes only.
            * eff:         Efficiency mse(sizes) / mse(progenitors).
    """

    # Same seeds for both schemes
    progenitors = bootstrap(progenitors_fit, kind, "progenitors", n_reps, n_generations, z0, truth, master_seed, cfg, n_starts, threads, progress)
    sizes = bootstrap(sizes_fit, kind, "sizes", n_reps, n_generations, z0, truth, master_seed, cfg, n_starts, threads, progress)
    eff = efficiency(progenitors, sizes)
    return progenitors, sizes, eff

#####################################################################################################################################################

def model_parameters ( p:      OffspringDistribution,
                       family: ControlFamily
                     ) ->      Dict[str, float]:

    # Parameters compared by the bootstrap
    parameters = {"p%d" % k: float(value) for k, value in enumerate(p.probs)}
    parameters.update({"m": p.mean(), "sigma2": p.variance(), "mu": family.mu(), "tau": p.mean() * family.mu()})
    return parameters

#####################################################################################################################################################

def _replicate_task ( task: Tuple[Any, ...]
                    ) ->    Tuple[int, str, Union[None, Dict[str, float]]]:

    """
        Simulates and re-fits one replicate.
        In:
            * task: Tuple (index, seed, p, family, scheme, n_generations, z0, cfg, n_starts).
        Out:
            * index:     Index of the replicate.
            * status:    "ok", "extinct", or the error message.
            * estimates: Re-fitted parameters, None if not "ok".
    """

    # Simulate
    index, seed, p, family, scheme, n_generations, z0, cfg, n_starts = task
    tree = simulate(p, family, z0, n_generations, make_rng(seed))
    if tree.sizes()[-1] == 0:
        return index, "extinct", None

    # Re-fit with the matching scheme
    try:
        if scheme == "progenitors":
            fit = em_fit_progenitors(project_progenitors(tree), None, None, cfg)
        else:
            fit, _ = multi_start(project_sizes(tree), n_starts, seed, cfg, threads=1)
    except PyCBPError as error:
        return index, str(error), None
    estimates = model_parameters(fit.p, fit.family)
    return index, "ok", estimates

#####################################################################################################################################################
#####################################################################################################################################################
