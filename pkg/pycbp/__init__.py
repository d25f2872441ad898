#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    PyCBP: simulation and maximum likelihood inference for controlled branching processes with power series control laws.
    The library provides:
        * Simulation of entire family trees, and their projection on the incomplete observation schemes.
        * Closed-form estimators and confidence intervals from entire family trees.
        * EM algorithms for samples with sizes and progenitors, or sizes only, with multi-start selection.
        * Exact log-likelihoods, Akaike criterion, and scans over control families.
        * Parametric bootstrap of the EM estimators.
        * Counting and enumeration of transition trees.
    Everything can be imported with "from pycbp import *", and the command-line interface is available as "pycbp" or "python -m pycbp".
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# Internal imports
from pycbp.errors import *
from pycbp.logs import setup_logging
from pycbp.parallel import parallel_map, spawn_seeds, default_threads
from pycbp.model import *
from pycbp.trees import *
from pycbp.likelihood import *
from pycbp.em import *
from pycbp.mle_complete import CompleteMle, estimate, confidence_intervals, evolve, normal_quantile
from pycbp.bootstrap import BootstrapSummary, bootstrap, efficiency, paired_bootstrap, model_parameters

#####################################################################################################################################################
#####################################################################################################################################################
