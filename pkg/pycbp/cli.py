#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file contains the command-line interface of PyCBP.
    Each command reads a sample (the shipped simulated table by default), runs one of the estimation pipelines, and writes CSV tables.
    Command parameters can be given as flags or in a YAML/JSON file (--config), flags taking priority.
    The effective configuration is written as "# key=value" lines at the top of every CSV output.
    The arguments and their descriptions can be accessed using the "pycbp <command> -h" command.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import argparse
import ast
import logging
import sys
import colored
import numpy
import pandas
import yaml
from typing import *
from typing_extensions import *

# Internal imports
from pycbp.errors import *
from pycbp.logs import setup_logging
from pycbp.model import *
from pycbp.trees import complexity_table, growth_exponents
from pycbp.likelihood import aic, scan, transition_logliks_progenitors, transition_logliks_sizes
from pycbp.em import METHODS, SCHEMES, EmConfig, em_fit, evolve_em, multi_start
from pycbp.bootstrap import bootstrap, efficiency, model_parameters
import pycbp.mle_complete as mle_complete

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

def _list_of ( convert: Callable[[Any], Any]
             ) ->       Callable[[Any], List[Any]]:

    """
        Creates a parser of lists, accepting Python literals ("[0.1, 0.9]") or comma-separated values ("0.1,0.9").
        In:
            * convert: Conversion applied to each element.
        Out:
            * parse: Parser of lists.
    """

    # Text is split first
    def parse ( value: Any
              ) ->     List[Any]:
        if isinstance(value, str):
            text = value.strip()
            value = ast.literal_eval(text) if text.startswith("[") else [item for item in text.split(",") if item.strip() != ""]
        if not isinstance(value, (list, tuple)):
            value = [value]
        return [convert(item.strip() if isinstance(item, str) else item) for item in value]
    return parse

#####################################################################################################################################################

def _boolean ( value: Any
             ) ->     bool:

    # Text as found in files or flags
    if isinstance(value, str):
        if value.lower() not in ["true", "false", "yes", "no", "1", "0"]:
            raise ValueError(value)
        return value.lower() in ["true", "yes", "1"]
    return bool(value)

#####################################################################################################################################################

"""
    Schema of all command parameters: type, default value, accepted values, and help.
    A default of None means that the parameter is optional.
"""

PARAMETERS = {"input":             {"type": str,                 "default": None,                 "help": "Sample CSV file (the shipped simulated sample if omitted)"},
              "output":            {"type": str,                 "default": None,                 "help": "Main output CSV file (standard output if omitted)"},
              "threads":           {"type": int,                 "default": None,                 "help": "Number of workers (environment variable PYCBP_THREADS if omitted)"},
              "seed":              {"type": int,                 "default": None,                 "help": "Master random seed"},
              "family":            {"type": control_kind,        "default": "binomial",           "help": "Control family (binomial, poisson, negative_binomial)"},
              "families":          {"type": _list_of(control_kind), "default": list(FAMILIES),    "help": "Control families to compare"},
              "theta":             {"type": float,               "default": None,                 "help": "Control parameter"},
              "offspring":         {"type": _list_of(float),     "default": None,                 "help": "Offspring probabilities p_0..p_s_max (normalized)"},
              "z0":                {"type": int,                 "default": None,                 "help": "Initial population size"},
              "n_generations":     {"type": int,                 "default": None,                 "help": "Number of generations"},
              "z":                 {"type": _list_of(int),       "default": None,                 "help": "Inline generation sizes Z_0..Z_n (instead of an input file)"},
              "phi":               {"type": _list_of(int),       "default": None,                 "help": "Inline numbers of progenitors phi_0..phi_{n-1}"},
              "scheme":            {"type": str,                 "default": "progenitors",        "help": "Observation scheme", "choices": SCHEMES},
              "s_max":             {"type": int,                 "default": 3,                    "help": "Maximum number of children per progenitor"},
              "s_max_grid":        {"type": _list_of(int),       "default": [3, 4, 5, 6],         "help": "Maximum numbers of children to compare"},
              "tol":               {"type": float,               "default": 1e-6,                 "help": "EM stops when p and theta move less than this value"},
              "max_iters":         {"type": int,                 "default": 50000,                "help": "Maximum number of EM iterations"},
              "method":            {"type": str,                 "default": "convolution",        "help": "E-step computation", "choices": METHODS},
              "boundary_eps":      {"type": float,               "default": 1e-9,                 "help": "Shift applied to a migration target on the boundary of the family's range"},
              "tail":              {"type": float,               "default": DEFAULT_TAIL,         "help": "Neglected mass when truncating unbounded control laws"},
              "init_p":            {"type": _list_of(float),     "default": None,                 "help": "Initial offspring law of the EM (uniform if omitted)"},
              "init_theta":        {"type": float,               "default": 0.5,                  "help": "Initial control parameter of the EM"},
              "multi_start":       {"type": int,                 "default": 0,                    "help": "Number of random starts of the EM (0 for a single run from the initial values)"},
              "n_starts":          {"type": int,                 "default": 10,                   "help": "Number of random starts for samples with sizes only"},
              "level":             {"type": float,               "default": 0.95,                 "help": "Confidence level"},
              "evolve":            {"type": _boolean,            "default": False,                "help": "Estimate on every prefix of the sample"},
              "criterion":         {"type": str,                 "default": "corrected",          "help": "Akaike criterion with or without small-sample correction", "choices": ["corrected", "plain"]},
              "n_reps":            {"type": int,                 "default": 100,                  "help": "Number of bootstrap replicates"},
              "truth":             {"type": str,                 "default": "fit",                "help": "Reference values of the bootstrap errors: the fitted model, or the model of the shipped sample", "choices": ["fit", "reference"]},
              "bootstrap_scheme":  {"type": str,                 "default": "both",               "help": "Scheme(s) to bootstrap", "choices": SCHEMES + ["both"]},
              "z_max":             {"type": int,                 "default": 50,                   "help": "Largest generation size"},
              "slopes_from":       {"type": int,                 "default": None,                 "help": "If set, also fits the growth orders over generation sizes slopes_from..z_max"},
              "digits":            {"type": int,                 "default": None,                 "help": "Round floats to this number of decimals (full precision if omitted)"},
              "trace":             {"type": str,                 "default": None,                 "help": "CSV file receiving the EM iterations"},
              "starts_output":     {"type": str,                 "default": None,                 "help": "CSV file receiving the convergence points of all starts"},
              "replicates_output": {"type": str,                 "default": None,                 "help": "CSV file receiving all bootstrap replicates"}}

#####################################################################################################################################################

"""
    Parameters accepted by each command.
"""

COMMON = ["output", "threads", "digits"]
OUTPUTS = ["output", "trace", "starts_output", "replicates_output"]
EM_SETTINGS = ["family", "s_max", "tol", "max_iters", "method", "boundary_eps", "tail"]
COMMANDS = {"simulate":  COMMON + ["offspring", "family", "theta", "z0", "n_generations", "seed"],
            "mle":       COMMON + ["input", "family", "level", "evolve"],
            "em":        COMMON + ["input", "scheme", "init_p", "init_theta", "multi_start", "seed", "evolve", "trace", "starts_output"] + EM_SETTINGS,
            "loglik":    COMMON + ["input", "z", "phi", "scheme", "family", "theta", "offspring", "tail"],
            "scan":      COMMON + ["input", "scheme", "families", "s_max_grid", "n_starts", "seed", "criterion", "tol", "max_iters", "method", "boundary_eps", "tail"],
            "bootstrap": COMMON + ["input", "bootstrap_scheme", "n_reps", "n_generations", "z0", "n_starts", "seed", "truth", "replicates_output"] + EM_SETTINGS,
            "trees":     COMMON + ["z_max", "s_max_grid", "slopes_from"]}

#####################################################################################################################################################

"""
    Defaults that differ from the schema for some commands.
"""

COMMAND_DEFAULTS = {"simulate": {"offspring": REFERENCE_OFFSPRING, "family": REFERENCE_KIND, "theta": REFERENCE_THETA, "z0": 1, "n_generations": 30},
                    "trees": {"s_max_grid": [3, 4, 5]}}

#####################################################################################################################################################

"""
    Help of each command.
"""

DESCRIPTIONS = {"simulate":  "Simulate an entire family tree",
                "mle":       "Maximum likelihood estimation and confidence intervals from an entire family tree",
                "em":        "EM estimation from sizes and progenitors, or from sizes only",
                "loglik":    "Exact log-likelihood of given parameters",
                "scan":      "Compare control families and maximum numbers of children with the Akaike criterion",
                "bootstrap": "Parametric bootstrap of the EM estimators",
                "trees":     "Sizes of the largest transition trees"}

#####################################################################################################################################################

# Module logger
logger = logging.getLogger(__name__)

#####################################################################################################################################################

# Options shared by all commands
common_parser = argparse.ArgumentParser(add_help=False)
common_parser.add_argument("--config",      type=str,                                                        default=None,      help="YAML or JSON file of command parameters (flags take priority)")
common_parser.add_argument("--log_level",   type=str, choices=["DEBUG", "INFO", "WARNING", "ERROR"],        default="WARNING", help="Minimum level of displayed messages")
common_parser.add_argument("--no_colors",   action="store_true",                                             default=False,     help="Disables colors in messages")
common_parser.add_argument("--no_progress", action="store_true",                                             default=False,     help="Disables progress bars")

# Initialize parser, with one subparser per command
parser = argparse.ArgumentParser(prog="pycbp", description="Inference for controlled branching processes with power series control laws")
subparsers = parser.add_subparsers(dest="command", required=True)
for command in COMMANDS:
    subparser = subparsers.add_parser(command, parents=[common_parser], help=DESCRIPTIONS[command], description=DESCRIPTIONS[command])
    for name in COMMANDS[command]:
        default = COMMAND_DEFAULTS.get(command, {}).get(name, PARAMETERS[name]["default"])
        flag = "--scheme" if name == "bootstrap_scheme" else "--%s" % name
        if PARAMETERS[name]["type"] is _boolean:
            subparser.add_argument(flag, dest=name, action="store_const", const=True, default=argparse.SUPPRESS, help=PARAMETERS[name]["help"])
        else:
            subparser.add_argument(flag, dest=name, type=str, choices=PARAMETERS[name].get("choices"), default=argparse.SUPPRESS, help="%s (default: %s)" % (PARAMETERS[name]["help"], str(default)))

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class RunConfig ():

    """
        Validated parameters of a command.
        Values come from the schema defaults, then a configuration file, then the command line.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:    Self,
                   command: str,
                   values:  Dict[str, Any]
                 ) ->       Self:

        """
            This function is the constructor of the class.
            In:
                * self:    Reference to the current object.
                * command: Name of the command.
                * values:  Parameters set explicitly, others take their default value.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(RunConfig, self).__init__()

        # Check the command and keys
        if command not in COMMANDS:
            raise SchemaError("Unknown command '%s', expected one of %s" % (command, ", ".join(COMMANDS)))
        unknown = sorted(set(values) - set(COMMANDS[command]))
        if len(unknown) > 0:
            raise SchemaError("Unknown parameter(s) for command %s: %s" % (command, ", ".join(unknown)))

        # Defaults, then given values
        self.command = command
        self.values = {name: COMMAND_DEFAULTS.get(command, {}).get(name, PARAMETERS[name]["default"]) for name in COMMANDS[command]}
        for name, value in values.items():
            self.values[name] = _convert(name, value)

    #############################################################################################################################################
    #                                                               STATIC METHODS                                                              #
    #############################################################################################################################################

    @staticmethod
    def from_sources ( command:     str,
                       flags:       Dict[str, Any],
                       config_path: Union[None, str] = None
                     ) ->           Self:

        """
            Merges the configuration file and the command-line flags.
            The file is a mapping of parameters, possibly with one section per command name.
            In:
                * command:     Name of the command.
                * flags:       Parameters given on the command line.
                * config_path: Path to a YAML or JSON file, if any.
            Out:
                * config: Validated configuration.
        """

        # File values first
        values = {}
        if config_path is not None:
            with open(config_path, "r") as file:
                try:
                    document = yaml.safe_load(file)
                except yaml.YAMLError as error:
                    raise SchemaError("Cannot parse configuration file %s: %s" % (config_path, str(error)))
            document = {} if document is None else document
            if not isinstance(document, dict):
                raise SchemaError("Configuration file %s must contain a mapping" % config_path)
            values.update({key: value for key, value in document.items() if key not in COMMANDS})
            section = document.get(command, {})
            if not isinstance(section, dict):
                raise SchemaError("Section '%s' of the configuration file must be a mapping" % command)
            values.update(section)

        # Flags override the file
        values.update(flags)
        config = RunConfig(command, values)
        return config

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def __getitem__ ( self: Self,
                      name: str
                    ) ->    Any:

        # Effective value
        return self.values[name]

    #############################################################################################################################################

    def metadata ( self: Self
                 ) ->    Dict[str, str]:

        # Effective configuration, as written in output headers, without destination files
        metadata = {"command": self.command}
        for name, value in self.values.items():
            if name in OUTPUTS:
                continue
            metadata[name] = ",".join([str(item) for item in value]) if isinstance(value, list) else str(value)
        return metadata

    #############################################################################################################################################

    def em_config ( self:    Self,
                    **kwargs: Any
                  ) ->       EmConfig:

        """
            Creates the EM configuration from the parameters of the command.
            In:
                * self:   Reference to the current object.
                * kwargs: Settings to force.
            Out:
                * cfg: EM configuration.
        """

        # Keep the settings known by the command
        settings = {name: self.values[name] for name in ["tol", "max_iters", "method", "boundary_eps", "tail", "s_max"] if name in self.values}
        if "family" in self.values:
            settings["kind"] = self.values["family"]
        settings.update(kwargs)
        cfg = EmConfig(**settings)
        return cfg

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def cmd_simulate ( config: RunConfig
                 ) ->      None:

    """
        Simulates an entire family tree and writes it in the layout of the shipped sample.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Model
    if config["theta"] is None or config["offspring"] is None:
        raise SchemaError("simulate needs an offspring law and a control parameter")
    offspring = OffspringDistribution.from_weights(config["offspring"])
    family = ControlFamily.create(config["family"], config["theta"])

    # Simulate and write
    sample = simulate(offspring, family, config["z0"], config["n_generations"], config["seed"])
    _emit(sample_to_dataframe(sample), config["output"], config)

#####################################################################################################################################################

def cmd_mle ( config: RunConfig
            ) ->      None:

    """
        Writes the maximum likelihood estimates and confidence intervals from an entire family tree.
        With evolve, one block of rows per prefix of the tree.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Estimates on the whole tree or on every prefix
    sample = read_full_tree(_input_path(config))
    if config["evolve"]:
        rows = mle_complete.evolve(sample, config["family"], config["level"])
    else:
        mle = mle_complete.estimate(sample, config["family"])
        intervals = mle_complete.confidence_intervals(mle, sample, config["level"])
        rows = [{"parameter": name, "estimate": value, "ci_low": intervals.get(name, (None, None))[0], "ci_high": intervals.get(name, (None, None))[1]} for name, value in mle.as_dict().items()]
    _emit(pandas.DataFrame(rows), config["output"], config)

#####################################################################################################################################################

def cmd_em ( config: RunConfig
           ) ->      None:

    """
        Runs the EM algorithm of the chosen scheme, possibly from several random starts.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Sample of the chosen scheme
    sample = _read_scheme(config)
    cfg = config.em_config(trace=config["trace"] is not None)

    # Estimates on every prefix
    if config["evolve"]:
        rows = evolve_em(sample, cfg, max(config["multi_start"], 1), config["seed"], config["threads"])
        _emit(pandas.DataFrame(rows), config["output"], config)
        return

    # Single run or multi-start
    if config["multi_start"] > 0:
        fit, fits = multi_start(sample, config["multi_start"], config["seed"], cfg, config["threads"], _progress())
    else:
        init_p = None if config["init_p"] is None else OffspringDistribution.from_weights(config["init_p"])
        fit = em_fit(sample, init_p, config["init_theta"], cfg)
        fits = [fit]

    # Estimates and run information
    rows = [{"parameter": name, "value": value} for name, value in fit.as_dict().items()]
    rows += [{"parameter": "loglik", "value": fit.loglik}, {"parameter": "iterations", "value": fit.iterations}, {"parameter": "converged", "value": int(fit.converged)}]
    _emit(pandas.DataFrame(rows), config["output"], config)

    # Optional outputs
    if config["starts_output"] is not None:
        starts = [dict(start_index=start.start_index, **start.as_dict(), loglik=start.loglik, iterations=start.iterations, converged=int(start.converged)) for start in fits]
        _emit(pandas.DataFrame(starts), config["starts_output"], config)
    if config["trace"] is not None:
        trace = [dict(iteration=iteration, **{"p%d" % k: value for k, value in enumerate(probs)}, theta=theta, loglik=value) for iteration, probs, theta, value in (fit.trace or [])]
        _emit(pandas.DataFrame(trace), config["trace"], config)

#####################################################################################################################################################

def cmd_loglik ( config: RunConfig
               ) ->      None:

    """
        Writes the exact log-likelihood of given parameters, with one row per generation and a total.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Parameters
    if config["theta"] is None or config["offspring"] is None:
        raise SchemaError("loglik needs an offspring law (--offspring) and a control parameter (--theta)")
    p = OffspringDistribution.from_weights(config["offspring"])
    family = ControlFamily.create(config["family"], config["theta"])

    # Inline sample or file
    if config["z"] is not None:
        sample = SizesSample(config["z"]) if config["phi"] is None else ProgenitorSample(config["z"], config["phi"])
    else:
        sample = _read_scheme(config)

    # Transitions and total
    if isinstance(sample, ProgenitorSample):
        terms = transition_logliks_progenitors(sample, p, family)
    else:
        terms = transition_logliks_sizes(sample, p, family, config["tail"])
    if not numpy.all(numpy.isfinite(terms)):
        logger.warning("Zero-probability transition at generation(s) %s" % ", ".join([str(l) for l in numpy.nonzero(~numpy.isfinite(terms))[0]]))
    total = float(terms.sum()) if numpy.all(numpy.isfinite(terms)) else -numpy.inf
    rows = [{"generation": str(l), "loglik": float(term)} for l, term in enumerate(terms)] + [{"generation": "total", "loglik": total}]
    _emit(pandas.DataFrame(rows), config["output"], config)

#####################################################################################################################################################

def cmd_scan ( config: RunConfig
             ) ->      None:

    """
        Writes the comparison of control families and maximum numbers of children, one row per s_max.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Fit all cells
    sample = _read_scheme(config)
    cfg = config.em_config()
    result = scan(sample, config["families"], config["s_max_grid"], cfg, config["n_starts"], config["seed"], config["criterion"] == "corrected", config["threads"], _progress())
    _emit(result.to_dataframe(), config["output"], config)

#####################################################################################################################################################

def cmd_bootstrap ( config: RunConfig
                  ) ->      None:

    """
        Fits the model on the sample, then bootstraps the EM estimator of each requested scheme.
        When both schemes are bootstrapped, the efficiency mse(sizes) / mse(progenitors) is added.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Sample and simulation settings
    schemes = SCHEMES if config["bootstrap_scheme"] == "both" else [config["bootstrap_scheme"]]
    sample = read_sizes(_input_path(config)) if schemes == ["sizes"] else read_progenitors(_input_path(config))
    n_generations = sample.n_generations if config["n_generations"] is None else config["n_generations"]
    z0 = int(sample.z[0]) if config["z0"] is None else config["z0"]
    cfg = config.em_config()

    # Reference values
    truth = None
    if config["truth"] == "reference":
        p, family = true_parameters()
        truth = model_parameters(p.padded(max(cfg.s_max, p.s_max)), family)

    # One bootstrap per scheme, each from its own fit
    summaries = {}
    for scheme in schemes:
        scheme_sample = sample if scheme == "progenitors" else SizesSample(sample.z)
        if scheme == "progenitors":
            fit = em_fit(scheme_sample, None, None, cfg)
        else:
            fit, _ = multi_start(scheme_sample, config["n_starts"], config["seed"], cfg, config["threads"], _progress())
        summaries[scheme] = bootstrap(fit, cfg.kind, scheme, config["n_reps"], n_generations, z0, truth, config["seed"], cfg, config["n_starts"], config["threads"], _progress())

    # Summary table
    if len(summaries) == 2:
        eff = efficiency(summaries["progenitors"], summaries["sizes"])
        rows = [{"parameter": name, "mse_progenitors": summaries["progenitors"].mse[name], "mse_sizes": summaries["sizes"].mse[name], "eff": eff[name]} for name in eff]
    else:
        rows = summaries[schemes[0]].to_summary_rows()
    metadata = {"%s_%s" % (scheme, key): value for scheme in summaries for key, value in summaries[scheme].metadata.items() if key in ["n_extinct", "n_failed", "extinct_policy", "n_starts"]}
    _emit(pandas.DataFrame(rows), config["output"], config, metadata)

    # Replicates
    if config["replicates_output"] is not None:
        replicates = [dict(scheme=scheme, **row) for scheme in summaries for row in summaries[scheme].to_long_rows()]
        _emit(pandas.DataFrame(replicates), config["replicates_output"], config, metadata)

#####################################################################################################################################################

def cmd_trees ( config: RunConfig
              ) ->      None:

    """
        Writes the sizes of the largest transition trees, one row per generation size.
        In:
            * config: Parameters of the command.
        Out:
            * None.
    """

    # Counting only, no sample needed
    table = complexity_table(config["z_max"], config["s_max_grid"])
    metadata = {}
    if config["slopes_from"] is not None:
        z_values = list(range(config["slopes_from"], config["z_max"] + 1))
        for s_max in config["s_max_grid"]:
            slope_b, slope_b_star = growth_exponents(z_values, s_max)
            metadata["slope_b_max_%d" % s_max] = "%.4f" % slope_b
            metadata["slope_b_star_max_%d" % s_max] = "%.4f" % slope_b_star
    _emit(table, config["output"], config, metadata)

#####################################################################################################################################################

"""
    Functions running each command.
"""

HANDLERS = {"simulate": cmd_simulate,
            "mle": cmd_mle,
            "em": cmd_em,
            "loglik": cmd_loglik,
            "scan": cmd_scan,
            "bootstrap": cmd_bootstrap,
            "trees": cmd_trees}

#####################################################################################################################################################

def main ( argv: Union[None, List[str]] = None
         ) ->    int:

    """
        Entry point of the command-line interface.
        In:
            * argv: Arguments (the ones of the process if None).
        Out:
            * code: Exit code, 0 on success, 2 for configuration or file format errors, 3 for parameter domain errors, 4 for degenerate data or numerical failures, 5 for input/output errors.
    """

    # Parse the arguments
    args = parser.parse_args(argv)
    global _show_progress
    _show_progress = not args.no_progress and sys.stderr.isatty()
    use_colors = not args.no_colors and sys.stderr.isatty()
    setup_logging(args.log_level, use_colors)
    flags = {name: value for name, value in vars(args).items() if name in PARAMETERS}

    # Run the command, errors become exit codes
    try:
        config = RunConfig.from_sources(args.command, flags, args.config)
        HANDLERS[args.command](config)
        code = 0
    except PyCBPError as error:
        _report(error, use_colors)
        code = error.exit_code
    except OSError as error:
        _report(error, use_colors)
        code = 5
    return code

#####################################################################################################################################################

# Progress bars are shown only in terminals
_show_progress = False

#####################################################################################################################################################

def _progress () -> bool:

    # Set by main
    return _show_progress

#####################################################################################################################################################

def _convert ( name:  str,
               value: Any
             ) ->     Any:

    """
        Converts a parameter to its type and checks its accepted values.
        In:
            * name:  Name of the parameter.
            * value: Raw value, from the command line or a file.
        Out:
            * value: Converted value.
    """

    # Missing optional values
    if value is None or (isinstance(value, str) and value.lower() in ["none", "null"] and PARAMETERS[name]["default"] is None):
        return None

    # Conversion
    try:
        value = PARAMETERS[name]["type"](value)
    except SchemaError:
        raise
    except (ValueError, TypeError, SyntaxError) as error:
        raise SchemaError("Invalid value %s for parameter %s: %s" % (repr(value), name, str(error)))
    if "choices" in PARAMETERS[name] and value not in PARAMETERS[name]["choices"]:
        raise SchemaError("Invalid value %s for parameter %s, expected one of %s" % (repr(value), name, ", ".join(PARAMETERS[name]["choices"])))
    return value

#####################################################################################################################################################

def _input_path ( config: RunConfig
                ) ->      str:

    # Shipped sample by default
    return REFERENCE_SAMPLE_PATH if config["input"] is None else config["input"]

#####################################################################################################################################################

def _read_scheme ( config: RunConfig
                 ) ->      Union[ProgenitorSample, SizesSample]:

    # Projection of the input on the scheme of the command
    if config["scheme"] == "progenitors":
        return read_progenitors(_input_path(config))
    return read_sizes(_input_path(config))

#####################################################################################################################################################

def _emit ( table:    pandas.DataFrame,
            path:     Union[None, str],
            config:   RunConfig,
            metadata: Union[None, Dict[str, Any]] = None
          ) ->        None:

    """
        Writes a table as CSV, preceded by the effective configuration.
        Floats are written with 17 significant digits unless a number of decimals is requested.
        In:
            * table:    Table to write.
            * path:     Destination file (standard output if None).
            * config:   Parameters of the command.
            * metadata: Additional header lines.
        Out:
            * None.
    """

    # Header lines
    header = config.metadata()
    header.update({key: str(value) for key, value in (metadata or {}).items()})

    # Table
    if config["digits"] is not None:
        table = table.round(config["digits"])
    text = format_metadata(header) + table.to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")

    # Destination
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as file:
            file.write(text)

#####################################################################################################################################################

def _report ( error:      Exception,
              use_colors: bool
            ) ->          None:

    # One line on stderr
    message = "Error: %s" % str(error)
    if use_colors:
        message = colored.fg("red") + message + colored.attr(0)
    print(message, file=sys.stderr)

#####################################################################################################################################################
#####################################################################################################################################################
