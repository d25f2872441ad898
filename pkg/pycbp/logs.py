#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file configures the logging of the PyCBP library.
    Library modules only create loggers, and the command-line interface decides where messages go.
    Level names are colorized in terminals.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import logging
import sys
import colored
from typing import *
from typing_extensions import *

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Color associated to each log level.
"""

LEVEL_COLORS = {"DEBUG": "grey_50",
                "INFO": "green",
                "WARNING": "yellow_1",
                "ERROR": "red",
                "CRITICAL": "red"}

#####################################################################################################################################################

"""
    Format of a log line.
"""

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class ColoredFormatter (logging.Formatter):

    """
        Formatter that colorizes the level name of each record.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:       Self,
                   use_colors: bool = True
                 ) ->          Self:

        """
            This function is the constructor of the class.
            In:
                * self:       Reference to the current object.
                * use_colors: Indicates if we use colors for rendering.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(ColoredFormatter, self).__init__(LOG_FORMAT)
        self.use_colors = use_colors

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def format ( self:   Self,
                 record: logging.LogRecord
               ) ->      str:

        """
            Formats a record, with a colored level name if asked.
            In:
                * self:   Reference to the current object.
                * record: Record to format.
            Out:
                * text: Formatted record.
        """

        # Colorize a copy so that other handlers see the original record
        if self.use_colors and record.levelname in LEVEL_COLORS:
            record = logging.makeLogRecord(record.__dict__)
            record.levelname = colored.fg(LEVEL_COLORS[record.levelname]) + record.levelname + colored.attr(0)
        text = super(ColoredFormatter, self).format(record)
        return text

#####################################################################################################################################################
##################################################################### FUNCTIONS #####################################################################
#####################################################################################################################################################

def setup_logging ( level:      Union[int, str] = "WARNING",
                    use_colors: Union[None, bool] = None
                  ) ->          logging.Logger:

    """
        Installs a single stderr handler on the root logger of the library.
        Calling it again replaces the previous handler.
        In:
            * level:      Minimum level of displayed messages.
            * use_colors: Colorize level names, by default only when stderr is a terminal.
        Out:
            * logger: Root logger of the library.
    """

    # Colors only make sense in a terminal
    if use_colors is None:
        use_colors = sys.stderr.isatty()

    # Replace existing handlers
    logger = logging.getLogger("pycbp")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ColoredFormatter(use_colors))
    logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    logger.propagate = False
    return logger

#####################################################################################################################################################
#####################################################################################################################################################
