#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This file defines the exceptions raised by the PyCBP library.
    Each exception knows the exit code that the command-line interface returns when it is not caught.
    Library functions only raise, the conversion into exit codes is done in "cli.py".
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
from typing import *
from typing_extensions import *

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class PyCBPError (Exception):

    """
        Root of all exceptions raised by PyCBP.
    """

    # Exit code returned by the command-line interface
    exit_code = 1

#####################################################################################################################################################

class SchemaError (PyCBPError):

    """
        Invalid configuration (unknown key, bad value), malformed CSV, or sample of the wrong scheme for a command.
    """

    exit_code = 2

#####################################################################################################################################################

class ParameterDomainError (PyCBPError):

    """
        A parameter lies outside its domain (control parameter outside the family's parameter space, invalid probability vector, etc.).
    """

    exit_code = 3

#####################################################################################################################################################

class BoundaryError (ParameterDomainError):

    """
        An estimate of the migration parameter falls outside the range of the control family.
    """

    # Inherit from parent class, keeping the name of the family
    def __init__ ( self:    Self,
                   message: str,
                   kind:    Union[None, str] = None
                 ) ->       Self:

        """
            This function is the constructor of the class.
            In:
                * self:    Reference to the current object.
                * message: Description of the problem.
                * kind:    Name of the control family concerned, if any.
            Out:
                * self: Reference to the current object.
        """

        # Store the family for callers that need it
        super(BoundaryError, self).__init__(message)
        self.kind = kind

#####################################################################################################################################################

class DegenerateSampleError (PyCBPError):

    """
        The sample carries no information on the parameters (no progenitor or no individual observed).
    """

    exit_code = 4

#####################################################################################################################################################

class InconsistentSampleError (PyCBPError):

    """
        Some transition of the sample is impossible under the declared model.
    """

    exit_code = 4

#####################################################################################################################################################

class DegenerateParameterError (PyCBPError):

    """
        The current parameters put zero probability on every hidden configuration compatible with a transition.
    """

    exit_code = 4

#####################################################################################################################################################

class MultiStartError (PyCBPError):

    """
        Every start of a multi-start EM run has failed.
    """

    exit_code = 4

    # Keep the diagnostics of every start
    def __init__ ( self:        Self,
                   message:     str,
                   diagnostics: List[Tuple[int, str]]
                 ) ->           Self:

        """
            This function is the constructor of the class.
            In:
                * self:        Reference to the current object.
                * message:     Description of the problem.
                * diagnostics: Pairs (start index, error message) for every failed start.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(MultiStartError, self).__init__(message)
        self.diagnostics = diagnostics

#####################################################################################################################################################

class BootstrapError (PyCBPError):

    """
        The bootstrap could not produce any replicate.
    """

    exit_code = 4

#####################################################################################################################################################
#####################################################################################################################################################
