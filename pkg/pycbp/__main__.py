#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    Allows running the command-line interface with "python -m pycbp".
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# External imports
import sys

# Internal imports
from pycbp.cli import main

#####################################################################################################################################################
######################################################################## GO! ########################################################################
#####################################################################################################################################################

if __name__ == "__main__":
    sys.exit(main())

#####################################################################################################################################################
#####################################################################################################################################################
