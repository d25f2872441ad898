#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This program is needed for an automatic installation of the PyCBP library and of its "pycbp" command.
    Please refer to the README.md file for more information.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# Standard imports
import setuptools

#####################################################################################################################################################
####################################################################### SCRIPT ######################################################################
#####################################################################################################################################################

# Installation details
setuptools.setup \
(
    name =                          "PyCBP",
    version =                       "1.0.0",
    description =                   "Simulation and maximum likelihood inference for controlled branching processes with power series control laws",
    long_description =              open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type = "text/markdown",
    license =                       "MIT",
    python_requires =               ">=3.8",
    packages =                      setuptools.find_packages(exclude=["tests"]),
    include_package_data =          True,
    package_data =                  {"pycbp" : ["data/*.csv"]},
    install_requires =              ["numpy", "scipy", "pandas>=1.5", "pyyaml", "tqdm", "colored", "typing_extensions"],
    entry_points =                  {"console_scripts" : ["pycbp = pycbp.cli:main"]},
)

#####################################################################################################################################################
#####################################################################################################################################################
