#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This program contains the unit tests of the file "bootstrap.py".
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# Import PyCBP
from pycbp import *
from pycbp.bootstrap import BootstrapSummary, bootstrap, efficiency, paired_bootstrap, model_parameters

# External imports
import os
import unittest
import numpy

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class TestsBootstrap (unittest.TestCase):

    """
        Tests of the parametric bootstrap and of the relative efficiency.
    """

    #############################################################################################################################################
    #                                                                CONSTRUCTOR                                                                #
    #############################################################################################################################################

    def __init__ ( self:     Self,
                   *args:    Any,
                   **kwargs: Any,
                 ) ->        Self:

        """
            This function is the constructor of the class.
            In:
                * self:   Reference to the current object.
                * args:   Arguments of the parent constructor.
                * kwargs: Keyword arguments of the parent constructor.
            Out:
                * self: Reference to the current object.
        """

        # Inherit from parent class
        super(TestsBootstrap, self).__init__(*args, **kwargs)

        # Generating model and quick settings
        self.p, self.family = true_parameters()
        self.cfg = EmConfig(tol=1e-5, max_iters=5000)

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def test_model_parameters ( self: Self
                              ) ->    None:

        """
            This function tests the function "model_parameters".
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Parameters of the shipped sample
        parameters = model_parameters(self.p, self.family)
        self.assertEqual(list(parameters), ["p0", "p1", "p2", "p3", "m", "sigma2", "mu", "tau"])
        self.assertAlmostEqual(parameters["mu"], 0.6, places=12)
        self.assertAlmostEqual(parameters["tau"], parameters["m"] * 0.6, places=12)

    #############################################################################################################################################

    def test_bootstrap_progenitors ( self: Self
                                   ) ->    None:

        """
            This function runs a small bootstrap with sizes and progenitors and checks its bookkeeping.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Twenty replicates
        summary = bootstrap((self.p, 1.5), "binomial", "progenitors", 20, 10, 5, None, 7, self.cfg, threads=1)
        self.assertEqual(summary.n_success + summary.n_failed, 20)
        self.assertGreater(summary.n_success, 0)
        self.assertEqual(summary.replicate_ids, sorted(summary.replicate_ids))
        self.assertEqual(summary.metadata["extinct_policy"], "excluded")
        self.assertEqual(summary.metadata["n_extinct"], summary.extinct)

        # Errors against the generating model
        truth = model_parameters(self.p, self.family)
        for name, values in summary.replicates.items():
            self.assertEqual(values.size, summary.n_success)
            self.assertAlmostEqual(summary.mse[name], float(numpy.mean((values - truth[name]) ** 2)), places=12)
            self.assertGreaterEqual(summary.mse[name], 0.0)

        # Tables
        self.assertEqual(len(summary.to_long_rows()), summary.n_success * 8)
        rows = summary.to_summary_rows()
        self.assertEqual([row["parameter"] for row in rows], list(truth))
        self.assertNotIn("eff", rows[0])

    #############################################################################################################################################

    def test_bootstrap_reproducible ( self: Self
                                    ) ->    None:

        """
            This function checks that the bootstrap only depends on its seed, not on the number of workers.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Same seed, one and two workers
        first = bootstrap((self.p, 1.5), "binomial", "progenitors", 8, 8, 4, None, 11, self.cfg, threads=1)
        second = bootstrap((self.p, 1.5), "binomial", "progenitors", 8, 8, 4, None, 11, self.cfg, threads=2)
        self.assertEqual(first.replicate_ids, second.replicate_ids)
        for name in first.replicates:
            self.assertTrue(numpy.array_equal(first.replicates[name], second.replicates[name]))

        # Another seed gives other replicates
        other = bootstrap((self.p, 1.5), "binomial", "progenitors", 8, 8, 4, None, 12, self.cfg, threads=1)
        self.assertFalse(other.replicate_ids == first.replicate_ids and numpy.array_equal(other.replicates["m"], first.replicates["m"]))

    #############################################################################################################################################

    def test_bootstrap_errors ( self: Self
                              ) ->    None:

        """
            This function checks the errors raised by the bootstrap.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Bad arguments
        self.assertRaises(BootstrapError, bootstrap, (self.p, 1.5), "binomial", "progenitors", 0, 10, 5, None, 1, self.cfg)
        self.assertRaises(SchemaError, bootstrap, (self.p, 1.5), "binomial", "trees", 3, 10, 5, None, 1, self.cfg)

        # Every replicate dies
        dying = OffspringDistribution([1.0, 0.0])
        self.assertRaises(BootstrapError, bootstrap, (dying, 1.5), "binomial", "progenitors", 5, 3, 2, None, 1, self.cfg, threads=1)

    #############################################################################################################################################

    def test_efficiency ( self: Self
                        ) ->    None:

        """
            This function tests the function "efficiency", including a zero mean squared error.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Handmade summaries
        a = BootstrapSummary([0, 1], {"m": [1.0, 3.0]}, {"m": 2.0}, 0, 0, {})
        b = BootstrapSummary([0, 1], {"m": [0.0, 4.0]}, {"m": 2.0}, 0, 0, {})
        exact = BootstrapSummary([0, 1], {"m": [2.0, 2.0]}, {"m": 2.0}, 0, 0, {})
        self.assertEqual(a.mse["m"], 1.0)
        self.assertEqual(efficiency(a, b)["m"], 4.0)
        self.assertEqual(efficiency(b, a)["m"], 0.25)
        with self.assertLogs("pycbp.bootstrap", level="WARNING"):
            self.assertEqual(efficiency(exact, a)["m"], numpy.inf)

        # Two exact estimators are equally good
        self.assertEqual(efficiency(exact, exact), {"m": 1.0})

        # Summary rows carry the efficiency
        self.assertEqual(a.to_summary_rows(efficiency(a, b))[0]["eff"], 4.0)

        # Different parameters
        other = BootstrapSummary([0], {"mu": [0.5]}, {"mu": 0.6}, 0, 0, {})
        self.assertRaises(SchemaError, efficiency, a, other)

    #############################################################################################################################################

    def test_paired_bootstrap ( self: Self
                              ) ->    None:

        """
            This function runs both schemes on the same replicates and compares them.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Few short replicates
        progenitors, sizes, eff = paired_bootstrap((self.p, 1.5), (self.p, 1.5), "binomial", 4, 6, 3, None, 5, self.cfg, n_starts=2, threads=1)
        self.assertEqual(progenitors.extinct, sizes.extinct)
        self.assertEqual(set(eff), set(progenitors.mse))
        self.assertEqual(sizes.metadata["n_starts"], 2)
        for name in eff:
            if progenitors.mse[name] > 0.0:
                self.assertAlmostEqual(eff[name], sizes.mse[name] / progenitors.mse[name], places=12)

    #############################################################################################################################################

    def test_point_mass_model ( self: Self
                              ) ->    None:

        """
            This function bootstraps a model where every progenitor has exactly one child: all re-fits find it again.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Almost everybody is a progenitor
        p = OffspringDistribution([0.0, 1.0, 0.0, 0.0])
        summary = bootstrap((p, 99.0), "binomial", "progenitors", 10, 10, 20, None, 3, self.cfg, threads=1)
        self.assertEqual(summary.n_success, 10)
        self.assertLess(summary.mse["p1"], 1e-8)
        self.assertAlmostEqual(summary.means()["m"], 1.0, places=4)

        # Identical summaries compare to 1, even without errors
        self.assertTrue(all([value == 1.0 for value in efficiency(summary, summary).values()]))

    #############################################################################################################################################

    def test_efficiency_identities ( self: Self
                                   ) ->    None:

        """
            This function checks that efficiencies are 1 between identical summaries and compose as ratios.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Three summaries
        a = BootstrapSummary([0, 1, 2], {"m": [1.0, 2.5, 2.0], "mu": [0.5, 0.7, 0.6]}, {"m": 2.0, "mu": 0.6}, 0, 0, {})
        b = BootstrapSummary([0, 1, 2], {"m": [0.5, 3.0, 2.0], "mu": [0.4, 0.6, 0.9]}, {"m": 2.0, "mu": 0.6}, 0, 0, {})
        c = BootstrapSummary([0, 1, 2], {"m": [2.2, 1.9, 2.0], "mu": [0.6, 0.65, 0.6]}, {"m": 2.0, "mu": 0.6}, 0, 0, {})
        self.assertEqual(efficiency(a, a), {"m": 1.0, "mu": 1.0})
        for name in ["m", "mu"]:
            self.assertAlmostEqual(efficiency(a, c)[name], efficiency(a, b)[name] * efficiency(b, c)[name], places=12)

    #############################################################################################################################################

    @unittest.skipUnless(os.environ.get("PYCBP_SLOW_TESTS") == "1", "Set PYCBP_SLOW_TESTS=1 to run")
    def test_efficiency_reference_smoke ( self: Self
                                        ) ->    None:

        """
            This function bootstraps both schemes 50 times from the fits of the shipped sample: sizes only are less efficient for m and mu.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Fits of the shipped sample
        progenitors_fit, sizes_fit = self.reference_fits()
        _, _, eff = paired_bootstrap(progenitors_fit, sizes_fit, "binomial", 50, 30, 1, None, 2024, EmConfig(), n_starts=10)
        self.assertGreater(eff["m"], 1.0)
        self.assertGreater(eff["mu"], 1.0)

    #############################################################################################################################################

    @unittest.skipUnless(os.environ.get("PYCBP_SLOW_TESTS") == "1", "Set PYCBP_SLOW_TESTS=1 to run")
    def test_efficiency_reference ( self: Self
                                  ) ->    None:

        """
            This function bootstraps both schemes 500 times from the fits of the shipped sample.
            Sizes only are less efficient for every parameter, and much less for m and mu.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Fits of the shipped sample
        progenitors_fit, sizes_fit = self.reference_fits()
        progenitors, _, eff = paired_bootstrap(progenitors_fit, sizes_fit, "binomial", 500, 30, 1, None, 2025, EmConfig(), n_starts=10)
        for name in eff:
            self.assertGreater(eff[name], 1.0, msg=name)
        self.assertGreater(eff["m"], 10.0)
        self.assertGreater(eff["mu"], 10.0)

        # Bootstrap mean of m with progenitors
        values = progenitors.replicates["m"]
        self.assertLess(abs(values.mean() - progenitors_fit.m), 3.0 * values.std() / numpy.sqrt(values.size))

    #############################################################################################################################################

    def reference_fits ( self: Self
                       ) ->    Tuple[EmFit, EmFit]:

        """
            This function fits the shipped sample with both EM algorithms.
            In:
                * self: Reference to the current object.
            Out:
                * progenitors_fit: Fit with sizes and progenitors.
                * sizes_fit:       Fit with sizes only, started from the previous one.
        """

        # Both schemes
        tree = load_reference_sample()
        progenitors_fit = em_fit_progenitors(project_progenitors(tree), None, None, EmConfig())
        sizes_fit = em_fit_sizes(project_sizes(tree), progenitors_fit.p, progenitors_fit.theta, EmConfig())
        return progenitors_fit, sizes_fit

#####################################################################################################################################################
######################################################################## GO! ########################################################################
#####################################################################################################################################################

if __name__ == "__main__":

    # Run all unit tests
    unittest.main(verbosity=2)

#####################################################################################################################################################
#####################################################################################################################################################
