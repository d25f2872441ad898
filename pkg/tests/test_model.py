#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This program contains the unit tests of the file "model.py": control laws, offspring laws, simulation, samples and CSV files.
    The shipped sample is the one simulated with p = (0.1084, 0.2709, 0.3386, 0.2822) and a binomial control with q = 0.6.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# Import PyCBP
from pycbp import *

# External imports
import io
import math
import unittest
import numpy

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class TestsModel (unittest.TestCase):

    """
        Tests of the probability model and of the samples.
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
        super(TestsModel, self).__init__(*args, **kwargs)

        # Control laws on a grid of parameters
        self.families = [ControlFamily.create(kind, theta) for kind in ["binomial", "poisson"] for theta in [0.3, 1.0, 1.5, 4.0]]
        self.families += [ControlFamily.create("negative_binomial", theta) for theta in [0.2, 0.5, 0.8]]

        # Sizes of the shipped sample
        self.reference_sizes = [1, 1, 1, 2, 2, 5, 9, 9, 10, 17, 20, 24, 35, 52, 69, 71, 58, 78, 97, 93, 102, 124, 142, 133, 128, 151, 158, 156, 165, 167, 200]

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def test_control_pmf ( self: Self
                         ) ->    None:

        """
            This function tests the function "control_pmf" on known values.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Binomial with q = 0.6
        self.assertAlmostEqual(control_pmf(ControlFamily.create("binomial", 1.5), 1, 1), 0.6, places=12)
        self.assertEqual(control_pmf(ControlFamily.create("binomial", 1.5), 2, 3), 0.0)

        # Nobody to select
        for family in self.families:
            self.assertAlmostEqual(control_pmf(family, 0, 0), 1.0, places=12)
            self.assertEqual(control_pmf(family, 0, 1), 0.0)

        # Poisson law of mean k * theta
        self.assertAlmostEqual(control_pmf(ControlFamily.create("poisson", 2.0), 3, 0), math.exp(-6.0), places=12)

        # Negative arguments are rejected
        self.assertRaises(ParameterDomainError, control_pmf, self.families[0], -1, 0)

    #############################################################################################################################################

    def test_pmf_sums_to_one ( self: Self
                             ) ->    None:

        """
            This function checks that control laws sum to one, truncating unbounded laws where the neglected mass is 1e-12.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # All families, all sizes
        for family in self.families:
            for k in range(21):
                j = numpy.arange(family.support_max(k) + 1)
                self.assertAlmostEqual(float(family.pmf(k, j).sum()), 1.0, delta=1e-10, msg="%s, k=%d" % (repr(family), k))

    #############################################################################################################################################

    def test_power_series_identities ( self: Self
                                     ) ->    None:

        """
            This function checks A_k(theta) = A_1(theta)^k, and mu(theta) = theta * d/dtheta log A_1(theta) with a finite difference.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Closed forms of A_1
        closed_forms = {"binomial": lambda theta: 1.0 + theta, "poisson": lambda theta: math.exp(theta), "negative_binomial": lambda theta: 1.0 / (1.0 - theta)}
        for family in self.families:
            a_1 = closed_forms[family.kind](family.theta)
            for k in range(21):
                self.assertAlmostEqual(math.exp(float(family.log_A(k))) / a_1 ** k, 1.0, delta=1e-10)

            # Central finite difference of log A_1
            h = 1e-6 * family.theta
            derivative = (float(family.with_theta(family.theta + h).log_A(1)) - float(family.with_theta(family.theta - h).log_A(1))) / (2.0 * h)
            self.assertAlmostEqual(family.theta * derivative / family.mu(), 1.0, delta=1e-6)

    #############################################################################################################################################

    def test_mean_and_variance_of_control ( self: Self
                                          ) ->    None:

        """
            This function checks the mean k * mu(theta) and variance k * theta * mu'(theta) of the control laws against their pmf.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Moments from the pmf
        for family in self.families:
            k = 7
            j = numpy.arange(family.support_max(k) + 1)
            pmf = family.pmf(k, j)
            mean = float(j @ pmf)
            variance = float(((j - mean) ** 2) @ pmf)
            self.assertAlmostEqual(mean, family.control_mean(k), delta=1e-8)
            self.assertAlmostEqual(variance, family.control_variance(k), delta=1e-7)

    #############################################################################################################################################

    def test_parameter_domains ( self: Self
                               ) ->    None:

        """
            This function checks the parameter spaces of the families and the inversion of mu.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Invalid parameters
        self.assertRaises(ParameterDomainError, ControlFamily.create, "binomial", 0.0)
        self.assertRaises(ParameterDomainError, ControlFamily.create, "poisson", -1.0)
        self.assertRaises(ParameterDomainError, ControlFamily.create, "negative_binomial", 1.5)
        self.assertRaises(SchemaError, ControlFamily.create, "geometric", 0.5)

        # Names are normalized
        self.assertEqual(ControlFamily.create("NegativeBinomial", 0.5).kind, "negative_binomial")

        # Inversion, and the binomial boundary
        for family in self.families:
            self.assertAlmostEqual(ControlFamily.from_mu(family.kind, family.mu()).theta, family.theta, places=10)
        self.assertAlmostEqual(ControlFamily.from_mu("binomial", 0.6).theta, 1.5, places=12)
        with self.assertRaises(BoundaryError) as context:
            ControlFamily.from_mu("binomial", 1.0)
        self.assertEqual(context.exception.kind, "binomial")

    #############################################################################################################################################

    def test_random_theta ( self: Self
                          ) ->    None:

        """
            This function checks that random starting values lie in the parameter spaces.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Many draws
        rng = make_rng(3)
        for kind in FAMILIES:
            for _ in range(200):
                self.assertTrue(FAMILIES[kind].theta_is_valid(FAMILIES[kind].random_theta(rng)))

    #############################################################################################################################################

    def test_offspring_distribution ( self: Self
                                    ) ->    None:

        """
            This function tests the offspring law: validation, moments and padding.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Moments of the law of the shipped sample
        p, family = true_parameters()
        self.assertAlmostEqual(p.mean(), 1.7946, delta=2e-4)
        self.assertAlmostEqual(p.variance(), 0.9443, delta=2e-4)
        self.assertAlmostEqual(family.mu(), 0.6, places=12)

        # Invalid vectors
        self.assertRaises(ParameterDomainError, OffspringDistribution, [1.0])
        self.assertRaises(ParameterDomainError, OffspringDistribution, [0.5, 0.6])
        self.assertRaises(ParameterDomainError, OffspringDistribution, [1.5, -0.5])

        # Padding keeps the law
        padded = OffspringDistribution([0.25, 0.75]).padded(3)
        self.assertEqual(padded.s_max, 3)
        self.assertAlmostEqual(padded.mean(), 0.75, places=12)
        self.assertEqual(OffspringDistribution.uniform(3), OffspringDistribution([0.25, 0.25, 0.25, 0.25]))

    #############################################################################################################################################

    def test_simulate_trivial_cases ( self: Self
                                    ) ->    None:

        """
            This function tests the function "simulate" on cases with a known outcome.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Zero is absorbing
        p, family = true_parameters()
        sample = simulate(p, family, 0, 10, 1)
        self.assertTrue(numpy.all(sample.sizes() == 0))
        self.assertTrue(numpy.all(sample.counts == 0))

        # Nobody has children
        sample = simulate(OffspringDistribution([1.0, 0.0, 0.0]), family, 25, 3, 1)
        self.assertEqual(sample.sizes()[1], 0)

        # Invalid arguments
        self.assertRaises(ParameterDomainError, simulate, p, family, 1, 0, 1)

    #############################################################################################################################################

    def test_simulate_identities ( self: Self
                                 ) ->    None:

        """
            This function checks the exact identities between counts, progenitors and sizes, and the determinism of the simulation.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Several families and seeds
        p, _ = true_parameters()
        for family in [ControlFamily.create("binomial", 1.5), ControlFamily.create("poisson", 0.6), ControlFamily.create("negative_binomial", 0.4)]:
            for seed in range(5):
                sample = simulate(p, family, 3, 12, seed)
                sizes = sample.sizes()
                for l in range(sample.n_generations):
                    self.assertEqual(sample.counts[l].sum(), sample.progenitors()[l])
                    self.assertEqual(sample.counts[l] @ numpy.arange(p.s_max + 1), sizes[l + 1])
                    if isinstance(family, BinomialControl):
                        self.assertLessEqual(sample.progenitors()[l], sizes[l])

                # Same seed, same tree
                self.assertEqual(simulate(p, family, 3, 12, seed), sample)

    #############################################################################################################################################

    def test_simulate_mean_growth ( self: Self
                                  ) ->    None:

        """
            This function checks by Monte Carlo that E[Z_1 | Z_0 = 1] = m * mu(theta).
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Independent one-generation trees
        p, family = true_parameters()
        rng = make_rng(2024)
        n_runs = 20000
        values = numpy.array([simulate(p, family, 1, 1, rng).sizes()[1] for _ in range(n_runs)])

        # Within 3 standard errors
        standard_error = values.std() / math.sqrt(n_runs)
        self.assertLess(abs(values.mean() - p.mean() * family.mu()), 3.0 * standard_error)

    #############################################################################################################################################

    def test_projections ( self: Self
                         ) ->    None:

        """
            This function tests the functions "project_progenitors" and "project_sizes".
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Shipped sample
        sample = load_reference_sample()
        progenitors = project_progenitors(sample)
        sizes = project_sizes(sample)
        self.assertEqual(list(sizes.z), self.reference_sizes)
        self.assertEqual(list(progenitors.z), self.reference_sizes)
        self.assertEqual(list(progenitors.phi[:6]), [1, 1, 1, 1, 2, 5])
        self.assertEqual(progenitors.phi[29], 107)

        # Single generation
        single = FullTreeSample(2, [[0, 0, 1, 0]])
        self.assertEqual(list(project_progenitors(single).z), [2, 2])
        self.assertEqual(list(project_progenitors(single).phi), [1])

        # Nobody selected
        empty = FullTreeSample(2, [[0, 0, 0, 0]])
        self.assertEqual(list(project_progenitors(empty).phi), [0])
        self.assertEqual(list(project_sizes(empty).z), [2, 0])

    #############################################################################################################################################

    def test_reference_sample_totals ( self: Self
                                     ) ->    None:

        """
            This function checks the cumulative totals of the shipped sample.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Totals up to generation 29 and 30
        sample = load_reference_sample()
        self.assertEqual(sample.n_generations, 30)
        self.assertEqual(sample.s_max, 3)
        self.assertEqual(sample.cumulative_progenitors()[29], 1266)
        self.assertEqual(sample.cumulative_sizes()[29], 2080)
        self.assertEqual(sample.cumulative_sizes()[30], 2280)
        self.assertEqual(sample.cumulative_counts()[29][0], 130)
        self.assertTrue(numpy.all(numpy.diff(sample.cumulative_sizes()) >= 0))

    #############################################################################################################################################

    def test_incomplete_samples ( self: Self
                                ) ->    None:

        """
            This function tests the validation of incomplete samples and their derived quantities.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Impossible whatever the model
        self.assertRaises(InconsistentSampleError, ProgenitorSample, [2, 3], [0])
        self.assertRaises(InconsistentSampleError, ProgenitorSample, [0, 0], [1])
        self.assertRaises(InconsistentSampleError, SizesSample, [0, 1])
        self.assertRaises(SchemaError, ProgenitorSample, [1, 2, 3], [1])
        self.assertRaises(SchemaError, SizesSample, [4])

        # Impossible for some models
        sample = ProgenitorSample([2, 9], [3])
        self.assertRaises(InconsistentSampleError, sample.validate_against, "binomial", 3)
        sample.validate_against("poisson", 3)
        self.assertRaises(InconsistentSampleError, sample.validate_against, "poisson", 2)
        self.assertRaises(InconsistentSampleError, SizesSample([1, 4]).validate_against, "binomial", 3)
        SizesSample([1, 4]).validate_against("poisson", 3)

        # Totals and sizes of the samples
        sample = project_progenitors(load_reference_sample())
        self.assertEqual(sample.n_observations(), 61)
        self.assertEqual(SizesSample(sample.z).n_observations(), 31)
        self.assertEqual(sample.parents_total(), 2080)
        self.assertEqual(sample.offspring_total(), 2279)
        self.assertEqual(sample.prefix(5).n_generations, 5)

    #############################################################################################################################################

    def test_csv_round_trip ( self: Self
                            ) ->    None:

        """
            This function checks that writing then reading a sample gives it back, for the three schemes.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # All schemes of the shipped sample
        tree = load_reference_sample()
        for sample in [tree, project_progenitors(tree), project_sizes(tree)]:
            stream = io.StringIO()
            write_sample(sample, stream, {"seed": 1, "command": "test"})
            text = stream.getvalue()
            self.assertTrue(text.startswith("# command=test\n# seed=1\n"))
            self.assertEqual(read_sample(io.StringIO(text)), sample)

        # Layout of the full tree
        stream = io.StringIO()
        write_sample(tree, stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], "n,Z,phi,Z0,Z1,Z2,Z3")
        self.assertEqual(lines[1], "0,1,1,0,1,0,0")
        self.assertEqual(lines[-1], "30,200,,,,,")

    #############################################################################################################################################

    def test_csv_errors ( self: Self
                        ) ->    None:

        """
            This function checks the errors raised when reading malformed or mismatching files.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Scheme mismatch
        sizes_only = "n,Z\n0,1\n1,2\n"
        self.assertRaises(SchemaError, read_full_tree, io.StringIO(sizes_only))
        self.assertRaises(SchemaError, read_progenitors, io.StringIO(sizes_only))
        self.assertIsInstance(read_sizes(io.StringIO(sizes_only)), SizesSample)

        # Column Z does not match the counts
        self.assertRaises(InconsistentSampleError, read_sample, io.StringIO("n,Z,phi,Z0,Z1\n0,1,1,0,1\n1,2,,,\n"))

        # Bad columns and values
        self.assertRaises(SchemaError, read_sample, io.StringIO("n,size\n0,1\n1,2\n"))
        self.assertRaises(SchemaError, read_sample, io.StringIO("n,Z\n0,1\n2,2\n"))
        self.assertRaises(SchemaError, read_sample, io.StringIO("n,Z\n0,1.5\n1,2\n"))

#####################################################################################################################################################
######################################################################## GO! ########################################################################
#####################################################################################################################################################

if __name__ == "__main__":

    # Run all unit tests
    unittest.main(verbosity=2)

#####################################################################################################################################################
#####################################################################################################################################################
