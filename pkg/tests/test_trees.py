#####################################################################################################################################################
######################################################################## INFO #######################################################################
#####################################################################################################################################################

"""
    This program contains the unit tests of the file "trees.py".
    Enumerations are checked against the counting recursion, and the largest tree sizes against known values.
"""

#####################################################################################################################################################
###################################################################### IMPORTS ######################################################################
#####################################################################################################################################################

# Import PyCBP
from pycbp import *

# External imports
import math
import unittest
import numpy

#####################################################################################################################################################
############################################################### CONSTANTS & VARIABLES ###############################################################
#####################################################################################################################################################

"""
    Largest tree sizes for s_max = 3, 4, 5.
    Columns: z_l, then b_max and b_star_max for each s_max.
"""

LARGEST_TREES = """
   1     1         1       1        1        1          1
   2     2         3       3        4        3          4
   3     3         6       5        8        6          9
   4     5         9       8       14       12         19
   5     6        15      12       24       20         36
   6     8        22      18       37       32         63
   7    10        29      24       58       49        103
   8    13        39      33       85       73        164
   9    15        51      43      117      102        249
  10    18        66      55      164      141        369
  11    21        84      69      218      190        525
  12    25       103      86      287      252        736
  13    28       124     104      372      325       1006
  14    32       150     126      473      414       1355
  15    36       178     150      598      521       1790
  16    41       213     177      736      649       2332
  17    45       249     207      906      795       3000
  18    50       286     241     1102      967       3809
  19    55       331     277     1326     1165       4789
  20    61       378     318     1585     1394       5953
  21    66       433     362     1875     1651       7337
  22    72       492     410     2210     1944       8965
  23    78       552     462     2586     2275      10873
  24    85       618     519     3002     2649      13091
  25    91       691     579     3478     3061      15653
  26    98       769     645     3997     3523      18603
  27   105       856     715     4575     4035      21982
  28   113       945     790     5217     4604      25833
  29   120      1036     870     5923     5225      30213
  30   128      1140     956     6706     5910      35153
  31   136      1246    1046     7545     6660      40728
  32   145      1366    1143     8475     7483      46986
  33   153      1489    1245     9486     8372      54003
  34   162      1614    1353    10585     9343      61824
  35   171      1750    1467    11779    10395      70533
  36   181      1893    1588    13062    11538      80195
  37   190      2046    1714    14456    12764      90880
  38   200      2209    1848    15956    14090     102681
  39   210      2374    1988    17565    15516     115675
  40   221      2545    2135    19309    17053     129965
  41   231      2731    2289    21161    18691     145621
  42   242      2921    2451    23146    20451     162758
  43   253      3129    2619    25271    22330     181469
  44   265      3340    2796    27544    24342     201853
  45   276      3553    2980    29976    26476     224027
  46   288      3784    3172    32537    28754     248116
  47   300      4021    3372    35277    31174     274220
  48   313      4274    3581    38181    33751     302490
  49   325      4536    3797    41269    36471     333023
  50   338      4801    4023    44542    39361     365983
  51   351      5077    4257    47991    42416     401493
  52   365      5368    4500    51647    45654     439716
  53   378      5668    4752    55500    49060     480793
  54   392      5987    5014    59569    52662     524907
  55   406      6309    5284    63877    56455     572201
  56   421      6634    5565    68388    60459     622833
  57   435      6985    5855    73135    64656     676982
  58   450      7339    6155    78124    69079     734837
  59   465      7717    6465    83383    73720     796574
  60   481      8102    6786    88913    78602     862397
  61   496      8490    7116    94674    83705     932496
  62   512      8896    7458   100732    89064    1007118
  63   528      9316    7810   107061    94671    1086429
  64   545      9751    8173   113710   100551    1170652
  65   561     10204    8547   120663   106681    1260022
  66   578     10661    8933   127909   113101    1354759
  67   595     11126    9329   135487   119799    1455114
  68   613     11617    9738   143377   126804    1561303
  69   630     12113   10158   151630   134091    1673615
  70   648     12640   10590   160256   141702    1792281
  71   666     13171   11034   169209   149625    1917588
  72   685     13706   11491   178531   157891    2049806
  73   703     14267   11959   188219   166471    2189195
  74   722     14839   12441   198341   175413    2336068
  75   741     15434   12935   208875   184701    2490790
  76   761     16045   13442   219772   194370    2653595
  77   780     16660   13962   231113   204389    2824802
  78   800     17290   14496   242854   214808    3004715
  79   820     17945   15042   255093   225610    3193697
  80   841     18611   15603   267785   236833    3392022
  81   861     19307   16177   280916   248442    3600097
  82   882     20008   16765   294534   260493    3818240
  83   903     20713   17367   308599   272965    4046845
  84   925     21454   17984   323218   285900    4286352
  85   946     22202   18614   338373   299260    4537044
  86   968     22982   19260   354009   313104    4799346
  87   990     23774   19920   370176   327410    5073587
  88  1013     24571   20595   386859   342223    5360240
  89  1035     25391   21285   404172   357501    5659681
  90  1058     26233   21991   422074   373309    5972353
  91  1081     27094   22711   440500   389620    6298680
  92  1105     27983   23448   459547   406484    6639100
  93  1128     28877   24200   479155   423856    6994059
  94  1152     29780   24968   499457   441804    7364046
  95  1176     30722   25752   520404   460300    7749502
  96  1201     31669   26553   541966   479397    8150987
  97  1225     32659   27369   564199   499045    8569019
  98  1250     33656   28203   587040   519319    9004036
  99  1275     34658   29053   610656   540186    9456496
 100  1301     35693   29920   635009   561704    9926962
 101  1326     36746   30804   660026   583820   10415946
 102  1352     37827   31706   685766   606612   10924007
 103  1378     38932   32624   712211   630045   11451680
 104  1405     40043   33561   739484   654181   11999519
 105  1431     41171   34515   767575   678962   12568160
 106  1458     42335   35487   796381   704473   13158290
 107  1485     43511   36477   826014   730674   13770375
 108  1513     44730   37486   856405   757632   14405000
 109  1540     45955   38512   887694   785285   15062801
 110  1568     47186   39558   919870   813722   15744388
 111  1596     48461   40622   952866   842901   16450391
 112  1625     49748   41705   986747   872893   17181481
 113  1653     51074   42807  1021440   903631   17938314
 114  1682     52419   43929  1057121   935211   18721555
 115  1711     53770   45069  1093798   967585   19531923
 116  1741     55148   46230  1131352  1000830   20370041
 117  1770     56558   47410  1169850  1034875   21236691
 118  1800     57989   48610  1209272  1069820   22132755
 119  1830     59459   49830  1249738  1105615   23058898
 120  1861     60936   51071  1291297  1142341   24015730
 121  1891     62421   52331  1333791  1179921   25004058
 122  1922     63959   53613  1377348  1218463   26024628
 123  1953     65504   54915  1421889  1257911   27078204
 124  1985     67100   56238  1467550  1298352   28165598
 125  2016     68708   57582  1514386  1339705   29287641
 126  2048     70323   58948  1562277  1382082   30445101
 127  2080     71976   60334  1611296  1425424   31638919
 128  2113     73655   61743  1661361  1469823   32870171
 129  2145     75366   63173  1712643  1515192   34139421
 130  2178     77111   64625  1765228  1561651   35447522
 131  2211     78863   66099  1818932  1609135   36795378
 132  2245     80633   67596  1873831  1657742   38183913
 133  2278     82452   69114  1929902  1707380   39613984
 134  2312     84282   70656  1987249  1758174   41086588
 135  2346     86169   72220  2046012  1810056   42602574
 136  2381     88064   73807  2105960  1863129   44162971
 137  2415     89966   75417  2167236  1917295   45768701
 138  2450     91919   77051  2229752  1972687   47420788
 139  2485     93891   78707  2293624  2029230   49120185
 140  2521     95907   80388  2359009  2087034   50868375
 141  2556     97950   82092  2425713  2145996   52665971
 142  2592    100001   83820  2493818  2206254   54513965
 143  2628    102081   85572  2563232  2267730   56413420
 144  2665    104204   87349  2634106  2330539   58365425
 145  2701    106349   89149  2706640  2394571   60371037
 146  2738    108546   90975  2780565  2459973   62431379
 147  2775    110751   92825  2855965  2526660   64547499
 148  2813    112964   94700  2932815  2594754   66720601
 149  2850    115242   96600  3011200  2664140   68951927
 150  2888    117530   98526  3091346  2734970   71242921
 151  2926    119876  100476  3172971  2807155   73594370
 152  2965    122241  102453  3256219  2880823   76007435
 153  3003    124614  104455  3340992  2955852   78483347
 154  3042    127029  106483  3427378  3032403   81023258
 155  3081    129480  108537  3515649  3110380   83628483
 156  3121    131965  110618  3605542  3189918   86300210
 157  3160    134495  112724  3697138  3270889   89039747
 158  3200    137034  114858  3790336  3353460   91848366
 159  3240    139590  117018  3885301  3437531   94727319
 160  3281    142209  119205  3982229  3523243   97677964
 161  3321    144837  121419  4080903  3610461  100701803
 162  3362    147538  123661  4181362  3699361  103800552
 163  3403    150248  125929  4283578  3789835  106975060
 164  3445    152967  128226  4387645  3882032  110226672
 165  3486    155742  130550  4493778  3975811  113556854
 166  3528    158544  132902  4601761  4071354  116966891
 167  3570    161394  135282  4711691  4168549  120458340
"""

#####################################################################################################################################################
###################################################################### CLASSES ######################################################################
#####################################################################################################################################################

class TestsTrees (unittest.TestCase):

    """
        Tests of the enumeration and counting of transition trees.
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
        super(TestsTrees, self).__init__(*args, **kwargs)

        # Largest tree sizes, one array row per generation size
        self.known_sizes = numpy.array([[int(value) for value in line.split()] for line in LARGEST_TREES.strip().split("\n")])

    #############################################################################################################################################
    #                                                               PUBLIC METHODS                                                              #
    #############################################################################################################################################

    def test_known_sizes ( self: Self
                         ) ->    None:

        """
            This function tests the functions "b_max" and "b_star_max" on every known size, for z_l = 1..167 and s_max = 3, 4, 5.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Whole table at once
        table = complexity_table(167, [3, 4, 5])
        self.assertEqual(list(table["z"]), list(self.known_sizes[:, 0]))
        for column, s_max in enumerate([3, 4, 5]):
            self.assertEqual(list(table["b_max_%d" % s_max]), list(self.known_sizes[:, 1 + 2 * column]), msg="s_max=%d" % s_max)
            self.assertEqual(list(table["b_star_max_%d" % s_max]), list(self.known_sizes[:, 2 + 2 * column]), msg="s_max=%d" % s_max)

        # Single values, up to 50 and at 100 and 167
        for z_l in list(range(1, 51)) + [100, 167]:
            row = self.known_sizes[z_l - 1]
            for column, s_max in enumerate([3, 4, 5]):
                self.assertEqual(b_max(z_l, s_max), row[1 + 2 * column], msg="z_l=%d, s_max=%d" % (z_l, s_max))
                self.assertEqual(b_star_max(z_l, s_max), row[2 + 2 * column], msg="z_l=%d, s_max=%d" % (z_l, s_max))

    #############################################################################################################################################

    def test_one_child_at_most ( self: Self
                               ) ->    None:

        """
            This function checks the closed forms when individuals have 0 or 1 child: one configuration per reachable size.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # b(phi*, z') = 1 for z' <= phi*
        for z_l in range(1, 30):
            self.assertEqual(b_max(z_l, 1), 1)
            self.assertEqual(b_star_max(z_l, 1), z_l)
            self.assertEqual(count_b(z_l, z_l + 1, 1), 0)

    #############################################################################################################################################

    def test_enumeration_matches_counts ( self: Self
                                        ) ->    None:

        """
            This function checks that the enumerations have the sizes given by the counting recursion, and only valid elements.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Small grid
        for s_max in range(1, 5):
            for phi_star in range(0, 8):
                for z_next in range(0, s_max * phi_star + 2):
                    configurations = enumerate_fixed(phi_star, z_next, s_max)
                    self.assertEqual(len(configurations), count_b(phi_star, z_next, s_max))

                    # Constraints, order, no duplicates
                    for configuration in configurations:
                        self.assertEqual(len(configuration), s_max + 1)
                        self.assertEqual(configuration.progenitors, phi_star)
                        self.assertEqual(configuration.offspring, z_next)
                        self.assertTrue(all([count >= 0 for count in configuration]))
                    self.assertEqual([tuple(configuration) for configuration in configurations], sorted(set([tuple(configuration) for configuration in configurations])))

    #############################################################################################################################################

    def test_ranged_enumeration ( self: Self
                                ) ->    None:

        """
            This function tests the function "enumerate_ranged", with and without the configuration selecting nobody.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Sizes against the counts
        for s_max in range(1, 4):
            for z_l in range(1, 7):
                for z_next in range(0, s_max * z_l + 2):
                    configurations = enumerate_ranged(z_l, z_next, s_max)
                    self.assertEqual(len(configurations), count_b_star(z_l, z_next, s_max) + (1 if z_next == 0 else 0))
                    for phi_star, configuration in configurations:
                        self.assertEqual(configuration.progenitors, phi_star)
                        self.assertLessEqual(phi_star, z_l)

        # Nobody selected comes last
        configurations = enumerate_ranged(2, 0, 2)
        self.assertEqual([(phi_star, tuple(configuration)) for phi_star, configuration in configurations], [(1, (1, 0, 0)), (2, (2, 0, 0)), (0, (0, 0, 0))])

    #############################################################################################################################################

    def test_small_example ( self: Self
                           ) ->    None:

        """
            This function checks the tree with two progenitors and two children, and its multinomial coefficients.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Lexicographic order
        self.assertEqual([tuple(configuration) for configuration in enumerate_fixed(2, 2, 2)], [(0, 2, 0), (1, 0, 1)])

        # Materialized tree
        tree = transition_tree(2, 2, 2)
        self.assertEqual(len(tree), 2)
        self.assertEqual(tree.matrix.tolist(), [[0, 2, 0], [1, 0, 1]])
        self.assertAlmostEqual(math.exp(tree.log_multinomial[0]), 1.0, places=12)
        self.assertAlmostEqual(math.exp(tree.log_multinomial[1]), 2.0, places=12)

        # Memoized
        self.assertIs(transition_tree(2, 2, 2), tree)

    #############################################################################################################################################

    def test_impossible_trees ( self: Self
                              ) ->    None:

        """
            This function checks that trees are empty when too many children are asked for.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Too many children
        self.assertEqual(enumerate_fixed(2, 7, 3), [])
        self.assertEqual(count_b(2, 7, 3), 0)
        self.assertEqual(count_b_star(2, 7, 3), 0)
        self.assertEqual(len(transition_tree(2, 7, 3)), 0)

        # Nobody to produce children
        self.assertEqual(enumerate_fixed(0, 1, 3), [])
        self.assertEqual([tuple(configuration) for configuration in enumerate_fixed(0, 0, 3)], [(0, 0, 0, 0)])

    #############################################################################################################################################

    def test_complexity_table ( self: Self
                              ) ->    None:

        """
            This function tests the function "complexity_table" against the individual counts.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Table up to 60
        table = complexity_table(60, [3, 4])
        self.assertEqual(list(table.columns), ["z", "b_max_3", "b_star_max_3", "b_max_4", "b_star_max_4"])
        self.assertEqual(table.shape[0], 60)
        self.assertEqual(int(table.loc[table.z == 10, "b_max_3"].iloc[0]), 18)
        self.assertEqual(int(table.loc[table.z == 10, "b_star_max_3"].iloc[0]), 66)
        self.assertEqual(int(table.loc[table.z == 50, "b_star_max_3"].iloc[0]), 4801)
        for z_l in [1, 7, 33, 60]:
            self.assertEqual(int(table.loc[table.z == z_l, "b_max_4"].iloc[0]), b_max(z_l, 4))

        # Sizes never decrease with z_l
        self.assertTrue(numpy.all(numpy.diff(table["b_star_max_4"].to_numpy()) > 0))

    #############################################################################################################################################

    def test_growth_exponents ( self: Self
                              ) ->    None:

        """
            This function checks the growth orders of the tree sizes, which approach s_max - 1 and s_max from below.
            In:
                * self: Reference to the current object.
            Out:
                * None.
        """

        # Fits between 40 and 167
        slopes = {s_max: growth_exponents(list(range(40, 168)), s_max) for s_max in [3, 4, 5]}
        self.assertAlmostEqual(slopes[3][0], 1.95, delta=0.02)
        self.assertAlmostEqual(slopes[3][1], 2.91, delta=0.02)
        self.assertAlmostEqual(slopes[4][0], 2.91, delta=0.02)
        self.assertAlmostEqual(slopes[4][1], 3.86, delta=0.02)
        self.assertAlmostEqual(slopes[5][0], 3.86, delta=0.02)
        self.assertAlmostEqual(slopes[5][1], 4.80, delta=0.02)

        # Below the asymptotic orders on this range
        for s_max in [3, 4, 5]:
            self.assertLess(slopes[s_max][0], s_max - 1)
            self.assertLess(slopes[s_max][1], s_max)
            self.assertAlmostEqual(slopes[s_max][0], s_max - 1, delta=0.15)

#####################################################################################################################################################
######################################################################## GO! ########################################################################
#####################################################################################################################################################

if __name__ == "__main__":

    # Run all unit tests
    unittest.main(verbosity=2)

#####################################################################################################################################################
#####################################################################################################################################################
