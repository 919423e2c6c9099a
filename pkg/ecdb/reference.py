#
# Published figures for the database of short Weierstrass curves ordered by naive
# height, used to line reports up against and as test fixtures.
#   Last Modified: Correct the Z/5Z and Z/2Z rank 0 record curves.
#

# Rank counts (ranks 0 to 6) of the curves of naive height at most X
RANK_DISTRIBUTION = {
  10**8: (722275, 1073502, 400769, 51258, 1551, 7, 0),
  10**9: (4930963, 7268430, 2706491, 384928, 16975, 137, 0),
  10**10: (33944219, 49473528, 18099044, 2727260, 153537, 2119, 1),
  2 * 10**10: (60667897, 88095239, 31992709, 4871438, 289954, 4654, 5),
  27 * 10**9: (78039852, 113128980, 40949307, 6259159, 380519, 6481, 12),
}

# Average rank of the curves of naive height at most X
AVERAGE_RANK = {
  10**8: 0.904724540,
  10**9: 0.908338779,
  10**10: 0.904965606,
  2 * 10**10: 0.902949521,
  27 * 10**9: 0.901975777,
}

# Samples of 100000 curves with naive height in [10^k, 2*10^k):
# rank counts (ranks 0 to 5) and the average rank
SAMPLE_RANKS = {
  11: ((33318, 47547, 16422, 2495, 213, 5), 0.88753),
  12: ((34018, 47470, 15801, 2483, 219, 9), 0.87442),
  13: ((34481, 47665, 15357, 2298, 192, 7), 0.86076),
  14: ((35000, 47991, 14647, 2180, 178, 4), 0.84557),
  15: ((35941, 47856, 14029, 1994, 174, 6), 0.82622),
  16: ((36407, 48105, 13442, 1885, 155, 6), 0.81294),
}

# The same samples: 2-Selmer rank counts (0 to 5) and the average 2-Selmer group size
SAMPLE_SELMER = {
  11: ((23058, 44020, 26363, 6015, 532, 12), 2.73566),
  12: ((22829, 43541, 26608, 6392, 605, 25), 2.77959),
  13: ((22231, 43257, 27069, 6692, 729, 22), 2.82925),
  14: ((21973, 43177, 27073, 6968, 777, 32), 2.85819),
  15: ((22162, 42750, 27193, 7077, 786, 32), 2.86650),
  16: ((21613, 42631, 27553, 7329, 836, 38), 2.90311),
}

# Curves of least naive height for a torsion structure and rank:
# (torsion, rank, a4, a6, naive height, conductor)
MINIMAL_HEIGHT_RECORDS = [
  ('trivial', 0, -1, -1, 27, 368),
  ('trivial', 1, -1, 1, 27, 92),
  ('trivial', 1, 1, -1, 27, 248),
  ('trivial', 1, 1, 1, 27, 496),
  ('trivial', 2, -4, 1, 256, 916),
  ('trivial', 3, -13, 4, 8788, 66848),
  ('trivial', 4, -19, 151, 615627, 4705528),
  ('trivial', 5, -217, 1585, 67830075, 107827292),
  ('trivial', 6, -1126, 6796, 5710513504, 35708014976),
  ('Z/2Z', 0, 1, 0, 4, 64),
  ('Z/2Z', 1, -2, 0, 32, 256),
  ('Z/2Z', 2, 7, 8, 1728, 4960),
  ('Z/2Z', 3, -82, 0, 2205472, 430336),
  ('Z/2Z', 4, 1030, 6396, 4370908000, 76983424),
  ('Z/3Z', 0, 0, 4, 432, 108),
  ('Z/3Z', 1, 0, 9, 2187, 972),
  ('Z/3Z', 2, 0, 225, 1366875, 24300),
  ('Z/4Z', 0, -2, 1, 32, 40),
  ('Z/4Z', 1, -2, 21, 11907, 760),
  ('Z/4Z', 2, -191, -510, 27871484, 7832),
  ('Z/5Z', 0, -432, 8208, 1819024128, 11),
  ('Z/6Z', 0, 0, 1, 27, 36),
  ('Z/6Z', 1, -348, 2497, 168576768, 1260),
  ('Z/7Z', 0, -43, 166, 744012, 26),
  ('Z/9Z', 0, -219, 1654, 73864332, 54),
  ('Z/2ZxZ/2Z', 0, -1, 0, 4, 32),
  ('Z/2ZxZ/2Z', 1, -21, -20, 37044, 288),
  ('Z/2ZxZ/2Z', 2, -73, 72, 1556068, 19040),
  ('Z/2ZxZ/4Z', 0, -351, 1890, 172974204, 24),
]

# Curves of uncalibrated height at most 10^9 by torsion structure:
# count and average rank (None where no curve occurs)
TORSION_COUNTS_UNCALIBRATED = {
  'trivial': (126303317, 0.894838),
  'Z/2Z': (122574, 0.7832),
  'Z/3Z': (760, 0.59079),
  'Z/4Z': (188, 0.48936),
  'Z/5Z': (1, 0.0),
  'Z/6Z': (16, 0.125),
  'Z/7Z': (1, 0.0),
  'Z/8Z': (0, None),
  'Z/9Z': (1, 0.0),
  'Z/10Z': (0, None),
  'Z/12Z': (0, None),
  'Z/2ZxZ/2Z': (549, 0.56466),
  'Z/2ZxZ/4Z': (1, 0.0),
  'Z/2ZxZ/6Z': (0, None),
  'Z/2ZxZ/8Z': (0, None),
}
TORSION_COUNTS_HEIGHT = 10**9

# Whole database (naive height at most 2.7 * 10^10)
POSITIVE_DISCRIMINANT_FRACTION = 0.19994
RANK_SIGN_CORRELATION = 0.03856
AVERAGE_RANK_POSITIVE_DISCRIMINANT = 0.961245
AVERAGE_RANK_NEGATIVE_DISCRIMINANT = 0.88694
RANK2_COUNT_CONSTANT = 0.0686          # rank 2 count over X^(19/24) (ln X)^(3/8)

# Marked point family: classes of height at most 10^8
F1_CLASS_COUNT = 3594891
F1_HEIGHT = 10**8
F1_CLASSES_IN_MAIN = 693601            # of those, classes with naive height at most 2.7 * 10^10
