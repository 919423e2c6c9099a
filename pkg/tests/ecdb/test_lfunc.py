# Tests of the L-series coefficient module.
#   Last Modified: Add Frobenius trace tests for bad primes.
#
import math
import pytest

import ecdb.lfunc as lfunc
from ecdb.model import Curve

C11 = Curve(-432, 8208)                # conductor 11
C37 = Curve(-16, 16)                   # conductor 37

# a_1 .. a_13 of the weight two newform of level 11
Q_EXPANSION_11 = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4]


class TestLfunc(object):

  @pytest.mark.parametrize('p, expected', [(2, -2), (3, -1), (5, 1), (7, -2), (11, 1), (13, 4),
                                           (17, -2), (19, 0), (23, -1)])
  def test_ap_level_11(self, p, expected):
    assert lfunc.ap(C11, p) == expected


  @pytest.mark.parametrize('p, expected', [(2, -2), (3, -3), (5, -2), (7, -1), (11, -5),
                                           (13, -2), (37, -1)])
  def test_ap_level_37(self, p, expected):
    assert lfunc.ap(C37, p) == expected


  def test_ap_additive(self):
    assert lfunc.ap(Curve(0, 1), 2) == 0
    assert lfunc.ap(Curve(0, 1), 3) == 0


  def test_ap_powers(self):
    assert lfunc.ap_powers(C11, 2, 3) == [1, -2, 2, 0]
    assert lfunc.ap_powers(C11, 11, 3) == [1, 1, 1, 1]
    assert lfunc.ap_powers(C37, 37, 2) == [1, -1, 1]
    assert lfunc.ap_powers(Curve(0, 1), 3, 2) == [1, 0, 0]
    with pytest.raises(ValueError, match='at least 1'):
      lfunc.ap_powers(C11, 2, 0)


  def test_count_points_mod_p(self):
    for p in (5, 7, 13, 101, 997):
      n = lfunc.count_points_mod_p(C37, p)
      assert n == p + 1 - lfunc.ap(C37, p)
      assert (p + 1 - n)**2 <= 4 * p


  def test_count_points_small_primes(self):
    assert lfunc.count_points_mod_p(C11, 2) == 5
    assert lfunc.count_points_mod_p(C11, 3) == 5


  def test_count_points_weierstrass(self):
    # y^2 + y = x^3 - x^2 mod 5 has 5 affine points plus infinity
    assert lfunc.count_points_weierstrass((0, -1, 1, 0, 0), 5) == 5


  def test_count_points_bsgs(self):
    for p in (10007, 10009, 100003):
      assert lfunc.count_points_bsgs(-1, 1, p) == lfunc.count_points_character_sum(-1, 1, p)


  def test_count_points_large_prime(self):
    p = 10007
    n = lfunc.count_points_mod_p(Curve(-13, 4), p)
    assert n == lfunc.count_points_character_sum(-13, 4, p)


  def test_frobenius_traces(self):
    s = lfunc.frobenius_traces(C11, 2, 3)
    assert s[0] == -2
    assert s[1] == (-2)**2 - 2 * 2
    assert s[2] == (-2) * s[1] - 2 * s[0]
    assert lfunc.frobenius_traces(C37, 37, 3) == [-1, 1, -1]


  def test_frobenius_traces_extension_count(self):
    # s_2 = p^2 + 1 - #E(F_{p^2}) = a_p^2 - 2p; a_{p^2} = a_p^2 - p
    p = 7
    a = lfunc.ap(C37, p)
    assert lfunc.frobenius_traces(C37, p, 2)[1] == a * a - 2 * p
    assert lfunc.ap_powers(C37, p, 2)[2] == a * a - p


  def test_hecke_coefficients(self):
    assert lfunc.hecke_coefficients(C11, 13)[1:] == Q_EXPANSION_11
    assert lfunc.hecke_coefficients(C11, 13)[0] == 0
    with pytest.raises(ValueError, match='must be positive'):
      lfunc.hecke_coefficients(C11, 0)


  def test_coeff_table(self):
    table = lfunc.coeff_table(C11, 100)
    assert table.limit == 100
    assert len(table.values) == 100
    assert table[2] == pytest.approx(2 * math.log(2) / 2)
    assert table[4] == pytest.approx(0.0)                     # s_2 = 4 - 4 = 0
    assert table[8] == pytest.approx(-(-2 * 0 - 2 * -2) * math.log(2) / 8)
    assert table[6] == 0.0
    assert table[11] == pytest.approx(-math.log(11) / 11)
    assert table[97] == pytest.approx(-lfunc.ap(C11, 97) * math.log(97) / 97)
    assert table.ap[13] == 4
    assert table.traces[3] == lfunc.frobenius_traces(C11, 3, 4)


  def test_coeff_table_bad(self):
    with pytest.raises(ValueError, match='at least 2'):
      lfunc.coeff_table(C11, 1)
    with pytest.raises(ValueError, match='is singular'):
      lfunc.coeff_table(Curve(0, 0), 10)
