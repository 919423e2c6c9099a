# Tests of the Mordell-Weil group module.
#   Last Modified: Add canonical height tests on non-minimal short models.
#
import pytest
from fractions import Fraction

import ecdb.mordell as mw
from ecdb.model import Curve
from ecdb.mordell import INFINITY, RationalPoint, TorsionGroup


TORSION_FIXTURES = [
  ((-1, 0), 'Z/2ZxZ/2Z'),
  ((0, 4), 'Z/3Z'),
  ((0, 1), 'Z/6Z'),
  ((-2, 1), 'Z/4Z'),
  ((-432, 8208), 'Z/5Z'),
  ((-43, 166), 'Z/7Z'),
  ((-219, 1654), 'Z/9Z'),
  ((-351, 1890), 'Z/2ZxZ/4Z'),
  ((1, 0), 'Z/2Z'),
  ((-1, -1), 'trivial'),
  ((-13, 4), 'trivial'),
]


class TestGroupLaw(object):

  c = Curve(-1, 1)

  def test_rational_point(self):
    P = RationalPoint(1, 1)
    assert P.x == Fraction(1)
    assert str(P) == '(1,1)'
    assert str(INFINITY) == 'O'
    assert INFINITY.is_infinity
    with pytest.raises(ValueError, match='Both coordinates or neither'):
      RationalPoint(1, None)


  def test_add_points(self):
    P = RationalPoint(0, 1)
    Q = RationalPoint(1, 1)
    assert mw.add_points(self.c, P, Q) == RationalPoint(-1, -1)
    assert mw.add_points(self.c, P, INFINITY) == P
    assert mw.add_points(self.c, INFINITY, Q) == Q
    assert mw.add_points(self.c, P, mw.negate_point(P)) == INFINITY


  def test_multiply_point(self):
    P = RationalPoint(1, 1)
    double = mw.multiply_point(self.c, 2, P)
    assert mw.is_on_curve(self.c, double)
    assert double == mw.add_points(self.c, P, P)
    assert mw.multiply_point(self.c, 0, P) == INFINITY
    assert mw.multiply_point(self.c, -1, P) == mw.negate_point(P)
    assert mw.multiply_point(self.c, 5, P) == mw.add_points(self.c, double, mw.multiply_point(self.c, 3, P))


  def test_is_on_curve(self):
    assert mw.is_on_curve(self.c, RationalPoint(Fraction(1, 4), Fraction(7, 8)))
    assert not mw.is_on_curve(self.c, RationalPoint(2, 2))
    assert mw.is_on_curve(self.c, INFINITY)


  def test_point_order(self):
    c = Curve(0, 1)
    assert mw.point_order(c, INFINITY) == 1
    assert mw.point_order(c, RationalPoint(-1, 0)) == 2
    assert mw.point_order(c, RationalPoint(0, 1)) == 3
    assert mw.point_order(c, RationalPoint(2, 3)) == 6
    assert mw.point_order(self.c, RationalPoint(1, 1)) is None


class TestTorsion(object):

  @pytest.mark.parametrize('ainvs, structure', TORSION_FIXTURES)
  def test_torsion_subgroup(self, ainvs, structure):
    c = Curve(*ainvs)
    tg = mw.torsion_subgroup(c)
    assert tg.structure == structure
    assert tg.order == len(tg.points)
    assert tg.points[0] == INFINITY
    assert all(mw.is_on_curve(c, P) for P in tg.points)


  def test_torsion_generators(self):
    tg = mw.torsion_subgroup(Curve(-351, 1890))
    two, four = tg.generators
    c = Curve(-351, 1890)
    assert mw.point_order(c, two) == 2
    assert mw.point_order(c, four) == 4
    assert two not in {mw.multiply_point(c, k, four) for k in range(4)}


  def test_torsion_points_z6(self):
    points = set(mw.torsion_points(Curve(0, 1)))
    assert points == {INFINITY, RationalPoint(-1, 0), RationalPoint(0, 1), RationalPoint(0, -1),
                      RationalPoint(2, 3), RationalPoint(2, -3)}


  def test_torsion_group_bad(self):
    with pytest.raises(ValueError, match='must be one of'):
      TorsionGroup('Z/11Z', ())


  def test_structure_order(self):
    assert mw.structure_order('trivial') == 1
    assert mw.structure_order('Z/7Z') == 7
    assert mw.structure_order('Z/2ZxZ/8Z') == 16


  def test_torsion_order_bound(self):
    assert mw.torsion_order_bound(Curve(-432, 8208)) % 5 == 0
    assert mw.torsion_order_bound(Curve(-1, -1)) == 1


  def test_two_torsion_rank(self):
    assert mw.two_torsion_rank(Curve(-1, 0)) == 2
    assert mw.two_torsion_rank(Curve(0, 1)) == 1
    assert mw.two_torsion_rank(Curve(-1, 1)) == 0


class TestHeights(object):

  def test_canonical_height_level_37(self):
    # (0, 4) is the image of the generator (0, 0) of y^2 + y = x^3 - x
    h = mw.canonical_height(Curve(-16, 16), RationalPoint(0, 4))
    assert h == pytest.approx(0.0511114082399688, rel=1e-10)


  def test_canonical_height_torsion(self):
    c = Curve(0, 1)
    for P in mw.torsion_points(c):
      assert mw.canonical_height(c, P) == pytest.approx(0.0, abs=1e-10)


  def test_canonical_height_quadratic(self):
    c = Curve(-1, 1)
    P = RationalPoint(1, 1)
    h = mw.canonical_height(c, P)
    assert h > 0
    assert mw.canonical_height(c, mw.multiply_point(c, 2, P)) == pytest.approx(4 * h, rel=1e-9)
    assert mw.canonical_height(c, mw.multiply_point(c, 3, P)) == pytest.approx(9 * h, rel=1e-9)
    assert mw.canonical_height(c, mw.negate_point(P)) == pytest.approx(h, rel=1e-12)


  def test_canonical_height_off_curve(self):
    with pytest.raises(ValueError, match='is not on the curve'):
      mw.canonical_height(Curve(-1, 1), RationalPoint(2, 2))


  def test_height_pairing(self):
    c = Curve(-1, 1)
    P = RationalPoint(1, 1)
    heights = {}
    assert mw.height_pairing(c, P, P, heights) == pytest.approx(mw.canonical_height(c, P), rel=1e-9)
    assert heights


class TestRankBounds(object):

  def test_search_points(self):
    points = mw.search_points(Curve(-1, 1), 5, 2)
    for P in (RationalPoint(-1, 1), RationalPoint(0, 1), RationalPoint(1, 1), RationalPoint(3, 5),
              RationalPoint(5, 11), RationalPoint(Fraction(1, 4), Fraction(7, 8))):
      assert P in points
    assert all(P.y >= 0 for P in points)
    assert all(mw.is_on_curve(Curve(-1, 1), P) for P in points)
    assert RationalPoint(Fraction(1, 4), Fraction(7, 8)) not in mw.search_points(Curve(-1, 1), 5, 1)


  def test_search_points_bad(self):
    with pytest.raises(ValueError, match='at least 1'):
      mw.search_points(Curve(-1, 1), 0)


  @pytest.mark.parametrize('ainvs, rank', [((-1, -1), 0), ((-1, 1), 1), ((-4, 1), 2), ((-13, 4), 3)])
  def test_rank_lower_bound(self, ainvs, rank):
    c = Curve(*ainvs)
    basis = mw.rank_lower_bound(c, mw.search_points(c, 30, 2))
    assert basis.rank_lower == rank
    assert len(basis.points) == rank
    assert basis.regulator > 0


  def test_rank_lower_bound_ignores_torsion(self):
    c = Curve(0, 1)
    basis = mw.rank_lower_bound(c, mw.torsion_points(c))
    assert basis.rank_lower == 0
    assert basis.points == ()
