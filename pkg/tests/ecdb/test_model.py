# Tests of the curve model module.
#   Last Modified: Add marked point family conversions.
#
import pytest
from fractions import Fraction

import ecdb.model as model
from ecdb.model import Curve, F1Curve, HeightKind


class TestModel(object):

  def test_check_nonsingular(self):
    model.check_nonsingular(Curve(-1, 0))
    with pytest.raises(ValueError, match='is singular'):
      model.check_nonsingular(Curve(-3, 2))
    with pytest.raises(ValueError, match='is singular'):
      model.check_nonsingular(Curve(0, 0))


  def test_cm(self):
    assert model.cm_discriminant(Curve(0, 1)) == -3          # j = 0
    assert model.cm_discriminant(Curve(1, 0)) == -4          # j = 1728
    assert model.cm_discriminant(Curve(-1, -1)) is None
    assert model.is_cm(Curve(-1, 0))
    assert not model.is_cm(Curve(-13, 4))


  def test_discriminant(self):
    assert model.discriminant(Curve(-1, 0)) == 64
    assert model.discriminant(Curve(0, 1)) == -432
    assert model.discriminant(Curve(-1, 1)) == -368


  def test_f1_to_short(self):
    source = F1Curve(0, 1, 0)                                 # y^2 + y = x^3
    short = model.f1_to_short(source)
    assert short.curve == Curve(0, 16)
    assert short.scale == Fraction(2**12)
    assert model.discriminant(short.curve) == model.discriminant_f1(source) * short.scale


  def test_f1_to_short_minus_x(self):
    short = model.f1_to_short(F1Curve(0, 1, -1))              # y^2 + y = x^3 - x
    assert short.curve == Curve(-16, 16)


  def test_f1_to_short_singular(self):
    with pytest.raises(ValueError, match='is singular'):
      model.f1_to_short(F1Curve(0, 0, 0))


  def test_height(self):
    c = Curve(-13, 4)
    assert model.height(c, HeightKind.NAIVE) == 8788
    assert model.height(c, 'uncalibrated') == 2197
    assert model.height_naive(Curve(-1, -1)) == 27
    assert model.height_uncalibrated(Curve(-2, 1)) == 8
    assert model.height(F1Curve(1, -1, 0), HeightKind.F1) == 1
    assert model.height_f1(F1Curve(0, 2, -3)) == 27


  def test_is_minimal(self):
    assert model.is_minimal(Curve(1, 1))
    assert not model.is_minimal(Curve(16, 64))
    assert not model.is_minimal(Curve(0, 64))
    assert model.is_minimal(Curve(16, 32))
    assert model.is_minimal(Curve(0, 0))


  def test_is_minimal_f1(self):
    assert model.is_minimal_f1(F1Curve(0, 1, 0))
    assert not model.is_minimal_f1(F1Curve(4, 8, 16))
    assert model.is_minimal_f1(F1Curve(4, 8, 8))


  def test_j_invariant(self):
    assert model.j_invariant(Curve(0, 1)) == 0
    assert model.j_invariant(Curve(1, 0)) == 1728
    assert model.j_invariant(Curve(-1, -1)) == Fraction(-6912, 23)


  def test_reduce_to_minimal(self):
    assert model.reduce_to_minimal(Curve(16, 64)) == Curve(1, 1)
    assert model.reduction_scale(Curve(16, 64)) == 2
    assert model.reduce_to_minimal(Curve(81 * 16, 729 * 64)) == Curve(1, 1)
    assert model.reduction_scale(Curve(81 * 16, 729 * 64)) == 6
    assert model.reduction_scale(Curve(-1, 1)) == 1


  def test_str(self):
    assert str(Curve(-1, 1)) == '[-1,1]'
    assert str(F1Curve(1, 2, 3)) == '[0,1,2,3,0]'
