# Tests of the explicit formula zero sum module.
#   Last Modified: Check that negative zero sums are refused.
#
import math
import mpmath
import numpy as np
import pytest
from dataclasses import replace

from unittest.mock import MagicMock

from ecdb import DataIntegrityError
import ecdb.zerosum as zs
from ecdb.lfunc import coeff_table
from ecdb.model import Curve
from ecdb.zerosum import ZeroSumResult


def independent_bound (c, delta, table, N):
  "Evaluate the zero sum term by term at 30 digits from the Frobenius traces."
  with mpmath.workdps(30):
    width = 2 * mpmath.pi * delta
    limit = math.ceil(math.exp(2 * math.pi * delta))
    total = -mpmath.euler + mpmath.log(mpmath.sqrt(N) / (2 * mpmath.pi))
    total += (mpmath.pi**2 / 6 - mpmath.polylog(2, mpmath.exp(-width))) / width
    for p, traces in table.traces.items():
      q = p
      for s in traces:
        if (q >= limit):
          break
        total += -s * mpmath.log(p) / q * (1 - mpmath.log(q) / width)
        q *= p
    return float(total / (delta * mpmath.pi))


def direct_digamma (delta):
  "Quadrature of (1/pi) Re int psi(1+it) sinc^2(delta t) dt over the real line."
  with mpmath.workdps(25):
    a = mpmath.pi * delta
    psi = lambda t: mpmath.re(mpmath.digamma(1 + 1j * t))
    head = mpmath.quad(lambda t: psi(t) * (mpmath.sin(a * t) / (a * t))**2 if t else psi(t),
                       mpmath.linspace(0, 1, 9))
    smooth = mpmath.quad(lambda t: psi(t) / (2 * (a * t)**2), [1, mpmath.inf])
    wave = mpmath.quadosc(lambda t: -psi(t) * mpmath.cos(2 * a * t) / (2 * (a * t)**2),
                          [1, mpmath.inf], omega=2 * a)
    return float(2 * (head + smooth + wave) / mpmath.pi)


class TestSpecialFunctions(object):

  def test_constants(self):
    assert zs.CONSTANTS.eta == pytest.approx(0.5772156649015329)
    assert zs.CONSTANTS.zeta10 == pytest.approx(1.0009945751278180)


  def test_sinc2(self):
    assert zs.sinc2(2.0, 0) == 1.0
    assert zs.sinc2(1.0, 1) == pytest.approx(0.0, abs=1e-30)
    assert zs.sinc2(1.0, 0.5) == pytest.approx(4 / math.pi**2)


  def test_fejer_fourier(self):
    assert zs.fejer_fourier(1.0, 0) == 1.0
    assert zs.fejer_fourier(2.0, 0) == 0.5
    assert zs.fejer_fourier(1.0, math.pi) == pytest.approx(0.5)
    assert zs.fejer_fourier(1.0, 2 * math.pi) == 0.0
    assert zs.fejer_fourier(1.0, -7.0) == 0.0


  @pytest.mark.parametrize('delta', [0.5, 1.0, 2.0])
  def test_fejer_fourier_inversion(self, delta):
    "The inverse transform of the triangle is the kernel itself."
    edge = 2 * math.pi * delta
    for i in range(100):
      x = -5 + i / 10
      inverse = mpmath.quad(lambda y: zs.fejer_fourier(delta, y) * mpmath.cos(x * y),
                            [-edge, 0, edge]) / (2 * math.pi)
      assert float(inverse) == pytest.approx(zs.sinc2(delta, x), abs=1e-6)


  def test_li2(self):
    assert zs.li2(0) == 0.0
    assert zs.li2(1) == pytest.approx(math.pi**2 / 6)
    assert zs.li2(0.5) == pytest.approx(math.pi**2 / 12 - math.log(2)**2 / 2)


  def test_digamma_term(self):
    assert zs.digamma_term(1.0) == pytest.approx(-0.100495, abs=1e-5)


  @pytest.mark.parametrize('delta', [0.5, 1.0, 2.0, 3.0])
  def test_digamma_term_quadrature(self, delta):
    assert zs.digamma_term(delta) == pytest.approx(direct_digamma(delta), abs=1e-8)


  def test_bad_delta(self):
    with pytest.raises(ValueError, match='must be positive'):
      zs.sinc2(0, 1)
    with pytest.raises(ValueError, match='must be positive'):
      zs.digamma_term(-1)
    with pytest.raises(ValueError, match='must be positive'):
      zs.coefficient_limit(0)


  def test_coefficient_limit(self):
    assert zs.coefficient_limit(1.0) == 536
    assert zs.coefficient_limit(2.0) == 286752


class TestZeroSum(object):

  def test_table_too_short(self):
    c = Curve(-1, 1)
    table = coeff_table(c, 100)
    with pytest.raises(ValueError, match='needs L = 536'):
      zs.zero_sum_bound(c, 1.0, table)
    with pytest.raises(ValueError, match='needs L = 536'):
      zs.zero_sum_terms(c, 1.0, table)


  def test_terms_total(self):
    c = Curve(-1, 1)
    table = coeff_table(c, zs.coefficient_limit(1.0))
    terms = zs.zero_sum_terms(c, 1.0, table)
    result = zs.zero_sum_bound(c, 1.0, table)
    assert terms.conductor == 92
    assert terms.delta == 1.0
    assert terms.digamma_term == zs.digamma_term(1.0)
    assert terms.total == pytest.approx(result.sum_value, abs=1e-12)
    assert all(n < 536 for n, _, _, _ in terms.rows)
    assert {n for n, _, _, _ in terms.rows} <= {n for n in range(2, 536) if table[n] != 0}


  def test_bound_delta_1(self):
    c = Curve(-1, 1)
    table = coeff_table(c, zs.coefficient_limit(1.0))
    result = zs.zero_sum_bound(c, 1.0, table, N=92)
    assert result.sum_value == pytest.approx(independent_bound(c, 1.0, table, 92), abs=1e-8)
    assert result.rank_ceiling == max(0, math.floor(result.sum_value + 1e-6))
    assert result.rank_ceiling >= 1
    assert result.conclusive


  @pytest.mark.parametrize('ainvs, N, lower', [((-1, 1), 92, 1), ((-1, -1), 368, 0)])
  def test_bound_delta_2(self, ainvs, N, lower):
    c = Curve(*ainvs)
    table = coeff_table(c, zs.coefficient_limit(2.0))
    result = zs.zero_sum_bound(c, 2.0, table)
    assert lower <= result.sum_value < lower + 1
    assert result.rank_ceiling == lower
    assert result.sum_value == pytest.approx(independent_bound(c, 2.0, table, N), abs=1e-8)


  def test_bound_longer_table(self):
    c = Curve(-1, 1)
    table = coeff_table(c, zs.coefficient_limit(1.0))
    longer = coeff_table(c, 4 * zs.coefficient_limit(1.0))
    assert zs.zero_sum_bound(c, 1.0, longer) == zs.zero_sum_bound(c, 1.0, table)


  def test_bound_negative(self):
    c = Curve(-1, 1)
    table = coeff_table(c, zs.coefficient_limit(1.0))
    wrong = replace(table, values=np.full_like(table.values, -5.0))
    with pytest.raises(DataIntegrityError, match='is negative'):
      zs.zero_sum_bound(c, 1.0, wrong, N=92)


  def test_bound_wrong_conductor(self):
    c = Curve(-1, -1)
    table = coeff_table(c, zs.coefficient_limit(0.25))
    assert zs.zero_sum_bound(c, 0.25, table, N=368).sum_value > 0
    with pytest.raises(DataIntegrityError, match='Check the conductor'):
      zs.zero_sum_bound(c, 0.25, table, N=1)


class TestEscalate(object):

  def test_schedule_checks(self):
    c = Curve(-1, 1)
    with pytest.raises(ValueError, match='must not be empty'):
      zs.escalate(c, 0, [])
    with pytest.raises(ValueError, match='strictly ascending'):
      zs.escalate(c, 0, [1.0, 1.0])
    with pytest.raises(ValueError, match='at most 3.9'):
      zs.escalate(c, 0, [1.0, 4.0])


  def swap_in (self, ceilings):
    saved = (zs.coeff_table, zs.zero_sum_bound, zs.conductor)
    zs.coeff_table = MagicMock()
    zs.conductor = MagicMock(return_value=92)
    zs.zero_sum_bound = MagicMock(side_effect=[
      ZeroSumResult(d, float(ceil) + 0.5, ceil) for d, ceil in ceilings])
    return saved


  def swap_out (self, saved):
    zs.coeff_table, zs.zero_sum_bound, zs.conductor = saved


  def test_escalate_stops_early(self):
    saved = self.swap_in([(1.0, 3), (1.5, 2), (2.0, 1)])
    try:
      result = zs.escalate(Curve(-1, 1), 1, [1.0, 1.5, 2.0, 2.5])
      assert result == ZeroSumResult(1.5, 2.5, 2)
      assert zs.zero_sum_bound.call_count == 2
      assert zs.coeff_table.call_args_list[1].args[1] == zs.coefficient_limit(1.5)
    finally:
      self.swap_out(saved)


  def test_escalate_without_parity(self):
    saved = self.swap_in([(1.0, 3), (1.5, 2), (2.0, 1)])
    try:
      result = zs.escalate(Curve(-1, 1), 1, [1.0, 1.5, 2.0], parity=False)
      assert result.rank_ceiling == 1
      assert result.conclusive
    finally:
      self.swap_out(saved)


  def test_escalate_exhausted(self):
    saved = self.swap_in([(1.0, 4), (1.5, 3)])
    try:
      result = zs.escalate(Curve(-1, 1), 0, [1.0, 1.5])
      assert result.rank_ceiling == 3
      assert result.delta == 1.5
      assert not result.conclusive
    finally:
      self.swap_out(saved)
