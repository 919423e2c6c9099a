#
# Module for the explicit formula zero sum with the Fejer kernel: its special
# functions and the resulting GRH conditional upper bound on the analytic rank.
#   Last Modified: Refuse negative zero sums.
#
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from config.settings import DELTA_SCHEDULE, MAX_DELTA, ZERO_SUM_SLACK
from ecdb import DataIntegrityError
from ecdb.lfunc import coeff_table
from ecdb.local import conductor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpecialConstants:
  eta: float = float(mpmath.euler)     # Euler-Mascheroni
  pi: float = math.pi
  zeta10: float = math.pi**10 / 93555


CONSTANTS = SpecialConstants()


@dataclass(frozen=True)
class ZeroSumResult:
  """
  The sum over the zeros of sinc^2(delta * gamma) and the integer ceiling it implies for
  the analytic rank. conclusive is False when an escalation ran out of kernel widths.
  """
  delta: float
  sum_value: float
  rank_ceiling: int
  conclusive: bool = True


@dataclass(frozen=True)
class ZeroSumTerms:
  "The pieces of one zero sum: constant terms and the per n contributions (n, c_n, weight, term)."
  delta: float
  conductor: int
  conductor_term: float
  digamma_term: float
  rows: list

  @property
  def total (self):
    return math.fsum([self.conductor_term, self.digamma_term] + [row[3] for row in self.rows])


def coefficient_limit (delta):
  "Return the table size ceil(e^(2 pi delta)) the zero sum at delta needs."
  _check_delta(delta)
  return math.ceil(math.exp(2 * math.pi * delta))


def digamma_term (delta):
  """
  Closed form of the digamma integral of the Fejer kernel:
  -eta/(pi delta) + (pi^2/6 - Li2(e^(-2 pi delta))) / (2 pi^2 delta^2).
  """
  _check_delta(delta)
  return (-CONSTANTS.eta / (math.pi * delta)
          + (math.pi**2 / 6 - li2(math.exp(-2 * math.pi * delta))) / (2 * math.pi**2 * delta**2))


def escalate (c, lower, schedule=DELTA_SCHEDULE, parity=True):
  """
  Evaluate zero_sum_bound along the ascending schedule of kernel widths, stopping at the
  first width whose rank ceiling is at most lower + 1 (lower when parity is unavailable).
  Returns the last result, marked inconclusive if the schedule was exhausted.
  """
  schedule = [float(d) for d in schedule]
  if (not schedule):
    raise ValueError("Kernel width schedule must not be empty.")
  if (any(b <= a for a, b in zip(schedule, schedule[1:]))):
    raise ValueError(f"Kernel width schedule must be strictly ascending, got {schedule}.")
  if (schedule[-1] > MAX_DELTA):
    raise ValueError(f"Kernel width must be at most {MAX_DELTA}, got {schedule[-1]}.")
  target = lower + 1 if parity else lower
  N = conductor(c)
  result = None
  for delta in schedule:
    table = coeff_table(c, coefficient_limit(delta))
    result = zero_sum_bound(c, delta, table, N=N)
    logger.debug(f"Zero sum of {c} at delta {delta}: {result.sum_value:.6f}.")
    if (result.rank_ceiling <= target):
      return result
  return ZeroSumResult(result.delta, result.sum_value, result.rank_ceiling, conclusive=False)


def fejer_fourier (delta, y):
  "Fourier transform of sinc^2(delta x): the triangle (1/delta)(1 - |y|/(2 pi delta)) on |y| <= 2 pi delta."
  _check_delta(delta)
  edge = 2 * math.pi * delta
  if (abs(y) >= edge):
    return 0.0
  return (1 - abs(y) / edge) / delta


def li2 (x):
  "Float valued dilogarithm."
  return float(mpmath.polylog(2, x))


def sinc2 (delta, x):
  "Return (sin(pi delta x) / (pi delta x))^2, equal to 1 at x = 0."
  _check_delta(delta)
  if (x == 0):
    return 1.0
  arg = math.pi * delta * x
  return (math.sin(arg) / arg)**2


def zero_sum_bound (c, delta, coeffs, N=None):
  """
  Return the ZeroSumResult of
    (1/(delta pi)) [ -eta + log(sqrt(N)/(2 pi)) + (pi^2/6 - Li2(e^(-2 pi delta)))/(2 pi delta)
                     + sum_{n < e^(2 pi delta)} c_n (1 - log(n)/(2 pi delta)) ]
  which bounds the analytic rank from above under GRH. Raises ValueError when the
  coefficient table is too short for the kernel width, and DataIntegrityError when the
  sum is negative (a sum of squares cannot be: the conductor or coefficients are wrong).
  """
  _check_delta(delta)
  required = coefficient_limit(delta)
  if (coeffs.limit < required):
    raise ValueError(f"Coefficient table of size {coeffs.limit} is too short: delta {delta} needs L = {required}.")
  if (N is None):
    N = conductor(c)
  width = 2 * math.pi * delta
  ns = np.arange(2, required, dtype=np.int64)
  cn = coeffs.values[2:required]
  nonzero = np.nonzero(cn)[0]
  terms = cn[nonzero] * (1 - np.log(ns[nonzero]) / width)
  bracket = math.fsum([
    -CONSTANTS.eta,
    math.log(math.sqrt(N) / (2 * math.pi)),
    (math.pi**2 / 6 - li2(math.exp(-width))) / width,
    math.fsum(terms.tolist()),
  ])
  value = bracket / (delta * math.pi)
  if (value < -ZERO_SUM_SLACK):
    raise DataIntegrityError(f"Zero sum of {c} at delta {delta} is negative: {value}. Check the conductor and coefficients.")
  return ZeroSumResult(delta, value, max(0, math.floor(value + ZERO_SUM_SLACK)))


def zero_sum_terms (c, delta, coeffs, N=None):
  "Return the ZeroSumTerms of the zero sum at delta, each piece already divided by delta pi."
  _check_delta(delta)
  required = coefficient_limit(delta)
  if (coeffs.limit < required):
    raise ValueError(f"Coefficient table of size {coeffs.limit} is too short: delta {delta} needs L = {required}.")
  if (N is None):
    N = conductor(c)
  width = 2 * math.pi * delta
  scale = 1 / (delta * math.pi)
  rows = []
  for n in range(2, required):
    c_n = coeffs[n]
    if (c_n != 0):
      weight = 1 - math.log(n) / width
      rows.append((n, c_n, weight, scale * c_n * weight))
  return ZeroSumTerms(
    delta=delta,
    conductor=N,
    conductor_term=scale * math.log(math.sqrt(N) / (2 * math.pi)),
    digamma_term=digamma_term(delta),
    rows=rows)


def _check_delta (delta):
  if (delta <= 0):
    raise ValueError(f"Kernel width delta must be positive, got {delta}.")
