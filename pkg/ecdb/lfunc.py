#
# Module to count points mod p and build the Dirichlet coefficient sequences of the
# L-function: a_p, a_{p^e}, Frobenius traces, and the zero sum coefficients c_n.
#   Last Modified: Count large primes by baby-step giant-step in the Hasse interval.
#
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from sympy import factorint, sqrt_mod

from config.settings import BSGS_THRESHOLD
from ecdb.arith import primes_up_to
from ecdb.local import Reduction, local_data
from ecdb.model import check_nonsingular, discriminant

logger = logging.getLogger(__name__)

BSGS_POINTS = 20                       # points tried before falling back to the character sum


@dataclass(frozen=True)
class CoeffTable:
  """
  The coefficients c_n, n < limit, of the zero sum: c_{p^e} = -s_e log(p) / p^e where
  s_e = p^e + 1 - #E(F_{p^e}) is the Frobenius trace, and c_n = 0 off prime powers.
  traces maps each prime p < limit to [s_1, ..., s_emax]; ap maps p to a_p.
  """
  curve: object
  limit: int
  values: np.ndarray = field(repr=False)
  traces: dict = field(repr=False)
  ap: dict = field(repr=False)

  def __getitem__ (self, n):
    return float(self.values[n])


def ap (c, p):
  "Return a_p = p + 1 - #E(F_p), read from the reduction type at bad primes."
  ld = _bad_reduction(c, p)
  if (ld is None):
    return p + 1 - count_points_mod_p(c, p)
  if (ld.reduction == Reduction.GOOD):
    return p + 1 - count_points_weierstrass(ld.min_ainvs, p)
  return _bad_ap(ld.reduction)


def ap_powers (c, p, emax):
  """
  Return [a_1, a_p, a_{p^2}, ..., a_{p^emax}] (element e is a_{p^e}) of the L-series:
  a_{p^e} = a_p a_{p^(e-1)} - p a_{p^(e-2)} for good p, (a_p)^e for multiplicative p,
  and 0 for additive p.
  """
  if (emax < 1):
    raise ValueError(f"Largest exponent must be at least 1, got {emax}.")
  a = ap(c, p)
  powers = [1, a]
  good = _is_good(c, p)
  for _ in range(2, emax + 1):
    if (good):
      powers.append(a * powers[-1] - p * powers[-2])
    else:
      powers.append(a * powers[-1])
  return powers


def coeff_table (c, limit):
  "Return the CoeffTable of all c_n with n < limit."
  if (limit < 2):
    raise ValueError(f"Coefficient limit must be at least 2, got {limit}.")
  check_nonsingular(c)
  values = np.zeros(limit, dtype=np.float64)
  traces = {}
  aps = {}
  for p in primes_up_to(limit - 1):
    emax = _max_exponent(p, limit - 1)
    s = frobenius_traces(c, p, emax)
    traces[p] = s
    aps[p] = s[0]
    logp = math.log(p)
    q = p
    for e in range(1, emax + 1):
      values[q] = -s[e - 1] * logp / q
      q *= p
  logger.debug(f"Coefficient table of {c} up to {limit}: {len(traces)} primes.")
  return CoeffTable(curve=c, limit=limit, values=values, traces=traces, ap=aps)


def count_points_mod_p (c, p):
  """
  Return #E(F_p), including the point at infinity, for the reduction of the local minimal
  model at p. Primes below BSGS_THRESHOLD are counted by a character sum, larger good
  primes by baby-step giant-step.
  """
  ld = _bad_reduction(c, p)
  if (ld is not None):
    if (ld.reduction == Reduction.GOOD):
      return count_points_weierstrass(ld.min_ainvs, p)
    return p + 1 - _bad_ap(ld.reduction)
  if (p < 5):
    return count_points_weierstrass((0, 0, 0, c.a4, c.a6), p)
  if (p < BSGS_THRESHOLD):
    n = count_points_character_sum(c.a4, c.a6, p)
  else:
    n = count_points_bsgs(c.a4, c.a6, p)
  if ((p + 1 - n)**2 > 4 * p):
    raise RuntimeError(f"Point count {n} of {c} mod {p} violates the Hasse bound.")
  return n


def count_points_bsgs (a4, a6, p):
  """
  Count the points of the good reduction y^2 = x^3 + a4 x + a6 mod p (p > 3) by
  baby-step giant-step: the least common multiple of the orders of a few points
  is raised until exactly one of its multiples lies in the Hasse interval.
  """
  a4 %= p
  a6 %= p
  width = math.isqrt(4 * p)
  low = p + 1 - width
  high = p + 1 + width
  order_lcm = 1
  for P in _points_mod_p(a4, a6, p, BSGS_POINTS):
    order_lcm = math.lcm(order_lcm, _point_order(P, a4, p, low, high))
    first = -(-low // order_lcm) * order_lcm
    if (first + order_lcm > high):
      return first
  logger.debug(f"BSGS did not isolate the group order mod {p}; counting directly.")
  return count_points_character_sum(a4, a6, p)


def count_points_character_sum (a4, a6, p):
  "Count the points of y^2 = x^3 + a4 x + a6 mod an odd prime p with a table of square roots."
  xs = np.arange(p, dtype=np.int64)
  roots = np.bincount((xs * xs) % p, minlength=p)
  rhs = ((xs * xs % p) * xs + (a4 % p) * xs + (a6 % p)) % p
  return 1 + int(roots[rhs].sum())


def count_points_weierstrass (ainvs, p):
  "Count the points of a general Weierstrass model mod a small prime p, singular ones included."
  a1, a2, a3, a4, a6 = ainvs
  count = 1
  for x in range(p):
    for y in range(p):
      if ((y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p == 0):
        count += 1
  return count


def frobenius_traces (c, p, emax):
  """
  Return [s_1, ..., s_emax] with s_e = p^e + 1 - #E(F_{p^e}): for good p the power sums
  s_e = a_p s_{e-1} - p s_{e-2} (s_0 = 2), for bad p the value (a_p)^e.
  """
  if (emax < 1):
    raise ValueError(f"Largest exponent must be at least 1, got {emax}.")
  a = ap(c, p)
  if (not _is_good(c, p)):
    return [a**e for e in range(1, emax + 1)]
  traces = [2, a]
  for _ in range(2, emax + 1):
    traces.append(a * traces[-1] - p * traces[-2])
  return traces[1:]


def hecke_coefficients (c, limit):
  "Return the list [0, a_1, ..., a_limit] of L-series coefficients, multiplicative in n."
  if (limit < 1):
    raise ValueError(f"Coefficient limit must be positive, got {limit}.")
  least = _least_prime_factors(limit)
  powers = {}
  for p in primes_up_to(limit):
    powers[p] = ap_powers(c, p, _max_exponent(p, limit))
  coeffs = [0] * (limit + 1)
  coeffs[1] = 1
  for n in range(2, limit + 1):
    p = int(least[n])
    m = n
    e = 0
    while (m % p == 0):
      m //= p
      e += 1
    coeffs[n] = powers[p][e] * coeffs[m]
  return coeffs


def _bad_ap (reduction):
  if (reduction == Reduction.SPLIT):
    return 1
  if (reduction == Reduction.NONSPLIT):
    return -1
  return 0


def _bad_reduction (c, p):
  "LocalData of p if p divides the discriminant of the short model, else None."
  if (discriminant(c) % p != 0):
    return None
  for ld in local_data(c):
    if (ld.p == p):
      return ld
  return None


def _ec_add (P, Q, a4, p):
  "Add affine points mod p; None is the point at infinity."
  if (P is None):
    return Q
  if (Q is None):
    return P
  x1, y1 = P
  x2, y2 = Q
  if (x1 == x2):
    if ((y1 + y2) % p == 0):
      return None
    slope = (3 * x1 * x1 + a4) * pow(2 * y1, -1, p) % p
  else:
    slope = (y2 - y1) * pow(x2 - x1, -1, p) % p
  x3 = (slope * slope - x1 - x2) % p
  return (x3, (slope * (x1 - x3) - y1) % p)


def _ec_mul (k, P, a4, p):
  result = None
  while (k > 0):
    if (k & 1):
      result = _ec_add(result, P, a4, p)
    P = _ec_add(P, P, a4, p)
    k >>= 1
  return result


def _is_good (c, p):
  ld = _bad_reduction(c, p)
  return (ld is None) or (ld.reduction == Reduction.GOOD)


def _least_prime_factors (limit):
  least = np.zeros(limit + 1, dtype=np.int64)
  for p in primes_up_to(math.isqrt(limit)):
    multiples = least[p * p::p]
    multiples[multiples == 0] = p
  unset = np.nonzero(least == 0)[0]
  least[unset] = unset                 # primes are their own least factor
  return least


def _max_exponent (p, limit):
  "Largest e with p^e <= limit."
  e = 0
  q = p
  while (q <= limit):
    e += 1
    q *= p
  return e


def _point_order (P, a4, p, low, high):
  """
  Return the order of P, found from a multiple N of it in the Hasse interval [low, high]
  by baby steps j P and giant steps (low + i m) P.
  """
  m = math.isqrt(high - low) + 1
  baby = {}
  step = None
  for j in range(m):
    key = None if (step is None) else (step[0], (-step[1]) % p)
    baby.setdefault(key, j)
    step = _ec_add(step, P, a4, p)
  giant = _ec_mul(m, P, a4, p)
  R = _ec_mul(low, P, a4, p)
  for i in range(m + 1):
    if (R in baby):
      multiple = low + i * m + baby[R]
      return _reduce_order(multiple, P, a4, p)
    R = _ec_add(R, giant, a4, p)
  raise RuntimeError(f"No multiple of the point order mod {p} found in the Hasse interval.")


def _points_mod_p (a4, a6, p, limit):
  "Generator of up to limit affine points with consecutive x coordinates."
  found = 0
  for x in range(p):
    rhs = (x * x * x + a4 * x + a6) % p
    if ((rhs == 0) or (pow(rhs, (p - 1) // 2, p) != 1)):
      continue
    yield (x, int(sqrt_mod(rhs, p)))
    found += 1
    if (found >= limit):
      return


def _reduce_order (multiple, P, a4, p):
  order = multiple
  for q in factorint(multiple):
    while ((order % q == 0) and (_ec_mul(order // q, P, a4, p) is None)):
      order //= q
  return order
