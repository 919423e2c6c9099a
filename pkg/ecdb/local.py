#
# Module for local reduction data: Tate's algorithm, conductors, Tamagawa numbers,
# and the global root number (from local formulas or from the functional equation).
#   Last Modified: Recompute the b-invariants after moving the singular point.
#
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import mpmath

from config.settings import ROOT_NUMBER_DIGITS, ROOT_NUMBER_MAX_TERMS
from ecdb.arith import count_roots_mod_p, factorize, has_root_mod_p, is_prime, legendre, valuation
from ecdb.model import check_nonsingular, discriminant, j_invariant

logger = logging.getLogger(__name__)

SEPARATION = 100                       # wrong sign residual must exceed the tolerance this many times
THETA_POINTS = ['1.1', '1.2', '1.3']   # evaluation points y of the theta reflection g(1/y) = w y^2 g(y)


class Reduction(str, Enum):
  GOOD = 'good'
  SPLIT = 'multiplicative-split'
  NONSPLIT = 'multiplicative-nonsplit'
  ADDITIVE = 'additive'


class RootNumberMethod(str, Enum):
  LOCAL = 'local-formulas'
  NUMERIC = 'numeric-functional-equation'
  UNAVAILABLE = 'unavailable'


@dataclass(frozen=True)
class LocalData:
  """
  Reduction data of a curve at the prime p, computed on its local minimal model.
  min_ainvs are the a-invariants (a1, a2, a3, a4, a6) of that model and transform the
  (u, r, s, t) with x = u^2 x' + r, y = u^3 y' + u^2 s x' + t taking the short model to it.
  """
  p: int
  kodaira: str
  f_p: int
  c_p: int
  reduction: Reduction
  min_ainvs: tuple
  transform: tuple
  disc_valuation: int


@dataclass(frozen=True)
class RootNumber:
  value: int                           # +1, -1, or None when unknown
  method: RootNumberMethod

  def __post_init__ (self):
    if ((self.value is None) != (self.method == RootNumberMethod.UNAVAILABLE)):
      raise ValueError("A root number is unknown exactly when its method is unavailable.")

  @property
  def known (self):
    return self.value is not None


def ainvs_invariants (ainvs):
  "Return (b2, b4, b6, b8, c4, c6, discriminant) of the general Weierstrass model."
  a1, a2, a3, a4, a6 = ainvs
  b2 = a1 * a1 + 4 * a2
  b4 = 2 * a4 + a1 * a3
  b6 = a3 * a3 + 4 * a6
  b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
  c4 = b2 * b2 - 24 * b4
  c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
  disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
  return (b2, b4, b6, b8, c4, c6, disc)


def bad_primes (c):
  "Return the primes dividing the discriminant of the short model."
  return [p for p, _ in factorize(discriminant(c))]


def conductor (c):
  "Return the conductor: the product of p^f_p over the primes dividing the discriminant."
  n = 1
  for ld in local_data(c):
    n *= ld.p**ld.f_p
  return n


def local_data (c):
  "Return the LocalData of every prime dividing the discriminant, in ascending order."
  return _local_data(c)


def root_number (c, numeric=True, precision=ROOT_NUMBER_DIGITS):
  """
  Return the global root number w = -prod(w_p) from the reduction types: w_p = +1 for
  good and nonsplit multiplicative primes, -1 for split ones, and the potentially good /
  potentially multiplicative classification for additive p >= 5. Additive reduction at
  2 or 3 falls back to root_number_numeric, or gives an unknown value when numeric is off.
  """
  check_nonsingular(c)
  sign = -1
  for ld in local_data(c):
    w_p = _local_root_number(c, ld)
    if (w_p is None):
      if (numeric):
        return root_number_numeric(c, precision=precision)
      return RootNumber(None, RootNumberMethod.UNAVAILABLE)
    sign *= w_p
  return RootNumber(sign, RootNumberMethod.LOCAL)


def root_number_numeric (c, precision=ROOT_NUMBER_DIGITS, max_terms=ROOT_NUMBER_MAX_TERMS):
  """
  Determine the root number from the reflection g(1/y) = w y^2 g(y) of the theta series
  g(y) = sum a_n exp(-2 pi n y / sqrt(N)), tested at a few points y > 1 with the given
  number of decimal digits. Returns an unknown root number when the two candidate signs
  cannot be separated at that precision or the needed coefficients exceed max_terms.
  """
  from ecdb.lfunc import hecke_coefficients

  N = conductor(c)
  ys = [mpmath.mpf(y) for y in THETA_POINTS]
  n_terms = _theta_terms(N, 1 / max(ys), precision)
  if (n_terms > max_terms):
    logger.info(f"Root number of {c}: {n_terms} coefficients exceed the budget of {max_terms}.")
    return RootNumber(None, RootNumberMethod.UNAVAILABLE)

  coeffs = hecke_coefficients(c, n_terms)
  with mpmath.workdps(precision + 10):
    root_n = mpmath.sqrt(N)
    descending = [coeffs[n] for n in range(n_terms, 0, -1)]

    def theta (y):
      q = mpmath.exp(-2 * mpmath.pi * y / root_n)
      return q * mpmath.polyval(descending, q)

    plus = minus = scale = mpmath.mpf(0)
    for y in ys:
      left = theta(1 / y)
      right = y * y * theta(y)
      plus += abs(left - right)
      minus += abs(left + right)
      scale += abs(left) + abs(right)
    tol = scale * mpmath.mpf(10)**(-(precision // 2))
    if ((plus <= tol) and (minus >= SEPARATION * tol)):
      return RootNumber(1, RootNumberMethod.NUMERIC)
    if ((minus <= tol) and (plus >= SEPARATION * tol)):
      return RootNumber(-1, RootNumberMethod.NUMERIC)
  logger.info(f"Root number of {c} not separable at {precision} digits.")
  return RootNumber(None, RootNumberMethod.UNAVAILABLE)


def tamagawa_product (c):
  "Return the product of the Tamagawa numbers c_p over the bad primes."
  prod = 1
  for ld in local_data(c):
    prod *= ld.c_p
  return prod


def tate_local (c, p):
  """
  Run Tate's algorithm for the short curve at the prime p, including the rescaling
  step for locally non-minimal models, and return the LocalData of the minimal model.
  """
  check_nonsingular(c)
  if (not is_prime(p)):
    raise ValueError(f"Tate's algorithm needs a prime, got {p}.")
  model = _Model((0, 0, 0, c.a4, c.a6))
  half = (p + 1) // 2                  # inverse of 2 mod p, for odd p
  pp = p * p
  while True:
    b2, b4, b6, b8, c4, c6, disc = ainvs_invariants(model.ainvs)
    n = valuation(disc, p)
    if (n == 0):
      return model.data(p, 'I0', 0, 1, Reduction.GOOD, 0)

    # move the singular point of the reduction to (0, 0)
    a1, a2, a3, a4, a6 = model.ainvs
    if (p == 2):
      if (b2 % 2 == 0):
        r = a4 % 2
        t = (r * (1 + a2 + a4) + a6) % 2
      else:
        r = a3 % 2
        t = (r + a4) % 2
    elif (p == 3):
      r = (-b6) % 3 if (b2 % 3 == 0) else (-b2 * b4) % 3
      t = (a1 * r + a3) % 3
    else:
      if (c4 % p == 0):
        r = (-pow(12, -1, p) * b2) % p
      else:
        r = (-pow(12 * c4, -1, p) * (c6 + b2 * c4)) % p
      t = (-half * (a1 * r + a3)) % p
    model.apply(r=r, t=t)
    a1, a2, a3, a4, a6 = model.ainvs
    b2, b4, b6, b8 = ainvs_invariants(model.ainvs)[:4]

    if (c4 % p != 0):                  # multiplicative, type In
      if (has_root_mod_p([1, a1, -a2], p)):
        return model.data(p, f"I{n}", 1, n, Reduction.SPLIT, n)
      return model.data(p, f"I{n}", 1, (1 if (n % 2) else 2), Reduction.NONSPLIT, n)

    if (a6 % pp != 0):
      return model.data(p, 'II', n, 1, Reduction.ADDITIVE, n)
    if (b8 % p**3 != 0):
      return model.data(p, 'III', n - 1, 2, Reduction.ADDITIVE, n)
    if (b6 % p**3 != 0):
      cp = 3 if has_root_mod_p([1, a3 // p, -(a6 // pp)], p) else 1
      return model.data(p, 'IV', n - 2, cp, Reduction.ADDITIVE, n)

    # make p divide a1, a2; p^2 divide a3, a4; p^3 divide a6
    if (p == 2):
      s = a2 % 2
      t = 2 * ((a6 // 4) % 2)
    else:
      s = -a1 * half
      t = -a3 * half
    model.apply(s=s, t=t)
    a1, a2, a3, a4, a6 = model.ainvs

    # the cubic T^3 + b T^2 + c T + d
    b = a2 // p
    cc = a4 // pp
    d = a6 // p**3
    w = 27 * d * d - b * b * cc * cc + 4 * b**3 * d - 18 * b * cc * d + 4 * cc**3
    x = 3 * cc - b * b
    if (w % p != 0):                   # distinct roots, type I0*
      cp = 1 + count_roots_mod_p([1, b, cc, d], p)
      return model.data(p, 'I0*', n - 4, cp, Reduction.ADDITIVE, n)

    if (x % p != 0):                   # one double root, type Im*
      if (p == 2):
        r = cc
      elif (p == 3):
        r = b * cc
      else:
        r = (b * cc - 9 * d) * pow(2 * x, -1, p)
      model.apply(r=p * (r % p))
      ix = iy = 3
      mx = my = pp
      cp = 0
      while (cp == 0):
        xa2, xa3, xa4, xa6 = model.scaled(p, mx, my)
        if ((xa3 * xa3 + 4 * xa6) % p != 0):
          cp = 4 if has_root_mod_p([1, xa3, -xa6], p) else 2
        else:
          t = my * (xa6 % 2) if (p == 2) else my * ((-xa3 * half) % p)
          model.apply(t=t)
          my *= p
          iy += 1
          xa2, xa3, xa4, xa6 = model.scaled(p, mx, my)
          if ((xa4 * xa4 - 4 * xa2 * xa6) % p != 0):
            cp = 4 if has_root_mod_p([xa2, xa4, xa6], p) else 2
          else:
            if (p == 2):
              r = mx * ((xa6 * xa2) % 2)
            else:
              r = mx * ((-xa4 * pow(2 * xa2, -1, p)) % p)
            model.apply(r=r)
            mx *= p
            ix += 1
      return model.data(p, f"I{ix + iy - 5}*", n - ix - iy + 1, cp, Reduction.ADDITIVE, n)

    # triple root: move it to T = 0
    if (p == 2):
      rt = b
    elif (p == 3):
      rt = -d
    else:
      rt = -b * pow(3, -1, p)
    model.apply(r=p * (rt % p))
    a1, a2, a3, a4, a6 = model.ainvs
    x3 = a3 // pp
    x6 = a6 // (pp * pp)
    if ((x3 * x3 + 4 * x6) % p != 0):
      cp = 3 if has_root_mod_p([1, x3, -x6], p) else 1
      return model.data(p, 'IV*', n - 6, cp, Reduction.ADDITIVE, n)

    t = pp * (x6 % 2) if (p == 2) else pp * ((-x3 * half) % p)
    model.apply(t=t)
    a1, a2, a3, a4, a6 = model.ainvs
    if (a4 % p**4 != 0):
      return model.data(p, 'III*', n - 7, 2, Reduction.ADDITIVE, n)
    if (a6 % p**6 != 0):
      return model.data(p, 'II*', n - 8, 1, Reduction.ADDITIVE, n)

    # the model is not minimal at p: scale down and start over
    model.apply(u=p)


class _Model(object):
  "A general Weierstrass model together with the accumulated change of coordinates."

  def __init__ (self, ainvs):
    self.ainvs = tuple(ainvs)
    self.transform = (1, 0, 0, 0)

  def apply (self, r=0, s=0, t=0, u=1):
    a1, a2, a3, a4, a6 = self.ainvs
    b1 = a1 + 2 * s
    b2 = a2 - s * a1 + 3 * r - s * s
    b3 = a3 + r * a1 + 2 * t
    b4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    b6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
    self.ainvs = (b1 // u, b2 // u**2, b3 // u**3, b4 // u**4, b6 // u**6)
    U, R, S, T = self.transform
    self.transform = (U * u, R + U * U * r, S + U * s, T + U**3 * t + U * U * S * r)

  def data (self, p, kodaira, f_p, c_p, reduction, n):
    return LocalData(p=p, kodaira=kodaira, f_p=f_p, c_p=c_p, reduction=reduction,
                     min_ainvs=self.ainvs, transform=self.transform, disc_valuation=n)

  def scaled (self, p, mx, my):
    _, a2, a3, a4, a6 = self.ainvs
    return (a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my))


@lru_cache(maxsize=4096)
def _local_data (c):
  check_nonsingular(c)
  return tuple(tate_local(c, p) for p in bad_primes(c))


def _local_root_number (c, ld):
  if (ld.reduction == Reduction.GOOD):
    return 1
  if (ld.reduction == Reduction.SPLIT):
    return -1
  if (ld.reduction == Reduction.NONSPLIT):
    return 1
  p = ld.p
  if (p < 5):
    return None
  j = j_invariant(c)
  if ((j.numerator != 0) and (valuation(j.numerator, p) - valuation(j.denominator, p) < 0)):
    return legendre(-1, p)             # potentially multiplicative
  e = 12 // math.gcd(12, ld.disc_valuation)
  if (e in (2, 6)):
    return legendre(-1, p)
  if (e == 3):
    return legendre(-3, p)
  if (e == 4):
    return legendre(-2, p)
  return 1


def _theta_terms (N, y_min, digits):
  "Number of terms n with n * exp(-2 pi n y_min / sqrt(N)) summing below 10^-(digits+5)."
  beta = 2 * math.pi * float(y_min) / math.sqrt(N)
  target = (digits + 5) * math.log(10)
  n_terms = max(1, int(target / beta))
  # tail bound: sum_{n > L} n q^n <= L q^L / (1 - q)^2
  while ((-beta * n_terms + math.log(n_terms) - 2 * math.log1p(-math.exp(-beta))) > -target):
    n_terms = int(n_terms * 1.1) + 1
  return n_terms
