#
# Module for the Mordell-Weil group: the group law, torsion subgroups, searches for
# rational points, canonical heights, and lower bounds for the rank.
#   Last Modified: Compute local heights on the local minimal models.
#
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from config.settings import (HEIGHT_DIGITS, INDEPENDENCE_TOL, SEARCH_DENOM_BOUND,
                             TORSION_HEIGHT_TOL)
from ecdb.arith import factorize, is_square, primes_up_to, valuation
from ecdb.lfunc import count_points_mod_p
from ecdb.local import Reduction, ainvs_invariants, local_data
from ecdb.model import check_nonsingular, discriminant

logger = logging.getLogger(__name__)

MAX_CANDIDATES = 40                    # non-torsion points offered to the independence test
MAX_TORSION_ORDER = 12

MAZUR_STRUCTURES = [
  'trivial', 'Z/2Z', 'Z/3Z', 'Z/4Z', 'Z/5Z', 'Z/6Z', 'Z/7Z', 'Z/8Z', 'Z/9Z', 'Z/10Z', 'Z/12Z',
  'Z/2ZxZ/2Z', 'Z/2ZxZ/4Z', 'Z/2ZxZ/6Z', 'Z/2ZxZ/8Z'
]


@dataclass(frozen=True)
class RationalPoint:
  "An affine point with rational coordinates, or the point at infinity (x = y = None)."
  x: Fraction = None
  y: Fraction = None

  def __post_init__ (self):
    if ((self.x is None) != (self.y is None)):
      raise ValueError("Both coordinates or neither must be given.")
    if (self.x is not None):
      object.__setattr__(self, 'x', Fraction(self.x))
      object.__setattr__(self, 'y', Fraction(self.y))

  def __str__ (self):
    if (self.is_infinity):
      return 'O'
    return f"({self.x},{self.y})"

  @property
  def is_infinity (self):
    return self.x is None


INFINITY = RationalPoint()


@dataclass(frozen=True)
class TorsionGroup:
  structure: str
  generators: tuple
  points: tuple = ()                   # every torsion point, the point at infinity included

  def __post_init__ (self):
    if (self.structure not in MAZUR_STRUCTURES):
      raise ValueError(f"Torsion structure must be one of: {MAZUR_STRUCTURES}")

  @property
  def order (self):
    return structure_order(self.structure)


@dataclass(frozen=True)
class MordellWeilBasis:
  "Independent points found on the curve, their regulator, and the implied lower bound for the rank."
  points: tuple
  regulator: float
  rank_lower: int


def add_points (c, P, Q):
  "Return P + Q under the group law of the short Weierstrass curve."
  if (P.is_infinity):
    return Q
  if (Q.is_infinity):
    return P
  if (P.x == Q.x):
    if (P.y + Q.y == 0):
      return INFINITY
    slope = (3 * P.x * P.x + c.a4) / (2 * P.y)
  else:
    slope = (Q.y - P.y) / (Q.x - P.x)
  x3 = slope * slope - P.x - Q.x
  return RationalPoint(x3, slope * (P.x - x3) - P.y)


def canonical_height (c, P, digits=HEIGHT_DIGITS):
  """
  Return the canonical height of P, normalized so that it is the limit of
  log max(|num x(2^n P)|, |den x(2^n P)|) / 4^n. The archimedean part comes from
  Tate's series on a translated model, the non-archimedean parts from the local
  minimal models at the primes dividing the discriminant.
  Raises RuntimeError when the series loses its precision.
  """
  check_nonsingular(c)
  if (P.is_infinity):
    return 0.0
  if (not is_on_curve(c, P)):
    raise ValueError(f"Point {P} is not on the curve {c}.")
  with mpmath.workdps(digits + 10):
    denom = math.isqrt(P.x.denominator)
    total = _archimedean_height(c, P, digits) + mpmath.log(denom)
    disc = discriminant(c)
    for ld in local_data(c):
      lam = _non_archimedean_height(ld, P)
      lam -= Fraction(valuation(disc, ld.p), 12)
      if (denom % ld.p == 0):
        lam -= valuation(denom, ld.p)
      total += lam.numerator * mpmath.log(ld.p) / lam.denominator
    return float(2 * total)


def height_pairing (c, P, Q, heights=None):
  "Return the height pairing <P, Q> = (h(P + Q) - h(P) - h(Q)) / 2."
  heights = {} if (heights is None) else heights
  total = _cached_height(c, add_points(c, P, Q), heights)
  return (total - _cached_height(c, P, heights) - _cached_height(c, Q, heights)) / 2


def is_on_curve (c, P):
  "Tell whether the point satisfies the curve equation exactly."
  if (P.is_infinity):
    return True
  return P.y * P.y == P.x**3 + c.a4 * P.x + c.a6


def multiply_point (c, n, P):
  "Return n P, for any integer n."
  if (n < 0):
    return multiply_point(c, -n, negate_point(P))
  result = INFINITY
  while (n > 0):
    if (n & 1):
      result = add_points(c, result, P)
    P = add_points(c, P, P)
    n >>= 1
  return result


def negate_point (P):
  if (P.is_infinity):
    return P
  return RationalPoint(P.x, -P.y)


def point_order (c, P, limit=MAX_TORSION_ORDER):
  "Return the order of P if it is at most limit, else None."
  Q = P
  for n in range(1, limit + 1):
    if (Q.is_infinity):
      return n
    Q = add_points(c, Q, P)
  return None


def rank_lower_bound (c, pts, tol=INDEPENDENCE_TOL):
  """
  Greedily select, in order of increasing height, the points whose addition keeps the
  determinant of the height pairing Gram matrix above tol; their number bounds the rank.
  """
  heights = {}
  candidates = []
  for P in sorted({P for P in pts if (not P.is_infinity)}, key=_naive_height):
    if (len(candidates) >= MAX_CANDIDATES):
      break
    if (_cached_height(c, P, heights) > TORSION_HEIGHT_TOL):
      candidates.append(P)
  chosen = []
  regulator = 1.0
  for P in candidates:
    trial = chosen + [P]
    det = float(np.linalg.det(_gram_matrix(c, trial, heights)))
    if (det > tol):
      chosen = trial
      regulator = det
  logger.debug(f"Curve {c}: {len(chosen)} independent points among {len(candidates)}.")
  return MordellWeilBasis(points=tuple(chosen), regulator=regulator, rank_lower=len(chosen))


def search_points (c, bound, denom_bound=SEARCH_DENOM_BOUND):
  """
  Return the points (x, y), y >= 0, with x = m/e^2 in lowest terms, |m| <= bound and
  1 <= e <= min(bound, denom_bound), found by exact square tests.
  """
  if (bound < 1):
    raise ValueError(f"Search bound must be at least 1, got {bound}.")
  points = []
  for e in range(1, min(bound, denom_bound) + 1):
    e2 = e * e
    e4 = e2 * e2
    e6 = e4 * e2
    for m in range(-bound, bound + 1):
      if (math.gcd(m, e) != 1):
        continue
      rhs = m**3 + c.a4 * m * e4 + c.a6 * e6
      if (is_square(rhs)):
        points.append(RationalPoint(Fraction(m, e2), Fraction(math.isqrt(rhs), e2 * e)))
  return points


def structure_order (structure):
  "Return the group order of a torsion structure label."
  if (structure == 'trivial'):
    return 1
  order = 1
  for factor in structure.split('x'):
    order *= int(factor[2:-1])
  return order


def torsion_order_bound (c, limit=60):
  "Return the gcd of #E(F_p) over the odd good primes p <= limit, a multiple of the torsion order."
  disc = discriminant(c)
  bound = 0
  for p in primes_up_to(limit):
    if ((p > 2) and (disc % p != 0)):
      bound = math.gcd(bound, count_points_mod_p(c, p))
      if (bound == 1):
        break
  return bound


def torsion_points (c):
  """
  Return all rational torsion points, the point at infinity first. Candidates are the
  integral points with y = 0 or y^2 dividing 4 a4^3 + 27 a6^2; each is kept when its
  order under the group law is at most 12.
  """
  check_nonsingular(c)
  found = [INFINITY]
  for y in _nagell_lutz_ordinates(c):
    for x in _integer_roots(c.a4, c.a6 - y * y):
      for P in dict.fromkeys([RationalPoint(x, y), RationalPoint(x, -y)]):
        if ((point_order(c, P) is not None) and (P not in found)):
          found.append(P)
  return found


def torsion_subgroup (c):
  "Return the TorsionGroup of the curve, checked against Mazur's list of fifteen groups."
  points = torsion_points(c)
  n = len(points)
  orders = {P: point_order(c, P) for P in points}
  two_torsion = [P for P in points if (orders[P] == 2)]
  if (len(two_torsion) == 3):
    half = n // 2
    big = next(P for P in points if (orders[P] == half))
    multiples = {multiply_point(c, k, big) for k in range(half)}
    other = next(P for P in two_torsion if (P not in multiples))
    structure = f"Z/2ZxZ/{half}Z"
    generators = (other, big)
  elif (n == 1):
    structure = 'trivial'
    generators = ()
  else:
    structure = f"Z/{n}Z"
    generators = (next(P for P in points if (orders[P] == n)),)
  if (structure not in MAZUR_STRUCTURES):
    raise RuntimeError(f"Torsion of {c} computed as {structure}, which is not a possible structure.")
  return TorsionGroup(structure=structure, generators=generators, points=tuple(points))


def two_torsion_rank (c):
  "Return the F2-dimension of E(Q)[2]: 0, 1, or 2."
  roots = len(_integer_roots(c.a4, c.a6))
  return {0: 0, 1: 1, 3: 2}[roots]


def _archimedean_height (c, P, digits):
  """
  Tate's series 1/2 log|x| + 1/8 sum 4^-n log z(2^n P) on the model translated by
  x = x' + r so that every real point has x' > 1.
  """
  r = math.floor(min(_real_roots(c.a4, c.a6))) - 1
  a2 = 3 * r
  a4 = 3 * r * r + c.a4
  a6 = r**3 + c.a4 * r + c.a6
  b2, b4, b6, b8 = ainvs_invariants((0, a2, 0, a4, a6))[:4]
  x = P.x - r
  t = mpmath.mpf(x.denominator) / x.numerator
  total = mpmath.mpf(0)
  scale = mpmath.mpf(1)
  terms = int(digits * math.log(10) / math.log(4)) + 10
  for _ in range(terms):
    z = 1 - b4 * t**2 - 2 * b6 * t**3 - b8 * t**4
    if (z <= 0):
      raise RuntimeError(f"Height series of {P} on {c} lost precision.")
    w = 4 * t + b2 * t**2 + 2 * b4 * t**3 + b6 * t**4
    total += scale * mpmath.log(z)
    scale /= 4
    t = w / z
  return mpmath.log(abs(mpmath.mpf(x.numerator) / x.denominator)) / 2 + total / 8


def _cached_height (c, P, heights):
  if (P not in heights):
    heights[P] = canonical_height(c, P)
  return heights[P]


def _fraction_valuation (q, p):
  if (q == 0):
    return math.inf
  return valuation(q.numerator, p) - valuation(q.denominator, p)


def _gram_matrix (c, pts, heights):
  k = len(pts)
  gram = np.zeros((k, k))
  for i in range(k):
    for j in range(i, k):
      if (i == j):
        gram[i, i] = _cached_height(c, pts[i], heights)
      else:
        gram[i, j] = gram[j, i] = height_pairing(c, pts[i], pts[j], heights)
  return gram


def _integer_roots (a4, a6):
  "Integer roots of x^3 + a4 x + a6, checked exactly."
  roots = set()
  for root in np.roots([1, 0, a4, a6]):
    if (abs(root.imag) > 1e-6 * max(1.0, abs(root.real))):
      continue
    guess = int(round(root.real))
    for x in (guess - 1, guess, guess + 1):
      if (x**3 + a4 * x + a6 == 0):
        roots.add(x)
  return sorted(roots)


def _naive_height (P):
  return max(abs(P.x.numerator), P.x.denominator)


def _nagell_lutz_ordinates (c):
  "Generator of y = 0 and the positive y with y^2 dividing 4 a4^3 + 27 a6^2."
  yield 0
  ys = [1]
  for p, e in factorize(4 * c.a4**3 + 27 * c.a6**2):
    ys = [y * p**k for y in ys for k in range(e // 2 + 1)]
  yield from sorted(ys)


def _non_archimedean_height (ld, P):
  """
  Local height of P at a prime dividing the discriminant, in units of log p, on the local
  minimal model (including the v(Delta_min)/12 normalization).
  """
  p = ld.p
  u, r, s, t = ld.transform
  x = (P.x - r) / (u * u)
  y = (P.y - s * (P.x - r) - t) / u**3
  a1, a2, a3, a4, a6 = ld.min_ainvs
  b2, b4, b6, b8 = ainvs_invariants(ld.min_ainvs)[:4]
  n = ld.disc_valuation
  v = lambda q: _fraction_valuation(q, p)
  singular = ((v(3 * x * x + 2 * a2 * x + a4 - a1 * y) > 0) and (v(2 * y + a1 * x + a3) > 0))
  if ((ld.reduction == Reduction.GOOD) or (not singular)):
    return Fraction(max(0, -v(x)), 2) + Fraction(n, 12)
  psi2 = v(2 * y + a1 * x + a3)
  psi3 = v(3 * x**4 + b2 * x**3 + 3 * b4 * x * x + 3 * b6 * x + b8)
  if (ld.reduction != Reduction.ADDITIVE):
    alpha = Fraction(1, 2) if (psi2 == math.inf) else min(Fraction(1, 2), Fraction(psi2, n))
    return alpha * (alpha - 1) * n / 2 + Fraction(n, 12)
  if (psi3 >= 3 * psi2):
    return Fraction(-psi2, 3) + Fraction(n, 12)
  return Fraction(-psi3, 8) + Fraction(n, 12)


def _real_roots (a4, a6):
  "Approximate real roots of x^3 + a4 x + a6 (there is always at least one)."
  roots = np.roots([1, 0, a4, a6])
  real = [float(root.real) for root in roots if (abs(root.imag) < 1e-9 * max(1.0, abs(root)))]
  if (not real):
    real = [float(min(roots, key=lambda root: abs(root.imag)).real)]
  return real
