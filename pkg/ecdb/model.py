#
# Module for curve representations: short Weierstrass curves, the marked point
# family F1, heights, discriminants, minimality, j-invariants, and CM detection.
#   Last Modified: Add isomorphism keys for the marked point family.
#
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ecdb.arith import integer_nth_root, small_primes


class HeightKind(str, Enum):
  NAIVE = 'naive'
  UNCALIBRATED = 'uncalibrated'
  F1 = 'f1'


# Rational j-invariants of curves with complex multiplication, keyed to the
# discriminant of the (class number one) order of the CM field.
CM_J_INVARIANTS = {
  0: -3,
  1728: -4,
  -3375: -7,
  8000: -8,
  -32768: -11,
  54000: -12,
  287496: -16,
  -884736: -19,
  -12288000: -27,
  16581375: -28,
  -884736000: -43,
  -147197952000: -67,
  -262537412640768000: -163,
}


@dataclass(frozen=True, order=True)
class Curve:
  "The curve y^2 = x^3 + a4*x + a6."
  a4: int
  a6: int

  def __str__ (self):
    return f"[{self.a4},{self.a6}]"


@dataclass(frozen=True, order=True)
class F1Curve:
  "The curve y^2 + a3*y = x^3 + a2*x^2 + a4*x, with the marked point (0,0)."
  a2: int
  a3: int
  a4: int

  def __str__ (self):
    return f"[0,{self.a2},{self.a3},{self.a4},0]"


@dataclass(frozen=True)
class ShortForm:
  "A minimal short model of an F1 curve: discriminant(curve) = discriminant_f1(source) * scale."
  curve: Curve
  scale: Fraction


def check_nonsingular (c):
  "Raise ValueError if the given curve is singular."
  if (is_singular(c)):
    raise ValueError(f"Curve {c} is singular.")


def cm_discriminant (c):
  "Return the discriminant of the CM order of the given curve or None if it has no CM."
  return CM_J_INVARIANTS.get(_integral_j(j_invariant(c)))


def discriminant (c):
  "Return the discriminant -16(4*a4^3 + 27*a6^2) of the short Weierstrass curve."
  return -16 * (4 * c.a4**3 + 27 * c.a6**2)


def discriminant_f1 (c):
  "Return the discriminant of the F1 curve, from the general Weierstrass b-invariants."
  b2, b4, b6, b8 = f1_b_invariants(c)
  return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def f1_b_invariants (c):
  "Return (b2, b4, b6, b8) of the F1 curve (a1 = a6 = 0)."
  b2 = 4 * c.a2
  b4 = 2 * c.a4
  b6 = c.a3 * c.a3
  b8 = c.a2 * c.a3 * c.a3 - c.a4 * c.a4
  return (b2, b4, b6, b8)


def f1_to_short (c):
  """
  Convert the F1 curve into its minimal short Weierstrass model y^2 = x^3 - 27*c4*x - 54*c6,
  reduced by the p^4/p^6 rule. Returns a ShortForm recording the 12th power discriminant scale.
  Raises ValueError if the curve is singular.
  """
  if (discriminant_f1(c) == 0):
    raise ValueError(f"Curve {c} is singular.")
  b2, b4, b6, _ = f1_b_invariants(c)
  c4 = b2 * b2 - 24 * b4
  c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
  reduced, u = _reduce_with_scale(-27 * c4, -54 * c6)
  return ShortForm(curve=reduced, scale=Fraction(6**12, u**12))


def height (c, kind):
  "Return the height of the given curve for the given HeightKind."
  kind = HeightKind(kind)
  if (kind == HeightKind.NAIVE):
    return height_naive(c)
  elif (kind == HeightKind.UNCALIBRATED):
    return height_uncalibrated(c)
  return height_f1(c)


def height_f1 (c):
  return max(c.a2**6, c.a3**4, abs(c.a4)**3)


def height_naive (c):
  return max(4 * abs(c.a4)**3, 27 * c.a6**2)


def height_uncalibrated (c):
  return max(abs(c.a4)**3, c.a6**2)


def is_cm (c):
  "Tell whether the curve has complex multiplication, by its j-invariant."
  return cm_discriminant(c) is not None


def is_minimal (c):
  """
  Tell whether no prime p has p^4 | a4 and p^6 | a6. A zero coefficient is divisible
  by every prime power; the singular pair (0,0) is reported minimal.
  """
  for p in _scaling_primes((c.a4, 4), (c.a6, 6)):
    if ((c.a4 % p**4 == 0) and (c.a6 % p**6 == 0)):
      return False
  return True


def is_minimal_f1 (c):
  "Tell whether no prime p has p^2 | a2, p^3 | a3 and p^4 | a4."
  for p in _scaling_primes((c.a2, 2), (c.a3, 3), (c.a4, 4)):
    if ((c.a2 % p**2 == 0) and (c.a3 % p**3 == 0) and (c.a4 % p**4 == 0)):
      return False
  return True


def is_singular (c):
  "Tell whether the short Weierstrass curve is singular."
  return (4 * c.a4**3 + 27 * c.a6**2) == 0


def j_invariant (c):
  """
  Return the exact j-invariant c4^3/Delta = 1728 * 4a4^3 / (4a4^3 + 27a6^2).
  Raises ValueError if the curve is singular.
  """
  check_nonsingular(c)
  return Fraction(1728 * 4 * c.a4**3, 4 * c.a4**3 + 27 * c.a6**2)


def reduce_to_minimal (c):
  "Divide (a4, a6) by (p^4, p^6) until the curve is minimal."
  reduced, _ = _reduce_with_scale(c.a4, c.a6)
  return reduced


def reduction_scale (c):
  "Return u such that (a4, a6) = (u^4 * a4', u^6 * a6') for the minimal curve (a4', a6')."
  _, u = _reduce_with_scale(c.a4, c.a6)
  return u


def _integral_j (j):
  return j.numerator if (j.denominator == 1) else None


def _reduce_with_scale (a4, a6):
  u = 1
  for p in _scaling_primes((a4, 4), (a6, 6)):
    while ((a4 % p**4 == 0) and (a6 % p**6 == 0)):
      a4 //= p**4
      a6 //= p**6
      u *= p
  return (Curve(a4, a6), u)


def _scaling_primes (*weighted):
  """
  Return the primes p for which p^k could divide every given (coefficient, k) pair:
  p^k <= |coefficient| for each nonzero coefficient.
  """
  bounds = [integer_nth_root(abs(a), k) for a, k in weighted if (a != 0)]
  if (not bounds):                     # all coefficients zero: singular
    return ()
  return small_primes(min(bounds))
