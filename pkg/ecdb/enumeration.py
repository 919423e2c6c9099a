#
# Module to generate every isomorphism class of curves in a height window, and to
# sample curves uniformly from a height band.
#   Last Modified: Keep the least member of each marked point class, whatever the windows.
#
import logging
from dataclasses import dataclass
from itertools import chain

import mpmath
import numpy as np

from ecdb import MAX_WINDOW_HEIGHT
from ecdb.arith import integer_nth_root
from ecdb.model import (Curve, F1Curve, HeightKind, discriminant_f1, f1_to_short, height_f1,
                        height_naive, is_minimal, is_minimal_f1, is_singular)

logger = logging.getLogger(__name__)

# Height weights (coefficient of |a4|^3, coefficient of a6^2) for the short models
SHORT_WEIGHTS = {
  HeightKind.NAIVE: (4, 27),
  HeightKind.UNCALIBRATED: (1, 1),
}


@dataclass(frozen=True)
class HeightWindow:
  "The half-open height range [lo, hi) for one kind of height."
  kind: HeightKind
  lo: int
  hi: int

  def __post_init__ (self):
    object.__setattr__(self, 'kind', HeightKind(self.kind))
    if (not (0 <= self.lo < self.hi)):
      raise ValueError(f"Height window must satisfy 0 <= lo < hi, got [{self.lo}, {self.hi}).")
    if (self.hi > MAX_WINDOW_HEIGHT):
      raise ValueError(f"Height window bound {self.hi} exceeds the limit 2^100.")

  def contains (self, h):
    return self.lo <= h < self.hi

  @classmethod
  def up_to (cls, kind, bound):
    "Return the window of all heights at most the given bound."
    return cls(kind, 0, bound + 1)


@dataclass(frozen=True)
class SampleSpec:
  "Draw count curves uniformly from the naive height band [10^k, 2*10^k)."
  k: int
  count: int
  seed: int

  def __post_init__ (self):
    if (self.k < 1):
      raise ValueError(f"Sample band exponent must be at least 1, got {self.k}.")
    if (self.count < 1):
      raise ValueError(f"Sample count must be positive, got {self.count}.")
    if (not (0 <= self.seed < 2**64)):
      raise ValueError(f"Sample seed must be a 64-bit unsigned integer, got {self.seed}.")

  @property
  def window (self):
    return HeightWindow(HeightKind.NAIVE, 10**self.k, 2 * 10**self.k)


@dataclass(frozen=True)
class WindowCount:
  count: int
  predicted: float = None              # (4/zeta(10)) X^(5/6), uncalibrated windows from zero only
  ratio: float = None


def count_f1_in_main (w, bound):
  "Count the F1 isomorphism classes in the window whose short model has naive height at most bound."
  return sum(1 for c in enumerate_window(w) if (height_naive(f1_to_short(c).curve) <= bound))


def count_window (w):
  """
  Count the curves enumerate_window yields. For uncalibrated windows starting at zero,
  also return the asymptotic prediction (4/zeta(10)) X^(5/6), X = hi - 1, and the ratio.
  """
  count = sum(1 for _ in enumerate_window(w))
  if ((w.kind != HeightKind.UNCALIBRATED) or (w.lo != 0)):
    return WindowCount(count)
  predicted = float(4 / mpmath.zeta(10) * mpmath.power(w.hi - 1, mpmath.mpf(5) / 6))
  return WindowCount(count, predicted, count / predicted)


def enumerate_window (w):
  """
  Generator of the nonsingular minimal curves whose height lies in the window, in
  ascending coefficient order. Short models are Curve instances; the F1 family yields
  F1Curve instances, one per isomorphism class met in the window.
  """
  if (w.kind == HeightKind.F1):
    return _f1_curves(w)
  return _short_curves(w)


def sample_band (s):
  """
  Return s.count distinct minimal nonsingular curves drawn uniformly from the naive height
  band of the sample spec, by rejection sampling over the coefficient box with a PCG64
  generator seeded from s.seed.
  """
  band = s.window
  a4_max = _floor_root(band.hi, 4, 3)
  a6_max = _floor_root(band.hi, 27, 2)
  rng = np.random.Generator(np.random.PCG64(s.seed))
  seen = set()
  curves = []
  draws = 0
  while (len(curves) < s.count):
    draws += 1
    a4 = int(rng.integers(-a4_max, a4_max, endpoint=True))
    a6 = int(rng.integers(-a6_max, a6_max, endpoint=True))
    c = Curve(a4, a6)
    if ((c in seen) or (not band.contains(height_naive(c)))):
      continue
    if (is_singular(c) or (not is_minimal(c))):
      continue
    seen.add(c)
    curves.append(c)
  logger.debug(f"Sampled {s.count} curves from band 10^{s.k} in {draws} draws.")
  return curves


def split_window (w, parts):
  "Tile the window into (at most) the given number of contiguous sub-windows."
  if (parts < 1):
    raise ValueError(f"Number of parts must be positive, got {parts}.")
  span = w.hi - w.lo
  parts = min(parts, span)
  bounds = [w.lo + (span * i) // parts for i in range(parts + 1)]
  return [HeightWindow(w.kind, lo, hi) for lo, hi in zip(bounds, bounds[1:])]


def _ceil_root (lo, weight, k):
  "Smallest m >= 0 with weight * m^k >= lo."
  target = -(-lo // weight)
  m = integer_nth_root(target, k)
  return m if (m**k >= target) else m + 1


def _coefficient_range (lo, hi, weight, k, others_reach):
  """
  Values a with weight*|a|^k < hi, restricted to weight*|a|^k >= lo unless the
  other coefficients already reach the lower bound.
  """
  top = _floor_root(hi, weight, k)
  if (others_reach):
    return range(-top, top + 1)
  bottom = _ceil_root(lo, weight, k)
  return chain(range(-top, -bottom + 1), range(bottom, top + 1))


def _f1_curves (w):
  """
  Yield one member per isomorphism class: the member least in (height, a2, a3, a4).
  Classes with a member below the window belong to an earlier window and are skipped,
  so the members yielded do not depend on how a range is split into windows.
  """
  earlier = set()
  if (w.lo > 0):
    earlier = {f1_to_short(c).curve for c in _f1_members(HeightWindow(w.kind, 0, w.lo))}
  members = [(c, f1_to_short(c).curve) for c in _f1_members(w)]
  least = {}
  for c, key in members:
    if (key not in earlier):
      order = (height_f1(c), c.a2, c.a3, c.a4)
      least[key] = min(least.get(key, order), order)
  for c, key in members:
    if ((key in least) and (least[key] == (height_f1(c), c.a2, c.a3, c.a4))):
      yield c


def _f1_members (w):
  "Generator of the nonsingular minimal F1 curves of the window, isomorphic ones included."
  a2_top = _floor_root(w.hi, 1, 6)
  a3_top = _floor_root(w.hi, 1, 4)
  for a2 in range(-a2_top, a2_top + 1):
    for a3 in range(-a3_top, a3_top + 1):
      reach = max(a2**6, a3**4) >= w.lo
      for a4 in _coefficient_range(w.lo, w.hi, 1, 3, reach):
        c = F1Curve(a2, a3, a4)
        if ((discriminant_f1(c) == 0) or (not is_minimal_f1(c))):
          continue
        yield c


def _floor_root (hi, weight, k):
  "Largest m >= 0 with weight * m^k < hi."
  return integer_nth_root((hi - 1) // weight, k)


def _short_curves (w):
  w4, w6 = SHORT_WEIGHTS[w.kind]
  for a4 in _coefficient_range(0, w.hi, w4, 3, True):
    reach = w4 * abs(a4)**3 >= w.lo
    for a6 in _coefficient_range(w.lo, w.hi, w6, 2, reach):
      c = Curve(a4, a6)
      if ((not is_singular(c)) and is_minimal(c)):
        yield c
