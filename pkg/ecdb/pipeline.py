#
# Module to determine the rank of each curve: invariants, a lower bound from points,
# an upper bound from the zero sum, the parity of the root number, and imported
# 2-Selmer ranks, combined into a CurveRecord with a conditionality status.
#   Last Modified: Read imported 2-Selmer ranks with pandas.
#
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import pandas as pd

from ecdb import DataIntegrityError, RANK_STATUSES
from ecdb.local import conductor, root_number, tamagawa_product
from ecdb.model import (Curve, check_nonsingular, discriminant, height_naive, height_uncalibrated,
                        is_cm)
from ecdb.mordell import rank_lower_bound, search_points, torsion_subgroup, two_torsion_rank
from ecdb.run_config import RunConfig
from ecdb.zerosum import escalate

logger = logging.getLogger(__name__)

UNCONDITIONAL, GRH_BSD, GRH_BSD_PARITY, UNDETERMINED = RANK_STATUSES

SELMER_COLUMNS = ['a4', 'a6', 'sel2_rank']


@dataclass(frozen=True)
class CurveRecord:
  "One row of the database."
  a4: int
  a6: int
  h_naive: int
  h_uncal: int
  disc: int
  cond: int
  tamagawa: int
  torsion: str
  root_number: int
  rank_lower: int
  rank_upper: int
  rank: int = None
  rank_status: str = UNDETERMINED
  sel2_rank: int = None
  sha2_rank: int = None
  is_cm: bool = False

  def __post_init__ (self):
    if (self.rank_status not in RANK_STATUSES):
      raise ValueError(f"Rank status must be one of: {RANK_STATUSES}")

  def check (self):
    "Raise DataIntegrityError unless the rank bounds are consistent."
    if (self.rank_lower > self.rank_upper):
      raise DataIntegrityError(f"Curve {self.curve}: lower bound {self.rank_lower} exceeds upper bound {self.rank_upper}.")
    if ((self.rank is not None) and not (self.rank_lower <= self.rank <= self.rank_upper)):
      raise DataIntegrityError(f"Curve {self.curve}: rank {self.rank} outside [{self.rank_lower}, {self.rank_upper}].")
    if ((self.rank is None) != (self.rank_status == UNDETERMINED)):
      raise DataIntegrityError(f"Curve {self.curve}: rank {self.rank} with status {self.rank_status}.")
    return self

  @property
  def curve (self):
    return Curve(self.a4, self.a6)

  @property
  def key (self):
    return (self.a4, self.a6)


def determine_rank (c, config=None):
  """
  Compute the CurveRecord of the curve: invariants, then a lower bound from a point
  search, then zero sum upper bounds along the kernel width schedule. Equal bounds
  determine the rank (GRH+BSD); bounds one apart are settled by the root number
  (GRH+BSD+Parity). Otherwise the point search is enlarged once before the rank is
  recorded as undetermined.
  """
  config = RunConfig() if (config is None) else config
  check_nonsingular(c)
  torsion = torsion_subgroup(c)
  sign = root_number(c, numeric=config.numeric_root_number, precision=config.root_number_digits)

  bound = config.search_bound
  lower = _lower_bound(c, bound, config)
  zero_sum = escalate(c, lower, config.delta_schedule, parity=sign.known)
  upper = zero_sum.rank_ceiling
  _check_bounds(c, lower, upper)
  rank, status = decide_rank(lower, upper, sign.value)
  if (rank is None):
    bound *= config.search_escalation
    lower = _lower_bound(c, bound, config)
    _check_bounds(c, lower, upper)
    rank, status = decide_rank(lower, upper, sign.value)
  if (rank is None):
    logger.info(f"Rank of {c} undetermined in [{lower}, {upper}].")

  return CurveRecord(
    a4=c.a4, a6=c.a6,
    h_naive=height_naive(c), h_uncal=height_uncalibrated(c),
    disc=discriminant(c), cond=conductor(c), tamagawa=tamagawa_product(c),
    torsion=torsion.structure, root_number=sign.value,
    rank_lower=lower, rank_upper=upper, rank=rank, rank_status=status,
    is_cm=is_cm(c)).check()


def decide_rank (lower, upper, sign):
  "Return (rank, status) from the bounds and the root number sign (None when unknown)."
  if (upper == lower):
    return (lower, GRH_BSD)
  if ((upper == lower + 1) and (sign is not None)):
    rank = lower if ((-1)**lower == sign) else lower + 1
    return (rank, GRH_BSD_PARITY)
  return (None, UNDETERMINED)


def import_selmer (records, source):
  """
  Apply imported 2-Selmer ranks to the records. source is a path to a Selmer CSV or a
  mapping of (a4, a6) keys to ranks. The exact sequence bounds the rank by
  sel2_rank - dim E(Q)[2]; when that bound meets the lower bound the rank is
  unconditional. Returns the updated records and the sorted keys of the source which
  match no record. Raises DataIntegrityError when a Selmer bound undercuts a proven
  lower bound or a determined rank.
  """
  selmer = read_selmer_csv(source) if isinstance(source, str) else dict(source)
  updated = []
  matched = set()
  for rec in records:
    sel2 = selmer.get(rec.key)
    if (sel2 is None):
      updated.append(rec)
      continue
    matched.add(rec.key)
    updated.append(_apply_selmer(rec, sel2))
  unknown = sorted(set(selmer) - matched)
  for key in unknown:
    logger.warning(f"Selmer rank for unknown curve [{key[0]},{key[1]}] ignored.")
  return (updated, unknown)


def parity_violations (records):
  "Return the determined records whose rank parity disagrees with a known root number."
  return [rec for rec in records
          if ((rec.rank is not None) and (rec.root_number is not None)
              and ((-1)**rec.rank != rec.root_number))]


def rank_curves (curves, config=None, threads=1):
  "Return the CurveRecords of the curves, in order, using a pool of worker processes."
  config = RunConfig() if (config is None) else config
  curves = list(curves)
  if ((threads <= 1) or (len(curves) < 2)):
    return [determine_rank(c, config) for c in curves]
  with ProcessPoolExecutor(max_workers=threads) as pool:
    chunk = max(1, len(curves) // (4 * threads))
    return list(pool.map(determine_rank, curves, [config] * len(curves), chunksize=chunk))


def read_selmer_csv (path):
  """
  Read a header-bearing CSV with the columns a4, a6, sel2_rank into a dictionary of
  (a4, a6) keys to ranks. Raises ValueError for a malformed file and
  DataIntegrityError for conflicting duplicate rows.
  """
  try:
    frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
  except pd.errors.EmptyDataError:
    frame = pd.DataFrame()
  if (not set(SELMER_COLUMNS) <= set(frame.columns)):
    raise ValueError(f"Selmer file {path} must have the columns: {SELMER_COLUMNS}")
  frame = frame[SELMER_COLUMNS].map(int)
  negative = frame[frame['sel2_rank'] < 0]
  if (not negative.empty):
    a4, a6, sel2 = negative.iloc[0]
    raise ValueError(f"Selmer rank of [{a4},{a6}] must be nonnegative, got {sel2}.")
  frame = frame.drop_duplicates()
  conflicts = frame[frame.duplicated(['a4', 'a6'])]
  if (not conflicts.empty):
    a4, a6, _ = conflicts.iloc[0]
    raise DataIntegrityError(f"Conflicting Selmer ranks for [{a4},{a6}] in {path}.")
  return {(a4, a6): sel2 for a4, a6, sel2 in frame.itertuples(index=False)}


def _apply_selmer (rec, sel2):
  t2 = two_torsion_rank(rec.curve)
  bound = sel2 - t2
  if (bound < rec.rank_lower):
    raise DataIntegrityError(
      f"Curve {rec.curve}: Selmer bound {bound} is below the proven lower bound {rec.rank_lower}.")
  if ((rec.rank is not None) and (bound < rec.rank)):
    raise DataIntegrityError(f"Curve {rec.curve}: Selmer bound {bound} is below the rank {rec.rank}.")
  upper = min(rec.rank_upper, bound)
  rank, status = rec.rank, rec.rank_status
  if (bound == rec.rank_lower):
    rank, status = rec.rank_lower, UNCONDITIONAL
  elif (rank is None):
    rank, status = decide_rank(rec.rank_lower, upper, rec.root_number)
  sha2 = None
  if (rank is not None):
    sha2 = sel2 - rank - t2
    if (sha2 % 2 != 0):
      logger.warning(f"Curve {rec.curve}: odd Sha[2] rank {sha2}.")
  return replace(rec, rank_upper=upper, rank=rank, rank_status=status,
                 sel2_rank=sel2, sha2_rank=sha2).check()


def _check_bounds (c, lower, upper):
  if (upper < lower):
    raise DataIntegrityError(f"Curve {c}: zero sum ceiling {upper} is below the lower bound {lower}.")


def _lower_bound (c, bound, config):
  points = search_points(c, bound, config.search_denom_bound)
  return rank_lower_bound(c, points).rank_lower
