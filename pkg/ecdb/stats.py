#
# Module for streaming statistics over curve records: rank distributions, running
# averages, discriminant sign splits, torsion censuses, records of minimal height,
# and the theoretical distributions the observed figures are compared with.
#   Last Modified: Keep mergeable integer sums for every reported mean.
#
import csv
import logging
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import mpmath
from sympy import divisor_sigma
from tabulate import tabulate

from config.settings import SERIES_RATIO
from ecdb import reference
from ecdb.arith import is_prime
from ecdb.enumeration import enumerate_window
from ecdb.mordell import structure_order, torsion_order_bound, torsion_subgroup

logger = logging.getLogger(__name__)

PRODUCT_TOL = 1e-15                    # truncation of the infinite products

HS_CONSTANTS = {
  'Z/2Z': (3.1969, 0.5),
  'Z/3Z': (1.5221, 1 / 3),
}

# Per height bucket sums kept by a report, from which every series is derived
SERIES = {
  'average_rank': ('rank_sum', 'ranked'),
  'rank2_proportion': ('rank2', 'ranked'),
  'average_rank_positive': ('pos_rank_sum', 'pos_ranked'),
  'average_rank_negative': ('neg_rank_sum', 'neg_ranked'),
  'root_number_mean': ('root_sum', 'root_known'),
  'selmer_size_mean': ('sel2_size_sum', 'sel2_known'),
  'sha2_rank_mean': ('sha2_sum', 'sha2_known'),
  'torsion_order_mean': ('torsion_sum', 'curves'),
  'tamagawa_mean': ('tamagawa_sum', 'curves'),
}


@dataclass
class StatReport:
  """
  Mergeable aggregates over a stream of curve records. Every field is an integer sum
  or a minimum, so the report of a union of disjoint streams is the merge of theirs.
  Records of undetermined rank are counted but kept out of all rank statistics.
  """
  count: int = 0
  undetermined: int = 0
  max_height: int = 0
  ratio: float = SERIES_RATIO
  rank_hist: Counter = field(default_factory=Counter)
  buckets: Counter = field(default_factory=Counter)       # (bucket, sum name) -> value
  torsion: Counter = field(default_factory=Counter)       # (structure, sum name) -> value
  selmer: Counter = field(default_factory=Counter)        # (rank, sel2_rank) -> count
  sha2: Counter = field(default_factory=Counter)          # (rank, sha2_rank) -> count
  records: dict = field(default_factory=dict)             # (torsion, rank) -> (height, keys)

  def add (self, rec):
    "Add one CurveRecord to the report."
    self.count += 1
    self.max_height = max(self.max_height, rec.h_naive)
    sums = Counter(curves=1, torsion_sum=structure_order(rec.torsion), tamagawa_sum=rec.tamagawa)
    positive = rec.disc > 0
    sums['positive'] = int(positive)
    if (rec.is_cm):
      sums['cm'] = 1
    if (rec.root_number is not None):
      sums['root_known'] = 1
      sums['root_sum'] = rec.root_number
    if (rec.rank is None):
      self.undetermined += 1
    else:
      r = rec.rank
      self.rank_hist[r] += 1
      sign = 1 if positive else -1
      sums.update(ranked=1, rank_sum=r, rank2=int(r == 2),
                  sx=r, sy=sign, sxx=r * r, syy=1, sxy=r * sign)
      prefix = 'pos' if positive else 'neg'
      sums.update({f"{prefix}_ranked": 1, f"{prefix}_rank_sum": r})
      if (rec.is_cm):
        sums.update(cm_ranked=1, cm_rank_sum=r)
      self.torsion.update({(rec.torsion, 'ranked'): 1, (rec.torsion, 'rank_sum'): r})
      if (rec.sel2_rank is not None):
        self.selmer[(r, rec.sel2_rank)] += 1
      if (rec.sha2_rank is not None):
        self.sha2[(r, rec.sha2_rank)] += 1
      self._add_record((rec.torsion, r), rec.h_naive, rec.key)
    if (rec.sel2_rank is not None):
      sums.update(sel2_known=1, sel2_size_sum=2**rec.sel2_rank)
    if (rec.sha2_rank is not None):
      sums.update(sha2_known=1, sha2_sum=rec.sha2_rank)
    self.torsion[(rec.torsion, 'curves')] += 1
    bucket = self.bucket(rec.h_naive)
    self.buckets.update({(bucket, name): value for name, value in sums.items()})

  def bucket (self, height):
    "Index b of the geometric bucket [ratio^b, ratio^(b+1)) holding the height."
    return int(math.floor(math.log(max(height, 1)) / math.log(self.ratio)))

  def merge (self, other):
    "Return the report of the union of the two (disjoint) streams."
    if (self.ratio != other.ratio):
      raise ValueError(f"Cannot merge reports with bucket ratios {self.ratio} and {other.ratio}.")
    merged = StatReport(
      count=self.count + other.count,
      undetermined=self.undetermined + other.undetermined,
      max_height=max(self.max_height, other.max_height),
      ratio=self.ratio)
    for name in ('rank_hist', 'buckets', 'torsion', 'selmer', 'sha2'):
      total = getattr(merged, name)
      total.update(getattr(self, name))
      total.update(getattr(other, name))
    merged.records = dict(self.records)
    for key, (height, keys) in other.records.items():
      merged._add_records(key, height, keys)
    return merged

  def series (self, name):
    "Return the running series [(height edge, mean so far)] of one of the SERIES."
    numerator, denominator = SERIES[name]
    num = den = 0
    points = []
    for b in sorted({b for b, _ in self.buckets}):
      num += self.buckets[(b, numerator)]
      den += self.buckets[(b, denominator)]
      if (den > 0):
        points.append((self.ratio**(b + 1), num / den))
    return points

  def total (self, name):
    "Return the sum of one bucket quantity over all heights."
    return sum(value for (_, n), value in self.buckets.items() if (n == name))

  @property
  def average_rank (self):
    return _ratio(self.total('rank_sum'), self.total('ranked'))

  @property
  def average_rank_cm (self):
    return _ratio(self.total('cm_rank_sum'), self.total('cm_ranked'))

  @property
  def average_rank_negative (self):
    return _ratio(self.total('neg_rank_sum'), self.total('neg_ranked'))

  @property
  def average_rank_positive (self):
    return _ratio(self.total('pos_rank_sum'), self.total('pos_ranked'))

  @property
  def average_selmer_size (self):
    return _ratio(self.total('sel2_size_sum'), self.total('sel2_known'))

  @property
  def cm_count (self):
    return self.total('cm')

  @property
  def positive_fraction (self):
    return _ratio(self.total('positive'), self.count)

  @property
  def rank_sign_correlation (self):
    "Pearson coefficient of rank against the sign of the discriminant, None when undefined."
    n = self.total('ranked')
    sx, sy = self.total('sx'), self.total('sy')
    vx = n * self.total('sxx') - sx * sx
    vy = n * self.total('syy') - sy * sy
    if ((n < 2) or (vx <= 0) or (vy <= 0)):
      return None
    return (n * self.total('sxy') - sx * sy) / math.sqrt(vx * vy)

  @property
  def root_plus_fraction (self):
    known = self.total('root_known')
    return _ratio((known + self.total('root_sum')) // 2, known)

  def rank2_ratio (self, X=None):
    "Return the number of rank 2 curves over X^(19/24) (ln X)^(3/8), X the largest height by default."
    X = self.max_height if (X is None) else X
    if (X < 2):
      return None
    return self.rank_hist[2] / (X**(19 / 24) * math.log(X)**(3 / 8))

  def selmer_distribution (self, rank):
    "Return {sel2_rank: count} over the curves of the given rank with imported Selmer ranks."
    return {s: n for (r, s), n in sorted(self.selmer.items()) if (r == rank)}

  def sha2_distribution (self, rank):
    return {s: n for (r, s), n in sorted(self.sha2.items()) if (r == rank)}

  def torsion_average_rank (self, structure):
    return _ratio(self.torsion[(structure, 'rank_sum')], self.torsion[(structure, 'ranked')])

  def torsion_structures (self):
    return sorted({s for s, name in self.torsion if (name == 'curves')},
                  key=lambda s: (structure_order(s), s))

  def _add_record (self, key, height, curve_key):
    self._add_records(key, height, [curve_key])

  def _add_records (self, key, height, keys):
    best = self.records.get(key)
    if ((best is None) or (height < best[0])):
      self.records[key] = (height, sorted(keys))
    elif (height == best[0]):
      self.records[key] = (height, sorted(set(best[1]) | set(keys)))


def aggregate (records, ratio=SERIES_RATIO):
  "Return the StatReport of a stream of records."
  report = StatReport(ratio=ratio)
  for rec in records:
    report.add(rec)
  return report


def compare_to_reference (report, X=None):
  """
  Return rows (quantity, observed, published) lining the report up against the published
  figures: the rank distribution and average rank when X (the largest height by default)
  is a tabulated height, and the whole database proportions otherwise.
  """
  X = report.max_height if (X is None) else X
  rows = []
  if (X in reference.RANK_DISTRIBUTION):
    for rank, published in enumerate(reference.RANK_DISTRIBUTION[X]):
      rows.append((f"rank {rank} count", report.rank_hist[rank], published))
    rows.append(('average rank', report.average_rank, reference.AVERAGE_RANK[X]))
  rows.append(('positive discriminant fraction', report.positive_fraction,
               reference.POSITIVE_DISCRIMINANT_FRACTION))
  rows.append(('average rank, positive discriminant', report.average_rank_positive,
               reference.AVERAGE_RANK_POSITIVE_DISCRIMINANT))
  rows.append(('average rank, negative discriminant', report.average_rank_negative,
               reference.AVERAGE_RANK_NEGATIVE_DISCRIMINANT))
  rows.append(('rank/sign correlation', report.rank_sign_correlation, reference.RANK_SIGN_CORRELATION))
  rows.append(('rank 2 count constant', report.rank2_ratio(X), reference.RANK2_COUNT_CONSTANT))
  for torsion, rank, a4, a6, height, _ in reference.MINIMAL_HEIGHT_RECORDS:
    best = report.records.get((torsion, rank))
    if ((best is not None) and (best[0] <= height)):
      rows.append((f"least height {torsion} rank {rank}", best[0], height))
  return rows


def delaunay_sha_prob (p, r, n):
  "Probability that dim Sha[p] = 2n for curves of rank r under the Delaunay heuristic."
  _check_prime(p)
  if ((r < 0) or (n < 0)):
    raise ValueError(f"Rank and half dimension must be nonnegative, got r={r}, n={n}.")
  numerator = _tail_product(lambda i: 1 - p**-(2 * r + 2 * i - 1), n + 1)
  denominator = math.prod(1 - p**-(2 * i) for i in range(1, n + 1))
  return p**-(n * (2 * r + 2 * n - 1)) * numerator / denominator


def expected_sha2_size (r):
  "Expected |Sha[2]| for curves of rank r: 1 + 2^-(2r - 1)."
  if (r < 0):
    raise ValueError(f"Rank must be nonnegative, got {r}.")
  return 1 + 2.0**-(2 * r - 1)


def hs_predicted_count (group, X):
  """
  Asymptotic number of curves of uncalibrated height at most X with the given torsion:
  (4/zeta(10)) X^(5/6) for trivial torsion, c X^(1/2) for Z/2Z and c X^(1/3) for Z/3Z.
  """
  if (X <= 0):
    raise ValueError(f"Height bound must be positive, got {X}.")
  if (group == 'trivial'):
    return float(4 / mpmath.zeta(10) * mpmath.power(X, mpmath.mpf(5) / 6))
  if (group not in HS_CONSTANTS):
    raise ValueError(f"Torsion group must be one of: {['trivial'] + list(HS_CONSTANTS)}")
  constant, exponent = HS_CONSTANTS[group]
  return constant * X**exponent


def minimal_height_records (records):
  "Return {(torsion, rank): [records]} holding, per pair, every record of least naive height."
  best = {}
  for rec in records:
    if (rec.rank is None):
      continue
    key = (rec.torsion, rec.rank)
    current = best.get(key)
    if ((current is None) or (rec.h_naive < current[0].h_naive)):
      best[key] = [rec]
    elif (rec.h_naive == current[0].h_naive):
      current.append(rec)
  return {key: sorted(recs, key=lambda rec: rec.key) for key, recs in best.items()}


def pearson_r (pairs):
  "Return the Pearson correlation of the (x, y) pairs, or None when it is undefined."
  pairs = list(pairs)
  if (len(pairs) < 2):
    logger.warning("Correlation needs at least two pairs.")
    return None
  xs, ys = zip(*pairs)
  try:
    return statistics.correlation(xs, ys)
  except statistics.StatisticsError:
    logger.warning("Correlation undefined: a marginal is constant.")
    return None


def plot_series_svg (series, path, title='', ylabel=''):
  "Write a line chart of the named series {label: [(x, y)]} against height (log scale) as SVG."
  fig, ax = plt.subplots(figsize=(8, 5))
  for label, points in series.items():
    if (points):
      xs, ys = zip(*points)
      ax.plot(xs, ys, label=label)
  ax.set_xscale('log')
  ax.set_xlabel('height')
  ax.set_ylabel(ylabel)
  ax.set_title(title)
  if (len(series) > 1):
    ax.legend()
  fig.savefig(path, format='svg')
  plt.close(fig)
  return path


def pr_selmer_prob (p, d):
  "Probability that the p-Selmer group has dimension d under the Poonen-Rains model."
  _check_prime(p)
  if (d < 0):
    raise ValueError(f"Selmer dimension must be nonnegative, got {d}.")
  head = _tail_product(lambda j: 1 / (1 + p**-j), 0)
  return head * math.prod(p / (p**j - 1) for j in range(1, d + 1))


def render_report (report, X=None):
  "Return the report as plain text tables."
  lines = [f"curves: {report.count}",
           f"undetermined ranks (excluded from rank statistics): {report.undetermined}",
           f"largest naive height: {report.max_height}", '']
  ranks = sorted(report.rank_hist)
  lines.append(tabulate([[report.rank_hist[r] for r in ranks]],
                        headers=[f"rank {r}" for r in ranks]))
  lines.append('')
  summary = [
    ('average rank', report.average_rank),
    ('fraction with positive discriminant', report.positive_fraction),
    ('average rank, positive discriminant', report.average_rank_positive),
    ('average rank, negative discriminant', report.average_rank_negative),
    ('rank/sign correlation', report.rank_sign_correlation),
    ('root number +1 fraction', report.root_plus_fraction),
    ('CM curves', report.cm_count),
    ('average rank of CM curves', report.average_rank_cm),
    ('average 2-Selmer size', report.average_selmer_size),
    ('rank 2 count / X^(19/24) (ln X)^(3/8)', report.rank2_ratio(X)),
  ]
  lines.append(tabulate([(k, _fmt(v)) for k, v in summary], headers=['quantity', 'value']))
  lines.append('')
  lines.append(tabulate(
    [(s, report.torsion[(s, 'curves')], _fmt(report.torsion_average_rank(s)))
     for s in report.torsion_structures()],
    headers=['torsion', 'curves', 'average rank']))
  if (report.selmer):
    lines.append('')
    rows = []
    for rank in sorted({r for r, _ in report.selmer}):
      dist = report.selmer_distribution(rank)
      known = sum(dist.values())
      size = sum(2**s * n for s, n in dist.items()) / known
      rows.append((rank, known, _fmt(size), dict(report.sha2_distribution(rank))))
    lines.append(tabulate(rows, headers=['rank', 'with Selmer', 'average 2-Selmer size', 'Sha[2] ranks']))
  lines.append('')
  lines.append(tabulate(
    [(t, r, h, ' '.join(f"[{a4},{a6}]" for a4, a6 in keys))
     for (t, r), (h, keys) in sorted(report.records.items(), key=lambda kv: (structure_order(kv[0][0]), kv[0]))],
    headers=['torsion', 'rank', 'least height', 'curves']))
  comparison = compare_to_reference(report, X)
  lines.append('')
  lines.append(tabulate([(q, _fmt(o), _fmt(p)) for q, o, p in comparison],
                        headers=['quantity', 'observed', 'published']))
  return '\n'.join(lines) + '\n'


def theoretical_avg_selmer (n):
  "Average size of the n-Selmer group, sigma(n), for 2 <= n <= 5."
  if (not (2 <= n <= 5)):
    raise ValueError(f"Selmer order must be between 2 and 5, got {n}.")
  return int(divisor_sigma(n))


def torsion_census (window):
  """
  Count the curves of the window by torsion structure. Curves whose point counts
  mod small primes already force trivial torsion skip the full computation.
  """
  census = Counter()
  for c in enumerate_window(window):
    if (torsion_order_bound(c) == 1):
      census['trivial'] += 1
    else:
      census[torsion_subgroup(c).structure] += 1
  return census


def write_report_csv (report, path, X=None):
  "Write the report as CSV rows (section, key, value)."
  with open(path, 'w', newline='') as out:
    writer = csv.writer(out)
    writer.writerow(['section', 'key', 'value'])
    writer.writerow(['summary', 'curves', report.count])
    writer.writerow(['summary', 'undetermined', report.undetermined])
    writer.writerow(['summary', 'average_rank', _fmt(report.average_rank)])
    writer.writerow(['summary', 'positive_fraction', _fmt(report.positive_fraction)])
    writer.writerow(['summary', 'rank_sign_correlation', _fmt(report.rank_sign_correlation)])
    writer.writerow(['summary', 'root_plus_fraction', _fmt(report.root_plus_fraction)])
    writer.writerow(['summary', 'cm_count', report.cm_count])
    writer.writerow(['summary', 'rank2_ratio', _fmt(report.rank2_ratio(X))])
    for rank in sorted(report.rank_hist):
      writer.writerow(['rank', rank, report.rank_hist[rank]])
    for s in report.torsion_structures():
      writer.writerow(['torsion', s, report.torsion[(s, 'curves')]])
    for (rank, sel2), n in sorted(report.selmer.items()):
      writer.writerow(['selmer', f"{rank}:{sel2}", n])
    for (rank, sha2), n in sorted(report.sha2.items()):
      writer.writerow(['sha2', f"{rank}:{sha2}", n])
  return path


def write_series_csv (report, path, names=None):
  "Write the running series as CSV rows (series, height, value)."
  names = list(SERIES) if (names is None) else names
  with open(path, 'w', newline='') as out:
    writer = csv.writer(out)
    writer.writerow(['series', 'height', 'value'])
    for name in names:
      for x, y in report.series(name):
        writer.writerow([name, repr(x), repr(y)])
  return path


def _check_prime (p):
  if (not is_prime(p)):
    raise ValueError(f"Modulus must be prime, got {p}.")


def _fmt (value):
  if (value is None):
    return 'undefined'
  if (isinstance(value, float)):
    return f"{value:.6f}"
  return value


def _ratio (num, den):
  return (num / den) if den else None


def _tail_product (factor, start):
  "Product of factor(i) for i >= start, stopped once a factor is within PRODUCT_TOL of 1."
  product = 1.0
  i = start
  while True:
    f = factor(i)
    product *= f
    if ((i > start) and (abs(f - 1) < PRODUCT_TOL)):
      return product
    i += 1
