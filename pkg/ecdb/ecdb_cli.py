# Program to build and summarize a database of elliptic curves ordered by height:
# enumerate or sample curves into sharded run directories, determine their ranks,
# import 2-Selmer ranks, and emit reports, record tables and plots.
#   Last Modified: Add the single curve zero sum diagnostic.
#
import argparse
import csv
import json
import logging
import os
import sys
import textwrap
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from config.settings import LOG_LEVEL, OUTPUT_DIR_ENV
from ecdb import CURVES_SUBDIR, DataIntegrityError, RANKED_SUBDIR, SELMER_SUBDIR
import ecdb.store as store
from ecdb.enumeration import HeightWindow, SampleSpec, enumerate_window, sample_band, split_window
from ecdb.file_utils import ensure_dir, good_dir_path, good_file_path, write_atomic
from ecdb.lfunc import coeff_table
from ecdb.model import Curve, F1Curve, HeightKind, f1_to_short
from ecdb.pipeline import import_selmer, rank_curves, read_selmer_csv
from ecdb.run_config import RunConfig
from ecdb.stats import (SERIES, aggregate, minimal_height_records, plot_series_svg, render_report,
                        write_report_csv, write_series_csv)
from ecdb.zerosum import coefficient_limit, zero_sum_bound, zero_sum_terms

USAGE_EXIT_CODE = 1
INTEGRITY_EXIT_CODE = 2

PROG_NAME = 'ecdb'                     # program name
RUN_FILE = 'run.json'                  # run metadata, written into every run directory
REPORT_TEXT = 'report.txt'
REPORT_CSV = 'report.csv'
SERIES_CSV = 'series.csv'

SUBCOMMANDS = ['enumerate', 'sample', 'rank', 'import-selmer', 'stats', 'records', 'plot', 'zerosum']


class EcdbArgumentParser(argparse.ArgumentParser):
  "Argument parser which exits with the usage error code on bad arguments."

  def error (self, message):
    self.print_usage(sys.stderr)
    self.exit(USAGE_EXIT_CODE, f"({self.prog}): ERROR: {message}\n")


def check_run_dir (program_name, run_dir, writeable=False):
  """
  Check that the run directory is given and is a readable (optionally writeable) directory.
  If not, then exit out.
  """
  if (not good_dir_path(run_dir, writeable=writeable)):
    kind = 'writeable' if writeable else 'readable'
    _error_exit(program_name, f"A {kind} run directory must be specified (--run or ${OUTPUT_DIR_ENV}).",
                USAGE_EXIT_CODE)


def check_out_dir (program_name, out_dir):
  "Check that an output directory is given and can be created. If not, then exit out."
  if (not out_dir):
    _error_exit(program_name, f"An output directory must be specified (--out or ${OUTPUT_DIR_ENV}).",
                USAGE_EXIT_CODE)
  try:
    ensure_dir(out_dir)
  except OSError:
    _error_exit(program_name, f"Unable to create output directory '{out_dir}'.", USAGE_EXIT_CODE)
  check_run_dir(program_name, out_dir, writeable=True)


def check_selmer_file (program_name, selmer_path):
  "Check that the Selmer rank file is readable. If not, then exit out."
  if (not good_file_path(selmer_path)):
    _error_exit(program_name, f"A readable Selmer rank file must be specified, got '{selmer_path}'.",
                USAGE_EXIT_CODE)


def main (argv=None):
  """
  enumerate --kind K --lo LO --hi HI [--parts N] [--out DIR]
  sample --k K --count N [--seed S] [--out DIR]
  rank [--run DIR] [--delta-schedule D ...] [--search-bound B]
  import-selmer --selmer FILE [--run DIR]
  stats [--run DIR] [--height X]
  records [--run DIR]
  plot [--run DIR] [--series NAME ...] [--svg]
  zerosum --a4 A4 --a6 A6 --delta D [--terms FILE]
  """

  # the main method takes no arguments so it can be called by setuptools
  if (argv is None):                   # if called by setuptools
    argv = sys.argv[1:]                # then fetch the arguments from the system

  parser = _build_parser()
  args = vars(parser.parse_args(argv))
  if (not args.get('command')):
    parser.error(f"A subcommand must be given, one of: {SUBCOMMANDS}")

  _setup_logging(args.get('verbose'))
  args['PROG_NAME'] = PROG_NAME
  if (not args.get('run_dir')):
    args['run_dir'] = os.environ.get(OUTPUT_DIR_ENV)

  command = args.get('command')
  try:
    COMMANDS[command](args)
  except DataIntegrityError as die:
    _error_exit(PROG_NAME, str(die), INTEGRITY_EXIT_CODE)
  except ValueError as ve:
    _error_exit(PROG_NAME, str(ve), USAGE_EXIT_CODE)
  return 0


def do_enumerate (args):
  "Enumerate the curves of a height window into sealed shards of the curves directory."
  out_dir = args.get('run_dir')
  check_out_dir(PROG_NAME, out_dir)
  config = _make_config(args, out_dir=out_dir)
  window = HeightWindow(HeightKind(config.kind), config.lo, config.hi)
  chash = _write_run_file(out_dir, config)

  curves_dir = os.path.join(out_dir, CURVES_SUBDIR)
  columns = store.F1_COLUMNS if (window.kind == HeightKind.F1) else store.CURVE_COLUMNS
  todo = store.resume(curves_dir, split_window(window, args.get('parts', 1)))
  _verbose(args, f"Enumerating {len(todo)} shard(s) of {window.kind.value} heights in [{window.lo}, {window.hi}).")

  if ((config.threads > 1) and (len(todo) > 1)):
    with ProcessPoolExecutor(max_workers=config.threads) as pool:
      results = pool.map(_enumerate_list, todo)
      for part, curves in zip(todo, results):
        _store_curves(curves_dir, part, chash, columns, curves)
  else:
    for part in todo:
      _store_curves(curves_dir, part, chash, columns, enumerate_window(part))

  total = sum(s.row_count for s in store.list_shards(curves_dir))
  _verbose(args, f"Enumerated {total} curves into {curves_dir}.")


def do_import_selmer (args):
  "Apply a file of 2-Selmer ranks to the ranked shards, writing sealed Selmer shards."
  run_dir = args.get('run_dir')
  check_run_dir(PROG_NAME, run_dir, writeable=True)
  selmer_path = args.get('selmer_path')
  check_selmer_file(PROG_NAME, selmer_path)
  config = _update_run_file(run_dir, {'selmer_path': os.path.abspath(selmer_path)})
  chash = config.policy().config_hash()

  selmer = read_selmer_csv(selmer_path)
  matched = set()
  ranked_dir = os.path.join(run_dir, RANKED_SUBDIR)
  selmer_dir = os.path.join(run_dir, SELMER_SUBDIR)
  for ranked in _sealed_shards(ranked_dir):
    records = list(store.read_records(ranked))
    keys = {rec.key for rec in records if rec.key in selmer}
    matched |= keys
    target = store.open_shard(selmer_dir, ranked.window, chash)
    if (target.sealed):
      continue
    updated, _ = import_selmer(records, {key: selmer[key] for key in keys})
    store.seal_shard(store.write_records(target, updated))

  unknown = sorted(set(selmer) - matched)
  for key in unknown:
    logging.getLogger(__name__).warning(f"Selmer rank for unknown curve [{key[0]},{key[1]}] ignored.")
  _verbose(args, f"Imported {len(matched)} Selmer ranks; {len(unknown)} unknown curves ignored.")


def do_plot (args):
  "Write the running series as CSV and, when asked, one SVG chart per series."
  run_dir = args.get('run_dir')
  check_run_dir(PROG_NAME, run_dir, writeable=True)
  report = _merged_report(run_dir)
  names = args.get('series') or list(SERIES)
  path = write_series_csv(report, os.path.join(run_dir, SERIES_CSV), names)
  _verbose(args, f"Wrote series to {path}.")
  if (args.get('svg')):
    for name in names:
      svg = plot_series_svg({name: report.series(name)}, os.path.join(run_dir, f"{name}.svg"),
                            title=name.replace('_', ' '), ylabel=name.replace('_', ' '))
      _verbose(args, f"Wrote plot to {svg}.")


def do_rank (args):
  "Determine the ranks of the curves of every sealed curve shard into the ranked shards."
  run_dir = args.get('run_dir')
  check_run_dir(PROG_NAME, run_dir, writeable=True)
  overrides = {k: args[k] for k in ('delta_schedule', 'search_bound', 'search_denom_bound',
                                    'numeric_root_number') if (args.get(k) is not None)}
  config = _update_run_file(run_dir, overrides)
  policy = replace(config.policy(), selmer_path=None)   # Selmer imports do not change ranked shards
  chash = policy.config_hash()
  threads = args.get('threads', config.threads)

  ranked_dir = os.path.join(run_dir, RANKED_SUBDIR)
  for source in _sealed_shards(os.path.join(run_dir, CURVES_SUBDIR)):
    target = store.open_shard(ranked_dir, source.window, chash)
    if (target.sealed):
      continue
    curves = [c for c in (_short_curve(c) for c in store.read_curves(source))
              if ((c.a4, c.a6) not in target.keys)]
    _verbose(args, f"Ranking {len(curves)} curves of {os.path.basename(source.path)}.")
    store.write_records(target, rank_curves(curves, policy, threads=threads))
    store.seal_shard(target)
    _verbose(args, f"Sealed {os.path.basename(target.path)} with {target.row_count} records.")


def do_records (args):
  "Print the curves of least naive height for each torsion structure and rank."
  run_dir = args.get('run_dir')
  check_run_dir(PROG_NAME, run_dir)
  best = minimal_height_records(_all_records(run_dir))
  writer = csv.writer(sys.stdout, lineterminator='\n')
  writer.writerow(['torsion', 'rank', 'a4', 'a6', 'h_naive', 'cond'])
  for (torsion, rank), recs in sorted(best.items()):
    for rec in recs:
      writer.writerow([torsion, rank, rec.a4, rec.a6, rec.h_naive, rec.cond])


def do_sample (args):
  "Draw a seeded uniform sample of curves from a height band into a sealed shard."
  out_dir = args.get('run_dir')
  check_out_dir(PROG_NAME, out_dir)
  config = _make_config(args, out_dir=out_dir)
  spec = SampleSpec(config.sample_k, config.sample_count, config.seed)
  chash = _write_run_file(out_dir, config)
  curves_dir = os.path.join(out_dir, CURVES_SUBDIR)
  if (not store.resume(curves_dir, [spec.window])):
    _verbose(args, f"Sample of band 10^{spec.k} already complete in {curves_dir}.")
    return
  _store_curves(curves_dir, spec.window, chash, store.CURVE_COLUMNS, sample_band(spec))
  _verbose(args, f"Sampled {spec.count} curves from band 10^{spec.k} into {curves_dir}.")


def do_stats (args):
  "Print the statistics report of a run and save it as text and CSV in the run directory."
  run_dir = args.get('run_dir')
  check_run_dir(PROG_NAME, run_dir, writeable=True)
  report = _merged_report(run_dir)
  X = args.get('height')
  text = render_report(report, X)
  write_atomic(os.path.join(run_dir, REPORT_TEXT), text)
  write_report_csv(report, os.path.join(run_dir, REPORT_CSV), X)
  write_series_csv(report, os.path.join(run_dir, SERIES_CSV))
  print(text, end='')


def do_zerosum (args):
  "Print the conductor and zero sum bound of one curve; optionally write the per term data."
  c = Curve(args.get('a4'), args.get('a6'))
  delta = args.get('delta')
  table = coeff_table(c, coefficient_limit(delta))
  terms = zero_sum_terms(c, delta, table)
  result = zero_sum_bound(c, delta, table, N=terms.conductor)
  print(f"curve: {c}")
  print(f"conductor: {terms.conductor}")
  print(f"delta: {delta}")
  print(f"bound: {result.sum_value:.10f}")
  print(f"rank ceiling: {result.rank_ceiling}")
  terms_path = args.get('terms_path')
  if (terms_path):
    with open(terms_path, 'w', newline='') as out:
      writer = csv.writer(out)
      writer.writerow(['n', 'c_n', 'weight', 'term'])
      writer.writerow(['conductor', '', '', repr(terms.conductor_term)])
      writer.writerow(['digamma', '', '', repr(terms.digamma_term)])
      for n, c_n, weight, term in terms.rows:
        writer.writerow([n, repr(c_n), repr(weight), repr(term)])
    _verbose(args, f"Wrote {len(terms.rows)} terms to {terms_path}.")


COMMANDS = {
  'enumerate': do_enumerate,
  'sample': do_sample,
  'rank': do_rank,
  'import-selmer': do_import_selmer,
  'stats': do_stats,
  'records': do_records,
  'plot': do_plot,
  'zerosum': do_zerosum,
}


def _all_records (run_dir):
  "Generator of the records of the latest stage (Selmer, else ranked) of the run."
  for shard in _sealed_shards(_record_dir(run_dir)):
    yield from store.read_records(shard)


def _build_parser ():
  parser = EcdbArgumentParser(
    prog=PROG_NAME,
    formatter_class=argparse.RawTextHelpFormatter,
    description=f"{PROG_NAME}: Builds and summarizes databases of elliptic curves ordered by height."
  )

  common = argparse.ArgumentParser(add_help=False)
  common.add_argument(
    '-v', '--verbose', dest='verbose', action='store_true',
    default=False,
    help='Print informational messages during processing [default: False (non-verbose mode)].'
  )
  common.add_argument(
    '--threads', dest='threads', type=int,
    default=argparse.SUPPRESS,
    help='(Optional) Number of worker processes for enumerate and rank [default: 1]'
  )

  out_dir = argparse.ArgumentParser(add_help=False)
  out_dir.add_argument(
    '--out', dest='run_dir',
    default=argparse.SUPPRESS,
    help=textwrap.dedent(f"(Optional) Path to the output run directory [default: ${OUTPUT_DIR_ENV}]")
  )

  run_dir = argparse.ArgumentParser(add_help=False)
  run_dir.add_argument(
    '--run', dest='run_dir',
    default=argparse.SUPPRESS,
    help=textwrap.dedent(f"(Optional) Path to an existing run directory [default: ${OUTPUT_DIR_ENV}]")
  )

  subparsers = parser.add_subparsers(dest='command', parser_class=EcdbArgumentParser)

  enum_cmd = subparsers.add_parser('enumerate', parents=[common, out_dir],
    help='Enumerate every curve of a height window.')
  enum_cmd.add_argument(
    '--kind', dest='kind', choices=[k.value for k in HeightKind], default=HeightKind.NAIVE.value,
    help=f"Kind of height ordering the window [default: {HeightKind.NAIVE.value}]"
  )
  enum_cmd.add_argument('--lo', dest='lo', type=int, required=True, help='Least height of the window')
  enum_cmd.add_argument('--hi', dest='hi', type=int, required=True, help='Height bound (exclusive) of the window')
  enum_cmd.add_argument(
    '--parts', dest='parts', type=int, default=1,
    help='(Optional) Number of shards the window is split into [default: 1]'
  )

  sample_cmd = subparsers.add_parser('sample', parents=[common, out_dir],
    help='Sample curves uniformly from the naive height band [10^k, 2*10^k).')
  sample_cmd.add_argument('--k', dest='sample_k', type=int, required=True, help='Exponent k of the band')
  sample_cmd.add_argument('--count', dest='sample_count', type=int, required=True, help='Number of curves to draw')
  sample_cmd.add_argument(
    '--seed', dest='seed', type=int, default=0,
    help='(Optional) Seed of the PCG64 generator [default: 0]'
  )

  rank_cmd = subparsers.add_parser('rank', parents=[common, run_dir],
    help='Determine the ranks of the enumerated or sampled curves.')
  rank_cmd.add_argument(
    '--delta-schedule', '--delta_schedule', dest='delta_schedule', type=float, nargs='+',
    default=argparse.SUPPRESS,
    help='(Optional) Ascending kernel widths tried by the zero sum [default: 1 1.5 2 2.5 3]'
  )
  rank_cmd.add_argument(
    '--search-bound', '--search_bound', dest='search_bound', type=int,
    default=argparse.SUPPRESS,
    help='(Optional) Numerator bound of the rational point search'
  )
  rank_cmd.add_argument(
    '--search-denom-bound', '--search_denom_bound', dest='search_denom_bound', type=int,
    default=argparse.SUPPRESS,
    help='(Optional) Denominator root bound of the rational point search'
  )
  rank_cmd.add_argument(
    '--no-numeric-root-number', dest='numeric_root_number', action='store_false',
    default=argparse.SUPPRESS,
    help='Do not fall back to the numeric root number when the local formulas do not apply.'
  )

  selmer_cmd = subparsers.add_parser('import-selmer', parents=[common, run_dir],
    help='Import 2-Selmer ranks and tighten the rank bounds.')
  selmer_cmd.add_argument(
    '--selmer', dest='selmer_path', required=True,
    help='Path to a CSV file with the columns a4, a6, sel2_rank'
  )

  stats_cmd = subparsers.add_parser('stats', parents=[common, run_dir],
    help='Report the statistics of a ranked run.')
  stats_cmd.add_argument(
    '--height', dest='height', type=int, default=argparse.SUPPRESS,
    help='(Optional) Height X used for the comparisons [default: largest height in the run]'
  )

  subparsers.add_parser('records', parents=[common, run_dir],
    help='List the curves of least height for each torsion structure and rank.')

  plot_cmd = subparsers.add_parser('plot', parents=[common, run_dir],
    help='Write the running averages as CSV series and SVG charts.')
  plot_cmd.add_argument(
    '--series', dest='series', nargs='+', choices=list(SERIES), default=argparse.SUPPRESS,
    help=f"(Optional) Series to write [default: all of {list(SERIES)}]"
  )
  plot_cmd.add_argument(
    '--svg', dest='svg', action='store_true', default=False,
    help='Also write one SVG chart per series [default: False].'
  )

  zerosum_cmd = subparsers.add_parser('zerosum', parents=[common],
    help='Evaluate the zero sum bound of a single curve.')
  zerosum_cmd.add_argument('--a4', dest='a4', type=int, required=True, help='Coefficient a4')
  zerosum_cmd.add_argument('--a6', dest='a6', type=int, required=True, help='Coefficient a6')
  zerosum_cmd.add_argument('--delta', dest='delta', type=float, required=True, help='Kernel width')
  zerosum_cmd.add_argument(
    '--terms', dest='terms_path', default=argparse.SUPPRESS,
    help='(Optional) Path of a CSV file receiving the per term contributions'
  )
  return parser


def _enumerate_list (window):
  return list(enumerate_window(window))


def _error_exit (program_name, msg, code):
  errMsg = "({}): ERROR: {} Exiting...".format(program_name, msg)
  print(errMsg, file=sys.stderr)
  sys.exit(code)


def _make_config (args, out_dir):
  return RunConfig.from_args({**args, 'out_dir': os.path.abspath(out_dir)})


def _merged_report (run_dir):
  "Merge the reports of the record shards of the run, one shard at a time."
  report = None
  for shard in _sealed_shards(_record_dir(run_dir)):
    part = aggregate(store.read_records(shard))
    report = part if (report is None) else report.merge(part)
  if (report is None):
    raise ValueError(f"No sealed record shards found under {run_dir}.")
  return report


def _read_run_file (run_dir):
  path = os.path.join(run_dir, RUN_FILE)
  if (not good_file_path(path)):
    raise ValueError(f"Run directory {run_dir} has no readable {RUN_FILE}.")
  with open(path) as run_file:
    meta = json.load(run_file)
  return RunConfig(**meta['config'])


def _record_dir (run_dir):
  selmer_dir = os.path.join(run_dir, SELMER_SUBDIR)
  if (any(s.sealed for s in store.list_shards(selmer_dir))):
    return selmer_dir
  return os.path.join(run_dir, RANKED_SUBDIR)


def _sealed_shards (directory):
  "Return the sealed shards of the directory, logging any left unsealed."
  shards = store.list_shards(directory)
  for shard in shards:
    if (not shard.sealed):
      logging.getLogger(__name__).warning(f"Skipping unsealed shard {shard.path}.")
  return [s for s in shards if s.sealed]


def _setup_logging (verbose):
  logging.basicConfig(
    level=logging.DEBUG if verbose else getattr(logging, LOG_LEVEL),
    format=f"({PROG_NAME}): %(levelname)s: %(message)s",
    stream=sys.stderr)


def _short_curve (c):
  return f1_to_short(c).curve if isinstance(c, F1Curve) else c


def _store_curves (directory, window, chash, columns, curves):
  shard = store.open_shard(directory, window, chash, columns)
  if (not shard.sealed):
    store.seal_shard(store.write_curves(shard, curves))
  return shard


def _update_run_file (run_dir, overrides):
  "Apply the overrides to the config of the run, rewrite the run metadata and return the config."
  config = _read_run_file(run_dir)
  if (overrides):
    config = RunConfig.from_json(json.dumps({**json.loads(config.to_json()), **overrides}))
    _write_run_file(run_dir, config)
  return config


def _verbose (args, msg):
  if (args.get('verbose')):
    print(f"({PROG_NAME}): {msg}", file=sys.stderr)


def _write_run_file (run_dir, config):
  "Write the run metadata (the full config and its hash) and return the hash of its policy."
  chash = config.policy().config_hash()
  meta = {'program': PROG_NAME, 'config': json.loads(config.to_json()), 'config_hash': chash}
  write_atomic(os.path.join(run_dir, RUN_FILE), json.dumps(meta, sort_keys=True, indent=2) + '\n')
  return chash



if __name__ == "__main__":
  sys.exit(main())
