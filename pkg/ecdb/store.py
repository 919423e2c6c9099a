#
# Module for sharded, resumable storage: one CSV file per height window with a JSON
# sidecar holding its status, row count, checksum and config hash; plus the binary
# cache of a_p values.
#   Last Modified: Read shards in chunks with pandas.
#
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ecdb import DataIntegrityError
from ecdb.enumeration import HeightWindow
from ecdb.file_utils import ensure_dir, gen_file_paths, truncate_torn_tail, write_atomic
from ecdb.model import Curve, F1Curve, HeightKind, height
from ecdb.pipeline import CurveRecord

logger = logging.getLogger(__name__)

IN_PROGRESS = 'in-progress'
SEALED = 'sealed'

RECORD_COLUMNS = [
  'a4', 'a6', 'h_naive', 'h_uncal', 'disc', 'cond', 'tamagawa', 'torsion', 'root_number',
  'rank_lower', 'rank_upper', 'rank', 'rank_status', 'sel2_rank', 'sha2_rank', 'is_cm'
]
CURVE_COLUMNS = ['a4', 'a6']
F1_COLUMNS = ['a2', 'a3', 'a4']
TEXT_COLUMNS = ['torsion', 'rank_status']

META_EXT = '.meta'
SHARD_EXT = '.csv'

FNV_OFFSET = 0xcbf29ce484222325
FNV_PRIME = 0x100000001b3
FNV_MASK = 0xffffffffffffffff

AP_CACHE_DTYPE = np.dtype([('p', '<u8'), ('ap', '<i8')])
READ_CHUNK_ROWS = 10000
AP_KEY_DTYPE = np.dtype('<i8')


@dataclass
class Shard:
  "One height window of a run, stored as a CSV file with a metadata sidecar."
  window: HeightWindow
  path: str
  columns: list
  config_hash: str = ''
  row_count: int = 0
  checksum: int = FNV_OFFSET
  status: str = IN_PROGRESS
  keys: set = field(default_factory=set, repr=False)

  @property
  def meta_path (self):
    return meta_path(self.path)

  @property
  def sealed (self):
    return self.status == SEALED


def fnv1a_64 (data, start=FNV_OFFSET):
  "Return the 64-bit FNV-1a hash of the bytes, continuing from the given state."
  h = start
  for byte in data:
    h = ((h ^ byte) * FNV_PRIME) & FNV_MASK
  return h


def list_shards (directory):
  "Return the shards described by the sidecars in the directory, ordered by window."
  if (not os.path.isdir(directory)):
    return []
  shards = [_read_meta(path) for path in gen_file_paths(directory, [META_EXT])]
  return sorted(shards, key=lambda s: (s.window.kind.value, s.window.lo, s.window.hi))


def meta_path (shard_file):
  return os.path.splitext(shard_file)[0] + META_EXT


def open_shard (directory, window, config_hash='', columns=RECORD_COLUMNS):
  """
  Open the shard of the window in the directory for writing, creating it when absent.
  An in-progress shard is recovered: a torn last line is cut and the row count,
  checksum and key set are rebuilt from the file. Raises DataIntegrityError when the
  existing shard was written under another config or with other columns.
  """
  ensure_dir(directory)
  path = shard_path(directory, window)
  if (os.path.exists(meta_path(path))):
    shard = _read_meta(meta_path(path))
    if (config_hash and shard.config_hash and (shard.config_hash != config_hash)):
      raise DataIntegrityError(f"Shard {path} was written with another configuration.")
    if (shard.columns != list(columns)):
      raise DataIntegrityError(f"Shard {path} has columns {shard.columns}, expected {list(columns)}.")
    if (shard.sealed):
      return shard
    cut = truncate_torn_tail(path)
    if (cut):
      logger.warning(f"Cut a torn line of {cut} bytes from {path}.")
    _rebuild(shard)
    return shard

  shard = Shard(window=window, path=path, columns=list(columns), config_hash=config_hash)
  header = (','.join(shard.columns) + '\n').encode('utf-8')
  with open(path, 'wb') as out:
    out.write(header)
  shard.checksum = fnv1a_64(header)
  _write_meta(shard)
  return shard


def read_ap_cache (path):
  "Read an a_p cache file: return the curve and a dictionary of primes to a_p."
  data = open(path, 'rb').read()
  key_size = 2 * AP_KEY_DTYPE.itemsize
  if ((len(data) < key_size) or ((len(data) - key_size) % AP_CACHE_DTYPE.itemsize)):
    raise DataIntegrityError(f"a_p cache {path} has a malformed length {len(data)}.")
  a4, a6 = np.frombuffer(data[:key_size], dtype=AP_KEY_DTYPE)
  pairs = np.frombuffer(data[key_size:], dtype=AP_CACHE_DTYPE)
  return (Curve(int(a4), int(a6)), {int(p): int(a) for p, a in pairs})


def read_curves (shard):
  "Generator of the curves stored in a shard of enumerated curves."
  kind = F1Curve if (shard.columns == F1_COLUMNS) else Curve
  for row in _read_rows(shard):
    yield kind(*(int(v) for v in row))


def read_records (shard):
  "Generator of the CurveRecords of a shard, after verifying its checksum."
  for row in _read_rows(shard):
    yield parse_record(row)


def parse_record (values):
  "Parse the CSV fields of one record row."
  if (len(values) != len(RECORD_COLUMNS)):
    raise DataIntegrityError(f"Record row has {len(values)} fields, expected {len(RECORD_COLUMNS)}.")
  parsed = {}
  for name, value in zip(RECORD_COLUMNS, values):
    if (name in TEXT_COLUMNS):
      parsed[name] = value
    elif (value == ''):
      parsed[name] = None
    else:
      parsed[name] = int(value)
  parsed['is_cm'] = bool(parsed['is_cm'])
  return CurveRecord(**parsed)


def render_record (rec):
  "Return the CSV fields of a record: decimal integers, empty fields for absent values."
  values = []
  for name in RECORD_COLUMNS:
    value = getattr(rec, name)
    if (isinstance(value, bool)):
      values.append('1' if value else '0')
    elif (value is None):
      values.append('')
    else:
      values.append(str(value))
  return values


def resume (directory, planned=None):
  """
  Return the windows still to be done in the directory: the planned windows without
  a sealed shard when a plan is given, else the windows of the unsealed shards.
  """
  shards = list_shards(directory)
  sealed = {s.window for s in shards if s.sealed}
  if (planned is None):
    return [s.window for s in shards if (not s.sealed)]
  return [w for w in planned if (w not in sealed)]


def seal_shard (shard):
  "Verify the shard file against its checksum and mark it sealed (immutable)."
  if (shard.sealed):
    return shard
  _verify(shard)
  shard.status = SEALED
  _write_meta(shard)
  return shard


def shard_path (directory, window):
  return os.path.join(directory, f"shard_{window.kind.value}_{window.lo}_{window.hi}{SHARD_EXT}")


def write_ap_cache (path, curve, aps):
  "Write the curve key and the (p, a_p) pairs, sorted by p, as little-endian binary."
  pairs = np.array(sorted(aps.items()), dtype=AP_CACHE_DTYPE) if aps else np.zeros(0, AP_CACHE_DTYPE)
  with open(path, 'wb') as out:
    out.write(np.array([curve.a4, curve.a6], dtype=AP_KEY_DTYPE).tobytes())
    out.write(pairs.tobytes())
  return path


def write_curves (shard, curves):
  "Append enumerated curves to the shard, skipping those already present."
  rows = []
  for c in curves:
    if (not shard.window.contains(height(c, shard.window.kind))):
      raise ValueError(f"Curve {c} lies outside the shard window [{shard.window.lo}, {shard.window.hi}).")
    key = (c.a2, c.a3, c.a4) if isinstance(c, F1Curve) else (c.a4, c.a6)
    rows.append((key, [str(v) for v in key]))
  return _append_rows(shard, rows)


def write_records(shard, records):
  """
  Append records to the shard. Records already present (by their (a4, a6) key) are
  skipped so a replayed batch changes nothing. Raises ValueError for a sealed shard or
  a record whose height lies outside the window (F1 windows are not height checked).
  """
  rows = []
  for rec in records:
    h = _record_height(rec, shard.window.kind)
    if ((h is not None) and (not shard.window.contains(h))):
      raise ValueError(f"Record {rec.curve} of height {h} lies outside the shard window [{shard.window.lo}, {shard.window.hi}).")
    rows.append((rec.key, render_record(rec)))
  return _append_rows(shard, rows)


def _append_rows (shard, rows):
  if (shard.sealed):
    raise ValueError(f"Shard {shard.path} is sealed.")
  with open(shard.path, 'ab') as out:
    for key, values in rows:
      if (key in shard.keys):
        continue
      line = (','.join(values) + '\n').encode('utf-8')
      out.write(line)
      shard.checksum = fnv1a_64(line, shard.checksum)
      shard.row_count += 1
      shard.keys.add(key)
    out.flush()
    os.fsync(out.fileno())
  _write_meta(shard)
  return shard


def _read_meta (path):
  with open(path) as meta_file:
    meta = json.load(meta_file)
  window = HeightWindow(**meta['window'])
  return Shard(window=window, path=os.path.splitext(path)[0] + SHARD_EXT, columns=meta['columns'],
               config_hash=meta['config_hash'], row_count=meta['row_count'],
               checksum=int(meta['checksum'], 16), status=meta['status'])


def _read_rows (shard):
  "Verify the shard and yield its rows (without the header) as lists of fields."
  _verify(shard)
  header = list(pd.read_csv(shard.path, dtype=str, nrows=0).columns)
  if (header != shard.columns):
    raise DataIntegrityError(f"Shard {shard.path} has the header {header}.")
  with pd.read_csv(shard.path, dtype=str, keep_default_na=False, chunksize=READ_CHUNK_ROWS) as reader:
    for chunk in reader:
      yield from chunk.values.tolist()


def _rebuild (shard):
  data = open(shard.path, 'rb').read()
  lines = data.split(b'\n')[:-1]
  shard.checksum = fnv1a_64(data)
  shard.row_count = len(lines) - 1
  key_width = 3 if (shard.columns == F1_COLUMNS) else 2
  shard.keys = {tuple(int(v) for v in line.split(b',')[:key_width]) for line in lines[1:]}


def _record_height (rec, kind):
  if (kind == HeightKind.NAIVE):
    return rec.h_naive
  if (kind == HeightKind.UNCALIBRATED):
    return rec.h_uncal
  return None


def _verify (shard):
  data = open(shard.path, 'rb').read()
  checksum = fnv1a_64(data)
  rows = data.count(b'\n') - 1
  if ((checksum != shard.checksum) or (rows != shard.row_count)):
    raise DataIntegrityError(f"Shard {shard.path} is corrupt: checksum or row count mismatch.")


def _write_meta (shard):
  meta = {
    'window': {'kind': shard.window.kind.value, 'lo': shard.window.lo, 'hi': shard.window.hi},
    'status': shard.status,
    'checksum': f"{shard.checksum:016x}",
    'row_count': shard.row_count,
    'config_hash': shard.config_hash,
    'columns': shard.columns,
  }
  write_atomic(shard.meta_path, json.dumps(meta, sort_keys=True) + '\n')
