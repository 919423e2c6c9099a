# Tests of the sharded storage module.
#   Last Modified: Read shards in chunks.
#
import json
import os
import pytest
import tempfile

import ecdb.store as store
from ecdb import DataIntegrityError
from ecdb.enumeration import HeightWindow, enumerate_window
from ecdb.model import Curve, F1Curve, HeightKind, discriminant, height_naive, height_uncalibrated
from ecdb.pipeline import CurveRecord, GRH_BSD, UNDETERMINED

WINDOW = HeightWindow(HeightKind.NAIVE, 0, 1000)


def make_record (a4, a6, rank=1, status=GRH_BSD, sel2=None, is_cm=False):
  c = Curve(a4, a6)
  return CurveRecord(a4=a4, a6=a6, h_naive=height_naive(c), h_uncal=height_uncalibrated(c),
                     disc=discriminant(c), cond=92, tamagawa=1, torsion='trivial', root_number=-1,
                     rank_lower=1 if rank else 0, rank_upper=1 if rank is not None else 2, rank=rank,
                     rank_status=status, sel2_rank=sel2, is_cm=is_cm)


class TestShards(object):

  def test_fnv1a(self):
    assert store.fnv1a_64(b'') == 0xcbf29ce484222325
    assert store.fnv1a_64(b'a') == 0xaf63dc4c8601ec8c
    assert store.fnv1a_64(b'bar', store.fnv1a_64(b'foo')) == store.fnv1a_64(b'foobar')


  def test_shard_path(self):
    assert store.shard_path('/run', WINDOW) == '/run/shard_naive_0_1000.csv'
    assert store.meta_path('/run/shard_naive_0_1000.csv') == '/run/shard_naive_0_1000.meta'


  def test_open_new_shard(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.open_shard(tmpdir, WINDOW, 'abc')
      assert shard.row_count == 0
      assert not shard.sealed
      assert os.path.isfile(shard.path)
      with open(shard.meta_path) as meta_file:
        meta = json.load(meta_file)
      assert meta['status'] == store.IN_PROGRESS
      assert meta['config_hash'] == 'abc'
      assert meta['window'] == {'kind': 'naive', 'lo': 0, 'hi': 1000}
      with open(shard.path) as shard_file:
        assert shard_file.read() == ','.join(store.RECORD_COLUMNS) + '\n'


  def test_records_round_trip(self):
    records = [make_record(-1, 1), make_record(1, 1, rank=None, status=UNDETERMINED),
               make_record(0, 1, rank=0, sel2=1, is_cm=True)]
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.write_records(store.open_shard(tmpdir, WINDOW, 'abc'), records)
      assert shard.row_count == 3
      store.seal_shard(shard)
      [listed] = store.list_shards(tmpdir)
      assert listed.sealed
      assert listed.row_count == 3
      assert list(store.read_records(listed)) == records


  def test_render_record(self):
    fields = store.render_record(make_record(1, 1, rank=None, status=UNDETERMINED, is_cm=True))
    assert fields[store.RECORD_COLUMNS.index('rank')] == ''
    assert fields[store.RECORD_COLUMNS.index('rank_status')] == 'undetermined'
    assert fields[store.RECORD_COLUMNS.index('is_cm')] == '1'
    assert fields[store.RECORD_COLUMNS.index('disc')] == '-496'


  def test_parse_record_bad(self):
    with pytest.raises(DataIntegrityError, match='fields, expected'):
      store.parse_record(['1', '2'])


  def test_write_idempotent(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.open_shard(tmpdir, WINDOW, 'abc')
      store.write_records(shard, [make_record(-1, 1)])
      checksum = shard.checksum
      store.write_records(shard, [make_record(-1, 1)])
      assert shard.row_count == 1
      assert shard.checksum == checksum


  def test_write_outside_window(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.open_shard(tmpdir, HeightWindow(HeightKind.NAIVE, 0, 27), 'abc')
      with pytest.raises(ValueError, match='outside the shard window'):
        store.write_records(shard, [make_record(-1, 1)])
      with pytest.raises(ValueError, match='outside the shard window'):
        store.write_curves(shard, [Curve(-1, 1)])


  def test_write_sealed(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.seal_shard(store.open_shard(tmpdir, WINDOW, 'abc'))
      with pytest.raises(ValueError, match='is sealed'):
        store.write_records(shard, [make_record(-1, 1)])


  def test_config_mismatch(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      store.open_shard(tmpdir, WINDOW, 'abc')
      with pytest.raises(DataIntegrityError, match='another configuration'):
        store.open_shard(tmpdir, WINDOW, 'xyz')
      with pytest.raises(DataIntegrityError, match='has columns'):
        store.open_shard(tmpdir, WINDOW, 'abc', store.CURVE_COLUMNS)


  def test_corrupt_shard(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.seal_shard(store.write_records(store.open_shard(tmpdir, WINDOW, 'abc'),
                                                   [make_record(-1, 1)]))
      with open(shard.path, 'rb+') as fyl:
        data = fyl.read()
        fyl.seek(0)
        fyl.write(data.replace(b'-1,1,', b'-1,2,', 1))
      with pytest.raises(DataIntegrityError, match='is corrupt'):
        list(store.read_records(store.list_shards(tmpdir)[0]))


  def test_torn_line_recovery(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.write_records(store.open_shard(tmpdir, WINDOW, 'abc'), [make_record(-1, 1)])
      good_checksum = shard.checksum
      with open(shard.path, 'ab') as fyl:
        fyl.write(b'1,1,27,1,-49')
      reopened = store.open_shard(tmpdir, WINDOW, 'abc')
      assert reopened.row_count == 1
      assert reopened.checksum == good_checksum
      assert reopened.keys == {(-1, 1)}
      store.write_records(reopened, [make_record(1, 1)])
      store.seal_shard(reopened)
      assert [rec.key for rec in store.read_records(reopened)] == [(-1, 1), (1, 1)]


  def test_curves_round_trip(self):
    curves = list(enumerate_window(WINDOW))
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.open_shard(tmpdir, WINDOW, 'abc', store.CURVE_COLUMNS)
      store.seal_shard(store.write_curves(shard, curves))
      assert list(store.read_curves(store.list_shards(tmpdir)[0])) == curves



  def test_curves_read_in_chunks(self):
    curves = list(enumerate_window(WINDOW))
    saved = store.READ_CHUNK_ROWS
    store.READ_CHUNK_ROWS = 7
    try:
      with tempfile.TemporaryDirectory() as tmpdir:
        shard = store.open_shard(tmpdir, WINDOW, 'abc', store.CURVE_COLUMNS)
        store.seal_shard(store.write_curves(shard, curves))
        assert len(curves) > 7
        assert list(store.read_curves(shard)) == curves
    finally:
      store.READ_CHUNK_ROWS = saved


  def test_empty_shard_read(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.seal_shard(store.open_shard(tmpdir, WINDOW, 'abc'))
      assert list(store.read_records(shard)) == []


  def test_f1_curves_round_trip(self):
    window = HeightWindow(HeightKind.F1, 0, 17)
    curves = list(enumerate_window(window))
    with tempfile.TemporaryDirectory() as tmpdir:
      shard = store.open_shard(tmpdir, window, 'abc', store.F1_COLUMNS)
      store.seal_shard(store.write_curves(shard, curves))
      read = list(store.read_curves(store.list_shards(tmpdir)[0]))
      assert read == curves
      assert all(isinstance(c, F1Curve) for c in read)


  def test_list_and_resume(self):
    windows = [HeightWindow(HeightKind.NAIVE, 0, 100), HeightWindow(HeightKind.NAIVE, 100, 200),
               HeightWindow(HeightKind.NAIVE, 200, 300)]
    with tempfile.TemporaryDirectory() as tmpdir:
      assert store.list_shards(os.path.join(tmpdir, 'missing')) == []
      store.seal_shard(store.open_shard(tmpdir, windows[1], 'abc'))
      store.open_shard(tmpdir, windows[0], 'abc')
      assert [s.window for s in store.list_shards(tmpdir)] == windows[:2]
      assert store.resume(tmpdir) == [windows[0]]
      assert store.resume(tmpdir, windows) == [windows[0], windows[2]]


class TestApCache(object):

  def test_ap_cache(self):
    aps = {5: 1, 2: -2, 3: -1, 7: -2}
    with tempfile.TemporaryDirectory() as tmpdir:
      path = store.write_ap_cache(os.path.join(tmpdir, 'ap.bin'), Curve(-432, 8208), aps)
      assert os.path.getsize(path) == 16 + 16 * len(aps)
      with open(path, 'rb') as fyl:
        assert fyl.read(8) == (-432).to_bytes(8, 'little', signed=True)
      assert store.read_ap_cache(path) == (Curve(-432, 8208), aps)


  def test_ap_cache_empty(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      path = store.write_ap_cache(os.path.join(tmpdir, 'ap.bin'), Curve(1, 1), {})
      assert store.read_ap_cache(path) == (Curve(1, 1), {})


  def test_ap_cache_bad_length(self):
    with tempfile.TemporaryDirectory() as tmpdir:
      path = os.path.join(tmpdir, 'ap.bin')
      with open(path, 'wb') as fyl:
        fyl.write(b'\x00' * 20)
      with pytest.raises(DataIntegrityError, match='malformed length'):
        store.read_ap_cache(path)
