#
# Module for the frozen policy of a run: defaults from the settings, overridden by
# command line arguments, serialized into the run metadata and hashed into shards.
#   Last Modified: Add the sample band and Selmer import path.
#
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

from config.settings import (DELTA_SCHEDULE, MAX_DELTA, ROOT_NUMBER_DIGITS, SEARCH_BOUND,
                             SEARCH_DENOM_BOUND, SEARCH_ESCALATION)
from ecdb.model import HeightKind


@dataclass(frozen=True)
class RunConfig:
  kind: str = HeightKind.NAIVE.value
  lo: int = None
  hi: int = None
  sample_k: int = None
  sample_count: int = None
  seed: int = 0
  delta_schedule: tuple = field(default_factory=lambda: tuple(DELTA_SCHEDULE))
  search_bound: int = SEARCH_BOUND
  search_denom_bound: int = SEARCH_DENOM_BOUND
  search_escalation: int = SEARCH_ESCALATION
  root_number_digits: int = ROOT_NUMBER_DIGITS
  numeric_root_number: bool = True
  threads: int = 1
  out_dir: str = None
  selmer_path: str = None

  def __post_init__ (self):
    object.__setattr__(self, 'kind', HeightKind(self.kind).value)
    object.__setattr__(self, 'delta_schedule', tuple(float(d) for d in self.delta_schedule))
    if (not self.delta_schedule):
      raise ValueError("The kernel width schedule must not be empty.")
    if (max(self.delta_schedule) > MAX_DELTA):
      raise ValueError(f"Kernel widths must be at most {MAX_DELTA}, got {list(self.delta_schedule)}.")
    if ((self.search_bound < 1) or (self.search_denom_bound < 1) or (self.search_escalation < 1)):
      raise ValueError("Point search bounds and escalation factor must be positive.")
    if (self.threads < 1):
      raise ValueError(f"Thread count must be positive, got {self.threads}.")

  @classmethod
  def from_args (cls, args):
    "Build a config from a dictionary of parsed arguments, ignoring unrelated keys."
    names = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in args.items() if ((k in names) and (v is not None))})

  @classmethod
  def from_json (cls, text):
    return cls(**json.loads(text))

  def config_hash (self):
    "Return the SHA-256 hex digest of the canonical JSON form."
    return hashlib.sha256(self.to_json().encode('utf-8')).hexdigest()

  def policy (self):
    "Return a copy without the fields (threads, output directory) that cannot change results."
    return RunConfig(**{**asdict(self), 'threads': 1, 'out_dir': None})

  def to_json (self):
    return json.dumps(asdict(self), sort_keys=True, separators=(',', ':'))
