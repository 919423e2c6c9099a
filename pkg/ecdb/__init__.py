# Allowed labels for the conditionality of a computed rank
RANK_STATUSES = ['unconditional', 'GRH+BSD', 'GRH+BSD+Parity', 'undetermined']

# Largest height accepted for an enumeration window
MAX_WINDOW_HEIGHT = 2**100

# Default subdirectories of a run directory
CURVES_SUBDIR = 'curves'               # enumerated or sampled curves, no ranks yet
RANKED_SUBDIR = 'ranked'               # output of the rank stage
SELMER_SUBDIR = 'selmer'               # ranked records updated with imported Selmer ranks


class DataIntegrityError(RuntimeError):
  "Raised when stored, computed, or imported data contradicts itself."
