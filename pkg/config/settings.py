# Path to the root location of the application inside the container.
APP_ROOT = '/ecdb'

# Logging level
LOG_LEVEL = 'INFO'  # CRITICAL / ERROR / WARNING / INFO / DEBUG

# Environment variable naming the default output (run) directory
OUTPUT_DIR_ENV = 'ECDB_OUTPUT_DIR'

# Explicit formula: ascending schedule of Fejer kernel widths and its hard cap
DELTA_SCHEDULE = [1.0, 1.5, 2.0, 2.5, 3.0]
MAX_DELTA = 3.9
ZERO_SUM_SLACK = 1e-6                  # added before taking the floor of a zero sum

# Rational point search: x = m/e^2 with |m| <= SEARCH_BOUND, e <= SEARCH_DENOM_BOUND
SEARCH_BOUND = 1000
SEARCH_DENOM_BOUND = 8
SEARCH_ESCALATION = 4                  # numerator bound multiplier for the retry round

# Tolerances for heights and independence
INDEPENDENCE_TOL = 1e-6                # minimum Gram determinant of independent points
TORSION_HEIGHT_TOL = 1e-8              # canonical heights below this are torsion
HEIGHT_DIGITS = 30                     # working precision for archimedean heights

# Numeric root number from the theta series reflection
ROOT_NUMBER_DIGITS = 30
ROOT_NUMBER_MAX_TERMS = 2000000

# Point counting: character sums below this prime, baby-step giant-step above
BSGS_THRESHOLD = 10000

# Statistics: geometric spacing of the running average rank series
SERIES_RATIO = 1.1
