"""
Numerical and physical settings for the weakvalue toolkit.
All quantities are SI unless the name says otherwise.
"""

from scipy import constants

# Particle constants (CODATA 2018). The sign of mu is taken positive so that
# |up_x> drifts toward +x.
HBAR = constants.hbar                    # J s
NEUTRON_MASS = 1.67492749804e-27         # kg
NEUTRON_MAGNETIC_MOMENT = 9.6623651e-27  # J/T (magnitude)

# Unit conversion for the CGS-flavoured inputs printed in figure captions
GAUSS_PER_CM_TO_TESLA_PER_M = 1e-2       # 1 G/cm = 1e-4 T / 1e-2 m
CM_TO_M = 1e-2

# Grid settings
DEFAULT_GRID_POINTS = 4096
GRID_SPAN_WIDTHS = 10.0      # half-span beyond the outermost packet centers
MIN_GRID_POINTS = 2
GRID_UNIFORMITY_RTOL = 1e-9

# Spin algebra
ORTHOGONALITY_THRESHOLD = 1e-12   # on |<chi_f|chi_in>|
HERMITIAN_ATOL = 1e-12
NORMALIZATION_ATOL = 1e-12

# Regime classification on the overlap I
STRONG_OVERLAP_THRESHOLD = 0.01   # I below -> Strong
WEAK_OVERLAP_THRESHOLD = 0.99     # I above -> Weak

# AAV validity cut on eta = delta * p' * |w| / hbar (strict inequality)
AAV_VALIDITY_THRESHOLD = 0.1

# Peak extraction
PEAK_PROMINENCE_THRESHOLD = 1e-3  # fraction of the global maximum

# Branch pruning: |weight| below this is dropped after a stage split
BRANCH_PRUNE_ATOL = 1e-14

# Discrimination protocol
DEFAULT_ALPHA = 0.01
DEFAULT_BATCH_SIZE = 50
DEFAULT_MAX_PARTICLES = 2000
ENVELOPE_SCALE = 1.2
MAX_ENVELOPE_SCALE = 1e4       # above this the grid inverse CDF replaces rejection
MAX_REJECTION_ROUNDS = 100
SAMPLER_GRID_POINTS = 4096

# Sweeps
DEFAULT_SWEEP_WORKERS = 4
