"""Paths of quadratic Gauss sum partial sums, their random model and limit shapes."""

import os

# the TBB layer shipped with some numba wheels is too old; fall back quietly
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"
