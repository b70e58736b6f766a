"""Weakly self-avoiding walk toolkit.

Exact enumeration, lace-expansion checks, chain-growth (PERM) and Metropolis
sampling, and the torus scaling-limit analysis, backed by the C++ core.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
