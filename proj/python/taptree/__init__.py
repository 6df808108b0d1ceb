"""Host-behavior baselining and threat detection over audit-log process trees.

Everything lives in the compiled extension; this package just re-exports it.
"""

from taptree._core import *  # noqa: F401,F403

__version__ = "0.1.0"
