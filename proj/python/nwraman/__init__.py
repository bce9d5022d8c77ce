"""Nanowire Raman lineshape simulation, diameter fitting and thermal analysis."""

from ._nwraman import *  # noqa: F401,F403
from ._nwraman import __doc__  # noqa: F401

__version__ = "0.3.0"
