"""Python package for the tfedsim simulator core."""

from ._tfedsim import *  # noqa: F401,F403
