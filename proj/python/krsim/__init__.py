"""Quantum kicked rotator with repeated single-qubit projective measurements."""

from krsim._core import *  # noqa: F401,F403
from krsim._core import __version__  # noqa: F401
