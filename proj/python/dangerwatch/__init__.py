"""Python bindings for the dangerwatch engine."""

from ._dangerwatch import *  # noqa: F401,F403
from ._dangerwatch import __doc__  # noqa: F401

__version__ = "0.1.0"
