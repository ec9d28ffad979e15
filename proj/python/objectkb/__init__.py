"""Python interface to the object knowledge-base pipeline."""

from ._objectkb import *  # noqa: F401,F403
from ._objectkb import __doc__  # noqa: F401
