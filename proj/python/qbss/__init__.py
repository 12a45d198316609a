"""Classical simulation of quantum adaptive search for best subset selection."""

from ._core import *  # noqa: F401,F403
from ._core import QbssError, __version__  # noqa: F401
