"""Twin-beam quantum-enhanced plasmonic sensing simulator."""

from ._qpsense import *  # noqa: F401,F403
from ._qpsense import __version__  # noqa: F401
