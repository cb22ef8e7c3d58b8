"""Photon-subtracted squeezed-state cats in a truncated Fock space."""

from ._core import *  # noqa: F401,F403
from ._core import (
    CutoffTooSmall,
    DegenerateMode,
    DensityMatrix,
    InvalidArgument,
    NumericError,
    PureState,
    ZeroState,
)

__version__ = "0.1.0"
