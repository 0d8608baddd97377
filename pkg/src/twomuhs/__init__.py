"""Simulation and numerical certification of the two-component muHS equation."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .spectral import Field, PeriodicGrid, RandomFieldSpec, random_field
from .dynamics import State, StepperConfig, integrate, rhs

__all__ = ["Field", "PeriodicGrid", "RandomFieldSpec", "random_field",
           "State", "StepperConfig", "integrate", "rhs", "__version__"]
