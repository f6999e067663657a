"""Continuous unitary 1-design paths and universally robust control."""

from ._kernels import BACKEND
from .qmat import ValidationError

__version__ = "0.1.0"

__all__ = ["BACKEND", "ValidationError", "__version__"]
