"""Adiabatic spin squeezing in XXZ models: spin-wave theory, exact diagonalization, entropy maps."""

__version__ = "0.1.0"

from .lattice import LatticeSpec, build_lattice, gamma_k  # noqa: E402
from .model import ModelSpec, NumericalError, SpinObservables  # noqa: E402

__all__ = ["LatticeSpec", "ModelSpec", "NumericalError", "SpinObservables", "build_lattice",
           "gamma_k", "__version__"]
