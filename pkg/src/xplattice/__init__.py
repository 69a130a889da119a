"""Lattice xp models, their exact spectra, the cyclic RG and zeta-zero counts."""
__version__ = "0.1.0"

from .exceptions import NumericalError, PoleError, SingularMatrixError
from .levels import LevelSequence, ModelCouplings, boundary_phase

__all__ = ["LevelSequence", "ModelCouplings", "boundary_phase", "NumericalError",
           "PoleError", "SingularMatrixError", "__version__"]
