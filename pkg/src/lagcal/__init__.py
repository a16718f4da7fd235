"""Numerical laboratory for minimal Lagrangian geometry in split-signature complex space."""

__version__ = "0.1.0"

from .core import Signature, herm_form, metric, symplectic, apply_J, hol_volume

__all__ = [
    "__version__",
    "Signature",
    "herm_form",
    "metric",
    "symplectic",
    "apply_J",
    "hol_volume",
]
