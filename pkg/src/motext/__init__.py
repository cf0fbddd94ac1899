"""Trigraded Ext over the C-motivic Steenrod algebra and its quotients."""
from .trigrade import Plane, TriDegree

__version__ = "0.1.0"
__all__ = ["TriDegree", "Plane", "__version__"]
