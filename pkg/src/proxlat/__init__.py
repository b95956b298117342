"""Finite proximity lattices, continuous entailment relations and their dualities."""

from .errors import InvalidStructure, ParseError, ProxlatError, SizeCapExceeded

__version__ = "0.1.0"

__all__ = ["InvalidStructure", "ParseError", "ProxlatError", "SizeCapExceeded", "__version__"]
