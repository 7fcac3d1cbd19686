"""Exact small-n numerics for local-operator approximations of quantum states.

Qubit 0 is the most significant bit of every amplitude index and the leftmost
character of every Pauli label.
"""

from locconc.errors import InvalidInputError, ResourceLimitError

__version__ = "0.1.0"

__all__ = ["InvalidInputError", "ResourceLimitError", "__version__"]
