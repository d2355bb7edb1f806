"""Verification toolkit for control networks in semi-tensor-product form.

Models logic state-space systems whose variables take finitely many
values, simulates and composes them, and checks the properties that
matter for alert systems: globally attractive equilibria under constant
inputs, absence of limit cycles, observability and reconstructibility,
and detectability of stuck-at faults.
"""

from .network import Bcn, Cascade, CascadeTrace, InputFactor, Trace
from .stp import CanonicalVector, LogicalMatrix, delta

__version__ = "0.1.0"

__all__ = [
    "Bcn",
    "Cascade",
    "CascadeTrace",
    "CanonicalVector",
    "InputFactor",
    "LogicalMatrix",
    "Trace",
    "delta",
    "__version__",
]
