"""Simulation of a Mach-Zehnder quantum LiDAR fed with coherent-state superpositions.

Resolution (fringe width, foldness) and phase sensitivity of the lossy
interferometer for binary-outcome parity and zero/nonzero photon counting,
with every closed-form result independently verified against a truncated
Fock-space oracle.
"""

from . import closedform, detection, fock_oracle, interferometer, metrology, states, wigner
from .detection import Scheme
from .interferometer import MziConfig, propagate
from .states import StateKind, make_state, vacuum

__version__ = "0.1.0"

__all__ = [
    "MziConfig",
    "Scheme",
    "StateKind",
    "closedform",
    "detection",
    "fock_oracle",
    "interferometer",
    "make_state",
    "metrology",
    "propagate",
    "states",
    "vacuum",
    "wigner",
]
