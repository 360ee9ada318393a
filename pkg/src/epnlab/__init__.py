"""Exceptional points of maximal order in discrete PT-symmetric lattice models.

Modules map one-to-one onto the computational stages: ``model`` builds
the Hamiltonians, ``polyalg``/``charpoly``/``ep_finder`` locate EPN couplings
by exact elimination, ``spectral``/``jordan`` certify them numerically,
``metric`` builds physical inner products and ``domain`` maps the region of
unbroken PT symmetry.
"""

from epnlab.model import (
    CouplingVector,
    build_hamiltonian,
    build_laplacian,
    build_potential,
    check_pt_symmetry,
)
from epnlab.charpoly import ep_conditions, secular_symbolic
from epnlab.ep_finder import EPSolution, find_ep, solve_ep_newton
from epnlab.spectral import Spectrum, eigensystem, eigenvalues

__version__ = "0.1.0"

__all__ = [
    "CouplingVector",
    "build_hamiltonian",
    "build_laplacian",
    "build_potential",
    "check_pt_symmetry",
    "ep_conditions",
    "secular_symbolic",
    "EPSolution",
    "find_ep",
    "solve_ep_newton",
    "Spectrum",
    "eigensystem",
    "eigenvalues",
]
