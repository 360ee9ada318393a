"""Tridiagonal lattice Hamiltonians with purely imaginary PT-symmetric potentials.

The lattice has unit spacing and Dirichlet ends, so only the matrices
themselves are represented. ``values[0]`` (A) always couples the two
outermost sites, ``values[1]`` (B) the next pair inward, and so on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from epnlab.errors import InvalidDimensionError

PT_ATOL = 1e-12

COUPLING_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class CouplingVector:
    """The ``n // 2`` real couplings of an ``n``-site potential."""

    n: int
    values: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise InvalidDimensionError(f"dimension must be an integer >= 2, got {self.n!r}")
        vals = tuple(float(v) for v in self.values)
        if len(vals) != self.n // 2:
            raise ValueError(
                f"n={self.n} needs {self.n // 2} couplings, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"couplings must be finite: {vals}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, n: int, *values: float) -> "CouplingVector":
        return cls(n, tuple(values))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(COUPLING_NAMES[: len(self.values)])

    def __neg__(self) -> "CouplingVector":
        return CouplingVector(self.n, tuple(-v for v in self.values))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n!r}")


def build_laplacian(n: int) -> np.ndarray:
    """Shifted discrete Laplacian: zero diagonal, -1 on both off-diagonals."""
    _check_n(n)
    lap = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    lap[idx, idx + 1] = -1.0
    lap[idx + 1, idx] = -1.0
    return lap


def potential_diagonal(n: int, values: Sequence[complex]) -> np.ndarray:
    """Diagonal ``(-iA, -iB, ..., +iB, +iA)``; the centre site of odd ``n`` stays 0.

    Accepts complex couplings, which the analytic continuation of the
    ``n = 3`` metric needs beyond ``t = 1``.
    """
    diag = np.zeros(n, dtype=complex)
    for k, v in enumerate(values):
        diag[k] = -1j * v
        diag[n - 1 - k] = 1j * v
    return diag


def build_potential(c: CouplingVector) -> np.ndarray:
    return np.diag(potential_diagonal(c.n, c.values))


def hamiltonian_from_values(n: int, values: Sequence[complex]) -> np.ndarray:
    _check_n(n)
    if len(values) != n // 2:
        raise ValueError(f"n={n} needs {n // 2} couplings, got {len(values)}")
    return build_laplacian(n) + np.diag(potential_diagonal(n, values))


def build_hamiltonian(c: CouplingVector) -> np.ndarray:
    """``H = Laplacian + V``; complex symmetric and tridiagonal."""
    return build_laplacian(c.n) + build_potential(c)


def parity(n: int) -> np.ndarray:
    """Site-reversal permutation (ones on the anti-diagonal)."""
    return np.fliplr(np.eye(n))


def check_pt_symmetry(h: np.ndarray, atol: float = PT_ATOL) -> bool:
    """True iff ``P conj(H) P == H`` entrywise within ``atol``."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("PT check needs a square matrix")
    p = parity(h.shape[0])
    return bool(np.all(np.abs(p @ h.conj() @ p - h) <= atol))


def matrix_to_json(h: np.ndarray) -> str:
    h = np.asarray(h, dtype=complex)
    payload = {
        "n": int(h.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in h.ravel()],
    }
    return json.dumps(payload, sort_keys=True)


def matrix_from_json(text: str) -> np.ndarray:
    payload = json.loads(text)
    n = int(payload["n"])
    entries = payload["entries"]
    if len(entries) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(n, n)
