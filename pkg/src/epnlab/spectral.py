"""Eigenvalues, left/right eigenvectors and reality classification of small dense H.

The default path is LAPACK (``numpy.linalg.eig``). An Aberth-Ehrlich
simultaneous root finder on the secular polynomial is kept as an
independent route and as a cross-check of the dense solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from epnlab.charpoly import secular_numeric
from epnlab.errors import ConvergenceError, DegenerateSpectrumError

TOL_IMAG = 1e-8
TOL_GAP = 1e-8

REAL_NONDEGENERATE = "real_nondegenerate"
REAL_DEGENERATE = "real_degenerate"
COMPLEX = "complex"
CLASSES = (REAL_NONDEGENERATE, REAL_DEGENERATE, COMPLEX)


def sort_eigenvalues(values) -> np.ndarray:
    """Order by real part, then imaginary part.

    Real parts are rounded to 9 decimals before comparison so that a
    conjugate pair whose real parts differ by round-off still sorts as
    (E - i y, E + i y).
    """
    z = np.asarray(values, dtype=complex).ravel()
    order = np.lexsort((z.imag, np.round(z.real, 9)))
    return z[order]


def min_gap(values) -> float:
    z = np.asarray(values, dtype=complex).ravel()
    if z.size < 2:
        return float("inf")
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def _components(z, idx, radius):
    """Connected components of ``idx`` under the relation ``|z_i - z_j| <= radius``."""
    idx = list(idx)
    comps = []
    seen = set()
    for start in idx:
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in idx:
                if j not in seen and abs(z[i] - z[j]) <= radius:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def clusters(values, tol_gap: float = TOL_GAP) -> list[list[int]]:
    """Group eigenvalues that plausibly split off a single degenerate point.

    An m-fold exceptional point perturbed by ``eps`` splits its eigenvalue
    by about ``eps ** (1/m)``, so a group of size m is accepted when its
    diameter is below ``2 * tol_gap ** (1/m)``. Groups are found top-down:
    single-linkage components at the loosest radius are accepted or split
    again at the next tighter radius.
    """
    z = np.asarray(values, dtype=complex).ravel()
    n = z.size
    radii = [2.0 * tol_gap ** (1.0 / m) for m in range(n, 1, -1)]

    def diameter(g):
        pts = z[g]
        return float(np.abs(pts[:, None] - pts[None, :]).max())

    def split(idx, level):
        if len(idx) == 1 or level >= len(radii):
            return [[i] for i in idx]
        out = []
        for comp in _components(z, idx, radii[level]):
            if len(comp) == 1:
                out.append(comp)
            elif diameter(comp) <= 2.0 * tol_gap ** (1.0 / len(comp)):
                out.append(comp)
            else:
                out.extend(split(comp, level + 1))
        return out

    return sorted(split(list(range(n)), 0), key=lambda g: g[0])


def classify(values, tol_imag: float = TOL_IMAG, tol_gap: float = TOL_GAP) -> str:
    """Reality/degeneracy verdict for a list of eigenvalues (or a Spectrum).

    ``real_degenerate`` means: not real and non-degenerate, but every
    eigenvalue is either real on its own or belongs to a collapsed cluster
    whose centroid is real.
    """
    if isinstance(values, Spectrum):
        values = values.eigenvalues
    z = np.asarray(values, dtype=complex).ravel()
    if np.all(np.abs(z.imag) <= tol_imag) and min_gap(z) > tol_gap:
        return REAL_NONDEGENERATE
    nontrivial = False
    for g in clusters(z, tol_gap):
        if len(g) == 1:
            if abs(z[g[0]].imag) > tol_imag:
                return COMPLEX
            continue
        nontrivial = True
        if abs(z[g].mean().imag) > tol_imag:
            return COMPLEX
    if not nontrivial:
        # real parts fine but a gap collapsed below tol_gap without clustering
        return REAL_DEGENERATE if np.all(np.abs(z.imag) <= tol_imag) else COMPLEX
    return REAL_DEGENERATE


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    classification: str
    min_gap: float

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.eigenvalues.imag))) if self.n else 0.0

    @classmethod
    def from_values(cls, values, tol_imag: float = TOL_IMAG,
                    tol_gap: float = TOL_GAP) -> "Spectrum":
        z = sort_eigenvalues(values)
        return cls(z, classify(z, tol_imag, tol_gap), min_gap(z))

    def as_records(self) -> list[dict]:
        return [{"re": float(e.real), "im": float(e.imag)} for e in self.eigenvalues]


@dataclass(frozen=True)
class EigenSystem:
    spectrum: Spectrum
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residuals: tuple[float, ...]


def _as_square(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    return h


def aberth_roots(coeffs: Sequence[complex], tol: float = 1e-14,
                 max_iter: int = 500) -> np.ndarray:
    """All roots of ``sum coeffs[k] * x**k`` by Aberth-Ehrlich iteration."""
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    c = c[: nz[-1] + 1]
    deg = len(c) - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    p = c[::-1] / c[-1]  # monic, descending for np.polyval
    dp = np.polyder(p)
    # Cauchy-type bound for the initial circle; off-axis start avoids symmetric stalls
    radius = 1.0 + np.max(np.abs(p[1:])) if deg > 0 else 1.0
    radius = min(radius, 2.0 * np.max(np.abs(p[1:]) ** (1.0 / np.arange(1, deg + 1))) + 1e-3)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(deg) / deg + 0.4))
    history = [z.copy()]
    for _ in range(max_iter):
        pv = np.polyval(p, z)
        dv = np.polyval(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dv != 0, pv / dv, 0.0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        history.append(z.copy())
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(z))) or np.all(pv == 0):
            return z
    raise ConvergenceError(f"Aberth iteration did not converge in {max_iter} steps", history)


def eigenvalues(h, tol: float | None = None, method: str = "dense",
                tol_imag: float = TOL_IMAG, tol_gap: float = TOL_GAP) -> Spectrum:
    """Spectrum of ``h``; ``method`` is ``"dense"`` (LAPACK) or ``"aberth"``.

    ``tol`` is the Aberth stopping tolerance and is ignored by the dense path.
    """
    h = _as_square(h)
    if method == "dense":
        vals = np.linalg.eigvals(h)
    elif method == "aberth":
        vals = aberth_roots(secular_numeric(h), tol=tol if tol is not None else 1e-14)
    else:
        raise ValueError(f"unknown eigenvalue method {method!r}")
    return Spectrum.from_values(vals, tol_imag, tol_gap)


def _pair_left(right_vals, left_vals):
    """Permutation pairing each E_n with the H^dagger eigenvalue conj(E_n)."""
    target = np.conj(right_vals)
    used = np.zeros(len(left_vals), dtype=bool)
    perm = []
    for t in target:
        d = np.abs(left_vals - t)
        d[used] = np.inf
        k = int(np.argmin(d))
        used[k] = True
        perm.append(k)
    return np.array(perm)


def eigensystem(h, tol_imag: float = TOL_IMAG, tol_gap: float = TOL_GAP) -> EigenSystem:
    """Right eigenvectors of H and left ones as eigenvectors of H^dagger, paired.

    Columns are unit-normalized and ordered like ``spectrum.eigenvalues``.
    """
    h = _as_square(h)
    vals, right = np.linalg.eig(h)
    spec = Spectrum.from_values(vals, tol_imag, tol_gap)
    if spec.classification == REAL_DEGENERATE or spec.min_gap <= tol_gap:
        raise DegenerateSpectrumError(
            f"eigenvalues collapse (min gap {spec.min_gap:.3e}); exceptional point suspected")
    order = [int(np.argmin(np.abs(vals - e))) for e in spec.eigenvalues]
    vals, right = vals[order], right[:, order]
    hd = h.conj().T
    lvals, left = np.linalg.eig(hd)
    perm = _pair_left(vals, lvals)
    left = left[:, perm]
    scale = max(np.linalg.norm(h, 2), 1e-300)
    res = []
    for k in range(len(vals)):
        r1 = np.linalg.norm(h @ right[:, k] - vals[k] * right[:, k])
        r2 = np.linalg.norm(hd @ left[:, k] - np.conj(vals[k]) * left[:, k])
        res.append(float(max(r1, r2) / scale))
    return EigenSystem(spec, right, left, tuple(res))


def eigenvalues_mp(h_rows, dps: int = 50) -> list:
    """Eigenvalues in mpmath at ``dps`` digits for a matrix given as nested rows.

    Entries may be mpmath numbers built from high-precision strings, which
    is the only way to see an EP6 collapse below about 1e-3.
    """
    with mpmath.workdps(dps):
        m = mpmath.matrix(h_rows)
        vals = mpmath.eig(m, left=False, right=False)
        return [mpmath.mpc(v) for v in vals]


def hamiltonian_mp(n: int, values: Sequence, dps: int = 50) -> list[list]:
    """The Hamiltonian as mpmath rows for couplings given as strings or numbers."""
    with mpmath.workdps(dps):
        rows = [[mpmath.mpc(0) for _ in range(n)] for _ in range(n)]
        for k in range(n - 1):
            rows[k][k + 1] = mpmath.mpc(-1)
            rows[k + 1][k] = mpmath.mpc(-1)
        for k, v in enumerate(values):
            v = mpmath.mpf(v)
            rows[k][k] += mpmath.mpc(0, -v)
            rows[n - 1 - k][n - 1 - k] += mpmath.mpc(0, v)
        return rows


__all__ = [
    "Spectrum", "EigenSystem", "eigenvalues", "eigensystem", "classify", "clusters",
    "aberth_roots", "sort_eigenvalues", "min_gap", "eigenvalues_mp", "hamiltonian_mp",
    "REAL_NONDEGENERATE", "REAL_DEGENERATE", "COMPLEX", "CLASSES", "TOL_IMAG", "TOL_GAP",
]
