"""Physical inner-product metrics Theta with ``H^dagger Theta = Theta H``.

Two independent sources are provided: the eigenvector construction
``Theta = sum_n psi_n psi_n^dagger`` with ``psi_n`` eigenvectors of
``H^dagger`` scaled to last component 1, and the closed-form N = 2 and
N = 3 families. Each is used to test the other.

For N = 3 the coupling is reparametrized as ``A(t) = sqrt(2 - 2 t^2)``.
Past t = 1 the coupling turns imaginary; the metric there is the analytic
continuation ``sum_n phi_n chi_n^T`` (phi_n of H(-A), chi_n of H(A)), which
coincides with the eigenvector construction for real A.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from epnlab.errors import BranchError, DegenerateSpectrumError, NormalizationError
from epnlab.model import hamiltonian_from_values
from epnlab.spectral import REAL_NONDEGENERATE, TOL_GAP, TOL_IMAG, eigensystem

HERMITIAN_TOL = 1e-12
POSITIVITY_TOL = 1e-10
NORMALIZATION_TOL = 1e-12


def hermiticity_defect(theta) -> float:
    theta = np.asarray(theta, dtype=complex)
    return float(np.abs(theta - theta.conj().T).max())


def quasi_hermiticity_residual(h, theta) -> float:
    """``||H^dagger Theta - Theta H||_F / ||Theta||_F``."""
    h = np.asarray(h, dtype=complex)
    theta = np.asarray(theta, dtype=complex)
    return float(np.linalg.norm(h.conj().T @ theta - theta @ h) / np.linalg.norm(theta))


def positivity_check(theta, tol: float = POSITIVITY_TOL) -> tuple[bool, float]:
    """(is positive definite, smallest eigenvalue) of a Hermitian matrix.

    An eigenvalue counts as positive only above ``tol * max(1, ||Theta||)``,
    so a metric on the boundary of positivity is not accepted on round-off.
    """
    theta = np.asarray(theta, dtype=complex)
    scale = max(1.0, float(np.abs(theta).max()))
    if hermiticity_defect(theta) > HERMITIAN_TOL * scale:
        raise ValueError("positivity check needs a Hermitian matrix")
    lo = float(np.linalg.eigvalsh(theta)[0])
    return lo > tol * scale, lo


@dataclass(frozen=True)
class MetricMatrix:
    theta: np.ndarray
    eigenvalues: np.ndarray
    positive_definite: bool
    quasi_hermiticity_residual: float

    @classmethod
    def build(cls, theta, h=None) -> "MetricMatrix":
        theta = np.asarray(theta, dtype=complex)
        theta = 0.5 * (theta + theta.conj().T)
        pos, _ = positivity_check(theta)
        res = quasi_hermiticity_residual(h, theta) if h is not None else float("nan")
        return cls(theta, np.linalg.eigvalsh(theta), pos, res)

    def as_records(self) -> list[dict]:
        n = self.theta.shape[0]
        return [{"row": i, "col": j, "re": float(self.theta[i, j].real),
                 "im": float(self.theta[i, j].imag)}
                for i in range(n) for j in range(n)]


def _last_component_one(vectors, what: str):
    last = vectors[-1]
    norms = np.linalg.norm(vectors, axis=0)
    bad = np.abs(last) < NORMALIZATION_TOL * norms
    if np.any(bad):
        raise NormalizationError(f"{what} has a vanishing last component")
    return vectors / last


def metric_from_left_eigenvectors(h, tol_imag: float = TOL_IMAG,
                                  tol_gap: float = TOL_GAP) -> MetricMatrix:
    """``Theta = Omega^dagger Omega`` with the columns of ``Omega^dagger``
    the eigenvectors of ``H^dagger``, each scaled to last component 1.
    """
    h = np.asarray(h, dtype=complex)
    es = eigensystem(h, tol_imag, tol_gap)
    if es.spectrum.classification != REAL_NONDEGENERATE:
        raise DegenerateSpectrumError(
            f"metric undefined for a {es.spectrum.classification} spectrum")
    psi = _last_component_one(es.left_vectors, "left eigenvector")
    return MetricMatrix.build(psi @ psi.conj().T, h)


def metric_family_n2(a: float, xi: float) -> MetricMatrix:
    """One-parameter family of N = 2 metrics, eigenvalues ``1 +- sqrt(A^2 + xi^2)``."""
    theta = np.array([[1, xi - 1j * a], [xi + 1j * a, 1]], dtype=complex)
    return MetricMatrix.build(theta, hamiltonian_from_values(2, [a]))


def metric_family_n3(a: float, xi: float, eta: float) -> MetricMatrix:
    """Two-parameter family of N = 3 metrics."""
    theta = np.array([
        [1, eta - 1j * a, xi - 1j * a * eta],
        [eta + 1j * a, xi + 1 + a * a, eta - 1j * a],
        [xi + 1j * a * eta, eta + 1j * a, 1],
    ], dtype=complex)
    return MetricMatrix.build(theta, hamiltonian_from_values(3, [a]))


def family_n3_eigs(a: float) -> tuple[float, float, float]:
    """Closed-form eigenvalues (theta_-, theta_0, theta_+) of the xi = eta = 0 member."""
    r = math.sqrt(8 * a * a + a ** 4)
    return 1 + 0.5 * (a * a - r), 1.0, 1 + 0.5 * (a * a + r)


def family_n2_positive_range(a: float) -> tuple[float, float]:
    """Open interval of xi keeping the N = 2 family positive definite (|A| < 1)."""
    if abs(a) >= 1:
        raise BranchError(f"no positive metric in the family for |A| = {abs(a)} >= 1")
    w = math.sqrt(1 - a * a)
    return -w, w


@dataclass(frozen=True)
class TimeParameter:
    t: float

    @property
    def coupling(self) -> complex:
        """``A(t) = sqrt(2 - 2 t^2)``; purely imaginary for |t| > 1."""
        return cmath.sqrt(2 - 2 * self.t * self.t)

    @property
    def real_coupling(self) -> bool:
        return 2 - 2 * self.t * self.t >= 0

    @property
    def energies(self) -> tuple[float, float, float]:
        e = math.sqrt(2) * abs(self.t)
        return -e, 0.0, e


def _as_time(t) -> TimeParameter:
    return t if isinstance(t, TimeParameter) else TimeParameter(float(t))


def discriminant_n3(t) -> float:
    t = _as_time(t).t
    return t ** 4 - 36 * t * t + 36


def t_max() -> float:
    """Smallest positive root of ``t^4 - 36 t^2 + 36``."""
    return math.sqrt(18 - math.sqrt(288))


def metric_eigs_n3_closed_form(t) -> tuple[float, float, float]:
    """(theta_1, theta_2, theta_3) of the N = 3 sample metric at time ``t``."""
    t = _as_time(t).t
    d = discriminant_n3(t)
    if d < 0:
        raise BranchError(f"discriminant {d:.3e} < 0: t = {t} is past t_max = {t_max():.10f}")
    r = math.sqrt(d)
    return -3 * t * t + 6 - r, 4 * t * t, -3 * t * t + 6 + r


def _eigvecs_last_one(h, energies):
    vals, vecs = np.linalg.eig(h)
    cols = []
    for e in energies:
        k = int(np.argmin(np.abs(vals - e)))
        cols.append(vecs[:, k])
    return _last_component_one(np.column_stack(cols), "eigenvector")


@dataclass(frozen=True)
class MetricSample:
    t: float
    theta: np.ndarray
    eigenvalues: np.ndarray
    hermitian: bool
    positive_definite: bool


def sample_metric_n3(t) -> MetricSample:
    """Sample N = 3 metric at time ``t`` (t != 0), continued analytically past t = 1.

    Eigenvalues are complex in general and sorted by real part; the matrix
    is Hermitian only for |t| <= 1.
    """
    tp = _as_time(t)
    if tp.t == 0:
        raise DegenerateSpectrumError("t = 0 is the EP3 itself; the metric is undefined there")
    a = tp.coupling
    energies = tp.energies
    phi = _eigvecs_last_one(hamiltonian_from_values(3, [-a]), energies)
    chi = _eigvecs_last_one(hamiltonian_from_values(3, [a]), energies)
    theta = phi @ chi.T
    ev = np.linalg.eigvals(theta)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    scale = max(1.0, float(np.abs(theta).max()))
    herm = hermiticity_defect(theta) <= 1e-10 * scale
    pos = bool(np.all(np.abs(ev.imag) <= 1e-10 * scale) and ev.real.min() > POSITIVITY_TOL * scale)
    return MetricSample(tp.t, theta, ev, herm, pos)


def limit_sequence_n3(ts=(1e-2, 1e-3, 1e-4)) -> list[np.ndarray]:
    """Sample metrics along ``t -> 0+``; the EP3 limit itself is not computable."""
    return [sample_metric_n3(t).theta for t in ts]


def richardson_limit(ts, mats, order: int = 2) -> np.ndarray:
    """Extrapolate ``M(t) -> M(0)`` from the last two samples assuming ``M(t) = M0 + c t^order``."""
    t1, t2 = ts[-2], ts[-1]
    m1, m2 = np.asarray(mats[-2]), np.asarray(mats[-1])
    w = (t1 / t2) ** order
    return (w * m2 - m1) / (w - 1)


def _hermitian_basis(n):
    basis = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = 1
            basis.append(e)
            f = np.zeros((n, n), dtype=complex)
            f[i, j], f[j, i] = -1j, 1j
            basis.append(f)
    return basis


def metric_solution_dimension(h, rtol: float = 1e-10, fix_scale: bool = True) -> int:
    """Real dimension of the Hermitian solutions of ``H^dagger Theta = Theta H``.

    With ``fix_scale`` the overall normalization is not counted.
    """
    h = np.asarray(h, dtype=complex)
    cols = []
    for b in _hermitian_basis(h.shape[0]):
        r = h.conj().T @ b - b @ h
        cols.append(np.concatenate([r.real.ravel(), r.imag.ravel()]))
    m = np.column_stack(cols)
    s = np.linalg.svd(m, compute_uv=False)
    nullity = int(np.sum(s <= rtol * s[0])) + (m.shape[1] - len(s))
    return nullity - 1 if fix_scale else nullity


__all__ = [
    "MetricMatrix", "MetricSample", "TimeParameter", "metric_from_left_eigenvectors",
    "quasi_hermiticity_residual", "metric_family_n2", "metric_family_n3", "family_n3_eigs",
    "family_n2_positive_range", "metric_eigs_n3_closed_form", "sample_metric_n3", "t_max",
    "positivity_check", "metric_solution_dimension", "limit_sequence_n3", "richardson_limit",
    "discriminant_n3", "hermiticity_defect",
]
