"""Jordan-chain certificates for an N-fold exceptional point at E = 0.

A transition matrix Q satisfies ``H Q = Q J`` with J the upper shift
(ones on the superdiagonal), i.e. ``H q_1 = 0`` and ``H q_{k+1} = q_k``.
Chains are built bottom-up from the numerical null vector by truncated-SVD
least squares, which returns the minimum-norm solution and so keeps each
new vector orthogonal to the null directions already used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from epnlab.errors import ChainBreakError, NormalizationError, PreconditionError
from epnlab.spectral import clusters

RANK_RTOL = 1e-8
CHAIN_TOL = 1e-6
EP_TOL = 1e-2

S2 = np.sqrt(2.0)

# transition matrices as printed for the EP2, EP3 and EP4 points
Q2_PRINTED = np.array([[-1j, 1], [-1, 0]], dtype=complex)
Q3_PRINTED = np.array([
    [-1, -1j * S2, 1],
    [1j * S2, -1, 0],
    [1, 0, 0],
], dtype=complex)
Q4_PRINTED = np.array([
    [1j, -1.835086683, -1.683771565j, 1],
    [1.683771562, 2.089866772j, -1, 0],
    [-1.683771565j, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=complex)


@dataclass(frozen=True)
class TransitionMatrix:
    q: np.ndarray
    similarity_residual: float
    condition_number: float

    @property
    def length(self) -> int:
        return self.q.shape[1]


def shift_block(n: int) -> np.ndarray:
    """Canonical nilpotent Jordan block: ones on the first superdiagonal."""
    return np.eye(n, k=1, dtype=complex)


def verify_similarity(h, q) -> float:
    """``||H Q - Q J||_F / ||H||_F`` with J the n x n upper shift."""
    h = np.asarray(h, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if q.shape != h.shape:
        raise ValueError(f"shape mismatch: H {h.shape}, Q {q.shape}")
    cond = np.linalg.cond(q)
    if not np.isfinite(cond) or cond > 1e14:
        raise PreconditionError(f"transition matrix is singular (condition number {cond:.3e})")
    j = shift_block(h.shape[0])
    return float(np.linalg.norm(h @ q - q @ j) / np.linalg.norm(h))


def _lstsq_truncated(u, s, vh, b, cutoff):
    keep = s > cutoff
    coeff = (u[:, keep].conj().T @ b) / s[keep]
    return vh[keep].conj().T @ coeff


def _polish(h, q, steps, rcond):
    """Least-squares corrections of ``H Q - Q J`` over all columns at once.

    A chain built one column at a time pushes the whole defect of a
    rounded EP into ``H q_1``; solving for vec(Q) spreads it to O(eps ||Q||).
    The dense system is n^2 x n^2, so the cost grows like n^6.
    """
    n = h.shape[0]
    eye = np.eye(n)
    j = shift_block(n)
    m = np.kron(eye, h) - np.kron(j.T, eye)
    for _ in range(steps):
        r = (h @ q - q @ j).reshape(-1, order="F")
        q = q + np.linalg.lstsq(m, -r, rcond=rcond)[0].reshape(n, n, order="F")
    return q


def jordan_chain(h, rank_rtol: float = RANK_RTOL, chain_tol: float = CHAIN_TOL,
                 ep_tol: float = EP_TOL, polish_steps: int = 2) -> TransitionMatrix:
    """Full-length Jordan chain of ``h`` at E = 0.

    Raises ChainBreakError with the achieved length when ``H q_{k+1} = q_k``
    has no solution to relative accuracy ``chain_tol``. The chain is then
    refined by ``polish_steps`` joint least-squares passes and scaled so that
    the last component of ``q_N`` equals 1.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    scale = np.linalg.norm(h, 2)
    worst = np.max(np.abs(np.linalg.eigvals(h)))
    if worst > ep_tol * max(1.0, scale):
        raise PreconditionError(
            f"eigenvalues are not collapsed at 0 (largest modulus {worst:.3e})")
    u, s, vh = np.linalg.svd(h)
    cutoff = rank_rtol * s[0]
    chain = [vh[-1].conj()]
    for k in range(1, n):
        prev = chain[-1]
        nxt = _lstsq_truncated(u, s, vh, prev, cutoff)
        miss = np.linalg.norm(h @ nxt - prev) / np.linalg.norm(prev)
        if miss > chain_tol:
            raise ChainBreakError(
                f"chain breaks after {k} vectors (relative miss {miss:.3e})", k)
        chain.append(nxt)
    q = _polish(h, np.column_stack(chain), polish_steps, rank_rtol)
    top = q[-1, -1]
    if abs(top) < 1e-12 * np.linalg.norm(q[:, -1]):
        raise NormalizationError("top chain vector has a vanishing last component")
    q = q / top
    return TransitionMatrix(q, verify_similarity(h, q), float(np.linalg.cond(q)))


def numerical_rank(m, cutoff: float) -> int:
    return int(np.sum(np.linalg.svd(m, compute_uv=False) > cutoff))


def rank_sequence(h, shift: complex = 0.0, tol: float = RANK_RTOL) -> list[int]:
    """Numerical ranks of ``(H - shift)^k`` for k = 0..n.

    The threshold for the k-th power is ``tol * sigma_max(H - shift)^k``;
    a threshold relative to the power's own norm would misread the
    near-zero top power of a nilpotent matrix as full rank.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    m = h - shift * np.eye(n)
    smax = np.linalg.norm(m, 2)
    ranks = [n]
    p = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        p = p @ m
        ranks.append(numerical_rank(p, tol * smax ** k))
    return ranks


def ep_order(h, tol: float = RANK_RTOL, tol_gap: float | None = None) -> int:
    """Size of the largest Jordan block at the eigenvalue nearest 0.

    The shift is the centroid of the eigenvalue cluster containing the
    eigenvalue nearest 0, so that a numerically split EP is treated as one
    point. ``tol_gap`` (cluster tolerance) defaults to ``tol``; both must be
    loosened to match couplings known to only a few digits.
    """
    h = np.asarray(h, dtype=complex)
    tol_gap = tol if tol_gap is None else tol_gap
    vals = np.linalg.eigvals(h)
    k0 = int(np.argmin(np.abs(vals)))
    group = next(g for g in clusters(vals, tol_gap) if k0 in g)
    shift = vals[group].mean()
    ranks = rank_sequence(h, shift, tol)
    for k in range(len(ranks) - 1):
        if ranks[k] == ranks[k + 1]:
            return k
    return len(ranks) - 1


def flag_angles(q1, q2) -> list[float]:
    """Largest principal angle between the spans of the first k columns, k = 1..n.

    Two transition matrices of the same chain differ by a unit upper
    triangular Toeplitz factor and an overall scale, so all their column
    flags coincide and every angle is ~0.
    """
    q1 = np.asarray(q1, dtype=complex)
    q2 = np.asarray(q2, dtype=complex)
    out = []
    for k in range(1, q1.shape[1] + 1):
        a, _ = np.linalg.qr(q1[:, :k])
        b, _ = np.linalg.qr(q2[:, :k])
        # sine form stays accurate for tiny angles, unlike arccos of cosines
        sin = np.linalg.norm(b - a @ (a.conj().T @ b), 2)
        out.append(float(np.arcsin(min(sin, 1.0))))
    return out


def chain_gauge(coeffs) -> np.ndarray:
    """Upper triangular Toeplitz matrix with first row ``coeffs``; commutes with J."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c)
    t = np.zeros((n, n), dtype=complex)
    for k in range(n):
        t += c[k] * np.eye(n, k=k)
    return t


__all__ = [
    "TransitionMatrix", "jordan_chain", "verify_similarity", "ep_order", "rank_sequence",
    "flag_angles", "chain_gauge", "shift_block", "Q2_PRINTED", "Q3_PRINTED", "Q4_PRINTED",
]
