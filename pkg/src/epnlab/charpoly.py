"""Characteristic polynomial ``det(E*I - H)`` of the lattice Hamiltonians.

Both the exact and the floating-point versions use the tridiagonal
three-term recurrence

    p_k(E) = (E - h_kk) p_{k-1}(E) - h_{k,k-1} h_{k-1,k} p_{k-2}(E).

The exact version carries Gaussian-integer coefficients (a real and an
imaginary MultiPoly per power of E) and checks that every imaginary part
cancels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from epnlab.errors import InvalidDimensionError
from epnlab.model import COUPLING_NAMES
from epnlab.polyalg import MultiPoly


@dataclass(frozen=True)
class SecularPolynomial:
    """``det(E*I - H)`` with coefficients ``coeffs[k]`` multiplying ``E**k``."""

    n: int
    coeffs: tuple[MultiPoly, ...]

    @property
    def nvars(self) -> int:
        return self.n // 2

    @property
    def names(self) -> str:
        return COUPLING_NAMES[: self.nvars]

    def evaluate(self, values) -> list:
        """Numeric coefficients (ascending in E) at the given couplings."""
        return [c.evaluate(tuple(values)) for c in self.coeffs]

    def to_text(self) -> str:
        parts = []
        for k in range(self.n, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            body = c.to_text(self.names)
            ek = "" if k == 0 else ("E" if k == 1 else f"E^{k}")
            if not ek:
                term = f"({body})" if len(c.terms) > 1 else body
            elif c == 1:
                term = ek
            elif c == -1:
                term = "-" + ek
            else:
                term = f"({body})*{ek}"
            parts.append(term)
        text = "+".join(parts)
        return text.replace("+-", "-")


def _gauss_mul_iv(re: MultiPoly, im: MultiPoly, v: MultiPoly):
    """Multiply ``re + i*im`` by ``i*v``."""
    return -(v * im), v * re


@lru_cache(maxsize=None)
def secular_symbolic(n: int) -> SecularPolynomial:
    """Exact secular polynomial over the ``n // 2`` couplings."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n!r}")
    nv = n // 2
    zero = MultiPoly.constant(nv, 0)
    one = MultiPoly.constant(nv, 1)
    couplings = MultiPoly.variables(nv)
    # diagonal entry d_k = i * s_k * v_k  with s = -1 on the left half, +1 on the right
    diag_iv = []
    for k in range(n):
        if k < nv:
            diag_iv.append(-couplings[k])
        elif n - 1 - k < nv:
            diag_iv.append(couplings[n - 1 - k])
        else:
            diag_iv.append(zero)

    # polynomials in E stored as lists of (re, im) pairs, ascending powers
    prev2 = [(one, zero)]
    prev1 = None
    for k in range(n):
        base = prev1 if prev1 is not None else [(one, zero)]
        nxt = [(zero, zero)] * (len(base) + 1)
        nxt = list(nxt)
        for j, (re, im) in enumerate(base):
            r0, i0 = nxt[j + 1]
            nxt[j + 1] = (r0 + re, i0 + im)
            dre, dim = _gauss_mul_iv(re, im, diag_iv[k])
            r0, i0 = nxt[j]
            nxt[j] = (r0 - dre, i0 - dim)
        if prev1 is not None:
            # off-diagonal product h_{k,k-1} h_{k-1,k} = (-1)(-1) = 1
            for j, (re, im) in enumerate(prev2):
                r0, i0 = nxt[j]
                nxt[j] = (r0 - re, i0 - im)
            prev2 = prev1
        else:
            prev2 = [(one, zero)]
        prev1 = nxt

    coeffs = []
    for k, (re, im) in enumerate(prev1):
        if not im.is_zero():
            raise ArithmeticError(f"imaginary part survived in the E^{k} coefficient")
        coeffs.append(re)
    return SecularPolynomial(n, tuple(coeffs))


def ep_conditions(n: int) -> list[MultiPoly]:
    """Non-leading secular coefficients that must vanish for an EPN at ``E = 0``.

    Identically zero parity coefficients are dropped, so the list has
    ``n // 2`` entries, ordered by descending power of E.
    """
    sec = secular_symbolic(n)
    return [sec.coeffs[k] for k in range(n - 1, -1, -1) if not sec.coeffs[k].is_zero()]


def secular_numeric(h: np.ndarray) -> np.ndarray:
    """Coefficients of ``det(E*I - h)`` in complex floating point, ascending in E."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("secular polynomial needs a square matrix")
    n = h.shape[0]
    if np.any(np.triu(h, 2)) or np.any(np.tril(h, -2)):
        # not tridiagonal: fall back to the eigenvalue route
        return np.poly(h)[::-1].astype(complex)
    p_prev2 = np.zeros(n + 1, dtype=complex)
    p_prev2[0] = 1.0
    p_prev1 = np.zeros(n + 1, dtype=complex)
    p_prev1[1] = 1.0
    p_prev1[0] = -h[0, 0]
    for k in range(1, n):
        nxt = np.zeros(n + 1, dtype=complex)
        nxt[1:] = p_prev1[:-1]
        nxt -= h[k, k] * p_prev1
        nxt -= h[k, k - 1] * h[k - 1, k] * p_prev2
        p_prev2, p_prev1 = p_prev1, nxt
    return p_prev1
