"""The domain of real, non-degenerate spectra in coupling space.

Point classification, grid scans (threaded, row-ordered, optionally
streamed to CSV), boundary extraction, the closed-form N = 4 inequalities
and the N = 4 corridor constraint near the EP4 point.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from epnlab.errors import CorridorExitError, PreconditionError
from epnlab.model import COUPLING_NAMES, CouplingVector, hamiltonian_from_values
from epnlab.spectral import (
    COMPLEX,
    REAL_NONDEGENERATE,
    TOL_GAP,
    TOL_IMAG,
    classify,
    eigenvalues,
)

# real root of A^4 - 2 A^2 - 2 A + 1 (the beta = 0 corridor constraint) near 1.68
A_EP4 = 1.683771564565584
B_EP4 = 1 - 1 / A_EP4


def _fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True)
class DomainSample:
    couplings: CouplingVector
    classification: str
    min_gap: float
    max_imag: float

    @property
    def inside(self) -> bool:
        return self.classification == REAL_NONDEGENERATE

    def margin(self, tol_imag: float = TOL_IMAG, tol_gap: float = TOL_GAP) -> float:
        """Positive inside the domain, negative outside."""
        return min(self.min_gap - tol_gap, tol_imag - self.max_imag)

    def as_record(self) -> dict:
        rec = dict(self.couplings.as_dict())
        rec.update({"class": self.classification, "min_gap": self.min_gap,
                    "max_imag": self.max_imag})
        return rec


def classify_point(c: CouplingVector, tol_imag: float = TOL_IMAG,
                   tol_gap: float = TOL_GAP) -> DomainSample:
    spec = eigenvalues(hamiltonian_from_values(c.n, c.values), tol_imag=tol_imag, tol_gap=tol_gap)
    return DomainSample(c, spec.classification, spec.min_gap, spec.max_imag)


def n4_inequalities(a: float, b: float) -> tuple[float, float, float]:
    """(b, c, b^2 - 4c) for the secular equation ``E^4 + b E^2 + c = 0``."""
    bv = -3 + a * a + b * b
    cv = (1 + a * b) ** 2 - a * a
    return bv, cv, bv * bv - 4 * cv


def n4_inside(a: float, b: float) -> bool:
    bv, cv, disc = n4_inequalities(a, b)
    return bv < 0 and cv > 0 and disc > 0


def n4_margin(a, b):
    """``min(-b, c, b^2 - 4c)``; vectorized over arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    bv = -3 + a * a + b * b
    cv = (1 + a * b) ** 2 - a * a
    return np.minimum(np.minimum(-bv, cv), bv * bv - 4 * cv)


# ---------------------------------------------------------------------------
# grid scans


@dataclass(frozen=True)
class GridSpec:
    n: int
    axes: tuple[np.ndarray, ...]
    free: tuple[int, ...]
    fixed: dict

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(ax) for ax in self.axes)


def make_grid(n: int, ranges: Sequence[tuple[float, float]], resolution,
              fixed: dict | None = None) -> GridSpec:
    """Grid over the couplings not listed in ``fixed`` (index -> value)."""
    nv = n // 2
    fixed = dict(fixed or {})
    free = tuple(i for i in range(nv) if i not in fixed)
    if len(free) > 2:
        raise PreconditionError(
            f"n={n} has {len(free)} free couplings; fix all but two to scan a slice")
    if len(ranges) != len(free):
        raise ValueError(f"need {len(free)} ranges for the free couplings, got {len(ranges)}")
    res = (resolution,) * len(free) if isinstance(resolution, int) else tuple(resolution)
    if len(res) != len(free) or any(r < 2 for r in res):
        raise ValueError("resolution must be at least 2 along every free axis")
    axes = tuple(np.linspace(lo, hi, r) for (lo, hi), r in zip(ranges, res))
    return GridSpec(n, axes, free, fixed)


def _row_values(grid: GridSpec, row: int) -> np.ndarray:
    """Coupling vectors (k x nvars) for one row; row index runs over the first free axis."""
    nv = grid.n // 2
    first = grid.axes[0]
    if len(grid.free) == 1:
        xs = first[[row]] if row is not None else first
        pts = np.zeros((len(xs), nv))
        pts[:, grid.free[0]] = xs
    else:
        second = grid.axes[1]
        pts = np.zeros((len(second), nv))
        pts[:, grid.free[0]] = first[row]
        pts[:, grid.free[1]] = second
    for i, v in grid.fixed.items():
        pts[:, i] = v
    return pts


def _batched_hamiltonians(n: int, pts: np.ndarray) -> np.ndarray:
    k = pts.shape[0]
    h = np.zeros((k, n, n), dtype=complex)
    idx = np.arange(n - 1)
    h[:, idx, idx + 1] = -1
    h[:, idx + 1, idx] = -1
    for j in range(pts.shape[1]):
        h[:, j, j] += -1j * pts[:, j]
        h[:, n - 1 - j, n - 1 - j] += 1j * pts[:, j]
    return h


def _classify_batch(n, pts, tol_imag, tol_gap) -> list[DomainSample]:
    vals = np.linalg.eigvals(_batched_hamiltonians(n, pts))
    max_imag = np.abs(vals.imag).max(axis=1)
    d = np.abs(vals[:, :, None] - vals[:, None, :])
    d[:, np.arange(n), np.arange(n)] = np.inf
    gaps = d.min(axis=(1, 2))
    out = []
    for k in range(pts.shape[0]):
        if max_imag[k] <= tol_imag and gaps[k] > tol_gap:
            cls = REAL_NONDEGENERATE
        else:
            cls = classify(vals[k], tol_imag, tol_gap)
        out.append(DomainSample(CouplingVector(n, tuple(pts[k])), cls,
                                float(gaps[k]), float(max_imag[k])))
    return out


def thread_count(requested: int | None = None) -> int:
    cap = os.environ.get("EPNLAB_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def iter_grid(grid: GridSpec, tol_imag: float = TOL_IMAG, tol_gap: float = TOL_GAP,
              threads: int | None = None) -> Iterable[list[DomainSample]]:
    """Classified rows in row-major order; rows are computed in a thread pool."""
    if len(grid.free) == 1:
        yield _classify_batch(grid.n, _row_values(grid, None), tol_imag, tol_gap)
        return
    rows = range(len(grid.axes[0]))
    work = lambda r: _classify_batch(grid.n, _row_values(grid, r), tol_imag, tol_gap)
    nthreads = thread_count(threads)
    if nthreads == 1:
        for r in rows:
            yield work(r)
        return
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        # map yields in submission order, so output order is deterministic
        yield from pool.map(work, rows)


def csv_header(n: int) -> list[str]:
    return list(COUPLING_NAMES[: n // 2]) + ["class", "min_gap", "max_imag"]


def sample_row(s: DomainSample) -> list[str]:
    return [_fmt(v) for v in s.couplings.values] + [
        s.classification, _fmt(s.min_gap), _fmt(s.max_imag)]


def scan_grid(n: int, ranges: Sequence[tuple[float, float]], resolution,
              fixed: dict | None = None, tol_imag: float = TOL_IMAG,
              tol_gap: float = TOL_GAP, threads: int | None = None,
              out: str | os.PathLike | None = None, keep: bool = True) -> list[DomainSample]:
    """Classify every grid point, row-major with the first free coupling slowest.

    With ``out`` the rows are streamed to a CSV file as they complete; pass
    ``keep=False`` as well to avoid holding the whole grid in memory.
    """
    grid = make_grid(n, ranges, resolution, fixed)
    samples: list[DomainSample] = []
    fh = writer = None
    try:
        if out is not None:
            fh = open(out, "w", newline="")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(csv_header(n))
        for row in iter_grid(grid, tol_imag, tol_gap, threads):
            if writer is not None:
                writer.writerows(sample_row(s) for s in row)
            if keep:
                samples.extend(row)
    except OSError as exc:
        raise OSError(f"cannot write scan output to {out}: {exc}") from exc
    finally:
        if fh is not None:
            fh.close()
    return samples


def margin_grid(samples: Sequence[DomainSample], shape, tol_imag: float = TOL_IMAG,
                tol_gap: float = TOL_GAP) -> np.ndarray:
    return np.array([s.margin(tol_imag, tol_gap) for s in samples]).reshape(shape)


def boundary_curves(grid: GridSpec, margin: np.ndarray) -> list[np.ndarray]:
    """Zero level set of a margin field, as polylines in coupling coordinates."""
    from skimage.measure import find_contours

    if margin.ndim != 2:
        raise ValueError("boundary curves need a 2-D grid")
    curves = []
    for c in find_contours(margin, 0.0):
        x = np.interp(c[:, 0], np.arange(len(grid.axes[0])), grid.axes[0])
        y = np.interp(c[:, 1], np.arange(len(grid.axes[1])), grid.axes[1])
        curves.append(np.column_stack([x, y]))
    return curves


def write_boundary(curves: Sequence[np.ndarray], path) -> None:
    """gnuplot format: one ``x y`` pair per line, blank line between curves."""
    try:
        with open(path, "w", newline="") as fh:
            for k, c in enumerate(curves):
                if k:
                    fh.write("\n")
                for x, y in c:
                    fh.write(f"{_fmt(x)} {_fmt(y)}\n")
    except OSError as exc:
        raise OSError(f"cannot write boundary file {path}: {exc}") from exc


def boundary_bisect(n: int, direction: Sequence[float], lo: float, hi: float,
                    tol: float = 1e-13, tol_imag: float = TOL_IMAG,
                    tol_gap: float = TOL_GAP) -> float:
    """Radius along ``direction`` where the spectrum stops being real and non-degenerate.

    ``lo`` must be inside and ``hi`` outside the domain.
    """
    d = np.asarray(direction, dtype=float)

    def inside(r):
        return classify_point(CouplingVector(n, tuple(r * d)), tol_imag, tol_gap).inside

    if not inside(lo) or inside(hi):
        raise PreconditionError("bisection needs an inside lower end and an outside upper end")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# N = 4 corridor


def corridor_constraint(a: float, beta: float, gamma: float) -> float:
    """Corridor constraint in A after eliminating B and the angle alpha.

    From ``A^2 + B^2 = 3 - 2 A sinh(beta) cos(gamma)`` and
    ``B = cosh(beta) - 1/A``, multiplied through by ``A^2``. Its beta = 0
    root is the EP4 value of A.
    """
    ch, sh = math.cosh(beta), math.sinh(beta)
    return a ** 4 + (a * ch - 1) ** 2 - 3 * a * a + 2 * a ** 3 * sh * math.cos(gamma)


def corridor_constraint_as_printed(a: float, beta: float, gamma: float) -> float:
    """Variant without the ``A^2`` factors on the last two terms; kept for comparison.

    It does not vanish at the EP4 point (about 5.5 there).
    """
    ch, sh = math.cosh(beta), math.sinh(beta)
    return a ** 4 + (a * ch - 1) ** 2 - 3 + 2 * a * sh * math.cos(gamma)


def _corridor_da(a, beta, gamma):
    ch, sh = math.cosh(beta), math.sinh(beta)
    return 4 * a ** 3 + 2 * (a * ch - 1) * ch - 6 * a + 6 * a * a * sh * math.cos(gamma)


def _newton_scalar(f, df, x, tol=1e-14, max_iter=50):
    for _ in range(max_iter):
        d = df(x)
        if d == 0 or not math.isfinite(d):
            raise CorridorExitError(f"vanishing derivative at A = {x}")
        step = f(x) / d
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            return x
    raise CorridorExitError(f"Newton did not settle near A = {x}")


def track_corridor_root(beta: float, gamma: float, steps: int | None = None,
                        a0: float = A_EP4) -> float:
    """Root in A of the corridor constraint, continued from ``(0, 0)`` to ``(beta, gamma)``.

    Parameters move along a straight line in ``(beta, gamma)``; each Newton
    solve starts from the previous root. A turning point (derivative sign
    change or collapse) raises CorridorExitError.
    """
    if steps is None:
        steps = max(10, int(math.ceil(max(abs(beta), abs(gamma)) / 0.005)))
    a = a0
    d0 = _corridor_da(a, 0.0, 0.0)
    for k in range(1, steps + 1):
        b_k = beta * k / steps
        g_k = gamma * k / steps
        a = _newton_scalar(lambda x: corridor_constraint(x, b_k, g_k),
                           lambda x: _corridor_da(x, b_k, g_k), a)
        dk = _corridor_da(a, b_k, g_k)
        if dk * d0 <= 0 or abs(dk) < 1e-8 * abs(d0):
            raise CorridorExitError(f"turning point near beta={b_k}, gamma={g_k}")
    return a


def corridor_point(beta: float, gamma: float) -> tuple[float, float]:
    """(A, B) on the corridor: tracked root A and ``B = cosh(beta) - 1/A``."""
    a = track_corridor_root(beta, gamma)
    return a, math.cosh(beta) - 1 / a


__all__ = [
    "DomainSample", "GridSpec", "classify_point", "n4_inequalities", "n4_inside", "n4_margin",
    "make_grid", "iter_grid", "scan_grid", "margin_grid", "boundary_curves", "write_boundary",
    "boundary_bisect", "corridor_constraint", "corridor_constraint_as_printed",
    "track_corridor_root", "corridor_point", "thread_count", "csv_header", "sample_row",
    "A_EP4", "B_EP4",
]
