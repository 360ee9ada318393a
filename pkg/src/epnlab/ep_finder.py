"""Locate coupling values at which H has a single N-fold exceptional point at E = 0.

Pipeline: condition polynomials -> resultant-chain eliminant in one coupling
-> exact real-root isolation -> numeric back-substitution through the stored
elimination stages -> residual certification -> sign/monotonicity selection.
``solve_ep_newton`` is an independent floating-point route to the same
points, used as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from epnlab.charpoly import ep_conditions
from epnlab.errors import (
    ConvergenceError,
    EliminationFailure,
    EPNotFoundError,
    SingularJacobianError,
)
from epnlab.model import COUPLING_NAMES, CouplingVector
from epnlab.polyalg import (
    MultiPoly,
    UniPoly,
    isolate_real_roots,
    poly_gcd,
    refine_root,
    refine_root_exact,
    resultant,
    squarefree,
)

RESIDUAL_TOL = 1e-9
NEWTON_TOL = 1e-12
HP_DPS = 50
HP_DIGITS = 40

POLICIES = ("monotone", "all")


@dataclass(frozen=True)
class EPSolution:
    n: int
    couplings: CouplingVector
    eliminant: UniPoly | None
    condition_residuals: tuple[float, ...]
    selection_policy: str = "all"
    # decimal strings of the same point refined to HP_DIGITS significant digits
    couplings_hp: tuple[str, ...] = field(default=(), compare=False)

    @property
    def eliminant_text(self) -> str:
        if self.eliminant is None:
            return ""
        return self.eliminant.to_text(COUPLING_NAMES[default_keep_var(self.n // 2)])

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "couplings": list(self.couplings.values),
            "eliminant_text": self.eliminant_text,
            "residuals": list(self.condition_residuals),
        }


def default_keep_var(nvars: int) -> int:
    return 1 if nvars >= 2 else 0


def default_order(nvars: int, keep_var: int) -> tuple[int, ...]:
    """Eliminate A first, then the remaining couplings from the innermost outward."""
    rest = [v for v in range(nvars) if v != keep_var]
    if 0 in rest:
        rest.remove(0)
        return (0, *sorted(rest, reverse=True))
    return tuple(sorted(rest, reverse=True))


@dataclass(frozen=True)
class Elimination:
    keep_var: int
    order: tuple[int, ...]
    # stages[k] holds the polynomials before order[k] is eliminated
    stages: tuple[tuple[MultiPoly, ...], ...]
    eliminant: UniPoly


def _eliminate_var(polys: Sequence[MultiPoly], var: int) -> list[MultiPoly]:
    with_v = [p for p in polys if p.degree(var) > 0]
    out = [p for p in polys if p.degree(var) <= 0]
    for p, q in itertools.combinations(with_v, 2):
        r = resultant(p, q, var)
        if not r.is_zero():
            out.append(r.primitive())
    seen = []
    for p in out:
        if p not in seen:
            seen.append(p)
    return seen


@lru_cache(maxsize=None)
def eliminate(conds: tuple[MultiPoly, ...], keep_var: int,
              order: tuple[int, ...] | None = None) -> Elimination:
    nvars = conds[0].nvars
    if len(conds) != nvars:
        raise ValueError(f"system is not square: {len(conds)} equations, {nvars} unknowns")
    order = tuple(order) if order is not None else default_order(nvars, keep_var)
    if sorted(order + (keep_var,)) != list(range(nvars)):
        raise ValueError(f"order {order} with keep {keep_var} does not cover all variables")
    stages = []
    current = [p.primitive() for p in conds]
    for v in order:
        stages.append(tuple(current))
        current = _eliminate_var(current, v)
        if not current:
            raise EliminationFailure(
                f"elimination of variable {v} left no equations (order {order})", order)
    unis = [p.to_univariate(keep_var) for p in current if not p.is_zero()]
    if not unis:
        raise EliminationFailure(f"eliminant vanished identically (order {order})", order)
    g = unis[0]
    for u in unis[1:]:
        g = poly_gcd(g, u)
    if g.degree < 1:
        elim = UniPoly([1])
    else:
        elim = squarefree(g)
    stages.append(tuple(current))
    return Elimination(keep_var, order, tuple(stages), elim)


def eliminate_system(conds: Sequence[MultiPoly], keep_var: int,
                     order: Sequence[int] | None = None) -> UniPoly:
    """Squarefree univariate polynomial in ``keep_var`` vanishing on every solution projection."""
    return eliminate(tuple(conds), keep_var, tuple(order) if order is not None else None).eliminant


# ---------------------------------------------------------------------------
# numerics shared by back-substitution and the Newton oracle


def _jacobian(conds: Sequence[MultiPoly]):
    nv = conds[0].nvars
    return [[c.derivative(j) for j in range(nv)] for c in conds]


def residuals(conds: Sequence[MultiPoly], x: Sequence[float]) -> list[float]:
    return [abs(float(c.evaluate(tuple(x)))) for c in conds]


def _newton(conds, x0, tol=NEWTON_TOL, max_iter=100):
    jac = _jacobian(conds)
    x = np.array(x0, dtype=float)
    history = [x.copy()]
    for _ in range(max_iter):
        f = np.array([c.evaluate(tuple(x)) for c in conds], dtype=float)
        if np.max(np.abs(f)) <= tol:
            return x
        J = np.array([[d.evaluate(tuple(x)) for d in row] for row in jac], dtype=float)
        if not np.all(np.isfinite(J)) or abs(np.linalg.det(J)) < 1e-14 * max(1.0, np.abs(J).max()) ** len(x):
            raise SingularJacobianError(f"singular Jacobian at {x.tolist()}", history)
        x = x - np.linalg.solve(J, f)
        history.append(x.copy())
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e6:
            raise ConvergenceError("Newton iterates diverged", history)
    f = np.array([c.evaluate(tuple(x)) for c in conds], dtype=float)
    if np.max(np.abs(f)) <= tol:
        return x
    raise ConvergenceError(f"no convergence after {max_iter} iterations", history)


def _newton_mp(conds, x0, dps=HP_DPS, max_iter=60):
    jac = _jacobian(conds)
    with mpmath.workdps(dps):
        x = mpmath.matrix([mpmath.mpf(v) for v in x0])
        tol = mpmath.mpf(10) ** (-(dps - 5))
        for _ in range(max_iter):
            pt = tuple(x)
            f = mpmath.matrix([c.evaluate(pt) for c in conds])
            if max(abs(v) for v in f) <= tol:
                break
            J = mpmath.matrix([[d.evaluate(pt) for d in row] for row in jac])
            x = x - mpmath.lu_solve(J, f)
        else:
            raise ConvergenceError("high-precision polish did not converge", list(x))
        return [mpmath.nstr(v, HP_DIGITS, strip_zeros=False) for v in x]


def _real_candidates(coeffs: dict, var: int, scale_tol=1e-6):
    """Real roots of a univariate polynomial given as ``{exps: value}`` in ``var``."""
    deg = max(e[var] for e in coeffs)
    c = np.zeros(deg + 1)
    for e, v in coeffs.items():
        c[e[var]] += float(v)
    if deg == 0:
        return []
    roots = np.roots(c[::-1])
    return [r.real for r in roots if abs(r.imag) <= scale_tol * (1 + abs(r))]


def back_substitute(conds: Sequence[MultiPoly], keep_var: int, root: float,
                    order: Sequence[int] | None = None,
                    tol: float = RESIDUAL_TOL, n: int | None = None) -> list[CouplingVector]:
    """All real coupling vectors completing ``keep_var = root``, certified against ``conds``.

    ``n`` is the matrix dimension recorded in the returned vectors (defaults
    to the even dimension ``2 * nvars``). An empty list means the root was
    extraneous.
    """
    elim = eliminate(tuple(conds), keep_var, tuple(order) if order is not None else None)
    nvars = conds[0].nvars
    n = n if n is not None else 2 * nvars
    partials = [{keep_var: float(root)}]
    for k in reversed(range(len(elim.order))):
        v = elim.order[k]
        polys = [p for p in elim.stages[k] if p.degree(v) > 0]
        nxt = []
        for part in partials:
            subs = [p.partial_evaluate(part) for p in polys]
            subs = [s for s in subs if max(e[v] for e in s) > 0]
            if not subs:
                continue
            subs.sort(key=lambda s: max(e[v] for e in s))
            for x in _real_candidates(subs[0], v):
                nxt.append({**part, v: x})
        partials = nxt
    found = []
    for part in partials:
        x0 = [part[i] for i in range(nvars)]
        try:
            x = _newton(conds, x0)
        except ConvergenceError:
            continue
        if abs(x[keep_var] - root) > 1e-6 * (1 + abs(root)):
            continue
        if max(residuals(conds, x)) > tol:
            continue
        if any(np.allclose(x, y, atol=1e-8) for y in found):
            continue
        found.append(x)
    found.sort(key=lambda x: tuple(x))
    return [CouplingVector(n, tuple(float(v) for v in x)) for x in found]


def _make_solution(n, values, eliminant, policy, conds):
    res = tuple(residuals(conds, values))
    try:
        hp = tuple(_newton_mp(conds, values))
    except ConvergenceError:
        hp = ()
    return EPSolution(n, CouplingVector(n, tuple(values)), eliminant, res, policy, hp)


def _is_monotone(values: Sequence[float]) -> bool:
    return all(v > 0 for v in values) and all(a > b for a, b in zip(values, values[1:]))


def find_ep(n: int, policy: str = "monotone", tol: float = RESIDUAL_TOL) -> list[EPSolution]:
    """Certified EPN couplings, one representative per joint sign flip.

    The conditions are even under ``(A, B, ...) -> (-A, -B, ...)``, so only
    positive roots of the eliminant are back-substituted. ``policy="all"``
    returns every real completion; ``"monotone"`` keeps the ones with
    strictly decreasing positive couplings ``A > B > C > 0``. ``tol`` is
    the residual bound every returned point is certified against.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    conds = tuple(ep_conditions(n))
    nvars = n // 2
    keep = default_keep_var(nvars)
    elim = eliminate(conds, keep)
    p = elim.eliminant
    candidates = []
    for iv in isolate_real_roots(p) if p.degree >= 1 else []:
        if iv.hi <= 0:
            continue
        root = refine_root(p, iv, 1e-15)
        if root <= 0:
            continue
        if nvars == 1:
            x = _newton(conds, [root])
            if max(residuals(conds, x)) <= tol:
                candidates.append(CouplingVector(n, (float(x[0]),)))
            continue
        candidates.extend(back_substitute(conds, keep, root, tol=tol, n=n))
    if policy == "monotone":
        candidates = [c for c in candidates if _is_monotone(c.values)]
    if not candidates:
        raise EPNotFoundError(f"no real EP{n} couplings under policy {policy!r}")
    candidates.sort(key=lambda c: c.values)
    return [_make_solution(n, list(c.values), p, policy, conds) for c in candidates]


def solve_ep_newton(n: int, initial: CouplingVector | Sequence[float],
                    max_iter: int = 100, tol: float = NEWTON_TOL) -> EPSolution:
    """Newton iteration on the condition system in double precision."""
    values = initial.values if isinstance(initial, CouplingVector) else tuple(initial)
    conds = ep_conditions(n)
    x = _newton(conds, values, tol=tol, max_iter=max_iter)
    return EPSolution(n, CouplingVector(n, tuple(float(v) for v in x)), None,
                      tuple(residuals(conds, x)), "all")


def refine_eliminant_root(p: UniPoly, lo: float, hi: float, digits: int = HP_DIGITS) -> str:
    """Root of ``p`` inside ``(lo, hi)`` to ``digits`` significant digits, via exact bisection."""
    from fractions import Fraction
    from epnlab.polyalg import RootInterval
    a, b = refine_root_exact(p, RootInterval(Fraction(lo), Fraction(hi)),
                             Fraction(1, 10 ** (digits + 2)))
    with mpmath.workdps(digits + 10):
        mid = (mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator) / 2
        return mpmath.nstr(mid, digits, strip_zeros=False)


def condition_residual_max(n: int, values: Sequence[float]) -> float:
    return max(residuals(ep_conditions(n), values))


__all__ = [
    "EPSolution", "Elimination", "back_substitute", "eliminate", "eliminate_system",
    "find_ep", "solve_ep_newton", "residuals", "default_keep_var", "default_order",
    "refine_eliminant_root", "condition_residual_max",
]
