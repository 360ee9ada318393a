"""Exact polynomial arithmetic over the integers.

``MultiPoly`` is a sparse multivariate polynomial with Python ``int``
coefficients, ``UniPoly`` a dense univariate one. Resultants use the
subresultant PRS so every intermediate division is exact; real roots are
isolated with Sturm sequences evaluated in exact rational arithmetic.
Floating point only appears in the values returned by :func:`refine_root`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from epnlab.errors import InvalidEliminationError, PreconditionError

DEFAULT_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


# ---------------------------------------------------------------------------
# text rendering


def _monomial(exps, names):
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _render(terms, names):
    """Render ``[(coeff, exps)]`` (already ordered) in ``c*X^k`` form."""
    if not terms:
        return "0"
    out = []
    for i, (c, exps) in enumerate(terms):
        mono = _monomial(exps, names)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(sign + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# multivariate


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with integer coefficients.

    Instances are immutable and hashable. Arithmetic accepts plain ints on
    either side.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], int] | None = None):
        self.nvars = int(nvars)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for nvars={self.nvars}")
            c = int(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if clean[exps] == 0:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, nvars: int, c: int) -> "MultiPoly":
        return cls._raw(nvars, {(0,) * nvars: int(c)} if c else {})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw(nvars, {tuple(exps): 1})

    @classmethod
    def variables(cls, nvars: int) -> list["MultiPoly"]:
        return [cls.variable(nvars, i) for i in range(nvars)]

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, int):
            return MultiPoly.constant(self.nvars, other)
        return NotImplemented

    # ring operations
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return MultiPoly._raw(self.nvars, {})
        out: dict = {}
        get = out.get
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def scale_int(self, k: int) -> "MultiPoly":
        if k == 0:
            return MultiPoly._raw(self.nvars, {})
        return MultiPoly._raw(self.nvars, {e: c * k for e, c in self._terms.items()})

    # structure
    def degree(self, var: int | None = None) -> int:
        """Degree in ``var`` (total degree if None); -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        return max(e[var] for e in self._terms)

    def variables_used(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    def leading_term(self) -> tuple[tuple[int, ...], int]:
        """Largest monomial in lex order together with its coefficient."""
        e = max(self._terms)
        return e, self._terms[e]

    def content(self) -> int:
        return reduce(math.gcd, self._terms.values(), 0)

    def primitive(self) -> "MultiPoly":
        """Divide out the integer content; make the lex-leading coefficient positive."""
        if not self._terms:
            return self
        g = self.content()
        if self.leading_term()[1] < 0:
            g = -g
        return MultiPoly._raw(self.nvars, {e: c // g for e, c in self._terms.items()})

    def coeffs_in(self, var: int) -> list["MultiPoly"]:
        """Coefficients as a polynomial in ``var`` (ascending); they do not contain ``var``."""
        d = self.degree(var)
        buckets: list[dict] = [{} for _ in range(max(d, 0) + 1)]
        for e, c in self._terms.items():
            k = e[var]
            e0 = e[:var] + (0,) + e[var + 1:]
            buckets[k][e0] = c
        return [MultiPoly._raw(self.nvars, b) for b in buckets]

    @classmethod
    def from_coeffs(cls, coeffs: Sequence["MultiPoly"], var: int) -> "MultiPoly":
        nv = coeffs[0].nvars
        out = MultiPoly._raw(nv, {})
        x = MultiPoly.variable(nv, var)
        for k, c in enumerate(coeffs):
            if c:
                out = out + c * x ** k
        return out

    def derivative(self, var: int) -> "MultiPoly":
        out = {}
        for e, c in self._terms.items():
            k = e[var]
            if k:
                out[e[:var] + (k - 1,) + e[var + 1:]] = c * k
        return MultiPoly._raw(self.nvars, out)

    def substitute(self, var: int, value) -> "MultiPoly":
        """Replace variable ``var`` by an int or by a MultiPoly free of ``var``."""
        if isinstance(value, int):
            value = MultiPoly.constant(self.nvars, value)
        value = self._coerce(value)
        if var in value.variables_used():
            raise ValueError("substituted polynomial must not contain the variable itself")
        coeffs = self.coeffs_in(var)
        out = MultiPoly._raw(self.nvars, {})
        for c in reversed(coeffs):
            out = out * value + c
        return out

    def evaluate(self, point: Sequence):
        """Evaluate at a full point; works for int, Fraction, float, complex or mpmath values."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, need {self.nvars}")
        total = 0
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    __call__ = evaluate

    def partial_evaluate(self, assignment: Mapping[int, object]):
        """Fix some variables numerically; returns ``{exps: coeff}`` with those exponents zeroed."""
        out: dict = {}
        for e, c in self._terms.items():
            val = c
            key = list(e)
            for i, x in assignment.items():
                if e[i]:
                    val = val * x ** e[i]
                key[i] = 0
            key = tuple(key)
            out[key] = out.get(key, 0) + val
        return out

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        """Exact division; raises ``ArithmeticError`` when ``other`` does not divide."""
        other = self._coerce(other)
        if not other._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if len(other._terms) == 1:
            (de, dc), = other._terms.items()
            out = {}
            for e, c in self._terms.items():
                q, r = divmod(c, dc)
                diff = tuple(a - b for a, b in zip(e, de))
                if r or min(diff) < 0:
                    raise ArithmeticError("inexact polynomial division")
                out[diff] = q
            return MultiPoly._raw(self.nvars, out)
        lt_e, lt_c = other.leading_term()
        rem = dict(self._terms)
        quot = {}
        oterms = list(other._terms.items())
        while rem:
            e = max(rem)
            c = rem[e]
            diff = tuple(a - b for a, b in zip(e, lt_e))
            q, r = divmod(c, lt_c)
            if r or min(diff) < 0:
                raise ArithmeticError("inexact polynomial division")
            quot[diff] = q
            for oe, oc in oterms:
                key = tuple(a + b for a, b in zip(oe, diff))
                v = rem.get(key, 0) - q * oc
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        return MultiPoly._raw(self.nvars, quot)

    def to_univariate(self, var: int) -> "UniPoly":
        if self.variables_used() - {var}:
            raise ValueError("polynomial depends on other variables")
        coeffs = [0] * (max(self.degree(var), 0) + 1)
        for e, c in self._terms.items():
            coeffs[e[var]] = c
        return UniPoly(coeffs)

    @classmethod
    def from_univariate(cls, p: "UniPoly", nvars: int, var: int) -> "MultiPoly":
        out = {}
        for k, c in enumerate(p.coeffs):
            if c:
                e = [0] * nvars
                e[var] = k
                out[tuple(e)] = c
        return cls._raw(nvars, out)

    def to_text(self, names: Sequence[str] | None = None) -> str:
        """Canonical text: descending total degree, then descending lex."""
        names = names or DEFAULT_NAMES[: self.nvars]
        order = sorted(self._terms, key=lambda e: (sum(e), e), reverse=True)
        return _render([(self._terms[e], e) for e in order], names)

    def __repr__(self):
        return f"MultiPoly({self.to_text()})"


def poly_vars(nvars: int) -> list[MultiPoly]:
    return MultiPoly.variables(nvars)


# ---------------------------------------------------------------------------
# resultants


def _strip(coeffs):
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _prem(f: list[MultiPoly], g: list[MultiPoly]) -> list[MultiPoly]:
    """Pseudo-remainder ``lc(g)^(deg f - deg g + 1) * f mod g``."""
    dg = len(g) - 1
    lc = g[-1]
    r = list(f)
    e = len(f) - len(g) + 1
    while r and len(r) - 1 >= dg:
        shift = len(r) - 1 - dg
        top = r[-1]
        r = [lc * c for c in r]
        for i, gc in enumerate(g):
            r[i + shift] = r[i + shift] - top * gc
        _strip(r)
        e -= 1
    if e > 0 and r:
        m = lc ** e
        r = [m * c for c in r]
    return r


def resultant(p: MultiPoly, q: MultiPoly, var: int) -> MultiPoly:
    """Resultant of ``p`` and ``q`` with respect to variable ``var``.

    Subresultant pseudo-remainder sequence; all divisions are exact so the
    computation never leaves the integer polynomial ring.
    """
    if p.nvars != q.nvars:
        raise ValueError(f"nvars mismatch: {p.nvars} vs {q.nvars}")
    if p.degree(var) < 1 or q.degree(var) < 1:
        raise InvalidEliminationError(
            f"both polynomials need positive degree in variable {var} "
            f"(got {p.degree(var)} and {q.degree(var)})")
    nv = p.nvars
    a = p.coeffs_in(var)
    b = q.coeffs_in(var)
    s = 1
    if len(a) < len(b):
        a, b = b, a
        if (len(a) - 1) % 2 == 1 and (len(b) - 1) % 2 == 1:
            s = -1
    one = MultiPoly.constant(nv, 1)
    g = h = one
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        r = _prem(a, b)
        if not r:
            return MultiPoly._raw(nv, {})
        a = b
        div = g * h ** delta
        b = [c.exquo(div) for c in r]
        g = a[-1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = (g ** delta).exquo(h ** (delta - 1))
        if len(b) == 1:
            da = len(a) - 1
            if da == 1:
                h = b[0]
            else:
                h = (b[0] ** da).exquo(h ** (da - 1))
            return h if s == 1 else -h


# ---------------------------------------------------------------------------
# univariate


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate integer polynomial, coefficients in ascending degree."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "UniPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        other = _as_uni(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_uni(other))

    def __mul__(self, other):
        other = _as_uni(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UniPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "UniPoly":
        return UniPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def primitive(self) -> "UniPoly":
        """Content removed, leading coefficient positive."""
        if not self.coeffs:
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        return UniPoly(c // g for c in self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Fraction) -> int:
        """Exact sign of ``p(x)`` at a rational point."""
        x = Fraction(x)
        num, den = x.numerator, x.denominator
        d = self.degree
        acc = 0
        dpow = 1
        # p(n/d) * d^deg = sum c_k n^k d^(deg-k), evaluated Horner-style in n
        for c in reversed(self.coeffs):
            acc = acc * num + c * dpow
            dpow *= den
        return (acc > 0) - (acc < 0)

    def eval_exact(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod_exact(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        """Division over the rationals; returns ``(q, r)`` only when both are integral."""
        q, r = _divmod_q(self.coeffs, other.coeffs)
        if any(x.denominator != 1 for x in q + r):
            raise ArithmeticError("quotient is not integral")
        return UniPoly(int(x) for x in q), UniPoly(int(x) for x in r)

    def divides(self, other: "UniPoly") -> bool:
        """True iff ``self`` divides ``other`` over the rationals."""
        _, r = _divmod_q(other.coeffs, self.coeffs)
        return all(x == 0 for x in r)

    def mirror(self) -> "UniPoly":
        """``p(-x)``."""
        return UniPoly(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def to_text(self, name: str = "x") -> str:
        terms = [(c, (k,)) for k, c in reversed(list(enumerate(self.coeffs))) if c]
        return _render(terms, [name])

    def __repr__(self):
        return f"UniPoly({self.to_text()})"


def _as_uni(x):
    if isinstance(x, UniPoly):
        return x
    if isinstance(x, int):
        return UniPoly([x])
    raise TypeError(f"cannot combine UniPoly with {type(x).__name__}")


def _divmod_q(a, b):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lb = Fraction(b[-1])
    while len(r) >= len(b) and any(r):
        shift = len(r) - len(b)
        f = r[-1] / lb
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return q, r


def _prem_uni(a: tuple, b: tuple) -> list[int]:
    """``lc(b)^(deg a - deg b + 1) * a mod b``, always with the full power."""
    r = list(a)
    lb = b[-1]
    db = len(b) - 1
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        shift = len(r) - 1 - db
        top = r[-1]
        r = [lb * c for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= top * c
        while r and r[-1] == 0:
            r.pop()
        e -= 1
    if e > 0 and r:
        m = lb ** e
        r = [m * c for c in r]
    return r


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Primitive gcd over Z[x] (primitive PRS), positive leading coefficient."""
    if not p:
        return q.primitive()
    if not q:
        return p.primitive()
    cont = math.gcd(p.content(), q.content())
    a, b = p.primitive(), q.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while b.degree > 0:
        r = UniPoly(_prem_uni(a.coeffs, b.coeffs))
        if not r:
            return _with_content(b.primitive(), cont)
        a, b = b, r.primitive()
    if b:  # nonzero constant remainder: coprime
        return UniPoly([cont])
    return _with_content(a.primitive(), cont)


def _with_content(p, cont):
    return p if cont in (0, 1) else UniPoly(c * cont for c in p.coeffs)


def squarefree(p: UniPoly) -> UniPoly:
    """Squarefree part: distinct factors only, content removed, positive leading coefficient."""
    if not p:
        raise PreconditionError("squarefree part of the zero polynomial is undefined")
    p = p.primitive()
    if p.degree < 1:
        return UniPoly([1])
    g = poly_gcd(p, p.derivative()).primitive()
    if g.degree == 0:
        return p
    q, r = _divmod_q(p.coeffs, g.coeffs)
    # q is rational; scale to integers then make primitive
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in q), 1)
    return UniPoly(int(c * den) for c in q).primitive()


def is_squarefree(p: UniPoly) -> bool:
    return bool(p) and (p.degree < 1 or poly_gcd(p, p.derivative()).degree == 0)


# ---------------------------------------------------------------------------
# real roots


@dataclass(frozen=True)
class RootInterval:
    """Open rational interval ``(lo, hi)`` holding exactly one real root."""

    lo: Fraction
    hi: Fraction
    squarefree: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo < Fraction(x) < self.hi


def sturm_sequence(p: UniPoly) -> list[UniPoly]:
    """Sturm chain ``p, p', -rem(p, p'), ...`` kept integral by positive rescaling."""
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        a, b = seq[-2], seq[-1]
        lb = b.lc
        e = a.degree - b.degree + 1
        r = UniPoly(_prem_uni(a.coeffs, b.coeffs))
        # prem multiplies by lb**e; undo its sign so only a positive factor remains
        if lb < 0 and e % 2 == 1:
            r = -r
        r = -r
        if not r:
            break
        g = r.content()
        seq.append(UniPoly(c // g for c in r.coeffs))
    return seq


def _variations(seq, x: Fraction) -> int:
    signs = [s for s in (p.sign_at(x) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: UniPoly, lo, hi, seq=None) -> int:
    """Number of distinct real roots in ``(lo, hi]``."""
    seq = seq or sturm_sequence(p)
    return _variations(seq, Fraction(lo)) - _variations(seq, Fraction(hi))


def root_bound(p: UniPoly) -> Fraction:
    """Cauchy bound: every root satisfies ``|x| < 1 + max|a_k / a_n|``."""
    lc = abs(p.lc)
    return 1 + Fraction(max(abs(c) for c in p.coeffs[:-1]) if p.degree > 0 else 0, lc)


def isolate_real_roots(p: UniPoly) -> list[RootInterval]:
    """Disjoint isolating intervals, sorted ascending, one per distinct real root."""
    if not p:
        raise PreconditionError("cannot isolate roots of the zero polynomial")
    if p.degree < 1:
        return []
    if not is_squarefree(p):
        raise PreconditionError("root isolation needs a squarefree polynomial")
    seq = sturm_sequence(p)
    m = root_bound(p)
    lo, hi = -m, m
    found = []
    stack = [(lo, hi, count_roots(p, lo, hi, seq))]
    while stack:
        a, b, k = stack.pop()
        if k < 0:
            raise ArithmeticError("inconsistent Sturm count")
        if k == 0:
            continue
        if k == 1:
            # (a, b] contains exactly one root; make the interval open
            if p.sign_at(b) == 0:
                eps = (b - a) / 4
                while count_roots(p, b - eps, b + eps, seq) != 1 or p.sign_at(b + eps) == 0:
                    eps /= 2
                found.append(RootInterval(b - eps, b + eps))
            else:
                found.append(RootInterval(a, b))
            continue
        mid = (a + b) / 2
        if p.sign_at(mid) == 0:
            # nudge off an exact rational root; keep the split strictly inside (a, b)
            step = (b - a) / 8
            cand = mid
            while p.sign_at(cand) == 0:
                cand = mid + step
                step /= 2
            mid = cand
        stack.append((mid, b, count_roots(p, mid, b, seq)))
        stack.append((a, mid, count_roots(p, a, mid, seq)))
    found.sort(key=lambda iv: iv.lo)
    return found


def _shrink(p: UniPoly, lo: Fraction, hi: Fraction, tol: Fraction):
    """Exact bracket ``[lo, hi]`` with ``hi - lo <= tol`` around the single root."""
    slo = p.sign_at(lo)
    shi = p.sign_at(hi)
    if slo == 0:
        return lo, lo
    if shi == 0:
        return hi, hi
    dp = p.derivative()
    while hi - lo > tol:
        mid = (lo + hi) / 2
        x = float(mid)
        # safeguarded Newton guess, rounded to a short dyadic so arithmetic stays cheap
        try:
            d = float(dp.eval_exact(mid))
            step = float(p.eval_exact(mid)) / d if d else math.inf
        except OverflowError:
            step = math.inf
        cand = None
        if math.isfinite(step):
            guess = Fraction(x - step)
            if lo < guess < hi:
                cand = guess
        if cand is not None:
            half = tol / 4
            a, b = max(lo, cand - half), min(hi, cand + half)
            sa, sb = p.sign_at(a), p.sign_at(b)
            if sa == 0:
                return a, a
            if sb == 0:
                return b, b
            if sa != sb:
                lo, hi, slo = a, b, sa
                continue
            # guess missed: the root lies on the side whose sign differs
            if sa == slo:
                lo = b
            else:
                hi = a
            mid = (lo + hi) / 2
        sm = p.sign_at(mid)
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def refine_root_exact(p: UniPoly, iv: RootInterval, tol) -> tuple[Fraction, Fraction]:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return _shrink(p, Fraction(iv.lo), Fraction(iv.hi), Fraction(tol))


def refine_root(p: UniPoly, iv: RootInterval, tol: float) -> float:
    """Root value within ``tol`` of the true root isolated by ``iv``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lo, hi = refine_root_exact(p, iv, tol)
    return float((lo + hi) / 2)


def real_roots(p: UniPoly, tol: float = 1e-14) -> list[float]:
    """Convenience: all distinct real roots of ``p`` as floats."""
    sf = squarefree(p)
    return [refine_root(sf, iv, tol) for iv in isolate_real_roots(sf)]
