import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from epnlab.charpoly import ep_conditions, secular_numeric, secular_symbolic
from epnlab.ep_finder import condition_residual_max
from epnlab.model import hamiltonian_from_values
from epnlab.polyalg import MultiPoly

# couplings as printed to ten digits in the worked examples
PRINTED_EP = {
    2: (1.0,),
    3: (1.414213562,),
    4: (1.683771565, 0.4060952085),
    5: (1.885033504, 0.6683178062),
    6: (2.046061191, 0.8635733388, 0.2605285271),
}


def sympy_secular(n):
    """det(E I - H) expanded by sympy, as {power: expression in A, B, ...}."""
    e = sympy.Symbol("E")
    syms = sympy.symbols("A B C D")[: n // 2]
    h = sympy.zeros(n, n)
    for k in range(n - 1):
        h[k, k + 1] = h[k + 1, k] = -1
    for k, s in enumerate(syms[: n // 2]):
        h[k, k] = -sympy.I * s
        h[n - 1 - k, n - 1 - k] = sympy.I * s
    poly = sympy.Poly(sympy.expand((e * sympy.eye(n) - h).det(method="berkowitz")), e)
    return {m[0]: c for m, c in zip(poly.monoms(), poly.coeffs())}, syms


def to_sympy(p: MultiPoly, syms):
    return sum(c * sympy.Mul(*[s ** k for s, k in zip(syms, exps)]) for exps, c in p.terms.items())


@pytest.mark.parametrize("n", range(2, 8))
def test_symbolic_matches_sympy_determinant(n):
    expected, syms = sympy_secular(n)
    sec = secular_symbolic(n)
    for k in range(n + 1):
        got = to_sympy(sec.coeffs[k], syms)
        assert sympy.expand(got - expected.get(k, 0)) == 0


def test_printed_secular_forms():
    a, b = MultiPoly.variables(2)
    assert secular_symbolic(2).coeffs[0] == MultiPoly.variable(1, 0) ** 2 - 1
    s4 = secular_symbolic(4)
    assert s4.coeffs[2] == -3 + a ** 2 + b ** 2
    assert s4.coeffs[0] == (1 + a * b) ** 2 - a ** 2
    s5 = secular_symbolic(5)
    assert s5.coeffs[3] == -(4 - a ** 2 - b ** 2)
    assert s5.coeffs[1] == -(-3 - 2 * b * a + 2 * a ** 2 - b ** 2 * a ** 2)
    assert s5.coeffs[5] == 1 and s5.coeffs[4].is_zero()


def test_ep_conditions_examples():
    a, b = MultiPoly.variables(2)
    assert ep_conditions(4) == [a ** 2 + b ** 2 - 3, (1 + a * b) ** 2 - a ** 2]
    (x,) = MultiPoly.variables(1)
    assert ep_conditions(2) == [x ** 2 - 1]
    a3, b3, c3 = MultiPoly.variables(3)
    six = ep_conditions(6)
    assert len(six) == 3
    assert six[0] == -5 + a3 ** 2 + b3 ** 2 + c3 ** 2


@pytest.mark.parametrize("n", range(2, 11))
def test_ep_conditions_square(n):
    conds = ep_conditions(n)
    assert len(conds) == n // 2
    assert all(p.nvars == n // 2 for p in conds)


def test_secular_numeric_examples():
    c2 = secular_numeric(hamiltonian_from_values(2, [1.0]))
    assert np.allclose(c2, [0, 0, 1], atol=1e-14)
    c3 = secular_numeric(hamiltonian_from_values(3, [1.0]))
    assert np.allclose(c3, [0, -1, 0, 1], atol=1e-14)
    c4 = secular_numeric(hamiltonian_from_values(4, PRINTED_EP[4]))
    assert np.max(np.abs(c4[:-1])) < 1e-8


@given(st.integers(2, 10), st.data())
def test_symbolic_and_numeric_agree(n, data):
    vals = data.draw(st.lists(st.floats(-2, 2), min_size=n // 2, max_size=n // 2))
    sym = np.array(secular_symbolic(n).evaluate(vals), dtype=complex)
    num = secular_numeric(hamiltonian_from_values(n, vals))
    assert np.max(np.abs(sym - num)) <= 1e-10 * max(1.0, np.max(np.abs(num)))


@given(st.integers(2, 10))
def test_parity_structure(n):
    sec = secular_symbolic(n)
    for k, c in enumerate(sec.coeffs):
        if (n - k) % 2:
            assert c.is_zero()
        for coeff in c.terms.values():
            assert isinstance(coeff, int)


@given(st.integers(2, 8), st.data())
def test_vieta_constant_term(n, data):
    vals = data.draw(st.lists(st.floats(-2, 2), min_size=n // 2, max_size=n // 2))
    h = hamiltonian_from_values(n, vals)
    const = complex(secular_symbolic(n).evaluate(vals)[0])
    assert abs(const - np.linalg.det(-h)) <= 1e-10 * max(1.0, abs(const))
    assert abs(np.prod(np.linalg.eigvals(h)) * (-1) ** n - const) <= 1e-9 * max(1.0, abs(const))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_conditions_vanish_at_printed_couplings(n):
    assert condition_residual_max(n, PRINTED_EP[n]) <= 1e-7


@pytest.mark.xfail(strict=True, reason="printed EP6 A and C are accurate to about 1e-7 only; "
                   "the residual there is 9.5e-7")
def test_conditions_vanish_at_printed_ep6():
    assert condition_residual_max(6, PRINTED_EP[6]) <= 1e-7


def test_secular_text():
    assert secular_symbolic(2).to_text() == "E^2+(A^2-1)"
