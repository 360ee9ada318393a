import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epnlab.errors import InvalidDimensionError
from epnlab.model import (
    CouplingVector,
    build_hamiltonian,
    build_laplacian,
    build_potential,
    check_pt_symmetry,
    hamiltonian_from_values,
    matrix_from_json,
    matrix_to_json,
)

coupling = st.floats(-5, 5, allow_nan=False)


@st.composite
def coupling_vectors(draw, nmax=10):
    n = draw(st.integers(2, nmax))
    return CouplingVector(n, tuple(draw(st.lists(coupling, min_size=n // 2, max_size=n // 2))))


def test_laplacian_small():
    assert np.array_equal(build_laplacian(2), [[0, -1], [-1, 0]])
    assert np.array_equal(build_laplacian(3), [[0, -1, 0], [-1, 0, -1], [0, -1, 0]])


def test_laplacian_n5_spectrum():
    ev = np.sort(np.linalg.eigvalsh(build_laplacian(5).real))
    expected = np.sort([-2 * math.cos(k * math.pi / 6) for k in range(1, 6)])
    assert np.allclose(ev, expected, atol=1e-12)
    assert np.allclose(ev, [-math.sqrt(3), -1, 0, 1, math.sqrt(3)], atol=1e-12)


def test_laplacian_rejects_small_n():
    with pytest.raises(InvalidDimensionError):
        build_laplacian(1)


def test_potential_examples():
    v = build_potential(CouplingVector(3, (math.sqrt(2),)))
    assert np.allclose(v, np.diag([-1j * math.sqrt(2), 0, 1j * math.sqrt(2)]))
    assert not np.any(build_potential(CouplingVector(4, (0.0, 0.0))))
    assert np.array_equal(build_potential(CouplingVector(4, (1.0, 2.0))), np.diag([-1j, -2j, 2j, 1j]))


def test_odd_centre_is_zero():
    v = build_potential(CouplingVector(7, (1.0, 2.0, 3.0)))
    assert v[3, 3] == 0


def test_hamiltonian_n2():
    a = 0.7
    h = build_hamiltonian(CouplingVector(2, (a,)))
    assert np.allclose(h, [[-1j * a, -1], [-1, 1j * a]])


def test_hamiltonian_n4_n5_layout():
    a, b = 0.3, 1.1
    h4 = build_hamiltonian(CouplingVector(4, (a, b)))
    assert np.allclose(np.diag(h4), [-1j * a, -1j * b, 1j * b, 1j * a])
    h5 = build_hamiltonian(CouplingVector(5, (a, b)))
    assert np.allclose(np.diag(h5), [-1j * a, -1j * b, 0, 1j * b, 1j * a])
    assert np.allclose(np.diag(h5, 1), -1)


def test_coupling_vector_validation():
    with pytest.raises(ValueError):
        CouplingVector(4, (1.0,))
    with pytest.raises(ValueError):
        CouplingVector(2, (float("nan"),))
    with pytest.raises(InvalidDimensionError):
        CouplingVector(1, ())
    assert (-CouplingVector(4, (1.0, 2.0))).values == (-1.0, -2.0)


def test_pt_symmetry_examples():
    assert check_pt_symmetry(hamiltonian_from_values(3, [math.sqrt(2)]))
    h = hamiltonian_from_values(2, [1.0])
    h[0, 1] = 1
    assert not check_pt_symmetry(h)
    real = np.array([[2, 3, 0], [3, 5, 3], [0, 3, 2]], dtype=complex)
    assert check_pt_symmetry(real)


def test_json_roundtrip():
    h = hamiltonian_from_values(4, [0.5, -1.25])
    assert np.array_equal(matrix_from_json(matrix_to_json(h)), h)


@given(coupling_vectors())
def test_hamiltonian_is_sum_of_parts(c):
    assert np.array_equal(build_hamiltonian(c), build_laplacian(c.n) + build_potential(c))


@given(coupling_vectors())
def test_built_hamiltonians_are_pt_symmetric(c):
    assert check_pt_symmetry(build_hamiltonian(c))


@given(coupling_vectors())
def test_potential_structure(c):
    v = build_potential(c)
    d = np.diag(v)
    assert np.all(d.real == 0)
    assert abs(d.sum()) <= 1e-12
    assert np.array_equal(v.conj().T, -v)
    assert abs(np.trace(build_hamiltonian(c))) <= 1e-12


@given(coupling_vectors())
def test_complex_symmetric(c):
    h = build_hamiltonian(c)
    assert np.array_equal(h.T, h)
