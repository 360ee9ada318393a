import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epnlab.errors import ChainBreakError, PreconditionError
from epnlab.ep_finder import find_ep
from epnlab.jordan import (
    Q2_PRINTED,
    Q3_PRINTED,
    Q4_PRINTED,
    TransitionMatrix,
    chain_gauge,
    ep_order,
    flag_angles,
    jordan_chain,
    rank_sequence,
    shift_block,
    verify_similarity,
)
from epnlab.model import hamiltonian_from_values

SQRT2 = math.sqrt(2)


def ep_hamiltonian(n, which=0):
    return hamiltonian_from_values(n, find_ep(n)[which].couplings.values)


def test_shift_block():
    assert np.array_equal(shift_block(3), [[0, 1, 0], [0, 0, 1], [0, 0, 0]])


def test_printed_q2_spans_chain():
    h = hamiltonian_from_values(2, [1.0])
    tm = jordan_chain(h)
    assert isinstance(tm, TransitionMatrix) and tm.length == 2
    assert verify_similarity(h, Q2_PRINTED) <= 1e-15
    assert max(flag_angles(tm.q, Q2_PRINTED)) <= 1e-10


def test_printed_q3():
    h = hamiltonian_from_values(3, [SQRT2])
    assert verify_similarity(h, Q3_PRINTED) <= 1e-12
    tm = jordan_chain(h)
    assert max(flag_angles(tm.q, Q3_PRINTED)) <= 1e-10
    assert abs(tm.q[-1, -1] - 1) <= 1e-14


def test_printed_q3_fails_off_the_ep():
    assert verify_similarity(hamiltonian_from_values(3, [1.0]), Q3_PRINTED) > 0.1


def test_printed_q4():
    h = ep_hamiltonian(4)
    assert verify_similarity(h, Q4_PRINTED) <= 1e-6
    assert verify_similarity(hamiltonian_from_values(4, [1.683771565, 0.4060952085]), Q4_PRINTED) <= 1e-6
    assert max(flag_angles(jordan_chain(h).q, Q4_PRINTED)) <= 1e-6


@pytest.mark.parametrize("n", range(2, 7))
def test_chain_for_every_ep_solution(n):
    for sol in find_ep(n, "all"):
        tm = jordan_chain(hamiltonian_from_values(n, sol.couplings.values))
        assert tm.length == n
        assert tm.similarity_residual <= 1e-6
        assert np.isfinite(tm.condition_number)


def test_chain_break_reports_length():
    h = np.zeros((4, 4), dtype=complex)
    h[0, 1] = h[2, 3] = 1
    with pytest.raises(ChainBreakError) as info:
        jordan_chain(h)
    assert info.value.length == 2


def test_chain_needs_collapsed_spectrum():
    with pytest.raises(PreconditionError):
        jordan_chain(hamiltonian_from_values(3, [1.0]))


def test_singular_q_rejected():
    with pytest.raises(PreconditionError):
        verify_similarity(np.eye(2), np.ones((2, 2)))


def test_ep_order_examples():
    assert ep_order(hamiltonian_from_values(3, [SQRT2])) == 3
    assert ep_order(hamiltonian_from_values(3, [0.0])) == 1
    for n in range(2, 7):
        assert ep_order(ep_hamiltonian(n)) == n


def test_ep_order_at_printed_ep6():
    # ten printed digits resolve the EP6 at rank tolerance 1e-4; three need 1e-2
    assert ep_order(hamiltonian_from_values(6, [2.046061191, 0.8635733388, 0.2605285271]), 1e-4) == 6
    assert ep_order(hamiltonian_from_values(6, [2.046, 0.864, 0.261]), 1e-2) == 6


def test_ep_order_detects_smaller_block():
    # H4(1, 0) has an EP2 at E = 0
    assert ep_order(hamiltonian_from_values(4, [1.0, 0.0])) == 2


def test_rank_sequence_of_nilpotent():
    assert rank_sequence(shift_block(4)) == [4, 3, 2, 1, 0]


@pytest.mark.parametrize("n", range(2, 7))
def test_ep_order_one_in_domain(n, in_domain):
    for c in in_domain(n, 20, seed=100 + n):
        assert ep_order(hamiltonian_from_values(n, c.values)) == 1


def test_chain_gauge_commutes_with_shift():
    g = chain_gauge([1, 2 - 1j, 0.5])
    j = shift_block(3)
    assert np.allclose(g @ j, j @ g)


gauge_entry = st.tuples(st.floats(-1, 1), st.floats(-1, 1)).map(lambda t: complex(*t))


@given(st.integers(2, 6), st.lists(gauge_entry, min_size=5, max_size=5))
def test_similarity_residual_gauge_invariant(n, tail):
    h = ep_hamiltonian(n)
    q = jordan_chain(h).q
    g = chain_gauge([1] + tail[: n - 1])
    assert abs(verify_similarity(h, q @ g) - verify_similarity(h, q)) <= 1e-12
    assert max(flag_angles(q, q @ g)) <= 1e-8


@given(st.lists(gauge_entry, min_size=2, max_size=2))
def test_printed_q3_gauge_invariant(tail):
    h = hamiltonian_from_values(3, [SQRT2])
    g = chain_gauge([1] + tail)
    assert abs(verify_similarity(h, Q3_PRINTED @ g) - verify_similarity(h, Q3_PRINTED)) <= 1e-12
