import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epnlab.domain import (
    A_EP4,
    B_EP4,
    DomainSample,
    boundary_bisect,
    boundary_curves,
    classify_point,
    corridor_constraint,
    corridor_constraint_as_printed,
    corridor_point,
    make_grid,
    margin_grid,
    n4_inequalities,
    n4_inside,
    n4_margin,
    scan_grid,
    track_corridor_root,
    write_boundary,
)
from epnlab.errors import CorridorExitError, PreconditionError
from epnlab.ep_finder import find_ep
from epnlab.model import CouplingVector
from epnlab.spectral import COMPLEX, REAL_DEGENERATE, REAL_NONDEGENERATE


def cv(*vals):
    n = 2 * len(vals)
    return CouplingVector(n, vals)


def test_ep4_constant():
    (sol,) = find_ep(4)
    assert (A_EP4, B_EP4) == pytest.approx(sol.couplings.values, abs=1e-14)


def test_classify_examples():
    assert classify_point(cv(0.5)).classification == REAL_NONDEGENERATE
    assert classify_point(cv(1.5)).classification == COMPLEX
    s = classify_point(cv(1.683771565, 0.4060952085))
    assert s.classification == REAL_DEGENERATE and not s.inside
    assert isinstance(s, DomainSample)


def test_sample_record_and_margin():
    s = classify_point(cv(0.5))
    assert s.margin() > 0
    assert classify_point(cv(1.5)).margin() < 0
    assert sorted(s.as_record()) == ["A", "class", "max_imag", "min_gap"]


def test_inequality_examples():
    assert n4_inequalities(0, 0) == (-3, 1, 5) and n4_inside(0, 0)
    assert max(abs(v) for v in n4_inequalities(1.683771565, 0.4060952085)) <= 1e-7
    bv, _, _ = n4_inequalities(2, 2)
    assert bv == 5 and not n4_inside(2, 2)
    assert n4_margin(0, 0) == 1


def test_n4_classifiers_agree_on_grid():
    grid = make_grid(4, [(-2, 2), (-2, 2)], 200)
    samples = scan_grid(4, [(-2, 2), (-2, 2)], 200)
    spectral = np.array([s.inside for s in samples]).reshape(grid.shape)
    a, b = np.meshgrid(*grid.axes, indexing="ij")
    ineq = n4_margin(a, b) > 0
    assert np.mean(spectral == ineq) >= 0.99
    # any disagreement sits within one grid step of an inequality sign change
    for i, j in zip(*np.nonzero(spectral != ineq)):
        block = ineq[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
        assert block.any() and not block.all()


def test_n2_scan():
    samples = scan_grid(2, [(-2, 2)], 401)
    for s in samples:
        assert s.inside == (abs(s.couplings.values[0]) < 1)


def test_ep4_corners_degenerate():
    for a, b in ((A_EP4, B_EP4), (-0.37150697400007465, 1.6917395095786194)):
        for sgn in (1, -1):
            assert classify_point(cv(sgn * a, sgn * b)).classification == REAL_DEGENERATE
    # mixed signs are not on the domain at all
    assert classify_point(cv(A_EP4, -B_EP4)).classification == COMPLEX


def test_spike_narrows_towards_tip():
    bs = np.linspace(-1, 0, 20001)
    widths = [np.sum(n4_margin(a, bs) > 0) for a in (-1.5, -1.6, -1.65, -1.68)]
    assert all(x > y for x, y in zip(widths, widths[1:]))
    assert widths[-1] <= 1


def test_domain_symmetric_under_sign_flip():
    samples = scan_grid(4, [(-2, 2), (-2, 2)], 61)
    grid = np.array([s.classification for s in samples]).reshape(61, 61)
    # exact EP cells (gap at round-off level, ~sqrt(eps)) are tolerance-decided
    clear = np.array([s.min_gap > 1e-6 for s in samples]).reshape(61, 61)
    clear &= clear[::-1, ::-1]
    assert clear.mean() > 0.99
    assert np.array_equal(grid[clear], grid[::-1, ::-1][clear])


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_sign_flip_property(a, b, c):
    p = CouplingVector(6, (a, b, c))
    s, t = classify_point(p), classify_point(-p)
    if min(s.min_gap, t.min_gap) > 1e-6:
        assert s.classification == t.classification


def test_n2_boundary_bisection():
    assert abs(boundary_bisect(2, [1.0], 0.0, 2.0) - 1) <= 1e-10
    assert abs(boundary_bisect(2, [-1.0], 0.0, 2.0) - 1) <= 1e-10
    with pytest.raises(PreconditionError):
        boundary_bisect(2, [1.0], 1.5, 2.0)


def test_grid_errors():
    with pytest.raises(PreconditionError):
        make_grid(6, [(-1, 1), (-1, 1), (-1, 1)], 10)
    with pytest.raises(ValueError):
        make_grid(4, [(-1, 1), (-1, 1)], 1)
    g = make_grid(6, [(-1, 1), (-1, 1)], 5, fixed={2: 0.26})
    assert g.shape == (5, 5) and g.free == (0, 1)


def test_n6_slice_scan():
    samples = scan_grid(6, [(-1, 1), (-1, 1)], 9, fixed={2: 0.1})
    assert len(samples) == 81
    assert all(s.couplings.values[2] == 0.1 for s in samples)
    assert samples[1].couplings.values[:2] == (-1.0, -0.75)


def test_scan_deterministic_across_threads(tmp_path):
    outs = []
    for threads in (1, 4):
        path = tmp_path / f"scan{threads}.csv"
        scan_grid(4, [(-2, 2), (-2, 2)], 40, threads=threads, out=path, keep=False)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    text = outs[0].decode()
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == "A,B,class,min_gap,max_imag"
    assert len(lines) == 1 + 40 * 40


def test_streaming_without_keep(tmp_path):
    assert scan_grid(2, [(-2, 2)], 11, out=tmp_path / "s.csv", keep=False) == []


def test_thread_cap(monkeypatch):
    from epnlab.domain import thread_count
    monkeypatch.setenv("EPNLAB_THREADS", "2")
    assert thread_count(8) == 2
    monkeypatch.delenv("EPNLAB_THREADS")
    assert thread_count(3) == 3


def test_boundary_curves(tmp_path):
    grid = make_grid(4, [(-2, 2), (-2, 2)], 81)
    samples = scan_grid(4, [(-2, 2), (-2, 2)], 81)
    curves = boundary_curves(grid, margin_grid(samples, grid.shape))
    assert curves
    pts = np.vstack(curves)
    # the traced boundary hugs the inequality boundary
    assert np.median(np.abs(n4_margin(pts[:, 0], pts[:, 1]))) < 0.2
    path = tmp_path / "b.dat"
    write_boundary(curves, path)
    blocks = path.read_text().split("\n\n")
    assert len(blocks) == len(curves)
    x, y = map(float, blocks[0].splitlines()[0].split())
    assert -2 <= x <= 2 and -2 <= y <= 2


def test_corridor_constraint_examples():
    assert abs(corridor_constraint(1.683771565, 0, 0)) <= 1e-7
    assert corridor_constraint(A_EP4, 0.01, 0) > 0
    assert corridor_constraint_as_printed(0, 0, 0) == -2


def test_corridor_root_examples():
    assert track_corridor_root(0, 0) == pytest.approx(1.683771565, abs=1e-9)
    assert track_corridor_root(0.01, 0) < A_EP4
    assert track_corridor_root(0.05, 0) < A_EP4


def test_corridor_gamma_half_pi_is_beta_only():
    beta = 0.05
    ch = math.cosh(beta)
    # A^4 + (A cosh b - 1)^2 - 3 A^2 expanded
    roots = np.roots([1, 0, ch * ch - 3, -2 * ch, 1])
    real = [r.real for r in roots if abs(r.imag) < 1e-12]
    expected = min(real, key=lambda r: abs(r - A_EP4))
    got = track_corridor_root(beta, math.pi / 2)
    assert got == pytest.approx(expected, abs=1e-12)
    assert got < A_EP4


def test_corridor_monotone_in_beta():
    roots = [track_corridor_root(b, 0) for b in np.linspace(0, 0.1, 20)]
    assert np.all(np.diff(roots) < 0)


def test_corridor_point_on_ep4_condition():
    a, b = corridor_point(0, 0)
    assert (a, b) == pytest.approx((A_EP4, B_EP4), abs=1e-12)


def test_corridor_exit():
    fold = max(r.real for r in np.roots([4, 0, -4, -2]) if abs(r.imag) < 1e-12)
    with pytest.raises(CorridorExitError):
        track_corridor_root(0.05, 0, a0=fold)
