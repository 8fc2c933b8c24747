import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fcschain import entanglement as ent
from fcschain.errors import BadSubset, CapExceeded, NullspaceDegenerate, NullspaceIllConditioned, SolveFailed
from fcschain.fcs import (
    AuxiliaryState,
    KrausPair,
    ReducedState,
    check_unitality,
    fixed_point_matrix,
    fixed_point_residual,
    next_nearest,
    partial_trace,
    reduced_density,
    solve_invariant_state,
    transfer,
)
from fcschain.parametrization import ParameterVector, bloch_length_sq, build_pair

from conftest import B2_OPT

angles = st.floats(0.0, 2 * math.pi, allow_nan=False)


def _pair(b, x):
    return build_pair(ParameterVector.from_flat(b, np.asarray(x)))


def test_unitality_identity_pair_is_zero():
    assert check_unitality(KrausPair(np.zeros((3, 3)), np.eye(3))) == 0.0


def test_unitality_double_identity_gives_sqrt_b():
    for b in (2, 3, 5):
        assert check_unitality(KrausPair(np.eye(b), np.eye(b))) == pytest.approx(math.sqrt(b), abs=1e-15)


def test_unitality_at_reference_b2_point(b2_optimum):
    _, pair, _ = b2_optimum
    assert check_unitality(pair) <= 1e-14


def test_kraus_pair_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        KrausPair(np.zeros((2, 2)), np.zeros((3, 3)))


def test_pair_is_read_only():
    pair = KrausPair(np.zeros((2, 2)), np.eye(2))
    with pytest.raises(ValueError):
        pair.v2[0, 0] = 5.0


def test_transfer_matches_explicit_sum(rng):
    pair = _pair(3, rng.uniform(0, 2 * np.pi, 4))
    rho = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    expected = sum(v.conj().T @ rho @ v for v in pair.kraus)
    assert np.allclose(transfer(pair, rho), expected, atol=1e-14)


def test_fixed_point_matrix_acts_like_transfer(rng):
    pair = _pair(3, rng.uniform(0, 2 * np.pi, 4))
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lhs = (fixed_point_matrix(pair) @ x.reshape(-1)).reshape(3, 3)
    assert np.allclose(lhs, transfer(pair, x) - x, atol=1e-13)


def test_invariant_state_pure_spin_up_at_zero_angles():
    state = solve_invariant_state(build_pair(ParameterVector(2, [0.0], [0.0])))
    assert np.allclose(state.rho, np.diag([1.0, 0.0]), atol=1e-14)
    assert state.rank == 3


def test_invariant_state_at_b2_optimum(b2_optimum):
    _, pair, state = b2_optimum
    assert bloch_length_sq(state.rho) == pytest.approx(0.5, abs=1e-5)
    assert fixed_point_residual(pair, state.rho) <= 1e-12


def test_identity_channel_is_degenerate():
    with pytest.raises(NullspaceDegenerate):
        solve_invariant_state(KrausPair(np.zeros((2, 2)), np.eye(2)))


def test_weakly_separated_state_is_refused():
    # sin(alpha) close to -1: the fixed-point map has a second singular value ~1e-8
    pair = build_pair(ParameterVector(2, [4.71211095], [1.03008207]))
    with pytest.raises(NullspaceIllConditioned):
        solve_invariant_state(pair)
    state = solve_invariant_state(pair, gap_rtol=0.0)
    assert fixed_point_residual(pair, state.rho) < 1e-14


def test_solve_failures_share_a_base():
    assert issubclass(NullspaceIllConditioned, NullspaceDegenerate)
    assert issubclass(NullspaceDegenerate, SolveFailed)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_invariant_state_is_a_density_matrix(b, data):
    x = data.draw(st.lists(angles, min_size=ParameterVector.dimension(b), max_size=ParameterVector.dimension(b)))
    pair = _pair(b, x)
    try:
        state = solve_invariant_state(pair)
    except SolveFailed:
        return
    rho = state.rho
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho)[0] >= -1e-12
    assert fixed_point_residual(pair, rho) <= 1e-9
    assert state.rank == b * b - 1


def test_single_site_state_at_zero_angles():
    pair = build_pair(ParameterVector(2, [0.0], [0.0]))
    rho1 = reduced_density(pair, solve_invariant_state(pair), 1)
    assert np.allclose(rho1.rho, np.diag([0.0, 1.0]), atol=1e-15)


def test_nearest_neighbour_state_at_b2_optimum(b2_optimum):
    _, pair, state = b2_optimum
    rho12 = reduced_density(pair, state, 2).rho
    a, bb, c = ent.abc_elements(rho12)
    assert (a, bb.real, c.real) == pytest.approx((0.292893, 0.207107, 0.174155), abs=1e-5)
    assert np.max(np.abs(rho12 - ent.abc_matrix(a, bb, c))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.data())
def test_nilpotent_v1_kills_the_00_entry(b, data):
    x = data.draw(st.lists(angles, min_size=ParameterVector.dimension(b), max_size=ParameterVector.dimension(b)))
    pair = _pair(b, x)
    try:
        state = solve_invariant_state(pair)
    except SolveFailed:
        return
    assert abs(reduced_density(pair, state, 2).rho[0, 0]) < 1e-14


def test_window_cap():
    pair = build_pair(ParameterVector(2, [0.3], [0.4]))
    state = solve_invariant_state(pair)
    with pytest.raises(CapExceeded):
        reduced_density(pair, state, 7)
    assert reduced_density(pair, state, 7, cap=7).rho.shape == (128, 128)


def test_partial_trace_identity_and_bad_subsets(b2_optimum):
    _, pair, state = b2_optimum
    r3 = reduced_density(pair, state, 3)
    assert np.array_equal(partial_trace(r3, [1, 2, 3]).rho, r3.rho)
    for keep in ([0], [4], [1, 1], []):
        with pytest.raises(BadSubset):
            partial_trace(r3, keep)


def test_partial_trace_single_site_purity(b2_optimum):
    _, pair, state = b2_optimum
    rho1 = partial_trace(reduced_density(pair, state, 2), [1]).rho
    assert ent.purity(rho1) == pytest.approx(0.646446, abs=1e-5)


def test_partial_trace_on_product_state():
    a = np.diag([0.25, 0.75])
    b = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    c = np.diag([1.0, 0.0])
    rs = ReducedState(3, np.kron(np.kron(a, b), c))
    assert np.allclose(partial_trace(rs, [1, 3]).rho, np.kron(a, c))
    assert np.allclose(partial_trace(rs, [2]).rho, b)


def test_next_nearest_vanishes_at_b2_optimum(b2_optimum):
    _, pair, state = b2_optimum
    r13 = next_nearest(pair, state)
    assert ent.concurrence(r13.rho) <= 1e-12
    assert np.allclose(r13.rho, partial_trace(reduced_density(pair, state, 3), [1, 3]).rho, atol=1e-12)


def test_partial_trace_follows_keep_order():
    a = np.diag([0.25, 0.75])
    c = np.array([[0.5, 0.5], [0.5, 0.5]])
    rs = ReducedState(2, np.kron(a, c))
    assert np.allclose(partial_trace(rs, [2, 1]).rho, np.kron(c, a))


def test_next_nearest_point_with_entangled_second_neighbours():
    pair = build_pair(ParameterVector(2, [0.88563], [0.25066]))
    state = solve_invariant_state(pair)
    r13 = next_nearest(pair, state).rho
    assert np.trace(r13).real == pytest.approx(1.0, abs=1e-14)
    assert ent.concurrence(r13) == pytest.approx(0.169470, abs=1e-4)
    assert ent.concurrence(reduced_density(pair, state, 2).rho) == pytest.approx(0.270660, abs=1e-4)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.data())
def test_next_nearest_matches_trace_route(b, data):
    x = data.draw(st.lists(angles, min_size=ParameterVector.dimension(b), max_size=ParameterVector.dimension(b)))
    pair = _pair(b, x)
    try:
        state = solve_invariant_state(pair)
    except SolveFailed:
        return
    traced = partial_trace(reduced_density(pair, state, 3), [1, 3]).rho
    assert np.max(np.abs(next_nearest(pair, state).rho - traced)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(2, 4), st.data())
def test_marginals_are_consistent(b, n, data):
    x = data.draw(st.lists(angles, min_size=ParameterVector.dimension(b), max_size=ParameterVector.dimension(b)))
    pair = _pair(b, x)
    try:
        state = solve_invariant_state(pair)
    except SolveFailed:
        return
    small = reduced_density(pair, state, n - 1).rho
    big = reduced_density(pair, state, n)
    assert np.max(np.abs(partial_trace(big, range(1, n)).rho - small)) <= 1e-10
    assert np.max(np.abs(partial_trace(big, range(2, n + 1)).rho - small)) <= 1e-10


def test_auxiliary_state_validates_shape():
    with pytest.raises(ValueError):
        AuxiliaryState(np.zeros((2, 3)), 3, np.zeros(4))
