import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fcschain import entanglement as ent
from fcschain.errors import BadShape, OutOfRange
from fcschain.fcs import reduced_density, solve_invariant_state
from fcschain.parametrization import ParameterVector, build_pair

from conftest import B2_OPT, SQRT2_M1


def _numeric(alpha, phi):
    pair = build_pair(ParameterVector(2, [alpha], [phi]))
    return ent.concurrence_spectrum(reduced_density(pair, solve_invariant_state(pair), 2).rho)


def _random_state(rng, rank=4):
    x = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def test_spin_flip_examples():
    bell = ent._proj(ent.PSI_PLUS)
    assert np.allclose(ent.spin_flip(bell), bell)
    assert np.allclose(ent.spin_flip(np.eye(4) / 4), np.eye(4) / 4)
    assert np.allclose(ent.spin_flip(np.diag([1.0, 0, 0, 0])), np.diag([0, 0, 0, 1.0]))


def test_spin_flip_rejects_wrong_shape():
    with pytest.raises(BadShape):
        ent.spin_flip(np.eye(2))
    with pytest.raises(BadShape):
        ent.concurrence(np.eye(3))


def test_bell_state_spectrum():
    s = ent.concurrence_spectrum(ent._proj(ent.PSI_PLUS))
    assert s.concurrence == pytest.approx(1.0, abs=1e-14)
    assert s.assistance == pytest.approx(1.0, abs=1e-14)


def test_abc_spectrum_and_c_independence():
    a, b, c = 0.3, 0.216, 0.097378
    s = ent.concurrence_spectrum(ent.abc_matrix(a, b, c))
    assert np.allclose(s.lambdas, [a + b, a - b, 0, 0], atol=1e-14)
    assert s.concurrence == pytest.approx(0.432, abs=1e-14)
    assert s.assistance == pytest.approx(0.6, abs=1e-14)
    s0 = ent.concurrence_spectrum(ent.abc_matrix(a, b, 0.0))
    assert np.allclose(s.lambdas, s0.lambdas, atol=1e-14)


def test_spectrum_matches_textbook_route(rng):
    # for full-rank states sqrt(eig(rho rho~)) is well conditioned
    for _ in range(20):
        rho = _random_state(rng)
        ev = np.linalg.eigvals(rho @ ent.spin_flip(rho))
        lam = np.sort(np.sqrt(np.abs(ev.real)))[::-1]
        assert np.allclose(ent.concurrence_spectrum(rho).lambdas, lam, atol=1e-10)


def test_pure_state_concurrence_is_2_det(rng):
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        c = 2 * abs(psi[0] * psi[3] - psi[1] * psi[2])
        assert ent.concurrence(np.outer(psi, psi.conj())) == pytest.approx(c, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_assistance_bounds_concurrence(rank, seed):
    rho = _random_state(np.random.default_rng(seed), rank)
    s = ent.concurrence_spectrum(rho)
    assert 0.0 <= s.concurrence <= s.assistance + 1e-12
    assert s.assistance <= 1.0 + 1e-12
    assert np.all(np.diff(s.lambdas) <= 1e-15)


def test_purity():
    assert ent.purity(ent._proj(ent.PSI_MINUS)) == pytest.approx(1.0)
    assert ent.purity(np.eye(4) / 4) == pytest.approx(0.25)


def test_purity_at_b2_optimum(b2_optimum):
    _, pair, state = b2_optimum
    assert ent.purity(reduced_density(pair, state, 2).rho) == pytest.approx(0.550252, abs=1e-5)


def test_closed_form_purities_reproduce_reference_b9_values():
    a, b, c = 0.300721, 0.217048, -0.0575684
    assert ent.abc_purity(a, b, c) == pytest.approx(0.447191, abs=2e-6)
    assert ent.abc_single_site_purity(a, c) == pytest.approx(0.586052, abs=2e-6)


def test_closed_form_purity_matches_matrix(rng):
    for _ in range(10):
        a = rng.uniform(0, 0.5)
        b = rng.uniform(-a, a) * np.exp(1j * rng.uniform(0, 6))
        c = rng.uniform(-0.2, 0.2) + 1j * rng.uniform(-0.2, 0.2)
        m = ent.abc_matrix(a, b, c)
        assert ent.abc_purity(a, b, c) == pytest.approx(ent.purity(m), abs=1e-14)
        rho1 = m.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
        assert ent.abc_single_site_purity(a, c) == pytest.approx(ent.purity(rho1), abs=1e-14)


def test_analytic_b2_at_optimum():
    assert ent.analytic_concurrence_b2(*B2_OPT) == pytest.approx(SQRT2_M1, abs=1e-6)
    assert ent.analytic_assistance_b2(*B2_OPT) == pytest.approx(0.585787, abs=1e-6)


def test_analytic_b2_vanishes_without_rotation():
    for a in np.linspace(0, math.pi, 7):
        assert ent.analytic_concurrence_b2(a, 0.0) == 0.0


def test_analytic_b2_matches_pipeline_at_named_point():
    s = _numeric(0.0, math.pi / 4)
    assert abs(ent.analytic_concurrence_b2(0.0, math.pi / 4) - s.concurrence) <= 1e-10


def test_concurrence_is_assistance_times_cos_squared():
    for a in np.linspace(0.0, math.pi, 9):
        for p in np.linspace(-1.5, 1.5, 9):
            c = ent.analytic_concurrence_b2(a, p)
            assert c == pytest.approx(ent.analytic_assistance_b2(a, p) * math.cos(p) ** 2, abs=1e-14)


def test_concurrence_equals_assistance_only_without_rotation():
    for a in np.linspace(0.1, 3.0, 9):
        assert ent.analytic_concurrence_b2(a, 0.0) == ent.analytic_assistance_b2(a, 0.0) == 0.0
    assert ent.analytic_concurrence_b2(0.0, 0.7) < ent.analytic_assistance_b2(0.0, 0.7)


def test_analytic_b2_assistance_grid():
    for a in np.linspace(0.05, math.pi - 0.05, 6):
        for p in np.linspace(-1.5, 1.5, 10):
            s = _numeric(a, p)
            assert abs(ent.analytic_assistance_b2(a, p) - s.assistance) <= 1e-10


def test_mems_examples():
    assert ent.mems_point(1.0) == pytest.approx((1.0, 1.0), abs=1e-14)
    assert ent.mems_point(0.0) == pytest.approx((1 / 3, 0.0), abs=1e-14)
    lo = (1 / 3 + 1 / 3) * ent._proj(ent.PSI_PLUS) + ent._proj(ent.KET_11) / 3
    hi = (2 / 3) * ent._proj(ent.PSI_PLUS) + (1 / 3) * ent._proj(ent.KET_11)
    assert np.allclose(lo, hi, atol=1e-15)
    assert ent.mems_point(2 / 3) == pytest.approx((5 / 9, 2 / 3), abs=1e-14)


def test_mems_concurrence_equals_q():
    for q in np.linspace(0, 1, 21):
        assert ent.mems_point(q)[1] == pytest.approx(q, abs=1e-12)


def test_werner_examples():
    assert ent.werner_point(0.0) == pytest.approx((0.25, 0.0), abs=1e-15)
    assert ent.werner_point(1.0) == pytest.approx((1.0, 1.0), abs=1e-14)
    assert ent.werner_point(1 / 3)[1] <= 1e-14
    for p in np.linspace(0, 1, 11):
        assert ent.werner_point(p)[1] == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


@pytest.mark.parametrize("fn", [ent.mems_point, ent.werner_point])
def test_reference_families_reject_out_of_range(fn):
    for x in (-0.1, 1.1):
        with pytest.raises(OutOfRange):
            fn(x)
