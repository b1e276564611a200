import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import e, epsilon_0

from iontransport.core import (
    BE9_PAIR_MASS,
    COULOMB,
    HBAR,
    EquilibriumError,
    TrapParams,
    cm_potential,
    coupling_potential,
    effective_frequency,
    equilibrium,
    equilibrium_distance,
    fig1_params,
    fig5_params,
    harmonic_equilibrium_distance,
    potential_1d_effective,
    potential_2d,
    potential_2d_gradient,
    relative_force_gradient,
    relative_potential,
)

W1 = 2 * math.pi * 20e3


def test_constants():
    assert HBAR == 1.054571817e-34
    assert COULOMB == pytest.approx(e**2 / (4 * math.pi * epsilon_0), rel=1e-15)
    assert COULOMB == pytest.approx(2.30708e-28, rel=1e-5)


@pytest.mark.parametrize("kw", [dict(M=0, omega=1), dict(M=1, omega=0), dict(M=1, omega=1, beta=-1),
                                dict(M=1, omega=1, d=-1), dict(M=1, omega=1, Cc=0),
                                dict(M=1, omega=1, n_ions=1)])
def test_trap_params_validation(kw):
    with pytest.raises(ValueError):
        TrapParams(**kw)


def test_two_ion_mass():
    p = fig1_params()
    assert p.M == BE9_PAIR_MASS and p.m == p.M / 2
    assert p.omega == pytest.approx(W1) and p.d == 370e-6 and p.beta == 1e6


def test_fig1_equilibrium_distance():
    # reference value 62 um
    assert equilibrium_distance(fig1_params()) == pytest.approx(62e-6, abs=0.5e-6)


def test_harmonic_equilibrium_closed_form():
    p = fig1_params(beta=0.0)
    r = equilibrium_distance(p)
    closed = (p.Cc / (2 * p.M * p.omega**2)) ** (1 / 3)
    assert r == pytest.approx(closed, rel=1e-13)
    assert r == pytest.approx(62.5e-6, abs=0.05e-6)
    assert p.M * p.omega**2 * r == pytest.approx(p.Cc / (2 * r**2), rel=1e-12)


@pytest.mark.parametrize("beta, expected", [(6.4e9, 2.807e-6), (1e9, 2.883e-6), (1e10, 2.764e-6)])
def test_fig5_equilibrium_distances(beta, expected):
    assert abs(equilibrium_distance(fig5_params(beta)) - expected) <= 0.01e-6


def test_equilibrium_is_stationary():
    for p in (fig1_params(), fig5_params(1e10), fig1_params(beta=0.0)):
        r = equilibrium_distance(p)
        assert abs(relative_force_gradient(p, r)) < 1e-12 * p.M * p.omega**2 * r
        # oracle: mpmath root of the same stationarity condition
        M, w2, b, C = map(mp.mpf, (p.M, p.omega**2, p.beta, p.Cc))
        with mp.workdps(40):
            ref = mp.findroot(lambda x: M * w2 * (x + 2 * b * x**3) - C / (2 * x**2), r)
        assert r == pytest.approx(float(ref), rel=1e-13)


def test_equilibrium_bracket_failure():
    # quartic term so strong that the minimum lies far inside the bracket floor
    with pytest.raises(EquilibriumError):
        equilibrium_distance(fig1_params(beta=1e30))


def test_effective_frequency_examples():
    p = fig1_params()
    assert effective_frequency(fig1_params(beta=0.0), 62e-6) == p.omega
    assert effective_frequency(p, 62e-6) / p.omega == pytest.approx(math.sqrt(1 + 6e6 * 62e-6**2))
    assert effective_frequency(p, 62e-6) / p.omega == pytest.approx(1.0115, abs=5e-4)
    p5 = fig5_params(1e10)
    assert effective_frequency(p5, 2.764e-6) / p5.omega == pytest.approx(1.208, abs=1e-3)
    with pytest.raises(ValueError):
        effective_frequency(p, 0.0)


@given(st.floats(0, 1e10), st.floats(0, 1e10), st.floats(1e-7, 1e-4))
def test_effective_frequency_monotone_in_beta(b1, b2, r):
    lo, hi = sorted((b1, b2))
    f = lambda b: effective_frequency(fig1_params(beta=b), r)
    assert f(lo) <= f(hi)
    assert f(lo) >= W1 * (1 - 1e-15)


def test_equilibrium_info():
    eq = equilibrium(fig1_params())
    assert eq.r_e > 0 and eq.omega_tilde >= fig1_params().omega


def test_potential_2d_harmonic_limit():
    p = fig1_params(beta=0.0)
    r = np.linspace(10e-6, 200e-6, 50)
    want = 0.5 * p.M * p.omega**2 * r**2 + p.Cc / (2 * r)
    np.testing.assert_allclose(potential_2d(p, 0.0, r), want, rtol=1e-15)


def test_potential_2d_stationary_at_re():
    p = fig1_params()
    r_e = equilibrium_distance(p)
    dq, dr = potential_2d_gradient(p, 0.0, r_e)
    assert dq == 0.0
    assert abs(dr) < 1e-12 * p.M * p.omega**2 * r_e


def test_potential_2d_term_by_term_mpmath():
    p = fig1_params()
    q, r = 10e-6, 62e-6
    with mp.workdps(50):
        M, w2, b, C = map(mp.mpf, (p.M, p.omega**2, p.beta, p.Cc))
        Q, R = mp.mpf(q), mp.mpf(r)
        ref = (M * w2 / 2 * (Q**2 + b * Q**4) + M * w2 / 2 * (R**2 + b * R**4) + C / (2 * R)
               + 3 * M * w2 * b * Q**2 * R**2)
    assert float(potential_2d(p, q, r)) == pytest.approx(float(ref), rel=1e-14)
    parts = cm_potential(p, q) + relative_potential(p, r) + coupling_potential(p, q, r)
    assert float(potential_2d(p, q, r)) == pytest.approx(float(parts), rel=1e-15)


@pytest.mark.parametrize("r", [0.0, -1e-6])
def test_potential_2d_rejects_nonpositive_r(r):
    with pytest.raises(ValueError):
        potential_2d(fig1_params(), 0.0, r)


def test_potential_2d_gradient_matches_finite_difference():
    p = fig1_params()
    q, r, h = 7e-6, 61e-6, 1e-10
    dq, dr = potential_2d_gradient(p, q, r)
    fd_q = (potential_2d(p, q + h, r) - potential_2d(p, q - h, r)) / (2 * h)
    fd_r = (potential_2d(p, q, r + h) - potential_2d(p, q, r - h)) / (2 * h)
    assert dq == pytest.approx(float(fd_q), rel=1e-5)
    assert dr == pytest.approx(float(fd_r), rel=1e-4, abs=1e-6 * abs(dq))


def test_potential_2d_symmetry_and_monotonicity():
    p = fig1_params()
    r_e = equilibrium_distance(p)
    q = np.linspace(-50e-6, 50e-6, 101)
    np.testing.assert_array_equal(potential_2d(p, q, r_e), potential_2d(p, -q, r_e))
    left = potential_2d(p, 0.0, np.linspace(0.05 * r_e, r_e, 400))
    right = potential_2d(p, 0.0, np.linspace(r_e, 20 * r_e, 400))
    assert np.all(np.diff(left) < 0) and np.all(np.diff(right) > 0)


def test_potential_1d_effective():
    p = fig1_params()
    eq = equilibrium(p)
    assert potential_1d_effective(p, eq.r_e, 0.0) == 0.0
    p0 = fig1_params(beta=0.0)
    x = np.linspace(-1e-5, 1e-5, 7)
    np.testing.assert_allclose(potential_1d_effective(p0, 62e-6, x), 0.5 * p0.M * p0.omega**2 * x**2,
                               rtol=1e-15)
    x = np.linspace(-50e-6, 50e-6, 1000)
    diff = (potential_1d_effective(p, eq.r_e, x) - 0.5 * p.M * eq.omega_tilde**2 * x**2
            - 0.5 * p.M * p.omega**2 * p.beta * x**4)
    assert np.max(np.abs(diff)) <= 1e-14 * np.max(potential_1d_effective(p, eq.r_e, x))


def test_potential_1d_is_2d_at_frozen_r():
    p = fig1_params()
    r_e = equilibrium_distance(p)
    x = 20e-6
    frozen = potential_2d(p, x, r_e) - relative_potential(p, r_e)
    assert float(potential_1d_effective(p, r_e, x)) == pytest.approx(float(frozen), rel=1e-9)


def test_harmonic_equilibrium_helper():
    p = fig1_params()
    assert harmonic_equilibrium_distance(p) == pytest.approx(
        equilibrium_distance(p.replace(beta=0.0)), rel=1e-13)
