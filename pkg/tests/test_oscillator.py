import math

import numpy as np
import pytest
from scipy.special import eval_hermite, factorial

from iontransport.oscillator import (
    annihilation,
    eigenfunction,
    hermite_functions,
    oscillator_length,
    position_powers,
)

XI = np.linspace(-14, 14, 4096)
DXI = XI[1] - XI[0]


def test_hermite_functions_against_scipy():
    psi = hermite_functions(10, XI)
    for n in range(11):
        ref = (np.exp(-XI**2 / 2) * eval_hermite(n, XI)
               / math.sqrt(2.0**n * factorial(n) * math.sqrt(math.pi)))
        np.testing.assert_allclose(psi[n], ref, atol=1e-12)


def test_orthonormal():
    psi = hermite_functions(12, XI)
    gram = psi @ psi.T * DXI
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-12)


def test_position_powers_match_quadrature():
    psi = hermite_functions(10, XI)
    mats = position_powers(4, 6)
    for k, mat in enumerate(mats):
        quad = (psi[:7] * XI**k) @ psi[:7].T * DXI
        np.testing.assert_allclose(mat, quad, atol=1e-10)


def test_selection_rules():
    mats = position_powers(4, 8)
    for k, mat in enumerate(mats):
        j, n = np.nonzero(np.abs(mat) > 0)
        assert np.all(np.abs(j - n) <= k)
        assert np.all((j - n - k) % 2 == 0)


def test_annihilation():
    a = annihilation(5)
    assert a[0, 1] == 1.0 and a[3, 4] == 2.0


def test_eigenfunction_si():
    M, w, hb = 1e-26, 1e5, 1e-34
    a = oscillator_length(M, w, hb)
    x = XI * a
    phi = eigenfunction(3, x, M, w, hb)
    assert np.sum(phi**2) * DXI * a == pytest.approx(1.0, rel=1e-12)
