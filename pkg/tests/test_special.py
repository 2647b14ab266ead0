import math

import numpy as np
import pytest
from scipy import integrate, special

from besselrg import DomainError, PoleError
from besselrg.special import EULER_GAMMA, euler_gamma, gamma_complex, macdonald_k


def test_gamma_classical_values():
    assert gamma_complex(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_complex(-0.5).real == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)
    assert gamma_complex(5.0).real == pytest.approx(24.0, rel=1e-14)


def test_gamma_imaginary_modulus():
    # |Gamma(i)|^2 = pi / sinh(pi), via the reflection formula
    val = abs(gamma_complex(1j)) ** 2
    assert val == pytest.approx(math.pi / math.sinh(math.pi), rel=1e-12)


def test_gamma_poles():
    for z in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            gamma_complex(z)


def test_gamma_recurrence_random():
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 1000:
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(z) > 10 or (abs(z.imag) < 0.05 and z.real < 0.5
                           and abs(z.real - round(z.real)) < 0.05):
            continue
        lhs = gamma_complex(z + 1.0)
        rhs = z * gamma_complex(z)
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)
        checked += 1


def test_gamma_reflection_random():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 300:
        z = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        if abs(z.imag) < 0.05 and abs(z.real - round(z.real)) < 0.05:
            continue
        resid = gamma_complex(z) * gamma_complex(1.0 - z) * np.sin(np.pi * z) / np.pi
        assert abs(resid - 1.0) <= 1e-10
        checked += 1


def test_macdonald_half_order_closed_form():
    # K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
    for x in (0.01, 1.0, 7.0, 40.0):
        assert macdonald_k(0.5, x) == pytest.approx(
            math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-10)


def test_macdonald_k0_quadrature_oracle():
    # independent oracle: integral of exp(-cosh t) via adaptive quadrature
    oracle, _ = integrate.quad(lambda t: math.exp(-math.cosh(t)), 0.0, 20.0)
    assert macdonald_k(0.0, 1.0) == pytest.approx(oracle, rel=1e-10)
    assert macdonald_k(0.0, 1.0) == pytest.approx(0.4210244382, rel=1e-9)


def test_macdonald_imaginary_order_oracle():
    # K_{i nu}(x) = integral exp(-x cosh t) cos(nu t) dt, adaptive oracle
    for nu, x in ((1.0, 1.0), (0.5, 2.0), (1.5, 0.3)):
        oracle, _ = integrate.quad(
            lambda t: math.exp(-x * math.cosh(t)) * math.cos(nu * t), 0.0, 25.0,
            limit=200)
        got = macdonald_k(complex(0.0, nu), x)
        assert isinstance(got, float)
        assert got == pytest.approx(oracle, rel=1e-8, abs=1e-14)


def test_macdonald_real_order_against_scipy():
    xs = np.geomspace(1e-3, 50.0, 40)
    for m in (0.0, 0.25, 0.3, 0.5, 0.9, 1.0):
        got = macdonald_k(m, xs)
        ref = special.kv(m, xs)
        assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-8


def test_macdonald_positive_decreasing():
    xs = np.geomspace(1e-2, 30.0, 200)
    for m in (0.0, 0.3, 0.7, 1.0):
        vals = macdonald_k(m, xs)
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) < 0.0)


def test_macdonald_domain_errors():
    with pytest.raises(DomainError):
        macdonald_k(0.3, -1.0)
    with pytest.raises(DomainError):
        macdonald_k(0.3, 0.0)
    with pytest.raises(DomainError):
        macdonald_k(0.3 + 0.4j, 1.0)


def test_euler_gamma():
    assert euler_gamma() == pytest.approx(0.5772156649015329, abs=1e-16)
    # E = -4 e^{2(nu-gamma)} collapses to -4 at nu = gamma
    assert -4.0 * math.exp(2.0 * (EULER_GAMMA - euler_gamma())) == pytest.approx(-4.0)
