import math

import numpy as np
import pytest

from besselrg import (
    BesselParameter,
    DatumKind,
    DomainError,
    ExtensionParameter,
    GridScheme,
    Phase,
    Representation,
    canonicalize_datum,
    classify_phase,
    gauss_grid,
    log_grid,
    scale_grid,
    uniform_grid,
    unimodular_extension,
)


@pytest.mark.parametrize("alpha,phase", [
    (4.0, Phase.GAS),
    (1.5, Phase.GAS),
    (1.0, Phase.BOUNDARY),
    (0.5, Phase.LIQUID),
    (0.25, Phase.LIQUID),
    (0.0, Phase.CRITICAL),
    (-1.0, Phase.SOLID),
    (-0.001, Phase.SOLID),
])
def test_phase_classification(alpha, phase):
    assert classify_phase(BesselParameter(alpha)) is phase


def test_phase_consistent_with_m_branch():
    rng = np.random.default_rng(0)
    for alpha in rng.uniform(-3.0, 3.0, 200):
        param = BesselParameter(float(alpha))
        solid = classify_phase(param) is Phase.SOLID
        assert solid == param.is_imaginary
        # m^2 = alpha in both branches
        assert abs(param.m ** 2 - alpha) < 1e-12 * max(1.0, abs(alpha))


def test_m_value_branches():
    assert BesselParameter(0.09).m == pytest.approx(0.3)
    p = BesselParameter(-4.0)
    assert p.m == pytest.approx(2.0j)
    assert p.m_value == pytest.approx(2.0)


def test_grid_constructors():
    for grid in (uniform_grid(10.0, 64), log_grid(10.0, 64), gauss_grid(10.0, 64)):
        assert grid.nodes[0] > 0.0
        assert grid.nodes[-1] <= 10.0 * (1 + 1e-12)
        assert np.all(np.diff(grid.nodes) > 0)
        assert np.all(grid.weights > 0)
        # weights integrate the constant 1 over (p_min-ish, cutoff)
        assert np.sum(grid.weights) == pytest.approx(10.0 - grid.nodes[0], rel=0.02)


def test_grid_scheme_tags():
    assert uniform_grid(1.0, 8).scheme is GridScheme.UNIFORM
    assert log_grid(1.0, 8).scheme is GridScheme.LOG_SPACED
    assert gauss_grid(1.0, 8).scheme is GridScheme.GAUSS_LEGENDRE


def test_scale_grid_roundtrip():
    grid = log_grid(10.0, 50)
    tau = 0.37
    back = scale_grid(scale_grid(grid, tau), -tau)
    np.testing.assert_allclose(back.nodes, grid.nodes, rtol=1e-15)
    np.testing.assert_allclose(back.weights, grid.weights, rtol=1e-15)
    assert back.cutoff == pytest.approx(grid.cutoff, rel=1e-15)


def test_scale_grid_examples():
    grid = uniform_grid(1.0, 4)
    same = scale_grid(grid, 0.0)
    np.testing.assert_array_equal(same.nodes, grid.nodes)
    doubled = scale_grid(grid, math.log(2.0))
    assert doubled.cutoff == pytest.approx(2.0)
    np.testing.assert_allclose(doubled.nodes, 2.0 * grid.nodes)
    shrunk = scale_grid(uniform_grid(10.0, 4), -math.log(10.0))
    assert shrunk.cutoff == pytest.approx(1.0)


def test_extension_validation():
    with pytest.raises(DomainError):
        unimodular_extension(2.0 + 0j)
    ext = unimodular_extension(complex(math.cos(1.2), math.sin(1.2)))
    assert abs(abs(ext.value) - 1.0) < 1e-15
    inf_ext = ExtensionParameter(Representation.POSITION, DatumKind.KAPPA, math.inf)
    assert inf_ext.is_infinite


def test_canonicalization_identification():
    # (m, kappa) and (-m, 1/kappa) label the same realization
    m, kappa = 0.3, -2.5
    assert canonicalize_datum(m, kappa) == (m, kappa)
    m_c, k_c = canonicalize_datum(-m, 1.0 / kappa)
    assert m_c == pytest.approx(m)
    assert k_c == pytest.approx(kappa)
    # extended-real endpoints
    assert canonicalize_datum(-0.5, 0.0) == (0.5, math.inf)
    assert canonicalize_datum(-0.5, math.inf) == (0.5, 0.0)
    # imaginary branch: inverse of a unimodular number is its conjugate
    z = complex(math.cos(0.8), math.sin(0.8))
    m_c, k_c = canonicalize_datum(-1.0j, z)
    assert m_c == 1.0j
    assert k_c == pytest.approx(z.conjugate())


def test_grid_rejects_bad_input():
    with pytest.raises(DomainError):
        log_grid(10.0, 32, p_min_factor=2.0)
    from besselrg import MomentumGrid
    with pytest.raises(DomainError):
        MomentumGrid(np.array([1.0, 0.5]), np.array([0.1, 0.1]), 2.0)
    with pytest.raises(DomainError):
        MomentumGrid(np.array([0.5, 1.0]), np.array([0.1, -0.1]), 2.0)
