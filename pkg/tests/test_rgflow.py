import math

import numpy as np
import pytest

from besselrg import (
    BesselParameter,
    BlowUpError,
    DatumKind,
    ExtensionParameter,
    Representation,
    UnsupportedError,
    closed_form_coupling,
    coupling_for_extension,
    fixed_points,
    flow_rhs,
    integrate_flow,
    next_blowup,
    wilson_gamma_equivalence,
)
from besselrg.rgflow import FlowKind, Stability

D, N = FlowKind.DIRICHLET, FlowKind.NEUMANN


def test_flow_rhs_fixed_points_m_half():
    p = BesselParameter(0.25)
    assert flow_rhs(D, p, -1.0) == pytest.approx(0.0, abs=1e-15)
    assert flow_rhs(D, p, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_flow_rhs_neumann_negative_alpha():
    # -(0 + 1/4 + (-1))^2 + (-1) = -0.5625 - 1
    p = BesselParameter(-1.0)
    assert flow_rhs(N, p, 0.0) == pytest.approx(-1.5625)


def test_closed_form_fixed_point_constant():
    p = BesselParameter(0.25)
    for lam in (0.1, 1.0, 55.0, 1e4):
        assert closed_form_coupling(D, p, (1.0, -1.0), lam) == pytest.approx(-1.0, abs=1e-11)


def test_closed_form_alpha0_fixed_point():
    p = BesselParameter(0.0)
    for lam in (0.5, 3.0, 1e3):
        assert closed_form_coupling(D, p, (1.0, -0.25), lam) == pytest.approx(-0.25, abs=1e-14)


def test_closed_form_limit_cycle_period():
    p = BesselParameter(-1.0)
    for f0 in (-1.0, 0.0, 2.3):
        for n in (1, 2, 3):
            lam = 1.7 * math.exp(math.pi * n)
            v0 = closed_form_coupling(D, p, (1.0, f0), 1.7)
            vn = closed_form_coupling(D, p, (1.0, f0), lam)
            assert vn == pytest.approx(v0, abs=1e-7)


def test_closed_form_satisfies_ode_residual():
    # |Lambda f' - RHS| <= 1e-8 by centered finite differences
    rng = np.random.default_rng(3)
    for _ in range(40):
        alpha = float(rng.uniform(-2.0, 0.99))
        f0 = float(rng.uniform(-2.0, 1.0))
        flow = D if rng.integers(2) else N
        p = BesselParameter(alpha)
        lam = 2.2
        try:
            h = 1e-5
            fm = closed_form_coupling(flow, p, (1.0, f0), lam * (1 - h))
            f = closed_form_coupling(flow, p, (1.0, f0), lam)
            fp = closed_form_coupling(flow, p, (1.0, f0), lam * (1 + h))
        except BlowUpError:
            continue
        if abs(f) > 10.0:
            continue
        deriv = (fp - fm) / (2 * h)  # = Lambda df/dLambda at lam
        assert deriv == pytest.approx(flow_rhs(flow, p, f), rel=1e-5, abs=1e-6)


def test_neumann_duality_with_dirichlet():
    # g-flow equals the f-flow under (m, Lambda) -> (-m, 1/Lambda)
    rng = np.random.default_rng(11)
    for _ in range(40):
        alpha = float(rng.uniform(-2.0, 0.99))
        v0 = float(rng.uniform(-1.5, 1.0))
        lam0, lam = 2.0, 9.0
        p = BesselParameter(alpha)
        try:
            g = closed_form_coupling(N, p, (lam0, v0), lam)
            f = closed_form_coupling(D, p, (1.0 / lam0, v0), 1.0 / lam)
        except BlowUpError:
            continue
        assert g == pytest.approx(f, rel=1e-9, abs=1e-9)


def test_integrate_matches_closed_form():
    rng = np.random.default_rng(5)
    for _ in range(30):
        alpha = float(rng.uniform(-2.0, 0.99))
        f0 = float(rng.uniform(-2.0, 1.0))
        p = BesselParameter(alpha)
        blow = next_blowup(D, p, (1.0, f0))
        lam_max = 1e3 if blow is None else min(1e3, 0.9 * blow)
        if lam_max <= 1.01:
            continue
        lams = np.geomspace(1.0, lam_max, 12)
        _, vals = integrate_flow(D, p, (1.0, f0), lam_max, rel_tol=1e-11, lam_eval=lams)
        closed = [closed_form_coupling(D, p, (1.0, f0), l) for l in lams]
        mask = np.abs(closed) < 1e3
        assert np.max(np.abs(vals[mask] - np.asarray(closed)[mask])) <= 1e-8


def test_integrate_constant_on_fixed_point():
    p = BesselParameter(0.16)  # m = 0.4
    fp = -(0.4 + 0.5) ** 2
    lams, vals = integrate_flow(D, p, (1.0, fp), 500.0, rel_tol=1e-11)
    assert np.max(np.abs(vals - fp)) < 1e-9


def test_integrate_blowup_carries_location():
    p = BesselParameter(-1.0)
    predicted = next_blowup(D, p, (1.0, 0.0))
    with pytest.raises(BlowUpError) as err:
        integrate_flow(D, p, (1.0, 0.0), 1e3)
    assert err.value.lam == pytest.approx(predicted, rel=1e-4)


def test_integrate_restarting_three_cycles():
    from besselrg import integrate_flow_restarting
    p = BesselParameter(-1.0)
    f0 = 0.4
    evals = [1.3 * math.exp(math.pi * n) for n in range(4)]
    _, vals = integrate_flow_restarting(D, p, (1.0, f0), evals, rel_tol=1e-11)
    closed = [closed_form_coupling(D, p, (1.0, f0), l) for l in evals]
    assert np.max(np.abs(vals - np.asarray(closed))) <= 1e-8
    # the column itself is periodic
    assert np.max(np.abs(vals - vals[0])) <= 1e-8


def test_integrate_restarting_pole_evaluation_raises():
    from besselrg import integrate_flow_restarting
    p = BesselParameter(-1.0)
    pole = next_blowup(D, p, (1.0, 0.0))
    with pytest.raises(BlowUpError):
        integrate_flow_restarting(D, p, (1.0, 0.0), [2.0, pole])


def test_integrate_periodic_return():
    # every alpha < 0 period contains one blow-up; integrate the period in
    # two legs, restarting past the pole on the other branch
    p = BesselParameter(-1.0)
    f0 = 0.75  # tan = 0 point of the cycle: one blow-up at e^{pi/2}
    lam_end = math.exp(math.pi)
    lam_pole = next_blowup(D, p, (1.0, f0))
    assert lam_pole == pytest.approx(math.exp(math.pi / 2.0), rel=1e-12)
    stop = 0.98 * lam_pole
    _, leg1 = integrate_flow(D, p, (1.0, f0), stop, rel_tol=1e-12, lam_eval=[stop])
    assert leg1[-1] == pytest.approx(
        closed_form_coupling(D, p, (1.0, f0), stop), abs=1e-7)
    restart = 1.02 * lam_pole
    f_restart = closed_form_coupling(D, p, (1.0, f0), restart)
    _, leg2 = integrate_flow(D, p, (restart, f_restart), lam_end,
                             rel_tol=1e-12, lam_eval=[lam_end])
    assert leg2[-1] == pytest.approx(f0, abs=1e-7)


def test_fixed_points_dirichlet():
    rep = fixed_points(D, BesselParameter(0.25))
    assert rep.values == (-1.0, 0.0)
    assert rep.stability == (Stability.ATTRACTIVE, Stability.REPULSIVE)
    rep2 = fixed_points(D, BesselParameter(0.49))
    assert rep2.values[0] == pytest.approx(-(0.7 + 0.5) ** 2, abs=1e-12)
    assert rep2.values[1] == pytest.approx(-(0.7 - 0.5) ** 2, abs=1e-12)


def test_fixed_points_neumann_mirrored():
    rep = fixed_points(N, BesselParameter(0.25))
    assert rep.values == (-1.0, 0.0)
    assert rep.stability == (Stability.REPULSIVE, Stability.ATTRACTIVE)


def test_fixed_points_alpha0_and_solid():
    rep0 = fixed_points(D, BesselParameter(0.0))
    assert rep0.values == (-0.25,)
    assert rep0.cycle_period is None
    reps = fixed_points(D, BesselParameter(-1.0))
    assert reps.values == ()
    assert reps.cycle_period == pytest.approx(math.pi)
    rep4 = fixed_points(D, BesselParameter(-4.0))
    assert rep4.cycle_period == pytest.approx(math.pi / 2.0)


def test_fixed_points_are_rhs_roots():
    for alpha in (0.04, 0.25, 0.81):
        p = BesselParameter(alpha)
        for flow in (D, N):
            for v in fixed_points(flow, p).values:
                assert flow_rhs(flow, p, v) == pytest.approx(0.0, abs=1e-13)


def test_coupling_for_extension_quarter():
    p = BesselParameter(0.25)
    ext_inf = ExtensionParameter(Representation.MOMENTUM_DIRICHLET,
                                 DatumKind.UNDERLINED_KAPPA, math.inf)
    for lam in (0.5, 3.0, 200.0):
        assert coupling_for_extension(D, p, ext_inf, lam) == pytest.approx(-1.0)
    ext0 = ExtensionParameter(Representation.MOMENTUM_DIRICHLET,
                              DatumKind.UNDERLINED_KAPPA, 0.0)
    assert coupling_for_extension(D, p, ext0, 7.0) == pytest.approx(0.0)


def test_coupling_for_extension_fixed_point_at_matched_scale():
    # kappa-tilde with lambda_D = Lambda gives f = -1/4 - m^2 (tanh(0) = 0)
    m = 0.3
    p = BesselParameter(m * m)
    lam = 5.0
    kt = (0.5 + m) / (0.5 - m) * lam ** (-2 * m)  # lambda_D^{-2m} = (1/2-m)/(1/2+m) kt
    ext = ExtensionParameter(Representation.MOMENTUM_DIRICHLET, DatumKind.KAPPA, kt)
    assert coupling_for_extension(D, p, ext, lam) == pytest.approx(-0.25 - m * m, rel=1e-12)


def test_coupling_for_extension_limits():
    m = 0.3
    p = BesselParameter(m * m)
    ext0 = ExtensionParameter(Representation.MOMENTUM_DIRICHLET, DatumKind.KAPPA, 0.0)
    extinf = ExtensionParameter(Representation.MOMENTUM_DIRICHLET, DatumKind.KAPPA, math.inf)
    assert coupling_for_extension(D, p, ext0, 3.0) == pytest.approx(-(m - 0.5) ** 2)
    assert coupling_for_extension(D, p, extinf, 3.0) == pytest.approx(-(m + 0.5) ** 2)


def test_coupling_for_extension_blowup_and_guards():
    m = 0.3
    p = BesselParameter(m * m)
    kt = -3.0
    ext = ExtensionParameter(Representation.MOMENTUM_DIRICHLET, DatumKind.KAPPA, kt)
    # denominator zero at Lambda* = (-(1/2+m)/((1/2-m) kt))^(1/(2m))
    lam_star = (-(0.5 + m) / ((0.5 - m) * kt)) ** (1.0 / (2 * m))
    with pytest.raises(BlowUpError):
        coupling_for_extension(D, p, ext, lam_star)
    # fine slightly away from the pole
    coupling_for_extension(D, p, ext, 1.5 * lam_star)
    with pytest.raises(UnsupportedError):
        coupling_for_extension(D, BesselParameter(1.5), ext, 2.0)
    with pytest.raises(UnsupportedError):
        coupling_for_extension(N, p, ext, 2.0)  # representation mismatch


def test_coupling_neumann_duality_structure():
    # g is the Dirichlet trajectory formula under m -> -m, Lambda -> 1/Lambda
    # at matched kappa-tilde
    m = 0.3
    p = BesselParameter(m * m)
    kt = 0.7
    ext_n = ExtensionParameter(Representation.MOMENTUM_NEUMANN, DatumKind.KAPPA, kt)
    for lam in (0.3, 2.0, 40.0):
        g = coupling_for_extension(N, p, ext_n, lam)
        m_neg, lam_inv = -m, 1.0 / lam
        num = (0.5 - m_neg) * lam_inv ** (-m_neg) + kt * (0.5 + m_neg) * lam_inv ** m_neg
        den = lam_inv ** (-m_neg) / (0.5 - m_neg) + kt * lam_inv ** m_neg / (0.5 + m_neg)
        assert g == pytest.approx(-num / den, rel=1e-12)


def test_coupling_solid_trajectory_matches_closed_form():
    # the unimodular-kappa trajectory solves the same ODE: check by sampling
    p = BesselParameter(-1.0)
    theta = 0.9
    ext = ExtensionParameter(Representation.MOMENTUM_DIRICHLET,
                             DatumKind.UNIMODULAR_KAPPA,
                             complex(math.cos(theta), math.sin(theta)))
    lam0 = 2.0
    f0 = coupling_for_extension(D, p, ext, lam0)
    for lam in (2.5, 4.0, 11.0):
        expect = closed_form_coupling(D, p, (lam0, f0), lam)
        assert coupling_for_extension(D, p, ext, lam) == pytest.approx(expect, rel=1e-9)


def test_wilson_gamma_equivalence():
    chk = wilson_gamma_equivalence(BesselParameter(0.25), -1.0, 1.0)
    assert chk.gamma == pytest.approx(-1.0)
    assert chk.section_rhs == pytest.approx(1.0)
    assert chk.residual == pytest.approx(0.0, abs=1e-14)
    # fixed point f = 0 at alpha = 1/4 is gamma = 0 with zero residual
    chk0 = wilson_gamma_equivalence(BesselParameter(0.25), 0.0, 2.0)
    assert chk0.gamma == 0.0
    assert chk0.residual == pytest.approx(0.0, abs=1e-15)
    rng = np.random.default_rng(9)
    for _ in range(200):
        f = float(rng.uniform(-5, 5))
        lam = float(rng.uniform(0.1, 100))
        alpha = float(rng.uniform(-2, 2))
        assert abs(wilson_gamma_equivalence(BesselParameter(alpha), f, lam).residual) <= 1e-10
